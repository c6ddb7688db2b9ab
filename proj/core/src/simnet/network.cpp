#include "sqba/simnet/network.hpp"

#include <algorithm>
#include <cstring>

#include "sqba/simnet/trace.hpp"

namespace sqba::simnet {

void Adversary::rewrite(ProcessId, const Message& m, const AdversaryView&, std::vector<ByzantineSend>& out) {
  out.push_back({m, {}});
}

Network::Network(NetworkConfig cfg, const Registry& reg, std::vector<std::unique_ptr<Node>> nodes, Adversary& adv,
                 TraceWriter* trace)
    : cfg_(std::move(cfg)), reg_(&reg), nodes_(std::move(nodes)), adv_(&adv), trace_(trace) {
  if (nodes_.size() != cfg_.params.n) throw std::invalid_argument("node count must equal n");
  if (adv_->needs_causality() || trace_) cfg_.track_causality = true;
  procs_.resize(n());
  slots_.resize(n());
  if (cfg_.track_causality)
    for (auto& s : slots_) s.clock.assign(n(), 0);
}

Network::~Network() = default;

std::uint32_t Network::snapshot(ProcessId p, std::uint32_t seq_after) {
  flush(p);
  Slot& s = slots_[p];
  s.clock[p] = seq_after;
  const auto off = static_cast<std::uint32_t>(arena_.size());
  arena_.insert(arena_.end(), s.clock.begin(), s.clock.end());
  return off;
}

void Network::flush(ProcessId p) {
  Slot& s = slots_[p];
  const std::uint32_t nn = n();
  for (std::uint32_t off : s.pending) {
    const std::uint32_t* src = arena_.data() + off;
    for (std::uint32_t k = 0; k < nn; ++k) s.clock[k] = std::max(s.clock[k], src[k]);
  }
  s.pending.clear();
}

std::span<const std::uint32_t> Network::send_clock(EnvelopeId id) const {
  const SendRecord& s = send_of(id);
  if (s.clock == UINT32_MAX) return {};
  return {arena_.data() + s.clock, n()};
}

std::vector<std::uint32_t> Network::clock_of(ProcessId p) const {
  const Slot& s = slots_[p];
  std::vector<std::uint32_t> c = s.clock;
  for (std::uint32_t off : s.pending)
    for (std::uint32_t k = 0; k < n(); ++k) c[k] = std::max(c[k], arena_[off + k]);
  return c;
}

bool Network::happens_before(EnvelopeId m, EnvelopeId target) const {
  if (!cfg_.track_causality) throw std::logic_error("causality tracking is disabled");
  if (status_[m] != EnvelopeStatus::Delivered) return false;
  const SendRecord& t = send_of(target);
  const ProcessId r = receiver(m);
  const std::uint32_t need = recv_seq_[m] + 1;
  if (t.sender == r) return t.seq >= need;
  if (t.clock == UINT32_MAX) return false;
  return arena_[t.clock + r] >= need;
}

std::uint64_t Network::clock_digest(EnvelopeId id) const {
  const SendRecord& s = send_of(id);
  if (s.has_digest) return s.digest;
  auto c = send_clock(id);
  std::uint64_t d = 0;
  if (!c.empty())
    d = public_hash({reinterpret_cast<const std::uint8_t*>(c.data()), c.size() * sizeof(std::uint32_t)});
  s.digest = d;
  s.has_digest = true;
  return d;
}

void Network::check_replaceability(ProcessId p, const Message& m) {
  const InstanceKey& k = m.key();
  std::uint64_t role = mix_seed(mix_seed(p, static_cast<std::uint64_t>(m.type())), mix_seed(k.instance, k.round));
  if (const auto* e = std::get_if<EchoMsg>(&m.body)) role = mix_seed(role, static_cast<std::uint64_t>(e->v) + 1);
  if (!roles_.insert(role).second) ++result_.replaceability_violations;
}

void Network::emit(ProcessId p, std::vector<Message>& out) {
  if (out.empty()) return;
  Slot& slot = slots_[p];
  const std::uint32_t seq = ++slot.seq;
  const std::uint32_t clock = cfg_.track_causality ? snapshot(p, seq) : UINT32_MAX;
  const std::uint32_t depth = procs_[p].depth + 1;
  for (Message& m : out) {
    check_replaceability(p, m);
    SendRecord& s = sends_.emplace_back();
    s.sender = p;
    s.tag = m.type();
    s.words = word_cost(m);
    s.depth = depth;
    s.seq = seq;
    s.clock = clock;
    s.msg = std::move(m);
    open_block(EnvelopeStatus::InFlight);
    const auto base = static_cast<EnvelopeId>(status_.size() - n());
    for (ProcessId r = 0; r < n(); ++r) {
      pos_[base + r] = static_cast<std::uint32_t>(in_flight_.size());
      in_flight_.push_back(base + r);
    }
    result_.words_sent += std::uint64_t(s.words) * n();
    result_.messages_sent += n();
  }
  out.clear();
}

void Network::emit_byzantine(ProcessId p, std::vector<ByzantineSend>& sends) {
  if (sends.empty()) return;
  Slot& slot = slots_[p];
  const std::uint32_t seq = ++slot.seq;
  const std::uint32_t clock = cfg_.track_causality ? snapshot(p, seq) : UINT32_MAX;
  const std::uint32_t depth = procs_[p].depth + 1;
  for (ByzantineSend& b : sends) {
    SendRecord& s = sends_.emplace_back();
    s.sender = p;
    s.byzantine = true;
    s.tag = b.msg.type();
    s.words = word_cost(b.msg);
    s.depth = depth;
    s.seq = seq;
    s.clock = clock;
    s.msg = std::move(b.msg);
    open_block(b.receivers.empty() ? EnvelopeStatus::InFlight : EnvelopeStatus::Dropped);
    const auto base = static_cast<EnvelopeId>(status_.size() - n());
    auto push = [&](ProcessId r) {
      if (r >= n()) throw AdversaryBug("byzantine send to unknown process");
      const EnvelopeId id = base + r;
      if (b.receivers.empty()) {
        pos_[id] = static_cast<std::uint32_t>(in_flight_.size());
      } else {
        if (status_[id] == EnvelopeStatus::InFlight) return;
        status_[id] = EnvelopeStatus::InFlight;
        pos_[id] = static_cast<std::uint32_t>(in_flight_.size());
      }
      in_flight_.push_back(id);
      ++result_.byzantine_messages;
    };
    if (b.receivers.empty())
      for (ProcessId r = 0; r < n(); ++r) push(r);
    else
      for (ProcessId r : b.receivers) push(r);
  }
  sends.clear();
}

void Network::open_block(EnvelopeStatus initial) {
  if (status_.size() + n() > UINT32_MAX) throw std::length_error("envelope id space exhausted");
  status_.resize(status_.size() + n(), initial);
  pos_.resize(status_.size(), 0);
  if (cfg_.track_causality) recv_seq_.resize(status_.size(), 0);
}

void Network::note_finish(ProcessId p) {
  ProcessRecord& pr = procs_[p];
  if (pr.finished || pr.corrupted || !nodes_[p]->finished()) return;
  pr.finished = true;
  pr.finish_event = events_;
  pr.finish_depth = max_depth_;
  ++finished_correct_;
}

void Network::start_all() {
  const AdversaryView view(*this);
  if (trace_) trace_->start();
  for (ProcessId p = 0; p < n(); ++p) {
    if (procs_[p].corrupted) {
      if (!adv_->runs_shadow()) continue;
      nodes_[p]->start(out_);
      for (const Message& m : out_) adv_->rewrite(p, m, view, byz_out_);
      out_.clear();
      emit_byzantine(p, byz_out_);
      continue;
    }
    nodes_[p]->start(out_);
    emit(p, out_);
    note_finish(p);
  }
}

void Network::corrupt(ProcessId p) {
  if (p >= n()) throw AdversaryBug("corrupt: unknown process " + std::to_string(p));
  if (procs_[p].corrupted) throw AdversaryBug("corrupt: process " + std::to_string(p) + " already corrupted");
  if (corrupted_count_ >= cfg_.params.f) throw AdversaryBug("corrupt: budget f exhausted");
  ProcessRecord& pr = procs_[p];
  pr.corrupted = true;
  if (pr.finished) --finished_correct_;
  ++corrupted_count_;
  result_.corrupted.push_back(p);
  trace_corrupt(p);
  ++events_;
}

void Network::deliver(EnvelopeId id) {
  if (id >= status_.size()) throw AdversaryBug("deliver: unknown envelope " + std::to_string(id));
  if (status_[id] != EnvelopeStatus::InFlight)
    throw AdversaryBug("deliver: envelope " + std::to_string(id) + " is not in flight");
  status_[id] = EnvelopeStatus::Delivered;
  const std::uint32_t at = pos_[id];
  const EnvelopeId last = in_flight_.back();
  in_flight_[at] = last;
  pos_[last] = at;
  in_flight_.pop_back();

  SendRecord& s = sends_[id / n()];
  const ProcessId r = id % n();
  ProcessRecord& pr = procs_[r];
  pr.depth = std::max(pr.depth, s.depth);
  max_depth_ = std::max(max_depth_, s.depth);
  if (cfg_.track_causality) {
    recv_seq_[id] = slots_[r].seq;
    if (s.clock != UINT32_MAX) slots_[r].pending.push_back(s.clock);
  }
  if (trace_) trace_deliver(id);
  ++events_;
  ++result_.deliveries;
  last_delivered_ = id;

  const Inbound in{s.sender, s.msg, &s.verdict};
  if (!pr.corrupted) {
    nodes_[r]->deliver(in, out_);
    emit(r, out_);
    note_finish(r);
  } else if (adv_->runs_shadow()) {
    nodes_[r]->deliver(in, out_);
    const AdversaryView view(*this);
    for (const Message& m : out_) adv_->rewrite(r, m, view, byz_out_);
    out_.clear();
    emit_byzantine(r, byz_out_);
  }
}

void Network::trace_deliver(EnvelopeId id) {
  const SendRecord& s = send_of(id);
  trace_->deliver(events_, id, s.sender, receiver(id), s.tag, s.words, clock_digest(id));
}

void Network::trace_corrupt(ProcessId p) {
  if (trace_) trace_->corrupt(events_, p);
}

NetworkResult Network::run() {
  const AdversaryView view(*this);
  try {
    for (ProcessId p : adv_->initial_corruptions(view)) corrupt(p);
    start_all();
    for (;;) {
      if (cfg_.stop_when_all_finished && all_correct_finished()) break;
      if (in_flight_.empty()) {
        result_.quiescent = true;
        break;
      }
      if (events_ >= cfg_.event_budget) {
        result_.budget_exhausted = true;
        break;
      }
      const Action a = adv_->next_action(view);
      if (a.kind == Action::Kind::Deliver)
        deliver(a.target);
      else
        corrupt(a.target);
    }
  } catch (const AdversaryBug& e) {
    result_.adversary_error = true;
    result_.adversary_error_message = e.what();
  }
  result_.events = events_;
  result_.all_finished = all_correct_finished();
  std::uint32_t dur = 0;
  for (const auto& pr : procs_)
    if (!pr.corrupted && pr.finished) dur = std::max(dur, pr.finish_depth);
  result_.duration = result_.all_finished ? dur : max_depth_;
  return result_;
}

EnvelopeMeta AdversaryView::meta(EnvelopeId id) const {
  const Envelope& e = net_->envelope(id);
  const SendRecord& s = net_->send_of(id);
  return {id, s.sender, e.receiver, s.tag, s.words, e.status};
}

const Message* AdversaryView::payload(EnvelopeId id) const {
  if (id >= net_->envelope_count()) return nullptr;
  const SendRecord& s = net_->send_of(id);
  if (net_->status(id) == EnvelopeStatus::Delivered || s.byzantine || is_corrupted(s.sender)) return &s.msg;
  return nullptr;
}

const Message* AdversaryView::payload_for(EnvelopeId m, EnvelopeId target) const {
  if (m >= net_->envelope_count() || target >= net_->envelope_count()) return nullptr;
  const SendRecord& s = net_->send_of(m);
  if (s.byzantine || is_corrupted(s.sender)) return &s.msg;
  if (net_->status(m) != EnvelopeStatus::Delivered) return nullptr;
  return net_->happens_before(m, target) ? &s.msg : nullptr;
}

std::optional<KeyHandle> AdversaryView::keys(ProcessId p) const {
  if (p >= n() || !is_corrupted(p)) return std::nullopt;
  return net_->registry().key_handle(p);
}

const Node* AdversaryView::corrupted_state(ProcessId p) const {
  if (p >= n() || !is_corrupted(p)) return nullptr;
  return &net_->node(p);
}

}  // namespace sqba::simnet
