#include "sqba/simnet/adversaries.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sqba/approver.hpp"

namespace sqba::simnet {

std::vector<ProcessId> Rng::choose(std::uint32_t n, std::uint32_t k) {
  std::vector<ProcessId> ids(n);
  std::iota(ids.begin(), ids.end(), 0u);
  k = std::min(k, n);
  for (std::uint32_t i = 0; i < k; ++i) std::swap(ids[i], ids[i + below(n - i)]);
  ids.resize(k);
  return ids;
}

Action FifoAdversary::next_action(const AdversaryView& view) {
  while (view.status(cursor_) != EnvelopeStatus::InFlight) ++cursor_;
  return Action::deliver(cursor_);
}

Action UniformRandomAdversary::next_action(const AdversaryView& view) {
  auto live = view.in_flight();
  return Action::deliver(live[rng_.below(live.size())]);
}

TargetedDelayAdversary::TargetedDelayAdversary(std::uint64_t seed, std::vector<ProcessId> victims)
    : rng_(seed), victims_(std::move(victims)) {}

Action TargetedDelayAdversary::next_action(const AdversaryView& view) {
  if (is_victim_.empty()) {
    if (victims_.empty()) victims_ = rng_.choose(view.n(), std::max<std::uint32_t>(1, view.params().f));
    is_victim_.assign(view.n(), false);
    for (ProcessId v : victims_) is_victim_.at(v) = true;
  }
  const auto total = static_cast<EnvelopeId>(view.envelope_count());
  for (; cursor_ < total; ++cursor_) {
    if (view.status(cursor_) != EnvelopeStatus::InFlight) continue;
    if (is_victim_[view.sender(cursor_)] || is_victim_[view.receiver(cursor_)]) {
      held_.push_back(cursor_);
      continue;
    }
    return Action::deliver(cursor_++);
  }
  while (view.status(held_[held_pos_]) != EnvelopeStatus::InFlight) ++held_pos_;
  return Action::deliver(held_[held_pos_++]);
}

std::vector<ProcessId> CrashAdversary::initial_corruptions(const AdversaryView& view) {
  return rng_.choose(view.n(), view.params().f);
}

std::uint64_t MinValueSuppressor::threshold(const AdversaryView& view, MsgType t) const {
  const double expected = t == MsgType::CoinFirst ? double(view.n()) : view.params().lambda;
  if (expected <= 2.0) return UINT64_MAX;
  return static_cast<std::uint64_t>(std::ldexp(2.0 / expected, 64));
}

void MinValueSuppressor::ingest(const AdversaryView& view) {
  const auto total = static_cast<EnvelopeId>(view.envelope_count());
  for (; cursor_ < total; ++cursor_) (suppressed_[view.sender(cursor_)] ? deferred_ : active_).push_back(cursor_);
}

Action MinValueSuppressor::next_action(const AdversaryView& view) {
  if (suppressed_.empty()) suppressed_.assign(view.n(), false);
  ingest(view);

  const auto last = view.last_delivered();
  if (last && last != checked_) {
    checked_ = last;
    const MsgType t = view.tag(*last);
    const ProcessId s = view.sender(*last);
    if ((t == MsgType::CoinFirst || t == MsgType::WhpFirst) && !view.is_corrupted(s) && view.corruption_budget() > 0) {
      const Message* m = view.payload(*last);
      const std::uint64_t value = t == MsgType::CoinFirst ? std::get<CoinFirstMsg>(m->body).vrf.value
                                                          : std::get<WhpFirstMsg>(m->body).vrf.value;
      if (value < threshold(view, t)) {
        suppressed_[s] = true;
        ++corruptions_;
        std::erase_if(active_, [&](EnvelopeId id) {
          if (view.sender(id) != s) return false;
          deferred_.push_back(id);
          return true;
        });
        return Action::corrupt(s);
      }
    }
  }

  auto& pool = active_.empty() ? deferred_ : active_;
  const std::size_t k = rng_.below(pool.size());
  const EnvelopeId id = pool[k];
  pool[k] = pool.back();
  pool.pop_back();
  return Action::deliver(id);
}

std::vector<ProcessId> Equivocator::initial_corruptions(const AdversaryView& view) {
  for (ProcessId r = 0; r < view.n(); ++r) half_[r & 1].push_back(r);
  return rng_.choose(view.n(), view.params().f);
}

void Equivocator::rewrite(ProcessId p, const Message& m, const AdversaryView& view, std::vector<ByzantineSend>& out) {
  const auto& a = half_[p & 1];
  const auto& b = half_[(p & 1) ^ 1];
  const auto keys = view.keys(p);
  const Node* shadow = view.corrupted_state(p);
  const auto thr = membership_threshold(view.params().lambda, view.n());

  std::visit(
      [&](const auto& body) {
        using T = std::decay_t<decltype(body)>;
        out.push_back({m, a});
        if constexpr (std::is_same_v<T, InitMsg>) {
          InitMsg alt = body;
          alt.v = body.v == Value::Zero ? Value::One : Value::Zero;
          out.push_back({Message{alt}, b});
        } else if constexpr (std::is_same_v<T, EchoMsg>) {
          const Approver* ap = shadow ? shadow->approver_for(body.key) : nullptr;
          if (!ap) return;
          for (Value w : {Value::Zero, Value::One, Value::Bottom}) {
            if (w == body.v) continue;
            const auto sp = keys->sample(ap->echo_string(w), thr);
            if (!sp.member) continue;
            EchoMsg e{body.key, w, sp.proof, keys->sign(echo_signing_payload(body.key, w))};
            out.push_back({Message{e}, b});
          }
        } else if constexpr (std::is_same_v<T, OkMsg>) {
          const Approver* ap = shadow ? shadow->approver_for(body.key) : nullptr;
          if (!ap) return;
          for (Value w : {Value::Zero, Value::One, Value::Bottom}) {
            if (w == body.v || ap->endorsements(w).size() < view.params().W) continue;
            auto proof = std::make_shared<OkProof>(OkProof{w, ap->endorsements(w)});
            out.push_back({Message{OkMsg{body.key, w, body.sample, std::move(proof)}}, b});
            break;
          }
        }
      },
      m.body);
}

std::vector<std::string_view> adversary_names() {
  return {"fifo", "uniform_random", "targeted_delay", "crash_f", "min_value_suppressor", "equivocator"};
}

std::unique_ptr<Adversary> make_adversary(std::string_view name, std::uint64_t seed) {
  if (name == "fifo") return std::make_unique<FifoAdversary>();
  if (name == "uniform_random") return std::make_unique<UniformRandomAdversary>(seed);
  if (name == "targeted_delay") return std::make_unique<TargetedDelayAdversary>(seed);
  if (name == "crash_f") return std::make_unique<CrashAdversary>(seed);
  if (name == "min_value_suppressor") return std::make_unique<MinValueSuppressor>(seed);
  if (name == "equivocator") return std::make_unique<Equivocator>(seed);
  throw std::invalid_argument("unknown adversary: " + std::string(name));
}

}  // namespace sqba::simnet
