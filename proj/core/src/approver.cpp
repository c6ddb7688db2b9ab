#include "sqba/approver.hpp"

#include <stdexcept>

namespace sqba {

namespace {

bool valid_value(Value v) { return static_cast<std::uint8_t>(v) <= 2; }

}  // namespace

Approver::Approver(const Registry& reg, KeyHandle keys, const Parameters& p, InstanceKey key)
    : reg_(&reg),
      keys_(keys),
      params_(&p),
      key_(key),
      threshold_(membership_threshold(p.lambda, p.n)),
      init_s_(encode_input(strings::kInit, key)),
      ok_s_(encode_input(strings::kOk, key)),
      init_{IdSet(p.n), IdSet(p.n), IdSet(p.n)},
      echo_{IdSet(p.n), IdSet(p.n), IdSet(p.n)},
      ok_senders_(p.n) {
  for (Value v : {Value::Zero, Value::One, Value::Bottom}) {
    echo_s_[idx(v)] = encode_input(strings::kEcho, key, v);
    echo_payload_[idx(v)] = echo_signing_payload(key, v);
  }
}

bool Approver::member_of_echo(Value v) {
  auto& slot = echo_member_[idx(v)];
  if (!slot) slot = keys_.sample(echo_s_[idx(v)], threshold_);
  return slot->member;
}

bool Approver::member_of_ok() {
  if (!ok_member_) ok_member_ = keys_.sample(ok_s_, threshold_);
  return ok_member_->member;
}

void Approver::start(Value v, std::vector<Message>& out) {
  if (!valid_value(v)) throw std::invalid_argument("approve_start: value outside {0, 1, bot}");
  if (started_) throw std::logic_error("approve_start: approver already started");
  started_ = true;
  input_ = v;
  const SampleProof sp = keys_.sample(init_s_, threshold_);
  if (sp.member) out.push_back(Message{InitMsg{key_, v, sp.proof}});
}

void Approver::on_init(const Inbound& in, std::vector<Message>& out) {
  if (!started_) throw std::logic_error("approve_on_init: approver not started");
  const auto& m = std::get<InitMsg>(in.msg.body);
  const bool ok = memoized(in, [&] {
    return m.key == key_ && valid_value(m.v) && reg_->committee_val(init_s_, threshold_, in.sender, m.sample);
  });
  if (!ok) {
    ++audit_.invalid;
    return;
  }
  seen_.insert(m.v);
  IdSet& senders = init_[idx(m.v)];
  if (!senders.insert(in.sender)) {
    ++audit_.duplicate;
    return;
  }
  if (senders.size() == params_->B + 1 && !echoed_[idx(m.v)] && member_of_echo(m.v)) {
    echoed_[idx(m.v)] = true;
    EchoMsg e{key_, m.v, echo_member_[idx(m.v)]->proof, keys_.sign(echo_payload_[idx(m.v)])};
    out.push_back(Message{e});
  }
}

void Approver::on_echo(const Inbound& in, std::vector<Message>& out) {
  if (!started_) throw std::logic_error("approve_on_echo: approver not started");
  const auto& m = std::get<EchoMsg>(in.msg.body);
  const bool ok = memoized(in, [&] {
    return m.key == key_ && valid_value(m.v) && m.sig.signer == in.sender &&
           reg_->committee_val(echo_s_[idx(m.v)], threshold_, in.sender, m.sample) &&
           reg_->verify_sig(m.sig, echo_payload_[idx(m.v)]);
  });
  if (!ok) {
    ++audit_.invalid;
    return;
  }
  seen_.insert(m.v);
  IdSet& senders = echo_[idx(m.v)];
  if (!senders.insert(in.sender)) {
    ++audit_.duplicate;
    return;
  }
  auto& store = endorsements_[idx(m.v)];
  if (store.size() < params_->W) store.push_back(Endorsement{in.sender, m.sig, m.sample});
  if (senders.size() == params_->W && !ok_sent_ && member_of_ok()) {
    ok_sent_ = true;
    ok_value_ = m.v;
    auto proof = std::make_shared<OkProof>();
    proof->value = m.v;
    proof->endorsements = store;
    out.push_back(Message{OkMsg{key_, m.v, ok_member_->proof, std::move(proof)}});
  }
}

bool Approver::proof_valid(const Registry& reg, const Parameters& p, InstanceKey key, Value v, const OkProof& proof) {
  if (proof.value != v || proof.endorsements.size() != p.W) return false;
  const MembershipThreshold t = membership_threshold(p.lambda, p.n);
  const Bytes echo_s = encode_input(strings::kEcho, key, v);
  const Bytes payload = echo_signing_payload(key, v);
  IdSet distinct(p.n);
  for (const Endorsement& e : proof.endorsements) {
    if (e.echoer >= p.n || e.sig.signer != e.echoer || !distinct.insert(e.echoer)) return false;
    if (!reg.committee_val(echo_s, t, e.echoer, e.sample)) return false;
    if (!reg.verify_sig(e.sig, payload)) return false;
  }
  return true;
}

std::optional<ValueSet> Approver::on_ok(const Inbound& in) {
  if (!started_) throw std::logic_error("approve_on_ok: approver not started");
  if (result_) {
    ++audit_.late;
    return std::nullopt;
  }
  const auto& m = std::get<OkMsg>(in.msg.body);
  const bool ok = memoized(in, [&] {
    return m.key == key_ && valid_value(m.v) && m.proof &&
           reg_->committee_val(ok_s_, threshold_, in.sender, m.sample) &&
           proof_valid(*reg_, *params_, key_, m.v, *m.proof);
  });
  if (!ok) {
    ++audit_.invalid;
    return std::nullopt;
  }
  seen_.insert(m.v);
  if (!ok_senders_.insert(in.sender)) {
    ++audit_.duplicate;
    return std::nullopt;
  }
  ok_order_.push_back(in.sender);
  ok_values_.insert(m.v);
  if (ok_senders_.size() == params_->W) {
    result_ = ok_values_;
    return result_;
  }
  return std::nullopt;
}

std::optional<ValueSet> Approver::deliver(const Inbound& in, std::vector<Message>& out) {
  switch (in.msg.type()) {
    case MsgType::Init:
      on_init(in, out);
      return std::nullopt;
    case MsgType::Echo:
      on_echo(in, out);
      return std::nullopt;
    case MsgType::Ok:
      return on_ok(in);
    default:
      ++audit_.invalid;
      return std::nullopt;
  }
}

}  // namespace sqba
