#include "sqba/agreement.hpp"

#include <stdexcept>

namespace sqba {

InstanceKey stage_key(std::uint64_t ba_instance, std::uint64_t round, Stage s) {
  return {(ba_instance << 2) | static_cast<std::uint64_t>(s), round};
}
std::uint64_t ba_instance_of(const InstanceKey& k) { return k.instance >> 2; }
Stage stage_of(const InstanceKey& k) { return static_cast<Stage>(k.instance & 3); }

BaEffect AgreementCore::start(int v) {
  if (started_) throw std::logic_error("ba_start: already started");
  if (v != 0 && v != 1) throw std::invalid_argument("ba_start: input must be 0 or 1");
  started_ = true;
  est_ = v;
  round_ = 0;
  stage_ = Stage::A1;
  est_history_.push_back(v);
  return {BaEffect::Kind::InvokeApprove, round_, Stage::A1, value_of_bit(est_)};
}

BaEffect AgreementCore::on_first_approve(ValueSet vals) {
  if (!started_ || stage_ != Stage::A1) throw std::logic_error("ba_on_first_approve: not awaiting the first approver");
  if (vals.empty()) throw std::logic_error("ba_on_first_approve: empty value set");
  if (vals.contains(Value::Bottom)) events_.push_back({BaEvent::Kind::NonBinaryFirstApprove, round_, vals});
  propose_ = (vals.size() == 1 && is_binary(vals.single())) ? vals.single() : Value::Bottom;
  stage_ = Stage::Coin;
  return {BaEffect::Kind::InvokeCoin, round_, Stage::Coin, Value::Bottom};
}

BaEffect AgreementCore::on_coin(int c) {
  if (!started_ || stage_ != Stage::Coin) throw std::logic_error("ba_on_coin: not awaiting the coin");
  coin_ = c & 1;
  stage_ = Stage::A2;
  return {BaEffect::Kind::InvokeApprove, round_, Stage::A2, propose_};
}

void AgreementCore::note_coin_fault() { events_.push_back({BaEvent::Kind::CoinFault, round_, {}}); }

BaEffect AgreementCore::on_second_approve(ValueSet props) {
  if (!started_ || stage_ != Stage::A2) throw std::logic_error("ba_on_second_approve: not awaiting the second approver");
  if (props.empty()) throw std::logic_error("ba_on_second_approve: empty value set");
  const bool has0 = props.contains(Value::Zero);
  const bool has1 = props.contains(Value::One);
  if (has0 && has1) {
    events_.push_back({BaEvent::Kind::SafetyViolation, round_, props});
    est_ = *coin_;
  } else if (has0 || has1) {
    const int v = has1 ? 1 : 0;
    est_ = v;
    if (props.size() == 1 && !decision_) {
      decision_ = v;
      decision_round_ = round_;
    }
  } else {
    est_ = *coin_;
  }
  ++round_;
  stage_ = Stage::A1;
  coin_.reset();
  propose_ = Value::Bottom;
  est_history_.push_back(est_);
  return {BaEffect::Kind::InvokeApprove, round_, Stage::A1, value_of_bit(est_)};
}

AgreementNode::AgreementNode(const Registry& reg, KeyHandle keys, const Parameters& p, std::uint64_t ba_instance)
    : reg_(&reg), keys_(keys), params_(&p), ba_instance_(ba_instance) {}

AgreementNode::RoundSlot& AgreementNode::slot(std::uint64_t r) { return rounds_[r]; }

void AgreementNode::start(int v, std::vector<Message>& out) {
  apply(core_.start(v), out, nullptr);
  advance(out, nullptr);
}

void AgreementNode::apply(const BaEffect& e, std::vector<Message>& out, const Message* trigger) {
  RoundSlot& s = slot(e.round);
  const InstanceKey key = stage_key(ba_instance_, e.round, e.stage);
  std::vector<Buffered> backlog;
  backlog.swap(s.pending[static_cast<std::size_t>(e.stage)]);
  if (e.kind == BaEffect::Kind::InvokeCoin) {
    CoinTrigger t;
    t.coin_round = e.round;
    t.from_start = trigger == nullptr;
    if (trigger) {
      t.type = trigger->type();
      t.key = trigger->key();
    }
    coin_triggers_.push_back(t);
    s.coin = std::make_unique<WhpCoin>(*reg_, keys_, *params_, key);
    s.coin->start(out);
    for (const Buffered& b : backlog) s.coin->deliver(Inbound{b.sender, *b.msg, b.memo}, out);
    return;
  }
  auto& inst = e.stage == Stage::A1 ? s.a1 : s.a2;
  inst = std::make_unique<Approver>(*reg_, keys_, *params_, key);
  inst->start(e.value, out);
  for (const Buffered& b : backlog) inst->deliver(Inbound{b.sender, *b.msg, b.memo}, out);
}

void AgreementNode::advance(std::vector<Message>& out, const Message* trigger) {
  while (!halted_) {
    const std::uint64_t r = core_.round();
    RoundSlot& s = slot(r);
    switch (core_.stage()) {
      case Stage::A1:
        if (!s.a1 || !s.a1->result()) return;
        apply(core_.on_first_approve(*s.a1->result()), out, trigger);
        break;
      case Stage::Coin: {
        if (!s.coin || !s.coin->output()) return;
        const CoinOutcome c = *s.coin->output();
        if (c == CoinOutcome::NoValue) core_.note_coin_fault();
        apply(core_.on_coin(c == CoinOutcome::One ? 1 : 0), out, trigger);
        break;
      }
      case Stage::A2: {
        if (!s.a2 || !s.a2->result()) return;
        const BaEffect next = core_.on_second_approve(*s.a2->result());
        const auto dr = core_.decision_round();
        if (dr && core_.round() >= *dr + 2) {
          halted_ = true;
          return;
        }
        apply(next, out, trigger);
        break;
      }
    }
  }
}

void AgreementNode::feed(std::uint64_t r, Stage st, const Inbound& in, std::vector<Message>& out) {
  RoundSlot& s = slot(r);
  switch (st) {
    case Stage::A1:
      if (!s.a1) {
        s.pending[0].push_back({in.sender, &in.msg, in.memo});
        return;
      }
      s.a1->deliver(in, out);
      break;
    case Stage::Coin:
      if (!s.coin) {
        s.pending[1].push_back({in.sender, &in.msg, in.memo});
        return;
      }
      s.coin->deliver(in, out);
      break;
    case Stage::A2:
      if (!s.a2) {
        s.pending[2].push_back({in.sender, &in.msg, in.memo});
        return;
      }
      s.a2->deliver(in, out);
      break;
  }
  advance(out, &in.msg);
}

void AgreementNode::deliver(const Inbound& in, std::vector<Message>& out) {
  if (halted_) return;
  const InstanceKey& k = in.msg.key();
  const auto st = static_cast<std::uint8_t>(stage_of(k));
  if (ba_instance_of(k) != ba_instance_ || st > 2) {
    ++misrouted_.invalid;
    return;
  }
  feed(k.round, static_cast<Stage>(st), in, out);
}

const Approver* AgreementNode::approver(std::uint64_t round, Stage s) const {
  auto it = rounds_.find(round);
  if (it == rounds_.end()) return nullptr;
  if (s == Stage::A1) return it->second.a1.get();
  if (s == Stage::A2) return it->second.a2.get();
  return nullptr;
}

const WhpCoin* AgreementNode::coin(std::uint64_t round) const {
  auto it = rounds_.find(round);
  return it == rounds_.end() ? nullptr : it->second.coin.get();
}

const Approver* AgreementNode::approver_for(const InstanceKey& k) const {
  if (ba_instance_of(k) != ba_instance_) return nullptr;
  return approver(k.round, stage_of(k));
}

AuditCounters AgreementNode::audit() const {
  AuditCounters a = misrouted_;
  for (const auto& [r, s] : rounds_) {
    if (s.a1) a += s.a1->audit();
    if (s.coin) a += s.coin->audit();
    if (s.a2) a += s.a2->audit();
  }
  return a;
}

}  // namespace sqba
