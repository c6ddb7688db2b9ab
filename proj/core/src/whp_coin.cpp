#include "sqba/whp_coin.hpp"

#include <stdexcept>

namespace sqba {

WhpCoin::WhpCoin(const Registry& reg, KeyHandle keys, const Parameters& p, InstanceKey key)
    : reg_(&reg),
      keys_(keys),
      key_(key),
      W_(p.W),
      threshold_(membership_threshold(p.lambda, p.n)),
      vrf_input_(encode_input(strings::kCoin, key)),
      first_s_(encode_input(strings::kFirst, key)),
      second_s_(encode_input(strings::kSecond, key)),
      first_set_(p.n),
      second_set_(p.n) {}

CoinPhase WhpCoin::phase() const {
  if (output_) return CoinPhase::Done;
  if (second_sent_) return CoinPhase::SecondSent;
  return started_ ? CoinPhase::FirstSent : CoinPhase::Init;
}

void WhpCoin::update_min(const Candidate& c) {
  if (!v_ || candidate_less(c, *v_)) v_ = c;
}

void WhpCoin::start(std::vector<Message>& out) {
  if (started_) throw std::logic_error("whp_coin_start: coin already started");
  started_ = true;
  const SampleProof first = keys_.sample(first_s_, threshold_);
  second_proof_ = keys_.sample(second_s_, threshold_);
  in_first_ = first.member;
  in_second_ = second_proof_.member;
  if (!in_first_) return;
  Candidate own;
  own.owner = keys_.id();
  own.vrf = keys_.vrf_eval(vrf_input_);
  own.owner_sample = first.proof;
  v_ = own;
  out.push_back(Message{WhpFirstMsg{key_, own.vrf, first.proof}});
}

void WhpCoin::on_first(const Inbound& in, std::vector<Message>& out) {
  if (!started_) throw std::logic_error("whp_on_first: coin not started");
  if (!in_second_) return;
  if (second_sent_ && output_) {
    ++audit_.late;
    return;
  }
  const auto& m = std::get<WhpFirstMsg>(in.msg.body);
  const bool ok = memoized(in, [&] {
    return m.key == key_ && reg_->committee_val(first_s_, threshold_, in.sender, m.sample) &&
           reg_->vrf_verify(in.sender, vrf_input_, m.vrf);
  });
  if (!ok) {
    ++audit_.invalid;
    return;
  }
  if (!first_set_.insert(in.sender)) {
    ++audit_.duplicate;
    return;
  }
  update_min(Candidate{in.sender, m.vrf, m.sample});
  if (!second_sent_ && first_set_.size() == W_) {
    row_ = first_set_;
    at_second_ = v_;
    second_sent_ = true;
    out.push_back(Message{WhpSecondMsg{key_, *v_, second_proof_.proof}});
  }
}

std::optional<CoinOutcome> WhpCoin::on_second(const Inbound& in) {
  if (!started_) throw std::logic_error("whp_on_second: coin not started");
  if (output_) {
    ++audit_.late;
    return std::nullopt;
  }
  const auto& m = std::get<WhpSecondMsg>(in.msg.body);
  const bool ok = memoized(in, [&] {
    return m.key == key_ && reg_->committee_val(second_s_, threshold_, in.sender, m.sample) &&
           reg_->vrf_verify(m.cand.owner, vrf_input_, m.cand.vrf) &&
           reg_->committee_val(first_s_, threshold_, m.cand.owner, m.cand.owner_sample);
  });
  if (!ok) {
    ++audit_.invalid;
    return std::nullopt;
  }
  if (!second_set_.insert(in.sender)) {
    ++audit_.duplicate;
    return std::nullopt;
  }
  update_min(m.cand);
  if (second_set_.size() == W_) {
    at_output_ = v_;
    output_ = v_ ? static_cast<CoinOutcome>(v_->vrf.value & 1) : CoinOutcome::NoValue;
    return output_;
  }
  return std::nullopt;
}

std::optional<CoinOutcome> WhpCoin::deliver(const Inbound& in, std::vector<Message>& out) {
  switch (in.msg.type()) {
    case MsgType::WhpFirst:
      on_first(in, out);
      return std::nullopt;
    case MsgType::WhpSecond:
      return on_second(in);
    default:
      ++audit_.invalid;
      return std::nullopt;
  }
}

}  // namespace sqba
