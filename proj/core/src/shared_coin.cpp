#include "sqba/shared_coin.hpp"

#include <stdexcept>

namespace sqba {

SharedCoin::SharedCoin(const Registry& reg, KeyHandle keys, const Parameters& p, InstanceKey key)
    : reg_(&reg),
      keys_(keys),
      key_(key),
      threshold_(p.n - p.f),
      vrf_input_(encode_input(strings::kCoin, key)),
      first_set_(p.n),
      second_set_(p.n) {}

CoinPhase SharedCoin::phase() const {
  if (output_) return CoinPhase::Done;
  if (second_sent_) return CoinPhase::SecondSent;
  return started_ ? CoinPhase::FirstSent : CoinPhase::Init;
}

void SharedCoin::update_min(const Candidate& c) {
  if (!v_ || candidate_less(c, *v_)) v_ = c;
}

void SharedCoin::start(std::vector<Message>& out) {
  if (started_) throw std::logic_error("coin_start: coin already started");
  started_ = true;
  Candidate own;
  own.owner = keys_.id();
  own.vrf = keys_.vrf_eval(vrf_input_);
  v_ = own;
  out.push_back(Message{CoinFirstMsg{key_, own.vrf}});
}

// FIRSTs keep being counted after the output until this process has sent its
// own SECOND; other processes may still need it to reach n - f.
void SharedCoin::on_first(const Inbound& in, std::vector<Message>& out) {
  if (!started_) throw std::logic_error("coin_on_first: coin not started");
  if (second_sent_ && output_) {
    ++audit_.late;
    return;
  }
  const auto& m = std::get<CoinFirstMsg>(in.msg.body);
  const bool ok = memoized(in, [&] { return m.key == key_ && reg_->vrf_verify(in.sender, vrf_input_, m.vrf); });
  if (!ok) {
    ++audit_.invalid;
    return;
  }
  if (!first_set_.insert(in.sender)) {
    ++audit_.duplicate;
    return;
  }
  update_min(Candidate{in.sender, m.vrf, {}});
  if (!second_sent_ && first_set_.size() == threshold_) {
    row_ = first_set_;
    second_sent_ = true;
    out.push_back(Message{CoinSecondMsg{key_, *v_}});
  }
}

std::optional<int> SharedCoin::on_second(const Inbound& in) {
  if (!started_) throw std::logic_error("coin_on_second: coin not started");
  if (output_) {
    ++audit_.late;
    return std::nullopt;
  }
  const auto& m = std::get<CoinSecondMsg>(in.msg.body);
  const bool ok =
      memoized(in, [&] { return m.key == key_ && reg_->vrf_verify(m.cand.owner, vrf_input_, m.cand.vrf); });
  if (!ok) {
    ++audit_.invalid;
    return std::nullopt;
  }
  if (!second_set_.insert(in.sender)) {
    ++audit_.duplicate;
    return std::nullopt;
  }
  update_min(Candidate{m.cand.owner, m.cand.vrf, {}});
  if (second_set_.size() == threshold_) {
    at_output_ = v_;
    output_ = static_cast<int>(v_->vrf.value & 1);
    return output_;
  }
  return std::nullopt;
}

std::optional<int> SharedCoin::deliver(const Inbound& in, std::vector<Message>& out) {
  switch (in.msg.type()) {
    case MsgType::CoinFirst:
      on_first(in, out);
      return std::nullopt;
    case MsgType::CoinSecond:
      return on_second(in);
    default:
      ++audit_.invalid;
      return std::nullopt;
  }
}

}  // namespace sqba
