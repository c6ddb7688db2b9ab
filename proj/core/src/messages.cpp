#include "sqba/messages.hpp"

#include <bit>

namespace sqba {

std::string to_string(Value v) {
  switch (v) {
    case Value::Zero: return "0";
    case Value::One: return "1";
    case Value::Bottom: return "bot";
  }
  return "?";
}

Value ValueSet::single() const {
  for (Value v : {Value::Zero, Value::One, Value::Bottom})
    if (contains(v)) return v;
  return Value::Bottom;
}

std::vector<Value> ValueSet::values() const {
  std::vector<Value> out;
  for (Value v : {Value::Zero, Value::One, Value::Bottom})
    if (contains(v)) out.push_back(v);
  return out;
}

std::string to_string(ValueSet s) {
  std::string out = "{";
  bool first = true;
  for (Value v : s.values()) {
    if (!first) out += ",";
    out += to_string(v);
    first = false;
  }
  return out + "}";
}

std::string_view tag_name(MsgType t) {
  switch (t) {
    case MsgType::CoinFirst: return "COIN_FIRST";
    case MsgType::CoinSecond: return "COIN_SECOND";
    case MsgType::WhpFirst: return "FIRST";
    case MsgType::WhpSecond: return "SECOND";
    case MsgType::Init: return "INIT";
    case MsgType::Echo: return "ECHO";
    case MsgType::Ok: return "OK";
  }
  return "?";
}

const InstanceKey& Message::key() const {
  return std::visit([](const auto& b) -> const InstanceKey& { return b.key; }, body);
}

std::uint32_t word_cost(const Message& m) {
  switch (m.type()) {
    case MsgType::CoinFirst:   // header, VRF output
    case MsgType::CoinSecond:  // header, candidate VRF output
      return 2;
    case MsgType::WhpFirst:  // header, VRF output, committee proof
      return 3;
    case MsgType::WhpSecond:  // header, candidate VRF output, candidate FIRST proof, own committee proof
      return 4;
    case MsgType::Init:  // header, value, committee proof
      return 3;
    case MsgType::Echo:  // header, value, committee proof, signature
      return 4;
    case MsgType::Ok: {  // header, value, committee proof, one word per endorsement
      const auto& ok = std::get<OkMsg>(m.body);
      return 3 + static_cast<std::uint32_t>(ok.proof ? ok.proof->endorsements.size() : 0);
    }
  }
  return 0;
}

Bytes echo_signing_payload(InstanceKey key, Value v) { return encode_input(strings::kEcho, key, v); }

std::vector<ProcessId> IdSet::members() const {
  std::vector<ProcessId> out;
  out.reserve(count_);
  for (std::size_t w = 0; w < bits_.size(); ++w) {
    std::uint64_t x = bits_[w];
    while (x) {
      const int b = std::countr_zero(x);
      out.push_back(static_cast<ProcessId>(w * 64 + b));
      x &= x - 1;
    }
  }
  return out;
}

}  // namespace sqba
