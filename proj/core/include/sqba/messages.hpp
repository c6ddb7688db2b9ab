#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <variant>
#include <vector>

#include "sqba/crypto_sim.hpp"
#include "sqba/params.hpp"
#include "sqba/types.hpp"

namespace sqba {

enum class MsgType : std::uint8_t { CoinFirst, CoinSecond, WhpFirst, WhpSecond, Init, Echo, Ok };
inline constexpr int kMsgTypeCount = 7;

std::string_view tag_name(MsgType t);

// A coin candidate: a VRF value and whose it is. Ordered by (value, owner).
struct Candidate {
  ProcessId owner = 0;
  VrfOutput vrf;
  // Owner's FIRST committee proof; carried by the committee coin only.
  VrfOutput owner_sample;
};

inline bool candidate_less(const Candidate& a, const Candidate& b) {
  return a.vrf.value != b.vrf.value ? a.vrf.value < b.vrf.value : a.owner < b.owner;
}

struct CoinFirstMsg {
  InstanceKey key;
  VrfOutput vrf;
};
struct CoinSecondMsg {
  InstanceKey key;
  Candidate cand;
};
struct WhpFirstMsg {
  InstanceKey key;
  VrfOutput vrf;
  VrfOutput sample;
};
struct WhpSecondMsg {
  InstanceKey key;
  Candidate cand;
  VrfOutput sample;
};
struct InitMsg {
  InstanceKey key;
  Value v = Value::Zero;
  VrfOutput sample;
};
struct EchoMsg {
  InstanceKey key;
  Value v = Value::Zero;
  VrfOutput sample;
  Signature sig;
};
struct Endorsement {
  ProcessId echoer = 0;
  Signature sig;
  VrfOutput sample;  // echoer's proof for the ECHO(value) committee
};
struct OkProof {
  Value value = Value::Zero;
  std::vector<Endorsement> endorsements;
};
struct OkMsg {
  InstanceKey key;
  Value v = Value::Zero;
  VrfOutput sample;
  std::shared_ptr<const OkProof> proof;
};

using Body = std::variant<CoinFirstMsg, CoinSecondMsg, WhpFirstMsg, WhpSecondMsg, InitMsg, EchoMsg, OkMsg>;

struct Message {
  Body body;
  MsgType type() const { return static_cast<MsgType>(body.index()); }
  const InstanceKey& key() const;
};

// Words per message: one per signature, VRF output, committee proof or
// finite-domain field (the tag/instance/round header counts as one).
std::uint32_t word_cost(const Message& m);

// Cached validation verdict shared by all receivers of one send.
enum class Verdict : std::uint8_t { Unknown, Valid, Invalid };

struct Inbound {
  ProcessId sender;
  const Message& msg;
  Verdict* memo = nullptr;
};

template <class F>
bool memoized(const Inbound& in, F&& check) {
  if (in.memo && *in.memo != Verdict::Unknown) return *in.memo == Verdict::Valid;
  const bool ok = check();
  if (in.memo) *in.memo = ok ? Verdict::Valid : Verdict::Invalid;
  return ok;
}

// Dropped, duplicate or late deliveries seen by one state machine.
struct AuditCounters {
  std::uint32_t invalid = 0;
  std::uint32_t duplicate = 0;
  std::uint32_t late = 0;
  AuditCounters& operator+=(const AuditCounters& o) {
    invalid += o.invalid;
    duplicate += o.duplicate;
    late += o.late;
    return *this;
  }
};

// Committee sampling strings and coin VRF inputs.
namespace strings {
inline constexpr std::string_view kCoin = "COIN";
inline constexpr std::string_view kFirst = "FIRST";
inline constexpr std::string_view kSecond = "SECOND";
inline constexpr std::string_view kInit = "INIT";
inline constexpr std::string_view kEcho = "ECHO";
inline constexpr std::string_view kOk = "OK";
}  // namespace strings

Bytes echo_signing_payload(InstanceKey key, Value v);

// Small dense set of process ids.
class IdSet {
 public:
  explicit IdSet(std::uint32_t n = 0) : bits_((n + 63) / 64, 0) {}
  bool insert(ProcessId i) {
    std::uint64_t& w = bits_[i >> 6];
    const std::uint64_t m = 1ULL << (i & 63);
    if (w & m) return false;
    w |= m;
    ++count_;
    return true;
  }
  bool contains(ProcessId i) const { return (bits_[i >> 6] >> (i & 63)) & 1; }
  std::uint32_t size() const { return count_; }
  std::vector<ProcessId> members() const;

 private:
  std::vector<std::uint64_t> bits_;
  std::uint32_t count_ = 0;
};

}  // namespace sqba
