#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "sqba/crypto_sim.hpp"
#include "sqba/messages.hpp"
#include "sqba/params.hpp"

namespace sqba {

// INIT / ECHO / OK graded broadcast over sampled committees.
// One ECHO committee per value; OK messages carry W signed echoes.
class Approver {
 public:
  Approver(const Registry& reg, KeyHandle keys, const Parameters& p, InstanceKey key);

  void start(Value v, std::vector<Message>& out);
  void on_init(const Inbound& in, std::vector<Message>& out);
  void on_echo(const Inbound& in, std::vector<Message>& out);
  std::optional<ValueSet> on_ok(const Inbound& in);
  std::optional<ValueSet> deliver(const Inbound& in, std::vector<Message>& out);

  bool started() const { return started_; }
  Value input() const { return input_; }
  bool ok_sent() const { return ok_sent_; }
  std::optional<Value> ok_value() const { return ok_value_; }
  const std::optional<ValueSet>& result() const { return result_; }
  std::uint32_t init_count(Value v) const { return init_[idx(v)].size(); }
  std::uint32_t echo_count(Value v) const { return echo_[idx(v)].size(); }
  std::uint32_t ok_count() const { return ok_senders_.size(); }
  bool echoed(Value v) const { return echoed_[idx(v)]; }
  // Earliest W valid echoes stored for v.
  const std::vector<Endorsement>& endorsements(Value v) const { return endorsements_[idx(v)]; }
  // OK senders counted towards the result, in arrival order.
  const std::vector<ProcessId>& ok_senders() const { return ok_order_; }
  // Values carried by any valid message received.
  ValueSet seen_values() const { return seen_; }
  const AuditCounters& audit() const { return audit_; }
  InstanceKey key() const { return key_; }

  const Bytes& init_string() const { return init_s_; }
  const Bytes& echo_string(Value v) const { return echo_s_[idx(v)]; }
  const Bytes& ok_string() const { return ok_s_; }

  // Full validity check of an OkProof for value v, independent of any state.
  static bool proof_valid(const Registry& reg, const Parameters& p, InstanceKey key, Value v, const OkProof& proof);

 private:
  static constexpr std::size_t idx(Value v) { return static_cast<std::size_t>(v); }
  bool member_of_echo(Value v);
  bool member_of_ok();

  const Registry* reg_;
  KeyHandle keys_;
  const Parameters* params_;
  InstanceKey key_;
  MembershipThreshold threshold_;
  Bytes init_s_;
  std::array<Bytes, 3> echo_s_;
  std::array<Bytes, 3> echo_payload_;
  Bytes ok_s_;

  bool started_ = false;
  Value input_ = Value::Zero;
  std::array<IdSet, 3> init_;
  std::array<IdSet, 3> echo_;
  std::array<bool, 3> echoed_{};
  std::array<std::optional<SampleProof>, 3> echo_member_;
  std::optional<SampleProof> ok_member_;
  std::array<std::vector<Endorsement>, 3> endorsements_;
  bool ok_sent_ = false;
  std::optional<Value> ok_value_;
  IdSet ok_senders_;
  std::vector<ProcessId> ok_order_;
  ValueSet ok_values_;
  ValueSet seen_;
  std::optional<ValueSet> result_;
  AuditCounters audit_;
};

}  // namespace sqba
