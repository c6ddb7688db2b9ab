#pragma once

#include <optional>
#include <vector>

#include "sqba/crypto_sim.hpp"
#include "sqba/messages.hpp"
#include "sqba/params.hpp"

namespace sqba {

enum class CoinPhase : std::uint8_t { Init, FirstSent, SecondSent, Done };

// Two-phase VRF coin over all n processes with thresholds n - f.
class SharedCoin {
 public:
  SharedCoin(const Registry& reg, KeyHandle keys, const Parameters& p, InstanceKey key);

  void start(std::vector<Message>& out);
  void on_first(const Inbound& in, std::vector<Message>& out);
  std::optional<int> on_second(const Inbound& in);
  // Dispatches either message type; returns the output when it is produced.
  std::optional<int> deliver(const Inbound& in, std::vector<Message>& out);

  CoinPhase phase() const;
  std::optional<int> output() const { return output_; }
  const std::optional<Candidate>& current() const { return v_; }
  // v_i at the moment the output was produced.
  const std::optional<Candidate>& at_output() const { return at_output_; }
  const IdSet& first_set() const { return first_set_; }
  const IdSet& second_set() const { return second_set_; }
  // Senders whose FIRST arrived before this process sent SECOND.
  const std::optional<IdSet>& row_at_second() const { return row_; }
  const AuditCounters& audit() const { return audit_; }
  InstanceKey key() const { return key_; }
  std::uint32_t threshold() const { return threshold_; }

 private:
  void update_min(const Candidate& c);

  const Registry* reg_;
  KeyHandle keys_;
  InstanceKey key_;
  std::uint32_t threshold_;
  Bytes vrf_input_;
  bool started_ = false;
  bool second_sent_ = false;
  std::optional<Candidate> v_;
  std::optional<Candidate> at_output_;
  IdSet first_set_;
  IdSet second_set_;
  std::optional<IdSet> row_;
  std::optional<int> output_;
  AuditCounters audit_;
};

}  // namespace sqba
