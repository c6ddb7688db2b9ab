#pragma once

#include <optional>
#include <vector>

#include "sqba/crypto_sim.hpp"
#include "sqba/messages.hpp"
#include "sqba/params.hpp"
#include "sqba/shared_coin.hpp"

namespace sqba {

// Coin result: a bit, or a no-value fault when the minimum is still the
// infinity sentinel at the SECOND threshold.
enum class CoinOutcome : std::uint8_t { Zero = 0, One = 1, NoValue = 2 };

// Committee coin. FIRST members evaluate the VRF, SECOND members
// aggregate; every process listens and returns after W valid SECONDs.
class WhpCoin {
 public:
  WhpCoin(const Registry& reg, KeyHandle keys, const Parameters& p, InstanceKey key);

  void start(std::vector<Message>& out);
  void on_first(const Inbound& in, std::vector<Message>& out);
  std::optional<CoinOutcome> on_second(const Inbound& in);
  std::optional<CoinOutcome> deliver(const Inbound& in, std::vector<Message>& out);

  CoinPhase phase() const;
  bool in_first() const { return in_first_; }
  bool in_second() const { return in_second_; }
  std::optional<CoinOutcome> output() const { return output_; }
  // nullopt is the infinity sentinel.
  const std::optional<Candidate>& current() const { return v_; }
  const std::optional<Candidate>& at_output() const { return at_output_; }
  const std::optional<Candidate>& at_second() const { return at_second_; }
  const IdSet& first_set() const { return first_set_; }
  const IdSet& second_set() const { return second_set_; }
  const std::optional<IdSet>& row_at_second() const { return row_; }
  const AuditCounters& audit() const { return audit_; }
  InstanceKey key() const { return key_; }

  const Bytes& first_string() const { return first_s_; }
  const Bytes& second_string() const { return second_s_; }

 private:
  void update_min(const Candidate& c);

  const Registry* reg_;
  KeyHandle keys_;
  InstanceKey key_;
  std::uint32_t W_;
  MembershipThreshold threshold_;
  Bytes vrf_input_;
  Bytes first_s_;
  Bytes second_s_;
  bool started_ = false;
  bool in_first_ = false;
  bool in_second_ = false;
  SampleProof second_proof_;
  bool second_sent_ = false;
  std::optional<Candidate> v_;
  std::optional<Candidate> at_second_;
  std::optional<Candidate> at_output_;
  IdSet first_set_;
  IdSet second_set_;
  std::optional<IdSet> row_;
  std::optional<CoinOutcome> output_;
  AuditCounters audit_;
};

}  // namespace sqba
