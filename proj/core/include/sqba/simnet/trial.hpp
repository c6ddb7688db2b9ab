#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqba/params.hpp"
#include "sqba/simnet/network.hpp"

namespace sqba::simnet {

class TraceWriter;

enum class Protocol : std::uint8_t { SharedCoin, WhpCoin, Approver, Agreement };
std::string_view to_string(Protocol p);
Protocol protocol_from_string(std::string_view s);

// all: every process gets `value`; split: alternate by id between `value`
// and the other input (bottom for the approver, the other bit for agreement);
// random: independent seeded draws from the same two inputs.
enum class InputRule : std::uint8_t { All, Split, Random };
std::string_view to_string(InputRule r);
InputRule input_rule_from_string(std::string_view s);

struct TrialConfig {
  Protocol protocol = Protocol::SharedCoin;
  Parameters params;
  std::string adversary = "uniform_random";
  InputRule inputs = InputRule::All;
  Value value = Value::One;
  std::uint64_t instance = 0;
  std::optional<std::uint64_t> event_budget;  // default: 10x expected messages
};

std::string config_json(const TrialConfig& cfg, std::uint64_t seed);
TrialConfig config_from_json(const std::string& json, std::uint64_t* seed = nullptr);

std::uint64_t expected_messages(const TrialConfig& cfg);

struct CommitteeRecord {
  std::string label;
  std::uint32_t size = 0;
  std::uint32_t byzantine = 0;
  SFlags flags;
};

struct ProcessOutcome {
  bool corrupted = false;
  bool finished = false;
  // Coin: 0, 1, or 2 for no value. Approver: ValueSet raw bits. Agreement: decided bit.
  int output = -1;
  std::int64_t round = -1;  // agreement decision round
  std::uint64_t rounds_entered = 0;
  std::uint32_t finish_depth = 0;
};

// A per-trial property check. Not applicable when a precondition (usually an
// S-property on some committee) failed in this trial.
struct Check {
  enum class Kind : std::uint8_t { Safety, Liveness, Structural };
  std::string name;
  Kind kind = Kind::Safety;
  bool applicable = true;
  bool passed = true;
  std::string detail;
  bool violated() const { return applicable && !passed; }
};

struct TrialReport {
  TrialConfig config;
  std::uint64_t seed = 0;
  std::uint32_t n = 0;
  std::uint32_t f = 0;

  NetworkResult net;
  std::vector<ProcessOutcome> processes;
  std::vector<CommitteeRecord> committees;
  SFlags s_all;  // conjunction over logged committees

  bool all_returned = false;
  bool liveness_violation = false;  // event budget exhausted
  // Coins: every correct process output the same bit.
  std::optional<int> unanimous_bit;
  std::uint32_t no_value_outputs = 0;
  // Common-core count and its bound (coins).
  std::optional<std::uint32_t> common_count;
  double common_bound = 0;
  // Agreement.
  std::optional<int> decision;  // when all correct decided the same bit
  std::int64_t max_decision_round = -1;
  std::uint32_t same_est_rounds = 0;
  std::uint32_t est_rounds = 0;
  std::uint64_t max_rounds_entered = 0;

  std::vector<Check> checks;

  const Check* check(std::string_view name) const;
  // A safety check failed in a trial whose preconditions held.
  bool unexplained_safety_violation() const;
  std::string to_json() const;
  std::uint64_t hash() const;
};

class Adversary;

// Deterministic in (config, seed). A non-null adversary overrides the named one.
TrialReport run_trial(const TrialConfig& cfg, std::uint64_t seed, TraceWriter* trace = nullptr,
                      Adversary* adversary = nullptr);

// Replays a trace produced by run_trial and returns the reproduced report.
TrialReport replay_trace(const std::string& trace_text, std::uint32_t* mismatches = nullptr);

std::vector<Value> assign_inputs(const TrialConfig& cfg, std::uint64_t seed);

}  // namespace sqba::simnet
