#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sqba/harness/stats.hpp"
#include "sqba/simnet/trial.hpp"

namespace sqba::harness {

struct ExperimentConfig {
  simnet::TrialConfig trial;
  std::uint64_t trials = 0;
  std::uint64_t base_seed = 1;  // trial i uses base_seed + i
};

struct CheckTally {
  std::uint64_t applicable = 0;
  std::uint64_t violated = 0;   // failed while applicable
  std::uint64_t excused = 0;    // failed with a precondition already broken
};

struct CampaignReport {
  ExperimentConfig config;
  std::uint64_t trials = 0;
  std::uint64_t all_returned = 0;
  std::uint64_t liveness_violations = 0;
  std::array<std::uint64_t, 2> unanimous{};
  std::array<Interval, 2> unanimous_ci{};
  std::uint64_t no_value_trials = 0;

  Summary words;
  Summary messages;
  Summary duration;
  Summary rounds;  // agreement: max decision round + 1 over decided trials
  std::uint64_t same_est_rounds = 0;
  std::uint64_t est_rounds = 0;

  // Per-committee S-property failure counts across all logged committees.
  std::uint64_t committees = 0;
  std::array<std::uint64_t, 6> s_failures{};
  std::array<double, 4> analytic{};
  std::uint64_t trials_with_s_failure = 0;

  std::map<std::string, CheckTally> checks;
  std::vector<std::string> violations;  // one line per unexplained safety violation
  std::uint64_t unexplained_safety = 0;

  double unanimous_rate(int b) const { return trials ? double(unanimous[b]) / double(trials) : 0.0; }
  std::string to_json() const;
};

// Per-trial CSV; header first.
void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const simnet::TrialReport& r);

// Throws RangeError / std::invalid_argument for configurations no trial may run with.
void validate_experiment(const ExperimentConfig& cfg);

// Validates parameters before running anything. `on_trial` sees every report.
CampaignReport run_campaign(const ExperimentConfig& cfg,
                            const std::function<void(const simnet::TrialReport&)>& on_trial = {});

// Folds one trial into an aggregate; exposed so replays can rebuild a campaign.
class CampaignAccumulator {
 public:
  explicit CampaignAccumulator(const ExperimentConfig& cfg);
  void add(const simnet::TrialReport& r);
  CampaignReport finish() const;

 private:
  CampaignReport rep_;
  std::vector<double> words_, messages_, duration_, rounds_;
};

// Nonzero iff a safety check failed in a trial with no logged S-property failure.
int exit_code(const CampaignReport& r);

}  // namespace sqba::harness
