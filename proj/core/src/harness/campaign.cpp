#include "sqba/harness/campaign.hpp"

#include <ostream>
#include <sstream>

#include <json.hpp>

#include "sqba/simnet/adversaries.hpp"

namespace sqba::harness {

using nlohmann::ordered_json;
using simnet::Check;
using simnet::Protocol;
using simnet::TrialReport;

void validate_experiment(const ExperimentConfig& cfg) {
  const simnet::TrialConfig& t = cfg.trial;
  const Parameters& p = t.params;
  // Re-deriving rejects out-of-range epsilon or d with the same messages as derive_params.
  const Parameters q = derive_params(p.n, p.epsilon, p.d, p.full_participation);
  if (q.f != p.f || q.W != p.W || q.B != p.B) throw RangeError("campaign: parameters are not derived values");
  if (t.protocol == Protocol::Agreement && !is_binary(t.value))
    throw std::invalid_argument("campaign: agreement input must be 0 or 1");
  (void)simnet::make_adversary(t.adversary, 0);
}

namespace {

ordered_json summary_json(const Summary& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"p50", s.p50}, {"p90", s.p90}, {"p99", s.p99}, {"max", s.max}};
}

std::string flags(const SFlags& f) {
  std::string s;
  for (bool b : {f.s1, f.s2, f.s3, f.s4, f.s5, f.s6}) s += b ? '1' : '0';
  return s;
}

}  // namespace

CampaignAccumulator::CampaignAccumulator(const ExperimentConfig& cfg) {
  rep_.config = cfg;
  if (!cfg.trial.params.full_participation) {
    const auto b = sampling_failure_bounds(cfg.trial.params);
    rep_.analytic = {b.s1, b.s2, b.s3, b.s4};
  }
}

void CampaignAccumulator::add(const TrialReport& r) {
  ++rep_.trials;
  rep_.all_returned += r.all_returned;
  rep_.liveness_violations += r.liveness_violation;
  if (r.unanimous_bit) ++rep_.unanimous[*r.unanimous_bit];
  rep_.no_value_trials += r.no_value_outputs > 0;
  words_.push_back(double(r.net.words_sent));
  messages_.push_back(double(r.net.messages_sent));
  duration_.push_back(double(r.net.duration));
  if (r.config.protocol == Protocol::Agreement && r.all_returned)
    rounds_.push_back(double(r.max_decision_round + 1));
  rep_.same_est_rounds += r.same_est_rounds;
  rep_.est_rounds += r.est_rounds;

  bool any_fail = false;
  for (const auto& c : r.committees) {
    ++rep_.committees;
    const bool ok[6] = {c.flags.s1, c.flags.s2, c.flags.s3, c.flags.s4, c.flags.s5, c.flags.s6};
    for (int i = 0; i < 6; ++i) rep_.s_failures[i] += !ok[i];
    any_fail = any_fail || !c.flags.all();
  }
  rep_.trials_with_s_failure += any_fail;

  bool unexplained = false;
  for (const Check& c : r.checks) {
    CheckTally& t = rep_.checks[c.name];
    t.applicable += c.applicable;
    if (!c.passed) (c.applicable ? t.violated : t.excused) += 1;
    if (c.kind == Check::Kind::Safety && c.violated()) {
      unexplained = true;
      rep_.violations.push_back("seed " + std::to_string(r.seed) + ": " + c.name +
                                (c.detail.empty() ? "" : " (" + c.detail + ")"));
    }
  }
  rep_.unexplained_safety += unexplained;
}

CampaignReport CampaignAccumulator::finish() const {
  CampaignReport r = rep_;
  for (int b = 0; b < 2; ++b) r.unanimous_ci[b] = wilson_interval(r.unanimous[b], r.trials);
  r.words = summarize(words_);
  r.messages = summarize(messages_);
  r.duration = summarize(duration_);
  r.rounds = summarize(rounds_);
  return r;
}

CampaignReport run_campaign(const ExperimentConfig& cfg, const std::function<void(const TrialReport&)>& on_trial) {
  validate_experiment(cfg);
  CampaignAccumulator acc(cfg);
  for (std::uint64_t i = 0; i < cfg.trials; ++i) {
    const TrialReport r = simnet::run_trial(cfg.trial, cfg.base_seed + i);
    if (on_trial) on_trial(r);
    acc.add(r);
  }
  return acc.finish();
}

std::string CampaignReport::to_json() const {
  const auto& t = config.trial;
  const auto& p = t.params;
  ordered_json j;
  j["protocol"] = simnet::to_string(t.protocol);
  j["adversary"] = t.adversary;
  j["inputs"] = simnet::to_string(t.inputs);
  j["n"] = p.n;
  j["epsilon"] = p.epsilon;
  j["d"] = p.d;
  j["f"] = p.f;
  j["lambda"] = p.lambda;
  j["W"] = p.W;
  j["B"] = p.B;
  j["full_participation"] = p.full_participation;
  j["base_seed"] = config.base_seed;
  j["trials"] = trials;
  j["all_returned"] = all_returned;
  j["liveness_violations"] = liveness_violations;
  for (int b = 0; b < 2; ++b) {
    const std::string key = "unanimous_" + std::to_string(b);
    j[key] = {{"count", unanimous[b]},
              {"rate", unanimous_rate(b)},
              {"wilson99", {unanimous_ci[b].lo, unanimous_ci[b].hi}}};
  }
  j["no_value_trials"] = no_value_trials;
  j["words"] = summary_json(words);
  j["messages"] = summary_json(messages);
  j["duration"] = summary_json(duration);
  j["rounds"] = summary_json(rounds);
  j["same_est_rounds"] = same_est_rounds;
  j["est_rounds"] = est_rounds;
  ordered_json s;
  s["committees"] = committees;
  s["trials_with_failure"] = trials_with_s_failure;
  for (int i = 0; i < 6; ++i) {
    ordered_json e;
    e["failures"] = s_failures[i];
    e["rate"] = committees ? double(s_failures[i]) / double(committees) : 0.0;
    if (i < 4) e["analytic"] = analytic[i];
    s["S" + std::to_string(i + 1)] = e;
  }
  j["s_properties"] = s;
  ordered_json cj;
  for (const auto& [name, c] : checks)
    cj[name] = {{"applicable", c.applicable}, {"violated", c.violated}, {"excused", c.excused}};
  j["checks"] = cj;
  j["unexplained_safety"] = unexplained_safety;
  j["violations"] = violations;
  return j.dump(2);
}

void write_csv_header(std::ostream& os) {
  os << "seed,protocol,adversary,n,f,all_returned,unanimous_bit,decision,max_decision_round,words,messages,"
        "duration,events,liveness_violation,s_flags,common_count,common_bound,unexplained_safety,failed_checks\n";
}

void write_csv_row(std::ostream& os, const TrialReport& r) {
  std::string failed;
  for (const Check& c : r.checks)
    if (c.violated()) failed += (failed.empty() ? "" : ";") + c.name;
  os << r.seed << ',' << simnet::to_string(r.config.protocol) << ',' << r.config.adversary << ',' << r.n << ','
     << r.f << ',' << r.all_returned << ',' << (r.unanimous_bit ? std::to_string(*r.unanimous_bit) : "") << ','
     << (r.decision ? std::to_string(*r.decision) : "") << ',' << r.max_decision_round << ',' << r.net.words_sent
     << ',' << r.net.messages_sent << ',' << r.net.duration << ',' << r.net.events << ',' << r.liveness_violation
     << ',' << flags(r.s_all) << ',' << (r.common_count ? std::to_string(*r.common_count) : "") << ','
     << r.common_bound << ',' << r.unexplained_safety_violation() << ',' << failed << '\n';
}

int exit_code(const CampaignReport& r) { return r.unexplained_safety > 0 ? 1 : 0; }

}  // namespace sqba::harness
