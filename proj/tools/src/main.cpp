// sqba: campaigns, sampling audits, complexity fits and trace replay.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sqba/harness/campaign.hpp"
#include "sqba/harness/fit.hpp"
#include "sqba/harness/sampling.hpp"
#include "sqba/simnet/adversaries.hpp"
#include "sqba/simnet/trace.hpp"
#include "sqba/simnet/trial.hpp"

namespace fs = std::filesystem;
using namespace sqba;

namespace {

struct CommonArgs {
  std::uint32_t n = 64;
  double epsilon = 0.2;
  double d = 0.05;
  bool full = false;
};

void add_common(CLI::App* app, CommonArgs& a) {
  app->add_option("--n", a.n, "number of processes")->check(CLI::PositiveNumber);
  app->add_option("--epsilon", a.epsilon, "resilience slack; f = floor((1/3 - epsilon) n)");
  app->add_option("--d", a.d, "committee slack");
  app->add_flag("--full-participation", a.full, "every process in every committee (lambda = n)");
}

Value parse_value(const std::string& s) {
  if (s == "0") return Value::Zero;
  if (s == "1") return Value::One;
  if (s == "bot") return Value::Bottom;
  throw CLI::ValidationError("--value", "expected 0, 1 or bot");
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

int cmd_run(const CommonArgs& a, const std::string& protocol, const std::string& adversary, std::uint64_t trials,
            std::uint64_t seed, const std::string& out, const std::string& inputs, const std::string& value,
            bool traces) {
  harness::ExperimentConfig cfg;
  cfg.trial.protocol = simnet::protocol_from_string(protocol);
  cfg.trial.params = derive_params(a.n, a.epsilon, a.d, a.full);
  cfg.trial.adversary = adversary;
  cfg.trial.inputs = simnet::input_rule_from_string(inputs);
  cfg.trial.value = parse_value(value);
  cfg.trials = trials;
  cfg.base_seed = seed;

  std::ofstream csv;
  if (!out.empty()) {
    const fs::path base(out);
    if (base.has_parent_path()) fs::create_directories(base.parent_path());
    csv.open(out + ".csv");
    harness::write_csv_header(csv);
  }
  harness::validate_experiment(cfg);
  harness::CampaignAccumulator acc(cfg);
  for (std::uint64_t i = 0; i < trials; ++i) {
    simnet::TrialReport r;
    if (traces && !out.empty()) {
      std::ostringstream t;
      simnet::TraceWriter w(t);
      r = simnet::run_trial(cfg.trial, seed + i, &w);
      write_file(fs::path(out + ".traces") / (std::to_string(seed + i) + ".trace"), t.str());
    } else {
      r = simnet::run_trial(cfg.trial, seed + i);
    }
    if (csv.is_open()) harness::write_csv_row(csv, r);
    acc.add(r);
  }
  const auto rep = acc.finish();
  if (out.empty())
    std::cout << rep.to_json() << '\n';
  else
    write_file(out + ".json", rep.to_json() + "\n");
  for (const auto& v : rep.violations) std::cerr << "violation: " << v << '\n';
  return harness::exit_code(rep);
}

int cmd_sampling(const CommonArgs& a, std::uint64_t committees, std::uint64_t seed, bool randomized,
                 const std::string& out) {
  harness::SamplingConfig cfg;
  cfg.params = derive_params(a.n, a.epsilon, a.d, a.full);
  cfg.committees = committees;
  cfg.seed = seed;
  cfg.randomized_placement = randomized;
  const auto r = harness::verify_sampling_properties(cfg);
  nlohmann::ordered_json j;
  j["n"] = a.n;
  j["committees"] = r.committees;
  for (int i = 0; i < 6; ++i) {
    nlohmann::ordered_json e;
    e["failures"] = r.failures[i];
    e["rate"] = r.rate(i);
    if (i < 4) {
      e["analytic"] = r.analytic[i];
      e["sigma"] = r.sigma[i];
      e["within_bound"] = r.within_bound[i];
    }
    j["S" + std::to_string(i + 1)] = e;
  }
  j["subset_checked"] = r.subset_checked;
  j["s5_subset_failures"] = r.s5_subset_failures;
  j["s6_subset_failures"] = r.s6_subset_failures;
  j["passed"] = r.passed();
  if (out.empty())
    std::cout << j.dump(2) << '\n';
  else
    write_file(out, j.dump(2) + "\n");
  return r.passed() ? 0 : 1;
}

// Reads (n, words) pairs from per-trial CSV files written by `run`.
std::vector<harness::FitPoint> read_points(const std::vector<std::string>& files) {
  std::vector<harness::FitPoint> pts;
  for (const auto& f : files) {
    std::istringstream in(read_file(f));
    std::string line;
    std::getline(in, line);
    std::vector<std::string> cols;
    {
      std::istringstream h(line);
      for (std::string c; std::getline(h, c, ',');) cols.push_back(c);
    }
    const auto idx = [&](const std::string& name) {
      for (std::size_t i = 0; i < cols.size(); ++i)
        if (cols[i] == name) return i;
      throw std::runtime_error(f + ": missing column " + name);
    };
    const std::size_t in_n = idx("n"), in_w = idx("words"), in_ok = idx("all_returned");
    while (std::getline(in, line)) {
      std::vector<std::string> v;
      std::istringstream ls(line);
      for (std::string c; std::getline(ls, c, ',');) v.push_back(c);
      if (v.size() <= std::max({in_n, in_w, in_ok}) || v[in_ok] != "1") continue;
      pts.push_back({std::stod(v[in_n]), std::stod(v[in_w])});
    }
  }
  return pts;
}

int cmd_fit(const std::vector<std::string>& files, const std::vector<std::uint32_t>& grid, std::uint64_t trials,
            std::uint64_t seed, double epsilon, double d) {
  std::vector<harness::FitPoint> pts;
  if (!files.empty()) {
    pts = read_points(files);
  } else {
    for (std::uint32_t n : grid) {
      harness::ExperimentConfig cfg;
      cfg.trial.protocol = simnet::Protocol::Agreement;
      cfg.trial.params = derive_params(n, epsilon, d);
      cfg.trial.inputs = simnet::InputRule::Split;
      cfg.trials = trials;
      cfg.base_seed = seed;
      harness::run_campaign(cfg, [&](const simnet::TrialReport& r) {
        if (r.all_returned) pts.push_back({double(n), double(r.net.words_sent)});
      });
    }
  }
  const auto fit = harness::fit_complexity(pts);
  nlohmann::ordered_json j;
  for (const auto* m : {&fit.n_log2n, &fit.n2})
    j[m->model] = {{"coef", m->coef}, {"rss", m->rss}, {"residuals", m->residuals}};
  j["preferred"] = fit.preferred;
  j["step_ratios"] = fit.step_ratios;
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_replay(const std::vector<std::string>& paths, bool campaign) {
  std::vector<fs::path> files;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      for (const auto& e : fs::directory_iterator(p))
        if (e.path().extension() == ".trace") files.push_back(e.path());
    } else {
      files.emplace_back(p);
    }
  }
  std::sort(files.begin(), files.end());
  int status = 0;
  std::optional<harness::CampaignAccumulator> acc;
  for (const auto& f : files) {
    const std::string text = read_file(f);
    std::istringstream is(text);
    const auto trace = simnet::read_trace(is);
    std::uint32_t mismatches = 0;
    const auto rep = simnet::replay_trace(text, &mismatches);
    const bool same = trace.report_hash && *trace.report_hash == rep.hash() && mismatches == 0;
    std::cerr << f.string() << ": " << (same ? "reproduced" : "MISMATCH") << '\n';
    if (!same) status = 2;
    if (campaign) {
      if (!acc) acc.emplace(harness::ExperimentConfig{rep.config, 0, rep.seed});
      acc->add(rep);
    } else if (files.size() == 1) {
      std::cout << rep.to_json() << '\n';
    }
  }
  if (campaign && acc) {
    const auto rep = acc->finish();
    std::cout << rep.to_json() << '\n';
    if (status == 0) status = harness::exit_code(rep);
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asynchronous Byzantine agreement with sampled committees: simulator and experiment harness"};
  app.require_subcommand(1);

  CommonArgs run_args;
  std::string protocol = "agreement", adversary = "uniform_random", out, inputs = "all", value = "1";
  std::uint64_t trials = 100, seed = 1;
  bool traces = false;
  auto* run = app.add_subcommand("run", "run a Monte-Carlo campaign");
  add_common(run, run_args);
  run->add_option("--protocol", protocol, "shared_coin | whp_coin | approver | agreement");
  run->add_option("--adversary", adversary, "fifo | uniform_random | targeted_delay | crash_f | "
                                            "min_value_suppressor | equivocator");
  run->add_option("--trials", trials);
  run->add_option("--seed", seed, "base seed; trial i uses seed + i");
  run->add_option("--out", out, "output prefix for <out>.csv and <out>.json");
  run->add_option("--inputs", inputs, "all | split | random");
  run->add_option("--value", value, "input value: 0, 1 or bot");
  run->add_flag("--trace", traces, "write <out>.traces/<seed>.trace per trial");

  CommonArgs s_args;
  s_args.n = 10000;
  std::uint64_t committees = 1000, s_seed = 1;
  bool randomized = false;
  std::string s_out;
  auto* vs = app.add_subcommand("verify-sampling", "audit S1-S6 on sampled committees");
  add_common(vs, s_args);
  vs->add_option("--committees", committees);
  vs->add_option("--seed", s_seed);
  vs->add_flag("--randomized-placement", randomized, "draw the corrupted set at random instead of {0..f-1}");
  vs->add_option("--out", s_out, "JSON output path");

  std::vector<std::string> fit_files;
  std::vector<std::uint32_t> grid{250, 500, 1000, 2000};
  std::uint64_t fit_trials = 10, fit_seed = 1;
  double fit_eps = 0.2, fit_d = 0.05;
  auto* fit = app.add_subcommand("fit", "fit words against n ln^2 n and n^2");
  fit->add_option("--input", fit_files, "per-trial CSV files from `run`");
  fit->add_option("--grid", grid, "n values when running campaigns")->delimiter(',');
  fit->add_option("--trials", fit_trials);
  fit->add_option("--seed", fit_seed);
  fit->add_option("--epsilon", fit_eps);
  fit->add_option("--d", fit_d);

  std::vector<std::string> replay_paths;
  bool replay_campaign = false;
  auto* rp = app.add_subcommand("replay", "replay traces and compare report hashes");
  rp->add_option("traces", replay_paths, "trace files or directories")->required();
  rp->add_flag("--campaign", replay_campaign, "aggregate the replayed trials into a campaign report");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run_args, protocol, adversary, trials, seed, out, inputs, value, traces);
    if (*vs) return cmd_sampling(s_args, committees, s_seed, randomized, s_out);
    if (*fit) return cmd_fit(fit_files, grid, fit_trials, fit_seed, fit_eps, fit_d);
    if (*rp) return cmd_replay(replay_paths, replay_campaign);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
