#include "sqba/simnet/trial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sqba/simnet/adversaries.hpp"
#include "sqba/simnet/nodes.hpp"
#include "sqba/simnet/trace.hpp"

namespace sqba::simnet {

using nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kAdversarySalt = 0x6164762d73656564ULL;
constexpr std::uint64_t kInputSalt = 0x696e7075742d7273ULL;

constexpr std::array<Value, 3> kValues{Value::Zero, Value::One, Value::Bottom};

Value other_input(const TrialConfig& c) {
  if (c.protocol == Protocol::Approver) return c.value == Value::Bottom ? Value::Zero : Value::Bottom;
  return c.value == Value::One ? Value::Zero : Value::One;
}

std::string flag_string(const SFlags& f) {
  std::string s;
  for (bool b : {f.s1, f.s2, f.s3, f.s4, f.s5, f.s6}) s += b ? '1' : '0';
  return s;
}

SFlags conjunction(SFlags a, const SFlags& b) {
  a.s1 = a.s1 && b.s1;
  a.s2 = a.s2 && b.s2;
  a.s3 = a.s3 && b.s3;
  a.s4 = a.s4 && b.s4;
  a.s5 = a.s5 && b.s5;
  a.s6 = a.s6 && b.s6;
  return a;
}

Value value_from_string(std::string_view s) {
  if (s == "0") return Value::Zero;
  if (s == "1") return Value::One;
  if (s == "bot") return Value::Bottom;
  throw std::invalid_argument("bad value: " + std::string(s));
}

std::string value_name(Value v) { return v == Value::Bottom ? "bot" : (v == Value::One ? "1" : "0"); }

// Evaluates committee membership for every process against the final
// corrupted set.
class CommitteeLog {
 public:
  CommitteeLog(const Registry& reg, const Network& net, const Parameters& p, TrialReport& report)
      : reg_(reg), net_(net), p_(p), thr_(membership_threshold(p.lambda, p.n)), report_(report) {}

  SFlags add(std::string label, const Bytes& s, std::vector<ProcessId>* members = nullptr) {
    CommitteeRecord rec;
    rec.label = std::move(label);
    for (ProcessId q = 0; q < p_.n; ++q) {
      if (!reg_.key_handle(q).sample(s, thr_).member) continue;
      ++rec.size;
      if (net_.process(q).corrupted) ++rec.byzantine;
      if (members) members->push_back(q);
    }
    rec.flags = evaluate_s_properties(p_, {rec.size, rec.byzantine});
    report_.s_all = conjunction(report_.s_all, rec.flags);
    report_.committees.push_back(rec);
    return rec.flags;
  }

 private:
  const Registry& reg_;
  const Network& net_;
  const Parameters& p_;
  MembershipThreshold thr_;
  TrialReport& report_;
};

struct ApproverFlags {
  SFlags all;
  SFlags termination;  // S3 on INIT, OK and the echo committees of correct inputs
};

ApproverFlags log_approver(CommitteeLog& log, const std::string& prefix, InstanceKey key, ValueSet in_play,
                           ValueSet correct_inputs) {
  ApproverFlags out;
  auto note = [&](const SFlags& f, bool for_termination) {
    out.all = conjunction(out.all, f);
    if (for_termination) out.termination = conjunction(out.termination, f);
  };
  note(log.add(prefix + "INIT", encode_input(strings::kInit, key)), true);
  for (Value v : kValues)
    if (in_play.contains(v))
      note(log.add(prefix + "ECHO(" + value_name(v) + ")", encode_input(strings::kEcho, key, v)),
           correct_inputs.contains(v));
  note(log.add(prefix + "OK", encode_input(strings::kOk, key)), true);
  return out;
}

Check make_check(std::string name, Check::Kind kind, bool applicable, bool passed, std::string detail = {}) {
  return Check{std::move(name), kind, applicable, passed, std::move(detail)};
}

std::optional<Candidate> vrf_min(const Registry& reg, const Bytes& input, const std::vector<ProcessId>& among) {
  std::optional<Candidate> best;
  for (ProcessId q : among) {
    Candidate c;
    c.owner = q;
    c.vrf = reg.key_handle(q).vrf_eval(input);
    if (!best || candidate_less(c, *best)) best = c;
  }
  return best;
}

// Counts, for each column, the rows containing it; returns the number of
// columns reaching `threshold`.
std::uint32_t common_columns(const std::vector<const IdSet*>& rows, const std::vector<ProcessId>& columns,
                             std::uint32_t threshold, std::vector<std::uint32_t>* counts_out = nullptr) {
  std::uint32_t c = 0;
  std::vector<std::uint32_t> counts;
  for (ProcessId j : columns) {
    std::uint32_t k = 0;
    for (const IdSet* r : rows) k += r->contains(j);
    counts.push_back(k);
    if (k >= threshold) ++c;
  }
  if (counts_out) *counts_out = std::move(counts);
  return c;
}

void finish_shared_coin(const Registry& reg, const Network& net, const Parameters& p, TrialReport& rep) {
  std::vector<const IdSet*> rows;
  bool rows_complete = true;
  std::optional<int> common;
  bool unanimous = true;
  std::vector<const SharedCoin*> correct;
  for (ProcessId q = 0; q < p.n; ++q) {
    const SharedCoin& c = static_cast<const SharedCoinNode&>(net.node(q)).coin();
    auto& out = rep.processes[q];
    if (c.output()) out.output = *c.output();
    if (out.corrupted) continue;
    correct.push_back(&c);
    if (c.row_at_second())
      rows.push_back(&*c.row_at_second());
    else
      rows_complete = false;
    if (!c.output()) {
      unanimous = false;
    } else if (!common) {
      common = *c.output();
    } else if (*common != *c.output()) {
      unanimous = false;
    }
  }
  if (rep.all_returned && unanimous && common) rep.unanimous_bit = common;

  std::vector<ProcessId> everyone(p.n);
  for (ProcessId q = 0; q < p.n; ++q) everyone[q] = q;
  const Bytes input = encode_input(strings::kCoin, rep.config.instance, 0);
  rep.common_bound = common_value_lower_bound(p, false);
  std::vector<std::uint32_t> counts;
  if (rows_complete) rep.common_count = common_columns(rows, everyone, p.f + 1, &counts);
  rep.checks.push_back(make_check("common_core", Check::Kind::Structural, rows_complete,
                                  !rep.common_count || *rep.common_count + 1e-9 >= rep.common_bound,
                                  rep.common_count ? std::to_string(*rep.common_count) : ""));

  const auto vmin = vrf_min(reg, input, everyone);
  const bool vmin_common = rows_complete && counts[vmin->owner] >= p.f + 1;
  bool propagated = true;
  for (const SharedCoin* c : correct)
    if (c->at_output() && c->at_output()->owner != vmin->owner) propagated = false;
  rep.checks.push_back(
      make_check("min_propagation", Check::Kind::Safety, vmin_common && rep.all_returned, propagated));
  rep.checks.push_back(make_check("termination", Check::Kind::Liveness, true, rep.all_returned));
}

void finish_whp_coin(const Registry& reg, const Network& net, const Parameters& p, TrialReport& rep,
                     CommitteeLog& log) {
  const InstanceKey key{rep.config.instance, 0};
  std::vector<ProcessId> first_members, second_members;
  const SFlags ff = log.add("FIRST", encode_input(strings::kFirst, key), &first_members);
  const SFlags sf = log.add("SECOND", encode_input(strings::kSecond, key), &second_members);

  std::optional<int> common;
  bool unanimous = true;
  std::vector<const WhpCoin*> correct;
  for (ProcessId q = 0; q < p.n; ++q) {
    const WhpCoin& c = static_cast<const WhpCoinNode&>(net.node(q)).coin();
    auto& out = rep.processes[q];
    if (c.output()) out.output = static_cast<int>(*c.output());
    if (out.corrupted) continue;
    correct.push_back(&c);
    if (!c.output()) {
      unanimous = false;
      continue;
    }
    if (*c.output() == CoinOutcome::NoValue) {
      ++rep.no_value_outputs;
      unanimous = false;
    } else if (!common) {
      common = static_cast<int>(*c.output());
    } else if (*common != static_cast<int>(*c.output())) {
      unanimous = false;
    }
  }
  if (rep.all_returned && unanimous && common) rep.unanimous_bit = common;

  std::vector<const IdSet*> rows;
  std::vector<const WhpCoin*> second_correct;
  bool rows_complete = true;
  for (ProcessId q : second_members) {
    if (net.process(q).corrupted) continue;
    const WhpCoin& c = static_cast<const WhpCoinNode&>(net.node(q)).coin();
    second_correct.push_back(&c);
    if (c.row_at_second())
      rows.push_back(&*c.row_at_second());
    else
      rows_complete = false;
  }
  rep.common_bound = common_value_lower_bound(p, true);
  const bool sizes_ok = ff.s1 && ff.s2 && ff.s4 && sf.s1 && sf.s2 && sf.s4 && ff.s3;
  if (rows_complete) rep.common_count = common_columns(rows, first_members, p.B + 1);
  rep.checks.push_back(make_check("common_core", Check::Kind::Structural, sizes_ok && rows_complete,
                                  !rep.common_count || *rep.common_count + 1e-9 >= rep.common_bound,
                                  rep.common_count ? std::to_string(*rep.common_count) : ""));

  const auto vmin = vrf_min(reg, encode_input(strings::kCoin, key), first_members);
  std::uint32_t holders = 0;
  if (vmin)
    for (const WhpCoin* c : second_correct)
      if (c->at_second() && c->at_second()->owner == vmin->owner) ++holders;
  const bool vmin_common = vmin && holders >= p.B + 1 && sf.s3 && sf.s6;
  bool propagated = true;
  for (const WhpCoin* c : correct)
    if (c->output() && (!c->at_output() || c->at_output()->owner != vmin->owner)) propagated = false;
  rep.checks.push_back(
      make_check("min_propagation", Check::Kind::Safety, vmin_common && rep.all_returned, propagated));
  rep.checks.push_back(make_check("termination", Check::Kind::Liveness, ff.s3 && sf.s3, rep.all_returned));
}

void finish_approver(const Network& net, const Parameters& p, TrialReport& rep, CommitteeLog& log,
                     const std::vector<Value>& inputs) {
  const InstanceKey key{rep.config.instance, 0};
  ValueSet in_play, correct_inputs;
  for (ProcessId q = 0; q < p.n; ++q) {
    const Approver& a = static_cast<const ApproverNode&>(net.node(q)).approver();
    for (Value v : a.seen_values().values()) in_play.insert(v);
    auto& out = rep.processes[q];
    if (a.result()) out.output = a.result()->raw();
    if (!out.corrupted) {
      correct_inputs.insert(inputs[q]);
      in_play.insert(inputs[q]);
    }
  }
  const ApproverFlags fl = log_approver(log, "", key, in_play, correct_inputs);

  std::optional<Value> single;
  bool graded = true, valid = true, small = true;
  const std::vector<ProcessId>* first_ok = nullptr;
  bool quorum = true;
  for (ProcessId q = 0; q < p.n; ++q) {
    if (rep.processes[q].corrupted) continue;
    const Approver& a = static_cast<const ApproverNode&>(net.node(q)).approver();
    if (!a.result()) continue;
    const ValueSet r = *a.result();
    if (r.size() > 2) small = false;
    if (correct_inputs.size() == 1 && !(r == correct_inputs)) valid = false;
    if (r.size() == 1) {
      if (single && *single != r.single()) graded = false;
      single = r.single();
    }
    const auto& oks = a.ok_senders();
    if (!first_ok) {
      first_ok = &oks;
    } else {
      IdSet mine(p.n);
      for (std::size_t i = 0; i < p.W && i < oks.size(); ++i) mine.insert(oks[i]);
      std::uint32_t shared = 0;
      for (std::size_t i = 0; i < p.W && i < first_ok->size(); ++i) shared += mine.contains((*first_ok)[i]);
      if (shared < p.B + 1) quorum = false;
    }
  }
  const SFlags& s = fl.all;
  rep.checks.push_back(make_check("validity", Check::Kind::Safety, correct_inputs.size() == 1 && s.s4, valid));
  rep.checks.push_back(make_check("graded_agreement", Check::Kind::Safety, s.s4 && s.s5, graded));
  rep.checks.push_back(make_check("ok_quorum_intersection", Check::Kind::Safety, s.s5, quorum));
  rep.checks.push_back(make_check("result_size", Check::Kind::Safety, s.s4, small));
  rep.checks.push_back(make_check("assumption1", Check::Kind::Structural, true, correct_inputs.size() <= 2));
  rep.checks.push_back(make_check("termination", Check::Kind::Liveness, fl.termination.s3, rep.all_returned));
}

void finish_agreement(const Network& net, const Parameters& p, TrialReport& rep, CommitteeLog& log,
                      const std::vector<Value>& inputs) {
  auto node = [&](ProcessId q) -> const AgreementNode& {
    return static_cast<const AgreementProcess&>(net.node(q)).agreement();
  };
  std::uint64_t rounds = 0;
  ValueSet correct_inputs;
  std::optional<int> decided;
  bool agree = true;
  std::uint32_t safety_events = 0;
  bool triggers_ok = true;
  for (ProcessId q = 0; q < p.n; ++q) {
    const AgreementNode& a = node(q);
    rounds = std::max(rounds, a.rounds_entered());
    auto& out = rep.processes[q];
    out.rounds_entered = a.rounds_entered();
    if (a.decision()) {
      out.output = *a.decision();
      out.round = static_cast<std::int64_t>(*a.core().decision_round());
    }
    if (out.corrupted) continue;
    rep.max_rounds_entered = std::max(rep.max_rounds_entered, a.rounds_entered());
    correct_inputs.insert(inputs[q]);
    if (a.decision()) {
      rep.max_decision_round = std::max(rep.max_decision_round, out.round);
      if (decided && *decided != *a.decision()) agree = false;
      decided = *a.decision();
    }
    for (const BaEvent& e : a.core().events())
      if (e.kind == BaEvent::Kind::SafetyViolation) ++safety_events;
    for (const CoinTrigger& t : a.coin_triggers())
      if (!t.from_start && stage_of(t.key) == Stage::Coin && t.key.round == t.coin_round) triggers_ok = false;
  }
  if (rep.all_returned && agree) rep.decision = decided;

  // Same-estimate rounds among processes still correct.
  for (std::uint64_t r = 1; r < rep.max_rounds_entered; ++r) {
    std::optional<int> est;
    bool all = true, same = true;
    for (ProcessId q = 0; q < p.n && all; ++q) {
      if (rep.processes[q].corrupted) continue;
      const auto& h = node(q).core().est_history();
      if (h.size() <= r) {
        all = false;
        break;
      }
      if (est && *est != h[r]) same = false;
      est = h[r];
    }
    if (!all) break;
    ++rep.est_rounds;
    rep.same_est_rounds += same;
  }

  SFlags round0 = {}, termination = {};
  bool assumption1 = true;
  for (std::uint64_t r = 0; r < rounds; ++r) {
    for (Stage st : {Stage::A1, Stage::Coin, Stage::A2}) {
      const InstanceKey key = stage_key(rep.config.instance, r, st);
      const std::string prefix = "r" + std::to_string(r) + (st == Stage::A1 ? "/A1/" : st == Stage::A2 ? "/A2/" : "/COIN/");
      if (st == Stage::Coin) {
        bool any = false;
        for (ProcessId q = 0; q < p.n && !any; ++q) any = node(q).coin(r) != nullptr;
        if (!any) continue;
        SFlags f = log.add(prefix + "FIRST", encode_input(strings::kFirst, key));
        f = conjunction(f, log.add(prefix + "SECOND", encode_input(strings::kSecond, key)));
        termination = conjunction(termination, f);
        if (r == 0) round0 = conjunction(round0, f);
        continue;
      }
      ValueSet in_play, ins;
      bool any = false;
      for (ProcessId q = 0; q < p.n; ++q) {
        const Approver* a = node(q).approver(r, st);
        if (!a) continue;
        any = true;
        for (Value v : a->seen_values().values()) in_play.insert(v);
        if (!rep.processes[q].corrupted && a->started()) {
          ins.insert(a->input());
          in_play.insert(a->input());
        }
      }
      if (!any) continue;
      if (ins.size() > 2) assumption1 = false;
      const ApproverFlags fl = log_approver(log, prefix, key, in_play, ins);
      termination = conjunction(termination, fl.termination);
      if (r == 0) round0 = conjunction(round0, fl.all);
    }
  }

  const SFlags& s = rep.s_all;
  const bool unanimous = correct_inputs.size() == 1;
  bool valid = true;
  if (unanimous)
    for (ProcessId q = 0; q < p.n; ++q)
      if (!rep.processes[q].corrupted && rep.processes[q].output >= 0 &&
          value_of_bit(rep.processes[q].output) != correct_inputs.single())
        valid = false;
  bool round0_ok = !unanimous || rep.all_returned;
  for (ProcessId q = 0; q < p.n; ++q)
    if (unanimous && !rep.processes[q].corrupted && rep.processes[q].round != 0) round0_ok = false;

  rep.checks.push_back(make_check("agreement", Check::Kind::Safety, s.s4 && s.s5, agree));
  rep.checks.push_back(make_check("validity", Check::Kind::Safety, unanimous && s.s4 && s.s5, valid));
  rep.checks.push_back(make_check("graded_props", Check::Kind::Safety, s.s4 && s.s5, safety_events == 0,
                                  std::to_string(safety_events)));
  rep.checks.push_back(make_check("round0_decision", Check::Kind::Liveness,
                                  unanimous && round0.s3 && round0.s4 && round0.s5 && round0.s6, round0_ok));
  rep.checks.push_back(make_check("assumption1", Check::Kind::Structural, true, assumption1));
  rep.checks.push_back(make_check("coin_independence", Check::Kind::Structural, true, triggers_ok));
  rep.checks.push_back(make_check("termination", Check::Kind::Liveness, termination.s3, rep.all_returned));
}

std::unique_ptr<Node> make_node(const TrialConfig& cfg, const Registry& reg, const Parameters& p, ProcessId q,
                                Value input) {
  const InstanceKey key{cfg.instance, 0};
  switch (cfg.protocol) {
    case Protocol::SharedCoin:
      return std::make_unique<SharedCoinNode>(reg, q, p, key);
    case Protocol::WhpCoin:
      return std::make_unique<WhpCoinNode>(reg, q, p, key);
    case Protocol::Approver:
      return std::make_unique<ApproverNode>(reg, q, p, key, input);
    case Protocol::Agreement:
      return std::make_unique<AgreementProcess>(reg, q, p, cfg.instance, bit_of(input));
  }
  throw std::logic_error("unknown protocol");
}

}  // namespace

std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::SharedCoin:
      return "shared_coin";
    case Protocol::WhpCoin:
      return "whp_coin";
    case Protocol::Approver:
      return "approver";
    case Protocol::Agreement:
      return "agreement";
  }
  return "?";
}

Protocol protocol_from_string(std::string_view s) {
  for (Protocol p : {Protocol::SharedCoin, Protocol::WhpCoin, Protocol::Approver, Protocol::Agreement})
    if (to_string(p) == s) return p;
  throw std::invalid_argument("unknown protocol: " + std::string(s));
}

std::string_view to_string(InputRule r) {
  switch (r) {
    case InputRule::All:
      return "all";
    case InputRule::Split:
      return "split";
    case InputRule::Random:
      return "random";
  }
  return "?";
}

InputRule input_rule_from_string(std::string_view s) {
  for (InputRule r : {InputRule::All, InputRule::Split, InputRule::Random})
    if (to_string(r) == s) return r;
  throw std::invalid_argument("unknown input rule: " + std::string(s));
}

std::string config_json(const TrialConfig& cfg, std::uint64_t seed) {
  const Parameters& p = cfg.params;
  ordered_json j;
  j["protocol"] = to_string(cfg.protocol);
  j["n"] = p.n;
  j["epsilon"] = p.epsilon;
  j["f"] = p.f;
  j["lambda"] = p.lambda;
  j["d"] = p.d;
  j["W"] = p.W;
  j["B"] = p.B;
  j["full_participation"] = p.full_participation;
  j["adversary"] = cfg.adversary;
  j["inputs"] = to_string(cfg.inputs);
  j["value"] = value_name(cfg.value);
  j["instance"] = cfg.instance;
  if (cfg.event_budget) j["event_budget"] = *cfg.event_budget;
  j["seed"] = seed;
  return j.dump();
}

TrialConfig config_from_json(const std::string& text, std::uint64_t* seed) {
  const auto j = ordered_json::parse(text);
  TrialConfig cfg;
  cfg.protocol = protocol_from_string(j.at("protocol").get<std::string>());
  Parameters& p = cfg.params;
  p.n = j.at("n");
  p.epsilon = j.at("epsilon");
  p.f = j.at("f");
  p.lambda = j.at("lambda");
  p.d = j.at("d");
  p.W = j.at("W");
  p.B = j.at("B");
  p.full_participation = j.at("full_participation");
  cfg.adversary = j.at("adversary");
  cfg.inputs = input_rule_from_string(j.at("inputs").get<std::string>());
  cfg.value = value_from_string(j.at("value").get<std::string>());
  cfg.instance = j.at("instance");
  if (j.contains("event_budget")) cfg.event_budget = j.at("event_budget").get<std::uint64_t>();
  if (seed) *seed = j.at("seed");
  return cfg;
}

std::uint64_t expected_messages(const TrialConfig& cfg) {
  const Parameters& p = cfg.params;
  const double lambda = p.full_participation ? double(p.n) : p.lambda;
  const double n = double(p.n);
  switch (cfg.protocol) {
    case Protocol::SharedCoin:
      return static_cast<std::uint64_t>(2 * n * n);
    case Protocol::WhpCoin:
      return static_cast<std::uint64_t>(std::ceil(2 * lambda * n));
    case Protocol::Approver:
      return static_cast<std::uint64_t>(std::ceil(4 * lambda * n));
    case Protocol::Agreement: {
      const double rho = p.full_participation ? coin_success_bound(p.epsilon) : whp_coin_success_bound(p.d);
      const double rounds = 2.0 + (rho > 0 ? std::ceil(1.0 / rho) : 40.0);
      return static_cast<std::uint64_t>(std::ceil(rounds * 10 * lambda * n));
    }
  }
  return 0;
}

std::vector<Value> assign_inputs(const TrialConfig& cfg, std::uint64_t seed) {
  const std::uint32_t n = cfg.params.n;
  if (cfg.protocol == Protocol::Agreement && !is_binary(cfg.value))
    throw std::invalid_argument("agreement inputs must be binary");
  const Value other = other_input(cfg);
  std::vector<Value> in(n, cfg.value);
  if (cfg.inputs == InputRule::Split) {
    for (ProcessId q = 1; q < n; q += 2) in[q] = other;
  } else if (cfg.inputs == InputRule::Random) {
    Rng rng(mix_seed(seed, kInputSalt));
    for (ProcessId q = 0; q < n; ++q) in[q] = rng.below(2) ? cfg.value : other;
  }
  return in;
}

const Check* TrialReport::check(std::string_view name) const {
  for (const Check& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

bool TrialReport::unexplained_safety_violation() const {
  return std::any_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.kind == Check::Kind::Safety && c.violated(); });
}

std::string TrialReport::to_json() const {
  ordered_json j;
  j["config"] = ordered_json::parse(config_json(config, seed));
  j["n"] = n;
  j["f"] = f;
  ordered_json nj;
  nj["events"] = net.events;
  nj["deliveries"] = net.deliveries;
  nj["words_sent"] = net.words_sent;
  nj["messages_sent"] = net.messages_sent;
  nj["byzantine_messages"] = net.byzantine_messages;
  nj["duration"] = net.duration;
  nj["all_finished"] = net.all_finished;
  nj["budget_exhausted"] = net.budget_exhausted;
  nj["quiescent"] = net.quiescent;
  nj["adversary_error"] = net.adversary_error;
  nj["adversary_error_message"] = net.adversary_error_message;
  nj["replaceability_violations"] = net.replaceability_violations;
  nj["corrupted"] = net.corrupted;
  j["net"] = nj;
  ordered_json procs = ordered_json::array();
  for (const auto& p : processes)
    procs.push_back({p.corrupted, p.finished, p.output, p.round, p.rounds_entered, p.finish_depth});
  j["processes"] = procs;
  ordered_json comms = ordered_json::array();
  for (const auto& c : committees) comms.push_back({c.label, c.size, c.byzantine, flag_string(c.flags)});
  j["committees"] = comms;
  j["s_all"] = flag_string(s_all);
  j["all_returned"] = all_returned;
  j["liveness_violation"] = liveness_violation;
  j["unanimous_bit"] = unanimous_bit ? ordered_json(*unanimous_bit) : ordered_json();
  j["no_value_outputs"] = no_value_outputs;
  j["common_count"] = common_count ? ordered_json(*common_count) : ordered_json();
  j["common_bound"] = common_bound;
  j["decision"] = decision ? ordered_json(*decision) : ordered_json();
  j["max_decision_round"] = max_decision_round;
  j["same_est_rounds"] = same_est_rounds;
  j["est_rounds"] = est_rounds;
  j["max_rounds_entered"] = max_rounds_entered;
  ordered_json cj = ordered_json::array();
  for (const auto& c : checks)
    cj.push_back({{"name", c.name},
                  {"kind", c.kind == Check::Kind::Safety     ? "safety"
                           : c.kind == Check::Kind::Liveness ? "liveness"
                                                             : "structural"},
                  {"applicable", c.applicable},
                  {"passed", c.passed},
                  {"detail", c.detail}});
  j["checks"] = cj;
  return j.dump();
}

std::uint64_t TrialReport::hash() const {
  const std::string s = to_json();
  return public_hash({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
}

TrialReport run_trial(const TrialConfig& cfg, std::uint64_t seed, TraceWriter* trace, Adversary* adversary) {
  const Parameters& p = cfg.params;
  if (p.n == 0) throw std::invalid_argument("run_trial: n must be positive");
  const Registry reg = setup_registry(p.n, seed);
  const std::vector<Value> inputs = assign_inputs(cfg, seed);

  std::vector<std::unique_ptr<Node>> nodes;
  nodes.reserve(p.n);
  for (ProcessId q = 0; q < p.n; ++q) nodes.push_back(make_node(cfg, reg, p, q, inputs[q]));

  std::unique_ptr<Adversary> owned;
  if (!adversary) {
    owned = make_adversary(cfg.adversary, mix_seed(seed, kAdversarySalt));
    adversary = owned.get();
  }

  NetworkConfig ncfg;
  ncfg.params = p;
  ncfg.event_budget = cfg.event_budget.value_or(10 * expected_messages(cfg));
  ncfg.stop_when_all_finished = cfg.protocol == Protocol::Agreement;
  if (trace) trace->header(config_json(cfg, seed));
  Network net(ncfg, reg, std::move(nodes), *adversary, trace);

  TrialReport rep;
  rep.config = cfg;
  rep.seed = seed;
  rep.n = p.n;
  rep.f = p.f;
  rep.net = net.run();
  rep.liveness_violation = rep.net.budget_exhausted;
  rep.all_returned = rep.net.all_finished;
  rep.processes.resize(p.n);
  for (ProcessId q = 0; q < p.n; ++q) {
    const ProcessRecord& pr = net.process(q);
    rep.processes[q].corrupted = pr.corrupted;
    rep.processes[q].finished = pr.finished;
    rep.processes[q].finish_depth = pr.finish_depth;
  }

  CommitteeLog log(reg, net, p, rep);
  switch (cfg.protocol) {
    case Protocol::SharedCoin:
      finish_shared_coin(reg, net, p, rep);
      break;
    case Protocol::WhpCoin:
      finish_whp_coin(reg, net, p, rep, log);
      break;
    case Protocol::Approver:
      finish_approver(net, p, rep, log, inputs);
      break;
    case Protocol::Agreement:
      finish_agreement(net, p, rep, log, inputs);
      break;
  }
  rep.checks.push_back(make_check("replaceability", Check::Kind::Structural, true,
                                  rep.net.replaceability_violations == 0));
  rep.checks.push_back(make_check("adversary_legal", Check::Kind::Structural, true, !rep.net.adversary_error,
                                  rep.net.adversary_error_message));
  if (trace) trace->footer(rep.hash());
  return rep;
}

TrialReport replay_trace(const std::string& trace_text, std::uint32_t* mismatches) {
  std::istringstream is(trace_text);
  const Trace t = read_trace(is);
  std::uint64_t seed = 0;
  const TrialConfig cfg = config_from_json(t.config_json, &seed);
  ScriptedAdversary script(t, make_adversary(cfg.adversary, mix_seed(seed, kAdversarySalt)));
  std::ostringstream again;
  TraceWriter w(again);
  TrialReport rep = run_trial(cfg, seed, &w, &script);
  if (mismatches) {
    std::istringstream a(trace_text), b(again.str());
    std::string la, lb;
    std::uint32_t diff = script.mismatches();
    while (true) {
      const bool ga = static_cast<bool>(std::getline(a, la));
      const bool gb = static_cast<bool>(std::getline(b, lb));
      if (!ga && !gb) break;
      if (ga != gb || la != lb) ++diff;
    }
    *mismatches = diff;
  }
  return rep;
}

}  // namespace sqba::simnet
