#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "helpers.hpp"
#include "sqba/approver.hpp"

using namespace sqba;
using namespace sqba::simnet;

namespace {

const InstanceKey kKey{7, 0};

bool has(const std::vector<ProcessId>& v, ProcessId i) { return std::find(v.begin(), v.end(), i) != v.end(); }

// A registry where every committee is large enough to drive an approver to
// completion by hand, and where some process sits in both the ECHO(0) and
// ECHO(bot) committees but outside the OK committee.
struct Fixture {
  Parameters p = derive_params(120, 0.2, 0.05);
  std::optional<Registry> reg;
  MembershipThreshold t = membership_threshold(p.lambda, p.n);
  std::vector<ProcessId> init, echo[3], ok;
  ProcessId both = 0;

  Fixture() {
    for (std::uint64_t seed = 1;; ++seed) {
      reg = setup_registry(p.n, seed);
      init = util::committee(*reg, encode_input(strings::kInit, kKey), t);
      for (Value v : {Value::Zero, Value::One, Value::Bottom})
        echo[int(v)] = util::committee(*reg, encode_input(strings::kEcho, kKey, v), t);
      ok = util::committee(*reg, encode_input(strings::kOk, kKey), t);
      if (init.size() < p.B + 2 || ok.size() < p.W) continue;
      if (echo[0].size() < p.W || echo[1].size() < p.W || echo[2].size() < p.W) continue;
      bool found = false;
      for (ProcessId i : echo[0])
        if (has(echo[2], i) && !has(ok, i)) {
          both = i;
          found = true;
          break;
        }
      if (found && ok.size() < p.n) return;
    }
  }

  VrfOutput proof(ProcessId i, const Bytes& s) const { return reg->key_handle(i).sample(s, t).proof; }
  Message init_msg(ProcessId i, Value v) const {
    return Message{InitMsg{kKey, v, proof(i, encode_input(strings::kInit, kKey))}};
  }
  Endorsement endorsement(ProcessId i, Value v) const {
    return {i, reg->key_handle(i).sign(echo_signing_payload(kKey, v)), proof(i, encode_input(strings::kEcho, kKey, v))};
  }
  Message echo_msg(ProcessId i, Value v) const {
    const Endorsement e = endorsement(i, v);
    return Message{EchoMsg{kKey, v, e.sample, e.sig}};
  }
  std::shared_ptr<OkProof> ok_proof(Value v, std::size_t count) const {
    auto pr = std::make_shared<OkProof>();
    pr->value = v;
    for (std::size_t k = 0; k < count; ++k) pr->endorsements.push_back(endorsement(echo[int(v)][k], v));
    return pr;
  }
  Message ok_msg(ProcessId i, Value v, std::shared_ptr<const OkProof> pr) const {
    return Message{OkMsg{kKey, v, proof(i, encode_input(strings::kOk, kKey)), std::move(pr)}};
  }
  ProcessId outside(const std::vector<ProcessId>& c) const {
    for (ProcessId i = 0; i < p.n; ++i)
      if (!has(c, i)) return i;
    return 0;
  }
  Approver make(ProcessId i) const { return Approver(*reg, reg->key_handle(i), p, kKey); }
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST(Approver, StartMembership) {
  const Fixture& f = fx();
  std::vector<Message> out;
  Approver member = f.make(f.init[0]);
  member.start(Value::One, out);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].type(), MsgType::Init);
  EXPECT_EQ(word_cost(out[0]), 3u);
  EXPECT_THROW(member.start(Value::One, out), std::logic_error);

  out.clear();
  Approver other = f.make(f.outside(f.init));
  other.start(Value::One, out);
  EXPECT_TRUE(out.empty());

  Approver bad = f.make(0);
  EXPECT_THROW(bad.start(static_cast<Value>(3), out), std::invalid_argument);
  std::vector<Message> none;
  EXPECT_THROW(bad.on_init({f.init[0], f.init_msg(f.init[0], Value::One)}, none), std::logic_error);
}

TEST(Approver, EchoNeedsBPlusOneInits) {
  const Fixture& f = fx();
  Approver a = f.make(f.echo[1][0]);
  std::vector<Message> out;
  a.start(Value::One, out);
  out.clear();
  for (std::uint32_t k = 0; k < f.p.B; ++k) a.on_init({f.init[k], f.init_msg(f.init[k], Value::One)}, out);
  EXPECT_TRUE(out.empty());
  a.on_init({f.init[f.p.B], f.init_msg(f.init[f.p.B], Value::One)}, out);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].type(), MsgType::Echo);
  EXPECT_EQ(word_cost(out[0]), 4u);
  for (std::size_t k = f.p.B + 1; k < f.init.size(); ++k) a.on_init({f.init[k], f.init_msg(f.init[k], Value::One)}, out);
  EXPECT_EQ(out.size(), 1u);
  EXPECT_TRUE(a.echoed(Value::One));
}

TEST(Approver, EchoCommitteeNonMemberStaysSilent) {
  const Fixture& f = fx();
  Approver a = f.make(f.outside(f.echo[1]));
  std::vector<Message> out;
  a.start(Value::One, out);
  out.clear();
  for (ProcessId i : f.init) a.on_init({i, f.init_msg(i, Value::One)}, out);
  EXPECT_TRUE(out.empty());
  EXPECT_EQ(a.init_count(Value::One), f.init.size());
}

TEST(Approver, EchoesOncePerValueCommittee) {
  const Fixture& f = fx();
  Approver a = f.make(f.both);
  std::vector<Message> out;
  a.start(Value::Zero, out);
  out.clear();
  for (std::uint32_t k = 0; k <= f.p.B; ++k) a.on_init({f.init[k], f.init_msg(f.init[k], Value::Zero)}, out);
  for (std::uint32_t k = 0; k <= f.p.B; ++k) a.on_init({f.init[k], f.init_msg(f.init[k], Value::Bottom)}, out);
  ASSERT_EQ(out.size(), 2u);
  std::set<Value> vals;
  for (const Message& m : out) vals.insert(std::get<EchoMsg>(m.body).v);
  EXPECT_EQ(vals, (std::set<Value>{Value::Zero, Value::Bottom}));
}

TEST(Approver, InitFromOutsiderDropped) {
  const Fixture& f = fx();
  Approver a = f.make(0);
  std::vector<Message> out;
  a.start(Value::One, out);
  const ProcessId o = f.outside(f.init);
  a.on_init({o, f.init_msg(o, Value::One)}, out);
  a.on_init({o, f.init_msg(f.init[0], Value::One)}, out);  // replayed proof under another sender
  EXPECT_EQ(a.init_count(Value::One), 0u);
  EXPECT_EQ(a.audit().invalid, 2u);
}

TEST(Approver, OkAfterWEchoesOnlyOnce) {
  const Fixture& f = fx();
  Approver a = f.make(f.ok[0]);
  std::vector<Message> out;
  a.start(Value::One, out);
  out.clear();
  for (std::uint32_t k = 0; k < f.p.W; ++k) {
    const ProcessId e = f.echo[1][k];
    a.on_echo({e, f.echo_msg(e, Value::One)}, out);
    EXPECT_EQ(out.size(), k + 1 == f.p.W ? 1u : 0u);
  }
  ASSERT_EQ(out[0].type(), MsgType::Ok);
  EXPECT_EQ(word_cost(out[0]), f.p.W + 3);
  const auto& okm = std::get<OkMsg>(out[0].body);
  EXPECT_EQ(okm.v, Value::One);
  EXPECT_TRUE(Approver::proof_valid(*f.reg, f.p, kKey, Value::One, *okm.proof));
  for (std::uint32_t k = 0; k < f.p.W; ++k) {
    const ProcessId e = f.echo[2][k];
    a.on_echo({e, f.echo_msg(e, Value::Bottom)}, out);
  }
  EXPECT_EQ(out.size(), 1u);
  EXPECT_EQ(a.ok_value(), Value::One);
}

TEST(Approver, NonOkMemberNeverSendsOk) {
  const Fixture& f = fx();
  Approver a = f.make(f.both);  // outside the OK committee by construction
  std::vector<Message> out;
  a.start(Value::One, out);
  out.clear();
  for (ProcessId e : f.echo[1]) a.on_echo({e, f.echo_msg(e, Value::One)}, out);
  EXPECT_TRUE(out.empty());
  EXPECT_FALSE(a.ok_sent());
}

TEST(Approver, BadEchoesDropped) {
  const Fixture& f = fx();
  Approver a = f.make(0);
  std::vector<Message> out;
  a.start(Value::One, out);
  const ProcessId e = f.echo[1][0];
  Message bad_sig = f.echo_msg(e, Value::One);
  std::get<EchoMsg>(bad_sig.body).sig.digest ^= 1;
  a.on_echo({e, bad_sig}, out);
  // Signature over ECHO(0) presented as ECHO(1).
  Message wrong_value = f.echo_msg(e, Value::One);
  std::get<EchoMsg>(wrong_value.body).sig = f.endorsement(e, Value::Zero).sig;
  a.on_echo({e, wrong_value}, out);
  const ProcessId o = f.outside(f.echo[1]);
  a.on_echo({o, f.echo_msg(o, Value::One)}, out);
  EXPECT_EQ(a.echo_count(Value::One), 0u);
  EXPECT_EQ(a.audit().invalid, 3u);
}

TEST(Approver, ResultAfterWValidOks) {
  const Fixture& f = fx();
  Approver a = f.make(0);
  std::vector<Message> out;
  a.start(Value::One, out);
  const auto p1 = f.ok_proof(Value::One, f.p.W);
  const auto pb = f.ok_proof(Value::Bottom, f.p.W);
  std::optional<ValueSet> res;
  for (std::uint32_t k = 0; k < f.p.W; ++k) {
    ASSERT_FALSE(res.has_value());
    res = a.on_ok({f.ok[k], f.ok_msg(f.ok[k], k % 2 ? Value::Bottom : Value::One, k % 2 ? pb : p1)});
  }
  ASSERT_TRUE(res.has_value());
  EXPECT_EQ(res->size(), 2);
  EXPECT_TRUE(res->contains(Value::One));
  EXPECT_TRUE(res->contains(Value::Bottom));
  EXPECT_EQ(a.ok_senders().size(), f.p.W);
}

TEST(Approver, InvalidOkProofsDropped) {
  const Fixture& f = fx();
  Approver a = f.make(0);
  std::vector<Message> out;
  a.start(Value::One, out);
  const ProcessId s = f.ok[0];
  a.on_ok({s, f.ok_msg(s, Value::One, f.ok_proof(Value::One, f.p.W - 1))});  // too few
  auto dup = f.ok_proof(Value::One, f.p.W);
  dup->endorsements.back() = dup->endorsements.front();
  a.on_ok({s, f.ok_msg(s, Value::One, dup)});  // repeated endorser
  a.on_ok({s, f.ok_msg(s, Value::Zero, f.ok_proof(Value::One, f.p.W))});  // proof for another value
  auto forged = f.ok_proof(Value::One, f.p.W);
  forged->endorsements[3].sig.digest += 1;
  a.on_ok({s, f.ok_msg(s, Value::One, forged)});
  a.on_ok({s, f.ok_msg(s, Value::One, nullptr)});
  const ProcessId o = f.outside(f.ok);
  a.on_ok({o, f.ok_msg(o, Value::One, f.ok_proof(Value::One, f.p.W))});  // sender outside OK committee
  EXPECT_EQ(a.ok_count(), 0u);
  EXPECT_EQ(a.audit().invalid, 6u);
}

// --- whole-network trials at n = 120 -----------------------------------------

namespace {

TrialConfig approver_trial(const std::string& adv, InputRule rule, Value v) {
  TrialConfig c = util::trial(Protocol::Approver, derive_params(120, 0.2, 0.05), adv);
  c.inputs = rule;
  c.value = v;
  return c;
}

}  // namespace

TEST(ApproverTrials, ValidityUnderCrashes) {
  int applicable = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const TrialReport r = run_trial(approver_trial("crash_f", InputRule::All, Value::One), seed);
    const Check* c = r.check("validity");
    ASSERT_NE(c, nullptr);
    if (!c->applicable) continue;
    ++applicable;
    EXPECT_TRUE(c->passed) << seed;
    for (const auto& po : r.processes)
      if (!po.corrupted && po.finished) {
        EXPECT_EQ(po.output, int(ValueSet::of(Value::One).raw())) << seed;
      }
  }
  EXPECT_GT(applicable, 20);
}

TEST(ApproverTrials, GradedAgreementOnSplitInputs) {
  for (const char* adv : {"uniform_random", "equivocator", "targeted_delay"}) {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
      const TrialReport r = run_trial(approver_trial(adv, InputRule::Split, Value::Zero), seed);
      EXPECT_FALSE(r.unexplained_safety_violation()) << adv << " " << seed;
      const ValueSet allowed[] = {ValueSet::of(Value::Zero), ValueSet::of(Value::Bottom), [] {
                                    ValueSet s = ValueSet::of(Value::Zero);
                                    s.insert(Value::Bottom);
                                    return s;
                                  }()};
      for (const auto& po : r.processes) {
        if (po.corrupted || !po.finished) continue;
        const bool ok = std::any_of(std::begin(allowed), std::end(allowed),
                                    [&](ValueSet s) { return s.raw() == po.output; });
        EXPECT_TRUE(ok || !r.s_all.s4) << adv << " " << seed << " output " << po.output;
      }
      EXPECT_TRUE(r.check("assumption1")->passed);
      EXPECT_TRUE(r.check("replaceability")->passed);
    }
  }
}

TEST(ApproverTrials, EquivocatorCannotBreakValidity) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const TrialReport r = run_trial(approver_trial("equivocator", InputRule::All, Value::Zero), seed);
    EXPECT_GT(r.net.byzantine_messages, 0u);
    EXPECT_FALSE(r.check("validity")->violated()) << seed;
    EXPECT_FALSE(r.check("graded_agreement")->violated()) << seed;
  }
}

TEST(ApproverTrials, TerminationWhenCommitteesHold) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const TrialReport r = run_trial(approver_trial("uniform_random", InputRule::Split, Value::One), seed);
    const Check* t = r.check("termination");
    if (t->applicable) {
      EXPECT_TRUE(t->passed) << seed;
    }
    EXPECT_FALSE(r.liveness_violation);
  }
}

// Input rules never hand correct processes more than two distinct values.
TEST(ApproverTrials, InputRulesRespectTwoValues) {
  for (InputRule rule : {InputRule::All, InputRule::Split, InputRule::Random})
    for (Value v : {Value::Zero, Value::One, Value::Bottom})
      for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto in = assign_inputs(approver_trial("fifo", rule, v), seed);
        const std::set<Value> distinct(in.begin(), in.end());
        EXPECT_LE(distinct.size(), 2u);
        EXPECT_TRUE(distinct.count(v));
      }
}
