#include <gtest/gtest.h>

#include <algorithm>

#include "helpers.hpp"
#include "sqba/shared_coin.hpp"
#include "sqba/simnet/adversaries.hpp"
#include "sqba/simnet/nodes.hpp"
#include "sqba/whp_coin.hpp"

using namespace sqba;
using namespace sqba::simnet;
using util::full;

namespace {

const InstanceKey kKey{0, 0};

Message coin_first(const Registry& reg, ProcessId i) {
  return Message{CoinFirstMsg{kKey, vrf_eval(reg, i, encode_input(strings::kCoin, kKey))}};
}

Message coin_second(const Registry& reg, ProcessId owner) {
  Candidate c;
  c.owner = owner;
  c.vrf = vrf_eval(reg, owner, encode_input(strings::kCoin, kKey));
  return Message{CoinSecondMsg{kKey, c}};
}

Candidate global_min(const Registry& reg, const std::vector<ProcessId>& among) {
  std::optional<Candidate> best;
  for (ProcessId i : among) {
    Candidate c{i, vrf_eval(reg, i, encode_input(strings::kCoin, kKey)), {}};
    if (!best || candidate_less(c, *best)) best = c;
  }
  return *best;
}

std::vector<ProcessId> all_ids(std::uint32_t n) {
  std::vector<ProcessId> v(n);
  for (ProcessId i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

TEST(SharedCoin, Start) {
  const Parameters p = full(4);
  const Registry reg = setup_registry(4, 1);
  SharedCoin coin(reg, reg.key_handle(2), p, kKey);
  EXPECT_EQ(coin.phase(), CoinPhase::Init);
  std::vector<Message> out;
  coin.start(out);
  ASSERT_EQ(out.size(), 1u);  // one broadcast, fanned out to all n by the network
  EXPECT_EQ(out[0].type(), MsgType::CoinFirst);
  EXPECT_EQ(word_cost(out[0]), 2u);
  EXPECT_EQ(coin.current()->vrf, vrf_eval(reg, 2, encode_input("COIN", kKey)));
  EXPECT_EQ(coin.phase(), CoinPhase::FirstSent);
  EXPECT_THROW(coin.start(out), std::logic_error);
}

TEST(SharedCoin, NotStarted) {
  const Parameters p = full(4);
  const Registry reg = setup_registry(4, 1);
  SharedCoin coin(reg, reg.key_handle(0), p, kKey);
  const Message m = coin_first(reg, 1);
  std::vector<Message> out;
  EXPECT_THROW(coin.on_first({1, m}, out), std::logic_error);
}

TEST(SharedCoin, FullSetSendsMinimum) {
  const Parameters p = full(4);
  const Registry reg = setup_registry(4, 5);
  SharedCoin coin(reg, reg.key_handle(0), p, kKey);
  std::vector<Message> out;
  coin.start(out);
  out.clear();
  for (ProcessId i = 0; i < 4; ++i) {
    const Message m = coin_first(reg, i);
    coin.on_first({i, m}, out);
    EXPECT_EQ(out.size(), i == 3 ? 1u : 0u);
  }
  ASSERT_EQ(out[0].type(), MsgType::CoinSecond);
  const Candidate want = global_min(reg, all_ids(4));
  EXPECT_EQ(std::get<CoinSecondMsg>(out[0].body).cand.owner, want.owner);
  EXPECT_EQ(coin.phase(), CoinPhase::SecondSent);
  EXPECT_EQ(coin.row_at_second()->size(), 4u);
}

TEST(SharedCoin, ThresholdFiresOnce) {
  const Parameters p = full(10, 0.2);  // f = 1, threshold 9
  ASSERT_EQ(p.f, 1u);
  const Registry reg = setup_registry(10, 2);
  SharedCoin coin(reg, reg.key_handle(0), p, kKey);
  std::vector<Message> out;
  coin.start(out);
  out.clear();
  for (ProcessId i = 0; i < 9; ++i) coin.on_first({i, coin_first(reg, i)}, out);
  EXPECT_EQ(out.size(), 1u);
  coin.on_first({9, coin_first(reg, 9)}, out);
  EXPECT_EQ(out.size(), 1u);
  EXPECT_EQ(coin.first_set().size(), 10u);
}

TEST(SharedCoin, RejectsForgeriesAndDuplicates) {
  const Parameters p = full(4);
  const Registry reg = setup_registry(4, 5);
  SharedCoin coin(reg, reg.key_handle(0), p, kKey);
  std::vector<Message> out;
  coin.start(out);
  Message forged = coin_first(reg, 1);
  std::get<CoinFirstMsg>(forged.body).vrf.value = 0;  // smallest possible, but unprovable
  coin.on_first({1, forged}, out);
  EXPECT_EQ(coin.first_set().size(), 0u);
  EXPECT_EQ(coin.audit().invalid, 1u);
  // Process 2's value relayed by process 1 does not verify as 1's.
  coin.on_first({1, coin_first(reg, 2)}, out);
  EXPECT_EQ(coin.audit().invalid, 2u);
  coin.on_first({1, coin_first(reg, 1)}, out);
  coin.on_first({1, coin_first(reg, 1)}, out);
  EXPECT_EQ(coin.first_set().size(), 1u);
  EXPECT_EQ(coin.audit().duplicate, 1u);
}

TEST(SharedCoin, OutputIsLsbOfMinimum) {
  const Parameters p = full(4);
  const Registry reg = setup_registry(4, 8);
  SharedCoin coin(reg, reg.key_handle(0), p, kKey);
  std::vector<Message> out;
  coin.start(out);
  for (ProcessId i = 0; i < 4; ++i) coin.on_first({i, coin_first(reg, i)}, out);
  std::optional<int> bit;
  for (ProcessId i = 0; i < 4; ++i) {
    ASSERT_FALSE(bit.has_value());
    bit = coin.on_second({i, coin_second(reg, i)});
  }
  ASSERT_TRUE(bit.has_value());
  EXPECT_EQ(*bit, int(global_min(reg, all_ids(4)).vrf.value & 1));
  EXPECT_EQ(coin.phase(), CoinPhase::Done);
  // Late messages are ignored.
  EXPECT_FALSE(coin.on_second({0, coin_second(reg, 0)}).has_value());
  EXPECT_EQ(coin.audit().late, 1u);
}

// Every correct process outputs the bit of the global minimum whenever all
// FIRSTs reach everyone before any SECOND, which FIFO scheduling guarantees.
TEST(SharedCoin, SynchronousDeliveryMatchesBruteForce) {
  for (std::uint32_t n : {4u, 16u, 120u}) {
    const Parameters p = n == 120 ? derive_params(120, 0.2, 0.05, true) : full(n);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const TrialReport r = run_trial(util::trial(Protocol::SharedCoin, p, "fifo"), seed);
      const Registry reg = setup_registry(n, seed);
      const int want = int(global_min(reg, all_ids(n)).vrf.value & 1);
      ASSERT_TRUE(r.all_returned);
      ASSERT_TRUE(r.unanimous_bit.has_value());
      EXPECT_EQ(*r.unanimous_bit, want) << "n=" << n << " seed=" << seed;
      for (const auto& po : r.processes) EXPECT_TRUE(po.output == 0 || po.output == 1);
    }
  }
}

// --- committee coin ---------------------------------------------------------

namespace {

struct WhpSetup {
  Parameters p = derive_params(120, 0.2, 0.05);
  std::uint64_t seed = 0;
  std::optional<Registry> reg;
  MembershipThreshold t;
  std::vector<ProcessId> first, second;

  // A registry whose FIRST committee has more than W members and whose SECOND
  // committee is non-empty and not everyone.
  WhpSetup() {
    t = membership_threshold(p.lambda, p.n);
    for (seed = 1;; ++seed) {
      reg = setup_registry(p.n, seed);
      first = util::committee(*reg, encode_input(strings::kFirst, kKey), t);
      second = util::committee(*reg, encode_input(strings::kSecond, kKey), t);
      if (first.size() > p.W && second.size() >= p.W && second.size() < p.n) return;
    }
  }
  Message first_msg(ProcessId i) const {
    const KeyHandle k = reg->key_handle(i);
    return Message{WhpFirstMsg{kKey, k.vrf_eval(encode_input(strings::kCoin, kKey)),
                               k.sample(encode_input(strings::kFirst, kKey), t).proof}};
  }
  Message second_msg(ProcessId sender, ProcessId owner) const {
    const KeyHandle o = reg->key_handle(owner);
    Candidate c{owner, o.vrf_eval(encode_input(strings::kCoin, kKey)),
                o.sample(encode_input(strings::kFirst, kKey), t).proof};
    return Message{WhpSecondMsg{kKey, c, reg->key_handle(sender).sample(encode_input(strings::kSecond, kKey), t).proof}};
  }
  ProcessId outside_second() const {
    for (ProcessId i = 0; i < p.n; ++i)
      if (!std::binary_search(second.begin(), second.end(), i)) return i;
    return 0;
  }
  ProcessId outside_first() const {
    for (ProcessId i = 0; i < p.n; ++i)
      if (!std::binary_search(first.begin(), first.end(), i)) return i;
    return 0;
  }
};

}  // namespace

TEST(WhpCoin, StartMembership) {
  const WhpSetup s;
  std::vector<Message> out;
  WhpCoin member(*s.reg, s.reg->key_handle(s.first[0]), s.p, kKey);
  member.start(out);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].type(), MsgType::WhpFirst);
  EXPECT_EQ(word_cost(out[0]), 3u);
  EXPECT_TRUE(member.in_first());
  EXPECT_THROW(member.start(out), std::logic_error);

  out.clear();
  WhpCoin listener(*s.reg, s.reg->key_handle(s.outside_first()), s.p, kKey);
  listener.start(out);
  EXPECT_TRUE(out.empty());
  EXPECT_FALSE(listener.current().has_value());  // infinity sentinel
}

TEST(WhpCoin, NonSecondMemberIgnoresFirst) {
  const WhpSetup s;
  WhpCoin coin(*s.reg, s.reg->key_handle(s.outside_second()), s.p, kKey);
  std::vector<Message> out;
  coin.start(out);
  out.clear();
  for (ProcessId i : s.first) coin.on_first({i, s.first_msg(i)}, out);
  EXPECT_EQ(coin.first_set().size(), 0u);
  EXPECT_TRUE(out.empty());
}

TEST(WhpCoin, SecondMemberBroadcastsOnceAtW) {
  const WhpSetup s;
  WhpCoin coin(*s.reg, s.reg->key_handle(s.second[0]), s.p, kKey);
  std::vector<Message> out;
  coin.start(out);
  out.clear();
  for (std::size_t k = 0; k < s.first.size(); ++k) {
    coin.on_first({s.first[k], s.first_msg(s.first[k])}, out);
    EXPECT_EQ(out.size(), k + 1 >= s.p.W ? 1u : 0u) << k;
  }
  ASSERT_EQ(out[0].type(), MsgType::WhpSecond);
  EXPECT_EQ(word_cost(out[0]), 4u);
  const std::vector<ProcessId> row(s.first.begin(), s.first.begin() + s.p.W);
  EXPECT_EQ(std::get<WhpSecondMsg>(out[0].body).cand.owner, global_min(*s.reg, row).owner);
}

TEST(WhpCoin, RejectsNonMembersAndForgedProofs) {
  const WhpSetup s;
  WhpCoin coin(*s.reg, s.reg->key_handle(s.second[0]), s.p, kKey);
  std::vector<Message> out;
  coin.start(out);
  const ProcessId outsider = s.outside_first();
  // An outsider presenting its own (non-member) proof.
  coin.on_first({outsider, s.first_msg(outsider)}, out);
  // An outsider replaying a member's message.
  coin.on_first({outsider, s.first_msg(s.first[0])}, out);
  Message tampered = s.first_msg(s.first[1]);
  std::get<WhpFirstMsg>(tampered.body).sample.proof ^= 1;
  coin.on_first({s.first[1], tampered}, out);
  EXPECT_EQ(coin.first_set().size(), 0u);
  EXPECT_EQ(coin.audit().invalid, 3u);

  // SECOND from a non-member of the SECOND committee.
  EXPECT_FALSE(coin.on_second({s.outside_second(), s.second_msg(s.outside_second(), s.first[0])}).has_value());
  EXPECT_EQ(coin.second_set().size(), 0u);
  // SECOND whose candidate owner is outside the FIRST committee.
  EXPECT_FALSE(coin.on_second({s.second[0], s.second_msg(s.second[0], outsider)}).has_value());
  EXPECT_EQ(coin.second_set().size(), 0u);
}

TEST(WhpCoin, OutputAfterWSeconds) {
  const WhpSetup s;
  WhpCoin coin(*s.reg, s.reg->key_handle(s.outside_second()), s.p, kKey);
  std::vector<Message> out;
  coin.start(out);
  std::optional<CoinOutcome> res;
  for (std::uint32_t k = 0; k < s.p.W; ++k) {
    ASSERT_FALSE(res.has_value());
    res = coin.on_second({s.second[k], s.second_msg(s.second[k], s.first[k % s.first.size()])});
  }
  ASSERT_TRUE(res.has_value());
  std::vector<ProcessId> owners;
  for (std::uint32_t k = 0; k < s.p.W; ++k) owners.push_back(s.first[k % s.first.size()]);
  EXPECT_EQ(static_cast<int>(*res), int(global_min(*s.reg, owners).vrf.value & 1));
  EXPECT_EQ(coin.phase(), CoinPhase::Done);
}

namespace {

// Delivers everything the given process sent first, then FIFO.
class PriorityAdversary final : public Adversary {
 public:
  explicit PriorityAdversary(ProcessId first) : first_(first) {}
  std::string name() const override { return "fifo"; }
  Action next_action(const AdversaryView& v) override {
    EnvelopeId best = UINT32_MAX;
    for (EnvelopeId id : v.in_flight()) {
      if (v.sender(id) == first_) return Action::deliver(id);
      best = std::min(best, id);
    }
    return Action::deliver(best);
  }

 private:
  ProcessId first_;
};

}  // namespace

TEST(WhpCoin, BenignDeliveryMatchesCommitteeMinimum) {
  const Parameters p = derive_params(120, 0.2, 0.05);
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Registry reg = setup_registry(p.n, seed);
    const auto t = membership_threshold(p.lambda, p.n);
    const auto first = util::committee(reg, encode_input(strings::kFirst, kKey), t);
    if (first.empty()) continue;
    const Candidate want = global_min(reg, first);
    PriorityAdversary adv(want.owner);
    const TrialReport r = run_trial(util::trial(Protocol::WhpCoin, p, "fifo"), seed, nullptr, &adv);
    const auto& s3 = r.s_all.s3;
    if (!s3) continue;  // without W correct members on a committee nobody returns
    ++checked;
    ASSERT_TRUE(r.all_returned) << seed;
    ASSERT_TRUE(r.unanimous_bit.has_value());
    EXPECT_EQ(*r.unanimous_bit, int(want.vrf.value & 1)) << seed;
  }
  EXPECT_GT(checked, 10);
}

// With lambda = n every sample succeeds and W = n - f, so the committee coin
// must reproduce the shared coin exactly on the same seed and schedule.
TEST(WhpCoin, DegenerateModeMatchesSharedCoin) {
  for (const Parameters& p : {full(16), derive_params(40, 0.2, 0.05, true)}) {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const TrialReport a = run_trial(util::trial(Protocol::SharedCoin, p), seed);
      const TrialReport b = run_trial(util::trial(Protocol::WhpCoin, p), seed);
      ASSERT_EQ(a.processes.size(), b.processes.size());
      for (std::size_t i = 0; i < a.processes.size(); ++i)
        EXPECT_EQ(a.processes[i].output, b.processes[i].output) << "seed " << seed << " process " << i;
    }
  }
}

TEST(WhpCoin, StartInDegenerateModeMatchesSharedCoin) {
  const Parameters p = full(8);
  const Registry reg = setup_registry(8, 4);
  for (ProcessId i = 0; i < 8; ++i) {
    std::vector<Message> a, b;
    SharedCoin sc(reg, reg.key_handle(i), p, kKey);
    WhpCoin wc(reg, reg.key_handle(i), p, kKey);
    sc.start(a);
    wc.start(b);
    ASSERT_EQ(b.size(), 1u);
    EXPECT_EQ(std::get<CoinFirstMsg>(a[0].body).vrf, std::get<WhpFirstMsg>(b[0].body).vrf);
    EXPECT_TRUE(wc.in_first());
    EXPECT_TRUE(wc.in_second());
  }
}
