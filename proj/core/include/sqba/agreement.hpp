#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sqba/approver.hpp"
#include "sqba/messages.hpp"
#include "sqba/params.hpp"
#include "sqba/whp_coin.hpp"

namespace sqba {

enum class Stage : std::uint8_t { A1 = 0, Coin = 1, A2 = 2 };

// Sub-instance ids: the stage lives in the low two bits of the instance field.
InstanceKey stage_key(std::uint64_t ba_instance, std::uint64_t round, Stage s);
std::uint64_t ba_instance_of(const InstanceKey& k);
Stage stage_of(const InstanceKey& k);

// What the round loop asks its caller to do next.
struct BaEffect {
  enum class Kind : std::uint8_t { InvokeApprove, InvokeCoin } kind;
  std::uint64_t round;
  Stage stage;
  Value value;  // approver input; unused for the coin
};

// What caused a coin invocation: the delivered message whose handling led to
// it (none for the start of the protocol).
struct CoinTrigger {
  std::uint64_t coin_round = 0;
  bool from_start = false;
  MsgType type = MsgType::Init;
  InstanceKey key;
};

struct BaEvent {
  enum class Kind : std::uint8_t { NonBinaryFirstApprove, SafetyViolation, CoinFault } kind;
  std::uint64_t round;
  ValueSet set;
};

// Agreement round logic without any messaging.
class AgreementCore {
 public:
  BaEffect start(int v);
  BaEffect on_first_approve(ValueSet vals);
  BaEffect on_coin(int c);
  BaEffect on_second_approve(ValueSet props);
  // The coin returned no value; the caller proceeds with c = 0.
  void note_coin_fault();

  std::optional<int> decision() const { return decision_; }
  std::optional<std::uint64_t> decision_round() const { return decision_round_; }
  std::uint64_t round() const { return round_; }
  int est() const { return est_; }
  Value propose() const { return propose_; }
  std::optional<int> coin() const { return coin_; }
  Stage stage() const { return stage_; }
  bool started() const { return started_; }
  const std::vector<BaEvent>& events() const { return events_; }
  // est at the start of each round entered so far.
  const std::vector<int>& est_history() const { return est_history_; }

 private:
  bool started_ = false;
  int est_ = 0;
  Value propose_ = Value::Bottom;
  std::optional<int> coin_;
  std::optional<int> decision_;
  std::optional<std::uint64_t> decision_round_;
  std::uint64_t round_ = 0;
  Stage stage_ = Stage::A1;
  std::vector<BaEvent> events_;
  std::vector<int> est_history_;
};

// One agreement process: owns the per-round approvers and coins,
// buffers messages for instances it has not invoked yet, and stops after it
// has decided and completed one more round.
class AgreementNode {
 public:
  AgreementNode(const Registry& reg, KeyHandle keys, const Parameters& p, std::uint64_t ba_instance);

  void start(int v, std::vector<Message>& out);
  // in.msg must outlive the node if it is buffered.
  void deliver(const Inbound& in, std::vector<Message>& out);

  const AgreementCore& core() const { return core_; }
  std::optional<int> decision() const { return core_.decision(); }
  bool halted() const { return halted_; }
  std::uint64_t rounds_entered() const { return core_.started() ? core_.round() + 1 : 0; }

  const Approver* approver(std::uint64_t round, Stage s) const;
  const WhpCoin* coin(std::uint64_t round) const;
  const Approver* approver_for(const InstanceKey& k) const;
  const std::vector<CoinTrigger>& coin_triggers() const { return coin_triggers_; }
  AuditCounters audit() const;

 private:
  struct Buffered {
    ProcessId sender;
    const Message* msg;
    Verdict* memo;
  };
  struct RoundSlot {
    std::unique_ptr<Approver> a1;
    std::unique_ptr<WhpCoin> coin;
    std::unique_ptr<Approver> a2;
    std::array<std::vector<Buffered>, 3> pending;
  };

  RoundSlot& slot(std::uint64_t r);
  void apply(const BaEffect& e, std::vector<Message>& out, const Message* trigger);
  void feed(std::uint64_t r, Stage s, const Inbound& in, std::vector<Message>& out);
  void advance(std::vector<Message>& out, const Message* trigger);

  const Registry* reg_;
  KeyHandle keys_;
  const Parameters* params_;
  std::uint64_t ba_instance_;
  AgreementCore core_;
  std::map<std::uint64_t, RoundSlot> rounds_;
  bool halted_ = false;
  std::vector<CoinTrigger> coin_triggers_;
  AuditCounters misrouted_;
};

}  // namespace sqba
