#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "sqba/approver.hpp"
#include "sqba/crypto_sim.hpp"
#include "sqba/messages.hpp"
#include "sqba/params.hpp"

namespace sqba::simnet {

using EnvelopeId = std::uint32_t;

enum class EnvelopeStatus : std::uint8_t { InFlight, Delivered, Dropped };

// Per-process protocol state machine as seen by the network.
class Node {
 public:
  virtual ~Node() = default;
  virtual void start(std::vector<Message>& out) = 0;
  virtual void deliver(const Inbound& in, std::vector<Message>& out) = 0;
  // Produced its output (coin bit, approver set, decision).
  virtual bool finished() const = 0;
  virtual bool halted() const { return false; }
  virtual const Approver* approver_for(const InstanceKey&) const { return nullptr; }
};

struct Action {
  enum class Kind : std::uint8_t { Deliver, Corrupt };
  Kind kind = Kind::Deliver;
  std::uint32_t target = 0;
  static Action deliver(EnvelopeId id) { return {Kind::Deliver, id}; }
  static Action corrupt(ProcessId p) { return {Kind::Corrupt, p}; }
};

struct ByzantineSend {
  Message msg;
  std::vector<ProcessId> receivers;
};

struct EnvelopeMeta {
  EnvelopeId id;
  ProcessId sender;
  ProcessId receiver;
  MsgType tag;
  std::uint32_t words;
  EnvelopeStatus status;
};

class Network;
class AdversaryView;

// Delayed-adaptive adversary: schedules every envelope and corrupts up to f
// processes. Corrupted processes either go silent or, when runs_shadow() is
// true, keep running the honest state machine with every outgoing message
// passed through rewrite().
class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual std::string name() const = 0;
  virtual std::vector<ProcessId> initial_corruptions(const AdversaryView&) { return {}; }
  virtual Action next_action(const AdversaryView& view) = 0;
  virtual bool runs_shadow() const { return false; }
  virtual void rewrite(ProcessId p, const Message& m, const AdversaryView& view, std::vector<ByzantineSend>& out);
  virtual bool needs_causality() const { return false; }
};

struct SendRecord {
  ProcessId sender = 0;
  bool byzantine = false;
  MsgType tag = MsgType::CoinFirst;
  std::uint32_t words = 0;
  std::uint32_t depth = 0;
  std::uint32_t seq = 0;           // sender's send-event count including this one
  std::uint32_t clock = UINT32_MAX;  // snapshot offset in the clock arena
  mutable Verdict verdict = Verdict::Unknown;
  mutable std::uint64_t digest = 0;
  mutable bool has_digest = false;
  Message msg;
};

// Every send owns n consecutive envelope ids, one per receiver:
// id = send * n + receiver. Receivers a Byzantine send skipped are Dropped.
struct Envelope {
  std::uint32_t send = 0;
  ProcessId receiver = 0;
  std::uint32_t recv_seq = 0;  // receiver's send count when delivered (causality only)
  EnvelopeStatus status = EnvelopeStatus::InFlight;
};

struct NetworkConfig {
  Parameters params;
  std::uint64_t event_budget = 0;
  bool track_causality = false;
  // End the run once every correct process has finished (agreement);
  // otherwise run to quiescence.
  bool stop_when_all_finished = false;
};

class TraceWriter;

struct ProcessRecord {
  bool corrupted = false;
  bool finished = false;
  std::uint64_t finish_event = 0;
  std::uint32_t finish_depth = 0;
  std::uint32_t depth = 0;
};

struct NetworkResult {
  std::uint64_t events = 0;
  std::uint64_t deliveries = 0;
  std::uint64_t words_sent = 0;
  std::uint64_t messages_sent = 0;
  std::uint64_t byzantine_messages = 0;
  std::uint32_t duration = 0;
  bool all_finished = false;
  bool budget_exhausted = false;
  bool quiescent = false;
  bool adversary_error = false;
  std::string adversary_error_message;
  std::uint32_t replaceability_violations = 0;
  std::vector<ProcessId> corrupted;
};

class Network {
 public:
  Network(NetworkConfig cfg, const Registry& reg, std::vector<std::unique_ptr<Node>> nodes, Adversary& adv,
          TraceWriter* trace = nullptr);
  ~Network();
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  NetworkResult run();

  std::uint32_t n() const { return cfg_.params.n; }
  const NetworkConfig& config() const { return cfg_; }
  const Registry& registry() const { return *reg_; }
  const Node& node(ProcessId p) const { return *nodes_[p]; }
  const ProcessRecord& process(ProcessId p) const { return procs_[p]; }
  std::uint32_t corrupted_count() const { return corrupted_count_; }

  std::size_t envelope_count() const { return status_.size(); }
  Envelope envelope(EnvelopeId id) const {
    return {id / n(), id % n(), recv_seq_.empty() ? 0 : recv_seq_[id], status_[id]};
  }
  EnvelopeStatus status(EnvelopeId id) const { return status_[id]; }
  ProcessId receiver(EnvelopeId id) const { return id % n(); }
  const SendRecord& send_of(EnvelopeId id) const { return sends_[id / n()]; }
  std::span<const EnvelopeId> in_flight() const { return in_flight_; }
  std::uint64_t events() const { return events_; }
  std::optional<EnvelopeId> last_delivered() const { return last_delivered_; }

  // Causality (available when track_causality is set).
  bool tracks_causality() const { return cfg_.track_causality; }
  std::span<const std::uint32_t> send_clock(EnvelopeId id) const;
  // Receiver's clock with every delivery so far merged in.
  std::vector<std::uint32_t> clock_of(ProcessId p) const;
  // deliver(m) happens before send(target).
  bool happens_before(EnvelopeId m, EnvelopeId target) const;
  std::uint64_t clock_digest(EnvelopeId id) const;

  // Adversary-side corruption and delivery; throw AdversaryBug when illegal.
  void corrupt(ProcessId p);
  void deliver(EnvelopeId id);

 private:
  struct Slot {
    std::uint32_t seq = 0;
    std::vector<std::uint32_t> pending;  // unmerged snapshot offsets
    std::vector<std::uint32_t> clock;
  };

  void start_all();
  void emit(ProcessId p, std::vector<Message>& out);
  void emit_byzantine(ProcessId p, std::vector<ByzantineSend>& sends);
  std::uint32_t snapshot(ProcessId p, std::uint32_t seq_after);
  void flush(ProcessId p);
  void open_block(EnvelopeStatus initial);
  void note_finish(ProcessId p);
  void check_replaceability(ProcessId p, const Message& m);
  bool all_correct_finished() const { return finished_correct_ == n() - corrupted_count_; }
  void trace_deliver(EnvelopeId id);
  void trace_corrupt(ProcessId p);

  NetworkConfig cfg_;
  const Registry* reg_;
  std::vector<std::unique_ptr<Node>> nodes_;
  Adversary* adv_;
  TraceWriter* trace_;

  std::deque<SendRecord> sends_;
  std::vector<EnvelopeStatus> status_;
  std::vector<std::uint32_t> recv_seq_;
  std::vector<EnvelopeId> in_flight_;
  std::vector<std::uint32_t> pos_;
  std::vector<ProcessRecord> procs_;
  std::vector<Slot> slots_;
  std::vector<std::uint32_t> arena_;
  std::unordered_set<std::uint64_t> roles_;
  std::vector<Message> out_;
  std::vector<ByzantineSend> byz_out_;

  std::uint32_t corrupted_count_ = 0;
  std::uint32_t finished_correct_ = 0;
  std::uint64_t events_ = 0;
  std::uint32_t max_depth_ = 0;
  std::optional<EnvelopeId> last_delivered_;
  NetworkResult result_;
};

class AdversaryBug : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// What an adversary may look at. Payloads of correct in-flight envelopes are
// never reachable: payload() requires the envelope to be delivered or its
// sender corrupted, and payload_for() additionally restricts delivered correct
// payloads to the causal past of the envelope being scheduled.
class AdversaryView {
 public:
  explicit AdversaryView(const Network& net) : net_(&net) {}

  std::uint32_t n() const { return net_->n(); }
  const Parameters& params() const { return net_->config().params; }
  std::uint32_t corruption_budget() const { return params().f - net_->corrupted_count(); }
  std::uint32_t corrupted_count() const { return net_->corrupted_count(); }
  bool is_corrupted(ProcessId p) const { return net_->process(p).corrupted; }
  std::uint64_t events() const { return net_->events(); }

  std::span<const EnvelopeId> in_flight() const { return net_->in_flight(); }
  std::size_t envelope_count() const { return net_->envelope_count(); }
  EnvelopeStatus status(EnvelopeId id) const { return net_->status(id); }
  ProcessId sender(EnvelopeId id) const { return net_->send_of(id).sender; }
  ProcessId receiver(EnvelopeId id) const { return net_->receiver(id); }
  MsgType tag(EnvelopeId id) const { return net_->send_of(id).tag; }
  EnvelopeMeta meta(EnvelopeId id) const;
  std::optional<EnvelopeId> last_delivered() const { return net_->last_delivered(); }

  const Message* payload(EnvelopeId id) const;
  const Message* payload_for(EnvelopeId m, EnvelopeId target) const;
  bool happens_before(EnvelopeId m, EnvelopeId target) const { return net_->happens_before(m, target); }

  std::optional<KeyHandle> keys(ProcessId p) const;
  const Node* corrupted_state(ProcessId p) const;

 private:
  const Network* net_;
};

}  // namespace sqba::simnet
