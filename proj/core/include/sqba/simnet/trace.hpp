#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sqba/simnet/network.hpp"

namespace sqba::simnet {

// Line format:
//   # sqba-trace v1 <config json>
//   event <index> deliver <msg_id> <sender>-><receiver> <TAG> <words> <clock digest hex>
//   event <index> corrupt - <pid> - - -
//   # start
//   # report <hash hex>
class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& os) : os_(&os) {}
  void header(const std::string& config_json);
  void start();
  void deliver(std::uint64_t index, EnvelopeId id, ProcessId s, ProcessId r, MsgType tag, std::uint32_t words,
               std::uint64_t digest);
  void corrupt(std::uint64_t index, ProcessId p);
  void footer(std::uint64_t report_hash);

 private:
  std::ostream* os_;
};

struct TraceEvent {
  std::uint64_t index = 0;
  Action action;
  bool before_start = false;
  // Informational fields, checked on replay.
  ProcessId sender = 0;
  ProcessId receiver = 0;
  std::string tag;
  std::uint32_t words = 0;
  std::uint64_t digest = 0;
};

struct Trace {
  std::string config_json;
  std::vector<TraceEvent> events;
  std::optional<std::uint64_t> report_hash;
};

// Throws std::runtime_error on malformed input.
Trace read_trace(std::istream& is);

// Replays a recorded schedule. Byzantine behaviour (shadow execution and
// rewriting) is delegated to the adversary that produced the trace.
class ScriptedAdversary final : public Adversary {
 public:
  ScriptedAdversary(const Trace& trace, std::unique_ptr<Adversary> behaviour);
  std::string name() const override { return behaviour_->name(); }
  std::vector<ProcessId> initial_corruptions(const AdversaryView& view) override;
  Action next_action(const AdversaryView& view) override;
  bool runs_shadow() const override { return behaviour_->runs_shadow(); }
  void rewrite(ProcessId p, const Message& m, const AdversaryView& view, std::vector<ByzantineSend>& out) override {
    behaviour_->rewrite(p, m, view, out);
  }
  // Actions the scripted run could not match against the recorded metadata.
  std::uint32_t mismatches() const { return mismatches_; }
  bool exhausted() const { return next_ >= trace_->events.size(); }

 private:
  const Trace* trace_;
  std::unique_ptr<Adversary> behaviour_;
  std::size_t next_ = 0;
  std::uint32_t mismatches_ = 0;
};

}  // namespace sqba::simnet
