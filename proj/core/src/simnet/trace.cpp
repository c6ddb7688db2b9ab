#include "sqba/simnet/trace.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sqba::simnet {

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

void TraceWriter::header(const std::string& config_json) { *os_ << "# sqba-trace v1 " << config_json << '\n'; }

void TraceWriter::start() { *os_ << "# start\n"; }

void TraceWriter::deliver(std::uint64_t index, EnvelopeId id, ProcessId s, ProcessId r, MsgType tag,
                          std::uint32_t words, std::uint64_t digest) {
  *os_ << "event " << index << " deliver " << id << ' ' << s << "->" << r << ' ' << tag_name(tag) << ' ' << words
       << ' ' << hex64(digest) << '\n';
}

void TraceWriter::corrupt(std::uint64_t index, ProcessId p) {
  *os_ << "event " << index << " corrupt - " << p << " - - -\n";
}

void TraceWriter::footer(std::uint64_t report_hash) { *os_ << "# report " << hex64(report_hash) << '\n'; }

Trace read_trace(std::istream& is) {
  Trace t;
  std::string line;
  bool started = false;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& why) {
    throw std::runtime_error("trace line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.rfind("# sqba-trace v1 ", 0) == 0) {
      t.config_json = line.substr(16);
      continue;
    }
    if (line == "# start") {
      started = true;
      continue;
    }
    if (line.rfind("# report ", 0) == 0) {
      t.report_hash = std::stoull(line.substr(9), nullptr, 16);
      continue;
    }
    if (line[0] == '#') continue;

    std::istringstream ls(line);
    std::string word, action, id, route, tag, words, digest;
    TraceEvent e;
    if (!(ls >> word >> e.index >> action >> id >> route >> tag >> words >> digest) || word != "event")
      fail("malformed event");
    e.before_start = !started;
    if (action == "deliver") {
      e.action = Action::deliver(static_cast<EnvelopeId>(std::stoul(id)));
      const auto arrow = route.find("->");
      if (arrow == std::string::npos) fail("bad route");
      e.sender = static_cast<ProcessId>(std::stoul(route.substr(0, arrow)));
      e.receiver = static_cast<ProcessId>(std::stoul(route.substr(arrow + 2)));
      e.tag = tag;
      e.words = static_cast<std::uint32_t>(std::stoul(words));
      e.digest = std::stoull(digest, nullptr, 16);
    } else if (action == "corrupt") {
      e.action = Action::corrupt(static_cast<ProcessId>(std::stoul(route)));
    } else {
      fail("unknown action " + action);
    }
    t.events.push_back(std::move(e));
  }
  if (t.config_json.empty()) throw std::runtime_error("trace has no header");
  return t;
}

ScriptedAdversary::ScriptedAdversary(const Trace& trace, std::unique_ptr<Adversary> behaviour)
    : trace_(&trace), behaviour_(std::move(behaviour)) {}

std::vector<ProcessId> ScriptedAdversary::initial_corruptions(const AdversaryView& view) {
  // The behaviour adversary may set itself up here (e.g. receiver halves).
  (void)behaviour_->initial_corruptions(view);
  std::vector<ProcessId> out;
  while (next_ < trace_->events.size() && trace_->events[next_].before_start)
    out.push_back(trace_->events[next_++].action.target);
  return out;
}

Action ScriptedAdversary::next_action(const AdversaryView& view) {
  if (next_ >= trace_->events.size()) throw AdversaryBug("replay: trace exhausted before the run ended");
  const TraceEvent& e = trace_->events[next_++];
  if (e.action.kind == Action::Kind::Deliver && e.action.target < view.envelope_count()) {
    const auto m = view.meta(e.action.target);
    if (m.sender != e.sender || m.receiver != e.receiver || tag_name(m.tag) != e.tag || m.words != e.words)
      ++mismatches_;
  }
  return e.action;
}

}  // namespace sqba::simnet
