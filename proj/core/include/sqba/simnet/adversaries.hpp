#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "sqba/simnet/network.hpp"

namespace sqba::simnet {

// Bounded draws from a 64-bit engine (multiply-shift, no modulo bias worth caring about here).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t next() { return eng_(); }
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(eng_()) * bound) >> 64);
  }
  // k distinct ids from [0, n), in draw order.
  std::vector<ProcessId> choose(std::uint32_t n, std::uint32_t k);

 private:
  std::mt19937_64 eng_;
};

class FifoAdversary final : public Adversary {
 public:
  std::string name() const override { return "fifo"; }
  Action next_action(const AdversaryView& view) override;

 private:
  EnvelopeId cursor_ = 0;
};

class UniformRandomAdversary : public Adversary {
 public:
  explicit UniformRandomAdversary(std::uint64_t seed) : rng_(seed) {}
  std::string name() const override { return "uniform_random"; }
  Action next_action(const AdversaryView& view) override;

 protected:
  Rng rng_;
};

// Holds back every envelope sent by or addressed to a victim until nothing
// else is in flight; FIFO otherwise.
class TargetedDelayAdversary final : public Adversary {
 public:
  TargetedDelayAdversary(std::uint64_t seed, std::vector<ProcessId> victims = {});
  std::string name() const override { return "targeted_delay"; }
  Action next_action(const AdversaryView& view) override;
  const std::vector<ProcessId>& victims() const { return victims_; }

 private:
  Rng rng_;
  std::vector<ProcessId> victims_;
  std::vector<bool> is_victim_;
  EnvelopeId cursor_ = 0;
  std::vector<EnvelopeId> held_;
  std::size_t held_pos_ = 0;
};

// f random processes crash at time zero; uniform random scheduling.
class CrashAdversary final : public UniformRandomAdversary {
 public:
  explicit CrashAdversary(std::uint64_t seed) : UniformRandomAdversary(seed) {}
  std::string name() const override { return "crash_f"; }
  std::vector<ProcessId> initial_corruptions(const AdversaryView& view) override;
};

// Corrupts the sender of any delivered FIRST whose VRF value is small enough
// to be a likely minimum, then starves that sender's remaining envelopes.
class MinValueSuppressor final : public Adversary {
 public:
  explicit MinValueSuppressor(std::uint64_t seed) : rng_(seed) {}
  std::string name() const override { return "min_value_suppressor"; }
  Action next_action(const AdversaryView& view) override;
  std::uint32_t corruptions() const { return corruptions_; }

 private:
  void ingest(const AdversaryView& view);
  std::uint64_t threshold(const AdversaryView& view, MsgType t) const;

  Rng rng_;
  EnvelopeId cursor_ = 0;
  std::vector<EnvelopeId> active_;
  std::vector<EnvelopeId> deferred_;
  std::vector<bool> suppressed_;
  std::optional<EnvelopeId> checked_;
  std::uint32_t corruptions_ = 0;
};

// f random processes corrupted at time zero that keep running the honest
// logic but split receivers into two halves: conflicting INITs, echoes for
// every value they are sampled for, OKs for any value they can prove, and
// coin messages to one half only.
class Equivocator final : public UniformRandomAdversary {
 public:
  explicit Equivocator(std::uint64_t seed) : UniformRandomAdversary(seed) {}
  std::string name() const override { return "equivocator"; }
  std::vector<ProcessId> initial_corruptions(const AdversaryView& view) override;
  bool runs_shadow() const override { return true; }
  void rewrite(ProcessId p, const Message& m, const AdversaryView& view, std::vector<ByzantineSend>& out) override;

 private:
  std::vector<ProcessId> half_[2];
};

std::vector<std::string_view> adversary_names();
// Throws std::invalid_argument for unknown names.
std::unique_ptr<Adversary> make_adversary(std::string_view name, std::uint64_t seed);

}  // namespace sqba::simnet
