#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sqba/types.hpp"

namespace sqba {

using ByteView = std::span<const std::uint8_t>;
using Token = std::array<std::uint8_t, 16>;

struct VrfOutput {
  std::uint64_t value = 0;
  std::uint64_t proof = 0;
  friend constexpr bool operator==(const VrfOutput&, const VrfOutput&) = default;
};

struct SampleProof {
  bool member = false;
  VrfOutput proof;
};

struct Signature {
  ProcessId signer = 0;
  std::uint64_t digest = 0;
  friend constexpr bool operator==(const Signature&, const Signature&) = default;
};

struct KeyPair {
  ProcessId process_id = 0;
  Token secret_seed{};
  Token public_id{};
  // Per-purpose keys expanded from secret_seed at setup.
  Token vrf_key{};
  Token proof_key{};
  Token sig_key{};
};

// Sampling and coin inputs: 1-byte length-prefixed tag, 8-byte big-endian
// instance, 8-byte big-endian round, optional value byte.
Bytes encode_input(std::string_view tag, std::uint64_t instance, std::uint64_t round,
                   std::optional<Value> value = std::nullopt);
Bytes encode_input(std::string_view tag, InstanceKey key, std::optional<Value> value = std::nullopt);

// Membership threshold on the raw 64-bit VRF value for probability lambda/n.
struct MembershipThreshold {
  bool everyone = false;
  std::uint64_t bound = 0;  // member iff value < bound
  bool admits(std::uint64_t value) const { return everyone || value < bound; }
};
MembershipThreshold membership_threshold(double lambda, std::uint32_t n);

class Registry;

// Capability over one process's secret. Handed to the owning process and,
// after corruption, to the adversary.
class KeyHandle {
 public:
  ProcessId id() const { return kp_->process_id; }
  const Token& secret_seed() const { return kp_->secret_seed; }
  VrfOutput vrf_eval(ByteView input) const;
  // vrf_eval over "sample" || s, thresholded at lambda/n.
  SampleProof sample(ByteView s, double lambda) const;
  SampleProof sample(ByteView s, const MembershipThreshold& t) const;
  Signature sign(ByteView payload) const;

 private:
  friend class Registry;
  KeyHandle(const KeyPair* kp, std::uint32_t n) : kp_(kp), n_(n) {}
  const KeyPair* kp_;
  std::uint32_t n_;
};

class Registry {
 public:
  static Registry setup(std::uint32_t n, std::uint64_t trial_seed);

  std::uint32_t size() const { return static_cast<std::uint32_t>(keys_.size()); }
  const Token& public_id(ProcessId i) const;

  // Privileged: only the simulator and tests call this.
  KeyHandle key_handle(ProcessId i) const;

  bool vrf_verify(ProcessId i, ByteView input, const VrfOutput& out) const;
  bool committee_val(ByteView s, double lambda, ProcessId i, const VrfOutput& proof) const;
  bool committee_val(ByteView s, const MembershipThreshold& t, ProcessId i, const VrfOutput& proof) const;
  bool verify_sig(const Signature& sig, ByteView payload) const;

 private:
  std::vector<KeyPair> keys_;
};

Registry setup_registry(std::uint32_t n, std::uint64_t trial_seed);
VrfOutput vrf_eval(const Registry& reg, ProcessId i, ByteView input);
bool vrf_verify(const Registry& reg, ProcessId i, ByteView input, const VrfOutput& out);
SampleProof sample(const Registry& reg, ProcessId i, ByteView s, double lambda);
bool committee_val(const Registry& reg, ByteView s, double lambda, ProcessId i, const VrfOutput& proof);
Signature sign(const Registry& reg, ProcessId i, ByteView payload);
bool verify_sig(const Registry& reg, const Signature& sig, ByteView payload);

// Keyed 64-bit hash with a fixed public key; used for digests and derived seeds.
std::uint64_t public_hash(ByteView data);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace sqba
