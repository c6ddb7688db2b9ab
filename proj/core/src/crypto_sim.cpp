#include "sqba/crypto_sim.hpp"

#include <sodium.h>

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace sqba {

namespace {

constexpr std::string_view kSamplePrefix = "sample";
constexpr std::size_t kStackInput = 96;

struct SodiumInit {
  SodiumInit() {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
  }
};

void ensure_sodium() { static SodiumInit once; }

std::uint64_t siphash(const Token& key, const std::uint8_t* data, std::size_t len) {
  std::uint8_t out[crypto_shorthash_BYTES];
  crypto_shorthash(out, data, len, key.data());
  std::uint64_t v;
  std::memcpy(&v, out, sizeof v);
  return v;
}

Token derive_token(std::string_view label, const std::uint8_t* data, std::size_t len) {
  Token t{};
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, t.size());
  crypto_generichash_update(&st, reinterpret_cast<const unsigned char*>(label.data()), label.size());
  crypto_generichash_update(&st, data, len);
  crypto_generichash_final(&st, t.data(), t.size());
  return t;
}

void put_be64(Bytes& out, std::uint64_t x) {
  for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(x >> s));
}

// Hash of prefix || input without heap allocation for short inputs.
std::uint64_t siphash_prefixed(const Token& key, std::string_view prefix, ByteView input) {
  const std::size_t len = prefix.size() + input.size();
  if (len <= kStackInput) {
    std::uint8_t buf[kStackInput];
    std::memcpy(buf, prefix.data(), prefix.size());
    if (!input.empty()) std::memcpy(buf + prefix.size(), input.data(), input.size());
    return siphash(key, buf, len);
  }
  Bytes buf(prefix.begin(), prefix.end());
  buf.insert(buf.end(), input.begin(), input.end());
  return siphash(key, buf.data(), buf.size());
}

std::uint64_t proof_of(const KeyPair& kp, std::string_view prefix, ByteView input, std::uint64_t value) {
  const std::size_t len = prefix.size() + input.size() + 8;
  Bytes heap;
  std::uint8_t stack[kStackInput + 8];
  std::uint8_t* buf = stack;
  if (len > sizeof stack) {
    heap.resize(len);
    buf = heap.data();
  }
  std::memcpy(buf, prefix.data(), prefix.size());
  if (!input.empty()) std::memcpy(buf + prefix.size(), input.data(), input.size());
  std::memcpy(buf + prefix.size() + input.size(), &value, 8);
  return siphash(kp.proof_key, buf, len);
}

VrfOutput eval_prefixed(const KeyPair& kp, std::string_view prefix, ByteView input) {
  VrfOutput out;
  out.value = siphash_prefixed(kp.vrf_key, prefix, input);
  out.proof = proof_of(kp, prefix, input, out.value);
  return out;
}

const Token kPublicKey = [] {
  Token t{};
  const char label[] = "sqba public hash";
  std::memcpy(t.data(), label, t.size());
  return t;
}();

}  // namespace

Bytes encode_input(std::string_view tag, std::uint64_t instance, std::uint64_t round, std::optional<Value> value) {
  if (tag.size() > 255) throw std::invalid_argument("encode_input: tag longer than 255 bytes");
  Bytes out;
  out.reserve(1 + tag.size() + 17);
  out.push_back(static_cast<std::uint8_t>(tag.size()));
  out.insert(out.end(), tag.begin(), tag.end());
  put_be64(out, instance);
  put_be64(out, round);
  if (value) out.push_back(static_cast<std::uint8_t>(*value));
  return out;
}

Bytes encode_input(std::string_view tag, InstanceKey key, std::optional<Value> value) {
  return encode_input(tag, key.instance, key.round, value);
}

MembershipThreshold membership_threshold(double lambda, std::uint32_t n) {
  if (!(lambda > 0.0) || lambda > static_cast<double>(n)) throw std::invalid_argument("sample: lambda outside (0, n]");
  MembershipThreshold t;
  const long double scaled = std::ldexp(static_cast<long double>(lambda) / n, 64);
  if (scaled >= std::ldexp(1.0L, 64)) {
    t.everyone = true;
  } else {
    t.bound = static_cast<std::uint64_t>(std::ceil(scaled));
  }
  return t;
}

VrfOutput KeyHandle::vrf_eval(ByteView input) const { return eval_prefixed(*kp_, {}, input); }

SampleProof KeyHandle::sample(ByteView s, double lambda) const { return sample(s, membership_threshold(lambda, n_)); }

SampleProof KeyHandle::sample(ByteView s, const MembershipThreshold& t) const {
  SampleProof sp;
  sp.proof = eval_prefixed(*kp_, kSamplePrefix, s);
  sp.member = t.admits(sp.proof.value);
  return sp;
}

Signature KeyHandle::sign(ByteView payload) const {
  return {kp_->process_id, siphash(kp_->sig_key, payload.data(), payload.size())};
}

Registry Registry::setup(std::uint32_t n, std::uint64_t trial_seed) {
  if (n < 1) throw std::invalid_argument("setup_registry: n >= 1 violated");
  ensure_sodium();
  Registry reg;
  reg.keys_.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    std::uint8_t material[12];
    std::memcpy(material, &trial_seed, 8);
    std::memcpy(material + 8, &i, 4);
    KeyPair& kp = reg.keys_[i];
    kp.process_id = i;
    kp.secret_seed = derive_token("secret", material, sizeof material);
    kp.public_id = derive_token("public", kp.secret_seed.data(), kp.secret_seed.size());
    kp.vrf_key = derive_token("vrf", kp.secret_seed.data(), kp.secret_seed.size());
    kp.proof_key = derive_token("proof", kp.secret_seed.data(), kp.secret_seed.size());
    kp.sig_key = derive_token("sig", kp.secret_seed.data(), kp.secret_seed.size());
  }
  return reg;
}

const Token& Registry::public_id(ProcessId i) const { return keys_.at(i).public_id; }

KeyHandle Registry::key_handle(ProcessId i) const {
  if (i >= keys_.size()) throw std::out_of_range("unknown process id " + std::to_string(i));
  return KeyHandle(&keys_[i], size());
}

bool Registry::vrf_verify(ProcessId i, ByteView input, const VrfOutput& out) const {
  if (i >= keys_.size()) return false;
  return eval_prefixed(keys_[i], {}, input) == out;
}

bool Registry::committee_val(ByteView s, double lambda, ProcessId i, const VrfOutput& proof) const {
  return committee_val(s, membership_threshold(lambda, size()), i, proof);
}

bool Registry::committee_val(ByteView s, const MembershipThreshold& t, ProcessId i, const VrfOutput& proof) const {
  if (i >= keys_.size()) return false;
  if (!(eval_prefixed(keys_[i], kSamplePrefix, s) == proof)) return false;
  return t.admits(proof.value);
}

bool Registry::verify_sig(const Signature& sig, ByteView payload) const {
  if (sig.signer >= keys_.size()) return false;
  return siphash(keys_[sig.signer].sig_key, payload.data(), payload.size()) == sig.digest;
}

Registry setup_registry(std::uint32_t n, std::uint64_t trial_seed) { return Registry::setup(n, trial_seed); }
VrfOutput vrf_eval(const Registry& reg, ProcessId i, ByteView input) { return reg.key_handle(i).vrf_eval(input); }
bool vrf_verify(const Registry& reg, ProcessId i, ByteView input, const VrfOutput& out) {
  return reg.vrf_verify(i, input, out);
}
SampleProof sample(const Registry& reg, ProcessId i, ByteView s, double lambda) {
  return reg.key_handle(i).sample(s, lambda);
}
bool committee_val(const Registry& reg, ByteView s, double lambda, ProcessId i, const VrfOutput& proof) {
  return reg.committee_val(s, lambda, i, proof);
}
Signature sign(const Registry& reg, ProcessId i, ByteView payload) { return reg.key_handle(i).sign(payload); }
bool verify_sig(const Registry& reg, const Signature& sig, ByteView payload) { return reg.verify_sig(sig, payload); }

std::uint64_t public_hash(ByteView data) {
  ensure_sodium();
  return siphash(kPublicKey, data.data(), data.size());
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint8_t buf[16];
  std::memcpy(buf, &a, 8);
  std::memcpy(buf + 8, &b, 8);
  return public_hash(ByteView(buf, 16));
}

}  // namespace sqba
