#pragma once

#include <optional>
#include <vector>

#include "sqba/crypto_sim.hpp"
#include "sqba/messages.hpp"
#include "sqba/params.hpp"
#include "sqba/simnet/trial.hpp"

namespace sqba::util {

inline Parameters full(std::uint32_t n, double eps = 1.0 / 3.0) { return derive_params(n, eps, 0.05, true); }

// Members of a committee string at the given threshold.
inline std::vector<ProcessId> committee(const Registry& reg, const Bytes& s, const MembershipThreshold& t) {
  std::vector<ProcessId> out;
  for (ProcessId i = 0; i < reg.size(); ++i)
    if (reg.key_handle(i).sample(s, t).member) out.push_back(i);
  return out;
}

inline std::optional<ProcessId> first_outside(const Registry& reg, const Bytes& s, const MembershipThreshold& t) {
  for (ProcessId i = 0; i < reg.size(); ++i)
    if (!reg.key_handle(i).sample(s, t).member) return i;
  return std::nullopt;
}

inline simnet::TrialConfig trial(simnet::Protocol proto, const Parameters& p, std::string adversary = "uniform_random") {
  simnet::TrialConfig c;
  c.protocol = proto;
  c.params = p;
  c.adversary = std::move(adversary);
  return c;
}

}  // namespace sqba::util
