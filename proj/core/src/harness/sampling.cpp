#include "sqba/harness/sampling.hpp"

#include <algorithm>
#include <vector>

#include "sqba/crypto_sim.hpp"
#include "sqba/harness/stats.hpp"
#include "sqba/simnet/adversaries.hpp"

namespace sqba::harness {

namespace {

constexpr std::string_view kTag = "SAMPLE_AUDIT";

std::uint32_t overlap(const std::vector<ProcessId>& a, const std::vector<ProcessId>& b) {
  std::vector<ProcessId> x = a, y = b;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::uint32_t k = 0;
  for (std::size_t i = 0, j = 0; i < x.size() && j < y.size();) {
    if (x[i] == y[j]) ++k, ++i, ++j;
    else if (x[i] < y[j]) ++i;
    else ++j;
  }
  return k;
}

}  // namespace

bool SamplingReport::passed() const {
  return std::all_of(within_bound.begin(), within_bound.end(), [](bool b) { return b; }) &&
         s5_subset_failures == 0 && s6_subset_failures == 0;
}

SamplingReport verify_sampling_properties(const SamplingConfig& cfg) {
  const Parameters& p = cfg.params;
  SamplingReport rep;
  rep.committees = cfg.committees;
  // With everyone sampled the committee is the whole system; no tail to bound.
  if (!p.full_participation) {
    const auto bounds = sampling_failure_bounds(p);
    rep.analytic = {bounds.s1, bounds.s2, bounds.s3, bounds.s4};
  }

  const Registry reg = setup_registry(p.n, cfg.seed);
  simnet::Rng rng(mix_seed(cfg.seed, 0x706c6163656d6e74ULL));
  std::vector<bool> byz(p.n, false);
  if (cfg.randomized_placement) {
    for (ProcessId q : rng.choose(p.n, p.f)) byz[q] = true;
  } else {
    for (ProcessId q = 0; q < p.f; ++q) byz[q] = true;
  }
  std::vector<KeyHandle> keys;
  keys.reserve(p.n);
  for (ProcessId q = 0; q < p.n; ++q) keys.push_back(reg.key_handle(q));
  const auto thr = membership_threshold(p.lambda, p.n);

  std::vector<ProcessId> members;
  for (std::uint64_t k = 0; k < cfg.committees; ++k) {
    const Bytes s = encode_input(kTag, k, 0);
    members.clear();
    CommitteeCounts c;
    for (ProcessId q = 0; q < p.n; ++q) {
      if (!keys[q].sample(s, thr).member) continue;
      members.push_back(q);
      ++c.size;
      c.byzantine += byz[q];
    }
    const SFlags f = evaluate_s_properties(p, c);
    const bool flags[6] = {f.s1, f.s2, f.s3, f.s4, f.s5, f.s6};
    for (int i = 0; i < 6; ++i) rep.failures[i] += !flags[i];

    if (!f.s1 || c.size < p.W) continue;
    ++rep.subset_checked;
    // The extreme pairs (first/last of the member list) minimise overlap; add random draws on top.
    std::vector<ProcessId> lo_w(members.begin(), members.begin() + p.W);
    std::vector<ProcessId> hi_w(members.end() - p.W, members.end());
    std::vector<ProcessId> lo_b(members.begin(), members.begin() + std::min<std::size_t>(p.B + 1, members.size()));
    if (overlap(lo_w, hi_w) < p.B + 1) ++rep.s5_subset_failures;
    if (overlap(lo_b, hi_w) < 1) ++rep.s6_subset_failures;
    for (std::uint32_t t = 0; t < cfg.subset_draws; ++t) {
      std::vector<ProcessId> a = members, b = members;
      for (std::size_t i = 0; i < p.W; ++i) {
        std::swap(a[i], a[i + rng.below(a.size() - i)]);
        std::swap(b[i], b[i + rng.below(b.size() - i)]);
      }
      const std::vector<ProcessId> wa(a.begin(), a.begin() + p.W), wb(b.begin(), b.begin() + p.W);
      const std::vector<ProcessId> ba(a.begin(), a.begin() + std::min<std::size_t>(p.B + 1, a.size()));
      if (overlap(wa, wb) < p.B + 1) ++rep.s5_subset_failures;
      if (overlap(ba, wb) < 1) ++rep.s6_subset_failures;
    }
  }
  for (int i = 0; i < 4; ++i) {
    rep.sigma[i] = binomial_sigma(rep.analytic[i], rep.committees);
    rep.within_bound[i] = rep.rate(i) <= rep.analytic[i] + 3 * rep.sigma[i];
  }
  return rep;
}

}  // namespace sqba::harness
