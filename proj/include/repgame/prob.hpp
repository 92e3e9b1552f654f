#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "repgame/common.hpp"

namespace repgame {

using Dist = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_distribution(const Dist& p, double tol = kProbTol) {
  double sum = 0.0;
  for (double v : p) {
    if (v < -tol || !std::isfinite(v)) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= std::max(tol, 1e-9);
}

inline Dist uniform_dist(std::size_t n) {
  return Dist(n, 1.0 / static_cast<double>(n));
}

// KL-divergence in nats, with the 0*log(0/q)=0 convention.  Returns +inf
// when P puts mass where Q does not.
inline double kl_divergence(const Dist& p, const Dist& q) {
  if (p.size() != q.size())
    throw InputError("kl_divergence: dimension mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return kInf;
    d += p[i] * std::log(p[i] / q[i]);
  }
  return d < 0.0 ? 0.0 : d;
}

// KL between Bernoulli(p1) and Bernoulli(p2), success probabilities given.
inline double bernoulli_kl(double p1, double p2) {
  return kl_divergence({1.0 - p1, p1}, {1.0 - p2, p2});
}

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Per-episode stream: independent of how episodes are scheduled.
inline Rng episode_rng(std::uint64_t master_seed, std::uint64_t episode) {
  return Rng(splitmix64(master_seed ^ splitmix64(episode)));
}

inline int sample_index(const Dist& p, Rng& rng) {
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(p.size()) - 1;
}

}  // namespace repgame
