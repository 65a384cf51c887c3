// Shared oracle helpers for the test suites. Everything here is independent
// of the library's evaluation paths: plain quadrature, enumeration, and
// Monte Carlo against raw trajectories.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "lsinv/distributions.hpp"
#include "lsinv/pipeline.hpp"

namespace testsupport {

// Integral of f over [lo, hi] with composite 64-point midpoint-free
// Gauss-Legendre-like Simpson panels. Good to ~1e-12 for smooth decaying
// integrands when panels are small relative to curvature.
inline double integrate(const std::function<double(double)>& f, double lo, double hi,
                        int panels = 4096) {
  double sum = 0.0;
  const double w = (hi - lo) / panels;
  for (int i = 0; i < panels; ++i) {
    const double a = lo + i * w;
    const double b = a + w;
    const double m = 0.5 * (a + b);
    sum += (w / 6.0) * (f(a) + 4.0 * f(m) + f(b));
  }
  return sum;
}

// Integral of the survival function of d from a to infinity, truncated where
// the tail is negligible.
inline double survival_integral(const lsinv::FittedDistribution& d, double a) {
  const auto [mean, var] = lsinv::moments(d);
  const double span = mean + 60.0 * (std::sqrt(var) + mean);
  return integrate([&](double x) { return 1.0 - lsinv::cdf(d, x); }, a, a + span, 20000);
}

// Two-sided Kolmogorov-Smirnov distance between samples and a CDF.
inline double ks_distance(std::vector<double> samples, const lsinv::FittedDistribution& d) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double dist = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = lsinv::cdf(d, samples[i]);
    dist = std::max(dist, std::abs(f - static_cast<double>(i) / n));
    dist = std::max(dist, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return dist;
}

// Oracle-side samplers built directly on the family definitions (sums of
// exponentials), independent of the library's inverse-transform path.
class OracleRng {
 public:
  explicit OracleRng(std::uint64_t seed) : eng_(seed) {}
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }
  double erlang(std::int64_t n, double rate) {
    double s = 0.0;
    for (std::int64_t i = 0; i < n; ++i) s += exponential(rate);
    return s;
  }
  double draw(const lsinv::FittedDistribution& d) {
    if (const auto* pmf = std::get_if<lsinv::DiscretePmf>(&d)) {
      const double u = uniform();
      double c = 0.0;
      for (std::size_t j = 0; j < pmf->probs.size(); ++j) {
        c += pmf->probs[j];
        if (u < c) return static_cast<double>(j);
      }
      return static_cast<double>(pmf->probs.size() - 1);
    }
    const lsinv::detail::BranchMix m = lsinv::detail::branch_mix(d);
    const double u = uniform();
    const lsinv::detail::Branch& br = (m.count == 1 || u < m.b[0].w) ? m.b[0] : m.b[1];
    return m.shift + erlang(br.n, br.rate);
  }

 private:
  std::mt19937_64 eng_;
};

// Monte Carlo estimate of P{I~_{t+L} > 0} for a candidate order by playing
// the truncated inventory recursion forward on raw demand draws.
inline double mc_p3(const lsinv::PipelineState& state, double q,
                    const lsinv::FittedDistribution& d, std::int64_t samples,
                    std::uint64_t seed) {
  OracleRng rng(seed);
  const int L = state.lead_time();
  std::int64_t hits = 0;
  for (std::int64_t s = 0; s < samples; ++s) {
    double inv = state.on_hand;
    for (int t = 0; t <= L; ++t) {
      inv = std::max(0.0, inv - rng.draw(d));
      if (t < L) inv += (t < L - 1) ? state.outstanding[t] : q;
    }
    if (inv > 0.0) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

// Monte Carlo estimate of E[I~_{t+L-1}] (no candidate order involved).
inline std::pair<double, double> mc_expected_inventory(const lsinv::PipelineState& state,
                                                       const lsinv::FittedDistribution& d,
                                                       std::int64_t samples,
                                                       std::uint64_t seed) {
  OracleRng rng(seed);
  const int L = state.lead_time();
  double sum = 0.0, sumsq = 0.0;
  for (std::int64_t s = 0; s < samples; ++s) {
    double inv = state.on_hand;
    for (int t = 0; t <= L - 1; ++t) {
      inv = std::max(0.0, inv - rng.draw(d));
      if (t < L - 1) inv += state.outstanding[t];
    }
    sum += inv;
    sumsq += inv * inv;
  }
  const double mean = sum / static_cast<double>(samples);
  const double var = std::max(0.0, sumsq / static_cast<double>(samples) - mean * mean);
  return {mean, std::sqrt(var / static_cast<double>(samples))};
}

// Exhaustive enumeration of P{I~_{t+L} > 0} and E[I~_{t+L-1}] for integer
// states and a finite demand PMF. The recursion is evaluated path by path.
struct BruteForceResult {
  double p3 = 0.0;
  double expected_inventory = 0.0;
};

inline BruteForceResult brute_force_discrete(const lsinv::PipelineState& state,
                                             std::int64_t q, const lsinv::DiscretePmf& pmf) {
  const int L = state.lead_time();
  BruteForceResult out;
  std::function<void(int, double, double)> walk = [&](int t, double inv, double prob) {
    if (t == L + 1) return;
    for (std::size_t dval = 0; dval < pmf.probs.size(); ++dval) {
      const double p = pmf.probs[dval] * prob;
      if (p == 0.0) continue;
      const double end_inv = std::max(0.0, inv - static_cast<double>(dval));
      if (t == L - 1) out.expected_inventory += p * end_inv;
      if (t == L) {
        if (end_inv > 0.0) out.p3 += p;
        continue;
      }
      const double arrival =
          (t < L - 1) ? state.outstanding[t] : static_cast<double>(q);
      walk(t + 1, end_inv + arrival, p);
    }
  };
  walk(0, state.on_hand, 1.0);
  return out;
}

}  // namespace testsupport
