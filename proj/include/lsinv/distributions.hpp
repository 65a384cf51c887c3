// Demand distributions and two-moment fits.
//
// The continuous families are the ones used throughout the model: shifted
// exponential, the two mixed-Erlang mixtures with a single rate parameter,
// and the hyperexponential with gamma-matched moments. Discrete demand is a
// finite PMF on 0..N. All families support closed-form moments, CDF,
// inverse-transform sampling, and the conditional overshoot moments that
// drive the backward recursion.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "lsinv/random.hpp"

namespace lsinv {

struct DemandMoments {
  double mean = 0.0;  // E[D] > 0
  double cv = 0.0;    // sigma / mean > 0
};

struct ShiftedExponential {
  double shift = 0.0;  // d0 >= 0
  double rate = 1.0;   // mu > 0
};

// Mixture of Erlang-(k-1) and Erlang-k with a common rate; weight q on the
// Erlang-(k-1) branch. Covers cv <= 1.
struct MixedErlangKm1K {
  std::int64_t k = 2;
  double q = 1.0;
  double rate = 1.0;
};

// Mixture of Erlang-1 (exponential) and Erlang-k with a common rate; weight
// q on the exponential branch. Covers cv > 1.
struct MixedErlang1K {
  std::int64_t k = 3;
  double q = 0.5;
  double rate = 1.0;
};

struct Hyperexponential {
  double q = 0.5;
  double rate1 = 1.0;
  double rate2 = 1.0;
};

// PMF on the integers 0..N. probs sum to 1 within 1e-12. geom_ratio is set
// by the geometric constructor (probs[j+1] = ratio * probs[j]) and unlocks an
// O(M) demand-subtraction step in the discrete engine.
struct DiscretePmf {
  std::vector<double> probs;
  double geom_ratio = -1.0;
};

using FittedDistribution = std::variant<ShiftedExponential, MixedErlangKm1K,
                                        MixedErlang1K, Hyperexponential, DiscretePmf>;

enum class Family {
  shifted_exponential,
  mixed_erlang_km1k,
  mixed_erlang_1k,
  hyperexponential,
  discrete_pmf,
};

inline Family family_of(const FittedDistribution& d) {
  return static_cast<Family>(d.index());
}

inline bool is_discrete(const FittedDistribution& d) {
  return std::holds_alternative<DiscretePmf>(d);
}

inline const char* family_name(Family f) {
  switch (f) {
    case Family::shifted_exponential: return "shifted_exponential";
    case Family::mixed_erlang_km1k: return "mixed_erlang_km1k";
    case Family::mixed_erlang_1k: return "mixed_erlang_1k";
    case Family::hyperexponential: return "hyperexponential";
    case Family::discrete_pmf: return "discrete_pmf";
  }
  return "?";
}

namespace detail {

// P{Erlang(n, 1) > x} = e^-x sum_{i<n} x^i/i!, the regularized upper
// incomplete gamma at integer order.
inline double erlang_q(std::int64_t n, double x) {
  if (n <= 0) return 0.0;
  if (x <= 0.0) return 1.0;
  if (n > 64 || x > 700.0) return boost::math::gamma_q(static_cast<double>(n), x);
  double term = std::exp(-x);
  double sum = term;
  for (std::int64_t i = 1; i < n; ++i) {
    term *= x / static_cast<double>(i);
    sum += term;
  }
  return std::min(sum, 1.0);
}

struct QTrio {
  double q0, q1, q2;  // Q(n,x), Q(n+1,x), Q(n+2,x)
};

inline QTrio erlang_q_trio(std::int64_t n, double x) {
  if (x <= 0.0) return {n > 0 ? 1.0 : 0.0, 1.0, 1.0};
  if (n > 64 || x > 700.0) {
    const double a = static_cast<double>(n);
    return {n > 0 ? boost::math::gamma_q(a, x) : 0.0,
            boost::math::gamma_q(a + 1.0, x), boost::math::gamma_q(a + 2.0, x)};
  }
  double term = std::exp(-x);
  double sum = term;  // at entry of iteration i, sum = Q(i, x)
  double q0 = 0.0;
  double q1 = 0.0;
  for (std::int64_t i = 1; i <= n + 1; ++i) {
    if (i == n) q0 = sum;
    if (i == n + 1) q1 = sum;
    term *= x / static_cast<double>(i);
    sum += term;
  }
  if (n == 0) q0 = 0.0;
  const double q2 = sum;
  return {std::min(q0, 1.0), std::min(q1, 1.0), std::min(q2, 1.0)};
}

// Unconditional upper partial moments of a distribution about a point a:
// p = P{D > a}, e1 = E[(D-a)^+], e2 = E[(D-a)^+ ^2].
struct TailPartials {
  double p = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
};

// One Erlang(n, rate) branch about a >= 0.
inline TailPartials erlang_branch_partials(std::int64_t n, double rate, double a) {
  const QTrio t = erlang_q_trio(n, rate * a);
  const double nn = static_cast<double>(n);
  TailPartials r;
  r.p = t.q0;
  r.e1 = std::max(0.0, (nn / rate) * t.q1 - a * t.q0);
  r.e2 = std::max(0.0, (nn * (nn + 1.0) / (rate * rate)) * t.q2 -
                           2.0 * a * (nn / rate) * t.q1 + a * a * t.q0);
  return r;
}

// Mixture-of-Erlangs view shared by every continuous family: an optional
// deterministic shift plus at most two (weight, order, rate) branches.
struct Branch {
  double w;
  std::int64_t n;
  double rate;
};

struct BranchMix {
  double shift = 0.0;
  int count = 0;
  Branch b[2];
};

inline BranchMix branch_mix(const FittedDistribution& d) {
  BranchMix m;
  if (const auto* se = std::get_if<ShiftedExponential>(&d)) {
    m.shift = se->shift;
    m.count = 1;
    m.b[0] = {1.0, 1, se->rate};
  } else if (const auto* me = std::get_if<MixedErlangKm1K>(&d)) {
    m.count = 0;
    if (me->q > 0.0) m.b[m.count++] = {me->q, me->k - 1, me->rate};
    if (me->q < 1.0) m.b[m.count++] = {1.0 - me->q, me->k, me->rate};
  } else if (const auto* m1k = std::get_if<MixedErlang1K>(&d)) {
    m.count = 0;
    if (m1k->q > 0.0) m.b[m.count++] = {m1k->q, 1, m1k->rate};
    if (m1k->q < 1.0) m.b[m.count++] = {1.0 - m1k->q, m1k->k, m1k->rate};
  } else if (const auto* hy = std::get_if<Hyperexponential>(&d)) {
    m.count = 0;
    if (hy->q > 0.0) m.b[m.count++] = {hy->q, 1, hy->rate1};
    if (hy->q < 1.0) m.b[m.count++] = {1.0 - hy->q, 1, hy->rate2};
  } else {
    throw std::invalid_argument("branch_mix: discrete distribution");
  }
  return m;
}

inline TailPartials tail_partials(const FittedDistribution& d, double a) {
  TailPartials r;
  if (const auto* pmf = std::get_if<DiscretePmf>(&d)) {
    for (std::size_t j = 0; j < pmf->probs.size(); ++j) {
      const double x = static_cast<double>(j) - a;
      if (x > 0.0) {
        r.p += pmf->probs[j];
        r.e1 += x * pmf->probs[j];
        r.e2 += x * x * pmf->probs[j];
      }
    }
    return r;
  }
  const BranchMix m = branch_mix(d);
  if (a <= m.shift) {
    // below the shift the positive part is the whole variable
    double mean = m.shift, second = 0.0;
    for (int i = 0; i < m.count; ++i) {
      mean += m.b[i].w * m.b[i].n / m.b[i].rate;
    }
    // E[(D-a)^2] = Var + (mean-a)^2 via branch second moments
    double var = 0.0;
    for (int i = 0; i < m.count; ++i) {
      const double nn = static_cast<double>(m.b[i].n);
      second += m.b[i].w * nn * (nn + 1.0) / (m.b[i].rate * m.b[i].rate);
    }
    const double stoch_mean = mean - m.shift;
    var = second - stoch_mean * stoch_mean;
    r.p = 1.0;
    r.e1 = mean - a;
    r.e2 = var + (mean - a) * (mean - a);
    return r;
  }
  const double w = a - m.shift;
  for (int i = 0; i < m.count; ++i) {
    const TailPartials bp = erlang_branch_partials(m.b[i].n, m.b[i].rate, w);
    r.p += m.b[i].w * bp.p;
    r.e1 += m.b[i].w * bp.e1;
    r.e2 += m.b[i].w * bp.e2;
  }
  return r;
}

}  // namespace detail

// --- moments ---------------------------------------------------------------

// First two central moments (mean, variance).
inline std::pair<double, double> moments(const FittedDistribution& d) {
  if (const auto* pmf = std::get_if<DiscretePmf>(&d)) {
    double mean = 0.0, second = 0.0;
    for (std::size_t j = 0; j < pmf->probs.size(); ++j) {
      mean += static_cast<double>(j) * pmf->probs[j];
      second += static_cast<double>(j) * static_cast<double>(j) * pmf->probs[j];
    }
    return {mean, std::max(0.0, second - mean * mean)};
  }
  const detail::BranchMix m = detail::branch_mix(d);
  double smean = 0.0, ssecond = 0.0;
  for (int i = 0; i < m.count; ++i) {
    const double nn = static_cast<double>(m.b[i].n);
    smean += m.b[i].w * nn / m.b[i].rate;
    ssecond += m.b[i].w * nn * (nn + 1.0) / (m.b[i].rate * m.b[i].rate);
  }
  const double var = std::max(0.0, ssecond - smean * smean);
  return {m.shift + smean, var};
}

inline double mean_of(const FittedDistribution& d) { return moments(d).first; }

inline double cv_of(const FittedDistribution& d) {
  const auto [m, v] = moments(d);
  return std::sqrt(v) / m;
}

// --- cdf -------------------------------------------------------------------

inline double cdf(const FittedDistribution& d, double x) {
  if (const auto* pmf = std::get_if<DiscretePmf>(&d)) {
    if (x < 0.0) return 0.0;
    const std::size_t top = static_cast<std::size_t>(std::floor(x));
    double c = 0.0;
    for (std::size_t j = 0; j < pmf->probs.size() && j <= top; ++j) c += pmf->probs[j];
    return std::min(c, 1.0);
  }
  const detail::BranchMix m = detail::branch_mix(d);
  if (x <= m.shift) return 0.0;
  const double w = x - m.shift;
  double tail = 0.0;
  for (int i = 0; i < m.count; ++i) {
    tail += m.b[i].w * detail::erlang_q(m.b[i].n, m.b[i].rate * w);
  }
  return 1.0 - tail;
}

// --- overshoot -------------------------------------------------------------

struct OvershootMoments {
  double m1 = 0.0;    // E[(Z-a) | Z>a]
  double m2 = 0.0;    // E[(Z-a)^2 | Z>a]
  double tail = 0.0;  // P{Z > a}
};

// Conditional overshoot moments beyond a. Throws when the tail probability
// underflows (the recursion short-circuits that case before calling).
inline OvershootMoments overshoot_moments(const FittedDistribution& d, double a) {
  if (a < 0.0) throw std::invalid_argument("overshoot_moments: a < 0");
  const detail::TailPartials tp = detail::tail_partials(d, a);
  if (tp.p < 1e-300) {
    throw std::domain_error("overshoot_moments: zero tail beyond a");
  }
  return {tp.e1 / tp.p, tp.e2 / tp.p, tp.p};
}

// --- sampling ---------------------------------------------------------------

// Every draw consumes exactly two uniforms: one selects the mixture branch,
// one is inverse-transformed within the branch. Families without a branch
// choice burn the first uniform so streams stay aligned across policies and
// distribution families.
inline double sample(const FittedDistribution& d, RandomStream& stream) {
  const double u1 = stream.uniform();
  const double u2 = stream.uniform();
  if (const auto* se = std::get_if<ShiftedExponential>(&d)) {
    (void)u1;
    return se->shift - std::log1p(-u2) / se->rate;
  }
  if (const auto* pmf = std::get_if<DiscretePmf>(&d)) {
    (void)u1;
    double c = 0.0;
    for (std::size_t j = 0; j < pmf->probs.size(); ++j) {
      c += pmf->probs[j];
      if (u2 < c) return static_cast<double>(j);
    }
    return static_cast<double>(pmf->probs.size() - 1);
  }
  const detail::BranchMix m = detail::branch_mix(d);
  const detail::Branch& br = (m.count == 1 || u1 < m.b[0].w) ? m.b[0] : m.b[1];
  double x;
  if (br.n == 1) {
    x = -std::log1p(-u2);
  } else {
    x = boost::math::gamma_p_inv(static_cast<double>(br.n), u2);
  }
  return m.shift + x / br.rate;
}

// --- two-moment fits --------------------------------------------------------

// Fits a distribution matching the requested mean and cv. Default family is
// the mixture of Erlang-(k-1) and Erlang-k for cv <= 1 and the
// hyperexponential with gamma moments for cv > 1.
inline FittedDistribution fit_two_moment(const DemandMoments& m,
                                         std::optional<Family> family = {}) {
  if (!(m.mean > 0.0)) throw std::invalid_argument("fit_two_moment: mean must be > 0");
  if (!(m.cv > 0.0)) {
    throw std::invalid_argument("fit_two_moment: cv must be > 0 (degenerate demand)");
  }
  const double c2 = m.cv * m.cv;
  const Family fam =
      family.value_or(m.cv <= 1.0 ? Family::mixed_erlang_km1k : Family::hyperexponential);
  switch (fam) {
    case Family::shifted_exponential: {
      if (m.cv > 1.0) {
        throw std::invalid_argument("fit_two_moment: shifted exponential needs cv <= 1");
      }
      return ShiftedExponential{m.mean * (1.0 - m.cv), 1.0 / (m.cv * m.mean)};
    }
    case Family::mixed_erlang_km1k: {
      if (m.cv > 1.0) {
        throw std::invalid_argument("fit_two_moment: Erlang-(k-1)/k mixture needs cv <= 1");
      }
      const auto k = static_cast<std::int64_t>(std::floor(1.0 / c2)) + 1;
      const double kk = static_cast<double>(k);
      const double disc = std::max(0.0, kk * (1.0 + c2) - kk * kk * c2);
      double q = (kk * c2 - std::sqrt(disc)) / (1.0 + c2);
      q = std::clamp(q, 0.0, 1.0);
      return MixedErlangKm1K{k, q, (kk - q) / m.mean};
    }
    case Family::mixed_erlang_1k: {
      if (m.cv < 1.0) {
        throw std::invalid_argument("fit_two_moment: Erlang-1/k mixture needs cv >= 1");
      }
      // smallest k keeping the discriminant k^2 + 4 - 4 k c2 nonnegative,
      // i.e. k >= 2 c2 + 2 sqrt(c2^2 - 1); at cv = 1 this collapses to the
      // exponential (k = 2, q = 1)
      const auto k = std::max<std::int64_t>(
          2, static_cast<std::int64_t>(std::ceil(2.0 * c2 + 2.0 * std::sqrt(c2 * c2 - 1.0))));
      const double kk = static_cast<double>(k);
      const double disc = std::max(0.0, kk * kk + 4.0 - 4.0 * kk * c2);
      double q = (2.0 * kk * c2 + kk - 2.0 - std::sqrt(disc)) /
                 (2.0 * (kk - 1.0) * (1.0 + c2));
      q = std::clamp(q, 0.0, 1.0);
      return MixedErlang1K{k, q, (q + kk * (1.0 - q)) / m.mean};
    }
    case Family::hyperexponential: {
      if (m.cv < 1.0) {
        throw std::invalid_argument("fit_two_moment: hyperexponential needs cv >= 1");
      }
      const double rate1 =
          (2.0 / m.mean) * (1.0 + std::sqrt((c2 - 0.5) / (c2 + 1.0)));
      const double rate2 = 4.0 / m.mean - rate1;
      const double q = rate1 * (rate2 * m.mean - 1.0) / (rate2 - rate1);
      return Hyperexponential{q, rate1, rate2};
    }
    case Family::discrete_pmf:
      throw std::invalid_argument("fit_two_moment: no two-moment discrete fit");
  }
  throw std::logic_error("fit_two_moment: unreachable");
}

// --- discrete constructors ---------------------------------------------------

// Poisson PMF truncated once cumulative mass reaches 1 - 1e-12, renormalized.
inline DiscretePmf poisson_pmf(double mean) {
  if (!(mean > 0.0)) throw std::invalid_argument("poisson_pmf: mean must be > 0");
  std::vector<double> probs;
  double term = std::exp(-mean);
  double cum = term;
  probs.push_back(term);
  for (std::size_t j = 1; cum < 1.0 - 1e-12; ++j) {
    term *= mean / static_cast<double>(j);
    probs.push_back(term);
    cum += term;
    if (j > 100000) throw std::runtime_error("poisson_pmf: truncation failed");
  }
  for (double& p : probs) p /= cum;
  return DiscretePmf{std::move(probs)};
}

// Geometric PMF on {0,1,...} with the given mean, truncated and renormalized
// like poisson_pmf.
inline DiscretePmf geometric_pmf(double mean) {
  if (!(mean > 0.0)) throw std::invalid_argument("geometric_pmf: mean must be > 0");
  const double p = 1.0 / (1.0 + mean);
  std::vector<double> probs;
  double term = p;
  double cum = term;
  probs.push_back(term);
  while (cum < 1.0 - 1e-12) {
    term *= (1.0 - p);
    probs.push_back(term);
    cum += term;
    if (probs.size() > 1000000) throw std::runtime_error("geometric_pmf: truncation failed");
  }
  for (double& q : probs) q /= cum;
  return DiscretePmf{std::move(probs), 1.0 - p};
}

inline void validate(const DiscretePmf& pmf) {
  double s = 0.0;
  for (double p : pmf.probs) {
    if (p < 0.0) throw std::invalid_argument("DiscretePmf: negative probability");
    s += p;
  }
  if (std::abs(s - 1.0) > 1e-12) {
    throw std::invalid_argument("DiscretePmf: probabilities sum to " + std::to_string(s));
  }
}

}  // namespace lsinv
