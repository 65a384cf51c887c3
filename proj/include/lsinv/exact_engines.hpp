// Exact evaluators for P3 and expected inventory: forward convolution over
// the integer support for discrete demand, and the exponential-phase engine
// for mixed-Erlang and shifted-exponential demand.
//
// The phase engine rests on memorylessness: demand is a random count of
// i.i.d. exponential phases, a known amount x covers a Poisson(rate*x)
// number of phases, and the lost-sales dynamics can be evolved on the
// distribution of available phases without error. A shifted exponential is
// first reduced to a plain exponential by subtracting the shift from the
// on-hand stock and every order.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lsinv/distributions.hpp"
#include "lsinv/pipeline.hpp"

namespace lsinv {

struct SupportOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a shifted system carries an order smaller than the per-period
// shift; the transformed system would need a negative arrival.
struct ShiftInfeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- discrete engine ---------------------------------------------------------

namespace detail {

inline void check_integer_state(const PipelineState& state, double q) {
  const auto is_int = [](double x) {
    return x >= 0.0 && std::abs(x - std::round(x)) < 1e-9;
  };
  if (!is_int(state.on_hand) || !is_int(q)) {
    throw std::invalid_argument("discrete engine: state must live on the integer grid");
  }
  for (double o : state.outstanding) {
    if (!is_int(o)) {
      throw std::invalid_argument("discrete engine: state must live on the integer grid");
    }
  }
}

// One demand step on an inventory distribution: subtract the PMF and
// truncate at zero. Mass is conserved exactly; the zero bucket absorbs the
// remainder.
inline void discrete_demand_step(std::vector<double>& inv, const DiscretePmf& pmf,
                                 std::vector<double>& scratch) {
  const std::size_t M = inv.size();
  scratch.assign(M, 0.0);
  std::vector<double>& out = scratch;
  double total = 0.0;
  for (double x : inv) total += x;
  if (pmf.geom_ratio >= 0.0 && pmf.probs.size() > 1) {
    // geometric tail: out[j] = p0 inv[j] + r out[j+1], within the PMF's own
    // truncation tolerance
    const double p0 = pmf.probs[0];
    const double r = pmf.geom_ratio;
    double run = 0.0;
    for (std::size_t j = M; j-- > 1;) {
      run = p0 * inv[j] + r * run;
      out[j] = run;
    }
  } else {
    for (std::size_t d = 0; d < pmf.probs.size(); ++d) {
      const double p = pmf.probs[d];
      if (p == 0.0) continue;
      for (std::size_t j = d + 1; j < M; ++j) out[j - d] += p * inv[j];
    }
  }
  double above = 0.0;
  for (std::size_t j = 1; j < M; ++j) above += out[j];
  out[0] = std::max(0.0, total - above);
  inv.swap(out);
}

}  // namespace detail

// Distribution of the end-of-period inventory I~_{t+L-1}, obtained by pushing
// the full distribution through L demand steps and the pipeline arrivals.
inline std::vector<double> project_discrete(const PipelineState& state, const DiscretePmf& pmf,
                                            std::size_t support_cap = 100000) {
  detail::check_integer_state(state, 0.0);
  const int L = state.lead_time();
  std::vector<double> inv(static_cast<std::size_t>(std::llround(state.on_hand)) + 1, 0.0);
  inv.back() = 1.0;
  std::vector<double> scratch;
  for (int s = 0; s < L; ++s) {
    detail::discrete_demand_step(inv, pmf, scratch);
    if (s + 1 < L) {
      const auto arrival = static_cast<std::size_t>(std::llround(state.outstanding[s]));
      if (arrival > 0) {
        if (inv.size() + arrival > support_cap) {
          throw SupportOverflow("project_discrete: support cap exceeded");
        }
        inv.insert(inv.begin(), arrival, 0.0);
      }
    }
  }
  return inv;
}

// Exact P{I~_{t+L} > 0} for integer states and a candidate integer order.
inline double exact_discrete_p3(const PipelineState& state, std::int64_t q,
                                const DiscretePmf& pmf, std::size_t support_cap = 100000) {
  if (q < 0) throw std::invalid_argument("exact_discrete_p3: q < 0");
  const std::vector<double> proj = project_discrete(state, pmf, support_cap);
  // final period: arrival q, then demand; I~ > 0 iff D < I~_{t+L-1} + q
  double p3 = 0.0;
  for (std::size_t j = 0; j < proj.size(); ++j) {
    if (proj[j] == 0.0) continue;
    const double top = static_cast<double>(j) + static_cast<double>(q) - 1.0;
    p3 += proj[j] * cdf(FittedDistribution{pmf}, top);
  }
  return std::clamp(p3, 0.0, 1.0);
}

// Exact E[I~_{t+L-1}] for integer states.
inline double exact_discrete_expected_inventory(const PipelineState& state,
                                                const DiscretePmf& pmf,
                                                std::size_t support_cap = 100000) {
  const std::vector<double> proj = project_discrete(state, pmf, support_cap);
  double e = 0.0;
  for (std::size_t j = 1; j < proj.size(); ++j) e += static_cast<double>(j) * proj[j];
  return e;
}

// --- phase engine -------------------------------------------------------------

// Number of exponential phases demanded per period, plus the single rate and
// any deterministic per-period shift to subtract from stock and orders.
struct PhaseDemand {
  std::vector<std::pair<std::int64_t, double>> phase_counts;
  double rate = 1.0;
  double shift = 0.0;

  double phase_mean() const {
    double m = 0.0;
    for (const auto& [k, p] : phase_counts) m += static_cast<double>(k) * p;
    return m;
  }
  std::int64_t max_count() const {
    std::int64_t m = 0;
    for (const auto& [k, p] : phase_counts) m = std::max(m, k);
    return m;
  }
};

inline PhaseDemand to_phase_demand(const FittedDistribution& d) {
  PhaseDemand pd;
  if (const auto* se = std::get_if<ShiftedExponential>(&d)) {
    pd.phase_counts = {{1, 1.0}};
    pd.rate = se->rate;
    pd.shift = se->shift;
    return pd;
  }
  if (const auto* me = std::get_if<MixedErlangKm1K>(&d)) {
    pd.rate = me->rate;
    if (me->q > 0.0) pd.phase_counts.emplace_back(me->k - 1, me->q);
    if (me->q < 1.0) pd.phase_counts.emplace_back(me->k, 1.0 - me->q);
    return pd;
  }
  if (const auto* m1k = std::get_if<MixedErlang1K>(&d)) {
    pd.rate = m1k->rate;
    if (m1k->q > 0.0) pd.phase_counts.emplace_back(1, m1k->q);
    if (m1k->q < 1.0) pd.phase_counts.emplace_back(m1k->k, 1.0 - m1k->q);
    return pd;
  }
  throw std::invalid_argument(
      "to_phase_demand: needs a single-rate family (mixed Erlang or shifted exponential)");
}

struct PhaseConfig {
  std::size_t phase_cap = 20000;
  double mass_tol = 1e-10;
};

namespace detail {

// Poisson(lambda) PMF over a window covering all but < 1e-12 of the mass,
// built outward from the mode to stay in range for large lambda.
struct PoissonWindow {
  std::size_t offset = 0;
  std::vector<double> probs;
};

inline PoissonWindow poisson_window(double lambda) {
  PoissonWindow w;
  if (lambda <= 0.0) {
    w.probs = {1.0};
    return w;
  }
  const auto mode = static_cast<std::int64_t>(std::floor(lambda));
  const double logp_mode =
      -lambda + static_cast<double>(mode) * std::log(lambda) - std::lgamma(mode + 1.0);
  const double pmode = std::exp(logp_mode);
  // walk down then up until terms are negligible
  std::vector<double> down;
  double p = pmode;
  for (std::int64_t j = mode; j > 0;) {
    p *= static_cast<double>(j) / lambda;
    --j;
    down.push_back(p);
    if (p < pmode * 1e-17) break;
  }
  std::int64_t lo = mode - static_cast<std::int64_t>(down.size());
  w.offset = static_cast<std::size_t>(lo);
  w.probs.assign(down.rbegin(), down.rend());
  w.probs.push_back(pmode);
  p = pmode;
  for (std::int64_t j = mode + 1;; ++j) {
    p *= lambda / static_cast<double>(j);
    w.probs.push_back(p);
    if (p < pmode * 1e-17) break;
  }
  double sum = 0.0;
  for (double x : w.probs) sum += x;
  for (double& x : w.probs) x /= sum;
  return w;
}

// Demand step in phase space: subtract the two-point phase count, truncating
// at zero. Optionally reports P{K > J} and E[(K - J)^+] before the step.
struct PhaseLoss {
  double prob = 0.0;
  double expected_phases = 0.0;
};

inline PhaseLoss phase_demand_step(std::vector<double>& j_dist, const PhaseDemand& pd,
                                   std::vector<double>& scratch) {
  const std::size_t M = j_dist.size();
  scratch.assign(M, 0.0);
  PhaseLoss loss;
  for (const auto& [kc, pk] : pd.phase_counts) {
    const auto k = static_cast<std::size_t>(kc);
    double below = 0.0;
    for (std::size_t i = 0; i < M && i < k; ++i) {
      below += j_dist[i];
      loss.expected_phases += pk * static_cast<double>(k - i) * j_dist[i];
    }
    loss.prob += pk * below;
    scratch[0] += pk * below;
    for (std::size_t j = k; j < M; ++j) scratch[j - k] += pk * j_dist[j];
  }
  j_dist.swap(scratch);
  return loss;
}

inline void phase_arrival(std::vector<double>& j_dist, double lambda, std::size_t cap,
                          std::vector<double>& scratch) {
  if (lambda <= 0.0) return;
  const PoissonWindow w = poisson_window(lambda);
  const std::size_t out_size = j_dist.size() + w.offset + w.probs.size() - 1;
  if (out_size > cap) throw SupportOverflow("phase engine: phase cap exceeded");
  scratch.assign(out_size, 0.0);
  for (std::size_t i = 0; i < j_dist.size(); ++i) {
    const double pi = j_dist[i];
    if (pi < 1e-300) continue;
    for (std::size_t j = 0; j < w.probs.size(); ++j) {
      scratch[i + w.offset + j] += pi * w.probs[j];
    }
  }
  j_dist.swap(scratch);
}

inline void check_mass(const std::vector<double>& j_dist, double tol) {
  double s = 0.0;
  for (double x : j_dist) s += x;
  if (std::abs(s - 1.0) > tol) {
    throw std::runtime_error("phase engine: probability mass drifted to " + std::to_string(s));
  }
}

// Shift-reduced quantities for the phase engine. Orders below the shift make
// the transformed system invalid.
struct ReducedState {
  double on_hand;
  std::vector<double> arrivals;  // oldest first, excludes the candidate
};

inline ReducedState reduce_state(const PipelineState& state, const PhaseDemand& pd) {
  ReducedState r;
  r.on_hand = std::max(0.0, state.on_hand - pd.shift);
  r.arrivals.reserve(state.outstanding.size());
  for (double qo : state.outstanding) {
    const double adj = qo - pd.shift;
    if (adj < -1e-9) {
      throw ShiftInfeasible("phase engine: outstanding order below the demand shift");
    }
    r.arrivals.push_back(std::max(0.0, adj));
  }
  return r;
}

}  // namespace detail

// Distribution of available phases just before the candidate order's arrival
// period, after L demand steps and the pipeline arrivals. Also accumulates
// the per-period expected lost phases for the balance equation.
struct PhaseProjection {
  std::vector<double> j_dist;
  double lost_phases = 0.0;  // sum over the L periods of E[(K - J)^+]
};

inline PhaseProjection project_phase(const PipelineState& state, const PhaseDemand& pd,
                                     const PhaseConfig& cfg = {}) {
  state.check();
  const detail::ReducedState red = detail::reduce_state(state, pd);
  const int L = state.lead_time();
  PhaseProjection proj;
  std::vector<double> scratch;
  proj.j_dist = {1.0};
  detail::phase_arrival(proj.j_dist, pd.rate * red.on_hand, cfg.phase_cap, scratch);
  for (int s = 0; s < L; ++s) {
    const detail::PhaseLoss loss = detail::phase_demand_step(proj.j_dist, pd, scratch);
    proj.lost_phases += loss.expected_phases;
    if (s + 1 < L) {
      detail::phase_arrival(proj.j_dist, pd.rate * red.arrivals[s], cfg.phase_cap, scratch);
    }
    detail::check_mass(proj.j_dist, cfg.mass_tol);
  }
  return proj;
}

// P{I~_{t+L} > 0} given a projection and a raw (un-reduced) candidate order.
inline double phase_p3_from_projection(const PhaseProjection& proj, double q,
                                       const PhaseDemand& pd) {
  const double q_adj = q - pd.shift;
  if (q_adj < -1e-9) {
    throw ShiftInfeasible("phase engine: candidate order below the demand shift");
  }
  const double lambda = pd.rate * std::max(0.0, q_adj);
  const auto kmax = static_cast<std::size_t>(pd.max_count());
  // low-order Poisson terms for the final arrival
  std::vector<double> pois(kmax, 0.0);
  if (lambda == 0.0) {
    pois[0] = 1.0;
  } else {
    double logp = -lambda;
    for (std::size_t t = 0; t < kmax; ++t) {
      pois[t] = std::exp(logp);
      logp += std::log(lambda) - std::log1p(static_cast<double>(t));
    }
  }
  // P{J_final = j} for j < kmax
  std::vector<double> low(kmax, 0.0);
  for (std::size_t j = 0; j < kmax; ++j) {
    double v = 0.0;
    for (std::size_t i = 0; i <= j && i < proj.j_dist.size(); ++i) {
      v += proj.j_dist[i] * pois[j - i];
    }
    low[j] = v;
  }
  double loss = 0.0;
  for (const auto& [kc, pk] : pd.phase_counts) {
    for (std::size_t j = 0; j < static_cast<std::size_t>(kc) && j < kmax; ++j) {
      loss += pk * low[j];
    }
  }
  return std::clamp(1.0 - loss, 0.0, 1.0);
}

// Exact P{I~_{t+L} > 0} for single-rate phase demand.
inline double exact_phase_p3(const PipelineState& state, double q, const PhaseDemand& pd,
                             const PhaseConfig& cfg = {}) {
  if (q < 0.0) throw std::invalid_argument("exact_phase_p3: q < 0");
  const PhaseProjection proj = project_phase(state, pd, cfg);
  return phase_p3_from_projection(proj, q, pd);
}

// Exact E[I~_{t+L-1}] via the inventory balance equation: starting stock plus
// arrivals minus demand plus the expected amount lost, everything measured in
// the shift-reduced system (end-of-period inventories coincide pathwise).
inline double exact_phase_expected_inventory(const PipelineState& state, const PhaseDemand& pd,
                                             const PhaseConfig& cfg = {}) {
  const detail::ReducedState red = detail::reduce_state(state, pd);
  const PhaseProjection proj = project_phase(state, pd, cfg);
  const int L = state.lead_time();
  double inflow = red.on_hand;
  for (double a : red.arrivals) inflow += a;
  const double demand = static_cast<double>(L) * pd.phase_mean() / pd.rate;
  const double lost = proj.lost_phases / pd.rate;
  return std::max(0.0, inflow - demand + lost);
}

}  // namespace lsinv
