// Approximate order-quantity evaluators built on the conditional-random-
// variable backward recursion: the non-stockout probability P3 for a
// candidate order, the forward Lindley moment-iteration alternative, and the
// expected-inventory evaluator behind the PIL policy.
//
// The backward scheme propagates two moments of the conditional overshoot
// variables Z_n through the threshold increments built from the candidate
// order, the pipeline (newest first) and the on-hand stock, refitting a
// distribution at each step. The product of the step tail probabilities
// gives 1 - P3.

#pragma once

#include <cmath>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "lsinv/distributions.hpp"
#include "lsinv/pipeline.hpp"

namespace lsinv {

struct RecursionWorkspace {
  std::vector<double> thresholds;  // xi_1..xi_{L+1}
  std::vector<double> z_mean;      // moments of Z_n before thresholding
  std::vector<double> z_var;
  std::vector<double> tail_probs;  // P{Z_n > xi_n - xi_{n-1}}

  void clear() {
    thresholds.clear();
    z_mean.clear();
    z_var.clear();
    tail_probs.clear();
  }
};

namespace detail {

// Two-moment refit used inside the recursions: Erlang mixture for cv <= 1,
// hyperexponential above. The cv of refit targets is floored at 1e-6.
inline FittedDistribution refit_two_moment(double mean, double var) {
  const double cv = std::max(std::sqrt(std::max(var, 0.0)) / mean, 1e-6);
  return fit_two_moment(DemandMoments{mean, cv},
                        cv <= 1.0 ? Family::mixed_erlang_km1k : Family::hyperexponential);
}

// Multiplies P{Z_n > delta_n} along a list of threshold increments.
// Z_1 is the demand itself when z1_is_demand, otherwise a refit of the
// supplied initial moments; Z_{n+1} = D + (Z_n - delta_n | Z_n > delta_n).
inline double joint_tail_product(std::span<const double> deltas,
                                 const FittedDistribution& d, double demand_mean,
                                 double demand_var, bool z1_is_demand,
                                 double z1_mean, double z1_var,
                                 RecursionWorkspace* ws = nullptr) {
  double product = 1.0;
  double cur_mean = z1_is_demand ? demand_mean : z1_mean;
  double cur_var = z1_is_demand ? demand_var : z1_var;
  bool exact_step = z1_is_demand;
  double xi = 0.0;
  const std::size_t count = deltas.size();
  for (std::size_t n = 0; n < count; ++n) {
    const double delta = deltas[n];
    xi += delta;
    if (ws) {
      ws->thresholds.push_back(xi);
      ws->z_mean.push_back(cur_mean);
      ws->z_var.push_back(cur_var);
    }
    double tail, cm1, cm2;  // tail prob and conditional overshoot moments
    if (delta <= 0.0 && !exact_step) {
      // equal consecutive thresholds: condition on Z > 0 is vacuous
      tail = 1.0;
      cm1 = cur_mean;
      cm2 = cur_var + cur_mean * cur_mean;
    } else {
      TailPartials tp;
      if (exact_step) {
        tp = tail_partials(d, delta);
      } else {
        const FittedDistribution fit = refit_two_moment(cur_mean, cur_var);
        tp = tail_partials(fit, delta);
      }
      tail = tp.p;
      if (tail < 1e-300) {
        if (ws) ws->tail_probs.push_back(0.0);
        return 0.0;
      }
      cm1 = tp.e1 / tail;
      cm2 = tp.e2 / tail;
    }
    if (ws) ws->tail_probs.push_back(tail);
    product *= tail;
    if (product < 1e-300) return 0.0;
    if (n + 1 < count) {
      cur_mean = demand_mean + cm1;
      cur_var = demand_var + std::max(0.0, cm2 - cm1 * cm1);
      exact_step = false;
    }
  }
  return product;
}

// Threshold increments for the P3 recursion: candidate order first, then the
// outstanding orders newest first, closing with the on-hand stock.
inline void p3_deltas(const PipelineState& state, double q, std::vector<double>& out) {
  out.clear();
  out.push_back(q);
  for (auto it = state.outstanding.rbegin(); it != state.outstanding.rend(); ++it) {
    out.push_back(*it);
  }
  out.push_back(state.on_hand);
}

}  // namespace detail

// Backward two-moment approximation of P{I~_{t+L} > 0} for candidate order q.
// Strictly increasing in q; always in [0,1].
inline double backward_p3(const PipelineState& state, double q, const FittedDistribution& d,
                          RecursionWorkspace* ws = nullptr) {
  if (q < 0.0) throw std::invalid_argument("backward_p3: q < 0");
  if (is_discrete(d)) {
    throw std::invalid_argument("backward_p3: discrete demand belongs to the exact engines");
  }
  const auto [dm, dv] = moments(d);
  std::vector<double> deltas;
  detail::p3_deltas(state, q, deltas);
  if (ws) ws->clear();
  const double prod =
      detail::joint_tail_product(deltas, d, dm, dv, /*z1_is_demand=*/true, 0.0, 0.0, ws);
  return std::clamp(1.0 - prod, 0.0, 1.0);
}

namespace detail {

// Cross partial moments of demand against a random threshold V:
// p = P{D > V}, e1 = E[(D-V)^+], e2 = E[(D-V)^+ ^2].
struct CrossPartials {
  double p = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
};

// Closed form for an unshifted demand branch Erlang(n, b) against a fitted
// V branch Gamma(m, a), via the weighted moments M_j = E[V^j e^{-bV}].
inline void accumulate_cross_closed(double wpair, std::int64_t n_in, double b, double m,
                                    double a, CrossPartials& out) {
  const double n = static_cast<double>(n_in);
  // s_i = (b^i / i!) * M_i, advanced by ratio factors; su_i and sv_i carry
  // M_{i+1} and M_{i+2} in the same pass.
  const double ab = a + b;
  double M = std::exp(m * std::log1p(-b / ab));  // M_0 = (a/(a+b))^m
  double s = M;
  double sumP = 0.0, sumA = 0.0, sumB = 0.0, sumC = 0.0, sumD = 0.0, sumE = 0.0;
  for (std::int64_t i = 0; i <= n_in + 1; ++i) {
    const double su = s * (m + i) / ab;        // (b^i/i!) M_{i+1}
    const double sv = su * (m + i + 1.0) / ab; // (b^i/i!) M_{i+2}
    if (i <= n_in - 1) {
      sumP += s;   // survival terms
      sumB += su;  // e1: v Q(n, bv)
      sumE += sv;  // e2: v^2 Q(n, bv)
    }
    if (i <= n_in) {
      sumA += s;   // e1: Q(n+1, bv)
      sumD += su;  // e2: v Q(n+1, bv)
    }
    sumC += s;  // e2: Q(n+2, bv)
    s = su * b / static_cast<double>(i + 1);   // -> (b^{i+1}/(i+1)!) M_{i+1}
  }
  out.p += wpair * sumP;
  out.e1 += wpair * std::max(0.0, (n / b) * sumA - sumB);
  out.e2 += wpair * std::max(0.0, (n * (n + 1.0) / (b * b)) * sumC -
                                      2.0 * (n / b) * sumD + sumE);
}

inline double gamma_pdf(double x, double shape, double rate) {
  if (x <= 0.0) return shape == 1.0 ? rate * std::exp(-rate * x) : 0.0;
  return std::exp(shape * std::log(rate) + (shape - 1.0) * std::log(x) - rate * x -
                  std::lgamma(shape));
}

// Cross partials for arbitrary (possibly shifted) demand by quadrature over
// the density of the fitted V branch.
inline void accumulate_cross_quadrature(double w_branch, double m, double a,
                                        const FittedDistribution& d, double shift,
                                        CrossPartials& out) {
  using gauss = boost::math::quadrature::gauss<double, 30>;
  const double vmean = m / a;
  const double vsd = std::sqrt(m) / a;
  const double lo = std::max(0.0, vmean - 13.0 * vsd);
  const double hi = vmean + 13.0 * vsd;
  const auto segment = [&](double seg_lo, double seg_hi) {
    if (seg_hi <= seg_lo) return;
    const double c = 0.5 * (seg_hi - seg_lo), mid = 0.5 * (seg_hi + seg_lo);
    const auto& absc = gauss::abscissa();
    const auto& wts = gauss::weights();
    for (std::size_t i = 0; i < absc.size(); ++i) {
      for (int sign = (i == 0 && absc[0] == 0.0) ? 1 : -1; sign <= 1; sign += 2) {
        const double v = mid + sign * c * absc[i];
        const double fw = w_branch * wts[i] * c * gamma_pdf(v, m, a);
        if (fw <= 0.0) continue;
        const TailPartials tp = tail_partials(d, v);
        out.p += fw * tp.p;
        out.e1 += fw * tp.e1;
        out.e2 += fw * tp.e2;
        if (i == 0 && absc[0] == 0.0) break;
      }
    }
  };
  if (shift > lo && shift < hi) {
    // split at the demand shift, where the partial moments have a kink
    segment(lo, shift);
    segment(shift, hi);
  } else {
    segment(lo, hi);
  }
}

inline CrossPartials cross_partials(double v_mean, double v_var, const FittedDistribution& d) {
  CrossPartials out;
  if (v_var <= 0.0) {
    const TailPartials tp = tail_partials(d, v_mean);
    return {tp.p, tp.e1, tp.e2};
  }
  const FittedDistribution vfit = refit_two_moment(v_mean, v_var);
  const BranchMix vb = branch_mix(vfit);  // ladder families carry no shift
  const BranchMix db = branch_mix(d);
  for (int i = 0; i < vb.count; ++i) {
    const double m = static_cast<double>(vb.b[i].n);
    const double a = vb.b[i].rate;
    if (db.shift > 0.0) {
      accumulate_cross_quadrature(vb.b[i].w, m, a, d, db.shift, out);
    } else {
      for (int j = 0; j < db.count; ++j) {
        accumulate_cross_closed(vb.b[i].w * db.b[j].w, db.b[j].n, db.b[j].rate, m, a, out);
      }
    }
  }
  return out;
}

}  // namespace detail

// Forward moment-iteration approximation of P{I~_{t+L} > 0}: propagates two
// moments of the end-of-period inventory through the Lindley recursion with
// replenishments, refitting (I~ + Q) before each demand subtraction. Faster
// than the backward recursion but less accurate.
inline double forward_p3(const PipelineState& state, double q, const FittedDistribution& d) {
  if (q < 0.0) throw std::invalid_argument("forward_p3: q < 0");
  if (is_discrete(d)) {
    throw std::invalid_argument("forward_p3: discrete demand belongs to the exact engines");
  }
  const auto [dm, dv] = moments(d);
  const int L = state.lead_time();
  double v_mean = state.on_hand;
  double v_var = 0.0;
  double p3 = 0.0;
  for (int s = 0; s <= L; ++s) {
    if (s > 0) {
      const double arrival = (s < L) ? state.outstanding[s - 1] : q;
      v_mean += arrival;
    }
    const detail::CrossPartials cp = detail::cross_partials(v_mean, v_var, d);
    p3 = std::clamp(1.0 - cp.p, 0.0, 1.0);
    const double mean_next = std::max(0.0, v_mean - dm + cp.e1);
    const double second_next =
        std::max(0.0, v_var + dv + (v_mean - dm) * (v_mean - dm) - cp.e2);
    v_mean = mean_next;
    v_var = std::max(0.0, second_next - mean_next * mean_next);
  }
  return p3;
}

// Forward-recursion estimate of E[I~_{t+L-1}] (the running mean after the
// last demand step before the candidate order would arrive).
inline double forward_expected_inventory(const PipelineState& state,
                                         const FittedDistribution& d) {
  const auto [dm, dv] = moments(d);
  const int L = state.lead_time();
  double v_mean = state.on_hand;
  double v_var = 0.0;
  double mean_next = 0.0;
  for (int s = 0; s <= L - 1; ++s) {
    if (s > 0) v_mean += state.outstanding[s - 1];
    const detail::CrossPartials cp = detail::cross_partials(v_mean, v_var, d);
    mean_next = std::max(0.0, v_mean - dm + cp.e1);
    const double second_next =
        std::max(0.0, v_var + dv + (v_mean - dm) * (v_mean - dm) - cp.e2);
    v_mean = mean_next;
    v_var = std::max(0.0, second_next - mean_next * mean_next);
  }
  return mean_next;
}

// Backward-recursion approximation of E[I~_{t+L-1}], the expected inventory
// just before the candidate order would arrive. Uses no candidate order: the
// thresholds come from the outstanding orders (newest first) and on-hand
// stock only. Each interval contributes a joint-tail product whose first
// summand mixes a uniform on the interval with the partial demand sum.
inline double pil_expected_inventory(const PipelineState& state, const FittedDistribution& d) {
  const auto [dm, dv] = moments(d);
  const int L = state.lead_time();
  // widths b_1..b_{L-1}: outstanding newest first; b_L: on-hand
  std::vector<double> widths;
  widths.reserve(L);
  for (auto it = state.outstanding.rbegin(); it != state.outstanding.rend(); ++it) {
    widths.push_back(*it);
  }
  widths.push_back(state.on_hand);
  double expected = 0.0;
  for (int k = 1; k <= L; ++k) {
    const double b = widths[k - 1];
    if (b <= 0.0) continue;
    const double z1_mean = 0.5 * b + static_cast<double>(k) * dm;
    const double z1_var = b * b / 12.0 + static_cast<double>(k) * dv;
    const std::span<const double> deltas(widths.data() + (k - 1), widths.size() - (k - 1));
    const double joint = detail::joint_tail_product(deltas, d, dm, dv,
                                                    /*z1_is_demand=*/false, z1_mean, z1_var);
    expected += b * (1.0 - joint);
  }
  return expected;
}

}  // namespace lsinv
