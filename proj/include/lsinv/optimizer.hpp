// Simulation-based optimization of each policy's parameters under common
// random numbers: golden-section searches for the convex-cost policies, the
// nested grid for the capped base stock, and the optimality-equation
// bisection for the fixed-P3 policy.
//
// Searches run at the short optimization horizon; the returned statistics
// come from a long evaluation run at the chosen parameter. The fixed-P3
// optimality-equation solver additionally refines at the evaluation horizon
// until the returned run itself satisfies the ratio equation.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "lsinv/simulator.hpp"

namespace lsinv {

struct OptimizerConfig {
  CostParams cost{};
  FittedDistribution demand = MixedErlangKm1K{2, 1.0, 1.0};
  std::uint64_t seed = 1;
  std::int64_t opt_horizon = 10000;
  std::int64_t eval_horizon = 1000000;
  std::int64_t opt_warmup = -1;
  std::int64_t eval_warmup = -1;
  Evaluator evaluator = Evaluator::backward;  // used by the FP3/PIL policies
};

struct OptResult {
  double param = 0.0;   // S*, Q*, P3*, or the PIL target
  double param2 = 0.0;  // Qmax* for the capped base stock
  SimStats stats;       // evaluation run at the returned parameters
  int evaluations = 0;  // optimization simulations performed
  bool bracket_warning = false;
};

inline double target_ratio(const CostParams& cp) { return (2.0 * cp.p + cp.h) / cp.h; }

namespace detail {

inline SimConfig sim_config(const OptimizerConfig& cfg, std::int64_t horizon,
                            std::int64_t warmup) {
  SimConfig sc;
  sc.cost = cfg.cost;
  sc.horizon = horizon;
  sc.warmup = warmup;
  sc.seed = cfg.seed;
  sc.demand = cfg.demand;
  return sc;
}

inline SimConfig opt_config(const OptimizerConfig& cfg) {
  // short optimization runs cap the warm-up so a measurement window remains
  // even for the long-lead-time cells
  std::int64_t warmup = cfg.opt_warmup;
  if (warmup < 0) {
    warmup = std::min(default_warmup(cfg.cost.lead_time), cfg.opt_horizon / 5);
  }
  return sim_config(cfg, cfg.opt_horizon, warmup);
}

inline SimConfig eval_config(const OptimizerConfig& cfg) {
  return sim_config(cfg, cfg.eval_horizon, cfg.eval_warmup);
}

struct GoldenResult {
  double x = 0.0;
  double fx = 0.0;
  int evals = 0;
};

// Golden-section minimization of a deterministic (CRN-fixed) cost curve.
template <typename F>
GoldenResult golden_min(F&& f, double lo, double hi, double tol) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  int evals = 2;
  while (b - a > tol && evals < 400) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
    ++evals;
  }
  GoldenResult r;
  r.evals = evals;
  if (f1 <= f2) {
    r.x = x1;
    r.fx = f1;
  } else {
    r.x = x2;
    r.fx = f2;
  }
  return r;
}

// Integer scan exploiting convexity, for discrete demand where fractional
// levels are meaningless. Walks upward until the cost has stopped improving
// for a few consecutive levels.
template <typename F>
GoldenResult integer_scan_min(F&& f, std::int64_t lo, std::int64_t hi) {
  GoldenResult r;
  double best = std::numeric_limits<double>::infinity();
  std::int64_t best_x = lo;
  int since_best = 0;
  for (std::int64_t x = lo; x <= hi; ++x) {
    const double fx = f(static_cast<double>(x));
    ++r.evals;
    if (fx < best) {
      best = fx;
      best_x = x;
      since_best = 0;
    } else if (++since_best >= 3) {
      break;
    }
  }
  r.x = static_cast<double>(best_x);
  r.fx = best;
  return r;
}

inline double base_stock_upper(const OptimizerConfig& cfg) {
  const auto [m, v] = moments(cfg.demand);
  const double cv = std::sqrt(v) / m;
  return (cfg.cost.lead_time + 2) * m * (1.0 + 5.0 * cv);
}

// Local fine-grid polish around a golden-section result. Discrete demand
// turns the cost curves of the target-based policies into fine step
// functions under fixed CRN, and golden section alone can settle in a
// neighbouring dip.
template <typename F>
GoldenResult local_scan(F&& f, GoldenResult g, double lo, double hi, double window,
                        double step) {
  const double a = std::max(lo, g.x - window);
  const double b = std::min(hi, g.x + window);
  for (double x = a; x <= b; x += step) {
    const double fx = f(x);
    ++g.evals;
    if (fx < g.fx) {
      g.fx = fx;
      g.x = x;
    }
  }
  return g;
}

}  // namespace detail

inline OptResult optimize_base_stock(const OptimizerConfig& cfg) {
  const SimConfig oc = detail::opt_config(cfg);
  const auto cost_of = [&](double s) { return simulate(BaseStock{s}, oc).avg_cost; };
  const double mean = mean_of(cfg.demand);
  detail::GoldenResult g;
  if (is_discrete(cfg.demand)) {
    g = detail::integer_scan_min(
        cost_of, 0, static_cast<std::int64_t>(std::ceil(detail::base_stock_upper(cfg))));
  } else {
    g = detail::golden_min(cost_of, 0.0, detail::base_stock_upper(cfg), 1e-3 * mean);
  }
  OptResult r;
  r.param = g.x;
  r.evaluations = g.evals;
  r.stats = simulate(BaseStock{g.x}, detail::eval_config(cfg));
  return r;
}

inline OptResult optimize_constant_order(const OptimizerConfig& cfg) {
  const SimConfig oc = detail::opt_config(cfg);
  const double mean = mean_of(cfg.demand);
  const auto cost_of = [&](double q) { return simulate(ConstantOrder{q}, oc).avg_cost; };
  const detail::GoldenResult g =
      detail::golden_min(cost_of, 0.0, mean * (1.0 - 1e-9), 1e-3 * mean);
  OptResult r;
  r.param = g.x;
  r.evaluations = g.evals;
  r.stats = simulate(ConstantOrder{g.x}, detail::eval_config(cfg));
  return r;
}

// Nested search: grid over the order cap with an inner base-stock search,
// then a halving local refinement around the best cap. The grid carries an
// uncapped sentinel so the result never loses to the plain base stock.
inline OptResult optimize_cbs(const OptimizerConfig& cfg) {
  const SimConfig oc = detail::opt_config(cfg);
  const double mean = mean_of(cfg.demand);
  const double s_hi = detail::base_stock_upper(cfg);
  int evals = 0;
  const auto inner = [&](double q_max) {
    const auto cost_of = [&](double s) {
      return simulate(CappedBaseStock{s, q_max}, oc).avg_cost;
    };
    detail::GoldenResult g;
    if (is_discrete(cfg.demand)) {
      g = detail::integer_scan_min(cost_of, 0, static_cast<std::int64_t>(std::ceil(s_hi)));
    } else {
      g = detail::golden_min(cost_of, 0.0, s_hi, 1e-3 * mean);
    }
    evals += g.evals;
    return g;
  };

  double best_qmax = std::numeric_limits<double>::infinity();
  detail::GoldenResult best = inner(best_qmax);  // uncapped sentinel
  for (int i = 1; i <= 30; ++i) {
    const double q_max = 0.05 * static_cast<double>(i) * mean;
    const detail::GoldenResult g = inner(q_max);
    if (g.fx < best.fx) {
      best = g;
      best_qmax = q_max;
    }
  }
  if (std::isfinite(best_qmax)) {
    for (double step = 0.025 * mean; step >= 0.01 * mean; step /= 2.0) {
      for (const double cand : {best_qmax - step, best_qmax + step}) {
        if (cand <= 0.0) continue;
        const detail::GoldenResult g = inner(cand);
        if (g.fx < best.fx) {
          best = g;
          best_qmax = cand;
        }
      }
    }
  }
  OptResult r;
  r.param = best.x;
  r.param2 = best_qmax;
  r.evaluations = evals;
  r.stats = simulate(CappedBaseStock{best.x, best_qmax}, detail::eval_config(cfg));
  return r;
}

enum class Fp3Mode { optimality_eq, cost_search };

inline OptResult optimize_fp3(const OptimizerConfig& cfg, Fp3Mode mode) {
  constexpr double kLo = 0.5, kHi = 0.9999;
  const SimConfig oc = detail::opt_config(cfg);
  OptResult r;

  if (mode == Fp3Mode::cost_search) {
    const auto cost_of = [&](double target) {
      return simulate(FixedP3{target, cfg.evaluator}, oc).avg_cost;
    };
    detail::GoldenResult g = detail::golden_min(cost_of, kLo, kHi, 5e-4);
    if (is_discrete(cfg.demand)) {
      g = detail::local_scan(cost_of, g, kLo, kHi, 0.02, 5e-4);
    }
    r.param = g.x;
    r.evaluations = g.evals;
    r.stats = simulate(FixedP3{g.x, cfg.evaluator}, detail::eval_config(cfg));
    return r;
  }

  if (is_discrete(cfg.demand)) {
    throw std::invalid_argument(
        "optimize_fp3: the optimality equation needs continuous demand; use cost_search");
  }
  const double ratio_target = target_ratio(cfg.cost);
  // ratio relative to target, with too-few-stockouts read as "P3 too high"
  const auto ratio_err = [&](double target, const SimConfig& sc, SimStats* out) {
    const SimStats s = simulate(FixedP3{target, cfg.evaluator}, sc);
    if (out) *out = s;
    ++r.evaluations;
    try {
      return optimality_ratio(s) / ratio_target - 1.0;
    } catch (const InsufficientStockouts&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  // bracket from the constant-order closed form, which shares the target P3
  const double guess = 1.0 - std::sqrt(cfg.cost.h / (2.0 * cfg.cost.p + cfg.cost.h));
  double lo = std::clamp(guess - 0.15, kLo, kHi);
  double hi = std::clamp(guess + 0.15, kLo, kHi);
  double err_lo = ratio_err(lo, oc, nullptr);
  double err_hi = ratio_err(hi, oc, nullptr);
  if (err_lo > 0.0 || err_hi < 0.0) {
    lo = kLo;
    hi = kHi;
    err_lo = ratio_err(lo, oc, nullptr);
    err_hi = ratio_err(hi, oc, nullptr);
  }
  double mid = 0.5 * (lo + hi);
  if (err_lo > 0.0) {
    // ratio above target across the whole range: lowest P3 is the best root
    r.bracket_warning = true;
    mid = lo;
  } else if (err_hi < 0.0) {
    r.bracket_warning = true;
    mid = hi;
  } else {
    while (hi - lo > 5e-4) {
      mid = 0.5 * (lo + hi);
      const double err = ratio_err(mid, oc, nullptr);
      if (std::abs(err) <= 0.02) break;
      (err < 0.0 ? lo : hi) = mid;
      mid = 0.5 * (lo + hi);
    }
  }

  // refine at the evaluation horizon until the returned run itself satisfies
  // the equation within tolerance
  const SimConfig ec = detail::eval_config(cfg);
  SimStats stats;
  double err = ratio_err(mid, ec, &stats);
  if (std::isfinite(err) && std::abs(err) > 0.02) {
    double rlo = mid, rhi = mid, erl = err, erh = err;
    for (double width : {0.02, 0.08, 0.3}) {
      if (erl > 0.0) {
        rlo = std::clamp(mid - width, kLo, kHi);
        erl = ratio_err(rlo, ec, nullptr);
      }
      if (erh < 0.0) {
        rhi = std::clamp(mid + width, kLo, kHi);
        erh = ratio_err(rhi, ec, nullptr);
      }
      if (erl <= 0.0 && erh >= 0.0) break;
    }
    if (erl <= 0.0 && erh >= 0.0) {
      for (int i = 0; i < 12 && std::abs(err) > 0.02; ++i) {
        const double m2 = 0.5 * (rlo + rhi);
        SimStats s2;
        const double e2 = ratio_err(m2, ec, &s2);
        if (!std::isfinite(e2)) {
          rhi = m2;
          continue;
        }
        mid = m2;
        stats = s2;
        err = e2;
        (e2 < 0.0 ? rlo : rhi) = m2;
      }
    }
    if (std::abs(err) > 0.02) r.bracket_warning = true;
  } else if (!std::isfinite(err)) {
    r.bracket_warning = true;
  }
  r.param = mid;
  r.stats = stats;
  return r;
}

inline OptResult optimize_pil(const OptimizerConfig& cfg) {
  const SimConfig oc = detail::opt_config(cfg);
  const double mean = mean_of(cfg.demand);
  const double hi = (cfg.cost.lead_time + 1) * mean;
  const auto cost_of = [&](double target) {
    return simulate(ProjectedInventoryLevel{target, cfg.evaluator}, oc).avg_cost;
  };
  detail::GoldenResult g = detail::golden_min(cost_of, 0.0, hi, 1e-3 * mean);
  if (is_discrete(cfg.demand)) {
    g = detail::local_scan(cost_of, g, 0.0, hi, 0.25 * mean, 1e-3 * mean);
  }
  OptResult r;
  r.param = g.x;
  r.evaluations = g.evals;
  r.stats = simulate(ProjectedInventoryLevel{g.x, cfg.evaluator}, detail::eval_config(cfg));
  return r;
}

// Heuristic fixed-P3 target: the realized P3 of the better of the optimal
// base-stock and constant-order policies (base stock on ties).
struct HeuristicTarget {
  double target = 0.0;
  bool from_base_stock = true;
  OptResult base_stock;
  OptResult constant_order;
};

inline HeuristicTarget fp3_heuristic_target(const OptimizerConfig& cfg) {
  HeuristicTarget h;
  h.base_stock = optimize_base_stock(cfg);
  h.constant_order = optimize_constant_order(cfg);
  h.from_base_stock = h.base_stock.stats.avg_cost <= h.constant_order.stats.avg_cost;
  const SimStats& s = h.from_base_stock ? h.base_stock.stats : h.constant_order.stats;
  h.target = std::clamp(s.realized_p3, 0.01, 0.9999);
  return h;
}

}  // namespace lsinv
