// The five replenishment rules mapping (state, demand distribution) to this
// period's order quantity, plus the constant-order closed forms for shifted
// exponential demand.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <variant>

#include "lsinv/distributions.hpp"
#include "lsinv/exact_engines.hpp"
#include "lsinv/p3_recursion.hpp"
#include "lsinv/pipeline.hpp"

namespace lsinv {

enum class Evaluator { backward, forward, exact_discrete, exact_phase };

inline const char* evaluator_name(Evaluator e) {
  switch (e) {
    case Evaluator::backward: return "backward";
    case Evaluator::forward: return "forward";
    case Evaluator::exact_discrete: return "exact_discrete";
    case Evaluator::exact_phase: return "exact_phase";
  }
  return "?";
}

struct BaseStock {
  double S = 0.0;  // order-up-to level on inventory position
};

struct ConstantOrder {
  double Q = 0.0;
};

struct CappedBaseStock {
  double S = 0.0;
  double q_max = 0.0;
};

struct FixedP3 {
  double target = 0.95;  // P3* in (0,1)
  Evaluator evaluator = Evaluator::backward;
};

struct ProjectedInventoryLevel {
  double target = 0.0;  // expected-inventory target >= 0
  Evaluator evaluator = Evaluator::backward;
};

using Policy =
    std::variant<BaseStock, ConstantOrder, CappedBaseStock, FixedP3, ProjectedInventoryLevel>;

inline const char* policy_name(const Policy& p) {
  struct Visitor {
    const char* operator()(const BaseStock&) const { return "base_stock"; }
    const char* operator()(const ConstantOrder&) const { return "constant_order"; }
    const char* operator()(const CappedBaseStock&) const { return "capped_base_stock"; }
    const char* operator()(const FixedP3&) const { return "fixed_p3"; }
    const char* operator()(const ProjectedInventoryLevel&) const { return "pil"; }
  };
  return std::visit(Visitor{}, p);
}

struct CostParams {
  double h = 1.0;     // holding cost per unit per period
  double p = 9.0;     // penalty cost per unit lost
  int lead_time = 1;  // L >= 1

  void check() const {
    if (!(h > 0.0) || !(p > 0.0) || lead_time < 1) {
      throw std::invalid_argument("CostParams: need h > 0, p > 0, L >= 1");
    }
  }
};

// Per-simulation scratch and diagnostics shared across ordering decisions.
struct OrderContext {
  long phase_fallbacks = 0;  // shift-infeasible decisions rerouted to backward
  PhaseConfig phase_config{};
  std::size_t discrete_support_cap = 100000;
};

namespace detail {

template <typename F>
double bisect_fixed_p3(F&& p3_of, double target, double mean, double q_lo) {
  // bracket: double q_hi from the demand mean until the target is reachable
  if (p3_of(q_lo) >= target) return q_lo;
  double q_hi = std::max(mean, q_lo + mean);
  int guard = 0;
  while (p3_of(q_hi) < target) {
    q_hi *= 2.0;
    if (++guard > 200) {
      throw std::runtime_error("fixed_p3: failed to bracket the target");
    }
  }
  double lo = q_lo, hi = q_hi;
  while (hi - lo > 1e-9 * mean) {
    const double mid = 0.5 * (lo + hi);
    const double p3 = p3_of(mid);
    if (std::abs(p3 - target) <= 1e-6) return mid;
    (p3 < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Smallest integer order reaching the target (continuous bisection is
// meaningless on the integer grid).
inline double fixed_p3_discrete(const PipelineState& state, const FittedDistribution& d,
                                double target, std::size_t cap) {
  const auto* pmf = std::get_if<DiscretePmf>(&d);
  if (!pmf) {
    throw std::invalid_argument("fixed_p3: exact_discrete evaluator needs discrete demand");
  }
  const std::vector<double> proj = project_discrete(state, *pmf, cap);
  const auto p3_of = [&](std::int64_t q) {
    double p3 = 0.0;
    for (std::size_t j = 0; j < proj.size(); ++j) {
      if (proj[j] > 0.0) {
        p3 += proj[j] * cdf(d, static_cast<double>(j) + static_cast<double>(q) - 1.0);
      }
    }
    return p3;
  };
  if (p3_of(0) >= target) return 0.0;
  std::int64_t hi = std::max<std::int64_t>(1, std::llround(mean_of(d)));
  int guard = 0;
  while (p3_of(hi) < target) {
    hi *= 2;
    if (++guard > 62) throw std::runtime_error("fixed_p3: failed to bracket the target");
  }
  std::int64_t lo = 0;  // p3(lo) < target <= p3(hi)
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (p3_of(mid) < target ? lo : hi) = mid;
  }
  return static_cast<double>(hi);
}

inline double fixed_p3_order(const FixedP3& pol, const PipelineState& state,
                             const FittedDistribution& d, OrderContext* ctx) {
  if (!(pol.target > 0.0 && pol.target < 1.0)) {
    throw std::invalid_argument("fixed_p3: target must be in (0,1)");
  }
  const double mean = mean_of(d);
  switch (pol.evaluator) {
    case Evaluator::backward: {
      if (is_discrete(d)) {
        throw std::invalid_argument("fixed_p3: discrete demand belongs to the exact engines");
      }
      // thresholds are fixed across the bisection except the candidate slot
      std::vector<double> deltas;
      p3_deltas(state, 0.0, deltas);
      const auto [dm, dv] = moments(d);
      const auto p3_of = [&](double q) {
        deltas[0] = q;
        return std::clamp(
            1.0 - joint_tail_product(deltas, d, dm, dv, /*z1_is_demand=*/true, 0.0, 0.0),
            0.0, 1.0);
      };
      return bisect_fixed_p3(p3_of, pol.target, mean, 0.0);
    }
    case Evaluator::forward:
      return bisect_fixed_p3([&](double q) { return forward_p3(state, q, d); }, pol.target,
                             mean, 0.0);
    case Evaluator::exact_discrete:
      return fixed_p3_discrete(state, d, pol.target,
                               ctx ? ctx->discrete_support_cap : 100000);
    case Evaluator::exact_phase: {
      const PhaseConfig cfg = ctx ? ctx->phase_config : PhaseConfig{};
      try {
        const PhaseDemand pd = to_phase_demand(d);
        const PhaseProjection proj = project_phase(state, pd, cfg);
        const auto p3_of = [&](double q) { return phase_p3_from_projection(proj, q, pd); };
        if (pd.shift > 0.0 && p3_of(pd.shift) >= pol.target) {
          // the root lies below the shift, outside the transformed system
          throw ShiftInfeasible("fixed_p3: root below the demand shift");
        }
        return bisect_fixed_p3(p3_of, pol.target, mean, pd.shift);
      } catch (const ShiftInfeasible&) {
        if (ctx) ++ctx->phase_fallbacks;
        return bisect_fixed_p3([&](double q) { return backward_p3(state, q, d); }, pol.target,
                               mean, 0.0);
      }
    }
  }
  throw std::logic_error("fixed_p3: unreachable");
}

inline double pil_order(const ProjectedInventoryLevel& pol, const PipelineState& state,
                        const FittedDistribution& d, OrderContext* ctx) {
  if (pol.target < 0.0) throw std::invalid_argument("pil: target must be >= 0");
  switch (pol.evaluator) {
    case Evaluator::backward:
      return std::max(0.0, pol.target - pil_expected_inventory(state, d));
    case Evaluator::forward:
      return std::max(0.0, pol.target - forward_expected_inventory(state, d));
    case Evaluator::exact_discrete: {
      const auto* pmf = std::get_if<DiscretePmf>(&d);
      if (!pmf) {
        throw std::invalid_argument("pil: exact_discrete evaluator needs discrete demand");
      }
      const double e = exact_discrete_expected_inventory(
          state, *pmf, ctx ? ctx->discrete_support_cap : 100000);
      // smallest integer order reaching the target on the integer grid
      return std::max(0.0, std::ceil(pol.target - e - 1e-9));
    }
    case Evaluator::exact_phase: {
      const PhaseConfig cfg = ctx ? ctx->phase_config : PhaseConfig{};
      try {
        const PhaseDemand pd = to_phase_demand(d);
        return std::max(0.0, pol.target - exact_phase_expected_inventory(state, pd, cfg));
      } catch (const ShiftInfeasible&) {
        if (ctx) ++ctx->phase_fallbacks;
        return std::max(0.0, pol.target - pil_expected_inventory(state, d));
      }
    }
  }
  throw std::logic_error("pil: unreachable");
}

}  // namespace detail

// This period's order under a policy. Pure in (policy, state, distribution);
// the context only carries scratch configuration and fallback diagnostics.
inline double order_quantity(const Policy& pol, const PipelineState& state,
                             const FittedDistribution& d, OrderContext* ctx = nullptr) {
  state.check();
  if (const auto* bs = std::get_if<BaseStock>(&pol)) {
    return std::max(0.0, bs->S - state.total_stock());
  }
  if (const auto* co = std::get_if<ConstantOrder>(&pol)) {
    return co->Q;
  }
  if (const auto* cbs = std::get_if<CappedBaseStock>(&pol)) {
    return std::min(std::max(0.0, cbs->S - state.total_stock()), cbs->q_max);
  }
  if (const auto* fp3 = std::get_if<FixedP3>(&pol)) {
    return detail::fixed_p3_order(*fp3, state, d, ctx);
  }
  return detail::pil_order(std::get<ProjectedInventoryLevel>(pol), state, d, ctx);
}

// Closed forms for the optimal constant order under shifted exponential
// demand: optimal quantity, its long-run average cost, and the resulting P3.
struct CoClosedForm {
  double q_star = 0.0;
  double expected_cost = 0.0;
  double p3_star = 0.0;
};

inline CoClosedForm co_closed_form(const CostParams& cp, const DemandMoments& m) {
  if (!(cp.h > 0.0) || cp.p < 0.0) {
    throw std::invalid_argument("co_closed_form: need h > 0 and p >= 0");
  }
  if (!(m.mean > 0.0) || !(m.cv > 0.0) || m.cv > 1.0) {
    throw std::invalid_argument("co_closed_form: shifted exponential fit needs 0 < cv <= 1");
  }
  const double root = std::sqrt(cp.h / (2.0 * cp.p + cp.h));
  CoClosedForm out;
  out.q_star = m.mean * (1.0 - m.cv * root);
  const double sigma = m.cv * m.mean;
  const double shortfall = m.mean - out.q_star;
  const double excess = out.q_star - (m.mean - sigma);
  out.expected_cost = cp.h * excess * excess / (2.0 * shortfall) + cp.p * shortfall;
  out.p3_star = 1.0 - root;
  return out;
}

}  // namespace lsinv
