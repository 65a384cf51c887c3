// Discrete-event simulation of the lost-sales system under any policy, with
// a pre-generated demand stream per (seed, horizon) so every policy sees the
// same realizations, warm-up handling, cost accounting, and the
// stockout-interval statistics behind the optimality-equation criterion.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lsinv/policies.hpp"

namespace lsinv {

struct SimConfig {
  CostParams cost{};
  std::int64_t horizon = 100000;
  std::int64_t warmup = -1;  // < 0: pick the default for the lead time
  std::uint64_t seed = 1;
  FittedDistribution demand = MixedErlangKm1K{2, 1.0, 1.0};
};

// Warm-up long enough for the slow-mixing long-lead-time cells.
inline std::int64_t default_warmup(int lead_time) { return lead_time <= 16 ? 2000 : 10000; }

struct SimStats {
  double avg_cost = 0.0;
  double avg_end_inventory = 0.0;
  double lost_fraction = 0.0;  // (mean demand - mean order) / mean demand, realized
  double realized_p3 = 0.0;
  double order_mean = 0.0;
  double order_cv = 0.0;
  double t_mean = 0.0;  // sample E[T] over complete stockout intervals
  double t_msq = 0.0;   // sample E[T^2]
  std::int64_t n_stockouts = 0;
  std::int64_t n_intervals = 0;
  double demand_mean = 0.0;
  double avg_lost = 0.0;
  long evaluator_fallbacks = 0;
  bool stationarity_warning = false;
  // whole-run flow totals (including warm-up), for conservation checks
  double total_received = 0.0;
  double total_ordered = 0.0;
  double total_demand = 0.0;
  double total_lost = 0.0;
  double initial_stock = 0.0;
  double final_end_inventory = 0.0;
  double final_system_stock = 0.0;
};

// Demand stream for a (seed, horizon) pair; decoupled from policy decisions
// so comparisons across policies ride on common random numbers.
inline std::vector<double> generate_demand(const FittedDistribution& d, std::int64_t horizon,
                                           std::uint64_t seed) {
  RandomStream rs(seed);
  std::vector<double> out(static_cast<std::size_t>(horizon));
  for (double& x : out) x = sample(d, rs);
  return out;
}

inline SimStats simulate(const Policy& pol, const SimConfig& cfg) {
  cfg.cost.check();
  const std::int64_t warmup =
      cfg.warmup >= 0 ? cfg.warmup : default_warmup(cfg.cost.lead_time);
  if (cfg.horizon <= warmup) {
    throw std::invalid_argument("simulate: horizon must exceed warm-up");
  }
  const int L = cfg.cost.lead_time;
  const bool discrete = is_discrete(cfg.demand);
  const std::vector<double> demand = generate_demand(cfg.demand, cfg.horizon, cfg.seed);
  const double demand_mean_analytic = mean_of(cfg.demand);

  OrderContext ctx;
  // start with one mean of stock on hand and an empty-equivalent pipeline
  double init_on_hand = demand_mean_analytic;
  if (discrete) init_on_hand = std::round(init_on_hand);
  std::vector<double> ring(static_cast<std::size_t>(L), 0.0);  // next L arrivals, soonest first
  std::size_t ring_head = 0;
  double end_inv = init_on_hand;  // I~ of the previous period; arrivals add to it

  PipelineState st;
  st.outstanding.resize(static_cast<std::size_t>(L) - 1);

  SimStats stats;
  stats.initial_stock = init_on_hand;
  const double h = cfg.cost.h, p = cfg.cost.p;

  double cost_sum = 0.0, inv_sum = 0.0, lost_sum = 0.0, d_sum = 0.0;
  double q_sum = 0.0, q_sq = 0.0;
  double t_sum = 0.0, t_sq = 0.0;
  std::int64_t positive_end = 0;
  std::int64_t prev_epoch = -1;
  const std::int64_t measured = cfg.horizon - warmup;
  const std::int64_t decile_mark = warmup + (measured * 9) / 10;
  double cost_sum_at_mark = 0.0;

  for (std::int64_t t = 0; t < cfg.horizon; ++t) {
    // arrival of the order placed L periods ago
    const double arrival = ring[ring_head];
    const double on_hand = end_inv + arrival;
    stats.total_received += arrival;
    // ordering decision on the post-arrival state
    for (int i = 0; i + 1 < L; ++i) {
      st.outstanding[static_cast<std::size_t>(i)] =
          ring[(ring_head + 1 + static_cast<std::size_t>(i)) % ring.size()];
    }
    st.on_hand = on_hand;
    const double q = order_quantity(pol, st, cfg.demand, &ctx);
    stats.total_ordered += q;
    ring[ring_head] = q;
    ring_head = (ring_head + 1) % ring.size();
    // demand, truncation, accounting
    const double dt = demand[static_cast<std::size_t>(t)];
    const double next_end = std::max(on_hand - dt, 0.0);
    const double lost = std::max(dt - on_hand, 0.0);
    stats.total_demand += dt;
    stats.total_lost += lost;
    if (t >= warmup) {
      cost_sum += h * next_end + p * lost;
      inv_sum += next_end;
      lost_sum += lost;
      d_sum += dt;
      q_sum += q;
      q_sq += q * q;
      const bool stockout = discrete ? (lost > 0.0) : (next_end <= 0.0);
      if (!stockout) ++positive_end;
      if (stockout) {
        ++stats.n_stockouts;
        if (prev_epoch >= 0) {
          const double interval = static_cast<double>(t - prev_epoch);
          t_sum += interval;
          t_sq += interval * interval;
          ++stats.n_intervals;
        }
        prev_epoch = t;
      }
      if (t + 1 == decile_mark) cost_sum_at_mark = cost_sum;
    }
    end_inv = next_end;
  }

  const auto n = static_cast<double>(measured);
  stats.avg_cost = cost_sum / n;
  stats.avg_end_inventory = inv_sum / n;
  stats.avg_lost = lost_sum / n;
  stats.demand_mean = d_sum / n;
  stats.order_mean = q_sum / n;
  const double q_var = std::max(0.0, q_sq / n - stats.order_mean * stats.order_mean);
  stats.order_cv = stats.order_mean > 0.0 ? std::sqrt(q_var) / stats.order_mean : 0.0;
  stats.lost_fraction =
      stats.demand_mean > 0.0 ? (stats.demand_mean - stats.order_mean) / stats.demand_mean : 0.0;
  stats.realized_p3 = static_cast<double>(positive_end) / n;
  if (stats.n_intervals > 0) {
    stats.t_mean = t_sum / static_cast<double>(stats.n_intervals);
    stats.t_msq = t_sq / static_cast<double>(stats.n_intervals);
  }
  stats.evaluator_fallbacks = ctx.phase_fallbacks;
  stats.final_end_inventory = end_inv;
  double final_stock = end_inv;
  for (double r : ring) final_stock += r;  // the last L orders are still in flight
  stats.final_system_stock = final_stock;
  // stationarity screen: running mean over the first nine deciles vs the full window
  if (measured >= 10) {
    const double m90 = cost_sum_at_mark / static_cast<double>(decile_mark - warmup);
    const double mall = stats.avg_cost;
    if (std::abs(mall) > 1e-12 && std::abs(mall - m90) / std::abs(mall) > 0.005) {
      stats.stationarity_warning = true;
    }
  }
  return stats;
}

struct InsufficientStockouts : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sample analog of E[T^2]/E[T]; equals (2p+h)/h at the cost-optimal policy.
inline double optimality_ratio(const SimStats& stats) {
  if (stats.n_stockouts < 2 || stats.n_intervals < 1) {
    throw InsufficientStockouts("optimality_ratio: need at least two stockouts");
  }
  return stats.t_msq / stats.t_mean;
}

}  // namespace lsinv
