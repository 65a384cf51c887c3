// Experiment harness: the benchmark suites (Zipkin, Xin, the extensive grid,
// the distribution-sensitivity study), the P3 lookup-table generator, CSV
// emission with resumable cells, and the JSON run manifest.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "lsinv/optimizer.hpp"

namespace lsinv::harness {

inline constexpr int kSchemaVersion = 1;

struct Cell {
  std::string suite;
  std::uint64_t cell_id = 0;
  Family family = Family::mixed_erlang_km1k;
  double mean = 10.0;
  double cv = 1.0;
  double p = 9.0;
  double h = 1.0;
  int lead_time = 1;
  Evaluator evaluator = Evaluator::backward;
  Fp3Mode fp3_mode = Fp3Mode::optimality_eq;

  std::string key() const {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s|%llu|%s|%.10g|%.10g|%.10g|%.10g|%d|%s",
                  suite.c_str(), static_cast<unsigned long long>(cell_id),
                  family_name(family), mean, cv, p, h, lead_time,
                  evaluator_name(evaluator));
    return buf;
  }

  FittedDistribution make_demand() const {
    if (family == Family::discrete_pmf) {
      throw std::invalid_argument("Cell: discrete demand needs an explicit constructor tag");
    }
    return fit_two_moment({mean, cv}, family);
  }
};

// Demand construction for the discrete benchmark suites.
struct DiscreteCell : Cell {
  bool geometric = false;
};

struct RunOptions {
  std::uint64_t seed = 20240817;
  std::int64_t opt_horizon = 10000;
  std::int64_t eval_horizon = 1000000;
  std::int64_t warmup = -1;
  int threads = 0;  // 0: hardware concurrency
  std::vector<std::string> policies;  // empty: suite default set
  std::optional<Evaluator> evaluator_override;
  std::string scale = "desk";
};

struct ResultRow {
  Cell cell;
  std::string demand_kind;  // family or poisson/geometric
  std::string policy;
  std::string evaluator;
  double param1 = 0.0;
  double param2 = 0.0;
  SimStats stats;
  std::uint64_t cell_seed = 0;
  std::int64_t opt_horizon = 0;
  std::int64_t eval_horizon = 0;
  std::int64_t warmup = -1;
  std::string status = "ok";
  std::string message;
};

namespace detail {

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hash_hex(const std::string& s) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(s)));
  return buf;
}

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace detail

inline std::string csv_header() {
  return "suite,cell_id,cell_hash,demand,mean,cv,p,h,L,policy,evaluator,"
         "param1,param2,avg_cost,avg_end_inventory,lost_fraction,realized_p3,"
         "order_mean,order_cv,t_mean,t_msq,n_stockouts,fallbacks,stationarity_warning,"
         "seed,opt_horizon,eval_horizon,warmup,status,message";
}

inline std::string to_csv(const ResultRow& rr) {
  using detail::fmt;
  ResultRow r = rr;
  for (char& c : r.message) {
    if (c == ',' || c == '\n') c = ';';
  }
  std::ostringstream os;
  os << r.cell.suite << ',' << r.cell.cell_id << ',' << detail::hash_hex(r.cell.key()) << ','
     << r.demand_kind << ',' << fmt(r.cell.mean) << ',' << fmt(r.cell.cv) << ','
     << fmt(r.cell.p) << ',' << fmt(r.cell.h) << ',' << r.cell.lead_time << ',' << r.policy
     << ',' << r.evaluator << ',' << fmt(r.param1) << ',' << fmt(r.param2) << ','
     << fmt(r.stats.avg_cost) << ',' << fmt(r.stats.avg_end_inventory) << ','
     << fmt(r.stats.lost_fraction) << ',' << fmt(r.stats.realized_p3) << ','
     << fmt(r.stats.order_mean) << ',' << fmt(r.stats.order_cv) << ','
     << fmt(r.stats.t_mean) << ',' << fmt(r.stats.t_msq) << ',' << r.stats.n_stockouts << ','
     << r.stats.evaluator_fallbacks << ',' << (r.stats.stationarity_warning ? 1 : 0) << ','
     << r.cell_seed << ',' << r.opt_horizon << ',' << r.eval_horizon << ',' << r.warmup
     << ',' << r.status << ',' << r.message;
  return os.str();
}

// --- suite construction -------------------------------------------------------

// Zipkin (2008) benchmark: Poisson and geometric demand with mean 5,
// p in {4,9,19,39}, L in {1,2,3,4}, h = 1, exact discrete evaluators.
inline std::vector<DiscreteCell> zipkin_cells() {
  std::vector<DiscreteCell> cells;
  std::uint64_t id = 0;
  for (const bool geometric : {false, true}) {
    for (const double p : {4.0, 9.0, 19.0, 39.0}) {
      for (const int L : {1, 2, 3, 4}) {
        DiscreteCell c;
        c.suite = "zipkin";
        c.cell_id = id++;
        c.family = Family::discrete_pmf;
        c.geometric = geometric;
        c.mean = 5.0;
        c.cv = geometric ? std::sqrt(30.0) / 5.0 : 1.0 / std::sqrt(5.0);
        c.p = p;
        c.h = 1.0;
        c.lead_time = L;
        c.evaluator = Evaluator::exact_discrete;
        c.fp3_mode = Fp3Mode::cost_search;
        cells.push_back(c);
      }
    }
  }
  return cells;
}

// Xin (2021) extension of the Zipkin cases to L in {6, 8, 10}.
inline std::vector<DiscreteCell> xin_cells() {
  std::vector<DiscreteCell> cells;
  std::uint64_t id = 0;
  for (const bool geometric : {false, true}) {
    for (const double p : {4.0, 9.0, 19.0, 39.0}) {
      for (const int L : {6, 8, 10}) {
        DiscreteCell c;
        c.suite = "xin";
        c.cell_id = id++;
        c.family = Family::discrete_pmf;
        c.geometric = geometric;
        c.mean = 5.0;
        c.cv = geometric ? std::sqrt(30.0) / 5.0 : 1.0 / std::sqrt(5.0);
        c.p = p;
        c.h = 1.0;
        c.lead_time = L;
        c.evaluator = Evaluator::exact_discrete;
        c.fp3_mode = Fp3Mode::cost_search;
        cells.push_back(c);
      }
    }
  }
  return cells;
}

// Extensive continuous-demand experiment. Full scale follows the paper's
// design (336 cells); desk scale is the documented 48-cell subsample.
inline std::vector<Cell> grid_cells(const std::string& scale) {
  std::vector<double> ps, cvs;
  std::vector<int> ls;
  if (scale == "full") {
    ps = {4, 9, 19, 49, 99, 199};
    ls = {1, 2, 4, 8, 16, 32, 64};
    cvs = {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
  } else if (scale == "desk") {
    ps = {4, 19, 199};
    ls = {1, 4, 16, 64};
    cvs = {0.25, 1.0, 1.5, 2.0};
  } else {
    throw std::invalid_argument("grid_cells: scale must be desk or full");
  }
  std::vector<Cell> cells;
  std::uint64_t id = 0;
  for (double p : ps) {
    for (int L : ls) {
      for (double cv : cvs) {
        Cell c;
        c.suite = "grid";
        c.cell_id = id++;
        c.family = cv <= 1.0 ? Family::mixed_erlang_km1k : Family::hyperexponential;
        c.mean = 10.0;
        c.cv = cv;
        c.p = p;
        c.h = 1.0;
        c.lead_time = L;
        c.evaluator = Evaluator::backward;
        c.fp3_mode = Fp3Mode::optimality_eq;
        cells.push_back(c);
      }
    }
  }
  return cells;
}

// Distribution-sensitivity study: matched-moment families per cell. The
// shifted-exponential and single-rate mixtures run on the exact phase
// engine, the hyperexponential on the backward recursion.
inline std::vector<Cell> sensitivity_cells(const std::string& scale) {
  std::vector<double> ps, cvs;
  std::vector<int> ls;
  if (scale == "full") {
    ps = {4, 19, 99};
    ls = {1, 2, 4, 6, 8, 10};
    cvs = {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
  } else {
    ps = {4, 19};
    ls = {1, 2};
    cvs = {0.5, 1.0, 1.5};
  }
  std::vector<Cell> cells;
  std::uint64_t id = 0;
  for (double p : ps) {
    for (int L : ls) {
      for (double cv : cvs) {
        const std::vector<Family> fams =
            cv <= 1.0
                ? std::vector<Family>{Family::mixed_erlang_km1k, Family::shifted_exponential}
                : std::vector<Family>{Family::mixed_erlang_1k, Family::hyperexponential};
        for (Family f : fams) {
          Cell c;
          c.suite = "sensitivity";
          c.cell_id = id++;
          c.family = f;
          c.mean = 10.0;
          c.cv = cv;
          c.p = p;
          c.h = 1.0;
          c.lead_time = L;
          c.evaluator =
              f == Family::hyperexponential ? Evaluator::backward : Evaluator::exact_phase;
          c.fp3_mode = Fp3Mode::optimality_eq;
          cells.push_back(c);
        }
      }
    }
  }
  return cells;
}

// --- per-cell execution --------------------------------------------------------

inline std::vector<std::string> default_policy_set(const std::string& suite) {
  if (suite == "zipkin" || suite == "xin") {
    return {"fixed_p3", "pil", "base_stock", "constant_order", "capped_base_stock"};
  }
  if (suite == "sensitivity") return {"fixed_p3", "pil"};
  if (suite == "table") return {"fixed_p3"};
  return {"fixed_p3", "fp3_heuristic", "pil", "base_stock", "constant_order",
          "capped_base_stock"};
}

inline FittedDistribution cell_demand(const Cell& cell, const DiscreteCell* dc) {
  if (dc) {
    return FittedDistribution{dc->geometric ? geometric_pmf(dc->mean)
                                            : poisson_pmf(dc->mean)};
  }
  return cell.make_demand();
}

// Runs the requested policies on one cell; failures are recorded per policy
// and never abort the cell batch.
inline std::vector<ResultRow> run_cell(const Cell& cell, const DiscreteCell* dc,
                                       const RunOptions& opt,
                                       const std::vector<std::string>& policies) {
  OptimizerConfig cfg;
  cfg.cost = {cell.h, cell.p, cell.lead_time};
  cfg.demand = cell_demand(cell, dc);
  cfg.seed = RandomStream::derive_seed(opt.seed, detail::fnv1a64(cell.key()));
  cfg.opt_horizon = opt.opt_horizon;
  cfg.eval_horizon = opt.eval_horizon;
  cfg.opt_warmup = opt.warmup;
  cfg.eval_warmup = opt.warmup;
  cfg.evaluator = opt.evaluator_override.value_or(cell.evaluator);

  std::vector<ResultRow> rows;
  std::optional<OptResult> bs_cache, co_cache;
  const auto bs_result = [&]() -> const OptResult& {
    if (!bs_cache) bs_cache = optimize_base_stock(cfg);
    return *bs_cache;
  };
  const auto co_result = [&]() -> const OptResult& {
    if (!co_cache) co_cache = optimize_constant_order(cfg);
    return *co_cache;
  };

  for (const std::string& pol : policies) {
    ResultRow row;
    row.cell = cell;
    row.demand_kind = dc ? (dc->geometric ? "geometric" : "poisson")
                         : family_name(cell.family);
    row.policy = pol;
    row.evaluator = (pol == "fixed_p3" || pol == "fp3_heuristic" || pol == "pil")
                        ? evaluator_name(cfg.evaluator)
                        : "none";
    row.cell_seed = cfg.seed;
    row.opt_horizon = cfg.opt_horizon;
    row.eval_horizon = cfg.eval_horizon;
    row.warmup = opt.warmup;
    try {
      if (pol == "base_stock") {
        const OptResult& r = bs_result();
        row.param1 = r.param;
        row.stats = r.stats;
      } else if (pol == "constant_order") {
        const OptResult& r = co_result();
        row.param1 = r.param;
        row.stats = r.stats;
      } else if (pol == "capped_base_stock") {
        const OptResult r = optimize_cbs(cfg);
        row.param1 = r.param;
        row.param2 = r.param2;
        row.stats = r.stats;
      } else if (pol == "fixed_p3") {
        const OptResult r = optimize_fp3(cfg, cell.fp3_mode);
        row.param1 = r.param;
        row.stats = r.stats;
        if (r.bracket_warning) row.message = "bracket_warning";
      } else if (pol == "fp3_heuristic") {
        HeuristicTarget h;
        h.base_stock = bs_result();
        h.constant_order = co_result();
        h.from_base_stock =
            h.base_stock.stats.avg_cost <= h.constant_order.stats.avg_cost;
        const SimStats& src =
            h.from_base_stock ? h.base_stock.stats : h.constant_order.stats;
        h.target = std::clamp(src.realized_p3, 0.01, 0.9999);
        row.param1 = h.target;
        row.stats = simulate(FixedP3{h.target, cfg.evaluator}, lsinv::detail::eval_config(cfg));
        row.message =
            h.from_base_stock ? "target_from=base_stock" : "target_from=constant_order";
      } else if (pol == "pil") {
        const OptResult r = optimize_pil(cfg);
        row.param1 = r.param;
        row.stats = r.stats;
      } else {
        throw std::invalid_argument("unknown policy: " + pol);
      }
    } catch (const std::exception& e) {
      row.status = "error";
      row.message = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// --- suite runner ---------------------------------------------------------------

struct SuiteOutcome {
  std::vector<ResultRow> rows;
  int cells_run = 0;
  int cells_skipped = 0;
  int errors = 0;
  std::string out_path;
};

namespace detail {

inline std::set<std::string> completed_keys(const std::string& path) {
  std::set<std::string> done;
  std::ifstream in(path);
  if (!in) return done;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    // columns: suite,cell_id,cell_hash,...  policy is column 9 (0-based)
    std::vector<std::string> parts;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',') && parts.size() < 11) parts.push_back(tok);
    if (parts.size() >= 10) done.insert(parts[2] + "/" + parts[9]);
  }
  return done;
}

inline void write_manifest(const std::string& out_path, const std::string& suite,
                           const RunOptions& opt, std::size_t n_cells,
                           const std::string& content_hash) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["suite"] = suite;
  j["seed"] = opt.seed;
  j["opt_horizon"] = opt.opt_horizon;
  j["eval_horizon"] = opt.eval_horizon;
  j["warmup"] = opt.warmup;
  j["scale"] = opt.scale;
  j["policies"] = opt.policies;
  j["cells"] = n_cells;
  j["content_hash"] = content_hash;
  std::ofstream out(out_path + ".manifest.json");
  out << j.dump(2) << "\n";
}

}  // namespace detail

// Executes a batch of cells on a small worker pool; rows flush to the CSV in
// cell order, completed (cell, policy) pairs from a previous run are skipped,
// and the first complete run is copied aside as the regression baseline.
template <typename CellT>
SuiteOutcome run_suite(const std::string& suite, const std::vector<CellT>& cells,
                       const RunOptions& opt, const std::string& out_path) {
  const std::vector<std::string> policies =
      opt.policies.empty() ? default_policy_set(suite) : opt.policies;

  std::string config_digest = suite + "|" + std::to_string(opt.seed) + "|" +
                              std::to_string(opt.opt_horizon) + "|" +
                              std::to_string(opt.eval_horizon);
  for (const auto& c : cells) config_digest += "|" + c.key();
  const std::set<std::string> done = detail::completed_keys(out_path);

  SuiteOutcome outcome;
  outcome.out_path = out_path;
  const bool fresh = done.empty();
  std::ofstream out(out_path, fresh ? std::ios::trunc : std::ios::app);
  if (!out) throw std::runtime_error("run_suite: cannot open " + out_path);
  if (fresh) out << csv_header() << "\n";

  std::vector<std::vector<ResultRow>> results(cells.size());
  std::vector<char> cell_done(cells.size(), 0);
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t flushed = 0;

  const auto flush_ready = [&]() {
    while (flushed < cells.size() && cell_done[flushed]) {
      for (const ResultRow& r : results[flushed]) {
        out << to_csv(r) << "\n";
        outcome.rows.push_back(r);
        if (r.status != "ok") ++outcome.errors;
      }
      out.flush();
      ++flushed;
    }
  };

  const auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const Cell& cell = cells[i];
      const DiscreteCell* dc = nullptr;
      if constexpr (std::is_same_v<CellT, DiscreteCell>) dc = &cells[i];
      std::vector<std::string> todo;
      const std::string hash = detail::hash_hex(cell.key());
      for (const std::string& pol : policies) {
        if (!done.count(hash + "/" + pol)) todo.push_back(pol);
      }
      std::vector<ResultRow> rows;
      if (!todo.empty()) rows = run_cell(cell, dc, opt, todo);
      std::lock_guard<std::mutex> lk(mu);
      if (todo.empty()) {
        ++outcome.cells_skipped;
      } else {
        ++outcome.cells_run;
      }
      results[i] = std::move(rows);
      cell_done[i] = 1;
      flush_ready();
    }
  };

  const int n_threads = opt.threads > 0
                            ? opt.threads
                            : std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  {
    std::lock_guard<std::mutex> lk(mu);
    flush_ready();
  }
  out.close();

  detail::write_manifest(out_path, suite, opt, cells.size(),
                         detail::hash_hex(config_digest));
  // first complete run becomes the regression baseline
  const std::string baseline = out_path + ".baseline.csv";
  if (outcome.errors == 0 && !std::ifstream(baseline)) {
    std::ifstream src(out_path, std::ios::binary);
    std::ofstream dst(baseline, std::ios::binary);
    dst << src.rdbuf();
  }
  return outcome;
}

// Reads result rows back from a CSV produced by run_suite (the fields the
// summaries and acceptance checks need).
inline std::vector<ResultRow> load_result_rows(const std::string& path) {
  std::vector<ResultRow> rows;
  std::ifstream in(path);
  if (!in) return rows;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() < 29) continue;
    ResultRow r;
    r.cell.suite = f[0];
    r.cell.cell_id = std::stoull(f[1]);
    r.demand_kind = f[3];
    r.cell.mean = std::stod(f[4]);
    r.cell.cv = std::stod(f[5]);
    r.cell.p = std::stod(f[6]);
    r.cell.h = std::stod(f[7]);
    r.cell.lead_time = std::stoi(f[8]);
    r.policy = f[9];
    r.evaluator = f[10];
    r.param1 = std::stod(f[11]);
    r.param2 = std::stod(f[12]);
    r.stats.avg_cost = std::stod(f[13]);
    r.stats.avg_end_inventory = std::stod(f[14]);
    r.stats.lost_fraction = std::stod(f[15]);
    r.stats.realized_p3 = std::stod(f[16]);
    r.stats.order_mean = std::stod(f[17]);
    r.stats.order_cv = std::stod(f[18]);
    r.stats.t_mean = std::stod(f[19]);
    r.stats.t_msq = std::stod(f[20]);
    r.stats.n_stockouts = std::stoll(f[21]);
    r.status = f[28];
    rows.push_back(std::move(r));
  }
  return rows;
}

// Per-cell digest of a grid-style run: the winning policy and the fixed-P3
// gap against the best competitor.
inline void write_grid_summary(const SuiteOutcome& oc, const std::string& path) {
  std::map<std::tuple<double, double, int>, std::vector<const ResultRow*>> cells;
  for (const ResultRow& r : oc.rows) {
    if (r.status == "ok") {
      cells[{r.cell.p, r.cell.cv, r.cell.lead_time}].push_back(&r);
    }
  }
  std::ofstream out(path);
  out << "p,cv,L,winner,best_cost,fp3_cost,fp3_gap_vs_best,fp3_order_cv,fp3_realized_p3\n";
  for (const auto& [key, rows] : cells) {
    const ResultRow* best = nullptr;
    const ResultRow* fp3 = nullptr;
    for (const ResultRow* r : rows) {
      if (r->policy == "fixed_p3") fp3 = r;
      if (!best || r->stats.avg_cost < best->stats.avg_cost) best = r;
    }
    if (!best) continue;
    const auto& [p, cv, L] = key;
    out << detail::fmt(p) << ',' << detail::fmt(cv) << ',' << L << ',' << best->policy
        << ',' << detail::fmt(best->stats.avg_cost) << ','
        << detail::fmt(fp3 ? fp3->stats.avg_cost : 0.0) << ','
        << detail::fmt(fp3 ? fp3->stats.avg_cost / best->stats.avg_cost - 1.0 : 0.0) << ','
        << detail::fmt(fp3 ? fp3->stats.order_cv : 0.0) << ','
        << detail::fmt(fp3 ? fp3->stats.realized_p3 : 0.0) << "\n";
  }
}

// Sensitivity digest: optimal-P3 spread across the matched-moment families
// and a flag for cells where the PIL policy beats the fixed-P3 policy.
inline void write_sensitivity_summary(const SuiteOutcome& oc, const std::string& path) {
  struct Agg {
    double p3_lo = 1e300, p3_hi = -1e300;
    double fp3_cost_lo = 1e300, fp3_cost_hi = -1e300;
    bool pil_beats_fp3 = false;
    std::map<std::string, double> fp3_cost, pil_cost;
  };
  std::map<std::tuple<double, double, int>, Agg> cells;
  for (const ResultRow& r : oc.rows) {
    if (r.status != "ok") continue;
    Agg& a = cells[{r.cell.p, r.cell.cv, r.cell.lead_time}];
    if (r.policy == "fixed_p3") {
      a.p3_lo = std::min(a.p3_lo, r.param1);
      a.p3_hi = std::max(a.p3_hi, r.param1);
      a.fp3_cost_lo = std::min(a.fp3_cost_lo, r.stats.avg_cost);
      a.fp3_cost_hi = std::max(a.fp3_cost_hi, r.stats.avg_cost);
      a.fp3_cost[r.demand_kind] = r.stats.avg_cost;
    } else if (r.policy == "pil") {
      a.pil_cost[r.demand_kind] = r.stats.avg_cost;
    }
  }
  std::ofstream out(path);
  out << "p,cv,L,p3_target_spread,fp3_cost_spread,pil_beats_fp3\n";
  for (auto& [key, a] : cells) {
    for (const auto& [fam, cost] : a.pil_cost) {
      if (a.fp3_cost.count(fam) && cost < a.fp3_cost.at(fam)) a.pil_beats_fp3 = true;
    }
    const auto& [p, cv, L] = key;
    out << detail::fmt(p) << ',' << detail::fmt(cv) << ',' << L << ','
        << detail::fmt(std::max(0.0, a.p3_hi - a.p3_lo)) << ','
        << detail::fmt(std::max(0.0, a.fp3_cost_hi - a.fp3_cost_lo)) << ','
        << (a.pil_beats_fp3 ? 1 : 0) << "\n";
  }
}

inline SuiteOutcome run_zipkin_suite(const RunOptions& opt, const std::string& out_path) {
  return run_suite("zipkin", zipkin_cells(), opt, out_path);
}

inline SuiteOutcome run_xin_suite(const RunOptions& opt, const std::string& out_path) {
  return run_suite("xin", xin_cells(), opt, out_path);
}

inline SuiteOutcome run_grid_suite(const RunOptions& opt, const std::string& out_path) {
  SuiteOutcome oc = run_suite("grid", grid_cells(opt.scale), opt, out_path);
  if (oc.cells_skipped > 0) oc.rows = load_result_rows(out_path);
  write_grid_summary(oc, out_path + ".summary.csv");
  return oc;
}

inline SuiteOutcome run_sensitivity_suite(const RunOptions& opt,
                                          const std::string& out_path) {
  SuiteOutcome oc = run_suite("sensitivity", sensitivity_cells(opt.scale), opt, out_path);
  if (oc.cells_skipped > 0) oc.rows = load_result_rows(out_path);
  write_sensitivity_summary(oc, out_path + ".summary.csv");
  return oc;
}

// Lookup-table generation: the optimal P3 target per (cv, p, L) with the
// recommended two-moment fit (shifted exponential below cv 1, otherwise the
// hyperexponential with gamma moments).
struct TableSpec {
  std::vector<double> cvs = {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
  std::vector<double> ps = {4, 9, 19, 49, 99, 199};
  std::vector<int> ls = {1, 2, 4, 8, 16, 32, 64};
  double mean = 10.0;
};

inline std::vector<Cell> table_cells(const TableSpec& spec) {
  std::vector<Cell> cells;
  std::uint64_t id = 0;
  for (double cv : spec.cvs) {
    for (double p : spec.ps) {
      for (int L : spec.ls) {
        Cell c;
        c.suite = "table";
        c.cell_id = id++;
        c.family =
            cv <= 1.0 ? Family::shifted_exponential : Family::hyperexponential;
        c.mean = spec.mean;
        c.cv = cv;
        c.p = p;
        c.h = 1.0;
        c.lead_time = L;
        c.evaluator =
            cv <= 1.0 ? Evaluator::exact_phase : Evaluator::backward;
        c.fp3_mode = Fp3Mode::optimality_eq;
        cells.push_back(c);
      }
    }
  }
  return cells;
}

inline SuiteOutcome generate_lookup_table(const TableSpec& spec, const RunOptions& opt,
                                          const std::string& out_path) {
  return run_suite("table", table_cells(spec), opt, out_path);
}

}  // namespace lsinv::harness
