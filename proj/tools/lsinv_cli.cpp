// Command-line experiment runner: distribution fitting, single-cell policy
// evaluation and optimization, the benchmark suites, and the P3 lookup-table
// generator. Defaults can come from a key=value config file (--config) and
// are overridable by flags. Exit code 0 on success, 2 when any suite cell
// recorded an error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lsinv/lsinv.hpp"

using namespace lsinv;
using nlohmann::json;

namespace {

struct DemandArgs {
  std::string kind = "fit";  // fit | poisson | geometric
  double mean = 10.0;
  double cv = 1.0;
  std::string family;  // optional family override for kind=fit
};

void add_demand_flags(CLI::App* cmd, DemandArgs& args) {
  cmd->add_option("--demand", args.kind, "fit | poisson | geometric")
      ->check(CLI::IsMember({"fit", "poisson", "geometric"}));
  cmd->add_option("--mean", args.mean, "demand mean");
  cmd->add_option("--cv", args.cv, "demand coefficient of variation");
  cmd->add_option("--family", args.family,
                  "shifted_exponential | mixed_erlang_km1k | mixed_erlang_1k | "
                  "hyperexponential");
}

Family parse_family(const std::string& name) {
  for (Family f : {Family::shifted_exponential, Family::mixed_erlang_km1k,
                   Family::mixed_erlang_1k, Family::hyperexponential, Family::discrete_pmf}) {
    if (name == family_name(f)) return f;
  }
  throw CLI::ValidationError("--family", "unknown family: " + name);
}

Evaluator parse_evaluator(const std::string& name) {
  for (Evaluator e : {Evaluator::backward, Evaluator::forward, Evaluator::exact_discrete,
                      Evaluator::exact_phase}) {
    if (name == evaluator_name(e)) return e;
  }
  throw CLI::ValidationError("--evaluator", "unknown evaluator: " + name);
}

FittedDistribution make_demand(const DemandArgs& args) {
  if (args.kind == "poisson") return FittedDistribution{poisson_pmf(args.mean)};
  if (args.kind == "geometric") return FittedDistribution{geometric_pmf(args.mean)};
  std::optional<Family> fam;
  if (!args.family.empty()) fam = parse_family(args.family);
  return fit_two_moment({args.mean, args.cv}, fam);
}

json stats_json(const SimStats& s) {
  json j;
  j["avg_cost"] = s.avg_cost;
  j["avg_end_inventory"] = s.avg_end_inventory;
  j["lost_fraction"] = s.lost_fraction;
  j["realized_p3"] = s.realized_p3;
  j["order_mean"] = s.order_mean;
  j["order_cv"] = s.order_cv;
  j["t_mean"] = s.t_mean;
  j["t_msq"] = s.t_msq;
  j["n_stockouts"] = s.n_stockouts;
  j["evaluator_fallbacks"] = s.evaluator_fallbacks;
  j["stationarity_warning"] = s.stationarity_warning;
  return j;
}

json fitted_json(const FittedDistribution& d) {
  json j;
  j["family"] = family_name(family_of(d));
  if (const auto* se = std::get_if<ShiftedExponential>(&d)) {
    j["shift"] = se->shift;
    j["rate"] = se->rate;
  } else if (const auto* me = std::get_if<MixedErlangKm1K>(&d)) {
    j["k"] = me->k;
    j["q"] = me->q;
    j["rate"] = me->rate;
  } else if (const auto* m1k = std::get_if<MixedErlang1K>(&d)) {
    j["k"] = m1k->k;
    j["q"] = m1k->q;
    j["rate"] = m1k->rate;
  } else if (const auto* hy = std::get_if<Hyperexponential>(&d)) {
    j["q"] = hy->q;
    j["rate1"] = hy->rate1;
    j["rate2"] = hy->rate2;
  } else if (const auto* pmf = std::get_if<DiscretePmf>(&d)) {
    j["support"] = pmf->probs.size();
  }
  const auto [m, v] = moments(d);
  j["mean"] = m;
  j["variance"] = v;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lost-sales inventory policy toolkit"};
  app.set_config("--config", "", "key=value config file; flags take precedence");
  app.require_subcommand(1);

  harness::RunOptions opt;
  std::string out_path = "results.csv";
  std::string evaluator_override;
  std::string policies_csv;
  app.add_option("--seed", opt.seed, "global experiment seed")->capture_default_str();
  app.add_option("--opt-horizon", opt.opt_horizon, "optimization run length")
      ->capture_default_str();
  app.add_option("--horizon", opt.eval_horizon, "evaluation run length")
      ->capture_default_str();
  app.add_option("--warmup", opt.warmup, "warm-up periods (-1: default per lead time)")
      ->capture_default_str();
  app.add_option("--threads", opt.threads, "worker threads (0: all cores)")
      ->capture_default_str();

  // fit ------------------------------------------------------------------
  auto* fit_cmd = app.add_subcommand("fit", "two-moment distribution fit");
  fit_cmd->fallthrough();
  DemandArgs fit_args;
  add_demand_flags(fit_cmd, fit_args);

  // eval -----------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("eval", "simulate one policy on one cell");
  eval_cmd->fallthrough();
  DemandArgs eval_args;
  add_demand_flags(eval_cmd, eval_args);
  std::string eval_policy = "fixed_p3";
  std::string eval_evaluator = "backward";
  double eval_p = 9.0, eval_h = 1.0, eval_param = 0.95, eval_param2 = 0.0;
  int eval_L = 1;
  eval_cmd->add_option("--policy", eval_policy,
                       "base_stock | constant_order | capped_base_stock | fixed_p3 | pil");
  eval_cmd->add_option("--evaluator", eval_evaluator, "P3 / inventory evaluator");
  eval_cmd->add_option("--penalty,--p", eval_p, "penalty cost");
  eval_cmd->add_option("--holding", eval_h, "holding cost");
  eval_cmd->add_option("--L", eval_L, "lead time");
  eval_cmd->add_option("--param", eval_param, "policy parameter (S, Q, target)");
  eval_cmd->add_option("--param2", eval_param2, "second parameter (CBS cap)");

  // optimize ---------------------------------------------------------------
  auto* optz_cmd = app.add_subcommand("optimize", "optimize one policy on one cell");
  optz_cmd->fallthrough();
  DemandArgs optz_args;
  add_demand_flags(optz_cmd, optz_args);
  std::string optz_policy = "fixed_p3";
  std::string optz_evaluator = "backward";
  std::string optz_mode = "optimality_eq";
  double optz_p = 9.0, optz_h = 1.0;
  int optz_L = 1;
  optz_cmd->add_option("--policy", optz_policy,
                       "base_stock | constant_order | capped_base_stock | fixed_p3 | "
                       "fp3_heuristic | pil");
  optz_cmd->add_option("--evaluator", optz_evaluator, "P3 / inventory evaluator");
  optz_cmd->add_option("--mode", optz_mode, "fixed_p3: optimality_eq | cost_search");
  optz_cmd->add_option("--penalty,--p", optz_p, "penalty cost");
  optz_cmd->add_option("--holding", optz_h, "holding cost");
  optz_cmd->add_option("--L", optz_L, "lead time");

  // suite ------------------------------------------------------------------
  auto* suite_cmd = app.add_subcommand("suite", "run a benchmark suite");
  suite_cmd->fallthrough();
  std::string suite_name;
  suite_cmd->add_option("name", suite_name, "zipkin | xin | grid | sensitivity")
      ->required()
      ->check(CLI::IsMember({"zipkin", "xin", "grid", "sensitivity"}));
  suite_cmd->add_option("--out", out_path, "output CSV path")->capture_default_str();
  suite_cmd->add_option("--scale", opt.scale, "desk | full")->capture_default_str();
  suite_cmd->add_option("--policies", policies_csv, "comma-separated policy subset");
  suite_cmd->add_option("--evaluator", evaluator_override,
                        "override the suite's FP3/PIL evaluator");

  // table ------------------------------------------------------------------
  auto* table_cmd = app.add_subcommand("table", "generate the optimal-P3 lookup table");
  table_cmd->fallthrough();
  harness::TableSpec spec;
  table_cmd->add_option("--out", out_path, "output CSV path")->capture_default_str();
  table_cmd->add_option("--cv-list", spec.cvs, "cv grid");
  table_cmd->add_option("--p-list", spec.ps, "penalty grid");
  table_cmd->add_option("--L-list", spec.ls, "lead-time grid");
  table_cmd->add_option("--mean", spec.mean, "demand mean")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit_cmd) {
      std::cout << fitted_json(make_demand(fit_args)).dump(2) << "\n";
      return 0;
    }
    if (*eval_cmd) {
      SimConfig cfg;
      cfg.cost = {eval_h, eval_p, eval_L};
      cfg.horizon = opt.eval_horizon;
      cfg.warmup = opt.warmup;
      cfg.seed = opt.seed;
      cfg.demand = make_demand(eval_args);
      const Evaluator ev = parse_evaluator(eval_evaluator);
      Policy pol;
      if (eval_policy == "base_stock") {
        pol = BaseStock{eval_param};
      } else if (eval_policy == "constant_order") {
        pol = ConstantOrder{eval_param};
      } else if (eval_policy == "capped_base_stock") {
        pol = CappedBaseStock{eval_param, eval_param2};
      } else if (eval_policy == "fixed_p3") {
        pol = FixedP3{eval_param, ev};
      } else if (eval_policy == "pil") {
        pol = ProjectedInventoryLevel{eval_param, ev};
      } else {
        throw CLI::ValidationError("--policy", "unknown policy: " + eval_policy);
      }
      json j;
      j["policy"] = eval_policy;
      j["stats"] = stats_json(simulate(pol, cfg));
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (*optz_cmd) {
      OptimizerConfig cfg;
      cfg.cost = {optz_h, optz_p, optz_L};
      cfg.demand = make_demand(optz_args);
      cfg.seed = opt.seed;
      cfg.opt_horizon = opt.opt_horizon;
      cfg.eval_horizon = opt.eval_horizon;
      cfg.opt_warmup = opt.warmup;
      cfg.eval_warmup = opt.warmup;
      cfg.evaluator = parse_evaluator(optz_evaluator);
      json j;
      j["policy"] = optz_policy;
      OptResult r;
      if (optz_policy == "base_stock") {
        r = optimize_base_stock(cfg);
      } else if (optz_policy == "constant_order") {
        r = optimize_constant_order(cfg);
      } else if (optz_policy == "capped_base_stock") {
        r = optimize_cbs(cfg);
        j["q_max"] = r.param2;
      } else if (optz_policy == "fixed_p3") {
        r = optimize_fp3(cfg, optz_mode == "cost_search" ? Fp3Mode::cost_search
                                                         : Fp3Mode::optimality_eq);
      } else if (optz_policy == "fp3_heuristic") {
        const HeuristicTarget h = fp3_heuristic_target(cfg);
        r.param = h.target;
        r.stats = simulate(FixedP3{h.target, cfg.evaluator}, detail::eval_config(cfg));
        j["target_from"] = h.from_base_stock ? "base_stock" : "constant_order";
      } else if (optz_policy == "pil") {
        r = optimize_pil(cfg);
      } else {
        throw CLI::ValidationError("--policy", "unknown policy: " + optz_policy);
      }
      j["param"] = r.param;
      j["bracket_warning"] = r.bracket_warning;
      j["evaluations"] = r.evaluations;
      j["stats"] = stats_json(r.stats);
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (*suite_cmd) {
      if (!policies_csv.empty()) {
        std::stringstream ss(policies_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) opt.policies.push_back(tok);
      }
      if (!evaluator_override.empty()) {
        opt.evaluator_override = parse_evaluator(evaluator_override);
      }
      harness::SuiteOutcome oc;
      if (suite_name == "zipkin") {
        oc = harness::run_zipkin_suite(opt, out_path);
      } else if (suite_name == "xin") {
        oc = harness::run_xin_suite(opt, out_path);
      } else if (suite_name == "grid") {
        oc = harness::run_grid_suite(opt, out_path);
      } else {
        oc = harness::run_sensitivity_suite(opt, out_path);
      }
      std::fprintf(stderr, "suite %s: %d cells run, %d skipped, %d errors -> %s\n",
                   suite_name.c_str(), oc.cells_run, oc.cells_skipped, oc.errors,
                   oc.out_path.c_str());
      return oc.errors > 0 ? 2 : 0;
    }
    if (*table_cmd) {
      const harness::SuiteOutcome oc = harness::generate_lookup_table(spec, opt, out_path);
      std::fprintf(stderr, "table: %d cells run, %d skipped, %d errors -> %s\n",
                   oc.cells_run, oc.cells_skipped, oc.errors, oc.out_path.c_str());
      return oc.errors > 0 ? 2 : 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
