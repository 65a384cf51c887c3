#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "lsinv/harness.hpp"

using namespace lsinv;
using namespace lsinv::harness;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int line_count(const std::string& path) {
  std::ifstream in(path);
  int n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

RunOptions tiny_options(std::uint64_t seed = 42) {
  RunOptions opt;
  opt.seed = seed;
  opt.opt_horizon = 2000;
  opt.eval_horizon = 6000;
  opt.warmup = 200;
  opt.threads = 2;
  return opt;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/lsinv_test_" + name) {
    remove();
  }
  ~TempFile() { remove(); }
  void remove() const {
    std::remove(path.c_str());
    std::remove((path + ".manifest.json").c_str());
    std::remove((path + ".baseline.csv").c_str());
  }
};

}  // namespace

TEST_CASE("suite grids have the documented sizes", "[harness]") {
  CHECK(zipkin_cells().size() == 32);
  CHECK(xin_cells().size() == 24);
  CHECK(grid_cells("desk").size() == 48);
  CHECK(grid_cells("full").size() == 336);
  CHECK_THROWS_AS(grid_cells("bogus"), std::invalid_argument);
}

TEST_CASE("suite runner writes rows, a manifest, and a baseline", "[harness]") {
  TempFile f("suite_basic.csv");
  RunOptions opt = tiny_options();
  opt.policies = {"base_stock", "constant_order"};
  const SuiteOutcome oc = run_suite("zipkin", zipkin_cells(), opt, f.path);
  CHECK(oc.cells_run == 32);
  CHECK(oc.errors == 0);
  CHECK(oc.rows.size() == 64);
  CHECK(line_count(f.path) == 65);  // header + one row per (cell, policy)
  CHECK(std::ifstream(f.path + ".manifest.json").good());
  CHECK(std::ifstream(f.path + ".baseline.csv").good());
  // schema: header first, then 10-significant-digit floats
  std::ifstream in(f.path);
  std::string header;
  std::getline(in, header);
  CHECK(header == csv_header());
}

TEST_CASE("completed cells are skipped on rerun", "[harness]") {
  TempFile f("suite_resume.csv");
  RunOptions opt = tiny_options();
  opt.policies = {"constant_order"};
  const SuiteOutcome first = run_suite("zipkin", zipkin_cells(), opt, f.path);
  CHECK(first.cells_run == 32);
  const int lines = line_count(f.path);
  const SuiteOutcome second = run_suite("zipkin", zipkin_cells(), opt, f.path);
  CHECK(second.cells_run == 0);
  CHECK(second.cells_skipped == 32);
  CHECK(line_count(f.path) == lines);
}

TEST_CASE("regeneration with the same seed produces an identical file", "[harness]") {
  TempFile a("suite_det_a.csv");
  TempFile b("suite_det_b.csv");
  RunOptions opt = tiny_options(777);
  opt.policies = {"base_stock", "pil"};
  run_suite("sensitivity", sensitivity_cells("desk"), opt, a.path);
  run_suite("sensitivity", sensitivity_cells("desk"), opt, b.path);
  const std::string ca = slurp(a.path);
  CHECK(!ca.empty());
  CHECK(ca == slurp(b.path));
}

TEST_CASE("per-cell errors are recorded and the suite continues", "[harness]") {
  TempFile f("suite_err.csv");
  RunOptions opt = tiny_options();
  opt.policies = {"fixed_p3", "constant_order"};
  opt.evaluator_override = Evaluator::exact_phase;  // invalid for discrete demand
  const SuiteOutcome oc = run_suite("zipkin", zipkin_cells(), opt, f.path);
  CHECK(oc.errors == 32);  // every fixed_p3 row fails, constant_order rows survive
  int ok = 0, err = 0;
  for (const ResultRow& r : oc.rows) (r.status == "ok" ? ok : err)++;
  CHECK(ok == 32);
  CHECK(err == 32);
  // no baseline for an errored run
  CHECK_FALSE(std::ifstream(f.path + ".baseline.csv").good());
}

TEST_CASE("lookup table generation", "[harness]") {
  TempFile f("table.csv");
  TableSpec spec;
  spec.cvs = {0.5, 1.5};
  spec.ps = {4, 49};
  spec.ls = {1};
  RunOptions opt = tiny_options(5);
  opt.opt_horizon = 5000;
  opt.eval_horizon = 40000;
  opt.warmup = 500;
  const SuiteOutcome oc = generate_lookup_table(spec, opt, f.path);
  REQUIRE(oc.errors == 0);
  REQUIRE(oc.rows.size() == 4);
  // P3* increases in p at fixed (cv, L)
  const auto p3_of = [&](double cv, double p) {
    for (const ResultRow& r : oc.rows) {
      if (r.cell.cv == cv && r.cell.p == p) return r.param1;
    }
    FAIL("row not found");
    return 0.0;
  };
  CHECK(p3_of(0.5, 49) > p3_of(0.5, 4));
  CHECK(p3_of(1.5, 49) > p3_of(1.5, 4));
  // at low p the target is near the cv-independent constant-order level
  CHECK(std::abs(p3_of(0.5, 4) - p3_of(1.5, 4)) < 0.06);
  // deterministic regeneration
  TempFile g("table_b.csv");
  generate_lookup_table(spec, opt, g.path);
  CHECK(slurp(f.path) == slurp(g.path));
}

TEST_CASE("csv escaping keeps the column count stable", "[harness]") {
  ResultRow r;
  r.cell = grid_cells("desk")[0];
  r.policy = "fixed_p3";
  r.evaluator = "backward";
  r.status = "error";
  r.message = "bad, comma\nand newline";
  const std::string line = to_csv(r);
  const std::string header = csv_header();
  CHECK(std::count(line.begin(), line.end(), ',') ==
        std::count(header.begin(), header.end(), ','));
  CHECK(line.find('\n') == std::string::npos);
}
