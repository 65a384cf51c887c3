#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "lsinv/policies.hpp"

using namespace lsinv;

TEST_CASE("base stock orders up to the inventory position", "[policies]") {
  const PipelineState st{3.0, {1.0, 3.0}};
  CHECK(order_quantity(BaseStock{10.0}, st, fit_two_moment({2.0, 0.5})) == 3.0);
  CHECK(order_quantity(BaseStock{5.0}, st, fit_two_moment({2.0, 0.5})) == 0.0);
}

TEST_CASE("constant order ignores the state", "[policies]") {
  const PipelineState a{0.0, {}};
  const PipelineState b{50.0, {}};
  const auto d = fit_two_moment({2.0, 0.5});
  CHECK(order_quantity(ConstantOrder{1.7}, a, d) == 1.7);
  CHECK(order_quantity(ConstantOrder{1.7}, b, d) == 1.7);
}

TEST_CASE("capped base stock degeneracies", "[policies]") {
  const auto d = fit_two_moment({2.0, 0.5});
  RandomStream rs(11);
  for (int t = 0; t < 30; ++t) {
    PipelineState st;
    st.on_hand = 8.0 * rs.uniform();
    st.outstanding = {4.0 * rs.uniform(), 4.0 * rs.uniform()};
    const double S = 12.0 * rs.uniform();
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(order_quantity(CappedBaseStock{S, inf}, st, d) ==
          order_quantity(BaseStock{S}, st, d));
    CHECK(order_quantity(CappedBaseStock{inf, 2.5}, st, d) == 2.5);
  }
}

TEST_CASE("fixed P3 with ample stock orders nothing", "[policies]") {
  const PipelineState st{500.0, {}};
  const auto d = fit_two_moment({2.0, 0.8});
  CHECK(order_quantity(FixedP3{0.9, Evaluator::backward}, st, d) == 0.0);
}

TEST_CASE("fixed P3 inverts the single-period CDF", "[policies]") {
  const PipelineState st{0.0, {}};
  for (const auto& d : {fit_two_moment({5.0, 0.7}), fit_two_moment({5.0, 1.4})}) {
    for (double qbar : {2.0, 5.0, 11.0}) {
      const double target = cdf(d, qbar);
      const FixedP3 pol{target, Evaluator::backward};
      CHECK(order_quantity(pol, st, d) == Catch::Approx(qbar).margin(1e-4));
    }
  }
}

TEST_CASE("fixed P3 fixed point across evaluators and states", "[policies]") {
  RandomStream rs(71);
  for (int t = 0; t < 15; ++t) {
    const int L = 1 + static_cast<int>(rs.uniform() * 4.0);
    PipelineState st;
    const double mean = 1.0 + 3.0 * rs.uniform();
    st.on_hand = mean * rs.uniform();
    for (int i = 0; i + 1 < L; ++i) st.outstanding.push_back(mean * rs.uniform());
    const auto d = fit_two_moment({mean, 0.4 + 1.2 * rs.uniform()});
    const double target = 0.7 + 0.25 * rs.uniform();
    for (Evaluator ev : {Evaluator::backward, Evaluator::forward}) {
      const double q = order_quantity(FixedP3{target, ev}, st, d);
      if (q > 0.0) {
        const double re =
            ev == Evaluator::backward ? backward_p3(st, q, d) : forward_p3(st, q, d);
        CHECK(re == Catch::Approx(target).margin(1e-5));
      }
    }
  }
}

TEST_CASE("fixed P3 with the exact discrete evaluator picks the smallest integer",
          "[policies]") {
  const DiscretePmf pois = poisson_pmf(5.0);
  const FittedDistribution d{pois};
  const PipelineState st{4.0, {5.0}};
  for (double target : {0.6, 0.9, 0.99}) {
    const double q = order_quantity(FixedP3{target, Evaluator::exact_discrete}, st, d);
    CHECK(q == std::floor(q));
    const auto qi = static_cast<std::int64_t>(q);
    CHECK(exact_discrete_p3(st, qi, pois) >= target);
    if (qi > 0) CHECK(exact_discrete_p3(st, qi - 1, pois) < target);
  }
}

TEST_CASE("fixed P3 exact phase matches the backward root closely", "[policies]") {
  const auto d = fit_two_moment({2.0, 0.7});
  const PipelineState st{2.0, {2.0, 1.5}};
  const double qb = order_quantity(FixedP3{0.9, Evaluator::backward}, st, d);
  const double qp = order_quantity(FixedP3{0.9, Evaluator::exact_phase}, st, d);
  CHECK(qp == Catch::Approx(qb).margin(0.08));
  // the exact root reproduces the target through the exact engine
  const auto pd = to_phase_demand(d);
  CHECK(exact_phase_p3(st, qp, pd) == Catch::Approx(0.9).margin(1e-5));
}

TEST_CASE("fixed P3 exact phase falls back when the shift blocks the root", "[policies]") {
  const FittedDistribution d = ShiftedExponential{2.0, 0.5};  // mean 4, shift 2
  OrderContext ctx;
  // outstanding order below the shift: transformed system invalid
  const PipelineState bad{4.0, {1.0}};
  const double q1 = order_quantity(FixedP3{0.9, Evaluator::exact_phase}, bad, d, &ctx);
  CHECK(ctx.phase_fallbacks == 1);
  CHECK(q1 == Catch::Approx(order_quantity(FixedP3{0.9, Evaluator::backward}, bad, d)));
  // huge stock: the root would sit below the shift
  const PipelineState rich{40.0, {5.0}};
  const double q2 = order_quantity(FixedP3{0.7, Evaluator::exact_phase}, rich, d, &ctx);
  CHECK(ctx.phase_fallbacks == 2);
  CHECK(q2 == Catch::Approx(order_quantity(FixedP3{0.7, Evaluator::backward}, rich, d)));
}

TEST_CASE("PIL orders the gap to the target and never goes negative", "[policies]") {
  const auto d = fit_two_moment({2.0, 0.8});
  const PipelineState st{3.0, {2.0}};
  const double e = pil_expected_inventory(st, d);
  CHECK(order_quantity(ProjectedInventoryLevel{e + 1.5, Evaluator::backward}, st, d) ==
        Catch::Approx(1.5).epsilon(1e-12));
  CHECK(order_quantity(ProjectedInventoryLevel{0.0, Evaluator::backward}, st, d) == 0.0);
  const DiscretePmf pois = poisson_pmf(5.0);
  const PipelineState sti{4.0, {5.0}};
  const double qd = order_quantity(ProjectedInventoryLevel{7.0, Evaluator::exact_discrete},
                                   sti, FittedDistribution{pois});
  CHECK(qd == std::floor(qd));
  CHECK(exact_discrete_expected_inventory(sti, pois) + qd >= 7.0);
}

TEST_CASE("policies are pure functions of their inputs", "[policies]") {
  const auto d = fit_two_moment({3.0, 1.2});
  const PipelineState st{2.0, {1.0, 2.0}};
  const Policy pol = FixedP3{0.92, Evaluator::backward};
  CHECK(order_quantity(pol, st, d) == order_quantity(pol, st, d));
}

TEST_CASE("evaluator mismatches are rejected", "[policies]") {
  const auto hy = fit_two_moment({2.0, 1.5});
  const PipelineState st{1.0, {}};
  CHECK_THROWS_AS(order_quantity(FixedP3{0.9, Evaluator::exact_phase}, st, hy),
                  std::invalid_argument);
  CHECK_THROWS_AS(order_quantity(FixedP3{0.9, Evaluator::exact_discrete}, st, hy),
                  std::invalid_argument);
  const DiscretePmf pois = poisson_pmf(5.0);
  CHECK_THROWS_AS(
      order_quantity(FixedP3{0.9, Evaluator::backward}, st, FittedDistribution{pois}),
      std::invalid_argument);
}

TEST_CASE("constant-order closed forms", "[policies]") {
  SECTION("boundary at zero penalty") {
    const auto cf = co_closed_form(CostParams{1.0, 0.0, 1}, {10.0, 0.5});
    CHECK(cf.p3_star == Catch::Approx(0.0).margin(1e-15));
  }
  SECTION("reference cell") {
    const auto cf = co_closed_form(CostParams{1.0, 9.0, 1}, {10.0, 0.5});
    CHECK(cf.q_star == Catch::Approx(8.85292).margin(1e-5));
    CHECK(cf.expected_cost == Catch::Approx(16.7945).margin(1e-3));
    CHECK(cf.p3_star == Catch::Approx(0.770584).margin(1e-6));
  }
  SECTION("P3* does not depend on the coefficient of variation") {
    const auto a = co_closed_form(CostParams{1.0, 19.0, 1}, {10.0, 0.25});
    const auto b = co_closed_form(CostParams{1.0, 19.0, 1}, {10.0, 0.75});
    CHECK(a.p3_star == b.p3_star);
  }
  SECTION("cv above one is rejected") {
    CHECK_THROWS_AS(co_closed_form(CostParams{1.0, 9.0, 1}, {10.0, 1.5}),
                    std::invalid_argument);
  }
}
