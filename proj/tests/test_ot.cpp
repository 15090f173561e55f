#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stochorder/error.hpp"
#include "stochorder/ot.hpp"
#include "stochorder/random.hpp"

using namespace stochorder;
using D = Distribution;

namespace {

// Sum of a_k f_k(x) g_k(y) with increasing f_k, g_k and a_k >= 0, plus a
// convex function of x + y.
CostFn random_supermodular_cost(gen::Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> kind(0, 3);
  struct Term {
    double a;
    int f;
    int g;
    double t;
  };
  std::vector<Term> terms;
  for (int k = 0; k < 3; ++k) terms.push_back({unit(rng), kind(rng), kind(rng), 10 * unit(rng) - 5});
  const double b = unit(rng);
  const double w = 10 * unit(rng) - 5;
  auto inc = [](int which, double x, double t) {
    switch (which) {
      case 0: return x;
      case 1: return std::atan(x - t);
      case 2: return std::max(x - t, 0.0);
      default: return x * x * x;
    }
  };
  return {[=](double x, double y) {
            double acc = b * std::max(x + y - w, 0.0);
            for (const auto& term : terms) acc += term.a * inc(term.f, x, term.t) * inc(term.g, y, term.t);
            return acc;
          },
          true, "random"};
}

std::vector<double> uniform_atoms(gen::Rng& rng, int n) {
  std::uniform_int_distribution<int> atom(-6, 6);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = atom(rng);
  return v;
}

D empirical(const std::vector<double>& v) {
  std::vector<std::pair<double, double>> vw;
  for (double x : v) vw.emplace_back(x, 1.0 / static_cast<double>(v.size()));
  return D::discrete_from_weighted(std::move(vw));
}

}  // namespace

TEST_CASE("built-in costs") {
  CHECK(cost_by_name("product")(2, 3) == 6);
  CHECK(cost_by_name("neg_sq_diff")(2, 5) == -9);
  CHECK(cost_by_name("abs_diff_neg")(2, 5) == -3);
  const auto c = cost_by_name("cx_of_sum:1.5");
  CHECK(c(1, 1) == 0.5);
  CHECK(c(0, 1) == 0.0);
  for (const char* name : {"product", "neg_sq_diff", "abs_diff_neg", "cx_of_sum:0", "cx_of_sum:-2.5"}) {
    const auto cost = cost_by_name(name);
    CHECK(cost.declared_supermodular);
    CHECK(spot_check_supermodular(cost, 1));
  }
  CHECK_THROWS_AS(cost_by_name("cx_of_sum:"), InvalidArgument);
  CHECK_THROWS_AS(cost_by_name("cx_of_sum:1x"), InvalidArgument);
  CHECK_THROWS_AS(cost_by_name("bogus"), InvalidArgument);
}

TEST_CASE("spot check catches submodular costs") {
  CHECK_FALSE(spot_check_supermodular({[](double x, double y) { return -x * y; }, true, "neg_product"}, 2));
  CHECK_FALSE(spot_check_supermodular({[](double x, double y) { return (x - y) * (x - y); }, true, "sq_diff"}, 2));
  gen::Rng rng(4);
  for (int i = 0; i < 20; ++i) CHECK(spot_check_supermodular(random_supermodular_cost(rng), 3));
}

TEST_CASE("ot_extremes_supermodular examples") {
  const D u = D::uniform01();
  const auto xy = ot_extremes_supermodular(u, u, cost_by_name("product"));
  CHECK(xy.min.value == doctest::Approx(1.0 / 6).epsilon(1e-9));
  CHECK(xy.max.value == doctest::Approx(1.0 / 3).epsilon(1e-9));

  const auto stop = ot_extremes_supermodular(u, u, cost_by_name("cx_of_sum:1"));
  CHECK(stop.min.value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(stop.max.value == doctest::Approx(0.25).epsilon(1e-9));

  const D p = D::pareto(0.5);
  const CostFn sum{[](double x, double y) { return x + y; }, true, "sum"};
  const auto heavy = ot_extremes_supermodular(p, p, sum);
  CHECK(heavy.min.kind == MeanClass::Kind::PlusInf);
  CHECK(heavy.max.kind == MeanClass::Kind::PlusInf);

  CHECK_THROWS_AS(ot_extremes_supermodular(u, u, CostFn{[](double, double) { return 0.0; }, false, "undeclared"}),
                  InvalidArgument);
}

TEST_CASE("assignment_oracle examples") {
  const auto c = cost_by_name("product");
  const auto hi = assignment_oracle({1, 2, 3}, {1, 2, 3}, c, OptMode::Max);
  CHECK(hi.value == doctest::Approx(14.0 / 3));
  CHECK(hi.perm == std::vector<int>{0, 1, 2});
  const auto lo = assignment_oracle({1, 2, 3}, {1, 2, 3}, c, OptMode::Min);
  CHECK(lo.value == doctest::Approx(10.0 / 3));
  CHECK(lo.perm == std::vector<int>{2, 1, 0});
  const auto one = assignment_oracle({2}, {5}, c, OptMode::Min);
  CHECK(one.value == 10);
  CHECK(assignment_oracle({2}, {5}, c, OptMode::Max).value == 10);
  CHECK_THROWS_AS(assignment_oracle({1, 2}, {1}, c, OptMode::Min), InvalidArgument);
  CHECK_THROWS_AS(assignment_oracle(std::vector<double>(10, 1.0), std::vector<double>(10, 1.0), c, OptMode::Min),
                  InvalidArgument);
}

TEST_CASE("assignment optimum is the sorted or anti-sorted pairing") {
  gen::Rng rng(9);
  for (int i = 0; i < 40; ++i) {
    const int n = 1 + i % 7;
    auto xs = uniform_atoms(rng, n);
    auto ys = uniform_atoms(rng, n);
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    const auto c = random_supermodular_cost(rng);
    double sorted = 0.0, anti = 0.0;
    for (int k = 0; k < n; ++k) {
      sorted += c(xs[static_cast<std::size_t>(k)], ys[static_cast<std::size_t>(k)]);
      anti += c(xs[static_cast<std::size_t>(k)], ys[static_cast<std::size_t>(n - 1 - k)]);
    }
    const double scale = std::max(1.0, std::fabs(sorted) / n);
    const auto lo = assignment_oracle(xs, ys, c, OptMode::Min);
    const auto hi = assignment_oracle(xs, ys, c, OptMode::Max);
    CHECK(lo.value == doctest::Approx(anti / n).epsilon(1e-12 * scale));
    CHECK(hi.value == doctest::Approx(sorted / n).epsilon(1e-12 * scale));

    const auto ext = ot_extremes_supermodular(empirical(xs), empirical(ys), c);
    CHECK(std::fabs(ext.min.value - lo.value) <= 1e-12 * std::max(1.0, std::fabs(lo.value)));
    CHECK(std::fabs(ext.max.value - hi.value) <= 1e-12 * std::max(1.0, std::fabs(hi.value)));
  }
}

TEST_CASE("convex costs of the sum match stop-loss values of the extremal sums") {
  gen::Rng rng(10);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    const int n = 2 + i % 5;
    const auto xs = uniform_atoms(rng, n);
    const auto ys = uniform_atoms(rng, n);
    std::vector<double> kinks = {10 * unit(rng) - 5, 10 * unit(rng) - 5};
    std::vector<double> weights = {unit(rng), unit(rng)};
    const CostFn c{[=](double x, double y) {
                     return weights[0] * std::max(x + y - kinks[0], 0.0) + weights[1] * std::max(x + y - kinks[1], 0.0);
                   },
                   true, "pl"};
    const std::vector<D> ms = {empirical(xs), empirical(ys)};
    auto via_stop_loss = [&](const Coupling& cp) {
      const auto s = sum_distribution(cp).law;
      return weights[0] * stop_loss_plus(s, kinks[0]).value() + weights[1] * stop_loss_plus(s, kinks[1]).value();
    };
    CHECK(assignment_oracle(xs, ys, c, OptMode::Min).value ==
          doctest::Approx(via_stop_loss(countermono_version(ms))).epsilon(1e-12));
    CHECK(assignment_oracle(xs, ys, c, OptMode::Max).value ==
          doctest::Approx(via_stop_loss(comonotonic_version(ms))).epsilon(1e-12));
  }
}
