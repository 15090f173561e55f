#include <doctest.h>

#include <cmath>
#include <numbers>

#include "stochorder/couplings.hpp"
#include "stochorder/random.hpp"

using namespace stochorder;
using D = Distribution;

namespace {

const D kU = D::uniform01();
const D kB3 = D::discrete({0, 1}, {0.7, 0.3});

double sum_of(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v;
  return s;
}

DiscreteJoint joint_of(std::initializer_list<std::vector<double>> rows, std::vector<double> probs) {
  DiscreteJoint j;
  j.atoms.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) j.atoms(r, static_cast<Eigen::Index>(c)) = row[c];
    ++r;
  }
  j.probs = Eigen::Map<Eigen::VectorXd>(probs.data(), static_cast<Eigen::Index>(probs.size()));
  return j;
}

bool has_row(const DiscreteJoint& j, std::vector<double> row, double p) {
  for (Eigen::Index r = 0; r < j.size(); ++r) {
    bool match = true;
    for (int c = 0; c < j.dim(); ++c) match &= j.atoms(r, c) == row[static_cast<std::size_t>(c)];
    if (match) return std::fabs(j.probs(r) - p) < 1e-12;
  }
  return false;
}

}  // namespace

TEST_CASE("comonotonic version examples") {
  const auto co = comonotonic_version({kU, kU});
  CHECK(co.kind() == Coupling::Kind::Comonotonic);
  const auto s = sum_distribution(co);
  CHECK(s.cert.level == Certification::Level::Exact);
  for (double t : {0.1, 0.5, 0.9}) CHECK(quantile(s.law, t) == doctest::Approx(2 * t).epsilon(1e-15));

  const auto sp = sum_distribution(comonotonic_version({D::pareto(0.5), D::pareto(0.5)})).law;
  for (double t : {0.2, 0.75, 0.999}) CHECK(quantile(sp, t) == doctest::Approx(2 * std::pow(1 - t, -2.0)).epsilon(1e-12));

  const auto shifted = sum_distribution(comonotonic_version({D::point_mass(1), D::pareto(2)})).law;
  for (double t : {0.2, 0.75}) CHECK(quantile(shifted, t) == doctest::Approx(1 + quantile(D::pareto(2), t)));
}

TEST_CASE("countermono_existence examples") {
  CHECK(countermono_existence({kB3, kB3, kB3}) == CtExistence::ExistsLow);
  CHECK(countermono_existence({kU, kU, kU}) == CtExistence::NotExists);
  CHECK(countermono_existence({kU, D::cauchy()}) == CtExistence::ExistsPairwise);
  const D top = D::discrete({0, 1}, {0.3, 0.7});
  CHECK(countermono_existence({top, top, top}) == CtExistence::ExistsHigh);
  CHECK(countermono_existence({kU, kU, D::point_mass(2)}) == CtExistence::ExistsPairwise);
  CHECK_THROWS_AS(countermono_version({kU, kU, kU}), CtNotExists);
}

TEST_CASE("counter-monotonic version examples") {
  const auto s = sum_distribution(countermono_version({kU, kU}));
  CHECK(s.law.kind() == D::Kind::PointMass);
  CHECK(quantile(s.law, 0.3) == doctest::Approx(1.0).epsilon(1e-15));

  const auto c = countermono_version({kB3, kB3, kB3});
  const auto j = *to_joint(c);
  CHECK(j.size() == 4);
  CHECK(has_row(j, {1, 0, 0}, 0.3));
  CHECK(has_row(j, {0, 1, 0}, 0.3));
  CHECK(has_row(j, {0, 0, 1}, 0.3));
  CHECK(has_row(j, {0, 0, 0}, 0.1));
  CHECK(is_pairwise_countermonotonic(j));
  for (int i = 0; i < 3; ++i) {
    const D marg = j.marginal(i);
    CHECK(as_discrete(marg)->probs[1] == doctest::Approx(0.3).epsilon(1e-14));
  }

  const D top = D::discrete({0, 1}, {0.3, 0.7});
  const auto jh = *to_joint(countermono_version({top, top, top}));
  CHECK(has_row(jh, {0, 1, 1}, 0.3));
  CHECK(has_row(jh, {1, 1, 1}, 0.1));
  CHECK(is_pairwise_countermonotonic(jh));
}

TEST_CASE("counter-monotonic reciprocal sum of two uniforms") {
  const auto ct = countermono_version({kU, kU});
  QuadConfig cfg;
  cfg.grid_n = 100000;
  const auto w = pushforward_distribution(
      ct, [](std::span<const double> x) { return 1 / x[0] + 1 / x[1]; }, cfg);
  CHECK(w.cert.level == Certification::Level::GridNumeric);
  for (double u : {0.1, 0.5, 0.9}) CHECK(quantile(w.law, u) == doctest::Approx(4 / (1 - u * u)).epsilon(2e-3));
}

TEST_CASE("sum_distribution of a discrete joint") {
  const auto c = Coupling::from_joint(joint_of({{0, 0}, {1, 1}}, {0.5, 0.5}));
  const auto s = sum_distribution(c);
  const auto dv = *as_discrete(s.law);
  REQUIRE(dv.atoms.size() == 2);
  CHECK(dv.atoms[0] == 0.0);
  CHECK(dv.atoms[1] == 2.0);
  CHECK(dv.probs[0] == 0.5);
  CHECK(s.cert.level == Certification::Level::Exact);
}

TEST_CASE("expectation_of: single-uniform couplings") {
  auto phi = [](std::span<const double> v) {
    auto term = [](double x) { return (x > 0 && x < 1) ? 1 / x : 0.0; };
    return term(v[0]) + term(v[1]) - 2 * term(v[2]);
  };
  const TransportMap x{[](UnitPoint u) { return u.t; }, {}, false};
  const TransportMap y{[](UnitPoint u) { return u.tc; }, {}, false};
  const TransportMap z{[](UnitPoint u) { return u.t <= 0.5 ? 2 * u.t : 2 * u.tc; }, {}, false};
  const auto c = Coupling::from_maps({x, y, z}, {kU, kU, kU});
  const auto e = expectation_of(c, phi);
  REQUIRE(e.is_finite());
  CHECK(std::fabs(e.value - 2 * std::numbers::ln2) < 1e-8);
  CHECK(marginal_ks_distance(c) <= 1.0 / 10000 + 1e-12);

  const auto co = expectation_of(comonotonic_version({kU, kU, kU}), phi);
  CHECK(co == MeanClass::finite(0.0));

  const auto inf = expectation_of(comonotonic_version({D::pareto(0.5), D::pareto(0.5)}), sum_of);
  CHECK(inf.kind == MeanClass::Kind::PlusInf);
  const auto undef = expectation_of(comonotonic_version({D::pareto(0.5), D::affine(-1, 0, D::pareto(0.5))}), sum_of);
  CHECK(undef.kind == MeanClass::Kind::Undefined);
}

TEST_CASE("is_pairwise_countermonotonic examples") {
  CHECK(is_pairwise_countermonotonic(joint_of({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, 0}}, {0.3, 0.3, 0.3, 0.1})));
  CHECK_FALSE(is_pairwise_countermonotonic(joint_of({{0, 0}, {1, 1}}, {0.5, 0.5})));
  CHECK(is_pairwise_countermonotonic(joint_of({{3, 4}}, {1.0})));
  CHECK(is_pairwise_countermonotonic(countermono_version({kU, D::pareto(1)})));
  CHECK_FALSE(is_pairwise_countermonotonic(comonotonic_version({kU, D::pareto(1)})));
}

TEST_CASE("coupling validation") {
  CHECK_THROWS_AS(Coupling::from_joint(joint_of({{0, 0}, {1, 1}}, {0.5, 0.6})), InvalidArgument);
  CHECK_THROWS_AS(Coupling::from_joint(joint_of({{0, 0}, {1, 1}}, {1.0, 0.0})), InvalidArgument);
  CHECK_THROWS_AS(Coupling::from_maps({}, {}), InvalidArgument);
  CHECK_THROWS_AS(comonotonic_version({}), InvalidArgument);
}

TEST_CASE("map couplings reproduce their marginals") {
  const std::vector<std::vector<D>> cases = {
      {kU, D::pareto(0.5)}, {D::cauchy(), kU}, {kB3, kB3, kB3}, {D::pareto(2), D::affine(-1, 0, D::pareto(1))},
      {D::mixture({0.8, 0.2}, {D::point_mass(0), kU}), D::mixture({0.9, 0.1}, {D::point_mass(1), D::pareto(1)}),
       D::mixture({0.85, 0.15}, {D::point_mass(-1), kU})}};
  for (const auto& ds : cases) {
    CHECK(marginal_ks_distance(comonotonic_version(ds)) <= 1.0 / 10000 + 1e-9);
    if (countermono_existence(ds) != CtExistence::NotExists) {
      const auto ct = countermono_version(ds);
      CHECK(marginal_ks_distance(ct) <= 1.0 / 10000 + 1e-9);
      CHECK(is_pairwise_countermonotonic(ct));
    }
  }
}

TEST_CASE("extremal couplings bound every coupling in convex order (d = 2)") {
  gen::Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const std::vector<D> ms = {gen::random_discrete(rng, 6, 5), gen::random_discrete(rng, 6, 5)};
    const auto j = Coupling::from_joint(gen::random_joint(ms, rng));
    for (int k = 0; k < 2; ++k) CHECK(check_cx(j.marginals()[static_cast<std::size_t>(k)], ms[static_cast<std::size_t>(k)]).holds());
    const auto s = sum_distribution(j).law;
    const auto ct = sum_distribution(countermono_version(ms));
    const auto co = sum_distribution(comonotonic_version(ms));
    CHECK(ct.cert.level == Certification::Level::Exact);
    const auto lower = check_cx(ct.law, s);
    const auto upper = check_cx(s, co.law);
    CHECK(lower.holds());
    CHECK(upper.holds());
    CHECK(lower.cert.level == Certification::Level::Exact);
    CHECK(is_pairwise_countermonotonic(countermono_version(ms)));
  }
}

TEST_CASE("comonotonic bound in higher dimensions and the low-tail counter-monotonic bound") {
  gen::Rng rng(4);
  for (int d : {3, 4}) {
    for (int i = 0; i < 30; ++i) {
      std::vector<D> ms;
      const auto tails = gen::dirichlet(rng, d + 1);
      for (int k = 0; k < d; ++k) ms.push_back(gen::random_discrete_low_tail(rng, 4, 4, tails[static_cast<std::size_t>(k)]));
      REQUIRE(countermono_existence(ms) != CtExistence::NotExists);
      const auto s = sum_distribution(Coupling::from_joint(gen::random_joint(ms, rng))).law;
      CHECK(check_cx(s, sum_distribution(comonotonic_version(ms)).law).holds());
      const auto ct = countermono_version(ms);
      CHECK(is_pairwise_countermonotonic(ct));
      CHECK(check_cx(sum_distribution(ct).law, s).holds());
    }
  }
}

TEST_CASE("comonotonic sum of cx-larger marginals dominates any coupling") {
  gen::Rng rng(8);
  for (int i = 0; i < 60; ++i) {
    const D x = gen::random_discrete(rng, 5, 4);
    const D y = gen::random_discrete(rng, 5, 4);
    const D z = gen::mean_preserving_spread(x, rng, 2);
    const D w = gen::mean_preserving_spread(y, rng, 2);
    const auto s = sum_distribution(Coupling::from_joint(gen::random_joint({x, y}, rng))).law;
    CHECK(check_cx(s, sum_distribution(comonotonic_version({z, w})).law).holds());
  }
}

TEST_CASE("sum means do not depend on the coupling") {
  gen::Rng rng(12);
  for (int i = 0; i < 20; ++i) {
    const std::vector<D> ms = {gen::random_discrete(rng, 6, 5), gen::random_discrete(rng, 6, 5)};
    const double ref = expectation_of(comonotonic_version(ms), sum_of).value;
    for (int k = 0; k < 10; ++k) {
      const auto e = expectation_of(Coupling::from_joint(gen::random_joint(ms, rng)), sum_of);
      CHECK(e.value == doctest::Approx(ref).epsilon(1e-12));
    }
  }
}

TEST_CASE("counter-monotonic Pareto sum is dcx-below twice one Pareto") {
  QuadConfig cfg;
  cfg.grid_n = 200;
  const auto ct = sum_distribution(countermono_version({D::pareto(0.5), D::pareto(0.5)}), cfg);
  const auto v = check_dcx(ct.law, D::affine(2, 0, D::pareto(0.5)), cfg);
  CHECK(v.holds());
  CHECK(v.cert.level == Certification::Level::GridNumeric);
}
