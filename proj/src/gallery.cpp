#include "stochorder/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "stochorder/error.hpp"
#include "stochorder/random.hpp"

namespace stochorder {
namespace {

using D = Distribution;

class Builder {
 public:
  Builder(std::string name, std::uint64_t seed) {
    report_.name = std::move(name);
    report_.seed = seed;
  }

  void numeric(std::string desc, double expected, double computed, double tol, std::string note = {}) {
    const bool pass = expected == computed || std::fabs(expected - computed) <= tol;
    add({std::move(desc), expected, computed, pass, tol, std::move(note)});
  }

  void verdict(std::string desc, Result expected, const OrderVerdict& v, std::string note = {}) {
    label(std::move(desc), to_string(expected), to_string(v.result), std::move(note));
  }

  void label(std::string desc, std::string expected, std::string computed, std::string note = {}) {
    const bool pass = expected == computed;
    add({std::move(desc), std::move(expected), std::move(computed), pass, 0.0, std::move(note)});
  }

  void flag(std::string desc, bool computed, std::string note = {}) {
    add({std::move(desc), true, computed, computed, 0.0, std::move(note)});
  }

  ScenarioReport finish() {
    report_.overall = std::all_of(report_.claims.begin(), report_.claims.end(), [](const Claim& c) { return c.pass; });
    return std::move(report_);
  }

 private:
  void add(Claim c) { report_.claims.push_back(std::move(c)); }
  ScenarioReport report_;
};

void witness_claims(Builder& b, const std::string& prefix, const OrderVerdict& v, double at, Side side, double lhs,
                    double rhs) {
  if (!v.witness) {
    b.flag(prefix + ": witness present", false);
    return;
  }
  b.numeric(prefix + ": witness w", at, v.witness->at, 0.0);
  b.label(prefix + ": witness side", to_string(side), to_string(v.witness->side));
  b.numeric(prefix + ": witness lhs", lhs, v.witness->lhs.value(), 0.0);
  b.numeric(prefix + ": witness rhs", rhs, v.witness->rhs.value(), 0.0);
}

// ---------------------------------------------------------------------------
// Three uniforms: X = U, Y = 1 - U, and Z decreasing in W = 1/X + 1/Y.

Coupling three_uniform_coupling() {
  const D u = D::uniform01();
  const TransportMap x{[](UnitPoint p) { return p.t; }, {}, false};
  const TransportMap y{[](UnitPoint p) { return p.tc; }, {}, false};
  const TransportMap z{[](UnitPoint p) { return p.t <= 0.5 ? 2 * p.t : 2 * p.tc; }, {}, false};
  return Coupling::from_maps({x, y, z}, {u, u, u});
}

// Extended value of a mean; NaN when undefined.
double mean_value(const MeanClass& m) {
  return m.well_defined() ? m.as_ext_real().value() : std::numeric_limits<double>::quiet_NaN();
}

double reciprocal_on_unit(double x) { return x > 0 && x < 1 ? 1 / x : 0.0; }

double reciprocal_phi(std::span<const double> v) {
  return reciprocal_on_unit(v[0]) + reciprocal_on_unit(v[1]) - 2 * reciprocal_on_unit(v[2]);
}

constexpr int kQuantileGrid = 1 << 17;

ScenarioReport example1(const GalleryConfig& cfg) {
  Builder b("example1_simons3d", cfg.seed);
  const Coupling c = three_uniform_coupling();
  const MeanClass e = expectation_of(c, reciprocal_phi, cfg.quad);
  b.label("E[phi(X,Y,Z)] is finite", "finite", to_string(e.kind));
  b.numeric("E[phi(X,Y,Z)] = 2 ln 2", 2 * std::numbers::ln2, mean_value(e), 1e-6);

  const D u = D::uniform01();
  const MeanClass co = expectation_of(comonotonic_version({u, u, u}), reciprocal_phi, cfg.quad);
  b.numeric("E[phi] under the comonotonic coupling", 0.0, mean_value(co), 0.0);

  QuadConfig fine = cfg.quad;
  fine.grid_n = std::max(fine.grid_n, kQuantileGrid);
  const auto w = pushforward_distribution(c, [](std::span<const double> v) { return 1 / v[0] + 1 / v[1]; }, fine);
  const auto v = pushforward_distribution(c, [](std::span<const double> x) { return 2 / x[2]; }, fine);
  const std::string grid_note = "grid quantile on " + std::to_string(fine.grid_n) + " points, relative tolerance 1e-3";
  for (double p : {0.1, 0.5, 0.9}) {
    const double ew = 4 / (1 - p * p);
    b.numeric("W quantile at " + to_string(ExtReal(p)), ew, quantile(w.law, p), 1e-3 * ew, grid_note);
    const double ev = 2 / (1 - p);
    b.numeric("V = 2/Z quantile at " + to_string(ExtReal(p)), ev, quantile(v.law, p), 1e-3 * ev, grid_note);
  }
  const int ks_n = 10000;
  b.numeric("transport maps reproduce uniform marginals (Kolmogorov distance)", 0.0, marginal_ks_distance(c, ks_n),
            1.0 / ks_n + 1e-12);
  return b.finish();
}

ScenarioReport example2(const GalleryConfig& cfg) {
  Builder b("example2_dagger", cfg.seed);
  const D x = D::pareto(0.5);
  const D y = D::affine(-1, 0, x);
  b.verdict("X <=cx-dagger Y", Result::Holds, check_cx_dagger(x, y, cfg.quad));
  b.verdict("Y <=cx-dagger X", Result::Holds, check_cx_dagger(y, x, cfg.quad));
  const auto xy = check_cx(x, y, cfg.quad);
  const auto yx = check_cx(y, x, cfg.quad);
  const double inf = std::numeric_limits<double>::infinity();
  b.verdict("X <=cx Y", Result::Fails, xy);
  witness_claims(b, "X <=cx Y", xy, 0.0, Side::Plus, inf, 0.0);
  b.verdict("Y <=cx X", Result::Fails, yx);
  witness_claims(b, "Y <=cx X", yx, 0.0, Side::Minus, inf, 0.0);
  return b.finish();
}

ScenarioReport example3(const GalleryConfig& cfg) {
  Builder b("example3_cauchy", cfg.seed);
  const D x = D::cauchy();
  const D y = D::affine(2, 0, x);
  b.verdict("X <=cx 2X", Result::Holds, check_cx(x, y, cfg.quad));
  b.verdict("2X <=cx X", Result::Holds, check_cx(y, x, cfg.quad));
  bool differ = false;
  for (double t : {0.5, 1.0, 3.0}) {
    const double fx = 0.5 + std::atan(t) / std::numbers::pi;
    const double fy = 0.5 + std::atan(t / 2) / std::numbers::pi;
    b.numeric("cdf of X at " + to_string(ExtReal(t)), fx, cdf(x, t), 1e-12);
    b.numeric("cdf of 2X at " + to_string(ExtReal(t)), fy, cdf(y, t), 1e-12);
    differ = differ || std::fabs(cdf(x, t) - cdf(y, t)) > 1e-3;
  }
  b.flag("X and 2X differ in law", differ);
  return b.finish();
}

ScenarioReport example4(const GalleryConfig& cfg) {
  Builder b("example4_transitivity_dagger", cfg.seed);
  const D x = D::cauchy();
  const D y = D::point_mass(0.0);
  const D z = D::affine(1, 1, D::uniform01());
  const auto& q = cfg.quad;
  b.verdict("Y <=cx-dagger X", Result::Holds, check_cx_dagger(y, x, q));
  b.verdict("X <=cx-dagger Z", Result::Holds, check_cx_dagger(x, z, q));
  b.verdict("Z <=cx-dagger X", Result::Holds, check_cx_dagger(z, x, q));
  b.verdict("X <=cx-dagger Y", Result::Holds, check_cx_dagger(x, y, q));
  b.verdict("Y <=cx-dagger Z (chain does not compose)", Result::Fails, check_cx_dagger(y, z, q));
  b.verdict("Z <=cx-dagger Y (chain does not compose)", Result::Fails, check_cx_dagger(z, y, q));
  b.verdict("Y <=cx X", Result::Holds, check_cx(y, x, q));
  b.verdict("X <=cx Z (the cx chain breaks here)", Result::Fails, check_cx(x, z, q));
  return b.finish();
}

// P(X + Y <= s) for independent Pareto(0.5) summands: integrate F_X(s - q_Y(u)) over u.
double independent_pareto_half_sum_cdf(double s, double tol) {
  if (s <= 2) return 0.0;
  const double u_max = 1 - 1 / std::sqrt(s - 1);
  return integrate_bounded(
      [s](double u) {
        const double rest = s - 1 / ((1 - u) * (1 - u));
        return rest > 1 ? 1 - 1 / std::sqrt(rest) : 0.0;
      },
      0.0, u_max, tol);
}

ScenarioReport example5(const GalleryConfig& cfg) {
  Builder b("example5_pareto_dcx", cfg.seed);
  const D x = D::pareto(0.5);
  const D twice = D::affine(2, 0, x);
  const auto ct = sum_distribution(countermono_version({x, x}), cfg.quad);
  b.label("counter-monotonic sum law certification", "grid_numeric", to_string(ct.cert.level));
  const auto v = check_dcx(ct.law, twice, cfg.quad);
  const std::string note = "grid_numeric on " + std::to_string(cfg.quad.grid_n) +
                           " probe points: evidence for the inequality at every w, not a proof";
  b.verdict("counter-monotonic X1 + X2 <=dcx 2X", Result::Holds, v, note);
  b.label("dcx verdict certification", "grid_numeric", to_string(v.cert.level));
  b.verdict("counter-monotonic X1 + X2 <=cx 2X", Result::Holds, check_cx(ct.law, twice, cfg.quad), note);

  if (cfg.external_crosscheck) {
    // 2X <=st X + Y with X, Y independent: F_2X(s) >= F_{X+Y}(s) on a probe grid.
    const int n = std::max(16, cfg.quad.grid_n / 10);
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= n; ++k) {
      const double p = static_cast<double>(k) / (n + 1);
      const double s = 2 / ((1 - p) * (1 - p));
      const double gap = cdf(twice, s) - independent_pareto_half_sum_cdf(s, 1e-12);
      worst = std::min(worst, gap);
    }
    b.flag("2X <=st X + Y (independent) on " + std::to_string(n) + " probe points", worst >= -1e-9,
           "grid_numeric cross-check by quadrature of the independent-sum cdf; smallest gap " +
               to_string(ExtReal(worst)));
  }
  return b.finish();
}

ScenarioReport corollary1(const GalleryConfig& cfg) {
  Builder b("corollary1_simons", cfg.seed);
  gen::Rng rng(cfg.seed);
  const std::vector<D> ms = {gen::random_discrete(rng, 8, 10), gen::random_discrete(rng, 8, 10)};
  auto sum = [](std::span<const double> v) { return v[0] + v[1]; };
  const MeanClass ref = expectation_of(comonotonic_version(ms), sum, cfg.quad);
  double worst = 0.0;
  const int couplings = 50;
  for (int i = 0; i < couplings; ++i) {
    const MeanClass e = expectation_of(Coupling::from_joint(gen::random_joint(ms, rng)), sum, cfg.quad);
    worst = std::max(worst, std::fabs(mean_value(e) - mean_value(ref)));
  }
  const double tol = 1e-12 * std::max(1.0, std::fabs(ref.value));
  b.numeric("largest deviation of E[X+Y] over " + std::to_string(couplings) + " random couplings", 0.0, worst, tol);
  const MeanClass ct = expectation_of(countermono_version(ms), sum, cfg.quad);
  b.numeric("counter-monotonic E[X+Y] equals the comonotonic one", mean_value(ref), mean_value(ct), tol);

  const D p = D::pareto(0.5);
  b.label("comonotonic Pareto(0.5) sum mean", "plus_inf",
          to_string(expectation_of(comonotonic_version({p, p}), sum, cfg.quad).kind));
  b.label("counter-monotonic Pareto(0.5) sum mean", "plus_inf",
          to_string(expectation_of(countermono_version({p, p}), sum, cfg.quad).kind));
  return b.finish();
}

ScenarioReport prop5(const GalleryConfig& cfg) {
  Builder b("prop5_finite_lattice", cfg.seed);
  gen::Rng rng(cfg.seed);
  const int trials = 30;
  int holds = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < trials; ++i) {
    const Axes axes = i % 2 ? Axes{{0, 1, 2}, {0, 1, 2}} : Axes{{0, 1}, {0, 1}, {0, 1}};
    const LatticeDist a = gen::random_lattice(rng, axes);
    std::vector<D> ms;
    for (int k = 0; k < a.dim(); ++k) ms.push_back(a.marginal(k));
    const LatticeDist co = LatticeDist::from_joint(*to_joint(comonotonic_version(ms)));
    const SmVerdict v = check_sm_lattice(a, co);
    holds += v.verdict.holds();
    worst = std::min(worst, v.lp_min);
  }
  b.numeric("random lattice joints supermodular-below their comonotonic version", trials, holds, 0.0);
  b.flag("smallest LP minimum >= -1e-9", worst >= -1e-9, "smallest LP minimum " + to_string(ExtReal(worst)));

  const Coupling c = three_uniform_coupling();
  const D u = D::uniform01();
  const MeanClass e = expectation_of(c, reciprocal_phi, cfg.quad);
  const MeanClass co = expectation_of(comonotonic_version({u, u, u}), reciprocal_phi, cfg.quad);
  b.flag("unbounded supermodular phi: E[phi] exceeds its comonotonic value",
         e.is_finite() && co.is_finite() && e.value > co.value,
         "E[phi] = " + to_string(ExtReal(e.value)) + ", comonotonic " + to_string(ExtReal(co.value)));
  return b.finish();
}

using Runner = ScenarioReport (*)(const GalleryConfig&);

const std::vector<std::pair<std::string, Runner>>& registry() {
  static const std::vector<std::pair<std::string, Runner>> r = {
      {"example1_simons3d", example1},
      {"example2_dagger", example2},
      {"example3_cauchy", example3},
      {"example4_transitivity_dagger", example4},
      {"example5_pareto_dcx", example5},
      {"corollary1_simons", corollary1},
      {"prop5_finite_lattice", prop5},
  };
  return r;
}

io::Json claim_value_to_json(const ClaimValue& v) {
  return std::visit(
      [](const auto& x) -> io::Json {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, double>) {
          return io::number_to_json(x);
        } else {
          return x;
        }
      },
      v);
}

ClaimValue claim_value_from_json(const io::Json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "-inf" || s == "nan") return io::number_from_json(j);
    return s;
  }
  throw InvalidArgument("report: claim values must be booleans, numbers or strings");
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, run] : registry()) n.push_back(name);
    return n;
  }();
  return names;
}

ScenarioReport run_scenario(const std::string& name, const GalleryConfig& cfg) {
  for (const auto& [n, run] : registry())
    if (n == name) return run(cfg);
  throw UnknownScenario(name);
}

io::Json to_json(const ScenarioReport& r) {
  io::Json claims = io::Json::array();
  for (const auto& c : r.claims) {
    claims.push_back({{"description", c.description},
                      {"expected", claim_value_to_json(c.expected)},
                      {"computed", claim_value_to_json(c.computed)},
                      {"pass", c.pass},
                      {"tolerance", c.tolerance},
                      {"note", c.note}});
  }
  return {{"name", r.name}, {"seed", r.seed}, {"claims", claims}, {"overall", r.overall}};
}

ScenarioReport report_from_json(const io::Json& j) {
  try {
    ScenarioReport r;
    r.name = j.at("name").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.overall = j.at("overall").get<bool>();
    for (const auto& c : j.at("claims")) {
      r.claims.push_back({c.at("description").get<std::string>(), claim_value_from_json(c.at("expected")),
                          claim_value_from_json(c.at("computed")), c.at("pass").get<bool>(),
                          c.at("tolerance").get<double>(), c.value("note", std::string())});
    }
    return r;
  } catch (const io::Json::exception& e) {
    throw InvalidArgument(std::string("report: ") + e.what());
  }
}

}  // namespace stochorder
