// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "stochorder/couplings.hpp"
#include "stochorder/gallery.hpp"
#include "stochorder/lattice.hpp"
#include "stochorder/orders.hpp"
#include "stochorder/ot.hpp"
#include "stochorder/random.hpp"

using namespace stochorder;
using D = Distribution;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

LatticeDist lattice_of(const Coupling& c) { return LatticeDist::from_joint(*to_joint(c)); }

bool exact_holds(const OrderVerdict& v) { return v.holds() && v.cert.level == Certification::Level::Exact; }

std::vector<D> low_tail_marginals(gen::Rng& rng, int d, int max_atoms) {
  std::vector<D> ms;
  const auto tails = gen::dirichlet(rng, d + 1);
  for (int k = 0; k < d; ++k) ms.push_back(gen::random_discrete_low_tail(rng, max_atoms, 4, tails[static_cast<std::size_t>(k)]));
  return ms;
}

D empirical(const std::vector<double>& v) {
  std::vector<std::pair<double, double>> vw;
  for (double x : v) vw.emplace_back(x, 1.0 / static_cast<double>(v.size()));
  return D::discrete_from_weighted(std::move(vw));
}

Outcome ac1() {
  const auto r = run_scenario("example1_simons3d");
  double value = std::numeric_limits<double>::quiet_NaN();
  double co = value;
  for (const auto& c : r.claims) {
    if (c.description == "E[phi(X,Y,Z)] = 2 ln 2") value = std::get<double>(c.computed);
    if (c.description == "E[phi] under the comonotonic coupling") co = std::get<double>(c.computed);
  }
  const bool ok = std::fabs(value - 2 * std::numbers::ln2) <= 1e-6 && co == 0.0 && r.overall;
  char buf[160];
  std::snprintf(buf, sizeof buf, "E[phi]=%.9f (|err| %.2e), comonotonic %.17g, scenario %s", value,
                std::fabs(value - 2 * std::numbers::ln2), co, r.overall ? "pass" : "fail");
  return {ok, buf};
}

Outcome ac2() {
  gen::Rng rng(2);
  int ok = 0, oracle_contradictions = 0;
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    const std::vector<D> ms = {gen::random_discrete(rng, 8, 10), gen::random_discrete(rng, 8, 10)};
    const auto s = sum_distribution(Coupling::from_joint(gen::random_joint(ms, rng))).law;
    const auto ct = sum_distribution(countermono_version(ms)).law;
    const auto co = sum_distribution(comonotonic_version(ms)).law;
    const bool lower = exact_holds(check_cx(ct, s));
    const bool upper = exact_holds(check_cx(s, co));
    ok += lower && upper;
    oracle_contradictions += cx_bruteforce_oracle(ct, s, 1000, rng()).holds() != lower;
    oracle_contradictions += cx_bruteforce_oracle(s, co, 1000, rng()).holds() != upper;
  }
  return {ok == n && oracle_contradictions == 0,
          std::to_string(ok) + "/" + std::to_string(n) + " exact holds both bounds, " +
              std::to_string(oracle_contradictions) + " oracle contradictions"};
}

Outcome ac3() {
  gen::Rng rng(3);
  int ok = 0, total = 0, sm_checked = 0;
  double worst_lp = std::numeric_limits<double>::infinity();
  for (int d : {3, 4}) {
    for (int i = 0; i < 100; ++i) {
      ++total;
      const auto ms = low_tail_marginals(rng, d, d == 3 ? 4 : 3);
      if (countermono_existence(ms) == CtExistence::NotExists) continue;
      const auto joint = gen::random_joint(ms, rng);
      const auto s = sum_distribution(Coupling::from_joint(joint)).law;
      const auto ctc = countermono_version(ms);
      bool good = exact_holds(check_cx(s, sum_distribution(comonotonic_version(ms)).law)) &&
                  exact_holds(check_cx(sum_distribution(ctc).law, s));
      const auto a = LatticeDist::from_joint(joint);
      const auto ct = lattice_of(ctc);
      if (a.size() <= 256) {
        const auto sm = check_sm_lattice(ct, a);
        worst_lp = std::min(worst_lp, sm.lp_min);
        good = good && sm.verdict.holds() && sm.lp_min >= -1e-9;
        ++sm_checked;
      }
      ok += good;
    }
  }
  // Comonotonic sums of cx-larger marginals dominate every coupling of the smaller ones.
  int spread_ok = 0;
  const int spread_n = 100;
  for (int i = 0; i < spread_n; ++i) {
    const int d = 2 + i % 3;
    std::vector<D> small, large;
    for (int k = 0; k < d; ++k) {
      small.push_back(gen::random_discrete(rng, 4, 4));
      large.push_back(gen::mean_preserving_spread(small.back(), rng, 2));
    }
    const auto s = sum_distribution(Coupling::from_joint(gen::random_joint(small, rng))).law;
    spread_ok += exact_holds(check_cx(s, sum_distribution(comonotonic_version(large)).law));
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "%d/%d extremal bounds (%d lattice LPs, worst LP min %.3g), %d/%d spread bounds", ok,
                total, sm_checked, worst_lp, spread_ok, spread_n);
  return {ok == total && sm_checked == total && spread_ok == spread_n, buf};
}

Outcome ac4() {
  const D x = D::pareto(0.5);
  const D y = D::affine(-1, 0, x);
  const double inf = std::numeric_limits<double>::infinity();
  const bool dagger = check_cx_dagger(x, y).holds() && check_cx_dagger(y, x).holds();
  auto witness_ok = [&](const OrderVerdict& v, Side side) {
    return v.fails() && v.witness && v.witness->at == 0.0 && v.witness->side == side && v.witness->lhs.value() == inf &&
           v.witness->rhs.value() == 0.0;
  };
  const auto xy = check_cx(x, y);
  const auto yx = check_cx(y, x);
  const bool cx = witness_ok(xy, Side::Plus) && witness_ok(yx, Side::Minus);
  const bool repeat = check_cx(x, y).witness->lhs == xy.witness->lhs && check_cx(y, x).witness->side == yx.witness->side;
  return {dagger && cx && repeat, std::string("dagger both ways ") + (dagger ? "hold" : "do not hold") +
                                      ", cx witnesses " + (cx ? "w=0 plus/minus inf vs 0" : "mismatch")};
}

Outcome ac5() {
  const D c = D::cauchy();
  const D c2 = D::affine(2, 0, c);
  const bool cauchy = check_cx(c, c2).holds() && check_cx(c2, c).holds();
  gen::Rng rng(5);
  int violations = 0, chains = 0;
  for (int i = 0; i < 200; ++i) {
    const D x = gen::random_discrete(rng, 6, 6);
    // Half the triples are spread chains so that the premise is exercised.
    const D y = i % 2 ? gen::mean_preserving_spread(x, rng, 2) : gen::random_discrete(rng, 6, 6);
    const D z = i % 2 ? gen::mean_preserving_spread(y, rng, 2) : gen::random_discrete(rng, 6, 6);
    if (check_cx(x, y).holds() && check_cx(y, z).holds()) {
      ++chains;
      violations += !check_cx(x, z).holds();
    }
  }
  return {cauchy && violations == 0 && chains > 0,
          std::string("Cauchy vs 2 Cauchy ") + (cauchy ? "holds both ways" : "wrong") + ", " + std::to_string(chains) +
              " chained triples, " + std::to_string(violations) + " violations"};
}

Outcome ac6() {
  gen::Rng rng(6);
  int agree = 0, holds = 0;
  for (int i = 0; i < 100; ++i) {
    const auto a = gen::random_lattice(rng, {{0, 1, 2, 3}, {0, 1, 2, 3}});
    const auto b = gen::marginal_preserving_moves(a, rng, 3, 0.8);
    const bool c = check_concordance(a, b).holds();
    const bool s = check_sm_lattice(a, b).verdict.holds();
    agree += c == s;
    holds += c;
  }
  const auto gap = search_concordance_not_sm(3, 3, 20240917, 10000);
  bool verified = false;
  if (gap) {
    const auto sm = check_sm_lattice(gap->a, gap->b);
    verified = check_concordance(gap->a, gap->b).holds() && sm.verdict.fails() && gap->certificate.is_supermodular() &&
               gap->certificate.expectation(gap->a) > gap->certificate.expectation(gap->b);
  }
  return {agree == 100 && verified,
          std::to_string(agree) + "/100 agree (" + std::to_string(holds) + " concordant), d=3 search " +
              (gap ? "found after " + std::to_string(gap->draws) + " draws, " + (verified ? "verified" : "NOT verified")
                   : std::string("found nothing"))};
}

Outcome ac7() {
  gen::Rng rng(7);
  std::uniform_int_distribution<int> atom(-6, 6), size(1, 7), pick(0, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int ok = 0;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int n = size(rng);
    std::vector<double> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
    for (double& x : xs) x = atom(rng);
    for (double& y : ys) y = atom(rng);
    CostFn c;
    switch (pick(rng)) {
      case 0: c = cost_by_name("product"); break;
      case 1: c = cost_by_name("neg_sq_diff"); break;
      case 2: c = cost_by_name("abs_diff_neg"); break;
      default: c = cost_by_name("cx_of_sum:" + std::to_string(atom(rng))); break;
    }
    const auto ext = ot_extremes_supermodular(empirical(xs), empirical(ys), c);
    const auto lo = assignment_oracle(xs, ys, c, OptMode::Min);
    const auto hi = assignment_oracle(xs, ys, c, OptMode::Max);
    const double dlo = std::fabs(ext.min.value - lo.value) / std::max(1.0, std::fabs(lo.value));
    const double dhi = std::fabs(ext.max.value - hi.value) / std::max(1.0, std::fabs(hi.value));
    worst = std::max({worst, dlo, dhi});
    ok += ext.min.is_finite() && ext.max.is_finite() && dlo <= 1e-12 && dhi <= 1e-12;
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "%d/50 pairs match, worst relative gap %.3g", ok, worst);
  return {ok == 50, buf};
}

Outcome ac8() {
  QuadConfig cfg;
  cfg.grid_n = 1000;
  const D x = D::pareto(0.5);
  const auto ct = sum_distribution(countermono_version({x, x}), cfg);
  const auto v = check_dcx(ct.law, D::affine(2, 0, x), cfg);
  const bool grid = v.cert.level == Certification::Level::GridNumeric && v.cert.grid_n == 1000;
  const auto report = run_scenario("example5_pareto_dcx");
  bool labeled = false;
  for (const auto& c : report.claims) labeled = labeled || c.note.find("not a proof") != std::string::npos;
  return {v.holds() && grid && labeled,
          std::string(v.holds() ? "holds" : "does not hold") + " on " + std::to_string(v.cert.grid_n) +
              " probes, level " + to_string(v.cert.level) + (labeled ? ", labeled evidence-level" : ", label missing")};
}

Outcome ac9() {
  gen::Rng rng(9);
  int ok = 0, total = 0;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const std::vector<D> ms = {gen::random_discrete(rng, 8, 10), gen::random_discrete(rng, 8, 10)};
    const double ref = mean_class(ms[0]).value + mean_class(ms[1]).value;
    for (int k = 0; k < 50; ++k) {
      ++total;
      const auto m = mean_class(sum_distribution(Coupling::from_joint(gen::random_joint(ms, rng))).law);
      const double dev = std::fabs(m.value - ref);
      worst = std::max(worst, dev);
      ok += m.is_finite() && dev <= 1e-12 * std::max(1.0, std::fabs(ref));
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "%d/%d couplings agree, worst deviation %.3g", ok, total, worst);
  return {ok == total, buf};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"AC1", 1, ac1},  {"AC2", 30, ac2}, {"AC3", 60, ac3}, {"AC4", 1, ac4}, {"AC5", 60, ac5},
      {"AC6", 60, ac6}, {"AC7", 60, ac7}, {"AC8", 60, ac8}, {"AC9", 60, ac9},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs < c.budget_s;
    failed += !pass;
    std::printf("%s %s  %s  [%.2fs, budget %.0fs]\n", c.id, pass ? "PASS" : "FAIL", o.detail.c_str(), secs,
                c.budget_s);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
