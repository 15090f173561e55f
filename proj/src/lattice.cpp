#include "stochorder/lattice.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "stochorder/error.hpp"
#include "stochorder/random.hpp"
#include "stochorder/simplex.hpp"

namespace stochorder {
namespace {

constexpr double kMassSlack = 1e-12;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using Shape = std::vector<int>;

Shape shape_of(const Axes& axes) {
  Shape s;
  for (const auto& a : axes) s.push_back(static_cast<int>(a.size()));
  return s;
}

Eigen::Index cell_count(const Shape& s) {
  Eigen::Index n = 1;
  for (int k : s) n *= k;
  return n;
}

std::vector<Eigen::Index> strides_of(const Shape& s) {
  std::vector<Eigen::Index> st(s.size(), 1);
  for (int k = static_cast<int>(s.size()) - 2; k >= 0; --k)
    st[static_cast<std::size_t>(k)] = st[static_cast<std::size_t>(k) + 1] * s[static_cast<std::size_t>(k) + 1];
  return st;
}

Shape unravel(Eigen::Index flat, const Shape& s) {
  Shape idx(s.size());
  for (int k = static_cast<int>(s.size()) - 1; k >= 0; --k) {
    const auto n = s[static_cast<std::size_t>(k)];
    idx[static_cast<std::size_t>(k)] = static_cast<int>(flat % n);
    flat /= n;
  }
  return idx;
}

// In-place inclusive prefix sums along every axis.
void prefix_sum(Eigen::VectorXd& t, const Shape& s) {
  const auto st = strides_of(s);
  for (std::size_t k = 0; k < s.size(); ++k)
    for (Eigen::Index f = 0; f < t.size(); ++f)
      if ((f / st[k]) % s[k] != 0) t(f) += t(f - st[k]);
}

// In-place inclusive suffix sums along every axis.
void suffix_sum(Eigen::VectorXd& t, const Shape& s) {
  const auto st = strides_of(s);
  for (std::size_t k = 0; k < s.size(); ++k)
    for (Eigen::Index f = t.size() - 1; f >= 0; --f)
      if ((f / st[k]) % s[k] != s[k] - 1) t(f) += t(f + st[k]);
}

Eigen::VectorXd joint_cdf(const LatticeDist& d) {
  Eigen::VectorXd c = d.pmf;
  prefix_sum(c, d.shape());
  return c;
}

// Shape n_k + 1 per axis: entry i holds P(X_k >= axis[i] for all k), i.e. the
// survival function at axis[i-1], with i = 0 standing for -inf.
Eigen::VectorXd extended_survival(const LatticeDist& d, Shape& ext) {
  const Shape s = d.shape();
  ext = s;
  for (int& k : ext) ++k;
  const auto st = strides_of(ext);
  Eigen::VectorXd t = Eigen::VectorXd::Zero(cell_count(ext));
  for (Eigen::Index f = 0; f < d.size(); ++f) {
    const Shape idx = unravel(f, s);
    Eigen::Index g = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) g += idx[k] * st[k];
    t(g) = d.pmf(f);
  }
  suffix_sum(t, ext);
  return t;
}

std::vector<double> coordinates(const Axes& axes, const Shape& idx, bool survival) {
  std::vector<double> x;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (!survival) {
      x.push_back(axes[k][static_cast<std::size_t>(idx[k])]);
    } else {
      x.push_back(idx[k] == 0 ? kNegInf : axes[k][static_cast<std::size_t>(idx[k] - 1)]);
    }
  }
  return x;
}

void require_same_dim(const LatticeDist& a, const LatticeDist& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("lattice laws of different dimension");
}

// Largest marginal discrepancy on merged grids, if any exceeds the slack.
std::optional<Witness> marginal_witness(const LatticeDist& a, const LatticeDist& b) {
  std::optional<Witness> best;
  double worst = kMassSlack;
  for (int k = 0; k < a.dim(); ++k) {
    const Eigen::VectorXd ma = a.marginal_pmf(k);
    const Eigen::VectorXd mb = b.marginal_pmf(k);
    for (Eigen::Index v = 0; v < ma.size(); ++v) {
      const double gap = std::fabs(ma(v) - mb(v));
      if (gap > worst) {
        worst = gap;
        best = Witness{static_cast<double>(k), {a.axes[static_cast<std::size_t>(k)][static_cast<std::size_t>(v)]},
                       ExtReal(ma(v)), ExtReal(mb(v)), Side::Marginal};
      }
    }
  }
  return best;
}

OrderVerdict marginal_failure(Witness w) {
  OrderVerdict v;
  v.result = Result::Fails;
  v.witness = std::move(w);
  v.note = "marginals differ";
  return v;
}

// Supermodularity rows: -(phi(x+ei+ej) - phi(x+ei) - phi(x+ej) + phi(x)) <= 0.
std::vector<std::array<Eigen::Index, 4>> mixed_difference_stencils(const Shape& s) {
  const auto st = strides_of(s);
  const Eigen::Index n = cell_count(s);
  std::vector<std::array<Eigen::Index, 4>> out;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      for (Eigen::Index f = 0; f < n; ++f) {
        if ((f / st[i]) % s[i] == s[i] - 1 || (f / st[j]) % s[j] == s[j] - 1) continue;
        out.push_back({f + st[i] + st[j], f + st[i], f + st[j], f});
      }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// LatticeDist

LatticeDist LatticeDist::make(Axes axes, Eigen::VectorXd pmf) {
  if (axes.size() < 2) throw InvalidArgument("lattice: dimension must be at least 2");
  for (const auto& a : axes) {
    if (a.empty()) throw InvalidArgument("lattice: empty axis");
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!std::isfinite(a[i])) throw InvalidArgument("lattice: axis values must be finite");
      if (i > 0 && !(a[i] > a[i - 1])) throw InvalidArgument("lattice: axes must be strictly increasing");
    }
  }
  if (pmf.size() != cell_count(shape_of(axes))) throw InvalidArgument("lattice: pmf size does not match axes");
  for (Eigen::Index i = 0; i < pmf.size(); ++i)
    if (!(pmf(i) >= 0.0) || !std::isfinite(pmf(i))) throw InvalidArgument("lattice: pmf must be nonnegative");
  if (std::fabs(pmf.sum() - 1.0) > kMassSlack) throw InvalidArgument("lattice: pmf must sum to 1");
  return LatticeDist{std::move(axes), std::move(pmf)};
}

LatticeDist LatticeDist::from_joint(const DiscreteJoint& j) {
  Axes axes(static_cast<std::size_t>(j.dim()));
  for (int k = 0; k < j.dim(); ++k) {
    auto& a = axes[static_cast<std::size_t>(k)];
    for (Eigen::Index r = 0; r < j.size(); ++r) a.push_back(j.atoms(r, k));
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  const Shape s = shape_of(axes);
  const auto st = strides_of(s);
  Eigen::VectorXd pmf = Eigen::VectorXd::Zero(cell_count(s));
  for (Eigen::Index r = 0; r < j.size(); ++r) {
    Eigen::Index f = 0;
    for (int k = 0; k < j.dim(); ++k) {
      const auto& a = axes[static_cast<std::size_t>(k)];
      f += (std::lower_bound(a.begin(), a.end(), j.atoms(r, k)) - a.begin()) * st[static_cast<std::size_t>(k)];
    }
    pmf(f) += j.probs(r);
  }
  return make(std::move(axes), std::move(pmf));
}

std::vector<int> LatticeDist::shape() const { return shape_of(axes); }

Eigen::VectorXd LatticeDist::marginal_pmf(int i) const {
  const Shape s = shape();
  const auto st = strides_of(s);
  const auto k = static_cast<std::size_t>(i);
  Eigen::VectorXd m = Eigen::VectorXd::Zero(s[k]);
  for (Eigen::Index f = 0; f < size(); ++f) m((f / st[k]) % s[k]) += pmf(f);
  return m;
}

Distribution LatticeDist::marginal(int i) const {
  const Eigen::VectorXd m = marginal_pmf(i);
  std::vector<std::pair<double, double>> vw;
  for (Eigen::Index v = 0; v < m.size(); ++v) vw.emplace_back(axes[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)], m(v));
  return Distribution::discrete_from_weighted(std::move(vw));
}

// ---------------------------------------------------------------------------
// LatticeFn

double LatticeFn::min_mixed_difference() const {
  const Shape s = shape_of(axes);
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& [pp, p0, p1, oo] : mixed_difference_stencils(s))
    lo = std::min(lo, values(pp) - values(p0) - values(p1) + values(oo));
  return lo;
}

bool LatticeFn::is_supermodular(double tol) const { return min_mixed_difference() >= -tol; }

double LatticeFn::expectation(const LatticeDist& d) const {
  if (d.axes != axes) throw InvalidArgument("lattice function and law live on different grids");
  return values.dot(d.pmf);
}

// ---------------------------------------------------------------------------
// Comparisons

std::pair<LatticeDist, LatticeDist> merge_grids(const LatticeDist& a, const LatticeDist& b) {
  require_same_dim(a, b);
  Axes axes(a.axes.size());
  for (std::size_t k = 0; k < axes.size(); ++k)
    std::set_union(a.axes[k].begin(), a.axes[k].end(), b.axes[k].begin(), b.axes[k].end(),
                   std::back_inserter(axes[k]));
  const Shape s = shape_of(axes);
  const auto st = strides_of(s);
  auto reindex = [&](const LatticeDist& d) {
    Eigen::VectorXd pmf = Eigen::VectorXd::Zero(cell_count(s));
    const Shape ds = d.shape();
    for (Eigen::Index f = 0; f < d.size(); ++f) {
      const Shape idx = unravel(f, ds);
      Eigen::Index g = 0;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        const auto& ax = axes[k];
        const double v = d.axes[k][static_cast<std::size_t>(idx[k])];
        g += (std::lower_bound(ax.begin(), ax.end(), v) - ax.begin()) * st[k];
      }
      pmf(g) += d.pmf(f);
    }
    return LatticeDist{axes, std::move(pmf)};
  };
  return {reindex(a), reindex(b)};
}

bool marginals_equal(const LatticeDist& a, const LatticeDist& b) {
  const auto [ma, mb] = merge_grids(a, b);
  return !marginal_witness(ma, mb).has_value();
}

OrderVerdict check_concordance(const LatticeDist& a0, const LatticeDist& b0) {
  const auto [a, b] = merge_grids(a0, b0);
  if (auto w = marginal_witness(a, b)) return marginal_failure(*w);

  OrderVerdict v;
  double worst = kMassSlack;
  auto scan = [&](const Eigen::VectorXd& ta, const Eigen::VectorXd& tb, const Shape& s, bool survival) {
    for (Eigen::Index f = 0; f < ta.size(); ++f) {
      const double gap = ta(f) - tb(f);
      if (gap > worst) {
        worst = gap;
        v.result = Result::Fails;
        v.witness = Witness{static_cast<double>(f), coordinates(a.axes, unravel(f, s), survival), ExtReal(ta(f)),
                            ExtReal(tb(f)), survival ? Side::Survival : Side::Cdf};
      }
    }
  };
  scan(joint_cdf(a), joint_cdf(b), a.shape(), false);
  Shape ext;
  const Eigen::VectorXd sa = extended_survival(a, ext);
  const Eigen::VectorXd sb = extended_survival(b, ext);
  scan(sa, sb, ext, true);
  return v;
}

SmVerdict check_sm_lattice(const LatticeDist& a0, const LatticeDist& b0, const SmConfig& cfg) {
  const auto [a, b] = merge_grids(a0, b0);
  const Eigen::Index n = a.size();
  if (n > cfg.max_cells)
    throw GridTooLarge("supermodular check: merged grid has " + std::to_string(n) + " cells, cap is " +
                       std::to_string(cfg.max_cells));

  // psi = phi + 1 in [0, 2] keeps the origin feasible.
  const auto stencils = mixed_difference_stencils(a.shape());
  const auto m = static_cast<Eigen::Index>(stencils.size());
  lp::Problem p;
  p.c = b.pmf - a.pmf;
  p.a_ub = Eigen::MatrixXd::Zero(m + n, n);
  p.b_ub = Eigen::VectorXd::Zero(m + n);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto& [pp, p0, p1, oo] = stencils[static_cast<std::size_t>(r)];
    p.a_ub(r, pp) -= 1.0;
    p.a_ub(r, p0) += 1.0;
    p.a_ub(r, p1) += 1.0;
    p.a_ub(r, oo) -= 1.0;
  }
  p.a_ub.bottomRows(n).setIdentity();
  p.b_ub.tail(n).setConstant(2.0);
  const lp::Solution sol = lp::solve(p);
  if (sol.status != lp::Status::Optimal) throw LpFailure("supermodular check: simplex did not reach an optimum");

  SmVerdict out;
  LatticeFn phi{a.axes, sol.x.array() - 1.0};
  const double ea = phi.expectation(a);
  const double eb = phi.expectation(b);
  out.lp_min = eb - ea;

  if (auto w = marginal_witness(a, b)) {
    out.verdict = marginal_failure(*w);
    return out;
  }
  if (out.lp_min >= -cfg.tol) return out;

  if (!phi.is_supermodular(1e-12) || !(ea > eb + cfg.tol / 2))
    throw LpFailure("supermodular check: certificate failed verification");
  out.verdict.result = Result::Fails;
  out.verdict.witness = Witness{0.0, {}, ExtReal(ea), ExtReal(eb), Side::TestFunction};
  out.verdict.note = "supermodular certificate attached";
  out.certificate = std::move(phi);
  return out;
}

// ---------------------------------------------------------------------------
// Search

namespace {

// Random supermodular function on the grid {0..g-1}^d: either a convex
// function of a sum of increasing maps, or a product of nonnegative increasing maps.
Eigen::VectorXd random_supermodular(gen::Rng& rng, const Shape& s) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> g(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    double acc = 0.0;
    for (int v = 0; v < s[k]; ++v) {
      g[k].push_back(acc);
      acc += unit(rng);
    }
  }
  const bool product = unit(rng) < 0.3;
  double top = 0.0;
  for (const auto& gk : g) top += gk.back();
  const double w = unit(rng) * top;
  Eigen::VectorXd phi(cell_count(s));
  for (Eigen::Index f = 0; f < phi.size(); ++f) {
    const Shape idx = unravel(f, s);
    double acc = product ? 1.0 : 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const double x = g[k][static_cast<std::size_t>(idx[k])];
      acc = product ? acc * x : acc + x;
    }
    phi(f) = product ? acc : std::max(acc - w, 0.0);
  }
  return phi;
}

}  // namespace

std::optional<ConcordanceGap> search_concordance_not_sm(int dim, int grid_size, std::uint64_t seed, long budget) {
  if (dim < 2) throw InvalidArgument("search: dimension must be at least 2");
  if (grid_size < 2) throw InvalidArgument("search: grid_size must be at least 2");
  gen::Rng rng(seed);
  Axes axes(static_cast<std::size_t>(dim));
  for (auto& ax : axes)
    for (int v = 0; v < grid_size; ++v) ax.push_back(v);
  const Shape s = shape_of(axes);
  const Eigen::Index n = cell_count(s);
  Shape ext = s;
  for (int& k : ext) ++k;

  // Constraint matrices depend only on the grid: cdf rows, survival rows,
  // and one marginal row per (axis, value).
  Eigen::MatrixXd cdf_rows = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd surv_rows = Eigen::MatrixXd::Zero(cell_count(ext), n);
  Eigen::MatrixXd marg_rows = Eigen::MatrixXd::Zero(dim * grid_size, n);
  for (Eigen::Index f = 0; f < n; ++f) {
    const Shape idx = unravel(f, s);
    for (Eigen::Index g = 0; g < n; ++g) {
      const Shape jdx = unravel(g, s);
      bool below = true;
      for (std::size_t k = 0; k < idx.size(); ++k) below = below && jdx[k] <= idx[k];
      if (below) cdf_rows(f, g) = 1.0;
    }
    for (std::size_t k = 0; k < idx.size(); ++k) marg_rows(static_cast<Eigen::Index>(k) * grid_size + idx[k], f) = 1.0;
  }
  for (Eigen::Index e = 0; e < surv_rows.rows(); ++e) {
    const Shape eidx = unravel(e, ext);
    for (Eigen::Index g = 0; g < n; ++g) {
      const Shape jdx = unravel(g, s);
      bool above = true;
      for (std::size_t k = 0; k < jdx.size(); ++k) above = above && jdx[k] >= eidx[k];
      if (above) surv_rows(e, g) = 1.0;
    }
  }
  lp::Problem p;
  p.a_ub.resize(cdf_rows.rows() + surv_rows.rows(), n);
  p.a_ub << -cdf_rows, -surv_rows;
  p.a_eq = marg_rows;

  for (long draw = 1; draw <= budget; ++draw) {
    const auto w = gen::dirichlet(rng, static_cast<int>(n));
    const Eigen::VectorXd pa = Eigen::Map<const Eigen::VectorXd>(w.data(), n);
    const Eigen::VectorXd phi = random_supermodular(rng, s);
    p.c = phi;
    p.b_ub = p.a_ub * pa;
    p.b_eq = marg_rows * pa;
    const lp::Solution sol = lp::solve(p);
    if (sol.status != lp::Status::Optimal) continue;
    if (!(sol.value < phi.dot(pa) - 1e-7)) continue;

    Eigen::VectorXd pb = sol.x.cwiseMax(0.0);
    pb /= pb.sum();
    const LatticeDist a = LatticeDist::make(axes, pa / pa.sum());
    const LatticeDist b = LatticeDist::make(axes, pb);
    if (!check_concordance(a, b).holds()) continue;
    SmVerdict sm = check_sm_lattice(a, b);
    if (!sm.verdict.fails() || !sm.certificate) continue;
    return ConcordanceGap{a, b, std::move(*sm.certificate), draw};
  }
  return std::nullopt;
}

}  // namespace stochorder
