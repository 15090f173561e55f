#include "stochorder/dist.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numbers>
#include <numeric>
#include <sstream>

namespace stochorder {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw InvalidArgument(std::string(what) + " must be finite");
}

law::Discrete build_discrete(std::vector<double> atoms, std::vector<double> probs) {
  law::Discrete d;
  const std::size_t n = atoms.size();
  d.mass_le.resize(n);
  d.mass_gt.resize(n);
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    acc += probs[k];
    d.mass_le[k] = acc;
  }
  acc = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    d.mass_gt[k] = acc;
    acc += probs[k];
  }
  d.atoms = std::move(atoms);
  d.probs = std::move(probs);
  return d;
}

// Monotone bijection from doubles onto unsigned integers.
std::uint64_t order_key(double x) {
  std::uint64_t u;
  std::memcpy(&u, &x, sizeof u);
  return (u >> 63) ? ~u : (u | 0x8000000000000000ULL);
}

double from_order_key(std::uint64_t k) {
  const std::uint64_t u = (k >> 63) ? (k & 0x7fffffffffffffffULL) : ~k;
  double x;
  std::memcpy(&x, &u, sizeof x);
  return x;
}

// Smallest x in [lo, hi] with pred(x) true, for pred monotone false -> true
// and pred(hi) true.
template <class Pred>
double first_true(double lo, double hi, Pred pred) {
  if (pred(lo)) return lo;
  std::uint64_t a = order_key(lo);
  std::uint64_t b = order_key(hi);
  while (b - a > 1) {
    const std::uint64_t m = a + (b - a) / 2;
    if (pred(from_order_key(m)))
      b = m;
    else
      a = m;
  }
  return from_order_key(b);
}

struct Masses {
  double le;
  double gt;
};

// Lebesgue measure of {t in (0,1) : pred(Q(t))} where the set is an initial
// segment of (0,1); returned with both the measure and its complement kept
// accurate.
template <class Pred>
Masses initial_segment_measure(const UnitFn& q, Pred pred) {
  constexpr double kTiny = std::numeric_limits<double>::denorm_min();
  if (pred(q(UnitPoint{0.5, 0.5}))) {
    // Boundary lies in the upper half: smallest tc at which pred holds.
    if (pred(q(UnitPoint{1.0, kTiny}))) return {1.0, 0.0};
    const double tc = first_true(kTiny, 0.5, [&](double s) { return pred(q(UnitPoint{1.0 - s, s})); });
    return {1.0 - tc, tc};
  }
  if (!pred(q(UnitPoint{kTiny, 1.0}))) return {0.0, 1.0};
  // Largest t in (0, 0.5) with pred true == first t where it turns false.
  const double t = first_true(kTiny, 0.5, [&](double s) { return !pred(q(UnitPoint{s, 1.0 - s})); });
  return {t, 1.0 - t};
}

UnitFn left_quantile_fn(const Distribution& d) {
  return [d](UnitPoint u) { return quantile(d, u); };
}

// Levels are compared against the accumulated-from-below masses (the same
// numbers cdf reports) except deep in the upper tail, where the complement
// carries the precision.
constexpr double kDeepTail = 1e-3;

std::size_t discrete_left_index(const law::Discrete& d, UnitPoint u) {
  const std::size_t n = d.atoms.size();
  std::size_t k;
  if (u.tc >= kDeepTail) {
    k = static_cast<std::size_t>(std::lower_bound(d.mass_le.begin(), d.mass_le.end(), u.t) -
                                 d.mass_le.begin());
  } else {
    k = static_cast<std::size_t>(
        std::partition_point(d.mass_gt.begin(), d.mass_gt.end(), [&](double g) { return g > u.tc; }) -
        d.mass_gt.begin());
  }
  return std::min(k, n - 1);
}

std::size_t discrete_right_index(const law::Discrete& d, UnitPoint u) {
  const std::size_t n = d.atoms.size();
  std::size_t k;
  if (u.tc >= kDeepTail) {
    k = static_cast<std::size_t>(std::upper_bound(d.mass_le.begin(), d.mass_le.end(), u.t) -
                                 d.mass_le.begin());
  } else {
    k = static_cast<std::size_t>(
        std::partition_point(d.mass_gt.begin(), d.mass_gt.end(), [&](double g) { return g >= u.tc; }) -
        d.mass_gt.begin());
  }
  return std::min(k, n - 1);
}

// P(X <= x) and P(X > x) for laws given by a monotone quantile function.
Masses quantile_masses_le(const UnitFn& q, double x) {
  return initial_segment_measure(q, [x](double v) { return v <= x; });
}
Masses quantile_masses_lt(const UnitFn& q, double x) {
  return initial_segment_measure(q, [x](double v) { return v < x; });
}

enum class Rel { Le, Lt, Gt, Ge };

double prob_rel(const Distribution& d, double x, Rel rel);

double prob_rel_impl(const law::Discrete& d, double x, Rel rel) {
  const std::size_t n = d.atoms.size();
  if (rel == Rel::Le || rel == Rel::Gt) {
    // Index of the first atom strictly above x.
    const auto k = static_cast<std::size_t>(std::upper_bound(d.atoms.begin(), d.atoms.end(), x) -
                                            d.atoms.begin());
    if (rel == Rel::Le) return k == 0 ? 0.0 : d.mass_le[k - 1];
    return k == 0 ? 1.0 : (k == n ? 0.0 : d.mass_gt[k - 1]);
  }
  const auto k = static_cast<std::size_t>(std::lower_bound(d.atoms.begin(), d.atoms.end(), x) -
                                          d.atoms.begin());
  if (rel == Rel::Lt) return k == 0 ? 0.0 : d.mass_le[k - 1];
  return k == 0 ? 1.0 : (k == n ? 0.0 : d.mass_gt[k - 1]);
}

double continuous_rel(double le, double gt, Rel rel) {
  return (rel == Rel::Le || rel == Rel::Lt) ? le : gt;
}

double prob_rel(const Distribution& d, double x, Rel rel) {
  using std::numbers::pi;
  return std::visit(
      Overloaded{
          [&](const law::Discrete& v) { return prob_rel_impl(v, x, rel); },
          [&](const law::Uniform01&) {
            const double le = std::clamp(x, 0.0, 1.0);
            return continuous_rel(le, std::clamp(1.0 - x, 0.0, 1.0), rel);
          },
          [&](const law::Pareto& v) {
            if (x < 1.0) return continuous_rel(0.0, 1.0, rel);
            const double gt = std::pow(x, -v.alpha);
            return continuous_rel(-std::expm1(-v.alpha * std::log(x)), gt, rel);
          },
          [&](const law::Cauchy&) {
            if (x == 0.0) return 0.5;
            if (x < 0) {
              const double le = std::atan(-1.0 / x) / pi;
              return continuous_rel(le, 1.0 - le, rel);
            }
            const double gt = std::atan(1.0 / x) / pi;
            return continuous_rel(1.0 - gt, gt, rel);
          },
          [&](const law::PointMass& v) {
            switch (rel) {
              case Rel::Le: return x >= v.c ? 1.0 : 0.0;
              case Rel::Lt: return x > v.c ? 1.0 : 0.0;
              case Rel::Gt: return x < v.c ? 1.0 : 0.0;
              case Rel::Ge: return x <= v.c ? 1.0 : 0.0;
            }
            return 0.0;
          },
          [&](const law::Affine& v) {
            const double y = (x - v.b) / v.a;
            if (v.a > 0) return prob_rel(v.base, y, rel);
            switch (rel) {
              case Rel::Le: return prob_rel(v.base, y, Rel::Ge);
              case Rel::Lt: return prob_rel(v.base, y, Rel::Gt);
              case Rel::Gt: return prob_rel(v.base, y, Rel::Lt);
              case Rel::Ge: return prob_rel(v.base, y, Rel::Le);
            }
            return 0.0;
          },
          [&](const law::Mixture& v) {
            double acc = 0.0;
            for (std::size_t i = 0; i < v.components.size(); ++i)
              acc += v.weights[i] * prob_rel(v.components[i], x, rel);
            return acc;
          },
          [&](const law::Pushforward& v) {
            const auto& g = v.sorted_grid;
            const double n = static_cast<double>(g.size());
            const auto le = static_cast<double>(std::upper_bound(g.begin(), g.end(), x) - g.begin());
            const auto lt = static_cast<double>(std::lower_bound(g.begin(), g.end(), x) - g.begin());
            switch (rel) {
              case Rel::Le: return le / n;
              case Rel::Lt: return lt / n;
              case Rel::Gt: return (n - le) / n;
              case Rel::Ge: return (n - lt) / n;
            }
            return 0.0;
          },
          [&](const auto&) {
            const UnitFn q = left_quantile_fn(d);
            const Masses m = (rel == Rel::Le || rel == Rel::Gt) ? quantile_masses_le(q, x)
                                                                 : quantile_masses_lt(q, x);
            return (rel == Rel::Le || rel == Rel::Lt) ? m.le : m.gt;
          },
      },
      d.node().v);
}

double mixture_quantile(const law::Mixture& m, const Distribution& self, UnitPoint u, bool right) {
  double lo = kInf;
  double hi = -kInf;
  for (const auto& c : m.components) {
    const double v = right ? right_quantile(c, u) : quantile(c, u);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  auto pred = [&](double x) {
    if (u.t <= 0.5) {
      const double le = cdf(self, x);
      return right ? le > u.t : le >= u.t;
    }
    const double gt = prob_gt(self, x);
    return right ? gt < u.tc : gt <= u.tc;
  };
  if (!pred(hi)) return hi;
  return first_true(lo, hi, pred);
}

ExtReal numeric_integral(const UnitFn& f, const QuadConfig& cfg) {
  return integrate_quantile(f, 0.0, 1.0, cfg);
}

// Integrand source for laws without closed forms: left quantile for the
// monotone kinds, the transport map itself for pushforwards.
UnitFn value_map(const Distribution& d) {
  if (const auto* p = std::get_if<law::Pushforward>(&d.node().v)) return p->map;
  return left_quantile_fn(d);
}

MeanClass numeric_mean_class(const Distribution& d, const QuadConfig& cfg) {
  const UnitFn g = value_map(d);
  const ExtReal pos = numeric_integral([&g](UnitPoint u) { return std::max(g(u), 0.0); }, cfg);
  const ExtReal neg = numeric_integral([&g](UnitPoint u) { return std::max(-g(u), 0.0); }, cfg);
  return classify_parts(pos, neg);
}

ExtReal numeric_stop_loss(const Distribution& d, double w, bool plus, const QuadConfig& cfg) {
  const auto [lo, hi] = support_bounds(d);
  if (plus && hi.is_finite() && w >= hi.value()) return ExtReal(0.0);
  if (!plus && lo.is_finite() && w <= lo.value()) return ExtReal(0.0);
  const UnitFn g = value_map(d);
  QuadConfig scaled = cfg;
  scaled.tol = cfg.tol * std::max(1.0, std::fabs(w));
  if (plus) return numeric_integral([&g, w](UnitPoint u) { return std::max(g(u) - w, 0.0); }, scaled);
  return numeric_integral([&g, w](UnitPoint u) { return std::max(w - g(u), 0.0); }, scaled);
}

void check_p(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("tail integral level must lie in (0,1)");
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction

Distribution Distribution::discrete(std::vector<double> atoms, std::vector<double> probs) {
  if (atoms.empty() || atoms.size() != probs.size())
    throw InvalidArgument("discrete: atoms and probs must be non-empty and of equal length");
  double total = 0.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    require_finite(atoms[k], "discrete atom");
    if (!(probs[k] > 0.0) || !std::isfinite(probs[k]))
      throw InvalidArgument("discrete: probabilities must be positive");
    if (k > 0 && !(atoms[k] > atoms[k - 1]))
      throw InvalidArgument("discrete: atoms must be strictly increasing");
    total += probs[k];
  }
  if (std::fabs(total - 1.0) > 1e-12) throw InvalidArgument("discrete: probabilities must sum to 1");
  return Distribution(std::make_shared<const Node>(Node{build_discrete(std::move(atoms), std::move(probs))}));
}

Distribution Distribution::discrete_from_weighted(std::vector<std::pair<double, double>> vw) {
  std::sort(vw.begin(), vw.end());
  std::vector<double> atoms;
  std::vector<double> probs;
  double total = 0.0;
  for (const auto& [v, w] : vw) {
    require_finite(v, "discrete atom");
    if (w < 0 || !std::isfinite(w)) throw InvalidArgument("discrete: negative weight");
    if (w == 0.0) continue;
    total += w;
    if (!atoms.empty() && atoms.back() == v) {
      probs.back() += w;
    } else {
      atoms.push_back(v);
      probs.push_back(w);
    }
  }
  if (atoms.empty() || !(total > 0)) throw InvalidArgument("discrete: no positive mass");
  for (double& p : probs) p /= total;
  if (atoms.size() == 1) return point_mass(atoms[0]);
  return Distribution(std::make_shared<const Node>(Node{build_discrete(std::move(atoms), std::move(probs))}));
}

Distribution Distribution::uniform01() { return Distribution(std::make_shared<const Node>(Node{law::Uniform01{}})); }

Distribution Distribution::pareto(double alpha) {
  if (!(alpha > 0) || !std::isfinite(alpha)) throw InvalidArgument("pareto: alpha must be positive");
  return Distribution(std::make_shared<const Node>(Node{law::Pareto{alpha}}));
}

Distribution Distribution::cauchy() { return Distribution(std::make_shared<const Node>(Node{law::Cauchy{}})); }

Distribution Distribution::point_mass(double c) {
  require_finite(c, "point mass location");
  return Distribution(std::make_shared<const Node>(Node{law::PointMass{c}}));
}

Distribution Distribution::affine(double a, double b, const Distribution& base) {
  require_finite(a, "affine scale");
  require_finite(b, "affine shift");
  if (a == 0.0) throw InvalidArgument("affine: scale must be non-zero");
  if (a == 1.0 && b == 0.0) return base;
  if (auto dv = as_discrete(base)) {
    std::vector<std::pair<double, double>> vw;
    for (std::size_t k = 0; k < dv->atoms.size(); ++k) vw.emplace_back(a * dv->atoms[k] + b, dv->probs[k]);
    return discrete_from_weighted(std::move(vw));
  }
  if (const auto* inner = std::get_if<law::Affine>(&base.node().v))
    return affine(a * inner->a, a * inner->b + b, inner->base);
  return Distribution(std::make_shared<const Node>(Node{law::Affine{a, b, base}}));
}

Distribution Distribution::mixture(std::vector<double> weights, std::vector<Distribution> components) {
  if (components.empty() || weights.size() != components.size())
    throw InvalidArgument("mixture: need at least one component and one weight per component");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0) || !std::isfinite(w)) throw InvalidArgument("mixture: weights must be positive");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw InvalidArgument("mixture: weights must sum to 1");
  if (components.size() == 1) return components[0];
  if (std::all_of(components.begin(), components.end(), [](const Distribution& c) { return c.is_discrete(); })) {
    std::vector<std::pair<double, double>> vw;
    for (std::size_t i = 0; i < components.size(); ++i) {
      const auto dv = *as_discrete(components[i]);
      for (std::size_t k = 0; k < dv.atoms.size(); ++k) vw.emplace_back(dv.atoms[k], weights[i] * dv.probs[k]);
    }
    return discrete_from_weighted(std::move(vw));
  }
  return Distribution(std::make_shared<const Node>(Node{law::Mixture{std::move(weights), std::move(components)}}));
}

Distribution Distribution::comonotonic_sum(std::vector<Distribution> components) {
  if (components.empty()) throw InvalidArgument("comonotonic_sum: no components");
  double shift = 0.0;
  std::vector<Distribution> rest;
  for (auto& c : components) {
    if (const auto* pm = std::get_if<law::PointMass>(&c.node().v))
      shift += pm->c;
    else
      rest.push_back(std::move(c));
  }
  if (rest.empty()) return point_mass(shift);
  if (rest.size() == 1) return shift == 0.0 ? rest[0] : affine(1.0, shift, rest[0]);

  if (std::all_of(rest.begin(), rest.end(), [](const Distribution& c) { return c.is_discrete(); })) {
    // Quantile sum is a step function with jumps at the union of cumulative levels.
    std::vector<double> levels{0.0, 1.0};
    for (const auto& c : rest) {
      const auto& dd = std::get<law::Discrete>(c.node().v);
      levels.insert(levels.end(), dd.mass_le.begin(), dd.mass_le.end() - 1);
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    std::vector<std::pair<double, double>> vw;
    for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
      const double len = levels[k + 1] - levels[k];
      if (!(len > 0)) continue;
      const double mid = 0.5 * (levels[k] + levels[k + 1]);
      double v = shift;
      for (const auto& c : rest) v += quantile(c, mid);
      vw.emplace_back(v, len);
    }
    return discrete_from_weighted(std::move(vw));
  }
  if (shift != 0.0) rest.push_back(point_mass(shift));
  return Distribution(std::make_shared<const Node>(Node{law::ComonotonicSum{std::move(rest)}}));
}

Distribution Distribution::quantile_law(std::string label, UnitFn left, ExtReal ess_inf, ExtReal ess_sup) {
  if (!left) throw InvalidArgument("quantile_law: empty quantile function");
  if (ess_sup < ess_inf) throw InvalidArgument("quantile_law: ess_inf above ess_sup");
  return Distribution(std::make_shared<const Node>(
      Node{law::QuantileLaw{std::move(label), std::move(left), ess_inf, ess_sup}}));
}

Distribution Distribution::pushforward(UnitFn map, int grid_n) {
  if (!map) throw InvalidArgument("pushforward: empty map");
  if (grid_n < 16) throw InvalidArgument("pushforward: grid_n must be >= 16");
  std::vector<double> grid(static_cast<std::size_t>(grid_n));
  const double n = grid_n;
  for (int k = 0; k < grid_n; ++k) {
    const UnitPoint u{(k + 0.5) / n, (n - k - 0.5) / n};
    grid[static_cast<std::size_t>(k)] = map(u);
    if (std::isnan(grid[static_cast<std::size_t>(k)])) throw InvalidArgument("pushforward: map produced NaN");
  }
  std::sort(grid.begin(), grid.end());
  // Edge behaviour from probes at depths 2^-30, 2^-60, 2^-120: increments that
  // do not shrink as the depth doubles indicate an unbounded end.
  auto edge = [&map](bool upper) -> std::pair<double, bool> {
    double v[3];
    const double depths[3] = {0x1p-30, 0x1p-60, 0x1p-120};
    for (int i = 0; i < 3; ++i) {
      const double s = depths[i];
      v[i] = map(upper ? UnitPoint{1.0 - s, s} : UnitPoint{s, 1.0 - s});
    }
    for (double x : v)
      if (std::isnan(x)) return {upper ? -kInf : kInf, false};
    const double d1 = upper ? v[1] - v[0] : v[0] - v[1];
    const double d2 = upper ? v[2] - v[1] : v[1] - v[2];
    const bool unbounded = std::isinf(v[2]) || (d1 > 0 && d2 >= d1);
    return {upper ? std::max({v[0], v[1], v[2]}) : std::min({v[0], v[1], v[2]}), unbounded};
  };
  double lo = grid.front();
  double hi = grid.back();
  const auto [lo_edge, lo_open] = edge(false);
  const auto [hi_edge, hi_open] = edge(true);
  lo = lo_open ? -kInf : std::min(lo, lo_edge);
  hi = hi_open ? kInf : std::max(hi, hi_edge);
  // Constant maps whose evaluations differ only by rounding.
  if (std::isfinite(lo) && std::isfinite(hi) && hi - lo <= 1e-14 * std::max({1.0, std::fabs(lo), std::fabs(hi)})) return point_mass(grid[grid.size() / 2]);
  return Distribution(std::make_shared<const Node>(Node{law::Pushforward{std::move(map), std::move(grid), lo, hi}}));
}

Distribution::Kind Distribution::kind() const { return static_cast<Kind>(node_->v.index()); }

bool Distribution::is_degenerate() const {
  const auto [lo, hi] = support_bounds(*this);
  return lo == hi;
}

std::optional<DiscreteView> as_discrete(const Distribution& d) {
  if (const auto* v = std::get_if<law::Discrete>(&d.node().v)) return DiscreteView{v->atoms, v->probs};
  if (const auto* v = std::get_if<law::PointMass>(&d.node().v)) {
    static constexpr double kOne = 1.0;
    return DiscreteView{std::span<const double>(&v->c, 1), std::span<const double>(&kOne, 1)};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Quantiles and probabilities

double quantile(const Distribution& d, double t) {
  if (!(t > 0.0 && t < 1.0)) throw InvalidArgument("quantile: level must lie in (0,1)");
  return quantile(d, UnitPoint::at(t));
}

double quantile(const Distribution& d, UnitPoint u) {
  using std::numbers::pi;
  return std::visit(
      Overloaded{
          [&](const law::Discrete& v) { return v.atoms[discrete_left_index(v, u)]; },
          [&](const law::Uniform01&) { return u.t; },
          [&](const law::Pareto& v) { return std::pow(u.tc, -1.0 / v.alpha); },
          [&](const law::Cauchy&) {
            return u.t <= 0.5 ? -1.0 / std::tan(pi * u.t) : 1.0 / std::tan(pi * u.tc);
          },
          [&](const law::PointMass& v) { return v.c; },
          [&](const law::Affine& v) {
            if (v.a > 0) return v.a * quantile(v.base, u) + v.b;
            return v.a * right_quantile(v.base, u.flipped()) + v.b;
          },
          [&](const law::Mixture& v) { return mixture_quantile(v, d, u, false); },
          [&](const law::ComonotonicSum& v) {
            double s = 0.0;
            for (const auto& c : v.components) s += quantile(c, u);
            return s;
          },
          [&](const law::QuantileLaw& v) { return v.left(u); },
          [&](const law::Pushforward& v) {
            const auto n = static_cast<double>(v.sorted_grid.size());
            const double k = std::ceil(u.t * n) - 1.0;
            return v.sorted_grid[static_cast<std::size_t>(std::clamp(k, 0.0, n - 1))];
          },
      },
      d.node().v);
}

double right_quantile(const Distribution& d, UnitPoint u) {
  return std::visit(
      Overloaded{
          [&](const law::Discrete& v) { return v.atoms[discrete_right_index(v, u)]; },
          [&](const law::Affine& v) {
            if (v.a > 0) return v.a * right_quantile(v.base, u) + v.b;
            return v.a * quantile(v.base, u.flipped()) + v.b;
          },
          [&](const law::Mixture& v) { return mixture_quantile(v, d, u, true); },
          [&](const law::ComonotonicSum& v) {
            double s = 0.0;
            for (const auto& c : v.components) s += right_quantile(c, u);
            return s;
          },
          [&](const law::Pushforward& v) {
            const auto n = static_cast<double>(v.sorted_grid.size());
            const double k = std::floor(u.t * n);
            return v.sorted_grid[static_cast<std::size_t>(std::clamp(k, 0.0, n - 1))];
          },
          [&](const auto&) { return quantile(d, u); },
      },
      d.node().v);
}

double cdf(const Distribution& d, double x) { return prob_rel(d, x, Rel::Le); }
double prob_lt(const Distribution& d, double x) { return prob_rel(d, x, Rel::Lt); }
double prob_gt(const Distribution& d, double x) { return prob_rel(d, x, Rel::Gt); }
double prob_ge(const Distribution& d, double x) { return prob_rel(d, x, Rel::Ge); }

std::pair<ExtReal, ExtReal> support_bounds(const Distribution& d) {
  using P = std::pair<ExtReal, ExtReal>;
  return std::visit(
      Overloaded{
          [](const law::Discrete& v) { return P{v.atoms.front(), v.atoms.back()}; },
          [](const law::Uniform01&) { return P{0.0, 1.0}; },
          [](const law::Pareto&) { return P{1.0, ExtReal::plus_infinity()}; },
          [](const law::Cauchy&) { return P{ExtReal::minus_infinity(), ExtReal::plus_infinity()}; },
          [](const law::PointMass& v) { return P{v.c, v.c}; },
          [](const law::Affine& v) {
            const auto [lo, hi] = support_bounds(v.base);
            const ExtReal a = ext_add(ext_scale(v.a, lo), v.b);
            const ExtReal b = ext_add(ext_scale(v.a, hi), v.b);
            return v.a > 0 ? P{a, b} : P{b, a};
          },
          [](const law::Mixture& v) {
            P out{ExtReal::plus_infinity(), ExtReal::minus_infinity()};
            for (const auto& c : v.components) {
              const auto [lo, hi] = support_bounds(c);
              out.first = std::min(out.first, lo);
              out.second = std::max(out.second, hi);
            }
            return out;
          },
          [](const law::ComonotonicSum& v) {
            P out{0.0, 0.0};
            for (const auto& c : v.components) {
              const auto [lo, hi] = support_bounds(c);
              out.first = ext_add(out.first, lo);
              out.second = ext_add(out.second, hi);
            }
            return out;
          },
          [](const law::QuantileLaw& v) { return P{v.ess_inf, v.ess_sup}; },
          [](const law::Pushforward& v) { return P{v.ess_inf, v.ess_sup}; },
      },
      d.node().v);
}

// ---------------------------------------------------------------------------
// Means and stop-loss transforms

MeanClass mean_class(const Distribution& d, const QuadConfig& cfg) {
  return std::visit(
      Overloaded{
          [](const law::Discrete& v) {
            double pos = 0.0;
            double neg = 0.0;
            for (std::size_t k = 0; k < v.atoms.size(); ++k) {
              if (v.atoms[k] > 0) pos += v.probs[k] * v.atoms[k];
              else neg -= v.probs[k] * v.atoms[k];
            }
            return MeanClass::finite(pos - neg);
          },
          [](const law::Uniform01&) { return MeanClass::finite(0.5); },
          [](const law::Pareto& v) {
            return v.alpha > 1 ? MeanClass::finite(v.alpha / (v.alpha - 1)) : MeanClass::plus_inf();
          },
          [](const law::Cauchy&) { return MeanClass::undefined(); },
          [](const law::PointMass& v) { return MeanClass::finite(v.c); },
          [&](const law::Affine& v) {
            const MeanClass m = mean_class(v.base, cfg);
            switch (m.kind) {
              case MeanClass::Kind::Finite: return MeanClass::finite(v.a * m.value + v.b);
              case MeanClass::Kind::PlusInf: return v.a > 0 ? MeanClass::plus_inf() : MeanClass::minus_inf();
              case MeanClass::Kind::MinusInf: return v.a > 0 ? MeanClass::minus_inf() : MeanClass::plus_inf();
              case MeanClass::Kind::Undefined: break;
            }
            return MeanClass::undefined();
          },
          [&](const law::Mixture& v) {
            bool pos_inf = false;
            bool neg_inf = false;
            double value = 0.0;
            for (std::size_t i = 0; i < v.components.size(); ++i) {
              const MeanClass m = mean_class(v.components[i], cfg);
              pos_inf |= m.positive_part_infinite();
              neg_inf |= m.negative_part_infinite();
              if (m.is_finite()) value += v.weights[i] * m.value;
            }
            if (pos_inf && neg_inf) return MeanClass::undefined();
            if (pos_inf) return MeanClass::plus_inf();
            if (neg_inf) return MeanClass::minus_inf();
            return MeanClass::finite(value);
          },
          [&](const law::ComonotonicSum& v) {
            bool pos_inf = false;
            bool neg_inf = false;
            double value = 0.0;
            for (const auto& c : v.components) {
              const MeanClass m = mean_class(c, cfg);
              pos_inf |= m.positive_part_infinite();
              neg_inf |= m.negative_part_infinite();
              if (m.is_finite()) value += m.value;
            }
            if (pos_inf && neg_inf) return numeric_mean_class(d, cfg);
            if (pos_inf) return MeanClass::plus_inf();
            if (neg_inf) return MeanClass::minus_inf();
            return MeanClass::finite(value);
          },
          [&](const auto&) { return numeric_mean_class(d, cfg); },
      },
      d.node().v);
}

ExtReal stop_loss_plus(const Distribution& d, double w, const QuadConfig& cfg) {
  require_finite(w, "stop-loss retention");
  return std::visit(
      Overloaded{
          [&](const law::Discrete& v) {
            double acc = 0.0;
            for (std::size_t k = v.atoms.size(); k-- > 0 && v.atoms[k] > w;) acc += v.probs[k] * (v.atoms[k] - w);
            return ExtReal(acc);
          },
          [&](const law::Uniform01&) {
            if (w <= 0) return ExtReal(0.5 - w);
            if (w < 1) return ExtReal(0.5 * (1 - w) * (1 - w));
            return ExtReal(0.0);
          },
          [&](const law::Pareto& v) {
            if (v.alpha <= 1) return ExtReal::plus_infinity();
            if (w <= 1) return ExtReal(v.alpha / (v.alpha - 1) - w);
            return ExtReal(std::pow(w, 1 - v.alpha) / (v.alpha - 1));
          },
          [&](const law::Cauchy&) { return ExtReal::plus_infinity(); },
          [&](const law::PointMass& v) { return ExtReal(std::max(v.c - w, 0.0)); },
          [&](const law::Affine& v) {
            const double y = (w - v.b) / v.a;
            if (v.a > 0) return ext_scale(v.a, stop_loss_plus(v.base, y, cfg));
            return ext_scale(-v.a, stop_loss_minus(v.base, y, cfg));
          },
          [&](const law::Mixture& v) {
            ExtReal acc(0.0);
            for (std::size_t i = 0; i < v.components.size(); ++i)
              acc = ext_add(acc, ext_scale(v.weights[i], stop_loss_plus(v.components[i], w, cfg)));
            return acc;
          },
          [&](const auto&) { return numeric_stop_loss(d, w, true, cfg); },
      },
      d.node().v);
}

ExtReal stop_loss_minus(const Distribution& d, double w, const QuadConfig& cfg) {
  require_finite(w, "stop-loss retention");
  return std::visit(
      Overloaded{
          [&](const law::Discrete& v) {
            double acc = 0.0;
            for (std::size_t k = 0; k < v.atoms.size() && v.atoms[k] < w; ++k) acc += v.probs[k] * (w - v.atoms[k]);
            return ExtReal(acc);
          },
          [&](const law::Uniform01&) {
            if (w <= 0) return ExtReal(0.0);
            if (w < 1) return ExtReal(0.5 * w * w);
            return ExtReal(w - 0.5);
          },
          [&](const law::Pareto& v) {
            if (w <= 1) return ExtReal(0.0);
            const double lw = std::log(w);
            if (v.alpha == 1.0) return ExtReal((w - 1) - lw);
            return ExtReal((w - 1) - std::expm1((1 - v.alpha) * lw) / (1 - v.alpha));
          },
          [&](const law::Cauchy&) { return ExtReal::plus_infinity(); },
          [&](const law::PointMass& v) { return ExtReal(std::max(w - v.c, 0.0)); },
          [&](const law::Affine& v) {
            const double y = (w - v.b) / v.a;
            if (v.a > 0) return ext_scale(v.a, stop_loss_minus(v.base, y, cfg));
            return ext_scale(-v.a, stop_loss_plus(v.base, y, cfg));
          },
          [&](const law::Mixture& v) {
            ExtReal acc(0.0);
            for (std::size_t i = 0; i < v.components.size(); ++i)
              acc = ext_add(acc, ext_scale(v.weights[i], stop_loss_minus(v.components[i], w, cfg)));
            return acc;
          },
          [&](const auto&) { return numeric_stop_loss(d, w, false, cfg); },
      },
      d.node().v);
}

ExtReal upper_tail_integral(const Distribution& d, double p, const QuadConfig& cfg) {
  check_p(p);
  return std::visit(
      Overloaded{
          [&](const law::Discrete& v) {
            // Atom k occupies [mass_gt[k], mass_gt[k] + probs[k]) in complement coordinates.
            const double cap = 1.0 - p;
            double acc = 0.0;
            for (std::size_t k = v.atoms.size(); k-- > 0;) {
              const double start = v.mass_gt[k];
              if (start >= cap) break;
              acc += v.atoms[k] * (std::min(start + v.probs[k], cap) - start);
            }
            return ExtReal(acc);
          },
          [&](const law::Uniform01&) { return ExtReal(0.5 * (1 - p) * (1 + p)); },
          [&](const law::Cauchy&) { return ExtReal::plus_infinity(); },
          [&](const law::Pareto& v) {
            if (v.alpha <= 1) return ExtReal::plus_infinity();
            const double beta = 1 - 1 / v.alpha;
            return ExtReal(std::pow(1 - p, beta) / beta);
          },
          [&](const law::PointMass& v) { return ExtReal(v.c * (1.0 - p)); },
          [&](const law::Affine& v) {
            if (v.a > 0) return ext_add(ext_scale(v.a, upper_tail_integral(v.base, p, cfg)), v.b * (1 - p));
            return ext_add(ext_scale(v.a, lower_tail_integral(v.base, 1 - p, cfg)), v.b * (1 - p));
          },
          [&](const law::Pushforward&) {
            // Integral of the quantile over [p,1] = (1-p) q + E[(X - q)+] at q = F^{-1}(p).
            const double q = quantile(d, p);
            return ext_add(ExtReal(q * (1 - p)), stop_loss_plus(d, q, cfg));
          },
          [&](const auto&) { return integrate_quantile(left_quantile_fn(d), p, 1.0, cfg); },
      },
      d.node().v);
}

ExtReal lower_tail_integral(const Distribution& d, double p, const QuadConfig& cfg) {
  check_p(p);
  return std::visit(
      Overloaded{
          [&](const law::Discrete& v) {
            double acc = 0.0;
            double start = 0.0;
            for (std::size_t k = 0; k < v.atoms.size() && start < p; ++k) {
              acc += v.atoms[k] * (std::min(v.mass_le[k], p) - start);
              start = v.mass_le[k];
            }
            return ExtReal(acc);
          },
          [&](const law::Uniform01&) { return ExtReal(0.5 * p * p); },
          [&](const law::Cauchy&) { return ExtReal::minus_infinity(); },
          [&](const law::Pareto& v) {
            const double beta = 1 - 1 / v.alpha;
            if (beta == 0.0) return ExtReal(-std::log1p(-p));
            return ExtReal(-std::expm1(beta * std::log1p(-p)) / beta);
          },
          [&](const law::PointMass& v) { return ExtReal(v.c * p); },
          [&](const law::Affine& v) {
            if (v.a > 0) return ext_add(ext_scale(v.a, lower_tail_integral(v.base, p, cfg)), v.b * p);
            return ext_add(ext_scale(v.a, upper_tail_integral(v.base, 1 - p, cfg)), v.b * p);
          },
          [&](const law::Pushforward&) {
            const double q = quantile(d, p);
            return ext_add(ExtReal(q * p), -stop_loss_minus(d, q, cfg));
          },
          [&](const auto&) { return integrate_quantile(left_quantile_fn(d), 0.0, p, cfg); },
      },
      d.node().v);
}

std::string describe(const Distribution& d) {
  std::ostringstream os;
  std::visit(
      Overloaded{
          [&](const law::Discrete& v) { os << "discrete(" << v.atoms.size() << " atoms)"; },
          [&](const law::Uniform01&) { os << "uniform01"; },
          [&](const law::Pareto& v) { os << "pareto(" << v.alpha << ")"; },
          [&](const law::Cauchy&) { os << "cauchy"; },
          [&](const law::PointMass& v) { os << "pointmass(" << v.c << ")"; },
          [&](const law::Affine& v) { os << v.a << "*" << describe(v.base) << "+" << v.b; },
          [&](const law::Mixture& v) { os << "mixture(" << v.components.size() << ")"; },
          [&](const law::ComonotonicSum& v) { os << "comonotonic_sum(" << v.components.size() << ")"; },
          [&](const law::QuantileLaw& v) { os << "quantile_law(" << v.label << ")"; },
          [&](const law::Pushforward& v) { os << "pushforward(grid " << v.sorted_grid.size() << ")"; },
      },
      d.node().v);
  return os.str();
}

}  // namespace stochorder
