#include "stochorder/couplings.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace stochorder {

namespace {

constexpr double kLevelSnap = 1e-13;

std::vector<double> discrete_levels(const Distribution& d, bool complements) {
  std::vector<double> out{0.0, 1.0};
  if (const auto* dd = std::get_if<law::Discrete>(&d.node().v)) {
    const auto& src = complements ? dd->mass_gt : dd->mass_le;
    for (std::size_t k = 0; k + 1 < src.size(); ++k) out.push_back(src[k]);
  }
  return out;
}

TransportMap quantile_map(const Distribution& d) {
  TransportMap m;
  m.eval = [d](UnitPoint u) { return quantile(d, u); };
  m.piecewise_constant = d.is_discrete();
  if (m.piecewise_constant) m.breakpoints = discrete_levels(d, false);
  return m;
}

// u -> right quantile at 1 - u.
TransportMap reversed_quantile_map(const Distribution& d) {
  TransportMap m;
  m.eval = [d](UnitPoint u) { return right_quantile(d, u.flipped()); };
  m.piecewise_constant = d.is_discrete();
  if (m.piecewise_constant) m.breakpoints = discrete_levels(d, true);
  return m;
}

TransportMap constant_map(double c) {
  return TransportMap{[c](UnitPoint) { return c; }, {0.0, 1.0}, true};
}

std::vector<double> snapped_union(const std::vector<TransportMap>& maps) {
  std::vector<double> all;
  for (const auto& m : maps) all.insert(all.end(), m.breakpoints.begin(), m.breakpoints.end());
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (double b : all) {
    if (b < 0.0 || b > 1.0) continue;
    if (out.empty() || b - out.back() > kLevelSnap) out.push_back(b);
  }
  if (out.front() != 0.0) out.insert(out.begin(), 0.0);
  out.back() = 1.0;
  return out;
}

}  // namespace

DiscreteJoint canonical_joint(const Eigen::MatrixXd& atoms, const Eigen::VectorXd& probs) {
  std::map<std::vector<double>, double> acc;
  for (Eigen::Index r = 0; r < atoms.rows(); ++r) {
    std::vector<double> key(atoms.cols());
    for (Eigen::Index c = 0; c < atoms.cols(); ++c) key[c] = atoms(r, c);
    acc[key] += probs(r);
  }
  DiscreteJoint j;
  j.atoms.resize(static_cast<Eigen::Index>(acc.size()), atoms.cols());
  j.probs.resize(static_cast<Eigen::Index>(acc.size()));
  Eigen::Index r = 0;
  for (const auto& [key, p] : acc) {
    for (Eigen::Index c = 0; c < atoms.cols(); ++c) j.atoms(r, c) = key[c];
    j.probs(r++) = p;
  }
  return j;
}

namespace {

double eval_point(const PointFn& f, const std::vector<TransportMap>& maps, UnitPoint u, std::vector<double>& buf) {
  for (std::size_t i = 0; i < maps.size(); ++i) buf[i] = maps[i].eval(u);
  return f(buf);
}

}  // namespace

Distribution DiscreteJoint::marginal(int i) const {
  std::vector<std::pair<double, double>> vw;
  vw.reserve(static_cast<std::size_t>(size()));
  for (Eigen::Index r = 0; r < size(); ++r) vw.emplace_back(atoms(r, i), probs(r));
  return Distribution::discrete_from_weighted(std::move(vw));
}

Coupling Coupling::from_maps(std::vector<TransportMap> maps, std::vector<Distribution> marginals, Kind kind) {
  if (maps.empty() || maps.size() != marginals.size())
    throw InvalidArgument("coupling: need one map per marginal");
  if (kind == Kind::Joint) throw InvalidArgument("coupling: map couplings cannot have kind Joint");
  for (const auto& m : maps)
    if (!m.eval) throw InvalidArgument("coupling: empty transport map");
  Coupling c;
  c.kind_ = kind;
  c.maps_ = std::move(maps);
  c.marginals_ = std::move(marginals);
  return c;
}

Coupling Coupling::from_joint(DiscreteJoint joint) {
  if (joint.size() == 0 || joint.dim() == 0 || joint.probs.size() != joint.size())
    throw InvalidArgument("coupling: joint needs atoms and one probability per atom");
  if (!joint.atoms.allFinite()) throw InvalidArgument("coupling: joint atoms must be finite");
  if ((joint.probs.array() <= 0).any() || !joint.probs.allFinite())
    throw InvalidArgument("coupling: joint probabilities must be positive");
  if (std::fabs(joint.probs.sum() - 1.0) > 1e-12) throw InvalidArgument("coupling: joint probabilities must sum to 1");
  Coupling c;
  c.kind_ = Kind::Joint;
  for (int i = 0; i < joint.dim(); ++i) c.marginals_.push_back(joint.marginal(i));
  c.joint_ = std::move(joint);
  return c;
}

int Coupling::dim() const { return static_cast<int>(marginals_.size()); }

const DiscreteJoint& Coupling::joint() const {
  if (!joint_) throw InvalidArgument("coupling is not a discrete joint");
  return *joint_;
}

Coupling comonotonic_version(const std::vector<Distribution>& ds) {
  if (ds.empty()) throw InvalidArgument("comonotonic_version: no marginals");
  std::vector<TransportMap> maps;
  for (const auto& d : ds) maps.push_back(quantile_map(d));
  return Coupling::from_maps(std::move(maps), ds, Coupling::Kind::Comonotonic);
}

CtExistence countermono_existence(const std::vector<Distribution>& ds) {
  if (ds.empty()) throw InvalidArgument("countermono_existence: no marginals");
  const auto nondegenerate = std::count_if(ds.begin(), ds.end(), [](const Distribution& d) { return !d.is_degenerate(); });
  if (nondegenerate <= 2) return CtExistence::ExistsPairwise;
  double low = 0.0;
  double high = 0.0;
  for (const auto& d : ds) {
    const auto [lo, hi] = support_bounds(d);
    low += lo.is_finite() ? prob_gt(d, lo.value()) : 1.0;
    high += hi.is_finite() ? prob_lt(d, hi.value()) : 1.0;
  }
  if (low <= 1.0 + 1e-12) return CtExistence::ExistsLow;
  if (high <= 1.0 + 1e-12) return CtExistence::ExistsHigh;
  return CtExistence::NotExists;
}

Coupling countermono_version(const std::vector<Distribution>& ds) {
  const CtExistence ex = countermono_existence(ds);
  std::vector<TransportMap> maps;
  switch (ex) {
    case CtExistence::NotExists:
      throw CtNotExists("no counter-monotonic version: both tail sums exceed 1 with at least three non-degenerate marginals");
    case CtExistence::ExistsPairwise: {
      int seen = 0;
      for (const auto& d : ds) {
        if (d.is_degenerate()) {
          maps.push_back(constant_map(support_bounds(d).first.value()));
        } else {
          maps.push_back(seen == 0 ? quantile_map(d) : reversed_quantile_map(d));
          ++seen;
        }
      }
      break;
    }
    case CtExistence::ExistsLow: {
      // Coordinate i leaves its essential infimum only on [l, l + p_i).
      double l = 0.0;
      for (const auto& d : ds) {
        const double floor_v = support_bounds(d).first.value();
        const double p = prob_gt(d, floor_v);
        TransportMap m;
        m.eval = [d, l, p, floor_v](UnitPoint u) {
          const double pos = u.t - l;
          if (!(pos >= 0.0 && pos < p)) return floor_v;
          const double tc = p - pos;
          return quantile(d, UnitPoint{1.0 - tc, tc});
        };
        m.piecewise_constant = d.is_discrete();
        if (m.piecewise_constant) {
          m.breakpoints = {0.0, 1.0, l, std::min(l + p, 1.0)};
          if (const auto* dd = std::get_if<law::Discrete>(&d.node().v))
            for (double g : dd->mass_gt)
              if (g > 0.0 && g < p) m.breakpoints.push_back(l + p - g);
        }
        maps.push_back(std::move(m));
        l += p;
      }
      break;
    }
    case CtExistence::ExistsHigh: {
      double l = 0.0;
      for (const auto& d : ds) {
        const double ceil_v = support_bounds(d).second.value();
        const double q = prob_lt(d, ceil_v);
        TransportMap m;
        m.eval = [d, l, q, ceil_v](UnitPoint u) {
          const double pos = u.t - l;
          if (!(pos > 0.0 && pos < q)) return ceil_v;
          return quantile(d, UnitPoint{pos, 1.0 - pos});
        };
        m.piecewise_constant = d.is_discrete();
        if (m.piecewise_constant) {
          m.breakpoints = {0.0, 1.0, l, std::min(l + q, 1.0)};
          if (const auto* dd = std::get_if<law::Discrete>(&d.node().v))
            for (double c : dd->mass_le)
              if (c > 0.0 && c < q) m.breakpoints.push_back(l + c);
        }
        maps.push_back(std::move(m));
        l += q;
      }
      break;
    }
  }
  for (auto& m : maps)
    if (m.piecewise_constant) std::sort(m.breakpoints.begin(), m.breakpoints.end());
  return Coupling::from_maps(std::move(maps), ds, Coupling::Kind::Countermonotonic);
}

std::optional<DiscreteJoint> to_joint(const Coupling& c) {
  if (c.is_joint()) return c.joint();
  const auto& maps = c.maps();
  if (!std::all_of(maps.begin(), maps.end(), [](const TransportMap& m) { return m.piecewise_constant; }))
    return std::nullopt;
  const std::vector<double> cuts = snapped_union(maps);
  const auto pieces = static_cast<Eigen::Index>(cuts.size() - 1);
  Eigen::MatrixXd atoms(pieces, c.dim());
  Eigen::VectorXd probs(pieces);
  for (Eigen::Index k = 0; k < pieces; ++k) {
    const double a = cuts[static_cast<std::size_t>(k)];
    const double b = cuts[static_cast<std::size_t>(k) + 1];
    const double mid = 0.5 * (a + b);
    for (int i = 0; i < c.dim(); ++i) atoms(k, i) = maps[static_cast<std::size_t>(i)].eval(UnitPoint::at(mid));
    probs(k) = b - a;
  }
  return canonical_joint(atoms, probs);
}

PushforwardLaw pushforward_distribution(const Coupling& c, const PointFn& psi, const QuadConfig& cfg) {
  if (auto j = to_joint(c)) {
    std::vector<std::pair<double, double>> vw;
    std::vector<double> buf(static_cast<std::size_t>(j->dim()));
    for (Eigen::Index r = 0; r < j->size(); ++r) {
      for (int i = 0; i < j->dim(); ++i) buf[static_cast<std::size_t>(i)] = j->atoms(r, i);
      vw.emplace_back(psi(buf), j->probs(r));
    }
    return {Distribution::discrete_from_weighted(std::move(vw)), Certification::exact()};
  }
  const auto maps = c.maps();
  const std::size_t d = maps.size();
  auto map = [maps, psi, d](UnitPoint u) {
    std::vector<double> buf(d);
    return eval_point(psi, maps, u, buf);
  };
  return {Distribution::pushforward(map, cfg.grid_n), Certification::grid(cfg.grid_n, cfg.tol)};
}

PushforwardLaw sum_distribution(const Coupling& c, const QuadConfig& cfg) {
  if (c.kind() == Coupling::Kind::Comonotonic) return {Distribution::comonotonic_sum(c.marginals()), Certification::exact()};
  return pushforward_distribution(
      c, [](std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0); }, cfg);
}

MeanClass expectation_of(const Coupling& c, const PointFn& phi, const QuadConfig& cfg) {
  if (auto j = to_joint(c)) {
    double pos = 0.0;
    double neg = 0.0;
    std::vector<double> buf(static_cast<std::size_t>(j->dim()));
    for (Eigen::Index r = 0; r < j->size(); ++r) {
      for (int i = 0; i < j->dim(); ++i) buf[static_cast<std::size_t>(i)] = j->atoms(r, i);
      const double v = phi(buf);
      if (std::isnan(v)) throw InvalidArgument("expectation_of: phi produced NaN");
      if (v > 0) pos += j->probs(r) * v;
      else neg -= j->probs(r) * v;
    }
    return classify_parts(pos, neg);
  }
  const auto& maps = c.maps();
  auto g = [&maps, &phi](UnitPoint u) {
    std::vector<double> buf(maps.size());
    return eval_point(phi, maps, u, buf);
  };
  const ExtReal pos = integrate_quantile(UnitFn([&g](UnitPoint u) { return std::max(g(u), 0.0); }), 0.0, 1.0, cfg);
  const ExtReal neg = integrate_quantile(UnitFn([&g](UnitPoint u) { return std::max(-g(u), 0.0); }), 0.0, 1.0, cfg);
  return classify_parts(pos, neg);
}

bool is_pairwise_countermonotonic(const DiscreteJoint& j) {
  for (Eigen::Index a = 0; a < j.size(); ++a)
    for (Eigen::Index b = a + 1; b < j.size(); ++b)
      for (int i = 0; i < j.dim(); ++i)
        for (int k = i + 1; k < j.dim(); ++k)
          if ((j.atoms(a, i) - j.atoms(b, i)) * (j.atoms(a, k) - j.atoms(b, k)) > 0) return false;
  return true;
}

bool is_pairwise_countermonotonic(const Coupling& c) {
  if (auto j = to_joint(c)) return is_pairwise_countermonotonic(*j);
  // Discretize the maps at midpoints.
  constexpr int n = 512;
  DiscreteJoint j;
  j.atoms.resize(n, c.dim());
  j.probs = Eigen::VectorXd::Constant(n, 1.0 / n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < c.dim(); ++i)
      j.atoms(k, i) = c.maps()[static_cast<std::size_t>(i)].eval(UnitPoint{(k + 0.5) / n, (n - k - 0.5) / n});
  return is_pairwise_countermonotonic(j);
}

double marginal_ks_distance(const Coupling& c, int n) {
  if (c.is_joint()) return 0.0;
  if (n < 1) throw InvalidArgument("marginal_ks_distance: n must be positive");
  double worst = 0.0;
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < c.dim(); ++i) {
    const auto& m = c.maps()[static_cast<std::size_t>(i)];
    const auto& law = c.marginals()[static_cast<std::size_t>(i)];
    for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = m.eval(UnitPoint{(k + 0.5) / n, (n - k - 0.5) / n});
    std::sort(v.begin(), v.end());
    for (std::size_t k = 0; k < v.size();) {
      std::size_t e = k;
      while (e < v.size() && v[e] == v[k]) ++e;
      const double below = static_cast<double>(k) / n;
      const double upto = static_cast<double>(e) / n;
      worst = std::max({worst, std::fabs(prob_lt(law, v[k]) - below), std::fabs(cdf(law, v[k]) - upto)});
      k = e;
    }
  }
  return worst;
}

std::string to_string(CtExistence e) {
  switch (e) {
    case CtExistence::ExistsLow: return "exists_low";
    case CtExistence::ExistsHigh: return "exists_high";
    case CtExistence::ExistsPairwise: return "exists_pairwise";
    case CtExistence::NotExists: return "not_exists";
  }
  return "?";
}

std::string to_string(Coupling::Kind k) {
  switch (k) {
    case Coupling::Kind::Comonotonic: return "comonotonic";
    case Coupling::Kind::Countermonotonic: return "countermonotonic";
    case Coupling::Kind::General: return "general";
    case Coupling::Kind::Joint: return "discrete_joint";
  }
  return "?";
}

}  // namespace stochorder
