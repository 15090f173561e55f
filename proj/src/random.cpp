#include "stochorder/random.hpp"

#include <algorithm>
#include <numeric>

namespace stochorder::gen {

std::vector<double> dirichlet(Rng& rng, int n) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(static_cast<std::size_t>(n));
  double total = 0.0;
  for (double& x : w) {
    do x = expo(rng);
    while (x < 1e-6);
    total += x;
  }
  for (double& x : w) x /= total;
  return w;
}

Distribution random_discrete(Rng& rng, int max_atoms, int range) {
  std::uniform_int_distribution<int> count(1, max_atoms);
  std::vector<int> pool(static_cast<std::size_t>(2 * range + 1));
  std::iota(pool.begin(), pool.end(), -range);
  std::shuffle(pool.begin(), pool.end(), rng);
  const int k = std::min<int>(count(rng), static_cast<int>(pool.size()));
  std::vector<double> atoms(pool.begin(), pool.begin() + k);
  std::sort(atoms.begin(), atoms.end());
  const auto w = dirichlet(rng, k);
  std::vector<std::pair<double, double>> vw;
  for (int i = 0; i < k; ++i) vw.emplace_back(atoms[static_cast<std::size_t>(i)], w[static_cast<std::size_t>(i)]);
  return Distribution::discrete_from_weighted(std::move(vw));
}

Distribution random_discrete_low_tail(Rng& rng, int max_atoms, int range, double tail_mass) {
  std::uniform_int_distribution<int> count(2, std::max(2, max_atoms));
  std::vector<int> pool(static_cast<std::size_t>(2 * range + 1));
  std::iota(pool.begin(), pool.end(), -range);
  std::shuffle(pool.begin(), pool.end(), rng);
  const int k = std::min<int>(count(rng), static_cast<int>(pool.size()));
  std::vector<double> atoms(pool.begin(), pool.begin() + k);
  std::sort(atoms.begin(), atoms.end());
  const auto w = dirichlet(rng, k - 1);
  std::vector<std::pair<double, double>> vw{{atoms[0], 1.0 - tail_mass}};
  for (int i = 1; i < k; ++i) vw.emplace_back(atoms[static_cast<std::size_t>(i)], tail_mass * w[static_cast<std::size_t>(i - 1)]);
  return Distribution::discrete_from_weighted(std::move(vw));
}

Distribution mean_preserving_spread(const Distribution& d, Rng& rng, int steps, int max_delta) {
  Distribution cur = d;
  std::uniform_int_distribution<int> delta_dist(1, max_delta);
  std::uniform_real_distribution<double> frac(0.1, 1.0);
  for (int s = 0; s < steps; ++s) {
    const auto dv = *as_discrete(cur);
    std::uniform_int_distribution<std::size_t> pick(0, dv.atoms.size() - 1);
    const std::size_t k = pick(rng);
    const double moved = dv.probs[k] * frac(rng);
    const double delta = delta_dist(rng);
    std::vector<std::pair<double, double>> vw;
    for (std::size_t i = 0; i < dv.atoms.size(); ++i)
      vw.emplace_back(dv.atoms[i], i == k ? dv.probs[i] - moved : dv.probs[i]);
    vw.emplace_back(dv.atoms[k] - delta, moved / 2);
    vw.emplace_back(dv.atoms[k] + delta, moved / 2);
    cur = Distribution::discrete_from_weighted(std::move(vw));
  }
  return cur;
}

DiscreteJoint monotone_path_joint(const std::vector<Distribution>& marginals,
                                  const std::vector<std::vector<int>>& orders) {
  const std::size_t d = marginals.size();
  std::vector<DiscreteView> views;
  for (const auto& m : marginals) {
    auto v = as_discrete(m);
    if (!v) throw InvalidArgument("monotone_path_joint: marginals must be discrete");
    views.push_back(*v);
  }
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> left(d);
  for (std::size_t i = 0; i < d; ++i) left[i] = views[i].probs[static_cast<std::size_t>(orders[i][0])];

  std::vector<std::vector<double>> rows;
  std::vector<double> probs;
  for (;;) {
    const double m = *std::min_element(left.begin(), left.end());
    if (m > 0) {
      std::vector<double> row(d);
      for (std::size_t i = 0; i < d; ++i) row[i] = views[i].atoms[static_cast<std::size_t>(orders[i][idx[i]])];
      rows.push_back(std::move(row));
      probs.push_back(m);
    }
    bool done = false;
    for (std::size_t i = 0; i < d; ++i) {
      left[i] -= m;
      if (left[i] <= 1e-15) {
        if (++idx[i] == views[i].atoms.size()) {
          done = true;
          continue;
        }
        left[i] += views[i].probs[static_cast<std::size_t>(orders[i][idx[i]])];
      }
    }
    if (done) break;
  }
  Eigen::MatrixXd atoms(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  Eigen::VectorXd p(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t i = 0; i < d; ++i) atoms(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = rows[r][i];
    p(static_cast<Eigen::Index>(r)) = probs[r];
  }
  p /= p.sum();
  return canonical_joint(atoms, p);
}

DiscreteJoint random_joint(const std::vector<Distribution>& marginals, Rng& rng, int max_paths) {
  std::uniform_int_distribution<int> npaths(1, max_paths);
  const int k = npaths(rng);
  const auto w = dirichlet(rng, k);
  std::vector<DiscreteJoint> parts;
  Eigen::Index total_rows = 0;
  for (int j = 0; j < k; ++j) {
    std::vector<std::vector<int>> orders;
    for (const auto& m : marginals) {
      std::vector<int> o(as_discrete(m)->atoms.size());
      std::iota(o.begin(), o.end(), 0);
      std::shuffle(o.begin(), o.end(), rng);
      orders.push_back(std::move(o));
    }
    parts.push_back(monotone_path_joint(marginals, orders));
    total_rows += parts.back().size();
  }
  Eigen::MatrixXd atoms(total_rows, static_cast<Eigen::Index>(marginals.size()));
  Eigen::VectorXd p(total_rows);
  Eigen::Index r = 0;
  for (int j = 0; j < k; ++j) {
    const auto& part = parts[static_cast<std::size_t>(j)];
    atoms.middleRows(r, part.size()) = part.atoms;
    p.segment(r, part.size()) = w[static_cast<std::size_t>(j)] * part.probs;
    r += part.size();
  }
  return canonical_joint(atoms, p);
}


LatticeDist random_lattice(Rng& rng, Axes axes) {
  Eigen::Index n = 1;
  for (const auto& a : axes) n *= static_cast<Eigen::Index>(a.size());
  const auto w = dirichlet(rng, static_cast<int>(n));
  Eigen::VectorXd pmf = Eigen::Map<const Eigen::VectorXd>(w.data(), n);
  pmf /= pmf.sum();
  return LatticeDist::make(std::move(axes), std::move(pmf));
}

LatticeDist marginal_preserving_moves(const LatticeDist& d, Rng& rng, int moves, double p_concordant) {
  const std::vector<int> shape = d.shape();
  std::vector<Eigen::Index> stride(shape.size(), 1);
  for (int k = static_cast<int>(shape.size()) - 2; k >= 0; --k)
    stride[static_cast<std::size_t>(k)] = stride[static_cast<std::size_t>(k) + 1] * shape[static_cast<std::size_t>(k) + 1];
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> axis(0, shape.size() - 1);
  Eigen::VectorXd pmf = d.pmf;
  for (int m = 0; m < moves; ++m) {
    const std::size_t i = axis(rng);
    std::size_t j = axis(rng);
    while (j == i) j = axis(rng);
    if (shape[i] < 2 || shape[j] < 2) continue;
    // Base cell with random coordinates, then two distinct levels on axes i and j.
    std::vector<int> idx(shape.size());
    for (std::size_t k = 0; k < shape.size(); ++k) idx[k] = std::uniform_int_distribution<int>(0, shape[k] - 1)(rng);
    auto levels = [&](int n) {
      std::uniform_int_distribution<int> pick(0, n - 1);
      int a = pick(rng), b = pick(rng);
      while (b == a) b = pick(rng);
      return std::pair{std::min(a, b), std::max(a, b)};
    };
    const auto [i1, i2] = levels(shape[i]);
    const auto [j1, j2] = levels(shape[j]);
    auto flat = [&](int vi, int vj) {
      Eigen::Index f = 0;
      for (std::size_t k = 0; k < shape.size(); ++k) {
        const int v = k == i ? vi : (k == j ? vj : idx[k]);
        f += v * stride[k];
      }
      return f;
    };
    const Eigen::Index ll = flat(i1, j1), hh = flat(i2, j2), lh = flat(i1, j2), hl = flat(i2, j1);
    const bool concordant = unit(rng) < p_concordant;
    const double room = concordant ? std::min(pmf(lh), pmf(hl)) : std::min(pmf(ll), pmf(hh));
    const double delta = unit(rng) * room * (concordant ? 1.0 : -1.0);
    pmf(ll) += delta;
    pmf(hh) += delta;
    pmf(lh) -= delta;
    pmf(hl) -= delta;
  }
  pmf = pmf.cwiseMax(0.0);
  pmf /= pmf.sum();
  return LatticeDist::make(d.axes, std::move(pmf));
}

}  // namespace stochorder::gen
