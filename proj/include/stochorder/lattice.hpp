#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "stochorder/couplings.hpp"
#include "stochorder/orders.hpp"

namespace stochorder {

using Axes = std::vector<std::vector<double>>;

/// Law on a finite product grid. `pmf` is the row-major flattening of the
/// tensor: the last axis varies fastest.
struct LatticeDist {
  Axes axes;
  Eigen::VectorXd pmf;

  /// Validates: dim >= 2, strictly increasing finite axes, pmf >= 0 summing to 1 within 1e-12.
  static LatticeDist make(Axes axes, Eigen::VectorXd pmf);
  /// Axes are the distinct coordinate values of the joint's atoms.
  static LatticeDist from_joint(const DiscreteJoint& j);

  int dim() const { return static_cast<int>(axes.size()); }
  Eigen::Index size() const { return pmf.size(); }
  std::vector<int> shape() const;
  /// Marginal masses along axis i.
  Eigen::VectorXd marginal_pmf(int i) const;
  Distribution marginal(int i) const;
};

/// Real function on a product grid, same layout as LatticeDist.
struct LatticeFn {
  Axes axes;
  Eigen::VectorXd values;

  /// Smallest adjacent mixed second difference over all coordinate pairs.
  double min_mixed_difference() const;
  bool is_supermodular(double tol = 1e-12) const;
  /// Requires d.axes == axes.
  double expectation(const LatticeDist& d) const;
};

/// Both laws re-indexed onto the union of their axes.
std::pair<LatticeDist, LatticeDist> merge_grids(const LatticeDist& a, const LatticeDist& b);

bool marginals_equal(const LatticeDist& a, const LatticeDist& b);

/// Joint cdf and joint survival function comparison at every merged grid point.
/// Survival is also compared with any subset of coordinates sent to -inf.
OrderVerdict check_concordance(const LatticeDist& a, const LatticeDist& b);

struct SmConfig {
  double tol = 1e-9;
  Eigen::Index max_cells = 256;
};

struct SmVerdict {
  OrderVerdict verdict;
  /// min of E_B[phi] - E_A[phi] over supermodular phi with values in [-1, 1].
  double lp_min = 0.0;
  /// Minimizer, present when the verdict fails on the LP.
  std::optional<LatticeFn> certificate;
};

/// Supermodular order A <= B decided by linear programming over the
/// supermodular cone. Throws GridTooLarge and LpFailure.
SmVerdict check_sm_lattice(const LatticeDist& a, const LatticeDist& b, const SmConfig& cfg = {});

struct ConcordanceGap {
  LatticeDist a;
  LatticeDist b;
  LatticeFn certificate;
  long draws = 0;
};

/// Random search for A <=c B with A not <=sm B on a grid_size^dim lattice.
/// Each draw samples A and a supermodular phi, then minimizes E_B[phi] over
/// the B concordance-above A. Returned instances are re-verified.
std::optional<ConcordanceGap> search_concordance_not_sm(int dim, int grid_size, std::uint64_t seed, long budget);

}  // namespace stochorder
