#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "stochorder/couplings.hpp"

namespace stochorder {

struct CostFn {
  std::function<double(double, double)> eval;
  bool declared_supermodular = false;
  std::string name;

  double operator()(double x, double y) const { return eval(x, y); }
};

/// Built-ins: "product", "neg_sq_diff", "cx_of_sum:<w>", "abs_diff_neg".
CostFn cost_by_name(const std::string& name);

/// Random 4-point lattice checks c(x1,y1) + c(x2,y2) >= c(x1,y2) + c(x2,y1)
/// for x1 < x2, y1 < y2 drawn on [-range, range]; relative slack 1e-12.
bool spot_check_supermodular(const CostFn& c, std::uint64_t seed, int trials = 1000, double range = 10.0);

struct OtExtremes {
  MeanClass min;  // counter-monotonic coupling
  MeanClass max;  // comonotonic coupling
};

/// Extremes of E[c(X, Y)] over the Frechet class of (dx, dy) for supermodular c.
/// Throws InvalidArgument unless c is declared supermodular.
OtExtremes ot_extremes_supermodular(const Distribution& dx, const Distribution& dy, const CostFn& c,
                                    const QuadConfig& cfg = {});

enum class OptMode { Min, Max };

struct Assignment {
  double value = 0.0;
  std::vector<int> perm;  // y index matched to x_i
};

/// Exhaustive search over permutations of (1/n) sum c(x_i, y_perm(i)); n <= 9.
Assignment assignment_oracle(const std::vector<double>& xs, const std::vector<double>& ys, const CostFn& c,
                             OptMode mode);

}  // namespace stochorder
