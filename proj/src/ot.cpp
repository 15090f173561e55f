#include "stochorder/ot.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "stochorder/error.hpp"

namespace stochorder {

CostFn cost_by_name(const std::string& name) {
  if (name == "product") return {[](double x, double y) { return x * y; }, true, name};
  if (name == "neg_sq_diff") return {[](double x, double y) { return -(x - y) * (x - y); }, true, name};
  if (name == "abs_diff_neg") return {[](double x, double y) { return -std::fabs(x - y); }, true, name};
  const std::string prefix = "cx_of_sum:";
  if (name.rfind(prefix, 0) == 0) {
    const std::string arg = name.substr(prefix.size());
    std::size_t used = 0;
    double w = 0.0;
    try {
      w = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != arg.size() || !std::isfinite(w)) throw InvalidArgument("cost: bad threshold in " + name);
    return {[w](double x, double y) { return std::max(x + y - w, 0.0); }, true, name};
  }
  throw InvalidArgument("unknown cost: " + name);
}

bool spot_check_supermodular(const CostFn& c, std::uint64_t seed, int trials, double range) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-range, range);
  for (int i = 0; i < trials; ++i) {
    double x1 = coord(rng), x2 = coord(rng), y1 = coord(rng), y2 = coord(rng);
    if (x1 > x2) std::swap(x1, x2);
    if (y1 > y2) std::swap(y1, y2);
    const double lo = c(x1, y2) + c(x2, y1);
    const double hi = c(x1, y1) + c(x2, y2);
    if (lo > hi + 1e-12 * std::max({1.0, std::fabs(lo), std::fabs(hi)})) return false;
  }
  return true;
}

OtExtremes ot_extremes_supermodular(const Distribution& dx, const Distribution& dy, const CostFn& c,
                                    const QuadConfig& cfg) {
  if (!c.declared_supermodular) throw InvalidArgument("ot extremes need a cost declared supermodular");
  const PointFn phi = [&c](std::span<const double> v) { return c(v[0], v[1]); };
  return {expectation_of(countermono_version({dx, dy}), phi, cfg),
          expectation_of(comonotonic_version({dx, dy}), phi, cfg)};
}

Assignment assignment_oracle(const std::vector<double>& xs, const std::vector<double>& ys, const CostFn& c,
                             OptMode mode) {
  if (xs.empty() || xs.size() != ys.size()) throw InvalidArgument("assignment: lists must be non-empty and of equal length");
  if (xs.size() > 9) throw InvalidArgument("assignment: at most 9 atoms");
  const auto n = xs.size();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Assignment best;
  bool first = true;
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += c(xs[i], ys[static_cast<std::size_t>(perm[i])]);
    const double v = total / static_cast<double>(n);
    if (first || (mode == OptMode::Min ? v < best.value : v > best.value)) {
      best = {v, perm};
      first = false;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace stochorder
