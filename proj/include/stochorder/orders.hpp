#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stochorder/dist.hpp"

namespace stochorder {

enum class Result { Holds, Fails, Inconclusive };

/// Which defining inequality a witness refers to.
enum class Side { Plus, Minus, Cdf, Survival, LowerTail, UpperTail, TestFunction, Marginal };

struct Witness {
  double at = 0.0;            // w, p, x, or a test-function index
  std::vector<double> point;  // multivariate witnesses
  ExtReal lhs;                // value computed for the first argument
  ExtReal rhs;                // value computed for the second argument
  Side side = Side::Plus;
};

struct Certification {
  enum class Level { Exact, GridNumeric };
  Level level = Level::Exact;
  int grid_n = 0;
  double tol = 0.0;

  static Certification exact() { return {}; }
  static Certification grid(int n, double tol) { return {Level::GridNumeric, n, tol}; }
};

struct OrderVerdict {
  Result result = Result::Holds;
  std::optional<Witness> witness;
  Certification cert;
  std::string note;

  bool holds() const { return result == Result::Holds; }
  bool fails() const { return result == Result::Fails; }
};

enum class Formulation { StopLoss, TailIntegral };

struct OrderOptions {
  Formulation formulation = Formulation::StopLoss;
  bool reduction_fast_path = true;
};

OrderVerdict check_cx(const Distribution& x, const Distribution& y, const QuadConfig& cfg = {},
                      const OrderOptions& opt = {});
OrderVerdict check_cx_dagger(const Distribution& x, const Distribution& y, const QuadConfig& cfg = {},
                             const OrderOptions& opt = {});
OrderVerdict check_icx(const Distribution& x, const Distribution& y, const QuadConfig& cfg = {},
                       const OrderOptions& opt = {});
OrderVerdict check_dcx(const Distribution& x, const Distribution& y, const QuadConfig& cfg = {},
                       const OrderOptions& opt = {});
OrderVerdict check_st(const Distribution& x, const Distribution& y, const QuadConfig& cfg = {});

enum class Reduction { Full, DcxSuffices, IcxSuffices, TriviallyHolds };
Reduction lemma1_reduce(const Distribution& x, const Distribution& y, const QuadConfig& cfg = {});

enum class Order { Cx, CxDagger, Icx, Dcx, St };
Order parse_order(const std::string& name);
std::string to_string(Order o);
OrderVerdict check_order(Order o, const Distribution& x, const Distribution& y, const QuadConfig& cfg = {},
                         const OrderOptions& opt = {});

/// Piecewise-linear convex function; slopes.size() == breakpoints.size() + 1.
struct ConvexTestFn {
  std::vector<double> breakpoints;
  std::vector<double> slopes;
  double intercept = 0.0;  // value at breakpoints.front()

  double operator()(double x) const;
  bool is_convex() const;
};

/// Samples convex functions with kinks at the atom union and sorted standard
/// normal slopes. Fails on the first u with E[u(X)] > E[u(Y)] + tol.
OrderVerdict cx_bruteforce_oracle(const Distribution& x, const Distribution& y, int n_fns, std::uint64_t seed,
                                  double tol = 1e-9);

std::string to_string(Result r);
std::string to_string(Side s);
std::string to_string(Reduction r);
std::string to_string(Certification::Level l);

}  // namespace stochorder
