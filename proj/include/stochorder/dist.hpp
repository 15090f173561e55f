#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "stochorder/extmath.hpp"

namespace stochorder {

/// A univariate law, represented through its left quantile function.
/// Immutable value type; copies share the underlying node.
class Distribution {
 public:
  enum class Kind {
    Discrete,
    Uniform01,
    Pareto,
    Cauchy,
    PointMass,
    Affine,
    Mixture,
    ComonotonicSum,
    QuantileLaw,
    Pushforward,
  };
  struct Node;

  /// Atoms strictly increasing, probabilities positive and summing to 1 within 1e-12.
  static Distribution discrete(std::vector<double> atoms, std::vector<double> probs);
  /// Sorts, merges equal values, drops zero weights and renormalizes.
  static Distribution discrete_from_weighted(std::vector<std::pair<double, double>> value_weight);
  static Distribution uniform01();
  /// P(X > x) = x^{-alpha} on [1, inf).
  static Distribution pareto(double alpha);
  static Distribution cauchy();
  static Distribution point_mass(double c);
  /// Law of a * X + b. Discrete bases collapse to a Discrete law.
  static Distribution affine(double a, double b, const Distribution& base);
  /// Finite mixture; all-discrete mixtures collapse to a Discrete law.
  static Distribution mixture(std::vector<double> weights, std::vector<Distribution> components);
  /// Law of the sum of a comonotonic vector: quantiles add.
  static Distribution comonotonic_sum(std::vector<Distribution> components);
  /// Law given directly by a non-decreasing left quantile function.
  static Distribution quantile_law(std::string label, UnitFn left_quantile, ExtReal ess_inf,
                                   ExtReal ess_sup);
  /// Law of map(U), U uniform. Stop-loss transforms and means are integrated
  /// over u; quantile and cdf come from `grid_n` sorted midpoint evaluations.
  static Distribution pushforward(UnitFn map, int grid_n);

  Kind kind() const;
  const Node& node() const { return *node_; }

  bool is_discrete() const { return kind() == Kind::Discrete || kind() == Kind::PointMass; }
  /// True for a.s. constant laws.
  bool is_degenerate() const;

 private:
  explicit Distribution(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

namespace law {

struct Discrete {
  std::vector<double> atoms;
  std::vector<double> probs;
  std::vector<double> mass_le;  // P(X <= atoms[k]), accumulated from below
  std::vector<double> mass_gt;  // P(X > atoms[k]), accumulated from above
};
struct Uniform01 {};
struct Pareto {
  double alpha;
};
struct Cauchy {};
struct PointMass {
  double c;
};
struct Affine {
  double a;
  double b;
  Distribution base;
};
struct Mixture {
  std::vector<double> weights;
  std::vector<Distribution> components;
};
struct ComonotonicSum {
  std::vector<Distribution> components;
};
struct QuantileLaw {
  std::string label;
  UnitFn left;
  ExtReal ess_inf;
  ExtReal ess_sup;
};
struct Pushforward {
  UnitFn map;
  std::vector<double> sorted_grid;
  ExtReal ess_inf;
  ExtReal ess_sup;
};

}  // namespace law

struct Distribution::Node {
  std::variant<law::Discrete, law::Uniform01, law::Pareto, law::Cauchy, law::PointMass,
               law::Affine, law::Mixture, law::ComonotonicSum, law::QuantileLaw, law::Pushforward>
      v;
};

struct DiscreteView {
  std::span<const double> atoms;
  std::span<const double> probs;
};

/// Atoms and probabilities of a Discrete or PointMass law.
std::optional<DiscreteView> as_discrete(const Distribution& d);

/// Left quantile inf{x : P(X <= x) >= t}.
double quantile(const Distribution& d, double t);
double quantile(const Distribution& d, UnitPoint u);
/// Right quantile sup{x : P(X < x) <= t}.
double right_quantile(const Distribution& d, UnitPoint u);

double cdf(const Distribution& d, double x);  // P(X <= x)
double prob_lt(const Distribution& d, double x);
double prob_gt(const Distribution& d, double x);
double prob_ge(const Distribution& d, double x);

/// (ess-inf, ess-sup).
std::pair<ExtReal, ExtReal> support_bounds(const Distribution& d);

MeanClass mean_class(const Distribution& d, const QuadConfig& cfg = {});

/// E[(X - w)+] and E[(X - w)-].
ExtReal stop_loss_plus(const Distribution& d, double w, const QuadConfig& cfg = {});
ExtReal stop_loss_minus(const Distribution& d, double w, const QuadConfig& cfg = {});

/// Integral of the left quantile over [p, 1] and over [0, p].
ExtReal upper_tail_integral(const Distribution& d, double p, const QuadConfig& cfg = {});
ExtReal lower_tail_integral(const Distribution& d, double p, const QuadConfig& cfg = {});

std::string describe(const Distribution& d);

}  // namespace stochorder
