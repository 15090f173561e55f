#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "stochorder/dist.hpp"
#include "stochorder/orders.hpp"

namespace stochorder {

/// T : (0,1) -> R driven by the shared uniform variable. When
/// `piecewise_constant` holds, T is constant between consecutive
/// breakpoints (which then include 0 and 1).
struct TransportMap {
  UnitFn eval;
  std::vector<double> breakpoints;
  bool piecewise_constant = false;
};

/// Finitely supported law on R^d: one atom per row.
struct DiscreteJoint {
  Eigen::MatrixXd atoms;
  Eigen::VectorXd probs;

  int dim() const { return static_cast<int>(atoms.cols()); }
  Eigen::Index size() const { return atoms.rows(); }
  /// Law of coordinate i.
  Distribution marginal(int i) const;
};

/// Merges identical rows (summing their probabilities) and orders rows lexicographically.
DiscreteJoint canonical_joint(const Eigen::MatrixXd& atoms, const Eigen::VectorXd& probs);

class Coupling {
 public:
  enum class Kind { Comonotonic, Countermonotonic, General, Joint };

  static Coupling from_maps(std::vector<TransportMap> maps, std::vector<Distribution> marginals,
                            Kind kind = Kind::General);
  /// Validates probabilities (positive, summing to 1 within 1e-12).
  static Coupling from_joint(DiscreteJoint joint);

  Kind kind() const { return kind_; }
  bool is_joint() const { return kind_ == Kind::Joint; }
  int dim() const;
  const DiscreteJoint& joint() const;
  const std::vector<TransportMap>& maps() const { return maps_; }
  const std::vector<Distribution>& marginals() const { return marginals_; }

 private:
  Kind kind_ = Kind::General;
  std::vector<TransportMap> maps_;
  std::vector<Distribution> marginals_;
  std::optional<DiscreteJoint> joint_;
};

enum class CtExistence { ExistsLow, ExistsHigh, ExistsPairwise, NotExists };

Coupling comonotonic_version(const std::vector<Distribution>& ds);
CtExistence countermono_existence(const std::vector<Distribution>& ds);
/// Throws CtNotExists when countermono_existence reports NotExists.
Coupling countermono_version(const std::vector<Distribution>& ds);

/// Exact discrete joint for joint couplings and for map couplings whose maps
/// are all piecewise constant; nullopt otherwise.
std::optional<DiscreteJoint> to_joint(const Coupling& c);

using PointFn = std::function<double(std::span<const double>)>;

struct PushforwardLaw {
  Distribution law;
  Certification cert;
};

/// Law of psi(X) under the coupling.
PushforwardLaw pushforward_distribution(const Coupling& c, const PointFn& psi, const QuadConfig& cfg = {});
/// Law of X_1 + ... + X_d under the coupling.
PushforwardLaw sum_distribution(const Coupling& c, const QuadConfig& cfg = {});

/// E[phi(X)], with positive and negative parts integrated separately.
MeanClass expectation_of(const Coupling& c, const PointFn& phi, const QuadConfig& cfg = {});

/// No two support points are strictly concordant in any coordinate pair.
bool is_pairwise_countermonotonic(const DiscreteJoint& j);
bool is_pairwise_countermonotonic(const Coupling& c);

/// Kolmogorov distance between the empirical law of each map at `n`
/// midpoints and its declared marginal, maximized over coordinates. A
/// faithful map scores at most 1/n. Joint couplings score 0 by construction.
double marginal_ks_distance(const Coupling& c, int n = 10000);

std::string to_string(CtExistence e);
std::string to_string(Coupling::Kind k);

}  // namespace stochorder
