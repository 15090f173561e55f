#pragma once

#include <compare>
#include <functional>
#include <limits>
#include <string>

#include "stochorder/error.hpp"

namespace stochorder {

/// A value in [-inf, +inf]. NaN is rejected at construction so every
/// comparison between two ExtReal values is total.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  ExtReal(double v);  // NOLINT(google-explicit-constructor): throws on NaN

  static ExtReal plus_infinity() { return ExtReal(std::numeric_limits<double>::infinity()); }
  static ExtReal minus_infinity() { return ExtReal(-std::numeric_limits<double>::infinity()); }

  double value() const { return v_; }
  bool is_finite() const;
  bool is_plus_infinity() const;
  bool is_minus_infinity() const;

  ExtReal operator-() const { return ExtReal(-v_); }

  friend bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(ExtReal a, ExtReal b) {
    if (a.v_ < b.v_) return std::strong_ordering::less;
    if (a.v_ > b.v_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  double v_ = 0.0;
};

/// Extended-real sum. Throws UndefinedSum for inf + (-inf).
ExtReal ext_add(ExtReal a, ExtReal b);

/// Multiplies by a finite scale; 0 * inf is taken as 0 (measure-theoretic convention).
ExtReal ext_scale(double factor, ExtReal x);

/// a <= b where "+inf <= x" and "x <= -inf" are treated as true.
bool relaxed_leq(ExtReal a, ExtReal b);

/// "inf", "-inf", or the shortest round-trip decimal.
std::string to_string(ExtReal x);

/// Four-way classification of E[X] through (E[X+], E[X-]).
struct MeanClass {
  enum class Kind { Finite, PlusInf, MinusInf, Undefined };

  Kind kind = Kind::Finite;
  double value = 0.0;  // meaningful only when kind == Finite

  static MeanClass finite(double v) { return {Kind::Finite, v}; }
  static MeanClass plus_inf() { return {Kind::PlusInf, 0.0}; }
  static MeanClass minus_inf() { return {Kind::MinusInf, 0.0}; }
  static MeanClass undefined() { return {Kind::Undefined, 0.0}; }

  bool is_finite() const { return kind == Kind::Finite; }
  bool positive_part_infinite() const { return kind == Kind::PlusInf || kind == Kind::Undefined; }
  bool negative_part_infinite() const { return kind == Kind::MinusInf || kind == Kind::Undefined; }
  bool well_defined() const { return kind != Kind::Undefined; }

  /// E[X] as an extended real; throws InvalidArgument when undefined.
  ExtReal as_ext_real() const;

  friend bool operator==(const MeanClass&, const MeanClass&) = default;
};

MeanClass classify_parts(ExtReal positive_part, ExtReal negative_part);
std::string to_string(MeanClass::Kind kind);

/// A point of (0,1) carried together with its complement. Quantile
/// functions that blow up at 1 are evaluated through `tc`, which keeps full
/// relative precision where `1 - t` would round to zero.
struct UnitPoint {
  double t = 0.5;
  double tc = 0.5;

  static UnitPoint at(double t) { return {t, 1.0 - t}; }
  static UnitPoint from_complement(double tc) { return {1.0 - tc, tc}; }
  UnitPoint flipped() const { return {tc, t}; }
};

struct QuadConfig {
  double tol = 1e-10;
  int max_depth = 60;
  int grid_n = 1000;
  double divergence_ratio = 0.999;
  int divergence_shells = 40;

  void validate() const;
};

using UnitFn = std::function<double(UnitPoint)>;

/// Lebesgue integral of q over [lo, hi] in [0,1]. Endpoints at 0 or 1 are
/// approached through dyadic shells; a run of `divergence_shells` shells
/// that fail to decay (ratio >= divergence_ratio) is reported as +-inf.
/// Throws NonConvergent when neither convergence nor divergence is
/// established within max_depth shells past the first non-zero one.
ExtReal integrate_quantile(const UnitFn& q, double lo, double hi, const QuadConfig& cfg);
ExtReal integrate_quantile(const std::function<double(double)>& q, double lo, double hi,
                           const QuadConfig& cfg);

/// Adaptive Gauss-Kronrod (7/15) on a bounded interval.
double integrate_bounded(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace stochorder
