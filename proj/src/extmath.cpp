#include "stochorder/extmath.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <queue>

namespace stochorder {

ExtReal::ExtReal(double v) : v_(v) {
  if (std::isnan(v)) throw InvalidArgument("ExtReal: NaN is not an extended real");
}

bool ExtReal::is_finite() const { return std::isfinite(v_); }
bool ExtReal::is_plus_infinity() const { return std::isinf(v_) && v_ > 0; }
bool ExtReal::is_minus_infinity() const { return std::isinf(v_) && v_ < 0; }

ExtReal ext_add(ExtReal a, ExtReal b) {
  if ((a.is_plus_infinity() && b.is_minus_infinity()) ||
      (a.is_minus_infinity() && b.is_plus_infinity()))
    throw UndefinedSum();
  return ExtReal(a.value() + b.value());
}

ExtReal ext_scale(double factor, ExtReal x) {
  if (std::isnan(factor) || std::isinf(factor))
    throw InvalidArgument("ext_scale: factor must be finite");
  if (factor == 0.0) return ExtReal(0.0);
  return ExtReal(factor * x.value());
}

bool relaxed_leq(ExtReal a, ExtReal b) {
  if (a.is_plus_infinity() || b.is_minus_infinity()) return true;
  return a <= b;
}

std::string to_string(ExtReal x) {
  if (x.is_plus_infinity()) return "inf";
  if (x.is_minus_infinity()) return "-inf";
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x.value());
    if (std::strtod(buf, nullptr) == x.value()) break;
  }
  return buf;
}

ExtReal MeanClass::as_ext_real() const {
  switch (kind) {
    case Kind::Finite: return ExtReal(value);
    case Kind::PlusInf: return ExtReal::plus_infinity();
    case Kind::MinusInf: return ExtReal::minus_infinity();
    case Kind::Undefined: break;
  }
  throw InvalidArgument("expectation is undefined (inf - inf)");
}

MeanClass classify_parts(ExtReal positive_part, ExtReal negative_part) {
  const bool pos_inf = positive_part.is_plus_infinity();
  const bool neg_inf = negative_part.is_plus_infinity();
  if (pos_inf && neg_inf) return MeanClass::undefined();
  if (pos_inf) return MeanClass::plus_inf();
  if (neg_inf) return MeanClass::minus_inf();
  return MeanClass::finite(positive_part.value() - negative_part.value());
}

std::string to_string(MeanClass::Kind kind) {
  switch (kind) {
    case MeanClass::Kind::Finite: return "finite";
    case MeanClass::Kind::PlusInf: return "plus_inf";
    case MeanClass::Kind::MinusInf: return "minus_inf";
    case MeanClass::Kind::Undefined: return "undefined";
  }
  return "?";
}

void QuadConfig::validate() const {
  if (!(tol > 0)) throw InvalidArgument("QuadConfig: tol must be positive");
  if (max_depth <= 0) throw InvalidArgument("QuadConfig: max_depth must be positive");
  if (grid_n < 16) throw InvalidArgument("QuadConfig: grid_n must be >= 16");
  if (!(divergence_ratio > 0 && divergence_ratio <= 1))
    throw InvalidArgument("QuadConfig: divergence_ratio must lie in (0,1]");
  if (divergence_shells <= 0) throw InvalidArgument("QuadConfig: divergence_shells must be positive");
}

namespace {

// Kronrod 15-point abscissae and weights; Gauss 7-point weights on the odd nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkEstimate {
  double value;
  double error;
};

GkEstimate gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * pair;
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  return {kronrod * half, std::fabs((kronrod - gauss) * half)};
}

struct Piece {
  double a;
  double b;
  GkEstimate est;
  bool operator<(const Piece& o) const { return est.error < o.est.error; }
};

constexpr int kMaxPieces = 2000;

// Globally adaptive: repeatedly bisects the piece with the largest error.
double adaptive(const std::function<double(double)>& f, double a, double b, double tol) {
  std::priority_queue<Piece> heap;
  GkEstimate first = gauss_kronrod(f, a, b);
  if (std::isnan(first.value)) throw NonConvergent("quadrature: integrand produced NaN");
  if (std::isinf(first.value)) return first.value;
  heap.push({a, b, first});
  double value = first.value;
  double error = first.error;
  int pieces = 1;
  while (error > tol && error > 1e-14 * std::fabs(value)) {
    const Piece worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (pieces >= kMaxPieces || !(worst.a < mid && mid < worst.b)) {
      if (error <= 1e-8 * std::max(1.0, std::fabs(value))) break;
      throw NonConvergent("quadrature: bounded integral did not reach the requested tolerance");
    }
    heap.pop();
    const GkEstimate l = gauss_kronrod(f, worst.a, mid);
    const GkEstimate r = gauss_kronrod(f, mid, worst.b);
    if (std::isnan(l.value) || std::isnan(r.value)) throw NonConvergent("quadrature: integrand produced NaN");
    if (std::isinf(l.value)) return l.value;
    if (std::isinf(r.value)) return r.value;
    value += l.value + r.value - worst.est.value;
    error += l.error + r.error - worst.est.error;
    heap.push({worst.a, mid, l});
    heap.push({mid, worst.b, r});
    ++pieces;
  }
  // Re-sum to shed accumulated update rounding.
  double total = 0.0;
  while (!heap.empty()) {
    total += heap.top().est.value;
    heap.pop();
  }
  return total;
}

constexpr int kShellCap = 900;

// Checks that s * f(s) keeps shrinking by `ratio` per halving all the way
// down to the deepest shell, so the geometric remainder is trustworthy.
bool follows_power_law(const std::function<double(double)>& f, double s0, double ratio, int shells_done) {
  const double g0 = s0 * f(s0);
  if (g0 == 0.0 || !std::isfinite(g0)) return false;
  for (int j = 1; shells_done + j <= kShellCap; j += (j < 8 ? 1 : 8)) {
    const double predicted = g0 * std::pow(ratio, j);
    if (std::fabs(predicted) < 1e-300) break;
    const double s = std::ldexp(s0, -j);
    const double actual = s * f(s);
    if (!(actual / predicted >= 0.5 && actual / predicted <= 2.0)) return false;
  }
  return true;
}

// Integral of f(s) over s in (0, length], where s is the distance to a
// singular endpoint.
ExtReal integrate_toward_endpoint(const std::function<double(double)>& f, double length,
                                  const QuadConfig& cfg) {
  const double shell_tol = cfg.tol / 64;
  const double f_end = f(std::ldexp(length, -kShellCap));
  double sum = 0.0;
  double prev = 0.0;
  double prev2 = 0.0;
  int growing = 0;
  int depth = 0;
  bool started = false;
  for (int k = 0; k < kShellCap; ++k) {
    const double s_hi = std::ldexp(length, -k);
    const double s_lo = std::ldexp(length, -k - 1);
    const double shell = adaptive(f, s_lo, s_hi, shell_tol);
    if (std::isinf(shell)) return ExtReal(shell);
    sum += shell;
    if (shell != 0.0) started = true;
    if (started) ++depth;

    // Monotone tail: |f| on (0, s_lo] is bounded by max(|f(s_lo)|, |f_end|).
    const double bound = s_lo * std::max(std::fabs(f(s_lo)), std::fabs(f_end));
    if (bound <= cfg.tol / 8) return ExtReal(sum);

    const bool same_sign = shell != 0.0 && prev != 0.0 && (shell > 0) == (prev > 0);
    if (same_sign) {
      const double ratio = shell / prev;
      growing = ratio >= cfg.divergence_ratio ? growing + 1 : 0;
      if (growing >= cfg.divergence_shells)
        return shell > 0 ? ExtReal::plus_infinity() : ExtReal::minus_infinity();
      const bool steady = prev2 != 0.0 && (prev > 0) == (prev2 > 0);
      if (steady && ratio < 0.95) {
        const double prev_ratio = prev / prev2;
        const double remainder = shell * ratio / (1.0 - ratio);
        const double drift = std::fabs(remainder - shell * prev_ratio / (1.0 - prev_ratio));
        if (std::fabs(ratio - prev_ratio) <= 0.05 &&
            (std::fabs(remainder) <= cfg.tol / 8 ||
             (prev_ratio < 0.95 && drift <= cfg.tol / 8 && follows_power_law(f, s_lo, ratio, k + 1))))
          return ExtReal(sum + remainder);
      }
    } else {
      growing = 0;
    }
    if (depth > cfg.max_depth) break;
    prev2 = prev;
    prev = shell;
  }
  throw NonConvergent("quadrature: endpoint refinement did not settle within max_depth shells");
}

}  // namespace

double integrate_bounded(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!(a < b)) return 0.0;
  return adaptive(f, a, b, tol);
}

ExtReal integrate_quantile(const UnitFn& q, double lo, double hi, const QuadConfig& cfg) {
  cfg.validate();
  if (!(lo >= 0.0 && hi <= 1.0 && lo < hi))
    throw InvalidArgument("integrate_quantile: need 0 <= lo < hi <= 1");

  auto interior = [&q](double t) { return q(UnitPoint::at(t)); };
  auto from_zero = [&q](double s) { return q(UnitPoint{s, 1.0 - s}); };
  auto from_one = [&q](double s) { return q(UnitPoint{1.0 - s, s}); };

  const bool open_lo = lo == 0.0;
  const bool open_hi = hi == 1.0;
  if (!open_lo && !open_hi) return ExtReal(integrate_bounded(interior, lo, hi, cfg.tol / 4));

  if (open_lo && open_hi) {
    const ExtReal left = integrate_toward_endpoint(from_zero, 0.5, cfg);
    const ExtReal right = integrate_toward_endpoint(from_one, 0.5, cfg);
    return ext_add(left, right);
  }
  if (open_lo) {
    const double mid = 0.5 * hi;
    const ExtReal left = integrate_toward_endpoint(from_zero, mid, cfg);
    return ext_add(left, ExtReal(integrate_bounded(interior, mid, hi, cfg.tol / 4)));
  }
  const double mid = 0.5 * (lo + 1.0);
  const ExtReal right = integrate_toward_endpoint(from_one, 1.0 - mid, cfg);
  return ext_add(ExtReal(integrate_bounded(interior, lo, mid, cfg.tol / 4)), right);
}

ExtReal integrate_quantile(const std::function<double(double)>& q, double lo, double hi,
                           const QuadConfig& cfg) {
  return integrate_quantile(UnitFn([&q](UnitPoint u) { return q(u.t); }), lo, hi, cfg);
}

}  // namespace stochorder
