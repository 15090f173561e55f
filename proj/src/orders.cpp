#include "stochorder/orders.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace stochorder {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kExactSlack = 1e-12;

enum class Cmp { Standard, Relaxed };

struct Families {
  bool plus = true;   // stop-loss plus / upper tail integral
  bool minus = true;  // stop-loss minus / lower tail integral
};

// Amount by which a <= b is violated; 0 when it holds.
double violation(ExtReal a, ExtReal b, Cmp cmp) {
  if (cmp == Cmp::Relaxed && (a.is_plus_infinity() || b.is_minus_infinity())) return 0.0;
  if (a <= b) return 0.0;
  if (!a.is_finite() || !b.is_finite()) return kInf;
  return a.value() - b.value();
}

double magnitude(ExtReal a, ExtReal b) {
  double m = 1.0;
  if (a.is_finite()) m = std::max(m, std::fabs(a.value()));
  if (b.is_finite()) m = std::max(m, std::fabs(b.value()));
  return m;
}

bool preferred(double v, double at, double best_v, const std::optional<Witness>& best) {
  if (!best) return true;
  if (v != best_v) return v > best_v;
  return std::fabs(at) < std::fabs(best->at);
}

class Scan {
 public:
  Scan(Certification cert, Cmp cmp) : cert_(cert), cmp_(cmp) {}

  // Records the requirement a <= b, where (lhs, rhs) are the values reported
  // for the first and second argument.
  void require(double at, Side side, ExtReal a, ExtReal b, ExtReal lhs, ExtReal rhs, bool relative = true) {
    const double v = violation(a, b, cmp_);
    if (v == 0.0) return;
    const double scale = relative ? magnitude(a, b) : 1.0;
    const bool exact = cert_.level == Certification::Level::Exact;
    const double fail_at = exact ? kExactSlack * scale : 10.0 * cert_.tol * scale;
    const Witness w{at, {}, lhs, rhs, side};
    if (v > fail_at || std::isinf(v)) {
      if (preferred(v, at, fail_v_, fail_)) {
        fail_ = w;
        fail_v_ = v;
      }
    } else if (!exact && v > cert_.tol * scale) {
      if (preferred(v, at, tie_v_, tie_)) {
        tie_ = w;
        tie_v_ = v;
      }
    }
  }

  template <class F>
  void guarded(F&& f) {
    try {
      f();
    } catch (const NonConvergent& e) {
      error_ = e.what();
    } catch (const UndefinedSum& e) {
      error_ = e.what();
    }
  }

  void set_note(std::string n) { note_ = std::move(n); }

  OrderVerdict finish() const {
    OrderVerdict out;
    out.cert = cert_;
    out.note = note_;
    if (fail_) {
      out.result = Result::Fails;
      out.witness = fail_;
    } else if (!error_.empty()) {
      out.result = Result::Inconclusive;
      out.note = error_;
    } else if (tie_) {
      out.result = Result::Inconclusive;
      out.witness = tie_;
      out.note = "violation within the numeric tolerance band";
    }
    return out;
  }

 private:
  Certification cert_;
  Cmp cmp_;
  std::optional<Witness> fail_;
  double fail_v_ = 0.0;
  std::optional<Witness> tie_;
  double tie_v_ = 0.0;
  std::string error_;
  std::string note_;
};

bool both_discrete(const Distribution& x, const Distribution& y) { return x.is_discrete() && y.is_discrete(); }

Certification certification_for(const Distribution& x, const Distribution& y, const QuadConfig& cfg) {
  return both_discrete(x, y) ? Certification::exact() : Certification::grid(cfg.grid_n, cfg.tol);
}

void sort_unique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

void add_atoms(std::vector<double>& out, const Distribution& d) {
  const auto dv = *as_discrete(d);
  out.insert(out.end(), dv.atoms.begin(), dv.atoms.end());
}

void add_finite_mean(std::vector<double>& out, const Distribution& d, const QuadConfig& cfg) {
  try {
    const MeanClass m = mean_class(d, cfg);
    if (m.is_finite()) out.push_back(m.value);
  } catch (const NonConvergent&) {
  }
}

// Points in x-space where the probed functions bend or where tails decide.
std::vector<double> location_probes(const Distribution& x, const Distribution& y, const QuadConfig& cfg,
                                    bool with_means) {
  std::vector<double> w;
  if (both_discrete(x, y)) {
    add_atoms(w, x);
    add_atoms(w, y);
    if (with_means) {
      add_finite_mean(w, x, cfg);
      add_finite_mean(w, y, cfg);
    }
    sort_unique(w);
    return w;
  }
  const int n = cfg.grid_n;
  for (const auto* d : {&x, &y}) {
    for (int k = 1; k <= n; ++k) w.push_back(quantile(*d, static_cast<double>(k) / (n + 1)));
    const auto [lo, hi] = support_bounds(*d);
    if (lo.is_finite()) w.push_back(lo.value());
    if (hi.is_finite()) w.push_back(hi.value());
    if (with_means) add_finite_mean(w, *d, cfg);
  }
  w.push_back(0.0);
  for (int k = 0; k <= 62; k += 2) {
    w.push_back(std::ldexp(1.0, k));
    w.push_back(-std::ldexp(1.0, k));
  }
  sort_unique(w);
  return w;
}

std::vector<double> level_probes(const Distribution& x, const Distribution& y, const QuadConfig& cfg) {
  std::vector<double> p;
  if (both_discrete(x, y)) {
    for (const auto* d : {&x, &y}) {
      if (const auto* dd = std::get_if<law::Discrete>(&d->node().v))
        p.insert(p.end(), dd->mass_le.begin(), dd->mass_le.end() - 1);
    }
  } else {
    const int n = cfg.grid_n;
    for (int k = 1; k <= n; ++k) p.push_back(static_cast<double>(k) / (n + 1));
    for (int k = 4; k <= 48; k += 4) {
      p.push_back(std::ldexp(1.0, -k));
      p.push_back(1.0 - std::ldexp(1.0, -k));
    }
  }
  std::erase_if(p, [](double v) { return !(v > 0.0 && v < 1.0); });
  sort_unique(p);
  return p;
}

void scan_stop_loss(Scan& scan, const Distribution& x, const Distribution& y, const QuadConfig& cfg, Families fam) {
  const auto probes = location_probes(x, y, cfg, true);
  for (double w : probes) {
    if (fam.plus) {
      scan.guarded([&] {
        const ExtReal a = stop_loss_plus(x, w, cfg);
        const ExtReal b = stop_loss_plus(y, w, cfg);
        scan.require(w, Side::Plus, a, b, a, b);
      });
    }
    if (fam.minus) {
      scan.guarded([&] {
        const ExtReal a = stop_loss_minus(x, w, cfg);
        const ExtReal b = stop_loss_minus(y, w, cfg);
        scan.require(w, Side::Minus, a, b, a, b);
      });
    }
  }
}

void scan_tail_integrals(Scan& scan, const Distribution& x, const Distribution& y, const QuadConfig& cfg,
                         Families fam) {
  // Limits p -> 0 of the upper integrals and p -> 1 of the lower ones are the means.
  scan.guarded([&] {
    const MeanClass mx = mean_class(x, cfg);
    const MeanClass my = mean_class(y, cfg);
    if (!mx.well_defined() || !my.well_defined()) return;
    const ExtReal a = mx.as_ext_real();
    const ExtReal b = my.as_ext_real();
    if (fam.plus) scan.require(0.0, Side::UpperTail, a, b, a, b);
    if (fam.minus) scan.require(1.0, Side::LowerTail, b, a, a, b);
  });
  for (double p : level_probes(x, y, cfg)) {
    if (fam.plus) {
      scan.guarded([&] {
        const ExtReal a = upper_tail_integral(x, p, cfg);
        const ExtReal b = upper_tail_integral(y, p, cfg);
        scan.require(p, Side::UpperTail, a, b, a, b);
      });
    }
    if (fam.minus) {
      scan.guarded([&] {
        const ExtReal a = lower_tail_integral(x, p, cfg);
        const ExtReal b = lower_tail_integral(y, p, cfg);
        scan.require(p, Side::LowerTail, b, a, a, b);
      });
    }
  }
}

OrderVerdict run_convex_family(const Distribution& x, const Distribution& y, const QuadConfig& cfg,
                               const OrderOptions& opt, Cmp cmp, Families fam, bool use_reduction) {
  cfg.validate();
  Scan scan(certification_for(x, y, cfg), cmp);
  if (use_reduction && opt.reduction_fast_path) {
    Reduction red = Reduction::Full;
    bool ok = true;
    scan.guarded([&] { red = lemma1_reduce(x, y, cfg); });
    ok = scan.finish().result != Result::Inconclusive;
    if (ok) {
      switch (red) {
        case Reduction::TriviallyHolds: {
          OrderVerdict v = scan.finish();
          v.note = "mean of the second law is undefined; every convex test function has infinite expectation";
          return v;
        }
        case Reduction::DcxSuffices:
          fam.plus = false;
          scan.set_note("E[Y+] infinite: plus family holds trivially");
          break;
        case Reduction::IcxSuffices:
          fam.minus = false;
          scan.set_note("E[Y-] infinite: minus family holds trivially");
          break;
        case Reduction::Full: break;
      }
    }
  }
  if (opt.formulation == Formulation::StopLoss)
    scan_stop_loss(scan, x, y, cfg, fam);
  else
    scan_tail_integrals(scan, x, y, cfg, fam);
  return scan.finish();
}

}  // namespace

OrderVerdict check_cx(const Distribution& x, const Distribution& y, const QuadConfig& cfg, const OrderOptions& opt) {
  return run_convex_family(x, y, cfg, opt, Cmp::Standard, {true, true}, true);
}

OrderVerdict check_cx_dagger(const Distribution& x, const Distribution& y, const QuadConfig& cfg,
                             const OrderOptions& opt) {
  return run_convex_family(x, y, cfg, opt, Cmp::Relaxed, {true, true}, false);
}

OrderVerdict check_icx(const Distribution& x, const Distribution& y, const QuadConfig& cfg, const OrderOptions& opt) {
  return run_convex_family(x, y, cfg, opt, Cmp::Standard, {true, false}, false);
}

OrderVerdict check_dcx(const Distribution& x, const Distribution& y, const QuadConfig& cfg, const OrderOptions& opt) {
  return run_convex_family(x, y, cfg, opt, Cmp::Standard, {false, true}, false);
}

OrderVerdict check_st(const Distribution& x, const Distribution& y, const QuadConfig& cfg) {
  cfg.validate();
  Scan scan(certification_for(x, y, cfg), Cmp::Standard);
  for (double v : location_probes(x, y, cfg, false)) {
    const double fx = cdf(x, v);
    const double fy = cdf(y, v);
    // F_Y(v) <= F_X(v), read through survival functions when they carry more precision.
    if (fx > 0.5 && fy > 0.5)
      scan.require(v, Side::Cdf, prob_gt(x, v), prob_gt(y, v), fx, fy, false);
    else
      scan.require(v, Side::Cdf, fy, fx, fx, fy, false);
  }
  return scan.finish();
}

Reduction lemma1_reduce(const Distribution& /*x*/, const Distribution& y, const QuadConfig& cfg) {
  switch (mean_class(y, cfg).kind) {
    case MeanClass::Kind::PlusInf: return Reduction::DcxSuffices;
    case MeanClass::Kind::MinusInf: return Reduction::IcxSuffices;
    case MeanClass::Kind::Undefined: return Reduction::TriviallyHolds;
    case MeanClass::Kind::Finite: break;
  }
  return Reduction::Full;
}

Order parse_order(const std::string& name) {
  if (name == "cx") return Order::Cx;
  if (name == "cx_dagger") return Order::CxDagger;
  if (name == "icx") return Order::Icx;
  if (name == "dcx") return Order::Dcx;
  if (name == "st") return Order::St;
  throw InvalidArgument("unknown order: " + name);
}

std::string to_string(Order o) {
  switch (o) {
    case Order::Cx: return "cx";
    case Order::CxDagger: return "cx_dagger";
    case Order::Icx: return "icx";
    case Order::Dcx: return "dcx";
    case Order::St: return "st";
  }
  return "?";
}

OrderVerdict check_order(Order o, const Distribution& x, const Distribution& y, const QuadConfig& cfg,
                         const OrderOptions& opt) {
  switch (o) {
    case Order::Cx: return check_cx(x, y, cfg, opt);
    case Order::CxDagger: return check_cx_dagger(x, y, cfg, opt);
    case Order::Icx: return check_icx(x, y, cfg, opt);
    case Order::Dcx: return check_dcx(x, y, cfg, opt);
    case Order::St: return check_st(x, y, cfg);
  }
  throw InvalidArgument("unknown order");
}

double ConvexTestFn::operator()(double x) const {
  if (breakpoints.empty()) return intercept + slopes.at(0) * x;
  if (x < breakpoints.front()) return intercept + slopes[0] * (x - breakpoints.front());
  double v = intercept;
  for (std::size_t j = 0; j + 1 < breakpoints.size(); ++j) {
    if (x < breakpoints[j + 1]) return v + slopes[j + 1] * (x - breakpoints[j]);
    v += slopes[j + 1] * (breakpoints[j + 1] - breakpoints[j]);
  }
  return v + slopes.back() * (x - breakpoints.back());
}

bool ConvexTestFn::is_convex() const {
  if (slopes.size() != breakpoints.size() + 1) return false;
  return std::is_sorted(slopes.begin(), slopes.end()) && std::is_sorted(breakpoints.begin(), breakpoints.end());
}

OrderVerdict cx_bruteforce_oracle(const Distribution& x, const Distribution& y, int n_fns, std::uint64_t seed,
                                  double tol) {
  const auto dx = as_discrete(x);
  const auto dy = as_discrete(y);
  if (!dx || !dy) throw InvalidArgument("cx_bruteforce_oracle: both laws must be discrete");
  if (n_fns < 0) throw InvalidArgument("cx_bruteforce_oracle: n_fns must be non-negative");

  ConvexTestFn u;
  add_atoms(u.breakpoints, x);
  add_atoms(u.breakpoints, y);
  sort_unique(u.breakpoints);
  u.slopes.resize(u.breakpoints.size() + 1);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto expect = [&u](const DiscreteView& d) {
    double acc = 0.0;
    for (std::size_t k = 0; k < d.atoms.size(); ++k) acc += d.probs[k] * u(d.atoms[k]);
    return acc;
  };

  OrderVerdict out;
  out.cert = Certification::grid(n_fns, tol);
  for (int i = 0; i < n_fns; ++i) {
    for (double& s : u.slopes) s = normal(rng);
    std::sort(u.slopes.begin(), u.slopes.end());
    const double ex = expect(*dx);
    const double ey = expect(*dy);
    if (ex > ey + tol) {
      out.result = Result::Fails;
      out.witness = Witness{static_cast<double>(i), {}, ex, ey, Side::TestFunction};
      return out;
    }
  }
  out.note = "no violation among sampled test functions";
  return out;
}

std::string to_string(Result r) {
  switch (r) {
    case Result::Holds: return "holds";
    case Result::Fails: return "fails";
    case Result::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string to_string(Side s) {
  switch (s) {
    case Side::Plus: return "plus";
    case Side::Minus: return "minus";
    case Side::Cdf: return "cdf";
    case Side::LowerTail: return "lower_tail";
    case Side::UpperTail: return "upper_tail";
    case Side::TestFunction: return "test_function";
    case Side::Survival: return "survival";
    case Side::Marginal: return "marginal";
  }
  return "?";
}

std::string to_string(Reduction r) {
  switch (r) {
    case Reduction::Full: return "full";
    case Reduction::DcxSuffices: return "dcx_suffices";
    case Reduction::IcxSuffices: return "icx_suffices";
    case Reduction::TriviallyHolds: return "trivially_holds";
  }
  return "?";
}

std::string to_string(Certification::Level l) {
  return l == Certification::Level::Exact ? "exact" : "grid_numeric";
}

}  // namespace stochorder
