// Command-line front end. Exit codes: 0 holds / success, 1 fails,
// 2 inconclusive or numerical failure, 64 usage error.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include "stochorder/error.hpp"
#include "stochorder/gallery.hpp"
#include "stochorder/json_io.hpp"
#include "stochorder/ot.hpp"

using namespace stochorder;
using io::Json;

namespace {

constexpr int kUsage = 64;

struct Common {
  std::optional<int> grid_n;
  std::optional<double> tol;
  std::uint64_t seed = 20240917;
  std::string format = "json";

  // Curves only use grid_n as a row count, so small values are allowed there.
  QuadConfig quad(bool rows_only) const {
    QuadConfig q;
    if (const char* env = std::getenv("STOCHORDER_TOL"); env && !tol) {
      char* end = nullptr;
      const double v = std::strtod(env, &end);
      if (end == env || *end != '\0' || !(v > 0)) throw InvalidArgument("STOCHORDER_TOL must be a positive number");
      q.tol = v;
    }
    if (tol) q.tol = *tol;
    if (grid_n && !rows_only) q.grid_n = *grid_n;
    q.validate();
    return q;
  }
};

int exit_code(Result r) {
  switch (r) {
    case Result::Holds: return 0;
    case Result::Fails: return 1;
    case Result::Inconclusive: return 2;
  }
  return 2;
}

std::string fmt(double x) { return to_string(ExtReal(x)); }

std::string mean_text(const MeanClass& m) { return m.is_finite() ? fmt(m.value) : to_string(m.kind); }

std::string verdict_text(const OrderVerdict& v) {
  std::ostringstream os;
  os << to_string(v.result) << " [" << to_string(v.cert.level);
  if (v.cert.level == Certification::Level::GridNumeric) os << ", grid_n " << v.cert.grid_n;
  os << "]";
  if (v.witness) {
    os << "\nwitness: side " << to_string(v.witness->side) << " at " << fmt(v.witness->at) << ", lhs "
       << to_string(v.witness->lhs) << ", rhs " << to_string(v.witness->rhs);
    if (!v.witness->point.empty()) {
      os << ", point (";
      for (std::size_t i = 0; i < v.witness->point.size(); ++i) os << (i ? ", " : "") << fmt(v.witness->point[i]);
      os << ")";
    }
  }
  if (!v.note.empty()) os << "\nnote: " << v.note;
  return os.str();
}

void emit(const Common& c, const Json& j, const std::string& text) {
  if (c.format == "json") {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << text << "\n";
  }
}

std::string cell(const std::function<ExtReal()>& f) {
  try {
    return to_string(f());
  } catch (const Error&) {
    return "nan";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic order checks for heavy-tailed and multivariate laws"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&common](CLI::App* sub) {
    sub->add_option("--grid-n", common.grid_n, "probe grid size for numeric checks")->check(CLI::Range(2, 10000000));
    sub->add_option("--tol", common.tol, "numeric tolerance (overrides STOCHORDER_TOL)")->check(CLI::PositiveNumber);
    sub->add_option("--seed", common.seed, "seed for every random choice");
    sub->add_option("--format", common.format, "output format")->check(CLI::IsMember({"json", "text"}));
  };

  std::string order, x_arg, y_arg;
  auto* check = app.add_subcommand("check", "decide X <= Y in a univariate order");
  check->add_option("order", order, "cx | cx_dagger | icx | dcx | st")->required();
  check->add_option("X", x_arg, "distribution spec (inline JSON or file)")->required();
  check->add_option("Y", y_arg, "distribution spec (inline JSON or file)")->required();
  add_common(check);

  std::string coupling_arg;
  bool want_sum = false;
  std::vector<double> stop_loss_at;
  auto* coupling = app.add_subcommand("coupling", "build a coupling and inspect its sum");
  coupling->add_option("spec", coupling_arg, "coupling spec (inline JSON or file)")->required();
  coupling->add_flag("--sum", want_sum, "report the law of the sum");
  coupling->add_option("--stop-loss", stop_loss_at, "stop-loss transforms of the sum at w (repeatable)");
  add_common(coupling);

  std::string a_arg, b_arg;
  auto* sm = app.add_subcommand("sm-check", "supermodular and concordance order on finite lattices");
  sm->add_option("A", a_arg, "lattice spec (inline JSON or file)")->required();
  sm->add_option("B", b_arg, "lattice spec (inline JSON or file)")->required();
  add_common(sm);

  std::string cost_name;
  auto* ot = app.add_subcommand("ot", "extremes of E[c(X, Y)] over the Frechet class for a supermodular cost");
  ot->add_option("X", x_arg, "distribution spec")->required();
  ot->add_option("Y", y_arg, "distribution spec")->required();
  ot->add_option("--cost", cost_name, "product | neg_sq_diff | cx_of_sum:<w> | abs_diff_neg")->required();
  add_common(ot);

  std::string scenario;
  bool crosscheck = false;
  auto* gallery = app.add_subcommand("gallery", "run a named scenario, or all of them");
  gallery->add_option("name", scenario, "scenario name or 'all'")->required();
  gallery->add_flag("--crosscheck", crosscheck, "include the independent-sum dominance cross-check");
  add_common(gallery);

  auto* curves = app.add_subcommand("curves", "CSV of tail integrals and stop-loss transforms");
  curves->add_option("X", x_arg, "distribution spec")->required();
  curves->add_option("Y", y_arg, "distribution spec")->required();
  add_common(curves);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    const QuadConfig quad = common.quad(curves->parsed());
    const Json seed = common.seed;

    if (check->parsed()) {
      const Order o = parse_order(order);
      const Distribution x = io::distribution_from_json(io::load_json(x_arg), quad);
      const Distribution y = io::distribution_from_json(io::load_json(y_arg), quad);
      const OrderVerdict v = check_order(o, x, y, quad);
      emit(common,
           {{"command", "check"}, {"order", to_string(o)}, {"seed", seed}, {"x", describe(x)}, {"y", describe(y)},
            {"verdict", io::to_json(v)}},
           to_string(o) + ": " + verdict_text(v));
      return exit_code(v.result);
    }

    if (coupling->parsed()) {
      const Coupling c = io::coupling_from_json(io::load_json(coupling_arg));
      Json j{{"command", "coupling"}, {"seed", seed}, {"kind", to_string(c.kind())}, {"dim", c.dim()}};
      std::ostringstream text;
      text << "coupling " << to_string(c.kind()) << ", dimension " << c.dim();
      Json margs = Json::array();
      for (const auto& m : c.marginals()) margs.push_back(describe(m));
      j["marginals"] = margs;
      if (want_sum || !stop_loss_at.empty()) {
        const PushforwardLaw s = sum_distribution(c, quad);
        const MeanClass mean = mean_class(s.law, quad);
        Json sj{{"law", describe(s.law)}, {"certification", io::to_json(s.cert)}, {"mean", io::to_json(mean)}};
        text << "\nsum: " << describe(s.law) << " [" << to_string(s.cert.level) << "], mean " << mean_text(mean);
        Json sl = Json::array();
        for (double w : stop_loss_at) {
          const ExtReal plus = stop_loss_plus(s.law, w, quad);
          const ExtReal minus = stop_loss_minus(s.law, w, quad);
          sl.push_back({{"w", w}, {"plus", io::to_json(plus)}, {"minus", io::to_json(minus)}});
          text << "\nstop-loss at " << fmt(w) << ": plus " << to_string(plus) << ", minus " << to_string(minus);
        }
        if (!stop_loss_at.empty()) sj["stop_loss"] = sl;
        j["sum"] = sj;
      }
      emit(common, j, text.str());
      return 0;
    }

    if (sm->parsed()) {
      const LatticeDist a = io::lattice_from_json(io::load_json(a_arg));
      const LatticeDist b = io::lattice_from_json(io::load_json(b_arg));
      SmConfig cfg;
      if (common.tol) cfg.tol = *common.tol;
      const SmVerdict s = check_sm_lattice(a, b, cfg);
      const OrderVerdict conc = check_concordance(a, b);
      emit(common,
           {{"command", "sm-check"}, {"seed", seed}, {"supermodular", io::to_json(s)}, {"concordance", io::to_json(conc)}},
           "supermodular: " + verdict_text(s.verdict) + "\nLP minimum: " + fmt(s.lp_min) +
               "\nconcordance: " + verdict_text(conc));
      return exit_code(s.verdict.result);
    }

    if (ot->parsed()) {
      const CostFn c = cost_by_name(cost_name);
      const Distribution x = io::distribution_from_json(io::load_json(x_arg), quad);
      const Distribution y = io::distribution_from_json(io::load_json(y_arg), quad);
      const bool spot = spot_check_supermodular(c, common.seed);
      const OtExtremes e = ot_extremes_supermodular(x, y, c, quad);
      emit(common,
           {{"command", "ot"}, {"seed", seed}, {"cost", c.name}, {"spot_check_supermodular", spot},
            {"min", io::to_json(e.min)}, {"max", io::to_json(e.max)}},
           "cost " + c.name + " (spot check " + (spot ? "passed" : "FAILED") + ")\nmin (counter-monotonic): " +
               mean_text(e.min) + "\nmax (comonotonic): " + mean_text(e.max));
      return spot ? 0 : 1;
    }

    if (gallery->parsed()) {
      GalleryConfig cfg;
      cfg.quad = quad;
      cfg.seed = common.seed;
      cfg.external_crosscheck = crosscheck;
      const std::vector<std::string> names =
          scenario == "all" ? scenario_names() : std::vector<std::string>{scenario};
      Json reports = Json::array();
      std::ostringstream text;
      bool all_pass = true;
      for (const auto& n : names) {
        const ScenarioReport r = run_scenario(n, cfg);
        all_pass = all_pass && r.overall;
        reports.push_back(to_json(r));
        text << (r.overall ? "PASS " : "FAIL ") << r.name << "\n";
        for (const auto& claim : r.claims)
          if (!claim.pass) text << "  failed claim: " << claim.description << "\n";
      }
      emit(common, {{"command", "gallery"}, {"seed", seed}, {"reports", reports}, {"overall", all_pass}},
           text.str() + (all_pass ? "all scenarios pass" : "some scenarios fail"));
      return all_pass ? 0 : 1;
    }

    if (curves->parsed()) {
      const Distribution x = io::distribution_from_json(io::load_json(x_arg), quad);
      const Distribution y = io::distribution_from_json(io::load_json(y_arg), quad);
      const int n = common.grid_n.value_or(quad.grid_n);
      std::cout << "p,lower_tail_X,lower_tail_Y,upper_tail_X,upper_tail_Y\n";
      for (int k = 1; k <= n; ++k) {
        const double p = static_cast<double>(k) / (n + 1);
        std::cout << fmt(p) << "," << cell([&] { return lower_tail_integral(x, p, quad); }) << ","
                  << cell([&] { return lower_tail_integral(y, p, quad); }) << ","
                  << cell([&] { return upper_tail_integral(x, p, quad); }) << ","
                  << cell([&] { return upper_tail_integral(y, p, quad); }) << "\n";
      }
      std::cout << "\nw,slp_X,slp_Y,slm_X,slm_Y\n";
      for (int k = 1; k <= n; ++k) {
        const double p = static_cast<double>(k) / (n + 1);
        const double w = 0.5 * (quantile(x, p) + quantile(y, p));
        std::cout << fmt(w) << "," << cell([&] { return stop_loss_plus(x, w, quad); }) << ","
                  << cell([&] { return stop_loss_plus(y, w, quad); }) << ","
                  << cell([&] { return stop_loss_minus(x, w, quad); }) << ","
                  << cell([&] { return stop_loss_minus(y, w, quad); }) << "\n";
      }
      return 0;
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const UnknownScenario& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const CtNotExists& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const GridTooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return kUsage;
}
