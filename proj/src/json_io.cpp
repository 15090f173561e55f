#include "stochorder/json_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "stochorder/error.hpp"

namespace stochorder::io {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const Json& field(const Json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key))
    throw InvalidArgument(std::string(what) + ": missing field '" + key + "'");
  return j.at(key);
}

std::vector<double> numbers(const Json& j, const char* what) {
  if (!j.is_array()) throw InvalidArgument(std::string(what) + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) out.push_back(number_from_json(x));
  return out;
}

void flatten(const Json& j, const std::vector<int>& shape, std::size_t depth, std::vector<double>& out) {
  if (depth == shape.size()) {
    out.push_back(number_from_json(j));
    return;
  }
  if (!j.is_array() || j.size() != static_cast<std::size_t>(shape[depth]))
    throw InvalidArgument("lattice: nested pmf does not match the axes");
  for (const auto& x : j) flatten(x, shape, depth + 1, out);
}

}  // namespace

Json load_json(const std::string& arg) {
  std::string text;
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[')) {
    text = arg;
  } else {
    std::ifstream in(arg);
    if (!in) throw InvalidArgument("cannot read '" + arg + "' (not inline JSON and not a readable file)");
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed JSON: ") + e.what());
  }
}

double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw InvalidArgument("expected a number, got " + j.dump());
}

Json number_to_json(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  return x;
}

Distribution distribution_from_json(const Json& j, const QuadConfig& cfg) {
  const std::string type = field(j, "type", "distribution").is_string() ? j.at("type").get<std::string>() : "";
  if (type == "uniform01") return Distribution::uniform01();
  if (type == "cauchy") return Distribution::cauchy();
  if (type == "pareto") return Distribution::pareto(number_from_json(field(j, "alpha", "pareto")));
  if (type == "pointmass") return Distribution::point_mass(number_from_json(field(j, "c", "pointmass")));
  if (type == "discrete")
    return Distribution::discrete(numbers(field(j, "atoms", "discrete"), "atoms"),
                                  numbers(field(j, "probs", "discrete"), "probs"));
  if (type == "affine")
    return Distribution::affine(number_from_json(field(j, "a", "affine")), number_from_json(field(j, "b", "affine")),
                                distribution_from_json(field(j, "base", "affine"), cfg));
  if (type == "mixture") {
    const Json& comps = field(j, "components", "mixture");
    if (!comps.is_array()) throw InvalidArgument("mixture: components must be an array");
    std::vector<Distribution> ds;
    for (const auto& c : comps) ds.push_back(distribution_from_json(c, cfg));
    return Distribution::mixture(numbers(field(j, "weights", "mixture"), "weights"), std::move(ds));
  }
  if (type == "coupling_sum") return sum_distribution(coupling_from_json(field(j, "coupling", "coupling_sum")), cfg).law;
  throw InvalidArgument("distribution: unknown type '" + type + "'");
}

Coupling coupling_from_json(const Json& j) {
  const std::string type = field(j, "type", "coupling").is_string() ? j.at("type").get<std::string>() : "";
  if (type == "comonotonic" || type == "countermonotonic") {
    const Json& ms = field(j, "marginals", "coupling");
    if (!ms.is_array() || ms.empty()) throw InvalidArgument("coupling: marginals must be a non-empty array");
    std::vector<Distribution> ds;
    for (const auto& m : ms) ds.push_back(distribution_from_json(m));
    return type == "comonotonic" ? comonotonic_version(ds) : countermono_version(ds);
  }
  if (type == "discrete_joint") {
    const Json& rows = field(j, "atoms", "discrete_joint");
    const auto probs = numbers(field(j, "probs", "discrete_joint"), "probs");
    if (!rows.is_array() || rows.empty() || rows.size() != probs.size() || !rows[0].is_array() || rows[0].empty())
      throw InvalidArgument("discrete_joint: atoms must be rows matching probs");
    DiscreteJoint joint;
    const auto d = static_cast<Eigen::Index>(rows[0].size());
    joint.atoms.resize(static_cast<Eigen::Index>(rows.size()), d);
    joint.probs.resize(static_cast<Eigen::Index>(probs.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto row = numbers(rows[r], "atom row");
      if (static_cast<Eigen::Index>(row.size()) != d) throw InvalidArgument("discrete_joint: ragged atom rows");
      for (Eigen::Index c = 0; c < d; ++c) joint.atoms(static_cast<Eigen::Index>(r), c) = row[static_cast<std::size_t>(c)];
      joint.probs(static_cast<Eigen::Index>(r)) = probs[r];
    }
    return Coupling::from_joint(std::move(joint));
  }
  throw InvalidArgument("coupling: unknown type '" + type + "'");
}

LatticeDist lattice_from_json(const Json& j) {
  const Json& ax = field(j, "axes", "lattice");
  if (!ax.is_array()) throw InvalidArgument("lattice: axes must be an array");
  Axes axes;
  std::vector<int> shape;
  for (const auto& a : ax) {
    axes.push_back(numbers(a, "axis"));
    shape.push_back(static_cast<int>(axes.back().size()));
  }
  const Json& p = field(j, "pmf", "lattice");
  std::vector<double> flat;
  if (p.is_array() && !p.empty() && p[0].is_array()) {
    flatten(p, shape, 0, flat);
  } else {
    flat = numbers(p, "pmf");
  }
  return LatticeDist::make(std::move(axes), Eigen::Map<Eigen::VectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size())));
}

Json to_json(ExtReal x) { return number_to_json(x.value()); }

Json to_json(const MeanClass& m) {
  Json j{{"kind", to_string(m.kind)}};
  if (m.is_finite()) j["value"] = m.value;
  return j;
}

Json to_json(const Witness& w) {
  Json j{{"at", number_to_json(w.at)}, {"side", to_string(w.side)}, {"lhs", to_json(w.lhs)}, {"rhs", to_json(w.rhs)}};
  if (!w.point.empty()) {
    Json pt = Json::array();
    for (double x : w.point) pt.push_back(number_to_json(x));
    j["point"] = pt;
  }
  return j;
}

Json to_json(const Certification& c) {
  Json j{{"level", to_string(c.level)}};
  if (c.level == Certification::Level::GridNumeric) {
    j["grid_n"] = c.grid_n;
    j["tol"] = c.tol;
  }
  return j;
}

Json to_json(const OrderVerdict& v) {
  Json j{{"result", to_string(v.result)}, {"certification", to_json(v.cert)}};
  j["witness"] = v.witness ? to_json(*v.witness) : Json(nullptr);
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

Json to_json(const LatticeFn& f) {
  Json j{{"axes", f.axes}};
  j["values"] = std::vector<double>(f.values.data(), f.values.data() + f.values.size());
  return j;
}

Json to_json(const LatticeDist& d) {
  Json j{{"axes", d.axes}};
  j["pmf"] = std::vector<double>(d.pmf.data(), d.pmf.data() + d.pmf.size());
  return j;
}

Json to_json(const SmVerdict& v) {
  Json j = to_json(v.verdict);
  j["lp_min"] = v.lp_min;
  if (v.certificate) j["certificate"] = to_json(*v.certificate);
  return j;
}

}  // namespace stochorder::io
