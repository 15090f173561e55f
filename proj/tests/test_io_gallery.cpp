#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "stochorder/error.hpp"
#include "stochorder/gallery.hpp"
#include "stochorder/json_io.hpp"

using namespace stochorder;
using io::Json;

TEST_CASE("distribution specs") {
  const auto p = io::distribution_from_json(Json::parse(R"({"type":"pareto","alpha":0.5})"));
  CHECK(quantile(p, 0.75) == doctest::Approx(16.0));
  const auto d = io::distribution_from_json(Json::parse(R"({"type":"discrete","atoms":[0,1],"probs":[0.5,0.5]})"));
  CHECK(cdf(d, 0.0) == 0.5);
  const auto a = io::distribution_from_json(Json::parse(R"({"type":"affine","a":-1,"b":2,"base":{"type":"uniform01"}})"));
  CHECK(cdf(a, 1.5) == doctest::Approx(0.5));
  const auto m = io::distribution_from_json(Json::parse(
      R"({"type":"mixture","weights":[0.25,0.75],"components":[{"type":"pointmass","c":2},{"type":"cauchy"}]})"));
  CHECK(prob_ge(m, 2.0) == doctest::Approx(0.25 + 0.75 * (0.5 - std::atan(2.0) / std::numbers::pi)));
  const auto s = io::distribution_from_json(Json::parse(
      R"({"type":"coupling_sum","coupling":{"type":"countermonotonic","marginals":[{"type":"uniform01"},{"type":"uniform01"}]}})"));
  CHECK(quantile(s, 0.3) == doctest::Approx(1.0));

  CHECK_THROWS_AS(io::distribution_from_json(Json::parse(R"({"type":"gamma"})")), InvalidArgument);
  CHECK_THROWS_AS(io::distribution_from_json(Json::parse(R"({"type":"pareto"})")), InvalidArgument);
  CHECK_THROWS_AS(io::distribution_from_json(Json::parse(R"({"type":"pareto","alpha":-1})")), InvalidArgument);
  CHECK_THROWS_AS(io::distribution_from_json(Json::parse(R"([1,2])")), InvalidArgument);
  CHECK_THROWS_AS(io::distribution_from_json(Json::parse(R"({"type":"discrete","atoms":[0,1],"probs":"x"})")),
                  InvalidArgument);
}

TEST_CASE("coupling and lattice specs") {
  const auto c = io::coupling_from_json(
      Json::parse(R"({"type":"discrete_joint","atoms":[[0,1],[1,0]],"probs":[0.5,0.5]})"));
  CHECK(c.is_joint());
  CHECK(is_pairwise_countermonotonic(c.joint()));
  CHECK(io::coupling_from_json(Json::parse(R"({"type":"comonotonic","marginals":[{"type":"uniform01"}]})")).kind() ==
        Coupling::Kind::Comonotonic);
  CHECK_THROWS_AS(io::coupling_from_json(Json::parse(R"({"type":"discrete_joint","atoms":[[0,1],[1]],"probs":[0.5,0.5]})")),
                  InvalidArgument);

  const auto nested = io::lattice_from_json(Json::parse(R"({"axes":[[0,1],[0,1,2]],"pmf":[[0.1,0.2,0.1],[0.2,0.3,0.1]]})"));
  const auto flat = io::lattice_from_json(Json::parse(R"({"axes":[[0,1],[0,1,2]],"pmf":[0.1,0.2,0.1,0.2,0.3,0.1]})"));
  CHECK(nested.pmf == flat.pmf);
  CHECK(io::lattice_from_json(io::to_json(flat)).pmf == flat.pmf);
  CHECK_THROWS_AS(io::lattice_from_json(Json::parse(R"({"axes":[[0,1],[0,1,2]],"pmf":[[0.5,0.5],[0,0]]})")),
                  InvalidArgument);
}

TEST_CASE("load_json reads inline text and files") {
  CHECK(io::load_json(R"( {"type":"cauchy"})")["type"] == "cauchy");
  const std::string path = "stochorder_io_test.json";
  {
    std::ofstream out(path);
    out << R"({"type":"uniform01"})";
  }
  CHECK(io::load_json(path)["type"] == "uniform01");
  std::remove(path.c_str());
  CHECK_THROWS_AS(io::load_json("{not json"), InvalidArgument);
  CHECK_THROWS_AS(io::load_json("no_such_file.json"), InvalidArgument);
}

TEST_CASE("verdict serialization writes infinities as strings") {
  const auto v = check_cx(Distribution::pareto(0.5), Distribution::affine(-1, 0, Distribution::pareto(0.5)));
  const Json j = io::to_json(v);
  CHECK(j["result"] == "fails");
  CHECK(j["witness"]["lhs"] == "inf");
  CHECK(j["witness"]["rhs"] == 0.0);
  CHECK(j["witness"]["side"] == "plus");
  CHECK(j["certification"]["level"] == "grid_numeric");
  CHECK(io::number_from_json(Json("-inf")) == -INFINITY);
  CHECK(io::to_json(MeanClass::plus_inf())["kind"] == "plus_inf");
}

TEST_CASE("gallery scenarios pass") {
  for (const auto& name : scenario_names()) {
    CAPTURE(name);
    const auto r = run_scenario(name);
    CHECK(r.overall);
    CHECK_FALSE(r.claims.empty());
  }
  CHECK(scenario_names().size() == 7);
}

TEST_CASE("example1_simons3d reports 2 ln 2") {
  const auto r = run_scenario("example1_simons3d");
  REQUIRE(r.overall);
  const auto& c = r.claims[1];
  CHECK(std::fabs(std::get<double>(c.computed) - 1.3862944) < 1e-6);
}

TEST_CASE("gallery reports are deterministic and round-trip through JSON") {
  GalleryConfig cfg;
  cfg.external_crosscheck = true;
  for (const auto& name : scenario_names()) {
    CAPTURE(name);
    const auto a = run_scenario(name, cfg);
    const auto b = run_scenario(name, cfg);
    CHECK(a == b);
    CHECK(to_json(a).dump() == to_json(b).dump());
    CHECK(report_from_json(Json::parse(to_json(a).dump())) == a);
  }
}

TEST_CASE("unknown scenarios are rejected") {
  CHECK_THROWS_AS(run_scenario("unknown"), UnknownScenario);
  CHECK_THROWS_AS(report_from_json(Json::parse(R"({"name":"x"})")), InvalidArgument);
}
