#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "json.hpp"
#include "magstep/edgeprofile.hpp"
#include "magstep/fiber1d.hpp"

using namespace magstep;
using std::numbers::pi;

namespace {

LocalizationReport synthetic(double lambda_min, bool holds) {
  LocalizationReport r;
  r.a = -1;
  r.threshold = 0.59;
  r.lambda_min = lambda_min;
  r.assumption_holds = holds;
  if (holds) r.D_set.emplace_back(0.0, 0.1);
  return r;
}

}  // namespace

TEST_CASE("geometry from CSV and JSON") {
  auto g = EdgeGeometry::from_csv("s,alpha,gamma\n0,1.5,0\n0.5,1.5,0.2\n# comment\n1.0,1.6,0.4\n");
  REQUIRE(g.samples.size() == 3);
  CHECK(g.samples[2].alpha == 1.6);
  CHECK_FALSE(g.closed);

  auto j = EdgeGeometry::from_json(R"({"closed": true, "samples": [{"s": 0, "alpha": 1.5, "gamma": 0}, {"s": 1, "alpha": 1.5, "gamma": 0.3}]})");
  CHECK(j.closed);
  CHECK(j.samples[1].gamma == 0.3);
}

TEST_CASE("geometry validation") {
  CHECK_THROWS_AS(EdgeGeometry::from_csv("0,1.5,0\n0,1.5,0\n"), RangeError);
  CHECK_THROWS_AS(EdgeGeometry::from_csv("0,1.5,0\n1,3.2,0\n"), RangeError);
  CHECK_THROWS_AS(EdgeGeometry::from_csv("0,1.5,0\n1,1.5,2.0\n"), RangeError);
  CHECK_THROWS_AS(EdgeGeometry::from_csv("0,1.5,0\nx,y\n"), RangeError);
  CHECK_THROWS_AS(EdgeGeometry::from_csv(""), RangeError);
  CHECK_THROWS_AS(EdgeGeometry::from_json("{\"samples\": 3}"), RangeError);
  CHECK_THROWS_AS(EdgeGeometry::from_json("not json"), RangeError);
}

TEST_CASE("ball-cut geometry") {
  auto g = EdgeGeometry::ball_cut(8);
  CHECK(g.closed);
  REQUIRE(g.samples.size() == 8);
  CHECK(g.samples[0].gamma == 0.0);
  CHECK(g.samples[2].gamma == doctest::Approx(pi / 2));
  CHECK(g.samples[4].gamma == 0.0);
  for (const auto& s : g.samples) {
    CHECK(s.alpha == pi / 2);
    CHECK(s.gamma >= 0);
    CHECK(s.gamma <= pi / 2 + 1e-12);
  }
  CHECK_NOTHROW(g.validate());
}

TEST_CASE("prediction is linear in b") {
  auto r = synthetic(0.55, true);
  CHECK(ground_energy_prediction(r, 1e4) == doctest::Approx(5500.0));
  CHECK(ground_energy_prediction(r, 2e4) == doctest::Approx(2 * ground_energy_prediction(r, 1e4)));
  CHECK_THROWS_AS(ground_energy_prediction(synthetic(0.6, false), 1e4), AssumptionFails);
  CHECK_THROWS_AS(ground_energy_prediction(r, -1), RangeError);
}

TEST_CASE("a = -1 geometry with gamma = 0 points lands in D") {
  // two distinct gamma = 0 angle pairs: cheap exact path of the band profile
  EdgeGeometry g;
  g.samples = {{0.0, pi / 2, 0.0}, {0.5, 1.5, 0.0}, {1.0, 2.2, 0.0}, {1.5, pi / 2, 0.0}};
  auto rep = profile(g, -1.0);
  CHECK(rep.threshold == doctest::Approx(theta0().value));
  REQUIRE(rep.lambda_profile.size() == 4);
  CHECK(rep.lambda_profile[0].in_D);
  CHECK(rep.lambda_profile[3].in_D);
  CHECK(rep.assumption_holds);
  CHECK(!rep.D_set.empty());
  double lo = rep.lambda_profile[0].lambda;
  for (const auto& p : rep.lambda_profile) lo = std::min(lo, p.lambda);
  CHECK(rep.lambda_min == lo);
  for (const auto& p : rep.lambda_profile) {
    if (p.in_D) CHECK(p.verdict == Verdict::EigenvalueCertified);
    if (p.in_D) CHECK(p.lambda < rep.threshold - p.margin);
    CHECK(p.lambda >= rep.lambda_min);
  }
  double b = 1e3;
  CHECK(ground_energy_prediction(rep, b) < b * std::abs(rep.a) * theta0().value);

  auto js = nlohmann::json::parse(report_json(rep));
  CHECK(js["assumption_holds"] == true);
  CHECK(js["profile"].size() == 4);
}

TEST_CASE("a = 0.5: no point below the threshold, profile under the model bound") {
  EdgeGeometry g;
  g.samples = {{0.0, 2.0, 0.0}, {1.0, 1.0, 0.0}};
  auto rep = profile(g, 0.5);
  CHECK_FALSE(rep.assumption_holds);
  CHECK(rep.D_set.empty());
  double bound = std::min(beta(0.5).value, 0.5 * theta0().value);
  for (const auto& p : rep.lambda_profile) CHECK(p.lambda <= bound + p.margin);
  CHECK_THROWS_AS(ground_energy_prediction(rep, 1e4), AssumptionFails);
}

TEST_CASE("resampling at double density keeps lambda_min") {
  EdgeGeometry coarse, fine;
  for (int k = 0; k < 3; ++k) coarse.samples.push_back({0.5 * k, 1.45 + 0.1 * k, 0.0});
  for (int k = 0; k < 5; ++k) fine.samples.push_back({0.25 * k, 1.45 + 0.05 * k, 0.0});
  auto a = profile(coarse, -1.0), b = profile(fine, -1.0);
  double m = 0;
  for (const auto& p : a.lambda_profile) m = std::max(m, p.margin);
  CHECK(std::abs(a.lambda_min - b.lambda_min) < 2 * m);
}

TEST_CASE("D runs are maximal and skip excluded samples") {
  EdgeGeometry g;
  g.samples = {{0.0, pi / 2, 0.0}, {1.0, pi / 2, pi / 4}, {2.0, pi / 2, 0.0}, {3.0, pi / 2, 0.0}};
  auto rep = profile(g, -1.0);
  CHECK_FALSE(rep.lambda_profile[1].in_D);
  REQUIRE(rep.D_set.size() == 2);
  CHECK(rep.D_set[0] == std::make_pair(0.0, 0.0));
  CHECK(rep.D_set[1] == std::make_pair(2.0, 3.0));
}
