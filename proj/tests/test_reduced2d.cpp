#include <cmath>
#include <numbers>

#include "doctest.h"
#include "magstep/fiber1d.hpp"
#include "magstep/reduced2d.hpp"

using namespace magstep;
using std::numbers::pi;

namespace {

// A step gauge whose D2 branch is off by a constant: the potential jumps on l_alpha.
class MisalignedStepGauge : public VectorPotential {
 public:
  explicit MisalignedStepGauge(const StepFieldParams& p) : g_(p) {}
  std::array<double, 2> operator()(double x1, double x2) const override {
    return {0.0, g_.side(x1, x2) > 0 ? g_.a2_d1(x1, x2) : g_.a2_d2(x1, x2) + 0.3};
  }
  double interface_jump(double p1, double p2, double q1, double q2) const override {
    double fp = g_.side(p1, p2), fq = g_.side(q1, q2);
    if ((fp > 0) == (fq > 0)) return 0.0;
    double s = fp / (fp - fq);
    double c1 = p1 + s * (q1 - p1), c2 = p2 + s * (q2 - p2);
    return std::abs(g_.a2_d1(c1, c2) - (g_.a2_d2(c1, c2) + 0.3));
  }

 private:
  StepGauge g_;
};

SpectralResult quick_sigma(const StepFieldParams& p, double tau) {
  SigmaOptions o;
  o.mesh_error = false;
  return sigma(p, tau, {}, o);
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_NOTHROW((StepFieldParams{pi / 2, 0.3, -0.5}.validate()));
  CHECK_THROWS_AS((StepFieldParams{0.0, 0.3, -0.5}.validate()), RangeError);
  CHECK_THROWS_AS((StepFieldParams{0.04, 0.3, -0.5}.validate()), RangeError);
  CHECK_THROWS_AS((StepFieldParams{pi - 0.04, 0.3, -0.5}.validate()), RangeError);
  CHECK_THROWS_AS((StepFieldParams{pi / 2, -0.1, -0.5}.validate()), RangeError);
  CHECK_THROWS_AS((StepFieldParams{pi / 2, 1.6, -0.5}.validate()), RangeError);
  CHECK_THROWS_AS((StepFieldParams{pi / 2, 0.3, 0.0}.validate()), RangeError);
  CHECK_THROWS_AS((StepFieldParams{pi / 2, 0.3, 1.0}.validate()), RangeError);
  CHECK_THROWS_AS((StepFieldParams{pi / 2, 0.3, -1.5}.validate()), RangeError);
}

TEST_CASE("zero set of the electric potential") {
  const double g = pi / 4;
  auto u = potential_minimum_set({pi / 2, g, -0.5}, -1.0);
  CHECK(u.kind == UpsilonKind::LineAlpha);
  CHECK(u.inf_V == doctest::Approx(1.0));

  u = potential_minimum_set({pi / 2, g, -0.5}, 1.0);
  CHECK(u.kind == UpsilonKind::Union12);
  CHECK(u.inf_V == 0.0);
  REQUIRE(u.offset1.has_value());
  REQUIRE(u.offset2.has_value());
  CHECK(*u.offset1 > 0);
  CHECK(*u.offset2 < 0);

  u = potential_minimum_set({pi / 2, g, 0.5}, 1.0);
  CHECK(u.kind == UpsilonKind::Upsilon1);
  CHECK(u.inf_V == 0.0);

  u = potential_minimum_set({pi / 2, g, 0.5}, -1.0);
  CHECK(u.kind == UpsilonKind::Upsilon2);

  // V really vanishes on the reported lines
  StepFieldParams p{1.2, 0.7, -0.6};
  u = potential_minimum_set(p, 0.8);
  const double sa = std::sin(p.alpha), ca = std::cos(p.alpha);
  for (double t : {0.5, 2.0, 5.0}) {
    // point at signed offset d from l_alpha, pushed along the line direction
    auto on = [&](double d) { return std::array<double, 2>{d * sa + t * ca, -d * ca + t * sa}; };
    auto x = on(*u.offset1);
    CHECK(step_potential(p, 0.8, x[0], x[1]) < 1e-20);
    x = on(*u.offset2);
    CHECK(step_potential(p, 0.8, x[0], x[1]) < 1e-20);
  }
}

TEST_CASE("step gauge is continuous across the discontinuity line") {
  for (auto p : {StepFieldParams{pi / 2, 0.4, -1}, StepFieldParams{1.1, 0.9, 0.5}, StepFieldParams{2.3, 0.2, -0.3}}) {
    StepGauge gauge(p);
    for (double t = 0; t <= 8; t += 0.37) {
      double x1 = t * std::cos(p.alpha), x2 = t * std::sin(p.alpha);
      CHECK(std::abs(gauge.a2_d1(x1, x2) - gauge.a2_d2(x1, x2)) < 1e-10);
    }
    Grid2D g = reduced_grid(p, 0.5, 6, 0.2);
    for (int j = 0; j < g.n2; ++j)
      for (int i = 0; i + 1 < g.n1; ++i) {
        CHECK(gauge.interface_jump(g.x1(i), g.x2(j), g.x1(i + 1), g.x2(j)) < 1e-10);
        if (j + 1 < g.n2) CHECK(gauge.interface_jump(g.x1(i), g.x2(j), g.x1(i), g.x2(j + 1)) < 1e-10);
      }
  }
}

TEST_CASE("potential is continuous on l_alpha with value tau^2") {
  StepFieldParams p{1.3, 0.6, -0.7};
  const double tau = 0.9, eps = 1e-9;
  for (double t : {0.5, 1.5, 4.0}) {
    double x1 = t * std::cos(p.alpha), x2 = t * std::sin(p.alpha);
    double n1 = std::sin(p.alpha), n2 = -std::cos(p.alpha);
    double in = step_potential(p, tau, x1 + eps * n1, x2 + eps * n2);
    double out = step_potential(p, tau, x1 - eps * n1, x2 - eps * n2);
    CHECK(std::abs(in - tau * tau) < 1e-8);
    CHECK(std::abs(out - tau * tau) < 1e-8);
  }
}

TEST_CASE("a gauge that jumps on l_alpha is refused") {
  StepFieldParams p{pi / 2, 0.5, -0.5};
  Grid2D g = reduced_grid(p, 0.0, 4, 0.4);
  MisalignedStepGauge bad(p);
  CHECK_THROWS_AS(assemble_2d_magnetic_schrodinger(g, bad, [](double, double) { return 0.0; }), GaugeDiscontinuity);
  CHECK_NOTHROW(assemble_reduced(p, 0.0, g));
}

TEST_CASE("reduced operators are Hermitian") {
  StepFieldParams p{1.1, 0.9, 0.5};
  auto op = assemble_reduced(p, 0.4, reduced_grid(p, 0.4, 5, 0.25));
  CHECK(op.hermitian_defect() == 0.0);
}

TEST_CASE("gamma = 0: the band function is sigma(0) + tau^2") {
  for (auto p : {StepFieldParams{pi / 2, 0.0, -1.0}, StepFieldParams{2.0, 0.0, 0.5}}) {
    double s0 = quick_sigma(p, 0.0).sigma;
    for (double tau : {0.3, 0.5, 1.0}) CHECK(std::abs(quick_sigma(p, tau).sigma - s0 - tau * tau) < 1e-10);
  }
}

TEST_CASE("(pi/2, 0, -1) sits below the de Gennes constant") {
  auto r = sigma({pi / 2, 0.0, -1.0}, 0.0);
  CHECK(r.sigma < theta0().value - 1e-3);
  CHECK(r.sigma + r.margin() < theta0().value);
}

TEST_CASE("very negative tau with a < 0: sigma above the potential floor") {
  StepFieldParams p{pi / 2, pi / 4, -0.5};
  for (double tau : {-4.0, -6.0}) CHECK(quick_sigma(p, tau).sigma >= tau * tau);
}

TEST_CASE("essential threshold") {
  SUBCASE("gamma = pi/2 decouples xi") {
    for (double tau : {-0.5, 0.4, 1.2}) CHECK(std::abs(sigma_ess({pi / 2, pi / 2, -0.5}, tau) - mu(-0.5, tau)) < 1e-12);
  }
  SUBCASE("never below beta_a") {
    for (auto p : {StepFieldParams{pi / 2, pi / 4, -0.5}, StepFieldParams{1.0, 0.3, 0.5}, StepFieldParams{2.5, 1.2, -1.0}}) {
      double b = beta(p.a).value;
      for (double tau = -2; tau <= 2; tau += 0.5) CHECK(sigma_ess(p, tau) >= b - 1e-6);
    }
  }
  SUBCASE("attains beta_a at tau = xi_a sin gamma for a < 0") {
    for (auto p : {StepFieldParams{pi / 2, pi / 4, -0.5}, StepFieldParams{1.0, 0.3, -0.8}}) {
      auto b = beta(p.a);
      double tt = *b.xi_star * std::sin(p.gamma);
      CHECK(std::abs(sigma_ess(p, tt) - b.value) < 1e-6);
    }
  }
}

TEST_CASE("sigma stays below the essential threshold up to the margin") {
  SigmaOptions o;
  o.truncation_estimate = true;
  for (auto p : {StepFieldParams{pi / 2, pi / 4, -0.5}, StepFieldParams{1.2, 0.6, -0.75}})
    for (double tau : {-0.5, 0.0, 0.5}) {
      auto r = sigma(p, tau, {}, o);
      CHECK(r.sigma <= sigma_ess(p, tau) + r.margin());
    }
}

TEST_CASE("localized eigenfunction at (pi/2, 0, -1)") {
  auto s = eigenfunction({pi / 2, 0.0, -1.0}, 0.0);
  CHECK(s.pair.residual <= 1e-8);
  CHECK(s.wall_mass <= 1e-8);
  CHECK(s.sigma < s.sigma_ess - s.margin);
  CHECK(s.pair.vector.norm() == doctest::Approx(1.0));
}

TEST_CASE("eigenfunction refuses a state that is not below the essential spectrum") {
  // sigma(2, 0, 0.5) = 0.308 while the threshold is 0.5 Theta0 = 0.295
  CHECK_THROWS_AS(eigenfunction({2.0, 0.0, 0.5}, 0.0), NotBelowEssential);
}

TEST_CASE("band profile, gamma = 0 path") {
  auto bp = band_profile({pi / 2, 0.0, -1.0});
  CHECK(bp.verdict == Verdict::EigenvalueCertified);
  REQUIRE(bp.tau_star.has_value());
  CHECK(*bp.tau_star == 0.0);
  CHECK(bp.lambda < theta0().value - 1e-3);
  for (const auto& s : bp.samples) CHECK(s.result.sigma == doctest::Approx(bp.lambda + s.tau * s.tau).epsilon(1e-14));

  auto no = band_profile({2.0, 0.0, 0.5});
  CHECK(no.verdict != Verdict::EigenvalueCertified);
}

TEST_CASE("band profile is robust to a 50% larger window") {
  StepFieldParams p{pi / 2, pi / 4, -0.5};
  auto [lo, hi] = default_tau_window(p);
  auto a = band_profile(p);
  auto b = band_profile(p, std::make_pair(1.5 * lo, 1.5 * hi), 19);
  CHECK(a.verdict == Verdict::EigenvalueCertified);
  CHECK(b.verdict == Verdict::EigenvalueCertified);
  CHECK(std::abs(a.lambda - b.lambda) < 2 * std::max(a.margin, b.margin));
  CHECK(a.lambda <= a.threshold + a.margin);
}

TEST_CASE("band profile input checks") {
  CHECK_THROWS_AS(band_profile({pi / 2, 0.3, -0.5}, std::make_pair(1.0, -1.0)), RangeError);
  CHECK_THROWS_AS(band_profile({pi / 2, 0.3, -0.5}, std::nullopt, 3), RangeError);
}
