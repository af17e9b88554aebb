#include "magstep/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>

#include "magstep/fiber1d.hpp"
#include "magstep/sweep.hpp"
#include "magstep/zeta.hpp"

namespace magstep {

namespace {

constexpr double pi = std::numbers::pi;

// grids written as 0:1.5708:n overshoot pi/2 slightly; the closed forms are fine there
constexpr double kGammaSlack = 1e-4;

void check_triple(double alpha, double gamma, double a) {
  std::ostringstream os;
  if (!std::isfinite(a) || a == 0.0 || a < -1.0 || a >= 1.0)
    os << "field ratio a = " << a << " outside [-1, 1) \\ {0}";
  else if (!std::isfinite(alpha) || alpha <= 0.0 || alpha >= pi)
    os << "alpha = " << alpha << " outside (0, pi)";
  else if (!std::isfinite(gamma) || gamma < 0.0 || gamma > pi / 2 + kGammaSlack)
    os << "gamma = " << gamma << " outside [0, pi/2]";
  else
    return;
  throw RangeError(os.str());
}

double coth(double x) { return std::cosh(x) / std::sinh(x); }
double csch(double x) { return 1.0 / std::sinh(x); }

}  // namespace

std::string to_string(LambdaVariant v) { return v == LambdaVariant::ExactLambda ? "exact" : "theta0-low"; }

LambdaVariant parse_variant(const std::string& s) {
  if (s == "exact") return LambdaVariant::ExactLambda;
  if (s == "theta0-low") return LambdaVariant::Theta0LowerBound;
  throw RangeError("unknown variant '" + s + "' (expected exact or theta0-low)");
}

double coefficient_A(const StepFieldParams& p) {
  check_triple(p.alpha, p.gamma, p.a);
  const double a = p.a, al = p.alpha, g = p.gamma;
  const double ep = std::exp(pi);
  const double cg2 = std::cos(g) * std::cos(g), sg2 = std::sin(g) * std::sin(g);
  double field_part = 4 * (a - 1) * ((a - ep) * std::exp(pi - al) + (a * ep - 1) * std::exp(al)) -
                      (a - 1) * (a - 1) * (std::exp(2 * pi - 2 * al) + std::exp(2 * al)) -
                      2 * ep * (-4 * a + (3 - 2 * a + 3 * a * a) * std::cosh(pi));
  double weight = a * a * (pi - al) + al;
  double tilt_part = -weight * (-3 + std::cos(2 * g)) + 2 * (a * a - 1) * sg2 * std::sin(2 * al);
  return (coth(pi) - 1) / 128.0 * (pi * cg2 * field_part + 4 * (std::exp(2 * pi) - 1) * tilt_part);
}

double lambda_bound(const StepFieldParams& p, LambdaVariant variant, const Resolution& res) {
  check_triple(p.alpha, p.gamma, p.a);
  if (variant == LambdaVariant::Theta0LowerBound) return std::abs(p.a) * kTheta0Low;
  return std::min(beta(p.a, res).value, std::abs(p.a) * zeta(p.nu0(), res));
}

double polynomial_P(double A, double Lambda, double x) { return A * x * x - pi / 2 * Lambda * x + pi / 2; }

CriterionReport admissibility_from(double A, double Lambda, LambdaVariant variant) {
  CriterionReport r;
  r.A = A;
  r.Lambda = Lambda;
  r.variant = variant;
  if (A > 0) {
    r.x_min = pi * Lambda / (4 * A);
    r.P_min = pi / 2 - pi * pi * Lambda * Lambda / (16 * A);
    r.admissible = r.P_min < 0;
    return r;
  }
  // P is eventually negative; report where it first crosses zero
  r.nonpositive_A = true;
  const double b = pi / 2 * Lambda, c = pi / 2;
  if (A == 0)
    r.x_min = c / b;
  else
    r.x_min = (b - std::sqrt(b * b - 4 * A * c)) / (2 * A);
  r.P_min = -INFINITY;
  r.admissible = Lambda > 0 || A < 0;
  return r;
}

CriterionReport admissibility(const StepFieldParams& p, LambdaVariant variant, const Resolution& res) {
  return admissibility_from(coefficient_A(p), lambda_bound(p, variant, res), variant);
}

void TrialFunctionSpec::validate() const {
  if (!(omega > 0) || !std::isfinite(omega)) throw RangeError("trial rate omega must be positive");
  if (std::abs(c1 + c2 - c3 - c4) > 1e-12 * std::max({1.0, std::abs(c1), std::abs(c2), std::abs(c3)}))
    throw RangeError("trial coefficients violate c1 + c2 = c3 + c4");
}

double trial_energy(const StepFieldParams& p, const TrialFunctionSpec& t, double Lambda) {
  check_triple(p.alpha, p.gamma, p.a);
  t.validate();
  const double a = p.a, al = p.alpha, w = t.omega;
  const double c1 = t.c1, c2 = t.c2, c3 = t.c3;
  const double cg = std::cos(p.gamma), sg2 = std::sin(p.gamma) * std::sin(p.gamma);
  const double e2a = std::exp(-2 * al);
  // Gaussian moments: int rho e^{-w rho^2} = 1/(2w), int rho^2 e^{-w rho^2} = sqrt(pi)/(4 w^{3/2}),
  // int rho^3 e^{-w rho^2} = 1/(2 w^2)
  double quad = (2 - e2a - std::exp(-2 * pi + 2 * al)) / (2 * w) * c1 * c1 +
                (-e2a + std::exp(2 * pi - 2 * al)) / (2 * w) * c2 * c2 +
                (-e2a + std::exp(2 * al)) / (2 * w) * c3 * c3 + (1 - e2a) / w * c1 * c2 +
                (-1 + e2a) / w * c1 * c3 + (-1 + e2a) / w * c2 * c3;
  double k = std::sqrt(pi) * cg / (4 * std::pow(w, 1.5));
  double lin = k * ((1 - a - std::exp(-al) + a * std::exp(-pi + al)) * c1 +
                    (1 - a - std::exp(-al) + a * std::exp(pi - al)) * c2 + (std::exp(-al) - std::exp(al)) * c3);
  double weight = a * a * (pi - al) + al;
  double rest = (4 * pi * w * w - 4 * pi * w * Lambda + weight * cg * cg) / (8 * w * w) +
                2 * (weight + (a * a - 1) * std::cos(al) * std::sin(al)) * sg2 / (8 * w * w);
  return quad + lin + rest;
}

TrialFunctionSpec optimal_trial(const StepFieldParams& p, double omega) {
  check_triple(p.alpha, p.gamma, p.a);
  if (!(omega > 0)) throw RangeError("trial rate omega must be positive");
  const double a = p.a, al = p.alpha;
  const double ep = std::exp(pi);
  const double k = std::sqrt(pi) * std::cos(p.gamma) / std::sqrt(omega);
  double c1 = std::exp(pi - 2 * al) * ((a - 1) * ep + (a - 1) * std::exp(pi + 2 * al) + 2 * std::exp(al) * (ep - a)) *
              k * (coth(pi) - 1) / 16;
  double c2 = (a - 1 + (a - 1) * std::exp(2 * al) - 2 * (a * ep - 1) * std::exp(al)) * k * (coth(pi) - 1) / 16;
  double c3 = std::exp(-al) * (ep - a + (a - 1) * std::cosh(pi - al)) * k * csch(pi) / 8;
  return TrialFunctionSpec::make(omega, c1, c2, c3);
}

std::vector<double> AxisGrid::values() const {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = (n == 1) ? lo : lo + (hi - lo) * i / (n - 1);
  return v;
}

AxisGrid AxisGrid::parse(const std::string& spec) {
  AxisGrid g;
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  try {
    std::size_t used = 0;
    auto num = [&](const std::string& s) {
      double x = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return x;
    };
    if (parts.size() == 1) {
      g.lo = g.hi = num(parts[0]);
      g.n = 1;
    } else if (parts.size() == 3) {
      g.lo = num(parts[0]);
      g.hi = num(parts[1]);
      double n = num(parts[2]);
      if (n < 1 || n != std::floor(n) || n > 1e6) throw std::invalid_argument(parts[2]);
      g.n = static_cast<int>(n);
    } else {
      throw std::invalid_argument(spec);
    }
  } catch (const std::logic_error&) {
    throw RangeError("grid '" + spec + "' is not of the form lo:hi:n");
  }
  if (g.n > 1 && !(g.lo < g.hi)) throw RangeError("grid '" + spec + "' needs lo < hi");
  return g;
}

namespace {

struct ScanPlan {
  std::vector<double> alphas, gammas, as;
  std::map<double, double> beta_of_a;
  std::map<std::pair<double, double>, double> zeta_of;  // keyed by (alpha, gamma)
};

template <class Map>
ScanPlan plan_scan(const AxisGrid& alpha, const AxisGrid& gamma, const AxisGrid& a, LambdaVariant variant,
                   const Resolution& res, Map&& map) {
  ScanPlan plan{alpha.values(), gamma.values(), a.values(), {}, {}};
  for (double al : plan.alphas)
    for (double g : plan.gammas)
      for (double x : plan.as) check_triple(al, g, x);
  if (variant == LambdaVariant::ExactLambda) {
    auto betas = map(plan.as.size(), [&](std::size_t i) { return beta(plan.as[i], res).value; });
    for (std::size_t i = 0; i < plan.as.size(); ++i) plan.beta_of_a[plan.as[i]] = betas[i];
    std::vector<std::pair<double, double>> angles;
    for (double al : plan.alphas)
      for (double g : plan.gammas) angles.emplace_back(al, g);
    auto zetas = map(angles.size(), [&](std::size_t i) {
      return zeta(StepFieldParams{angles[i].first, angles[i].second, -1.0}.nu0(), res);
    });
    for (std::size_t i = 0; i < angles.size(); ++i) plan.zeta_of[angles[i]] = zetas[i];
  }
  return plan;
}

template <class Map>
std::vector<RegionCell> run_scan(const AxisGrid& alpha, const AxisGrid& gamma, const AxisGrid& a,
                                 LambdaVariant variant, const Resolution& res, Map&& map) {
  ScanPlan plan = plan_scan(alpha, gamma, a, variant, res, map);
  const std::size_t ng = plan.gammas.size(), na = plan.as.size();
  return map(plan.alphas.size() * ng * na, [&](std::size_t idx) {
    RegionCell c;
    c.alpha = plan.alphas[idx / (ng * na)];
    c.gamma = plan.gammas[(idx / na) % ng];
    c.a = plan.as[idx % na];
    StepFieldParams p{c.alpha, c.gamma, c.a};
    double Lambda = variant == LambdaVariant::Theta0LowerBound
                        ? std::abs(c.a) * kTheta0Low
                        : std::min(plan.beta_of_a.at(c.a), std::abs(c.a) * plan.zeta_of.at({c.alpha, c.gamma}));
    c.report = admissibility_from(coefficient_A(p), Lambda, variant);
    return c;
  });
}

}  // namespace

std::vector<RegionCell> region_scan(const AxisGrid& alpha, const AxisGrid& gamma, const AxisGrid& a,
                                    LambdaVariant variant, const Resolution& res, int threads) {
  return run_scan(alpha, gamma, a, variant, res,
                  [threads](std::size_t n, auto&& f) { return parallel_map(n, f, threads); });
}

std::vector<RegionCell> region_scan_serial(const AxisGrid& alpha, const AxisGrid& gamma, const AxisGrid& a,
                                           LambdaVariant variant, const Resolution& res) {
  return run_scan(alpha, gamma, a, variant, res, [](std::size_t n, auto&& f) { return serial_map(n, f); });
}

std::string region_csv(const std::vector<RegionCell>& cells) {
  std::string out = "alpha,gamma,a,A,Lambda,P_min,admissible\n";
  char buf[256];
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.12g,%.12g,%.12g,%d\n", c.alpha, c.gamma, c.a, c.report.A,
                  c.report.Lambda, c.report.P_min, c.report.admissible ? 1 : 0);
    out += buf;
  }
  return out;
}

}  // namespace magstep
