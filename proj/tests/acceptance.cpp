// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Tolerances are fixed here and nowhere else.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "magstep/agmon.hpp"
#include "magstep/criterion.hpp"
#include "magstep/edgeprofile.hpp"
#include "magstep/fiber1d.hpp"
#include "magstep/reduced2d.hpp"
#include "magstep/zeta.hpp"
#include "oracles.hpp"

using namespace magstep;
using std::numbers::pi;

namespace {

namespace tol {
constexpr double kTheta0Anchor = 0.590106124;
constexpr double kTheta0Reference = 0.5901061;
constexpr double kTheta0Low = 5e-4;
constexpr double kTheta0High = 0.5905;
constexpr double kTheta0Extrapolated = 5e-5;
constexpr double kBetaPositive = 2e-3;
constexpr double kBetaSymmetric = 1e-3;
constexpr double kBetaNegative = 1e-3;
constexpr double kZeta0 = 5e-4;
constexpr double kZetaHalfPi = 2e-3;
constexpr double kFactorization = 1e-10;
constexpr double kEssentialBeta = 1e-3;
constexpr double kBandLimit = 3e-2;
constexpr double kTrialIdentity = 1e-10;
constexpr double kQuadrature = 1e-6;
constexpr double kClosedFormA = 1e-12;
constexpr double kCertifiedGap = 1e-3;
constexpr double kAgmonR2 = 0.98;
constexpr double kAgmonEtaFraction = 0.5;
}  // namespace tol

struct Outcome {
  bool pass = true;
  std::string detail;
};

void require(Outcome& o, bool cond, const std::string& what) {
  if (!cond && o.pass) {
    o.pass = false;
    o.detail = "failed: " + what;
  }
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Profiles shared between criteria (computed once).
const BandProfile& profile_of(const StepFieldParams& p) {
  static std::vector<std::pair<StepFieldParams, BandProfile>> cache;
  for (const auto& [q, bp] : cache)
    if (q.alpha == p.alpha && q.gamma == p.gamma && q.a == p.a) return bp;
  cache.emplace_back(p, band_profile(p));
  return cache.back().second;
}

const LocalizationReport& ball_report() {
  static const LocalizationReport r = profile(EdgeGeometry::ball_cut(16), -1.0);
  return r;
}

Outcome c1_theta0() {
  Outcome o;
  auto t = theta0();
  require(o, t.value >= tol::kTheta0Anchor - tol::kTheta0Low && t.value <= tol::kTheta0High, "Theta0 range");
  require(o, std::abs(t.extrapolated - tol::kTheta0Reference) <= tol::kTheta0Extrapolated, "extrapolated Theta0");
  if (o.pass) o.detail = fmt("Theta0 = %.9f, extrapolated %.9f", t.value, t.extrapolated);
  return o;
}

Outcome c2_beta() {
  Outcome o;
  double th = theta0().value;
  double worst = 0;
  for (double a : {0.25, 0.5, 0.75}) {
    auto b = beta(a);
    worst = std::max(worst, std::abs(b.scan_min - a));
    require(o, std::abs(b.scan_min - a) <= tol::kBetaPositive, fmt("scan infimum at a = %.2f", a));
  }
  double bm1 = beta(-1.0).value;
  require(o, std::abs(bm1 - th) <= tol::kBetaSymmetric, "beta_{-1} vs Theta0");
  for (double a : {-0.25, -0.5, -0.75}) {
    double b = beta(a).value;
    require(o, b >= std::abs(a) * th - tol::kBetaNegative && b < std::abs(a), fmt("bracket at a = %.2f", a));
  }
  if (o.pass) o.detail = fmt("max |inf mu_a - a| = %.2e, beta_{-1} - Theta0 = %.2e", worst, bm1 - th);
  return o;
}

Outcome c3_zeta() {
  Outcome o;
  std::vector<double> nus;
  for (int k = 0; k <= 7; ++k) nus.push_back(k * pi / 14);
  auto prof = zeta_profile(nus);
  double th = theta0().value;
  require(o, std::abs(prof.front().second - th) <= tol::kZeta0, "zeta_0 vs Theta0");
  require(o, std::abs(prof.back().second - 1.0) <= tol::kZetaHalfPi, "zeta_{pi/2} vs 1");
  for (std::size_t k = 0; k + 1 < prof.size(); ++k) {
    auto r0 = zeta_result(nus[k]), r1 = zeta_result(nus[k + 1]);
    double slack = 2 * (r0.mesh_error + r1.mesh_error);
    require(o, prof[k + 1].second > prof[k].second - slack, fmt("monotonicity at nu = %.4f", nus[k + 1]));
  }
  if (o.pass) o.detail = fmt("zeta_0 = %.6f, zeta_{pi/2} = %.6f", prof.front().second, prof.back().second);
  return o;
}

Outcome c4_factorization() {
  Outcome o;
  SigmaOptions quick;
  quick.mesh_error = false;
  double worst = 0;
  for (auto p : {StepFieldParams{pi / 2, 0.0, -1.0}, StepFieldParams{2.0, 0.0, 0.5}}) {
    double s0 = sigma(p, 0.0, {}, quick).sigma;
    for (double tau : {0.3, 1.0}) {
      double d = std::abs(sigma(p, tau, {}, quick).sigma - s0 - tau * tau);
      worst = std::max(worst, d);
      require(o, d <= tol::kFactorization, fmt("alpha = %.3f, tau = %.1f", p.alpha, tau));
    }
  }
  if (o.pass) o.detail = fmt("max deviation %.2e", worst);
  return o;
}

Outcome c5_essential() {
  Outcome o;
  // gamma > 0 throughout: at gamma = 0 with a > 0 the threshold is a Theta0 < beta_a
  const StepFieldParams triples[] = {{pi / 2, pi / 4, -0.5}, {pi / 2, pi / 4, 0.5}, {1.2, 0.6, -0.75},
                                     {pi / 2, 0.3, -1.0},    {2.0, 1.2, 0.3}};
  SigmaOptions opt;
  opt.truncation_estimate = true;
  double worst_gap = -1e300;
  for (const auto& p : triples) {
    double b = beta(p.a).value;
    for (double tau : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
      auto r = sigma(p, tau, {}, opt);
      double se = sigma_ess(p, tau);
      worst_gap = std::max(worst_gap, r.sigma - se - r.margin());
      require(o, r.sigma <= se + r.margin(), fmt("sigma <= sigma_ess at (%.3f, %.3f), tau = %.1f", p.alpha, p.gamma, tau));
      require(o, se >= b - tol::kEssentialBeta, fmt("sigma_ess >= beta at a = %.2f, tau = %.1f", p.a, tau));
    }
  }
  if (o.pass) o.detail = fmt("25 cells, max sigma - sigma_ess - margin = %.2e", worst_gap);
  return o;
}

Outcome c6_band_limits() {
  Outcome o;
  const auto& neg = profile_of({pi / 2, pi / 4, -0.5});
  double right = neg.samples.back().result.sigma;
  require(o, std::abs(right - 0.5 * neg.zeta_nu0) <= tol::kBandLimit, "a = -0.5 right end");
  const auto& pos = profile_of({pi / 2, pi / 4, 0.5});
  double l = pos.samples.front().result.sigma, r = pos.samples.back().result.sigma;
  require(o, std::abs(l - 0.5 * pos.zeta_nu0) <= tol::kBandLimit, "a = 0.5 left end");
  require(o, std::abs(r - pos.zeta_nu0) <= tol::kBandLimit, "a = 0.5 right end");
  if (o.pass)
    o.detail = fmt("deviations %.2e, %.2e, %.2e", std::abs(right - 0.5 * neg.zeta_nu0),
                   std::abs(l - 0.5 * pos.zeta_nu0), std::abs(r - pos.zeta_nu0));
  return o;
}

Outcome c7_upper_bound() {
  Outcome o;
  int n = 0;
  for (auto p : {StepFieldParams{pi / 2, pi / 4, -0.5}, StepFieldParams{pi / 2, pi / 4, 0.5},
                 StepFieldParams{pi / 2, 0.0, -1.0}}) {
    const auto& bp = profile_of(p);
    require(o, bp.lambda <= bp.threshold + bp.margin, fmt("triple (%.3f, %.3f, %.2f)", p.alpha, p.gamma, p.a));
    ++n;
  }
  for (const auto& e : ball_report().lambda_profile) {
    StepFieldParams p{e.sample.alpha, e.sample.gamma, -1.0};
    double bound = lambda_bound(p, LambdaVariant::ExactLambda);
    require(o, e.lambda <= bound + e.margin, fmt("edge sample s = %.3f", e.sample.s));
    ++n;
  }
  if (o.pass) o.detail = std::to_string(n) + " profiled triples";
  return o;
}

Outcome c8_trial() {
  Outcome o;
  std::mt19937_64 gen(20240611);
  std::uniform_real_distribution<double> al(0.2, pi - 0.2), ga(0, pi / 2), aa(-1, 0.98), wd(0.2, 5), ld(0.05, 1);
  auto draw = [&] {
    double a = aa(gen);
    if (std::abs(a) < 0.05) a = 0.05;
    return StepFieldParams{al(gen), ga(gen), a};
  };
  double worst_j = 0, worst_q = 0;
  for (int k = 0; k < 20; ++k) {
    auto p = draw();
    double omega = wd(gen), Lambda = ld(gen);
    auto t = optimal_trial(p, omega);
    double J = trial_energy(p, t, Lambda);
    double P = polynomial_P(coefficient_A(p), Lambda, 1 / omega);
    worst_j = std::max(worst_j, std::abs(J - P));
    require(o, std::abs(J - P) <= tol::kTrialIdentity, "J = P(1/omega)");
    if (k < 4) {
      double q = oracle::quadrature_energy(p, t, Lambda);
      worst_q = std::max(worst_q, std::abs(q - J));
      require(o, std::abs(q - J) <= tol::kQuadrature, "quadrature oracle");
    }
  }
  double a_half = coefficient_A({pi / 2, pi / 2, -1.0});
  double a_zero = coefficient_A({pi / 2, 0.0, -1.0});
  double closed_zero = pi / 4 * (std::exp(pi / 2) - 1) / (std::exp(pi) - 1);
  require(o, std::abs(a_half - pi / 4) <= tol::kClosedFormA, "A(pi/2, pi/2, -1)");
  require(o, std::abs(a_zero - closed_zero) <= tol::kClosedFormA, "A(pi/2, 0, -1)");
  if (o.pass)
    o.detail = fmt("max |J - P| = %.1e, max |quad - J| = %.1e, A errors %.1e", worst_j, worst_q,
                   std::max(std::abs(a_half - pi / 4), std::abs(a_zero - closed_zero)));
  return o;
}

Outcome c9_region() {
  Outcome o;
  AxisGrid ag{0.1, 3.04, 40}, gg{0.0, 1.5708, 40}, aa{-1.0, 0.99, 40};
  auto cells = region_scan(ag, gg, aa, LambdaVariant::Theta0LowerBound);
  auto at = [&](int i, int j, int k) { return cells[(static_cast<std::size_t>(i) * gg.n + j) * aa.n + k]; };
  auto alphas = ag.values();
  // the two alpha nodes around pi/2 at gamma = 0, a = -1
  int i_lo = 0;
  while (alphas[i_lo + 1] < pi / 2) ++i_lo;
  require(o, at(i_lo, 0, 0).report.admissible && at(i_lo + 1, 0, 0).report.admissible, "neighbourhood of (pi/2, 0, -1)");
  auto far = admissibility({pi / 2, pi / 2, -1.0}, LambdaVariant::Theta0LowerBound);
  require(o, !at(i_lo, gg.n - 1, 0).report.admissible && !far.admissible, "(pi/2, pi/2, -1)");
  long total = 0;
  for (const auto& c : cells) total += c.report.admissible;

  // spot check: exact Lambda admits everything the Theta0 variant admits
  AxisGrid sa{pi / 2 - 0.1, pi / 2 + 0.1, 5}, sg{0.0, 0.04, 5}, sb{-1.0, -0.98, 5};
  auto low = region_scan(sa, sg, sb, LambdaVariant::Theta0LowerBound);
  auto ex = region_scan(sa, sg, sb, LambdaVariant::ExactLambda);
  long low_n = 0;
  for (std::size_t i = 0; i < low.size(); ++i) {
    low_n += low[i].report.admissible;
    if (low[i].report.admissible) require(o, ex[i].report.admissible, "exact set contains Theta0 set");
  }
  require(o, low_n > 0, "spot-check grid has Theta0-admissible cells");
  if (o.pass) o.detail = fmt("%g of 64000 admissible; spot check %g/125 contained", total, low_n);
  return o;
}

Outcome c10_certification() {
  Outcome o;
  StepFieldParams p{pi / 2, 0.0, -1.0};
  const auto& bp = profile_of(p);
  double th = theta0().value;
  require(o, bp.verdict == Verdict::EigenvalueCertified, "verdict");
  require(o, bp.lambda < th - tol::kCertifiedGap, "lambda < Theta0 - 1e-3");
  if (!o.pass) return o;
  auto st = eigenfunction(p, *bp.tau_star);
  double eta = tol::kAgmonEtaFraction * std::sqrt(st.sigma_ess - st.sigma);
  auto r = decay_report(st, eta);
  require(o, std::isfinite(r.weighted_energy), "finite weighted energy");
  require(o, r.r_squared >= tol::kAgmonR2, "log-linear tail");
  if (o.pass)
    o.detail = fmt("lambda = %.6f, R^2 = %.5f, weighted energy %.4f", bp.lambda, r.r_squared, r.weighted_energy);
  return o;
}

Outcome c11_semiclassical() {
  Outcome o;
  const auto& rep = ball_report();
  require(o, rep.assumption_holds && !rep.D_set.empty(), "nonempty D");
  for (const auto& e : rep.lambda_profile)
    if (e.sample.gamma == 0.0) require(o, e.in_D, fmt("gamma = 0 sample s = %.3f in D", e.sample.s));
  const double b = 1e4;
  double th = theta0().value;
  if (o.pass) {
    double pred = ground_energy_prediction(rep, b);
    require(o, pred < b * th, "b lambda_min < b Theta0");
    o.detail = fmt("lambda_min = %.6f, b lambda_min = %.2f < b Theta0 = %.2f", rep.lambda_min, pred, b * th);
  }
  return o;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    std::function<Outcome()> run;
  };
  const Entry entries[] = {
      {"1 de Gennes constant", c1_theta0},
      {"2 beta_a identities", c2_beta},
      {"3 zeta endpoints and monotonicity", c3_zeta},
      {"4 gamma = 0 factorization", c4_factorization},
      {"5 essential-spectrum inequalities", c5_essential},
      {"6 band limits", c6_band_limits},
      {"7 lambda upper bound", c7_upper_bound},
      {"8 trial-state criterion consistency", c8_trial},
      {"9 admissible region", c9_region},
      {"10 eigenvalue certification and decay", c10_certification},
      {"11 edge localization", c11_semiclassical},
  };
  int failed = 0;
  for (const auto& e : entries) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = e.run();
    } catch (const std::exception& ex) {
      o.pass = false;
      o.detail = std::string("exception: ") + ex.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  %-40s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", e.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
