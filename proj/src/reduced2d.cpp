#include "magstep/reduced2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "magstep/fiber1d.hpp"
#include "magstep/minimize.hpp"
#include "magstep/sweep.hpp"
#include "magstep/zeta.hpp"

namespace magstep {

double StepFieldParams::nu0() const {
  double s = std::clamp(std::sin(alpha) * std::sin(gamma), 0.0, 1.0);
  return std::asin(s);
}

void StepFieldParams::validate() const {
  std::ostringstream os;
  if (!std::isfinite(a) || a == 0.0 || a < -1.0 || a >= 1.0)
    os << "field ratio a = " << a << " outside [-1, 1) \\ {0}";
  else if (!std::isfinite(alpha) || alpha <= 0.0 || alpha >= std::numbers::pi)
    os << "alpha = " << alpha << " outside (0, pi)";
  else if (std::sin(alpha) < kMinSinAlpha)
    os << "alpha = " << alpha << " too close to 0 or pi (sin alpha < " << kMinSinAlpha << ")";
  else if (!std::isfinite(gamma) || gamma < 0.0 || gamma > std::numbers::pi / 2 + 1e-12)
    os << "gamma = " << gamma << " outside [0, pi/2]";
  else
    return;
  throw RangeError(os.str());
}

std::string to_string(UpsilonKind k) {
  switch (k) {
    case UpsilonKind::LineAlpha: return "l_alpha";
    case UpsilonKind::Upsilon1: return "upsilon1";
    case UpsilonKind::Upsilon2: return "upsilon2";
    case UpsilonKind::Union12: return "upsilon1+upsilon2";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::EigenvalueCertified: return "EigenvalueCertified";
    case Verdict::InfimumAtInfinity: return "InfimumAtInfinity";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

UpsilonSet potential_minimum_set(const StepFieldParams& p, double tau) {
  p.validate();
  if (!(p.gamma > 0)) throw RangeError("the zero set of V is only described for gamma > 0");
  const double sg = std::sin(p.gamma), sa = std::sin(p.alpha);
  UpsilonSet u;
  bool has1 = tau >= 0;                  // line in D1 needs tau / sin(gamma) >= 0
  bool has2 = (p.a < 0) ? tau >= 0 : tau < 0;  // line in D2 needs tau / a <= 0
  if (p.a > 0 && tau == 0) has2 = false;
  if (has1) {
    u.offset1 = tau / sg;
    u.foot1 = tau / (sa * sg);
  }
  if (has2) {
    u.offset2 = tau / (p.a * sg);
    u.foot2 = tau / (p.a * sa * sg);
  }
  if (has1 && has2)
    u.kind = UpsilonKind::Union12;
  else if (has1)
    u.kind = UpsilonKind::Upsilon1;
  else if (has2)
    u.kind = UpsilonKind::Upsilon2;
  else
    u.kind = UpsilonKind::LineAlpha;
  u.inf_V = (u.kind == UpsilonKind::LineAlpha) ? tau * tau : 0.0;
  return u;
}

StepGauge::StepGauge(const StepFieldParams& p)
    : a_(p.a), sa_(std::sin(p.alpha)), ca_(std::cos(p.alpha)), cg_(std::cos(p.gamma)), cot_(ca_ / sa_) {}

std::array<double, 2> StepGauge::operator()(double x1, double x2) const {
  return {0.0, side(x1, x2) > 0 ? a2_d1(x1, x2) : a2_d2(x1, x2)};
}

double StepGauge::line_integral(double p1, double p2, double q1, double q2) const {
  // A2 is linear on each side of l_alpha: split at the crossing, trapezoid on each piece
  auto a2 = [&](double x1, double x2, bool d1) { return d1 ? a2_d1(x1, x2) : a2_d2(x1, x2); };
  double fp = side(p1, p2), fq = side(q1, q2);
  double dx2 = q2 - p2;
  if ((fp > 0) == (fq > 0) || fp == fq) {
    bool d1 = (fp > 0) || (fp == 0 && fq > 0);
    return 0.5 * (a2(p1, p2, d1) + a2(q1, q2, d1)) * dx2;
  }
  double s = fp / (fp - fq);
  double c1 = p1 + s * (q1 - p1), c2 = p2 + s * dx2;
  bool pd1 = fp > 0;
  return 0.5 * (a2(p1, p2, pd1) + a2(c1, c2, pd1)) * s * dx2 + 0.5 * (a2(c1, c2, !pd1) + a2(q1, q2, !pd1)) * (1 - s) * dx2;
}

double StepGauge::interface_jump(double p1, double p2, double q1, double q2) const {
  double fp = side(p1, p2), fq = side(q1, q2);
  if ((fp > 0) == (fq > 0)) return 0.0;
  double s = (fp == fq) ? 0.0 : fp / (fp - fq);
  double c1 = p1 + s * (q1 - p1), c2 = p2 + s * (q2 - p2);
  return std::abs(a2_d1(c1, c2) - a2_d2(c1, c2));
}

double step_potential(const StepFieldParams& p, double tau, double x1, double x2) {
  double f = x1 * std::sin(p.alpha) - x2 * std::cos(p.alpha);
  double s = f > 0 ? 1.0 : p.a;
  double v = s * std::sin(p.gamma) * f - tau;
  return v * v;
}

double default_half_width(const StepFieldParams& p) { return std::max(10.0, 10.0 / std::sqrt(std::min(std::abs(p.a), 1.0))); }

Grid2D reduced_grid(const StepFieldParams& p, double tau, double w, double h) {
  // x1 extents: the corner at the origin plus the feet of the zero lines, followed up to height w
  std::vector<double> feet{0.0};
  if (p.gamma > 0) {
    auto u = potential_minimum_set(p, tau);
    if (u.foot1) feet.push_back(*u.foot1);
    if (u.foot2) feet.push_back(*u.foot2);
  }
  double tilt = w * std::cos(p.alpha) / std::sin(p.alpha);
  double lo = INFINITY, hi = -INFINITY;
  for (double f : feet) {
    lo = std::min({lo, f, f + tilt});
    hi = std::max({hi, f, f + tilt});
  }
  return Grid2D::aligned(lo - w, hi + w, w, h);
}

SparseHermitianOp<cplx> assemble_reduced(const StepFieldParams& p, double tau, const Grid2D& grid) {
  StepGauge gauge(p);
  return assemble_2d_magnetic_schrodinger(grid, gauge,
                                          [&p, tau](double x1, double x2) { return step_potential(p, tau, x1, x2); });
}

namespace {

struct Solve {
  EigenPair<cplx> pair;
  Grid2D grid;
  SparseHermitianOp<cplx> op;
  double wall_mass = 0;
};

Solve solve_box(const StepFieldParams& p, double tau, double w, double h, const Resolution& res, double wall_width) {
  Solve s;
  s.grid = reduced_grid(p, tau, w, h);
  if (s.grid.size() > kMaxReducedNodes) {
    std::ostringstream os;
    os << "reduced problem at tau = " << tau << " needs " << s.grid.size() << " nodes (limit " << kMaxReducedNodes
       << "); narrow the tau window or coarsen h2d";
    throw ProblemTooLarge(os.str());
  }
  s.op = assemble_reduced(p, tau, s.grid);
  SolverOptions opt;
  opt.tol = res.tol;
  opt.max_iter = res.max_iter;
  opt.seed = res.seed;
  opt.preconditioner = Preconditioner::ShiftInvert;
  opt.block_size = 3;
  s.pair = lowest_eigenpair(s.op, opt);
  s.wall_mass = wall_mass(s.grid, s.pair.vector, wall_width);
  return s;
}

}  // namespace

SpectralResult sigma(const StepFieldParams& p, double tau, const Resolution& res, const SigmaOptions& opt) {
  p.validate();
  if (!std::isfinite(tau)) throw RangeError("tau must be finite");
  double w = default_half_width(p);
  Solve s = solve_box(p, tau, w, res.h2d, res, opt.wall_width);
  if (opt.localize) {
    int growths = 0;
    while (s.wall_mass > opt.wall_mass_tol && growths < opt.max_growths) {
      double w2 = w * opt.growth;
      Grid2D g2 = reduced_grid(p, tau, w2, res.h2d);
      if (g2.size() > opt.max_nodes) break;
      w = w2;
      s = solve_box(p, tau, w, res.h2d, res, opt.wall_width);
      ++growths;
    }
  }
  SpectralResult r;
  r.sigma = s.pair.value;
  r.residual = s.pair.residual;
  r.wall_mass = s.wall_mass;
  r.half_width = w;
  r.sigma_ess = std::numeric_limits<double>::quiet_NaN();
  if (opt.truncation_estimate) {
    Solve big = solve_box(p, tau, w * 1.5, res.h2d, res, opt.wall_width);
    // Dirichlet walls push eigenvalues up like 1/L^2 at worst; extrapolate that rate
    double d = std::abs(s.pair.value - big.pair.value);
    r.truncation_error_estimate = 0.8 * d;
    r.sigma = big.pair.value;
    r.residual = big.pair.residual;
    r.wall_mass = big.wall_mass;
    r.half_width = w * 1.5;
    s = std::move(big);
  }
  if (opt.mesh_error) {
    Solve coarse = solve_box(p, tau, r.half_width, 2 * res.h2d, res, opt.wall_width);
    r.mesh_error_estimate = std::abs(r.sigma - coarse.pair.value) / 3.0;
  }
  r.grid = s.grid;
  if (opt.keep_eigenpair) r.eigenpair = std::move(s.pair);
  return r;
}

double sigma_ess(const StepFieldParams& p, double tau, const Resolution& res) {
  p.validate();
  if (!(p.gamma > 0)) {
    // no tau dependence other than the constant potential tau^2
    return std::abs(p.a) * theta0(res).value + tau * tau;
  }
  const double sg = std::sin(p.gamma), cg = std::cos(p.gamma);
  auto f = [&](double xi) {
    double q = xi * sg - tau * cg;
    return mu(p.a, tau * sg + xi * cg, res) + q * q;
  };
  if (cg < 1e-12) return mu(p.a, tau, res);
  double center = tau * cg / sg;
  double reach = std::sqrt(f(center)) / sg;
  auto m = scan_and_refine(f, center - reach, center + reach, 41, 1e-7);
  return m.f;
}

std::pair<double, double> default_tau_window(const StepFieldParams& p) {
  if (!(p.gamma > 0)) return {-4.0, 4.0};
  double t = std::max(4.0, 4.0 / (std::min(std::abs(p.a), 1.0) * std::sin(p.gamma)));
  return {-t, t};
}

// The bottom of the spectrum at fixed tau is below sigma_ess(tau) as well as below
// the Dirichlet box value. Without a certified eigenvalue the box value can sit well
// above the essential threshold (the state spreads along l_alpha), so lambda is
// lowered to the refined minimum of sigma_ess over the window when that is smaller.
static void cap_by_essential(BandProfile& bp, const StepFieldParams& p, const std::vector<double>& taus,
                      const Resolution& res) {
  std::vector<double> es;
  for (const auto& s : bp.samples) es.push_back(s.result.sigma_ess);
  auto m = refine_scan([&](double t) { return sigma_ess(p, t, res); }, taus, es, 1e-6);
  bp.lambda = std::min(bp.lambda, m.f);
}

BandProfile band_profile(const StepFieldParams& p, std::optional<std::pair<double, double>> tau_range, int n_samples,
                         const Resolution& res, int threads) {
  p.validate();
  if (n_samples < 5) throw RangeError("band_profile needs at least 5 samples");
  auto [lo, hi] = tau_range.value_or(default_tau_window(p));
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw RangeError("invalid tau window");

  BandProfile bp;
  bp.params = p;
  bp.beta = beta(p.a, res).value;
  bp.zeta_nu0 = zeta(p.nu0(), res);
  bp.threshold = std::min(bp.beta, std::abs(p.a) * bp.zeta_nu0);
  bp.limit_left = p.a < 0 ? INFINITY : p.a * bp.zeta_nu0;
  bp.limit_right = p.a < 0 ? std::abs(p.a) * bp.zeta_nu0 : bp.zeta_nu0;

  std::vector<double> taus(n_samples);
  for (int i = 0; i < n_samples; ++i) taus[i] = lo + (hi - lo) * i / (n_samples - 1);

  if (!(p.gamma > 0)) {
    // sigma(tau) = sigma(0) + tau^2: one solve
    SpectralResult r0 = sigma(p, 0.0, res);
    r0.sigma_ess = sigma_ess(p, 0.0, res);
    r0.below_essential = r0.sigma < r0.sigma_ess - r0.margin();
    for (double t : taus) {
      SpectralResult r = r0;
      r.sigma += t * t;
      r.sigma_ess += t * t;
      bp.samples.push_back({t, r});
    }
    bp.tau_star = 0.0;
    bp.lambda = r0.sigma;
    bp.margin = r0.margin();
    bp.verdict = bp.lambda < bp.threshold - bp.margin ? Verdict::EigenvalueCertified : Verdict::Inconclusive;
    // sigma_ess is tau^2 + const here, minimal at 0
    if (bp.verdict != Verdict::EigenvalueCertified) bp.lambda = std::min(bp.lambda, r0.sigma_ess);
    return bp;
  }

  SigmaOptions quick;
  quick.mesh_error = false;
  auto results = parallel_map(
      taus.size(),
      [&](std::size_t i) {
        SpectralResult r = sigma(p, taus[i], res, quick);
        r.sigma_ess = sigma_ess(p, taus[i], res);
        r.below_essential = r.sigma < r.sigma_ess - r.margin();
        return r;
      },
      threads);
  std::vector<double> fs;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    bp.samples.push_back({taus[i], results[i]});
    fs.push_back(results[i].sigma);
  }
  std::size_t k = std::min_element(fs.begin(), fs.end()) - fs.begin();
  bool interior = k > 0 && k + 1 < fs.size();
  if (interior) {
    auto m = refine_scan([&](double t) { return sigma(p, t, res, quick).sigma; }, taus, fs, 1e-6);
    SpectralResult best = sigma(p, m.x, res);
    bp.tau_star = m.x;
    bp.lambda = best.sigma;
    bp.margin = best.margin();
    double dip = std::min(fs.front(), fs.back()) - bp.lambda;
    if (bp.lambda < bp.threshold - bp.margin) {
      bp.verdict = Verdict::EigenvalueCertified;
      return bp;
    }
    if (dip > bp.margin) {
      bp.verdict = Verdict::Inconclusive;
      cap_by_essential(bp, p, taus, res);
      return bp;
    }
  } else {
    bp.lambda = fs[k];
    bp.margin = results[k].margin();
  }
  // no usable interior dip: does the window end sit at the band limit?
  bool left_ok = std::isfinite(bp.limit_left) && std::abs(fs.front() - bp.limit_left) <= kBandLimitTolerance;
  bool right_ok = std::abs(fs.back() - bp.limit_right) <= kBandLimitTolerance;
  bool at_end = (k == 0 && left_ok) || (k + 1 == fs.size() && right_ok) || (interior && (left_ok || right_ok));
  bp.verdict = at_end ? Verdict::InfimumAtInfinity : Verdict::Inconclusive;
  if (!interior) bp.tau_star.reset();
  cap_by_essential(bp, p, taus, res);
  return bp;
}

LocalizedState eigenfunction(const StepFieldParams& p, double tau, const Resolution& res) {
  SigmaOptions opt;
  opt.localize = true;
  opt.keep_eigenpair = true;
  SpectralResult r = sigma(p, tau, res, opt);
  double ess = sigma_ess(p, tau, res);
  if (!(r.sigma < ess - r.margin())) {
    std::ostringstream os;
    os << "sigma = " << r.sigma << " is not below the essential threshold " << ess << " by the margin " << r.margin();
    throw NotBelowEssential(os.str(), r.sigma, ess);
  }
  if (r.wall_mass > opt.wall_mass_tol) {
    std::ostringstream os;
    os << "eigenfunction mass near the artificial walls is " << r.wall_mass << " after box growth";
    throw GridTooSmall(os.str(), r.wall_mass);
  }
  LocalizedState st;
  st.params = p;
  st.tau = tau;
  st.pair = std::move(*r.eigenpair);
  st.grid = r.grid;
  st.op = assemble_reduced(p, tau, st.grid);
  st.sigma = r.sigma;
  st.sigma_ess = ess;
  st.margin = r.margin();
  st.wall_mass = r.wall_mass;
  return st;
}

}  // namespace magstep
