#include "magstep/fiber1d.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "magstep/memo.hpp"
#include "magstep/minimize.hpp"
#include "magstep/sweep.hpp"

namespace magstep {

void FiberParams::validate(bool allow_unit) const {
  bool ok = std::isfinite(a) && std::isfinite(xi) && a != 0.0 && a >= -1.0 && (a < 1.0 || (allow_unit && a == 1.0));
  if (!ok) {
    std::ostringstream os;
    os << "field ratio a = " << a << " outside [-1, 1) \\ {0}";
    throw RangeError(os.str());
  }
}

double mu(double a, double xi, const Resolution& res, double window) {
  FiberParams{a, xi}.validate(true);
  if (!(window > 0)) throw RangeError("fiber window must be positive");
  // wells at t = xi/a (t < 0 side) and t = xi (t > 0 side)
  double lo = std::min(0.0, xi / a) - window / std::sqrt(std::abs(a));
  double hi = std::max(0.0, xi) + window;
  Grid1D g = Grid1D::aligned(lo, hi, res.h1d);
  auto op = assemble_1d_schrodinger(g, [a, xi](double t) {
    double s = (t < 0 ? a * t : t) - xi;
    return s * s;
  });
  return lowest_eigenpair_tridiagonal(op).value;
}

double mu_neumann(double xi, const Resolution& res, double window) {
  if (!std::isfinite(xi)) throw RangeError("xi must be finite");
  Grid1D g = Grid1D::aligned(0.0, std::max(0.0, xi) + window, res.h1d);
  auto op = assemble_1d_neumann_schrodinger(g, [xi](double t) { return (t - xi) * (t - xi); });
  return lowest_eigenpair_tridiagonal(op).value;
}

namespace {

constexpr double kXiTol = 1e-8;

std::pair<double, double> theta0_on_mesh(const Resolution& res) {
  auto f = [&](double xi) { return mu_neumann(xi, res); };
  auto m = scan_and_refine(f, 0.0, 3.0, 61, kXiTol);
  if (!m.interior) throw MinimizerNotBracketed("no interior minimum of the Neumann band function on [0, 3]");
  return {m.f, m.x};
}

Memo<double, Theta0Result>& theta0_memo() {
  static Memo<double, Theta0Result> memo;
  return memo;
}

Memo<std::tuple<double, double>, BetaResult>& beta_memo() {
  static Memo<std::tuple<double, double>, BetaResult> memo;
  return memo;
}

}  // namespace

Theta0Result theta0(const Resolution& res) {
  return theta0_memo().get(res.h1d, [&] {
    Theta0Result r;
    std::tie(r.value, r.xi_min) = theta0_on_mesh(res);
    r.coarse_value = theta0_on_mesh(res.coarsened()).first;
    r.extrapolated = (4.0 * r.value - r.coarse_value) / 3.0;
    r.mesh_error = std::abs(r.value - r.coarse_value) / 3.0;
    return r;
  });
}

BetaResult beta(double a, const Resolution& res) {
  FiberParams{a, 0.0}.validate();
  return beta_memo().get({a, res.h1d}, [&] {
    BetaResult r;
    auto f = [&](double xi) { return mu(a, xi, res); };
    if (a > 0) {
      // mu_a decreases to a as xi -> -infinity; the scan only certifies the bound
      const int n = 361;
      double lo = -12.0, hi = 6.0;
      r.scan_min = INFINITY;
      for (int i = 0; i < n; ++i) {
        double xi = lo + (hi - lo) * i / (n - 1);
        double v = f(xi);
        if (v < r.scan_min) {
          r.scan_min = v;
          r.scan_min_xi = xi;
        }
      }
      r.value = a;
      r.certified = r.scan_min >= a - 1e-5;
      return r;
    }
    auto m = scan_and_refine(f, -3.0, 6.0, 181, kXiTol);
    if (!m.interior) {
      std::ostringstream os;
      os << "band function mu_a for a = " << a << " has no interior minimum on [-3, 6]";
      throw MinimizerNotBracketed(os.str());
    }
    r.value = m.f;
    r.xi_star = m.x;
    auto it = std::min_element(m.fs.begin(), m.fs.end());
    r.scan_min = *it;
    r.scan_min_xi = m.xs[it - m.fs.begin()];
    return r;
  });
}

FiberCurve mu_curve(double a, const std::vector<double>& xis, const Resolution& res, int threads) {
  if (!std::is_sorted(xis.begin(), xis.end())) throw RangeError("xi samples must be sorted");
  auto vals = parallel_map(xis.size(), [&](std::size_t i) { return mu(a, xis[i], res); }, threads);
  FiberCurve c;
  for (std::size_t i = 0; i < xis.size(); ++i) c.samples.emplace_back(xis[i], vals[i]);
  if (xis.size() >= 3) {
    auto k = std::min_element(vals.begin(), vals.end()) - vals.begin();
    if (k > 0 && k + 1 < static_cast<long>(vals.size())) {
      auto m = refine_scan([&](double xi) { return mu(a, xi, res); }, xis, vals, c.refinement_tol);
      c.minimizer = std::make_pair(m.x, m.f);
    }
  }
  return c;
}

}  // namespace magstep
