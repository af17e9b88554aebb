#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "magstep/eigencore.hpp"

namespace magstep {

// Field ratio a and momentum xi of the line operator
//   -d^2/dt^2 + (a t - xi)^2  (t < 0),   -d^2/dt^2 + (t - xi)^2  (t > 0).
struct FiberParams {
  double a = -1.0;
  double xi = 0.0;
  // a in [-1, 1) \ {0}; a = 1 only when allow_unit is set (sanity checks).
  void validate(bool allow_unit = false) const;
};

struct FiberCurve {
  std::vector<std::pair<double, double>> samples;  // (xi, mu), sorted by xi
  std::optional<std::pair<double, double>> minimizer;
  double refinement_tol = 1e-8;
};

inline constexpr double kFiberWindow = 12.0;

// Lowest eigenvalue of the line operator above (a = 1 accepted).
double mu(double a, double xi, const Resolution& res = {}, double window = kFiberWindow);

// Lowest eigenvalue of -d^2/dt^2 + (t - xi)^2 on t > 0, Neumann at 0.
double mu_neumann(double xi, const Resolution& res = {}, double window = kFiberWindow);

struct Theta0Result {
  double value = 0;         // minimum on the h1d mesh
  double xi_min = 0;
  double coarse_value = 0;  // same on the 2*h1d mesh
  double extrapolated = 0;  // one Richardson step
  double mesh_error = 0;    // |value - coarse| / 3
};

// de Gennes constant: scan of mu_neumann on [0, 3] then Brent refinement.
// Results are memoized per mesh.
Theta0Result theta0(const Resolution& res = {});

struct BetaResult {
  double value = 0;
  std::optional<double> xi_star;  // absent for a > 0 (infimum not attained)
  double scan_min = 0;            // smallest sampled mu
  double scan_min_xi = 0;
  bool certified = true;          // for a > 0: scan_min >= a - tolerance
};

// Infimum of mu_a over xi. Memoized per (a, mesh).
BetaResult beta(double a, const Resolution& res = {});

// mu_a sampled on the given (sorted) xi values, in parallel.
FiberCurve mu_curve(double a, const std::vector<double>& xis, const Resolution& res = {}, int threads = 0);

}  // namespace magstep
