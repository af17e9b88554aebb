#pragma once

#include <utility>
#include <vector>

#include "magstep/eigencore.hpp"

namespace magstep {

struct ZetaResult {
  double nu = 0;
  double value = 0;          // best estimate (Richardson over h and 2h for nu > 0)
  double fine = 0;           // value on the h_zeta mesh
  double mesh_error = 0;
  double truncation_change = 0;  // |change| at the last box enlargement
  double box_height = 0;     // t-extent of the final box
  int box_growths = 0;
};

inline constexpr double kZetaBoxTolerance = 2e-4;
inline constexpr double kZetaMaxHeight = 96.0;

// Bottom of the spectrum of the half-space operator with a unit field at angle
// nu from the boundary, computed through the real half-plane problem
//   -d_s^2 - d_t^2 + (t cos nu - s sin nu)^2,  t > 0, Neumann at t = 0.
// nu = 0 is answered by theta0(). Memoized per (nu, mesh).
ZetaResult zeta_result(double nu, const Resolution& res = {});
double zeta(double nu, const Resolution& res = {});

// zeta on ascending angles (parallel). Throws MonotonicityViolation when a
// decrease exceeds 2x the combined error estimates.
std::vector<std::pair<double, double>> zeta_profile(const std::vector<double>& nus, const Resolution& res = {},
                                                    int threads = 0);

// The truncated half-plane problem on a fixed box (exposed for tests).
double zeta_on_box(double nu, double height, double h, const Resolution& res = {});

}  // namespace magstep
