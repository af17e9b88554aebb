#pragma once

#include <string>
#include <utility>
#include <vector>

#include "magstep/reduced2d.hpp"

namespace magstep {

struct DecayReport {
  double eta = 0;
  double eta_fit = 0;      // mass ~ exp(-2 eta_fit r) on the fit window
  double fit_slope = 0;    // slope of log(shell mass) against r
  double r_squared = 0;
  double fit_r_lo = 0, fit_r_hi = 0;
  int fit_shells = 0;
  double eta_bound = 0;    // sqrt(sigma_ess - sigma)
  double weighted_energy = 0;  // discrete Q(e^{eta |x|} v)
  std::vector<std::pair<double, double>> radii;  // (r, mass of |x| in [r, r+1))
};

inline constexpr double kAgmonFitStart = 1e-2;
inline constexpr double kAgmonFitFloor = 1e-12;
inline constexpr double kAgmonWallZone = 3.0;

// Shell masses, tail fit and weighted energy of a normalized eigenfunction.
DecayReport decay_report(const EigenPair<cplx>& pair, const Grid2D& grid, const SparseHermitianOp<cplx>& op,
                         double sigma, double sigma_ess, double eta);
DecayReport decay_report(const LocalizedState& state, double eta);

// Discrete quadratic form of e^{eta |x|} v (v in symmetrized coordinates).
double weighted_energy(const SparseHermitianOp<cplx>& op, const Grid2D& grid, const Eigen::VectorXcd& v, double eta);

std::string shells_csv(const DecayReport& r);

}  // namespace magstep
