#pragma once

#include <string>
#include <vector>

#include "magstep/eigencore.hpp"
#include "magstep/reduced2d.hpp"

namespace magstep {

// Lower bound for the de Gennes constant used by the Theta0LowerBound variant.
inline constexpr double kTheta0Low = 0.590106124;

enum class LambdaVariant { ExactLambda, Theta0LowerBound };
std::string to_string(LambdaVariant v);
LambdaVariant parse_variant(const std::string& s);

// Closed-form quartic-moment coefficient A(alpha, gamma, a).
double coefficient_A(const StepFieldParams& p);

// ExactLambda: min(beta_a, |a| zeta_nu0).  Theta0LowerBound: |a| * kTheta0Low.
double lambda_bound(const StepFieldParams& p, LambdaVariant variant, const Resolution& res = {});

// P(x) = A x^2 - (pi/2) Lambda x + pi/2
double polynomial_P(double A, double Lambda, double x);

struct CriterionReport {
  double A = 0;
  double Lambda = 0;
  double x_min = 0;
  double P_min = 0;  // -inf when A <= 0
  bool admissible = false;
  bool nonpositive_A = false;  // x_min is then the positive root of P
  LambdaVariant variant = LambdaVariant::Theta0LowerBound;
};

CriterionReport admissibility_from(double A, double Lambda, LambdaVariant variant);
CriterionReport admissibility(const StepFieldParams& p, LambdaVariant variant, const Resolution& res = {});

// Trial state exp(-omega rho^2/2) exp(-i rho g(theta)) with g = c1 e^t + c2 e^-t on
// (-pi + alpha, 0] and c3 e^t + c4 e^-t on (0, alpha), c4 = c1 + c2 - c3.
struct TrialFunctionSpec {
  double omega = 1.0;
  double c1 = 0, c2 = 0, c3 = 0, c4 = 0;

  static TrialFunctionSpec make(double omega, double c1, double c2, double c3) {
    return {omega, c1, c2, c3, c1 + c2 - c3};
  }
  void validate() const;
};

// Energy functional of the trial state (quadratic form minus Lambda times the norm).
double trial_energy(const StepFieldParams& p, const TrialFunctionSpec& spec, double Lambda);

// Coefficients minimizing trial_energy for the given omega.
TrialFunctionSpec optimal_trial(const StepFieldParams& p, double omega);

struct AxisGrid {
  double lo = 0, hi = 0;
  int n = 1;
  std::vector<double> values() const;
  static AxisGrid parse(const std::string& spec);  // "lo:hi:n" or a single value
};

struct RegionCell {
  double alpha = 0, gamma = 0, a = 0;
  CriterionReport report;
};

// Cells ordered alpha-major, then gamma, then a. The serial version is the
// reference for the parallel one.
std::vector<RegionCell> region_scan(const AxisGrid& alpha, const AxisGrid& gamma, const AxisGrid& a,
                                    LambdaVariant variant, const Resolution& res = {}, int threads = 0);
std::vector<RegionCell> region_scan_serial(const AxisGrid& alpha, const AxisGrid& gamma, const AxisGrid& a,
                                           LambdaVariant variant, const Resolution& res = {});

std::string region_csv(const std::vector<RegionCell>& cells);

}  // namespace magstep
