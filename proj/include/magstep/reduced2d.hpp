#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "magstep/eigencore.hpp"

namespace magstep {

// (a, alpha, gamma): field ratio, angle of the discontinuity half-plane, tilt
// of the field from the normal direction.
struct StepFieldParams {
  double alpha = 1.5707963267948966;
  double gamma = 0.0;
  double a = -1.0;

  double nu0() const;  // arcsin(sin alpha sin gamma)
  void validate() const;
};

inline constexpr double kMinSinAlpha = 0.05;

// Which zero set the potential V has, for gamma > 0.
enum class UpsilonKind { LineAlpha, Upsilon1, Upsilon2, Union12 };
std::string to_string(UpsilonKind k);

struct UpsilonSet {
  UpsilonKind kind = UpsilonKind::LineAlpha;
  double inf_V = 0;
  // Signed offsets of the zero lines from l_alpha (x1 sin alpha - x2 cos alpha = offset)
  // and where they meet the boundary x2 = 0.
  std::optional<double> offset1, offset2;
  std::optional<double> foot1, foot2;
};

UpsilonSet potential_minimum_set(const StepFieldParams& p, double tau);

// Vector potential (0, A2) with curl cos(gamma) in D1 and a cos(gamma) in D2,
// continuous across l_alpha.
class StepGauge : public VectorPotential {
 public:
  explicit StepGauge(const StepFieldParams& p);
  std::array<double, 2> operator()(double x1, double x2) const override;
  double line_integral(double p1, double p2, double q1, double q2) const override;
  double interface_jump(double p1, double p2, double q1, double q2) const override;

  // Signed distance-like coordinate; positive in D1.
  double side(double x1, double x2) const { return x1 * sa_ - x2 * ca_; }
  double a2_d1(double x1, double x2) const { return cg_ * (x1 - (1.0 - a_) * cot_ * x2); }
  double a2_d2(double x1, double) const { return a_ * cg_ * x1; }

 private:
  double a_, sa_, ca_, cg_, cot_;
};

// V = (x1 b2 - x2 b1 - tau)^2 with b = s (cos a sin g, sin a sin g), s = 1 in D1, a in D2.
double step_potential(const StepFieldParams& p, double tau, double x1, double x2);

// Box of half-width w (and height w) around the relevant zero lines.
Grid2D reduced_grid(const StepFieldParams& p, double tau, double w, double h);
double default_half_width(const StepFieldParams& p);

SparseHermitianOp<cplx> assemble_reduced(const StepFieldParams& p, double tau, const Grid2D& grid);

struct SigmaOptions {
  bool mesh_error = true;           // extra solve at 2h
  bool truncation_estimate = false; // extra solve on a 1.5x box
  bool localize = false;            // grow the box until the wall mass is small
  bool keep_eigenpair = false;
  double wall_width = 3.0;
  double wall_mass_tol = 1e-8;
  int max_growths = 5;
  double growth = 1.5;
  long max_nodes = 700000;
};

inline constexpr double kCertificationGuard = 1e-3;
// Hard cap for a single reduced solve (small gamma with large |tau| pushes the zero lines far out).
inline constexpr long kMaxReducedNodes = 2000000;

struct SpectralResult {
  double sigma = 0;
  double sigma_ess = 0;  // NaN until computed
  bool below_essential = false;
  std::optional<EigenPair<cplx>> eigenpair;
  double mesh_error_estimate = 0;
  double truncation_error_estimate = 0;
  double residual = 0;
  double wall_mass = 0;
  double half_width = 0;
  Grid2D grid;

  double margin() const { return residual + mesh_error_estimate + truncation_error_estimate + kCertificationGuard; }
};

SpectralResult sigma(const StepFieldParams& p, double tau, const Resolution& res = {}, const SigmaOptions& opt = {});

// Bottom of the essential spectrum of the reduced operator at fixed tau.
double sigma_ess(const StepFieldParams& p, double tau, const Resolution& res = {});

enum class Verdict { EigenvalueCertified, InfimumAtInfinity, Inconclusive };
std::string to_string(Verdict v);

struct BandSample {
  double tau = 0;
  SpectralResult result;
};

struct BandProfile {
  StepFieldParams params;
  std::vector<BandSample> samples;
  std::optional<double> tau_star;
  double lambda = 0;
  double margin = 0;
  Verdict verdict = Verdict::Inconclusive;
  double beta = 0;       // beta_a
  double zeta_nu0 = 0;
  double threshold = 0;  // min(beta_a, |a| zeta_nu0)
  double limit_left = 0, limit_right = 0;  // band limits as tau -> -inf, +inf
};

inline constexpr double kBandLimitTolerance = 3e-2;

std::pair<double, double> default_tau_window(const StepFieldParams& p);

// Samples the band function on the window, refines the minimum (Brent, 1e-6
// in tau) and classifies it. gamma = 0 uses sigma(tau) = sigma(0) + tau^2.
BandProfile band_profile(const StepFieldParams& p, std::optional<std::pair<double, double>> tau_range = std::nullopt,
                         int n_samples = 13, const Resolution& res = {}, int threads = 0);

struct LocalizedState {
  StepFieldParams params;
  double tau = 0;
  EigenPair<cplx> pair;
  Grid2D grid;
  SparseHermitianOp<cplx> op;
  double sigma = 0, sigma_ess = 0, margin = 0, wall_mass = 0;
};

// Normalized eigenfunction with wall mass below 1e-8, for a tau where sigma is
// certified below the essential spectrum.
LocalizedState eigenfunction(const StepFieldParams& p, double tau, const Resolution& res = {});

}  // namespace magstep
