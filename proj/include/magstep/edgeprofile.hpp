#pragma once

#include <string>
#include <utility>
#include <vector>

#include "magstep/reduced2d.hpp"

namespace magstep {

struct EdgeSample {
  double s = 0;      // arclength
  double alpha = 0;  // angle between the discontinuity surface and the boundary
  double gamma = 0;  // angle between the field and the edge tangent, folded into [0, pi/2]
};

struct EdgeGeometry {
  std::vector<EdgeSample> samples;
  bool closed = false;

  void validate() const;
  // Columns s,alpha,gamma (header optional).
  static EdgeGeometry from_csv(const std::string& text);
  // {"closed": bool, "samples": [{"s":..,"alpha":..,"gamma":..}, ...]}
  static EdgeGeometry from_json(const std::string& text);
  // Unit ball cut by a plane through its center containing the field axis:
  // alpha = pi/2 everywhere, gamma = arccos|cos s| along the circle.
  static EdgeGeometry ball_cut(int n);
};

struct EdgePoint {
  EdgeSample sample;
  double lambda = 0;
  double margin = 0;
  Verdict verdict = Verdict::Inconclusive;
  bool in_D = false;
};

struct LocalizationReport {
  double a = -1;
  double threshold = 0;  // |a| Theta0
  std::vector<EdgePoint> lambda_profile;
  double lambda_min = 0;
  double s_min = 0;
  // Maximal runs of consecutive D samples, as [s_first, s_last]. Runs are not
  // merged across the seam of a closed edge.
  std::vector<std::pair<double, double>> D_set;
  bool assumption_holds = false;

  double leading_energy(double b) const { return b * lambda_min; }
};

LocalizationReport profile(const EdgeGeometry& geometry, double a, const Resolution& res = {}, int threads = 0,
                           int band_samples = 13);

// b * lambda_min; the o(b) remainder is not estimated.
double ground_energy_prediction(const LocalizationReport& report, double b);

std::string report_json(const LocalizationReport& report);

}  // namespace magstep
