#pragma once

#include <functional>
#include <vector>

namespace magstep {

struct ScanMinimum {
  std::vector<double> xs, fs;  // the coarse scan
  double x = 0, f = 0;         // refined minimizer and value
  bool interior = false;       // scan minimum away from the ends
  int evaluations = 0;
};

// Uniform scan of f on [lo, hi] with n points followed by Brent refinement
// inside the bracket around the smallest sample. Ties go to the smallest x.
// If the minimum sits on an end point no refinement is done.
ScanMinimum scan_and_refine(const std::function<double(double)>& f, double lo, double hi, int n, double x_tol);

// Same, with the scan values supplied by the caller.
ScanMinimum refine_scan(const std::function<double(double)>& f, std::vector<double> xs, std::vector<double> fs,
                        double x_tol);

}  // namespace magstep
