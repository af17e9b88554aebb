#include "magstep/agmon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace magstep {

double weighted_energy(const SparseHermitianOp<cplx>& op, const Grid2D& grid, const Eigen::VectorXcd& v, double eta) {
  Eigen::VectorXcd w = v;
  for (int j = 0; j < grid.n2; ++j)
    for (int i = 0; i < grid.n1; ++i) w[grid.index(i, j)] *= std::exp(eta * std::hypot(grid.x1(i), grid.x2(j)));
  return op.quadratic_form(w);
}

DecayReport decay_report(const EigenPair<cplx>& pair, const Grid2D& grid, const SparseHermitianOp<cplx>& op,
                         double sigma, double sigma_ess, double eta) {
  if (!(sigma < sigma_ess)) {
    std::ostringstream os;
    os << "sigma = " << sigma << " is not below the essential threshold " << sigma_ess;
    throw NotBelowEssential(os.str(), sigma, sigma_ess);
  }
  DecayReport r;
  r.eta = eta;
  r.eta_bound = std::sqrt(sigma_ess - sigma);
  if (!(eta >= 0 && eta < r.eta_bound)) {
    std::ostringstream os;
    os << "eta = " << eta << " must lie in [0, " << r.eta_bound << ")";
    throw RangeError(os.str());
  }

  const Eigen::VectorXcd& y = pair.vector;
  double total = y.squaredNorm();
  double rmax = 0;
  for (double x1 : {grid.x1_lo, grid.x1_hi})
    for (double x2 : {grid.x2_lo, grid.x2_hi}) rmax = std::max(rmax, std::hypot(x1, x2));
  std::vector<double> shells(static_cast<std::size_t>(rmax) + 1, 0.0);
  for (int j = 0; j < grid.n2; ++j)
    for (int i = 0; i < grid.n1; ++i)
      shells[static_cast<std::size_t>(std::hypot(grid.x1(i), grid.x2(j)))] += std::norm(y[grid.index(i, j)]) / total;
  for (std::size_t k = 0; k < shells.size(); ++k) r.radii.emplace_back(static_cast<double>(k), shells[k]);

  // fit window: after the bulk, above the noise floor, clear of the artificial walls
  double wall = std::min({-grid.x1_lo, grid.x1_hi, grid.x2_hi}) - kAgmonWallZone;
  std::size_t peak = std::max_element(shells.begin(), shells.end()) - shells.begin();
  std::size_t first = peak;
  while (first < shells.size() && shells[first] >= kAgmonFitStart) ++first;
  std::size_t last = first;
  for (std::size_t k = first; k < shells.size() && k + 1 <= wall; ++k)
    if (shells[k] > kAgmonFitFloor) last = k;
  std::vector<double> xs, ls;
  for (std::size_t k = first; k <= last && k < shells.size() && k + 1 <= wall; ++k) {
    if (shells[k] <= 0) continue;
    xs.push_back(k + 0.5);
    ls.push_back(std::log(shells[k]));
  }
  r.fit_shells = static_cast<int>(xs.size());
  if (xs.size() < 4) {
    std::ostringstream os;
    os << "only " << xs.size() << " shells usable for the tail fit";
    throw TailTooShort(os.str());
  }
  r.fit_r_lo = xs.front() - 0.5;
  r.fit_r_hi = xs.back() + 0.5;
  double n = xs.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ls[k];
    sxx += xs[k] * xs[k];
    sxy += xs[k] * ls[k];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double icpt = (sy - slope * sx) / n;
  double ss_res = 0, ss_tot = 0, mean = sy / n;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    double e = ls[k] - (icpt + slope * xs[k]);
    ss_res += e * e;
    ss_tot += (ls[k] - mean) * (ls[k] - mean);
  }
  r.fit_slope = slope;
  r.eta_fit = -slope / 2;
  r.r_squared = ss_tot > 0 ? 1 - ss_res / ss_tot : 0;
  r.weighted_energy = weighted_energy(op, grid, y / std::sqrt(total), eta);
  return r;
}

DecayReport decay_report(const LocalizedState& s, double eta) {
  return decay_report(s.pair, s.grid, s.op, s.sigma, s.sigma_ess, eta);
}

std::string shells_csv(const DecayReport& r) {
  std::string out = "radius,shell_mass\n";
  char buf[96];
  for (auto [rad, m] : r.radii) {
    std::snprintf(buf, sizeof buf, "%.1f,%.12e\n", rad, m);
    out += buf;
  }
  return out;
}

}  // namespace magstep
