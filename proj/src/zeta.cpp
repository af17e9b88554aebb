#include "magstep/zeta.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <tuple>

#include "magstep/fiber1d.hpp"
#include "magstep/memo.hpp"
#include "magstep/sweep.hpp"

namespace magstep {

namespace {

void check_angle(double nu) {
  if (!(nu >= 0.0 && nu <= std::numbers::pi / 2 + 1e-12)) {
    std::ostringstream os;
    os << "tilt angle nu = " << nu << " outside [0, pi/2]";
    throw RangeError(os.str());
  }
}

// Rough location of the ground state along s: the zero line sits at the optimal
// Neumann depth xi0 / sqrt(cos nu) there.
constexpr double kXi0Guess = 0.77;

Grid2D zeta_grid(double nu, double height, double h) {
  double sn = std::sin(nu), cn = std::cos(nu);
  double cot = cn / sn;
  // transverse width along s, generous enough for the slow s-confinement at small nu
  double ws = 8.0 / std::sqrt(sn);
  // Along the zero line the bulk level is 1 > zeta, so the state decays there; following
  // the line beyond s* + ws only costs nodes (about 1e4 x 1e3 of them at nu = 0.01).
  double s_star = kXi0Guess * std::sqrt(cn) / sn;
  double s_top = std::min(height * cot, s_star + ws);
  return Grid2D::aligned(-ws, s_top + ws, height, h);
}

Memo<std::tuple<double, double>, ZetaResult>& zeta_memo() {
  static Memo<std::tuple<double, double>, ZetaResult> memo;
  return memo;
}

}  // namespace

double zeta_on_box(double nu, double height, double h, const Resolution& res) {
  check_angle(nu);
  if (nu == 0.0) throw RangeError("zeta_on_box needs nu > 0");
  Grid2D g = zeta_grid(nu, height, h);
  double sn = std::sin(nu), cn = std::cos(nu);
  FunctionVectorPotential zero([](double, double) { return std::array<double, 2>{0.0, 0.0}; });
  auto cop = assemble_2d_magnetic_schrodinger(g, zero, [sn, cn](double s, double t) {
    double u = t * cn - s * sn;
    return u * u;
  });
  SparseHermitianOp<double> op(cop.matrix().real(), cop.mass());
  SolverOptions opt;
  opt.tol = res.tol;
  opt.max_iter = res.max_iter;
  opt.seed = res.seed;
  opt.preconditioner = Preconditioner::ShiftInvert;
  opt.block_size = 3;
  return lowest_eigenpair(op, opt).value;
}

ZetaResult zeta_result(double nu, const Resolution& res) {
  check_angle(nu);
  nu = std::min(nu, std::numbers::pi / 2);
  return zeta_memo().get({nu, res.h_zeta}, [&] {
    ZetaResult r;
    r.nu = nu;
    if (nu == 0.0) {
      auto t = theta0(res);
      r.value = t.value;
      r.fine = t.value;
      r.mesh_error = t.mesh_error;
      return r;
    }
    double height = 12.0;
    double prev = zeta_on_box(nu, height, res.h_zeta, res);
    double change = INFINITY;
    while (height * 2 <= kZetaMaxHeight) {
      double next = zeta_on_box(nu, height * 2, res.h_zeta, res);
      change = std::abs(next - prev);
      prev = next;
      height *= 2;
      ++r.box_growths;
      if (change < kZetaBoxTolerance) break;
    }
    r.fine = prev;
    r.truncation_change = change;
    r.box_height = height;
    double coarse = zeta_on_box(nu, height, 2 * res.h_zeta, res);
    r.mesh_error = std::abs(r.fine - coarse) / 3.0;
    r.value = (4.0 * r.fine - coarse) / 3.0;
    return r;
  });
}

double zeta(double nu, const Resolution& res) { return zeta_result(nu, res).value; }

std::vector<std::pair<double, double>> zeta_profile(const std::vector<double>& nus, const Resolution& res,
                                                    int threads) {
  if (!std::is_sorted(nus.begin(), nus.end())) throw RangeError("tilt angles must be ascending");
  auto results = parallel_map(nus.size(), [&](std::size_t i) { return zeta_result(nus[i], res); }, threads);
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (i > 0) {
      const auto &p = results[i - 1], &q = results[i];
      double slack = 2.0 * (p.mesh_error + q.mesh_error + p.truncation_change + q.truncation_change + 2 * res.tol);
      if (q.value < p.value - slack) {
        std::ostringstream os;
        os << "zeta decreases from " << p.value << " (nu = " << p.nu << ") to " << q.value << " (nu = " << q.nu
           << ")";
        throw MonotonicityViolation(os.str());
      }
    }
    out.emplace_back(results[i].nu, results[i].value);
  }
  return out;
}

}  // namespace magstep
