#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "magstep/errors.hpp"

namespace magstep {

using cplx = std::complex<double>;

// Mesh controls shared by all spectral modules. Spacings are in magnetic lengths.
struct Resolution {
  double h1d = 0.0025;    // 1D fiber problems
  double h2d = 0.2;       // reduced half-plane problems
  double h_zeta = 0.1;    // tilted half-plane problems
  double tol = 1e-9;      // eigensolver residual
  int max_iter = 2000;
  std::uint64_t seed = 20240611;

  Resolution coarsened(double factor = 2.0) const {
    Resolution r = *this;
    r.h1d *= factor;
    r.h2d *= factor;
    r.h_zeta *= factor;
    return r;
  }
};

// Uniform nodes lo, lo+h, ..., hi. Every node is an unknown; the artificial
// Dirichlet walls sit one spacing outside [lo, hi].
struct Grid1D {
  double lo = 0.0, hi = 1.0;
  int n = 3;

  Grid1D() = default;
  Grid1D(double lo_, double hi_, int n_);
  double spacing() const { return (hi - lo) / (n - 1); }
  double node(int i) const { return lo + i * spacing(); }
  // Grid with spacing close to h whose nodes sit on integer multiples of h.
  static Grid1D aligned(double lo, double hi, double h);
};

enum class EdgeTag { Neumann, ArtificialDirichlet };

// Half-plane box [x1_lo, x1_hi] x [0, x2_hi]. The bottom edge is the physical
// Neumann boundary; the three others are artificial Dirichlet walls placed one
// spacing outside the box (all listed nodes are unknowns).
struct Grid2D {
  double x1_lo = -1, x1_hi = 1, x2_lo = 0, x2_hi = 1;
  int n1 = 3, n2 = 3;
  // left, right, bottom, top
  std::array<EdgeTag, 4> boundary_tags{EdgeTag::ArtificialDirichlet, EdgeTag::ArtificialDirichlet,
                                       EdgeTag::Neumann, EdgeTag::ArtificialDirichlet};

  Grid2D() = default;
  Grid2D(double x1_lo_, double x1_hi_, double x2_hi_, int n1_, int n2_);
  double h1() const { return (x1_hi - x1_lo) / (n1 - 1); }
  double h2() const { return (x2_hi - x2_lo) / (n2 - 1); }
  double x1(int i) const { return x1_lo + i * h1(); }
  double x2(int j) const { return x2_lo + j * h2(); }
  long index(int i, int j) const { return static_cast<long>(j) * n1 + i; }
  long size() const { return static_cast<long>(n1) * n2; }
  // Node weight of the trapezoidal L2 product (1/2 on the Neumann row).
  double weight(int j) const { return j == 0 ? 0.5 : 1.0; }
  static Grid2D aligned(double x1_lo, double x1_hi, double x2_hi, double h);
};

template <class Scalar>
struct Triplet {
  long row, col;
  Scalar value;
};

// Symmetrized discrete operator S = M^{-1/2} K M^{-1/2} + V acting on y = M^{1/2} u,
// where M holds the node weights of the discrete L2 product.
template <class Scalar>
class SparseHermitianOp {
 public:
  using Matrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  SparseHermitianOp() = default;
  explicit SparseHermitianOp(Matrix m);
  SparseHermitianOp(Matrix m, Eigen::VectorXd mass);

  long dimension() const { return mat_.rows(); }
  const Matrix& matrix() const { return mat_; }
  const Eigen::VectorXd& mass() const { return mass_; }
  std::vector<Triplet<Scalar>> entries() const;

  Vec apply(const Vec& x) const { return mat_ * x; }
  double quadratic_form(const Vec& y) const;
  // max |S_ij - conj(S_ji)| and |Im S_ii|, relative to max |S_ij|
  double hermitian_defect() const;
  // Nodal values u = M^{-1/2} y.
  Vec nodal(const Vec& y) const;

  // The operator plus c times the identity.
  SparseHermitianOp shifted(double c) const;

 private:
  Matrix mat_;
  Eigen::VectorXd mass_;
};

template <class Scalar>
struct EigenPair {
  double value = 0.0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> vector;  // unit norm, symmetrized coordinates
  double residual = 0.0;
  int iterations = 0;
};

enum class Preconditioner { Jacobi, ShiftInvert };

struct SolverOptions {
  double tol = 1e-9;
  int max_iter = 2000;
  int block_size = 3;
  Preconditioner preconditioner = Preconditioner::Jacobi;
  double shift = 0.0;  // for ShiftInvert
  std::uint64_t seed = 20240611;
};

template <class Scalar>
EigenPair<Scalar> lowest_eigenpair(const SparseHermitianOp<Scalar>& op, const SolverOptions& opt);

template <class Scalar>
EigenPair<Scalar> lowest_eigenpair(const SparseHermitianOp<Scalar>& op, double tol, int max_iter) {
  SolverOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  return lowest_eigenpair(op, opt);
}

// LAPACK path for real symmetric tridiagonal operators (dstevx, lowest only).
EigenPair<double> lowest_eigenpair_tridiagonal(const SparseHermitianOp<double>& op);

// -d^2/dt^2 + V(t) on the grid nodes, Dirichlet just outside both ends.
SparseHermitianOp<double> assemble_1d_schrodinger(const Grid1D& grid, const std::function<double(double)>& potential);

// Same on a grid starting at t = 0 with a Neumann condition there (mirror ghost node).
SparseHermitianOp<double> assemble_1d_neumann_schrodinger(const Grid1D& grid,
                                                          const std::function<double(double)>& potential);

// Vector potential with exact link integrals. Subclasses with an internal
// interface report how much A jumps where a segment crosses it.
class VectorPotential {
 public:
  virtual ~VectorPotential() = default;
  virtual std::array<double, 2> operator()(double x1, double x2) const = 0;
  // integral of A.dl along the straight segment p -> q; Simpson's rule by default
  virtual double line_integral(double p1, double p2, double q1, double q2) const;
  virtual double interface_jump(double, double, double, double) const { return 0.0; }
};

class FunctionVectorPotential : public VectorPotential {
 public:
  explicit FunctionVectorPotential(std::function<std::array<double, 2>(double, double)> f) : f_(std::move(f)) {}
  std::array<double, 2> operator()(double x1, double x2) const override { return f_(x1, x2); }

 private:
  std::function<std::array<double, 2>(double, double)> f_;
};

inline constexpr double kGaugeJumpTolerance = 1e-8;

// -(grad - iA)^2 + V with Peierls link phases, Neumann on x2 = 0.
SparseHermitianOp<cplx> assemble_2d_magnetic_schrodinger(const Grid2D& grid, const VectorPotential& vector_potential,
                                                         const std::function<double(double, double)>& electric_potential);

// Fraction of the discrete L2 mass of y carried by nodes within `width` of an
// artificial wall of the grid.
template <class Scalar>
double wall_mass(const Grid2D& grid, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y, double width);
double wall_mass(const Grid1D& grid, const Eigen::VectorXd& y, double width, bool neumann_left);

}  // namespace magstep
