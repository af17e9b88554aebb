#include "magstep/eigencore.hpp"

#include <lapacke.h>

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace magstep {

namespace {

template <class Scalar>
double real_part(Scalar s) {
  return std::real(s);
}

template <class Scalar>
Scalar random_scalar(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  if constexpr (std::is_same_v<Scalar, double>) {
    return u(gen);
  } else {
    double re = u(gen);
    return Scalar(re, u(gen));
  }
}

// Rotate the global phase so the largest entry is real and positive.
template <class Vec>
void fix_phase(Vec& v) {
  Eigen::Index k = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double a = std::abs(v[i]);
    if (a > best * (1.0 + 1e-12)) {
      best = a;
      k = i;
    }
  }
  if (best <= 0) return;
  auto phase = v[k] / std::abs(v[k]);
  v /= phase;
}

}  // namespace

Grid1D::Grid1D(double lo_, double hi_, int n_) : lo(lo_), hi(hi_), n(n_) {
  if (!(lo < hi) || n < 3) throw RangeError("Grid1D needs lo < hi and n >= 3");
}

Grid1D Grid1D::aligned(double lo, double hi, double h) {
  if (!(h > 0)) throw RangeError("grid spacing must be positive");
  long ilo = static_cast<long>(std::floor(lo / h + 1e-9));
  long ihi = static_cast<long>(std::ceil(hi / h - 1e-9));
  if (ihi - ilo < 2) ihi = ilo + 2;
  return Grid1D(ilo * h, ihi * h, static_cast<int>(ihi - ilo + 1));
}

Grid2D::Grid2D(double x1_lo_, double x1_hi_, double x2_hi_, int n1_, int n2_)
    : x1_lo(x1_lo_), x1_hi(x1_hi_), x2_lo(0.0), x2_hi(x2_hi_), n1(n1_), n2(n2_) {
  if (!(x1_lo < x1_hi) || !(x2_hi > 0) || n1 < 3 || n2 < 3) throw RangeError("invalid Grid2D");
}

Grid2D Grid2D::aligned(double x1_lo, double x1_hi, double x2_hi, double h) {
  Grid1D g1 = Grid1D::aligned(x1_lo, x1_hi, h);
  int n2 = std::max(3, static_cast<int>(std::ceil(x2_hi / h - 1e-9)) + 1);
  return Grid2D(g1.lo, g1.hi, (n2 - 1) * h, g1.n, n2);
}

template <class Scalar>
SparseHermitianOp<Scalar>::SparseHermitianOp(Matrix m) : mat_(std::move(m)) {
  mat_.makeCompressed();
  mass_ = Eigen::VectorXd::Ones(mat_.rows());
}

template <class Scalar>
SparseHermitianOp<Scalar>::SparseHermitianOp(Matrix m, Eigen::VectorXd mass) : mat_(std::move(m)), mass_(std::move(mass)) {
  mat_.makeCompressed();
  if (mass_.size() != mat_.rows()) throw RangeError("mass vector size mismatch");
}

template <class Scalar>
std::vector<Triplet<Scalar>> SparseHermitianOp<Scalar>::entries() const {
  std::vector<Triplet<Scalar>> out;
  out.reserve(mat_.nonZeros());
  for (long r = 0; r < mat_.outerSize(); ++r)
    for (typename Matrix::InnerIterator it(mat_, r); it; ++it) out.push_back({it.row(), it.col(), it.value()});
  return out;
}

template <class Scalar>
double SparseHermitianOp<Scalar>::quadratic_form(const Vec& y) const {
  return real_part<Scalar>(y.dot(mat_ * y));
}

template <class Scalar>
double SparseHermitianOp<Scalar>::hermitian_defect() const {
  if (mat_.rows() != mat_.cols()) return std::numeric_limits<double>::infinity();
  double scale = 0.0, defect = 0.0;
  Matrix adj = mat_.adjoint();
  Matrix diff = mat_ - adj;
  for (long r = 0; r < mat_.outerSize(); ++r)
    for (typename Matrix::InnerIterator it(mat_, r); it; ++it) scale = std::max(scale, std::abs(it.value()));
  for (long r = 0; r < diff.outerSize(); ++r)
    for (typename Matrix::InnerIterator it(diff, r); it; ++it) defect = std::max(defect, std::abs(it.value()));
  return scale > 0 ? defect / scale : defect;
}

template <class Scalar>
typename SparseHermitianOp<Scalar>::Vec SparseHermitianOp<Scalar>::nodal(const Vec& y) const {
  return (y.array() / mass_.array().sqrt().template cast<Scalar>()).matrix();
}

template <class Scalar>
SparseHermitianOp<Scalar> SparseHermitianOp<Scalar>::shifted(double c) const {
  Matrix id(mat_.rows(), mat_.cols());
  id.setIdentity();
  Matrix m = mat_ + Scalar(c) * id;
  return SparseHermitianOp(std::move(m), mass_);
}

// ---------------------------------------------------------------------------
// Block LOBPCG for the lowest eigenpair.

namespace {

template <class Scalar>
using DMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
void project_out(const DMat<Scalar>& X, DMat<Scalar>& Z) {
  for (int pass = 0; pass < 2; ++pass) Z -= X * (X.adjoint() * Z);
}

// Orthonormal basis of span(Z) from the eigen-decomposition of its Gram matrix;
// directions with relative weight below `drop` are discarded.
template <class Scalar>
DMat<Scalar> svqb(DMat<Scalar> Z, double drop) {
  for (Eigen::Index j = 0; j < Z.cols(); ++j) {
    double nj = Z.col(j).norm();
    if (nj > 0) Z.col(j) /= nj;
  }
  DMat<Scalar> B = Z.adjoint() * Z;
  B = (B + B.adjoint().eval()) * 0.5;
  Eigen::SelfAdjointEigenSolver<DMat<Scalar>> es(B);
  const auto& d = es.eigenvalues();
  double dmax = d.size() ? d.maxCoeff() : 0.0;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < d.size(); ++k)
    if (d[k] > drop * dmax && d[k] > 0) keep.push_back(k);
  DMat<Scalar> T(Z.cols(), keep.size());
  for (std::size_t c = 0; c < keep.size(); ++c) T.col(c) = es.eigenvectors().col(keep[c]) / std::sqrt(d[keep[c]]);
  return Z * T;
}

// Orthonormal basis of span(Z) orthogonal to the orthonormal X; may drop columns.
template <class Scalar>
DMat<Scalar> orthonormal_complement(const DMat<Scalar>& X, DMat<Scalar> Z) {
  if (Z.cols() == 0) return Z;
  project_out(X, Z);
  DMat<Scalar> Q = svqb(std::move(Z), 1e-12);
  project_out(X, Q);
  return svqb(std::move(Q), 1e-14);
}

template <class Scalar>
DMat<Scalar> orthonormalize(DMat<Scalar> Z) {
  return svqb(svqb(std::move(Z), 1e-14), 1e-14);
}

template <class Scalar>
EigenPair<Scalar> dense_lowest(const SparseHermitianOp<Scalar>& op) {
  DMat<Scalar> A = DMat<Scalar>(op.matrix());
  A = (A + A.adjoint().eval()) * 0.5;
  Eigen::SelfAdjointEigenSolver<DMat<Scalar>> es(A);
  EigenPair<Scalar> out;
  out.value = es.eigenvalues()(0);
  out.vector = es.eigenvectors().col(0);
  out.vector.normalize();
  fix_phase(out.vector);
  out.residual = (op.apply(out.vector) - out.value * out.vector).norm();
  out.iterations = 1;
  return out;
}

}  // namespace

template <class Scalar>
EigenPair<Scalar> lowest_eigenpair(const SparseHermitianOp<Scalar>& op, const SolverOptions& opt) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (!(opt.tol > 0)) throw RangeError("solver tolerance must be positive");
  if (op.hermitian_defect() > 1e-14) {
    std::ostringstream os;
    os << "operator is not Hermitian (relative defect " << op.hermitian_defect() << ")";
    throw NotHermitian(os.str());
  }
  const long n = op.dimension();
  const int m = std::max(1, opt.block_size);
  if (n <= std::max<long>(64, 4L * m)) return dense_lowest(op);

  const auto& S = op.matrix();
  Eigen::VectorXd diag(n);
  for (long i = 0; i < n; ++i) diag[i] = std::real(S.coeff(i, i));

  using ColMat = Eigen::SparseMatrix<Scalar, Eigen::ColMajor>;
  Eigen::SimplicialLDLT<ColMat> ldlt;
  if (opt.preconditioner == Preconditioner::ShiftInvert) {
    ColMat A = S;
    if (opt.shift != 0.0) {
      ColMat id(n, n);
      id.setIdentity();
      A -= Scalar(opt.shift) * id;
    }
    ldlt.compute(A);
    if (ldlt.info() != Eigen::Success) throw NonConvergence("shift-invert factorization failed", 0, INFINITY);
  }
  auto precondition = [&](const DMat<Scalar>& R) -> DMat<Scalar> {
    if (opt.preconditioner == Preconditioner::ShiftInvert) return ldlt.solve(R);
    DMat<Scalar> W = R;
    for (long i = 0; i < n; ++i) W.row(i) /= (diag[i] > 0 ? diag[i] : 1.0);
    return W;
  };

  std::mt19937_64 gen(opt.seed);
  DMat<Scalar> X(n, m);
  for (long j = 0; j < m; ++j)
    for (long i = 0; i < n; ++i) X(i, j) = random_scalar<Scalar>(gen);
  if (opt.preconditioner == Preconditioner::ShiftInvert) X = precondition(X);
  X = orthonormalize(X);
  DMat<Scalar> SX = S * X;
  Eigen::VectorXd lam(m);
  {
    DMat<Scalar> H = X.adjoint() * SX;
    H = (H + H.adjoint().eval()) * 0.5;
    Eigen::SelfAdjointEigenSolver<DMat<Scalar>> es(H);
    X = X * es.eigenvectors();
    SX = SX * es.eigenvectors();
    lam = es.eigenvalues();
  }
  DMat<Scalar> P(n, 0);
  double best = INFINITY;
  for (int it = 1; it <= opt.max_iter; ++it) {
    DMat<Scalar> R = SX - X * lam.asDiagonal();
    double res = R.col(0).norm();
    best = std::min(best, res);
    if (res <= opt.tol) {
      EigenPair<Scalar> out;
      Vec x = X.col(0);
      x.normalize();
      fix_phase(x);
      Vec sx = S * x;
      out.value = std::real(x.dot(sx));
      out.residual = (sx - out.value * x).norm();
      out.vector = std::move(x);
      out.iterations = it;
      if (out.residual <= opt.tol) return out;
      // accumulated drift: refresh and keep iterating
      X = orthonormalize(X);
      SX = S * X;
      continue;
    }
    DMat<Scalar> W = precondition(R);
    DMat<Scalar> Z(n, W.cols() + P.cols());
    Z << W, P;
    DMat<Scalar> Q = orthonormal_complement(X, std::move(Z));
    DMat<Scalar> SQ = S * Q;
    const long k = m + Q.cols();
    DMat<Scalar> G(k, k);
    G.topLeftCorner(m, m) = X.adjoint() * SX;
    G.topRightCorner(m, Q.cols()) = X.adjoint() * SQ;
    G.bottomRightCorner(Q.cols(), Q.cols()) = Q.adjoint() * SQ;
    G.bottomLeftCorner(Q.cols(), m) = G.topRightCorner(m, Q.cols()).adjoint();
    G = (G + G.adjoint().eval()) * 0.5;
    Eigen::SelfAdjointEigenSolver<DMat<Scalar>> es(G);
    DMat<Scalar> C = es.eigenvectors().leftCols(m);
    DMat<Scalar> Cx = C.topRows(m), Cq = C.bottomRows(Q.cols());
    P = Q * Cq;
    DMat<Scalar> SP = SQ * Cq;
    X = X * Cx + P;
    SX = SX * Cx + SP;
    lam = es.eigenvalues().head(m);
    if (it % 25 == 0) {
      X = orthonormalize(X);
      SX = S * X;
      DMat<Scalar> H = X.adjoint() * SX;
      H = (H + H.adjoint().eval()) * 0.5;
      Eigen::SelfAdjointEigenSolver<DMat<Scalar>> es2(H);
      X = X * es2.eigenvectors();
      SX = SX * es2.eigenvectors();
      lam = es2.eigenvalues();
    }
  }
  std::ostringstream os;
  os << "LOBPCG did not reach residual " << opt.tol << " in " << opt.max_iter << " iterations (best " << best << ")";
  throw NonConvergence(os.str(), opt.max_iter, best);
}

EigenPair<double> lowest_eigenpair_tridiagonal(const SparseHermitianOp<double>& op) {
  const long n = op.dimension();
  std::vector<double> d(n), e(std::max<long>(n - 1, 1), 0.0);
  const auto& S = op.matrix();
  for (long r = 0; r < n; ++r) {
    for (SparseHermitianOp<double>::Matrix::InnerIterator it(S, r); it; ++it) {
      long c = it.col();
      if (c == r)
        d[r] = it.value();
      else if (c == r + 1)
        e[r] = it.value();
      else if (c != r - 1)
        throw RangeError("operator is not tridiagonal");
    }
  }
  if (op.hermitian_defect() > 1e-14) throw NotHermitian("tridiagonal operator is not symmetric");
  lapack_int found = 0;
  std::vector<double> w(n), z(n);
  std::vector<lapack_int> ifail(n);
  double abstol = 2.0 * LAPACKE_dlamch('S');
  lapack_int info = LAPACKE_dstevx(LAPACK_COL_MAJOR, 'V', 'I', static_cast<lapack_int>(n), d.data(), e.data(), 0.0,
                                   0.0, 1, 1, abstol, &found, w.data(), z.data(), static_cast<lapack_int>(n),
                                   ifail.data());
  if (info != 0 || found != 1) throw NonConvergence("dstevx failed", 1, INFINITY);
  EigenPair<double> out;
  out.value = w[0];
  out.vector = Eigen::Map<Eigen::VectorXd>(z.data(), n);
  out.vector.normalize();
  fix_phase(out.vector);
  out.residual = (op.apply(out.vector) - out.value * out.vector).norm();
  out.iterations = 1;
  return out;
}

// ---------------------------------------------------------------------------
// Assembly.

SparseHermitianOp<double> assemble_1d_schrodinger(const Grid1D& grid, const std::function<double(double)>& potential) {
  const int n = grid.n;
  const double h = grid.spacing(), ih2 = 1.0 / (h * h);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(3 * n);
  for (int i = 0; i < n; ++i) {
    double v = potential(grid.node(i));
    if (!std::isfinite(v)) throw RangeError("potential is not finite on the grid");
    t.emplace_back(i, i, 2.0 * ih2 + v);
    if (i > 0) t.emplace_back(i, i - 1, -ih2);
    if (i + 1 < n) t.emplace_back(i, i + 1, -ih2);
  }
  SparseHermitianOp<double>::Matrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return SparseHermitianOp<double>(std::move(m));
}

SparseHermitianOp<double> assemble_1d_neumann_schrodinger(const Grid1D& grid,
                                                          const std::function<double(double)>& potential) {
  if (std::abs(grid.lo) > 1e-12 * std::max(1.0, grid.hi)) throw RangeError("Neumann grid must start at 0");
  const int n = grid.n;
  const double h = grid.spacing(), ih2 = 1.0 / (h * h);
  // Node 0 carries weight 1/2; symmetrizing the mirrored row gives -sqrt(2)/h^2 couplings.
  const double c01 = -std::sqrt(2.0) * ih2;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(3 * n);
  Eigen::VectorXd mass = Eigen::VectorXd::Ones(n);
  mass[0] = 0.5;
  for (int i = 0; i < n; ++i) {
    double v = potential(grid.node(i));
    if (!std::isfinite(v)) throw RangeError("potential is not finite on the grid");
    t.emplace_back(i, i, 2.0 * ih2 + v);
    if (i > 0) t.emplace_back(i, i - 1, i == 1 ? c01 : -ih2);
    if (i + 1 < n) t.emplace_back(i, i + 1, i == 0 ? c01 : -ih2);
  }
  SparseHermitianOp<double>::Matrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return SparseHermitianOp<double>(std::move(m), std::move(mass));
}

double VectorPotential::line_integral(double p1, double p2, double q1, double q2) const {
  auto a = (*this)(p1, p2);
  auto b = (*this)(0.5 * (p1 + q1), 0.5 * (p2 + q2));
  auto c = (*this)(q1, q2);
  double d1 = q1 - p1, d2 = q2 - p2;
  return ((a[0] + 4 * b[0] + c[0]) * d1 + (a[1] + 4 * b[1] + c[1]) * d2) / 6.0;
}

SparseHermitianOp<cplx> assemble_2d_magnetic_schrodinger(const Grid2D& grid, const VectorPotential& A,
                                                         const std::function<double(double, double)>& V) {
  const int n1 = grid.n1, n2 = grid.n2;
  const double h1 = grid.h1(), h2 = grid.h2();
  const long n = grid.size();
  Eigen::VectorXd mass(n);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) mass[grid.index(i, j)] = grid.weight(j);

  std::vector<Eigen::Triplet<cplx>> t;
  t.reserve(5 * n);
  auto link = [&](int i, int j, int k, int l, double w, double h) {
    double p1 = grid.x1(i), p2 = grid.x2(j), q1 = grid.x1(k), q2 = grid.x2(l);
    double jump = A.interface_jump(p1, p2, q1, q2);
    if (jump > kGaugeJumpTolerance) {
      std::ostringstream os;
      os << "vector potential jumps by " << jump << " across the interface near (" << p1 << ", " << p2 << ")";
      throw GaugeDiscontinuity(os.str(), jump);
    }
    double theta = A.line_integral(p1, p2, q1, q2);
    long p = grid.index(i, j), q = grid.index(k, l);
    double c = w / (h * h);
    diag[p] += c;
    diag[q] += c;
    cplx off = -c * std::polar(1.0, -theta) / std::sqrt(mass[p] * mass[q]);
    t.emplace_back(p, q, off);
    t.emplace_back(q, p, std::conj(off));
  };
  // interior links plus the halves of links leading to the walls (walls are zero)
  for (int j = 0; j < n2; ++j) {
    double wh = grid.weight(j);
    for (int i = 0; i + 1 < n1; ++i) link(i, j, i + 1, j, wh, h1);
    diag[grid.index(0, j)] += wh / (h1 * h1);
    diag[grid.index(n1 - 1, j)] += wh / (h1 * h1);
  }
  for (int j = 0; j + 1 < n2; ++j)
    for (int i = 0; i < n1; ++i) link(i, j, i, j + 1, 1.0, h2);
  for (int i = 0; i < n1; ++i) diag[grid.index(i, n2 - 1)] += 1.0 / (h2 * h2);

  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) {
      long p = grid.index(i, j);
      double v = V(grid.x1(i), grid.x2(j));
      if (!std::isfinite(v)) throw RangeError("electric potential is not finite on the grid");
      t.emplace_back(p, p, cplx(diag[p] / mass[p] + v, 0.0));
    }
  SparseHermitianOp<cplx>::Matrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return SparseHermitianOp<cplx>(std::move(m), std::move(mass));
}

template <class Scalar>
double wall_mass(const Grid2D& grid, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y, double width) {
  double total = y.squaredNorm(), near = 0.0;
  for (int j = 0; j < grid.n2; ++j) {
    double x2 = grid.x2(j);
    for (int i = 0; i < grid.n1; ++i) {
      double x1 = grid.x1(i);
      bool close = (x1 - grid.x1_lo < width) || (grid.x1_hi - x1 < width) || (grid.x2_hi - x2 < width);
      if (close) near += std::norm(y[grid.index(i, j)]);
    }
  }
  return total > 0 ? near / total : 0.0;
}

double wall_mass(const Grid1D& grid, const Eigen::VectorXd& y, double width, bool neumann_left) {
  double total = y.squaredNorm(), near = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    double t = grid.node(i);
    bool close = (grid.hi - t < width) || (!neumann_left && t - grid.lo < width);
    if (close) near += y[i] * y[i];
  }
  return total > 0 ? near / total : 0.0;
}

template class SparseHermitianOp<double>;
template class SparseHermitianOp<cplx>;
template EigenPair<double> lowest_eigenpair(const SparseHermitianOp<double>&, const SolverOptions&);
template EigenPair<cplx> lowest_eigenpair(const SparseHermitianOp<cplx>&, const SolverOptions&);
template double wall_mass(const Grid2D&, const Eigen::VectorXd&, double);
template double wall_mass(const Grid2D&, const Eigen::VectorXcd&, double);

}  // namespace magstep
