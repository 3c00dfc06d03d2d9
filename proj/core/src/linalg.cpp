#include "gadkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "third_party/eigen_patched_bdcsvd.h"

namespace gadkit::linalg {

namespace {

template <FieldScalar S>
void require_finite(const Mat<S>& x, const char* what) {
  if (!x.allFinite()) throw InvalidInput(std::string(what) + ": non-finite entries");
}

void require_tol(double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw InvalidInput("rel_tol must lie in (0, 1)");
}

// Eigenvalues of a Hermitian matrix in nonincreasing order.
template <FieldScalar S>
RealVector descending_eigenvalues(const Mat<S>& h) {
  if (h.rows() == 0) return RealVector(0);
  Eigen::SelfAdjointEigenSolver<Mat<S>> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().reverse();
}

// Eigen 3.4.0's BDCSVD reads out of bounds on some rank-deficient inputs and
// can return wrong factors on exactly structured ones. The vendored copy fixes
// the read; each result must then pass `certified` or is recomputed with
// JacobiSVD.
template <FieldScalar S>
using Jacobi = Eigen::JacobiSVD<Mat<S>, Eigen::ColPivHouseholderQRPreconditioner>;

// Orthonormal factors that reconstruct x with sorted nonnegative values form
// an SVD of x, whatever produced them.
template <FieldScalar S>
bool certified(const Mat<S>& x, const Mat<S>& u, const RealVector& s, const Mat<S>& v) {
  if (!u.allFinite() || !v.allFinite() || !s.allFinite()) return false;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) < 0.0 || (i > 0 && s(i) > s(i - 1))) return false;
  const Index k = s.size();
  const double tol = 64.0 * std::numeric_limits<double>::epsilon() *
                     static_cast<double>(std::max(x.rows(), x.cols()));
  const Mat<S> eye = Mat<S>::Identity(k, k);
  if ((u.adjoint() * u - eye).cwiseAbs().maxCoeff() > tol) return false;
  if ((v.adjoint() * v - eye).cwiseAbs().maxCoeff() > tol) return false;
  const double scale = std::max(x.norm(), std::numeric_limits<double>::min());
  return (u * s.cast<S>().asDiagonal() * v.adjoint() - x).norm() <= tol * scale;
}

template <FieldScalar S>
void factorize(const Mat<S>& x, Mat<S>& u, RealVector& s, Mat<S>& v) {
  {
    Eigen::PatchedBDCSVD<Mat<S>> solver(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    u = solver.matrixU();
    s = solver.singularValues();
    v = solver.matrixV();
  }
  if (certified(x, u, s, v)) return;
  Jacobi<S> solver(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  u = solver.matrixU();
  s = solver.singularValues();
  v = solver.matrixV();
}

}  // namespace

Index numerical_rank(const RealVector& singular_values, Index rows, Index cols, double rel_tol) {
  if (singular_values.size() == 0) return 0;
  const double threshold =
      rel_tol * singular_values(0) * static_cast<double>(std::max(rows, cols));
  Index rank = 0;
  while (rank < singular_values.size() && singular_values(rank) > threshold) ++rank;
  return rank;
}

template <FieldScalar S>
SvdResult<S> svd(const Mat<S>& x, double rel_tol) {
  require_finite(x, "svd");
  require_tol(rel_tol);
  SvdResult<S> out;
  out.rel_tol = rel_tol;
  const Index k = std::min(x.rows(), x.cols());
  if (k == 0) {
    out.left_vectors = Mat<S>::Zero(x.rows(), 0);
    out.right_vectors = Mat<S>::Zero(x.cols(), 0);
    out.singular_values = RealVector(0);
    return out;
  }
  factorize(x, out.left_vectors, out.singular_values, out.right_vectors);
  out.threshold =
      rel_tol * out.singular_values(0) * static_cast<double>(std::max(x.rows(), x.cols()));
  out.numerical_rank = numerical_rank(out.singular_values, x.rows(), x.cols(), rel_tol);
  return out;
}

template <FieldScalar S>
RealVector singular_values(const Mat<S>& x) {
  require_finite(x, "singular_values");
  if (std::min(x.rows(), x.cols()) == 0) return RealVector(0);
  Mat<S> u, v;
  RealVector s;
  factorize(x, u, s, v);
  return s;
}

template <FieldScalar S>
Mat<S> pseudoinverse(const SvdResult<S>& d) {
  const Index r = d.numerical_rank;
  const auto u = d.left_vectors.leftCols(r);
  const auto v = d.right_vectors.leftCols(r);
  const RealVector inv = d.singular_values.head(r).cwiseInverse();
  return v * inv.cast<S>().asDiagonal() * u.adjoint();
}

template <FieldScalar S>
Mat<S> pseudoinverse(const Mat<S>& x, double rel_tol) {
  if (std::min(x.rows(), x.cols()) == 0) {
    require_finite(x, "pseudoinverse");
    return Mat<S>::Zero(x.cols(), x.rows());
  }
  return pseudoinverse(svd(x, rel_tol));
}

template <FieldScalar S>
double spectral_norm(const Mat<S>& x) {
  require_finite(x, "spectral_norm");
  if (x.size() == 0) return 0.0;
  // Largest eigenvalue of the Gram matrix on the smaller side.
  const bool wide = x.rows() <= x.cols();
  const Index k = wide ? x.rows() : x.cols();
  if (k == 1) return x.norm();
  Mat<S> gram = Mat<S>::Zero(k, k);
  if (wide) {
    gram.template selfadjointView<Eigen::Lower>().rankUpdate(x);
  } else {
    gram.template selfadjointView<Eigen::Lower>().rankUpdate(x.adjoint());
  }
  Eigen::SelfAdjointEigenSolver<Mat<S>> solver(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, solver.eigenvalues()(k - 1)));
}

template <FieldScalar S>
Mat<S> kernel_projector(const SvdResult<S>& d, Index cols) {
  const auto v = d.right_vectors.leftCols(d.numerical_rank);
  Mat<S> p = Mat<S>::Identity(cols, cols);
  p.noalias() -= v * v.adjoint();
  return p;
}

template <FieldScalar S>
Mat<S> kernel_projector(const Mat<S>& x, double rel_tol) {
  return kernel_projector(svd(x, rel_tol), x.cols());
}

bool AppendReport::satisfies_singular_bound(double rel_tol) const {
  if (old_rank == 0 || new_rank == 0) return true;
  const double slack = rel_tol * std::max(old_min_singular, new_min_singular);
  if (was_independent) return new_min_singular <= old_min_singular + slack;
  return new_min_singular >= old_min_singular - slack;
}

AppendReport make_append_report(Index old_rank, double old_min_singular, Index new_rank,
                                double new_min_singular) {
  AppendReport r;
  r.old_rank = old_rank;
  r.new_rank = new_rank;
  r.old_min_singular = old_min_singular;
  r.new_min_singular = new_min_singular;
  // Ties at the threshold count as dependent.
  r.was_independent = new_rank > old_rank;
  return r;
}

template <FieldScalar S>
std::pair<Mat<S>, AppendReport> append_column(const Mat<S>& x, const Vec<S>& phi,
                                              double rel_tol) {
  if (phi.size() != x.rows()) throw InvalidInput("append_column: phi length != X.rows");
  require_finite(x, "append_column");
  if (!phi.allFinite()) throw InvalidInput("append_column: non-finite phi");
  Mat<S> out(x.rows(), x.cols() + 1);
  out.leftCols(x.cols()) = x;
  out.col(x.cols()) = phi;
  const auto before = svd(x, rel_tol);
  const auto after = svd(out, rel_tol);
  return {std::move(out),
          make_append_report(before.numerical_rank, before.sigma_min_nonzero(),
                             after.numerical_rank, after.sigma_min_nonzero())};
}

template <FieldScalar S>
InterleavingResult interleaving_check(const Mat<S>& h, const Vec<S>& c) {
  if (h.rows() != h.cols()) throw InvalidInput("interleaving_check: H must be square");
  if (c.size() != h.rows()) throw InvalidInput("interleaving_check: c length != H.rows");
  require_finite(h, "interleaving_check");
  const double scale = h.cwiseAbs().maxCoeff();
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * std::max(scale, 1e-300))
    throw InvalidInput("interleaving_check: H is not Hermitian");

  Mat<S> updated = h;
  updated.noalias() += c * c.adjoint();

  InterleavingResult r;
  r.eigs_before = descending_eigenvalues<S>(h);
  r.eigs_after = descending_eigenvalues<S>(updated);
  const double norm_h = r.eigs_before.size() ? r.eigs_before.cwiseAbs().maxCoeff() : 0.0;
  const double tol = 1e-9 * std::max({norm_h, c.squaredNorm(), 1e-300});
  r.holds = true;
  const Index n = h.rows();
  for (Index i = 0; i < n; ++i) {
    if (r.eigs_after(i) < r.eigs_before(i) - tol) r.holds = false;
    if (i + 1 < n && r.eigs_before(i) < r.eigs_after(i + 1) - tol) r.holds = false;
  }
  return r;
}

double spectral_norm(const Matrix& x) {
  return x.visit([](const auto& m) { return spectral_norm(m); });
}

Matrix pseudoinverse(const Matrix& x, double rel_tol) {
  return x.visit([&](const auto& m) { return Matrix(pseudoinverse(m, rel_tol)); });
}

Matrix kernel_projector(const Matrix& x, double rel_tol) {
  return x.visit([&](const auto& m) { return Matrix(kernel_projector(m, rel_tol)); });
}

#define GADKIT_INSTANTIATE(S)                                                              \
  template SvdResult<S> svd<S>(const Mat<S>&, double);                                     \
  template RealVector singular_values<S>(const Mat<S>&);                                   \
  template Mat<S> pseudoinverse<S>(const Mat<S>&, double);                                 \
  template Mat<S> pseudoinverse<S>(const SvdResult<S>&);                                   \
  template double spectral_norm<S>(const Mat<S>&);                                         \
  template Mat<S> kernel_projector<S>(const Mat<S>&, double);                              \
  template Mat<S> kernel_projector<S>(const SvdResult<S>&, Index);                         \
  template std::pair<Mat<S>, AppendReport> append_column<S>(const Mat<S>&, const Vec<S>&, \
                                                            double);                       \
  template InterleavingResult interleaving_check<S>(const Mat<S>&, const Vec<S>&);

GADKIT_INSTANTIATE(double)
GADKIT_INSTANTIATE(Complex)
#undef GADKIT_INSTANTIATE

}  // namespace gadkit::linalg
