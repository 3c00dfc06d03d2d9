#include "gadkit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gadkit::oracle {

namespace {

// Two passes of classical Gram-Schmidt against the stored basis.
template <FieldScalar S>
void reorthogonalize(Vec<S>& x, const std::vector<Vec<S>>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) x -= b * b.dot(x);
}

}  // namespace

template <FieldScalar S>
Vec<S> oracle_fit(const Mat<S>& a, const Vec<S>& y, Index max_iterations, double tol) {
  if (y.size() != a.rows()) throw InvalidInput("oracle_fit: y length != rows");
  if (!a.allFinite() || !y.allFinite()) throw InvalidInput("oracle_fit: non-finite input");
  const Index cols = a.cols();
  Vec<S> x = Vec<S>::Zero(cols);
  if (max_iterations <= 0) max_iterations = 2 * std::min(a.rows(), cols) + 20;
  const double norm_a = a.norm();
  const double norm_b = y.norm();
  if (cols == 0 || norm_a == 0.0 || norm_b == 0.0) return x;
  const double breakdown = 1e-13 * norm_a;

  std::vector<Vec<S>> us, vs;
  double beta = norm_b;
  Vec<S> u = y / beta;
  us.push_back(u);
  Vec<S> v = a.adjoint() * u;
  double alpha = v.norm();
  if (alpha <= breakdown) return x;  // y is orthogonal to the range of a
  v /= alpha;
  vs.push_back(v);
  Vec<S> w = v;
  double phi_bar = beta;
  double rho_bar = alpha;
  double achieved = 1.0;

  for (Index it = 0; it < max_iterations; ++it) {
    u = a * v - u * alpha;
    reorthogonalize(u, us);
    beta = u.norm();
    const bool beta_zero = beta <= breakdown;
    if (beta_zero) {
      beta = 0.0;
      u.setZero();
    } else {
      u /= beta;
      us.push_back(u);
    }

    v = a.adjoint() * u - v * beta;
    reorthogonalize(v, vs);
    alpha = v.norm();
    const bool alpha_zero = beta_zero || alpha <= breakdown;
    if (alpha_zero) {
      alpha = 0.0;
      v.setZero();
    } else {
      v /= alpha;
      vs.push_back(v);
    }

    const double rho = std::hypot(rho_bar, beta);
    const double c = rho_bar / rho;
    const double s = beta / rho;
    const double theta = s * alpha;
    rho_bar = -c * alpha;
    const double phi = c * phi_bar;
    phi_bar = s * phi_bar;
    x += w * (phi / rho);
    w = v - w * (theta / rho);

    if (alpha_zero) return x;
    const double residual = std::abs(phi_bar);
    const double normal_residual = residual * alpha * std::abs(c);
    achieved = residual > 0.0 ? normal_residual / (norm_a * residual) : 0.0;
    if (achieved < tol) return x;
    if (residual <= tol * (norm_a * x.norm() + norm_b)) return x;
  }
  throw NotConverged("oracle_fit did not converge", achieved);
}

template <FieldScalar S>
double oracle_risk(const Mat<S>& full, const RealVector& theta_true, const Vec<S>& theta_hat,
                   Index train_rows, GridConvention convention) {
  if (theta_true.size() != full.cols()) throw InvalidInput("oracle_risk: theta_true length");
  if (theta_hat.size() > full.cols()) throw InvalidInput("oracle_risk: theta_hat too long");
  const Vec<S> y = full * theta_true.cast<S>();
  const Vec<S> y_hat = full.leftCols(theta_hat.size()) * theta_hat;
  const Vec<S> diff = y - y_hat;
  if (convention == GridConvention::AllRows)
    return diff.squaredNorm() / static_cast<double>(full.rows());
  const Index pred = full.rows() - train_rows;
  return pred > 0 ? diff.tail(pred).squaredNorm() / static_cast<double>(pred) : 0.0;
}

template <FieldScalar S>
OracleResult<S> oracle_solve(const Mat<S>& full, Index train_rows, Index m,
                             const RealVector& theta_true, GridConvention convention) {
  if (m < 1 || m > full.cols()) throw InvalidInput("oracle_solve: m out of range");
  const Mat<S> design = full.topLeftCorner(train_rows, m);
  const Vec<S> y_train = full.topRows(train_rows) * theta_true.cast<S>();
  OracleResult<S> out;
  const Vec<S> fit = oracle_fit<S>(design, y_train);
  out.theta_hat = Vec<S>::Zero(full.cols());
  out.theta_hat.head(m) = fit;
  out.residual_train = (y_train - design * fit).norm();
  out.risk = oracle_risk<S>(full, theta_true, fit, train_rows, convention);
  return out;
}

#define GADKIT_INSTANTIATE(S)                                                                   \
  template Vec<S> oracle_fit<S>(const Mat<S>&, const Vec<S>&, Index, double);                   \
  template double oracle_risk<S>(const Mat<S>&, const RealVector&, const Vec<S>&, Index,        \
                                 GridConvention);                                               \
  template OracleResult<S> oracle_solve<S>(const Mat<S>&, Index, Index, const RealVector&,      \
                                           GridConvention);

GADKIT_INSTANTIATE(double)
GADKIT_INSTANTIATE(Complex)
#undef GADKIT_INSTANTIATE

}  // namespace gadkit::oracle
