#include "gadkit/decomposition.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace gadkit::decomposition {

namespace {

using linalg::spectral_norm;

template <FieldScalar S>
using ConstRef = Eigen::Ref<const Mat<S>>;

struct Step {
  SweepRecord record;
  Index rank = 0;
  double sigma_min = 0.0;
};

// Everything the sweep reports for one model size. `modeled` holds all rows
// (training first) of the first m columns, `nescience` the training rows of
// the remaining columns.
template <FieldScalar S>
Step analyze_step(const ConstRef<S>& modeled, const ConstRef<S>& nescience, Index n,
                  const Vec<S>& theta, const Vec<S>& y, const RidgeConfig& ridge, double rel_tol) {
  const Index m = modeled.cols();
  const Index rows = modeled.rows();
  const Mat<S> design = modeled.topRows(n);
  const Mat<S> nescience_m = nescience;
  const auto theta_m = theta.head(m);
  const auto theta_u = theta.tail(theta.size() - m);

  Step step;
  SweepRecord& rec = step.record;
  rec.m = m;
  rec.lambda = ridge.lambda;
  rec.norm_M_TU = spectral_norm<S>(nescience_m);
  rec.nescience_error = theta_u.norm();

  // Solve operator restricted to training rows: theta_hat_M = V diag(1/s) G y_T
  // where G is the n-row block of U^H. For ridge, U comes from the augmented
  // matrix and only its top n rows touch data.
  Mat<S> v;
  RealVector s_inv;
  Mat<S> g;  // r x n
  if (ridge.lambda > 0.0) {
    const Index nr = ridge.n > 0 ? ridge.n : n;
    const double shift = std::sqrt(static_cast<double>(nr) * ridge.lambda);
    Mat<S> augmented = Mat<S>::Zero(n + m, m);
    augmented.topRows(n) = design;
    augmented.bottomRows(m).diagonal().setConstant(S(shift));
    const auto d = linalg::svd<S>(augmented, rel_tol);
    const Index r = d.numerical_rank;
    v = d.right_vectors.leftCols(r);
    s_inv = d.singular_values.head(r).cwiseInverse();
    g = d.left_vectors.topLeftCorner(n, r).adjoint();
    rec.norm_pinv_TM = r ? s_inv(r - 1) : 0.0;
    const RealVector plain = linalg::singular_values<S>(design);
    step.rank = linalg::numerical_rank(plain, n, m, rel_tol);
    step.sigma_min = step.rank ? plain(step.rank - 1) : 0.0;
  } else {
    const auto d = linalg::svd<S>(design, rel_tol);
    const Index r = d.numerical_rank;
    v = d.right_vectors.leftCols(r);
    s_inv = d.singular_values.head(r).cwiseInverse();
    g = d.left_vectors.leftCols(r).adjoint();
    rec.norm_pinv_TM = r ? s_inv(r - 1) : 0.0;
    step.rank = r;
    step.sigma_min = d.sigma_min_nonzero();
  }
  rec.rank_TM = step.rank;
  const auto scale = s_inv.cast<S>().asDiagonal();

  // ||A|| = ||diag(1/s) G M_TU|| since V has orthonormal columns.
  if (nescience_m.cols() > 0 && g.rows() > 0) {
    const Mat<S> reduced = scale * (g * nescience_m);
    rec.norm_A = spectral_norm<S>(reduced);
  }

  Vec<S> b_theta;
  if (ridge.lambda > 0.0) {
    b_theta = v * (scale * (g * (design * theta_m)));
  } else {
    b_theta = v * (v.adjoint() * theta_m);
  }
  rec.bias_error = (theta_m - b_theta).norm();
  const Vec<S> a_theta = v * (scale * (g * (nescience_m * theta_u)));
  rec.alias_error = a_theta.norm();

  const Vec<S> theta_hat = v * (scale * (g * y.head(n)));
  const Vec<S> y_hat = modeled * theta_hat;
  const Vec<S> y_split = modeled * (b_theta + a_theta);
  const Vec<S> diff = y - y_hat;
  rec.risk_all = diff.squaredNorm() / static_cast<double>(rows);
  rec.risk_prediction_only =
      rows > n ? diff.tail(rows - n).squaredNorm() / static_cast<double>(rows - n) : 0.0;
  const double denom = std::max({y_hat.norm(), y.norm(), std::numeric_limits<double>::min()});
  rec.identity_residual = (y_hat - y_split).norm() / denom;
  return step;
}

template <FieldScalar S>
Vec<S> as_field(const RealVector& x) {
  return x.cast<S>();
}

template <FieldScalar S>
Mat<S> stacked_modeled(const OperatorPanel<S>& panel) {
  Mat<S> out(panel.design.rows() + panel.prediction_modeled.rows(), panel.m);
  out.topRows(panel.design.rows()) = panel.design;
  out.bottomRows(panel.prediction_modeled.rows()) = panel.prediction_modeled;
  return out;
}

template <FieldScalar S>
Mat<S> augmented_design(const OperatorPanel<S>& panel, const RidgeConfig& ridge) {
  if (!(ridge.lambda >= 0.0)) throw InvalidInput("lambda must be >= 0");
  const Index n = panel.train_count();
  const Index nr = ridge.n > 0 ? ridge.n : n;
  Mat<S> out = Mat<S>::Zero(n + panel.m, panel.m);
  out.topRows(n) = panel.design;
  out.bottomRows(panel.m).diagonal().setConstant(
      S(std::sqrt(static_cast<double>(nr) * ridge.lambda)));
  return out;
}

template <FieldScalar S>
std::vector<SweepRecord> sweep_typed(const Mat<S>& full, Index n, const RealVector& theta_real,
                                     const SweepOptions& options) {
  const Index budget = full.cols();
  if (theta_real.size() != budget)
    throw InvalidInput("theta length " + std::to_string(theta_real.size()) + " != budget " +
                       std::to_string(budget));
  if (n < 1 || n > full.rows()) throw InvalidInput("train_rows out of range");
  const auto ms = options.range.values();
  for (const Index m : ms)
    if (m < 1 || m > budget) throw InvalidInput("model size " + std::to_string(m) + " outside [1, J]");

  const Vec<S> theta = as_field<S>(theta_real);
  const Vec<S> y = full * theta;

  std::vector<Step> steps(ms.size());
  auto work = [&](std::size_t i) {
    const Index m = ms[i];
    try {
      steps[i] = analyze_step<S>(full.leftCols(m), full.block(0, m, n, budget - m), n, theta, y,
                                 options.ridge, options.rel_tol);
      if (!(steps[i].record.identity_residual <= kIdentityTolerance))
        steps[i].record.error = "DecompositionMismatch: identity residual " +
                                std::to_string(steps[i].record.identity_residual);
    } catch (const std::exception& e) {
      Step failed;
      failed.record.m = m;
      failed.record.lambda = options.ridge.lambda;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      failed.record.norm_A = failed.record.norm_pinv_TM = failed.record.norm_M_TU = nan;
      failed.record.alias_error = failed.record.bias_error = failed.record.nescience_error = nan;
      failed.record.risk_all = failed.record.risk_prediction_only = nan;
      failed.record.error = e.what();
      failed.rank = -1;
      steps[i] = std::move(failed);
    }
  };

  const int width = std::max(1, options.threads);
  if (width == 1 || ms.size() < 2) {
    for (std::size_t i = 0; i < ms.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (int t = 0; t < width; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < ms.size(); i = next++) work(i);
      });
  }

  // Rank of M_TM(m - 1) for the independence flag.
  std::vector<SweepRecord> out;
  out.reserve(ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const Index m = ms[i];
    Index previous_rank = 0;
    if (i > 0 && ms[i - 1] == m - 1) {
      previous_rank = steps[i - 1].rank;
    } else if (m > 1) {
      const Mat<S> previous = full.topLeftCorner(n, m - 1);
      const RealVector sv = linalg::singular_values<S>(previous);
      previous_rank = linalg::numerical_rank(sv, n, m - 1, options.rel_tol);
    }
    SweepRecord rec = std::move(steps[i].record);
    if (steps[i].rank >= 0 && previous_rank >= 0) {
      rec.new_col_independent =
          linalg::make_append_report(previous_rank, 0.0, steps[i].rank, steps[i].sigma_min)
              .was_independent;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

template <FieldScalar S>
OperatorPanel<S> build_panels(const Mat<S>& full, Index train_rows, Index m, double rel_tol) {
  const Index budget = full.cols();
  if (m < 1 || m > budget)
    throw InvalidInput("m = " + std::to_string(m) + " outside [1, " + std::to_string(budget) + "]");
  if (train_rows < 1 || train_rows > full.rows()) throw InvalidInput("train_rows out of range");
  OperatorPanel<S> p;
  p.m = m;
  p.rel_tol = rel_tol;
  const Index pred = full.rows() - train_rows;
  p.design = full.topLeftCorner(train_rows, m);
  p.nescience = full.topRightCorner(train_rows, budget - m);
  p.prediction_modeled = full.bottomLeftCorner(pred, m);
  p.prediction_nescience = full.bottomRightCorner(pred, budget - m);
  p.rank_tm = linalg::numerical_rank(linalg::singular_values<S>(p.design), train_rows, m, rel_tol);
  return p;
}

template <FieldScalar S>
Mat<S> aliasing_operator(const OperatorPanel<S>& panel) {
  return linalg::pseudoinverse<S>(panel.design, panel.rel_tol) * panel.nescience;
}

template <FieldScalar S>
Mat<S> b_operator(const OperatorPanel<S>& panel) {
  const auto d = linalg::svd<S>(panel.design, panel.rel_tol);
  const auto v = d.row_basis();
  return v * v.adjoint();
}

template <FieldScalar S>
Mat<S> aliasing_error_operator(const OperatorPanel<S>& panel) {
  const Index j = panel.budget();
  Mat<S> e = Mat<S>::Zero(j, j);
  e.topRightCorner(panel.m, panel.unmodeled()) = -aliasing_operator(panel);
  return e;
}

template <FieldScalar S>
Mat<S> invertibility_operator(const OperatorPanel<S>& panel) {
  const Index j = panel.budget();
  Mat<S> e = Mat<S>::Identity(j, j);
  e.topLeftCorner(panel.m, panel.m) = linalg::kernel_projector<S>(panel.design, panel.rel_tol);
  return e;
}

template <FieldScalar S>
Vec<S> infer_theta(const OperatorPanel<S>& panel, const Vec<S>& y_train) {
  if (y_train.size() != panel.train_count())
    throw InvalidInput("y_T length " + std::to_string(y_train.size()) + " != n = " +
                       std::to_string(panel.train_count()));
  Vec<S> out = Vec<S>::Zero(panel.budget());
  out.head(panel.m) = linalg::pseudoinverse<S>(panel.design, panel.rel_tol) * y_train;
  return out;
}

template <FieldScalar S>
ErrorBreakdown risk_and_errors(const OperatorPanel<S>& panel, const RealVector& theta,
                               const Vec<S>& y_full) {
  const Index rows = panel.design.rows() + panel.prediction_modeled.rows();
  if (theta.size() != panel.budget()) throw InvalidInput("theta length != budget");
  if (y_full.size() != rows) throw InvalidInput("y length != row count");
  const Mat<S> modeled = stacked_modeled(panel);
  const auto step = analyze_step<S>(modeled, panel.nescience, panel.train_count(),
                                    as_field<S>(theta), y_full, RidgeConfig{}, panel.rel_tol);
  const auto& r = step.record;
  if (!(r.identity_residual <= kIdentityTolerance))
    throw DecompositionMismatch("prediction differs from M (B theta_M + A theta_U)",
                                r.identity_residual);
  return {r.risk_all,   r.risk_prediction_only, r.alias_error,
          r.bias_error, r.nescience_error,      r.identity_residual};
}

template <FieldScalar S>
RidgeResult<S> ridge_panels(const OperatorPanel<S>& panel, const RidgeConfig& ridge) {
  RidgeResult<S> out;
  out.augmented = augmented_design(panel, ridge);
  const Index n = panel.train_count();
  const double shift2 = static_cast<double>(ridge.n > 0 ? ridge.n : n) * ridge.lambda;
  out.singular_values = linalg::singular_values<S>(out.augmented);
  const RealVector plain = linalg::singular_values<S>(panel.design);
  out.expected_singular_values.resize(panel.m);
  for (Index i = 0; i < panel.m; ++i) {
    const double s = i < plain.size() ? plain(i) : 0.0;
    out.expected_singular_values(i) = std::sqrt(s * s + shift2);
  }
  if (ridge.lambda > 0.0) {
    for (Index i = 0; i < panel.m; ++i) {
      const double expected = out.expected_singular_values(i);
      const double gap = std::abs(out.singular_values(i) - expected) / expected;
      if (gap > 1e-9)
        throw DecompositionMismatch("augmented singular values miss sqrt(sigma^2 + n lambda)", gap);
    }
  }
  const Index r = linalg::numerical_rank(out.singular_values, out.augmented.rows(), panel.m,
                                         panel.rel_tol);
  out.pinv_norm = r ? 1.0 / out.singular_values(r - 1) : 0.0;
  return out;
}

template <FieldScalar S>
Mat<S> ridge_aliasing_operator(const OperatorPanel<S>& panel, const RidgeConfig& ridge) {
  const Mat<S> pinv = linalg::pseudoinverse<S>(augmented_design(panel, ridge), panel.rel_tol);
  return pinv.leftCols(panel.train_count()) * panel.nescience;
}

template <FieldScalar S>
Mat<S> ridge_invertibility_operator(const OperatorPanel<S>& panel, const RidgeConfig& ridge) {
  const Mat<S> pinv = linalg::pseudoinverse<S>(augmented_design(panel, ridge), panel.rel_tol);
  const Index j = panel.budget();
  Mat<S> e = Mat<S>::Identity(j, j);
  e.topLeftCorner(panel.m, panel.m) -= pinv.leftCols(panel.train_count()) * panel.design;
  return e;
}

double expected_unstructured_error(double sigma2, Index dim_k, Index dim_u) {
  if (sigma2 < 0.0 || dim_k < 0 || dim_u < 0)
    throw InvalidInput("expected_unstructured_error needs nonnegative inputs");
  return sigma2 * static_cast<double>(dim_k + dim_u);
}

std::vector<Index> ModelRange::values() const {
  if (first < 1 || last < first || step < 1)
    throw InvalidInput("model range must satisfy 1 <= first <= last, step >= 1");
  std::vector<Index> out;
  for (Index m = first; m <= last; m += step) out.push_back(m);
  return out;
}

std::vector<SweepRecord> sweep_matrix(const Matrix& full, Index train_rows, const RealVector& theta,
                                      const SweepOptions& options) {
  if (options.ridge.lambda < 0.0) throw InvalidInput("lambda must be >= 0");
  return full.visit([&](const auto& m) {
    using S = typename std::decay_t<decltype(m)>::Scalar;
    return sweep_typed<S>(m, train_rows, theta, options);
  });
}

std::vector<SweepRecord> sweep(const bases::BasisSpec& basis, const designs::SampleDesign& design,
                               const designs::ParameterSpec& theta_spec,
                               const SweepOptions& options) {
  const bases::Basis generator(basis);
  const Matrix full = generator.evaluate(design.all_points());
  designs::ParameterSpec spec = theta_spec;
  if (spec.length == 0) spec.length = basis.column_budget;
  const RealVector theta = designs::make_theta(spec);
  return sweep_matrix(full, design.train_count(), theta, options);
}

#define GADKIT_INSTANTIATE(S)                                                                   \
  template OperatorPanel<S> build_panels<S>(const Mat<S>&, Index, Index, double);               \
  template Mat<S> aliasing_operator<S>(const OperatorPanel<S>&);                                \
  template Mat<S> b_operator<S>(const OperatorPanel<S>&);                                       \
  template Mat<S> aliasing_error_operator<S>(const OperatorPanel<S>&);                          \
  template Mat<S> invertibility_operator<S>(const OperatorPanel<S>&);                           \
  template Vec<S> infer_theta<S>(const OperatorPanel<S>&, const Vec<S>&);                       \
  template ErrorBreakdown risk_and_errors<S>(const OperatorPanel<S>&, const RealVector&,        \
                                             const Vec<S>&);                                    \
  template RidgeResult<S> ridge_panels<S>(const OperatorPanel<S>&, const RidgeConfig&);         \
  template Mat<S> ridge_aliasing_operator<S>(const OperatorPanel<S>&, const RidgeConfig&);      \
  template Mat<S> ridge_invertibility_operator<S>(const OperatorPanel<S>&, const RidgeConfig&);

GADKIT_INSTANTIATE(double)
GADKIT_INSTANTIATE(Complex)
#undef GADKIT_INSTANTIATE

}  // namespace gadkit::decomposition
