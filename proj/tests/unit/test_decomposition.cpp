#include <doctest.h>

#include <cmath>

#include "gadkit/decomposition.hpp"
#include "gadkit/linalg.hpp"
#include "test_support.hpp"

using namespace gadkit;
using decomposition::build_panels;
using gadkit::testing::random_matrix;

namespace {

RealMatrix vandermonde(const RealVector& t, Index cols) {
  RealMatrix v(t.size(), cols);
  for (Index i = 0; i < t.size(); ++i)
    for (Index j = 0; j < cols; ++j) v(i, j) = std::pow(t(i), static_cast<double>(j));
  return v;
}

decomposition::SweepOptions range(Index first, Index last, Index step = 1) {
  decomposition::SweepOptions o;
  o.range = {first, last, step};
  return o;
}

std::vector<double> column_of(const std::vector<decomposition::SweepRecord>& records,
                              double decomposition::SweepRecord::*field) {
  std::vector<double> out;
  for (const auto& r : records) out.push_back(r.*field);
  return out;
}

}  // namespace

TEST_CASE("panel blocks are prefix splits") {
  RealVector t(5);
  t << 0, 1, 2, 3, 4;
  const RealMatrix full = vandermonde(t, 4);
  const auto panel = build_panels<double>(full, 3, 2);
  CHECK(panel.design == full.topLeftCorner(3, 2));
  CHECK(panel.nescience == full.topRightCorner(3, 2));
  CHECK(panel.prediction_modeled == full.bottomLeftCorner(2, 2));
  CHECK(panel.prediction_nescience == full.bottomRightCorner(2, 2));
  CHECK(panel.rank_tm == 2);
  CHECK(panel.budget() == 4);

  const auto whole = build_panels<double>(full, 3, 4);
  CHECK(whole.nescience.cols() == 0);
  const RealMatrix a = decomposition::aliasing_operator(whole);
  CHECK(a.rows() == 4);
  CHECK(a.cols() == 0);
  CHECK(linalg::spectral_norm(a) == 0.0);

  CHECK_THROWS_AS(build_panels<double>(full, 3, 0), InvalidInput);
  CHECK_THROWS_AS(build_panels<double>(full, 3, 5), InvalidInput);
  CHECK_THROWS_AS(build_panels<double>(full, 6, 2), InvalidInput);
}

TEST_CASE("scalar aliasing example") {
  RealMatrix full(1, 2);
  full << 1, 2;  // monomials at t = 2
  const auto panel = build_panels<double>(full, 1, 1);
  const RealMatrix a = decomposition::aliasing_operator(panel);
  CHECK(a.rows() == 1);
  CHECK(a(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("B operator") {
  std::mt19937_64 rng(1);
  const RealMatrix tall = random_matrix<double>(7, 4, rng);
  CHECK((decomposition::b_operator(build_panels<double>(tall, 7, 4)) - RealMatrix::Identity(4, 4)).norm() <
        1e-10);

  RealMatrix ones(1, 2);
  ones << 1, 1;
  const RealMatrix b = decomposition::b_operator(build_panels<double>(ones, 1, 2));
  CHECK((b - RealMatrix::Constant(2, 2, 0.5)).norm() < 1e-14);
}

TEST_CASE_TEMPLATE("error operators have the documented block shape", S, double, Complex) {
  std::mt19937_64 rng(2);
  const Mat<S> full = testing::random_rank<S>(9, 12, 5, rng);
  const auto panel = build_panels<S>(full, 6, 7);
  const Mat<S> a = decomposition::aliasing_operator(panel);
  const Mat<S> ea = decomposition::aliasing_error_operator(panel);
  const Mat<S> eb = decomposition::invertibility_operator(panel);
  CHECK(ea.rows() == 12);
  CHECK(ea.topLeftCorner(7, 7).norm() == 0.0);
  CHECK((ea.topRightCorner(7, 5) + a).norm() == 0.0);
  CHECK(ea.bottomRows(5).norm() == 0.0);
  CHECK((eb.bottomRightCorner(5, 5) - Mat<S>::Identity(5, 5)).norm() == 0.0);
  CHECK(eb.topRightCorner(7, 5).norm() == 0.0);
  CHECK(eb.bottomLeftCorner(5, 7).norm() == 0.0);
  const Mat<S> pk = linalg::kernel_projector<S>(panel.design);
  CHECK((eb.topLeftCorner(7, 7) - pk).norm() < 1e-10);
  CHECK(testing::rel_diff(linalg::spectral_norm(eb), 1.0) < 1e-10);
  CHECK(linalg::spectral_norm(ea) == doctest::Approx(linalg::spectral_norm(a)));
}

TEST_CASE("infer theta") {
  std::mt19937_64 rng(3);
  SUBCASE("zero labels") {
    const RealMatrix full = random_matrix<double>(5, 8, rng);
    const auto panel = build_panels<double>(full, 4, 3);
    CHECK(decomposition::infer_theta(panel, RealVector(RealVector::Zero(4))).norm() == 0.0);
  }
  SUBCASE("invertible square") {
    const RealMatrix full = random_matrix<double>(6, 8, rng);
    const auto panel = build_panels<double>(full, 4, 4);
    const RealVector y = testing::random_vector<double>(4, rng);
    const RealVector th = decomposition::infer_theta(panel, y);
    CHECK(th.size() == 8);
    CHECK((th.head(4) - panel.design.lu().solve(y)).norm() < 1e-10 * th.norm());
    CHECK(th.tail(4).norm() == 0.0);
  }
  SUBCASE("consistent overdetermined system") {
    const ComplexMatrix full = random_matrix<Complex>(12, 5, rng);
    const auto panel = build_panels<Complex>(full, 10, 3);
    const ComplexVector truth = testing::random_vector<Complex>(3, rng);
    const ComplexVector th = decomposition::infer_theta(panel, ComplexVector(panel.design * truth));
    CHECK((th.head(3) - truth).norm() < 1e-9 * truth.norm());
  }
  SUBCASE("length mismatch") {
    const RealMatrix full = random_matrix<double>(5, 8, rng);
    CHECK_THROWS_AS(decomposition::infer_theta(build_panels<double>(full, 4, 3),
                                               RealVector(RealVector::Zero(3))),
                    InvalidInput);
  }
}

TEST_CASE("risk vanishes for perfectly modeled signals") {
  std::mt19937_64 rng(4);
  const RealMatrix full = random_matrix<double>(15, 6, rng);
  RealVector theta = RealVector::Zero(6);
  theta.head(3) = testing::random_vector<double>(3, rng);
  const auto panel = build_panels<double>(full, 8, 3);
  const auto e = decomposition::risk_and_errors(panel, theta, RealVector(full * theta));
  CHECK(e.risk_all < 1e-24);
  CHECK(e.risk_prediction_only < 1e-24);
  CHECK(e.alias_error == 0.0);
  CHECK(e.bias_error < 1e-12);
  CHECK(e.nescience_error == 0.0);

  const RealVector dense = testing::random_vector<double>(6, rng);
  const auto all = build_panels<double>(full, 8, 6);
  const auto f = decomposition::risk_and_errors(all, dense, RealVector(full * dense));
  CHECK(f.risk_all < 1e-24);
  CHECK(f.risk_prediction_only < 1e-24);
}

TEST_CASE_TEMPLATE("error terms follow their definitions", S, double, Complex) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = testing::uniform_index(2, 10, rng);
    const Index budget = testing::uniform_index(3, 16, rng);
    const Index m = testing::uniform_index(1, budget - 1, rng);
    const Mat<S> full = random_matrix<S>(n + 7, budget, rng);
    const RealVector theta = testing::random_vector<double>(budget, rng);
    const auto panel = build_panels<S>(full, n, m);
    const Vec<S> y = full * theta.cast<S>();
    const auto e = decomposition::risk_and_errors(panel, theta, y);
    const Mat<S> a = decomposition::aliasing_operator(panel);
    const Mat<S> pk = linalg::kernel_projector<S>(panel.design);
    const Vec<S> tm = theta.head(m).cast<S>();
    const Vec<S> tu = theta.tail(budget - m).cast<S>();
    CHECK(testing::rel_diff(e.alias_error, (a * tu).norm()) < 1e-10);
    CHECK(std::abs(e.bias_error - (pk * tm).norm()) < 1e-10 * theta.norm());
    CHECK(e.nescience_error == doctest::Approx(tu.norm()));
    CHECK(e.identity_residual < 1e-8);

    // E_B theta splits into the two orthogonal pieces.
    const Vec<S> eb = decomposition::invertibility_operator(panel) * theta.cast<S>();
    CHECK(std::abs(eb.squaredNorm() - (e.bias_error * e.bias_error + e.nescience_error * e.nescience_error)) <
          1e-10 * theta.squaredNorm());
    CHECK(eb.norm() <= theta.norm() * (1.0 + 1e-12));

    // Risk from the definition of the fit.
    const Vec<S> hat = decomposition::infer_theta(panel, Vec<S>(y.head(n)));
    const Vec<S> resid = y - full * hat;
    CHECK(testing::rel_diff(e.risk_all, resid.squaredNorm() / static_cast<double>(full.rows())) < 1e-8);
    CHECK(testing::rel_diff(e.risk_prediction_only, resid.tail(7).squaredNorm() / 7.0) < 1e-8);
  }
}

TEST_CASE("ridge examples") {
  SUBCASE("identity design") {
    RealMatrix full = RealMatrix::Zero(2, 3);
    full.leftCols(2) = RealMatrix::Identity(2, 2);
    const auto panel = build_panels<double>(full, 2, 2);
    const auto r = decomposition::ridge_panels(panel, {2.0, 2});
    CHECK(r.augmented.rows() == 4);
    CHECK(r.singular_values(0) == doctest::Approx(std::sqrt(5.0)));
    CHECK(r.singular_values(1) == doctest::Approx(std::sqrt(5.0)));
    CHECK(r.pinv_norm == doctest::Approx(1.0 / std::sqrt(5.0)));
    CHECK(r.pinv_norm <= 0.5);
  }
  SUBCASE("lambda zero reduces to the plain pseudoinverse") {
    std::mt19937_64 rng(6);
    const RealMatrix full = random_matrix<double>(5, 9, rng);
    const auto panel = build_panels<double>(full, 5, 7);
    const auto r = decomposition::ridge_panels(panel, {0.0, 5});
    CHECK(r.augmented.bottomRows(7).norm() == 0.0);
    CHECK(testing::rel_diff(r.pinv_norm, linalg::spectral_norm(linalg::pseudoinverse(panel.design))) < 1e-12);
  }
  SUBCASE("negative lambda") {
    RealMatrix full = RealMatrix::Identity(2, 3);
    CHECK_THROWS_AS(decomposition::ridge_panels(build_panels<double>(full, 2, 2), {-1.0, 2}), InvalidInput);
  }
}

TEST_CASE_TEMPLATE("ridge singular values and bounds", S, double, Complex) {
  std::mt19937_64 rng(7);
  for (double lambda : {1e-4, 1e-2, 1.0}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Index n = testing::uniform_index(3, 12, rng);
      const Index m = testing::uniform_index(1, 15, rng);
      const Mat<S> full = random_matrix<S>(n, m + 3, rng);
      const auto panel = build_panels<S>(full, n, m);
      const decomposition::RidgeConfig ridge{lambda, n};
      const auto r = decomposition::ridge_panels(panel, ridge);
      // Oracle: eigenvalues of M^H M + n lambda I.
      const Mat<S> gram = panel.design.adjoint() * panel.design +
                          (static_cast<double>(n) * lambda) * Mat<S>::Identity(m, m);
      Eigen::SelfAdjointEigenSolver<Mat<S>> eig(gram, Eigen::EigenvaluesOnly);
      const RealVector want = eig.eigenvalues().cwiseSqrt().reverse();
      REQUIRE(r.singular_values.size() == m);
      for (Index i = 0; i < m; ++i) CHECK(testing::rel_diff(r.singular_values(i), want(i)) < 1e-9);
      const double bound = 1.0 / std::sqrt(static_cast<double>(n) * lambda);
      CHECK(r.pinv_norm <= bound * (1.0 + 1e-12));
      const Mat<S> eb = decomposition::ridge_invertibility_operator(panel, ridge);
      CHECK(linalg::spectral_norm(eb) <= 1.0 + linalg::spectral_norm<S>(panel.design) * bound);
      const Mat<S> a = decomposition::ridge_aliasing_operator(panel, ridge);
      CHECK(a.rows() == m);
      CHECK(a.cols() == 3);
    }
  }
}

TEST_CASE("expected unstructured error") {
  CHECK(decomposition::expected_unstructured_error(1.0, 0, 5) == 5.0);
  CHECK(decomposition::expected_unstructured_error(2.0, 3, 0) == 6.0);
}

TEST_CASE("model ranges") {
  CHECK(decomposition::ModelRange{1, 5, 2}.values() == std::vector<Index>{1, 3, 5});
  CHECK(decomposition::ModelRange{2, 2, 1}.values() == std::vector<Index>{2});
}

TEST_CASE_TEMPLATE("sweep invariants", S, double, Complex) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 4; ++trial) {
    const Index n = 12;
    const Index budget = 30;
    Mat<S> full = random_matrix<S>(n + 20, budget, rng);
    // Repeat a few columns so the sweep meets dependent appends below n.
    full.col(4) = full.col(1);
    full.col(9) = 2.0 * full.col(2) - full.col(3);
    const RealVector theta = testing::random_vector<double>(budget, rng);
    const auto records = decomposition::sweep_matrix(Matrix(full), n, theta, range(1, budget));
    REQUIRE(records.size() == static_cast<std::size_t>(budget));
    CHECK_FALSE(records[4].new_col_independent);
    CHECK_FALSE(records[9].new_col_independent);
    for (std::size_t k = 0; k < records.size(); ++k) {
      const auto& r = records[k];
      CHECK(r.error.empty());
      CHECK(r.m == static_cast<Index>(k) + 1);
      CHECK(r.rank_TM <= std::min<Index>(n, r.m));
      CHECK(r.norm_A <= r.norm_pinv_TM * r.norm_M_TU * (1.0 + 1e-9) + 1e-12);
      CHECK(r.identity_residual < 1e-8);
      if (k == 0) continue;
      const auto& prev = records[k - 1];
      const double scale = std::max(r.norm_pinv_TM, prev.norm_pinv_TM);
      if (r.new_col_independent)
        CHECK(r.norm_pinv_TM >= prev.norm_pinv_TM - 1e-9 * scale);
      else
        CHECK(r.norm_pinv_TM <= prev.norm_pinv_TM + 1e-9 * scale);
      CHECK(r.rank_TM == prev.rank_TM + (r.new_col_independent ? 1 : 0));
    }
    using R = decomposition::SweepRecord;
    const auto tu = column_of(records, &R::norm_M_TU);
    const auto nes = column_of(records, &R::nescience_error);
    const auto bias = column_of(records, &R::bias_error);
    for (std::size_t k = 1; k < records.size(); ++k) {
      CHECK(tu[k] <= tu[k - 1] * (1.0 + 1e-9));
      CHECK(nes[k] <= nes[k - 1] * (1.0 + 1e-12));
      CHECK(bias[k] >= bias[k - 1] - 1e-9 * theta.norm());
    }
  }
}

TEST_CASE("lambda zero matches an explicit zero ridge") {
  std::mt19937_64 rng(9);
  const RealMatrix full = random_matrix<double>(30, 25, rng);
  const RealVector theta = testing::random_vector<double>(25, rng);
  auto plain = range(1, 25);
  auto ridged = plain;
  ridged.ridge = {0.0, 10};
  CHECK(decomposition::sweep_matrix(Matrix(full), 10, theta, plain) ==
        decomposition::sweep_matrix(Matrix(full), 10, theta, ridged));
}

TEST_CASE("sweep is deterministic and independent of the thread count") {
  std::mt19937_64 rng(10);
  const ComplexMatrix full = random_matrix<Complex>(40, 30, rng);
  const RealVector theta = testing::random_vector<double>(30, rng);
  auto one = range(1, 30);
  auto many = one;
  many.threads = 3;
  const auto a = decomposition::sweep_matrix(Matrix(full), 15, theta, one);
  CHECK(a == decomposition::sweep_matrix(Matrix(full), 15, theta, one));
  CHECK(a == decomposition::sweep_matrix(Matrix(full), 15, theta, many));
}

TEST_CASE("ordinary least squares regime has a trivial kernel") {
  std::mt19937_64 rng(11);
  const RealMatrix full = random_matrix<double>(40, 30, rng);
  const RealVector theta = testing::random_vector<double>(30, rng);
  for (const auto& r : decomposition::sweep_matrix(Matrix(full), 20, theta, range(1, 20))) {
    CHECK(r.rank_TM == r.m);
    CHECK(r.bias_error < 1e-12 * theta.norm());
  }
}

TEST_CASE("pseudoinverse norm descends past the threshold for Gaussian columns") {
  const Index n = 20;
  int descended = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    const RealMatrix full = random_matrix<double>(n + 1, 4 * n, rng);
    const RealVector theta = RealVector::Zero(4 * n);
    const auto records = decomposition::sweep_matrix(Matrix(full), n, theta, range(n + 1, 4 * n, 3 * n - 1));
    REQUIRE(records.size() == 2);
    if (records[1].norm_pinv_TM < records[0].norm_pinv_TM) ++descended;
  }
  CHECK(descended >= 95);
}

TEST_CASE("sweep over a basis and design") {
  bases::BasisSpec basis;
  basis.family = bases::Family::Legendre;
  basis.column_budget = 20;
  designs::DesignParams params;
  params.strategy = designs::Strategy::LegendreGauss;
  params.n = 8;
  params.grid_size = 50;
  const auto design = designs::make_design(params);
  designs::ParameterSpec theta;
  theta.length = 20;
  theta.seed = 1;
  const auto records = decomposition::sweep(basis, design, theta, range(1, 20));
  CHECK(records.size() == 20);
  CHECK(records[7].rank_TM == 8);
  CHECK_FALSE(records[8].new_col_independent);
  theta.length = 19;
  CHECK_THROWS_AS(decomposition::sweep(basis, design, theta, range(1, 20)), InvalidInput);
  theta.length = 20;
  CHECK_THROWS(decomposition::sweep(basis, design, theta, range(1, 21)));
}
