#pragma once

#include <complex>
#include <concepts>
#include <type_traits>
#include <utility>
#include <variant>

#include <Eigen/Dense>

#include "gadkit/error.hpp"

namespace gadkit {

using Index = Eigen::Index;
using Complex = std::complex<double>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using RealMatrix = Mat<double>;
using ComplexMatrix = Mat<Complex>;
using RealVector = Vec<double>;
using ComplexVector = Vec<Complex>;

/// Rows are points, columns are coordinates.
using PointSet = RealMatrix;

enum class Field { Real, Complex };

template <typename S>
concept FieldScalar = std::same_as<S, double> || std::same_as<S, Complex>;

template <FieldScalar S>
constexpr Field field_of() {
  return std::is_same_v<S, double> ? Field::Real : Field::Complex;
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& x) {
  return x.allFinite();
}

/// Dense matrix over a tagged field. Complex entries mean every transpose in
/// the real-valued formulas becomes a conjugate transpose.
class Matrix {
 public:
  Matrix() = default;
  Matrix(RealMatrix m) : data_(std::move(m)) {}
  Matrix(ComplexMatrix m) : data_(std::move(m)) {}

  Field field() const { return data_.index() == 0 ? Field::Real : Field::Complex; }
  bool is_real() const { return data_.index() == 0; }
  Index rows() const {
    return std::visit([](const auto& m) { return m.rows(); }, data_);
  }
  Index cols() const {
    return std::visit([](const auto& m) { return m.cols(); }, data_);
  }

  template <FieldScalar S>
  const Mat<S>& get() const {
    if (const auto* p = std::get_if<Mat<S>>(&data_)) return *p;
    throw InvalidInput("matrix field mismatch");
  }

  template <FieldScalar S>
  Mat<S>& get() {
    if (auto* p = std::get_if<Mat<S>>(&data_)) return *p;
    throw InvalidInput("matrix field mismatch");
  }

  /// Complex view; real matrices are promoted.
  ComplexMatrix to_complex() const {
    if (const auto* p = std::get_if<ComplexMatrix>(&data_)) return *p;
    return std::get<RealMatrix>(data_).cast<Complex>();
  }

  template <typename F>
  decltype(auto) visit(F&& f) const {
    return std::visit(std::forward<F>(f), data_);
  }

  template <typename F>
  decltype(auto) visit(F&& f) {
    return std::visit(std::forward<F>(f), data_);
  }

 private:
  std::variant<RealMatrix, ComplexMatrix> data_;
};

}  // namespace gadkit
