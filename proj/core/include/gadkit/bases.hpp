#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gadkit/matrix.hpp"

/// Basis families that generate the columns of the extended operator M.
/// Column j of M is the basis function selected by the column ordering,
/// sampled at every point (one row per point).
namespace gadkit::bases {

enum class Family {
  Monomial,
  Chebyshev,
  Legendre,
  FourierDiscrete,
  RandomFourierFeatures,
  RandomReluFeatures,
  ClusterIsing,
};

enum class Ordering { Natural, SeededPermutation, PhysicalClusterOrder };

struct BasisParams {
  // Polynomial domain. Chebyshev and Legendre require a subset of [-1, 1].
  double interval_lo = -1.0;
  double interval_hi = 1.0;
  // Fourier: period T and the modeled block size n (frequencies 0..n-1 come
  // first, then n, -1, n+1, -2, ...).
  double period = 1.0;
  Index fourier_n = 0;
  // ClusterIsing: periodic chain length and largest cluster order kept.
  Index chain_length = 0;
  Index max_cluster_order = -1;  // -1: all orders up to chain_length

  bool operator==(const BasisParams&) const = default;
};

struct BasisSpec {
  Family family = Family::Legendre;
  Index input_dim = 1;
  Index column_budget = 1;
  Ordering ordering = Ordering::Natural;
  std::uint64_t ordering_seed = 0;
  BasisParams params;
  std::uint64_t seed = 0;  // feature weights

  bool operator==(const BasisSpec&) const = default;
};

/// i.i.d. standard normal direction vectors, one row per feature.
struct FeatureWeights {
  RealMatrix vectors;  // count x input_dim

  static FeatureWeights generate(Index count, Index input_dim, std::uint64_t seed);
};

/// A cluster of sites on the periodic chain; the empty cluster is the constant.
struct ClusterBasisIndex {
  std::vector<int> sites;  // ascending
  int order = 0;
  int diameter = 0;  // largest periodic separation between two sites
  std::uint32_t mask = 0;

  bool operator==(const ClusterBasisIndex&) const = default;
};

/// Clusters with order <= max_order, in ascending bitmask order.
std::vector<ClusterBasisIndex> enumerate_clusters(Index chain_length, Index max_order);

/// Sort key for the physical ordering: (order, diameter, sites).
bool physical_less(const ClusterBasisIndex& a, const ClusterBasisIndex& b);

/// Number of distinct basis functions the family offers under `spec`
/// (clusters for ClusterIsing, the column budget otherwise).
Index available_functions(const BasisSpec& spec);

/// For each column j in [0, column_budget), the natural index of the basis
/// function placed there.
std::vector<Index> column_order(const BasisSpec& spec);

/// Frequency of the Fourier column with natural index k.
long long fourier_frequency(Index k, Index n);

/// Roots of P_n in ascending order, by Newton iteration from Chebyshev-angle
/// guesses. Symmetric pairs are mirrored exactly and the middle root of odd n
/// is exactly 0.
std::vector<double> legendre_gauss_nodes(Index n);

/// P_0..P_{degree} at x by the three-term recurrence.
std::vector<double> legendre_values(double x, Index degree);
std::vector<double> chebyshev_values(double x, Index degree);

bool is_complex(Family family);
std::string_view to_string(Family family);
std::string_view to_string(Ordering ordering);

struct ColumnRange {
  Index lo = 0;
  Index hi = 0;
};

/// Precomputed generator for one BasisSpec: column order, feature weights and
/// cluster list are built once, then evaluation is read-only.
class Basis {
 public:
  explicit Basis(BasisSpec spec);

  const BasisSpec& spec() const { return spec_; }
  Field field() const { return is_complex(spec_.family) ? Field::Complex : Field::Real; }
  Index budget() const { return spec_.column_budget; }
  const std::vector<Index>& order() const { return order_; }
  const FeatureWeights& weights() const { return weights_; }
  const std::vector<ClusterBasisIndex>& clusters() const { return clusters_; }

  /// Entry (i, j) = phi_{order(lo + j)}(points.row(i)).
  Matrix evaluate(const PointSet& points, ColumnRange range) const;
  Matrix evaluate(const PointSet& points) const { return evaluate(points, {0, budget()}); }

 private:
  void check_points(const PointSet& points) const;
  template <FieldScalar S>
  Mat<S> evaluate_as(const PointSet& points, ColumnRange range) const;

  BasisSpec spec_;
  std::vector<Index> order_;
  FeatureWeights weights_;
  std::vector<ClusterBasisIndex> clusters_;
};

Matrix evaluate_columns(const BasisSpec& spec, const PointSet& points, ColumnRange range);

}  // namespace gadkit::bases
