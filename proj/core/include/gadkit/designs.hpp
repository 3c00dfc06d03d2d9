#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "gadkit/datasets.hpp"
#include "gadkit/matrix.hpp"

/// Training sets T, prediction grids V and ground-truth parameter vectors.
namespace gadkit::designs {

enum class Strategy {
  UniformInterval,
  Equispaced,
  LegendreGauss,
  SphereUniform,
  FromDataset,
  SpinConfigurations,
};

/// Row order for SpinConfigurations: by smallest period of the configuration
/// on the ring, then lexicographically (site 0 most significant, -1 before +1);
/// or a seeded shuffle.
enum class SpinRowOrder { PeriodThenLexicographic, SeededPermutation };

struct DesignParams {
  Strategy strategy = Strategy::UniformInterval;
  Index n = 1;
  Index grid_size = 0;  // 0: 512 for interval designs, 2000 otherwise
  Index input_dim = 1;
  double interval_lo = -1.0;
  double interval_hi = 1.0;
  std::uint64_t seed = 0;
  SpinRowOrder spin_row_order = SpinRowOrder::PeriodThenLexicographic;
  std::shared_ptr<const datasets::PointCloud> dataset;  // FromDataset only
};

struct SampleDesign {
  PointSet train_points;       // n rows
  PointSet prediction_points;  // grid rows, disjoint from train_points
  Strategy strategy = Strategy::UniformInterval;
  std::uint64_t seed = 0;      // seed that produced the accepted draw
  int seed_retries = 0;        // duplicate-draw retries before acceptance

  Index train_count() const { return train_points.rows(); }
  Index prediction_count() const { return prediction_points.rows(); }
  /// Training rows first, then prediction rows.
  PointSet all_points() const;
};

/// Prediction grid size used when `grid_size` is 0.
Index default_grid_size(Strategy strategy);

SampleDesign make_design(const DesignParams& params);

/// Smallest p dividing L such that the configuration repeats with period p.
int minimal_period(std::uint32_t config, int length);

/// All 2^L spin configurations as bitmasks (bit s set = spin -1 at site s), in
/// the requested row order.
std::vector<std::uint32_t> spin_configurations(int length, SpinRowOrder order, std::uint64_t seed);

enum class ThetaScheme { UnstructuredIid, PowerDecay, Explicit };

struct ParameterSpec {
  ThetaScheme scheme = ThetaScheme::UnstructuredIid;
  Index length = 0;
  std::uint64_t seed = 0;
  double variance = 1.0;          // UnstructuredIid
  double scale = 1.0;             // PowerDecay
  double exponent = 1.0;          // PowerDecay
  bool random_signs = true;       // PowerDecay
  std::vector<double> values;     // Explicit

  bool operator==(const ParameterSpec&) const = default;
};

RealVector make_theta(const ParameterSpec& spec);

std::string_view to_string(Strategy strategy);
std::string_view to_string(ThetaScheme scheme);
std::string_view to_string(SpinRowOrder order);

}  // namespace gadkit::designs
