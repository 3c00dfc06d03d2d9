#include "gadkit/designs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gadkit/bases.hpp"

namespace gadkit::designs {

namespace {

constexpr int kMaxRetries = 64;

bool rows_less(const PointSet& p, Index a, Index b) {
  for (Index c = 0; c < p.cols(); ++c) {
    if (p(a, c) != p(b, c)) return p(a, c) < p(b, c);
  }
  return false;
}

bool has_duplicate_rows(const PointSet& p) {
  std::vector<Index> idx(static_cast<std::size_t>(p.rows()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::sort(idx.begin(), idx.end(), [&](Index a, Index b) { return rows_less(p, a, b); });
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (!rows_less(p, idx[i - 1], idx[i]) && !rows_less(p, idx[i], idx[i - 1])) return true;
  return false;
}

// Drops every candidate row that equals some training row exactly.
PointSet exclude_rows(const PointSet& candidates, const PointSet& train) {
  std::vector<Index> keep;
  for (Index i = 0; i < candidates.rows(); ++i) {
    bool clash = false;
    for (Index t = 0; t < train.rows() && !clash; ++t)
      clash = (candidates.row(i).array() == train.row(t).array()).all();
    if (!clash) keep.push_back(i);
  }
  PointSet out(static_cast<Index>(keep.size()), candidates.cols());
  for (std::size_t k = 0; k < keep.size(); ++k) out.row(static_cast<Index>(k)) = candidates.row(keep[k]);
  return out;
}

PointSet closed_grid(double lo, double hi, Index size) {
  PointSet g(size, 1);
  if (size == 1) {
    g(0, 0) = 0.5 * (lo + hi);
    return g;
  }
  for (Index i = 0; i < size; ++i)
    g(i, 0) = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(size - 1);
  return g;
}

PointSet midpoint_grid(double lo, double hi, Index size) {
  PointSet g(size, 1);
  for (Index i = 0; i < size; ++i)
    g(i, 0) = lo + (hi - lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(size);
  return g;
}

PointSet spins_to_points(const std::vector<std::uint32_t>& configs, std::size_t first,
                         std::size_t count, int length) {
  PointSet p(static_cast<Index>(count), length);
  for (std::size_t r = 0; r < count; ++r)
    for (int s = 0; s < length; ++s)
      p(static_cast<Index>(r), s) = (configs[first + r] >> s) & 1u ? -1.0 : 1.0;
  return p;
}

void validate(const DesignParams& params) {
  if (params.n < 1) throw InvalidInput("design n must be >= 1");
  if (params.grid_size < 0) throw InvalidInput("grid_size must be >= 0");
  if (params.input_dim < 1) throw InvalidInput("input_dim must be >= 1");
  const bool interval = params.strategy == Strategy::UniformInterval ||
                        params.strategy == Strategy::Equispaced ||
                        params.strategy == Strategy::LegendreGauss;
  if (interval) {
    if (params.input_dim != 1) throw InvalidInput("interval designs are one-dimensional");
    if (!(params.interval_lo < params.interval_hi))
      throw InvalidInput("interval_lo must be < interval_hi");
  }
  if (params.strategy == Strategy::LegendreGauss &&
      (params.interval_lo > -1.0 || params.interval_hi < 1.0))
    throw InvalidInput("LegendreGauss needs an interval containing [-1, 1]");
}

// One attempt; returns false when the training draw holds duplicate points.
bool draw(const DesignParams& params, std::uint64_t seed, SampleDesign& out) {
  std::mt19937_64 rng(seed);
  const double lo = params.interval_lo, hi = params.interval_hi;
  switch (params.strategy) {
    case Strategy::UniformInterval: {
      std::uniform_real_distribution<double> uniform(lo, hi);
      out.train_points.resize(params.n, 1);
      for (Index i = 0; i < params.n; ++i) out.train_points(i, 0) = uniform(rng);
      if (has_duplicate_rows(out.train_points)) return false;
      out.prediction_points = exclude_rows(closed_grid(lo, hi, params.grid_size), out.train_points);
      return true;
    }
    case Strategy::Equispaced: {
      out.train_points.resize(params.n, 1);
      for (Index k = 0; k < params.n; ++k)
        out.train_points(k, 0) =
            lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(params.n);
      out.prediction_points =
          exclude_rows(midpoint_grid(lo, hi, params.grid_size), out.train_points);
      return true;
    }
    case Strategy::LegendreGauss: {
      const auto nodes = bases::legendre_gauss_nodes(params.n);
      out.train_points.resize(params.n, 1);
      for (Index k = 0; k < params.n; ++k) out.train_points(k, 0) = nodes[static_cast<std::size_t>(k)];
      out.prediction_points = exclude_rows(closed_grid(lo, hi, params.grid_size), out.train_points);
      return true;
    }
    case Strategy::SphereUniform: {
      const auto cloud = datasets::sphere_cloud(params.input_dim, params.n + params.grid_size, seed);
      out.train_points = cloud.points.topRows(params.n);
      if (has_duplicate_rows(out.train_points)) return false;
      out.prediction_points = exclude_rows(cloud.points.bottomRows(params.grid_size), out.train_points);
      return true;
    }
    case Strategy::FromDataset: {
      if (!params.dataset) throw InvalidInput("FromDataset requires a loaded point cloud");
      const auto& cloud = *params.dataset;
      if (cloud.dim != params.input_dim)
        throw InvalidInput("dataset dimension " + std::to_string(cloud.dim) +
                           " != input_dim " + std::to_string(params.input_dim));
      if (cloud.size() <= params.n)
        throw InvalidInput("dataset has too few items for n training points plus a grid");
      const Index grid = std::min(params.grid_size, cloud.size() - params.n);
      std::vector<Index> idx(static_cast<std::size_t>(cloud.size()));
      std::iota(idx.begin(), idx.end(), Index{0});
      const std::size_t take = static_cast<std::size_t>(params.n + grid);
      for (std::size_t i = 0; i < take; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
        std::swap(idx[i], idx[pick(rng)]);
      }
      out.train_points.resize(params.n, cloud.dim);
      for (Index i = 0; i < params.n; ++i) out.train_points.row(i) = cloud.points.row(idx[i]);
      if (has_duplicate_rows(out.train_points)) return false;
      PointSet candidates(grid, cloud.dim);
      for (Index i = 0; i < grid; ++i) candidates.row(i) = cloud.points.row(idx[params.n + i]);
      out.prediction_points = exclude_rows(candidates, out.train_points);
      return true;
    }
    case Strategy::SpinConfigurations: {
      const int length = static_cast<int>(params.input_dim);
      if (length > 20) throw InvalidInput("spin chains longer than 20 sites are not enumerated");
      const auto configs = spin_configurations(length, params.spin_row_order, seed);
      if (static_cast<std::size_t>(params.n) >= configs.size())
        throw InvalidInput("n must be smaller than the 2^L configurations");
      const std::size_t rest = configs.size() - static_cast<std::size_t>(params.n);
      const std::size_t grid = std::min(rest, static_cast<std::size_t>(params.grid_size));
      out.train_points = spins_to_points(configs, 0, static_cast<std::size_t>(params.n), length);
      out.prediction_points =
          spins_to_points(configs, static_cast<std::size_t>(params.n), grid, length);
      return true;
    }
  }
  return true;
}

}  // namespace

PointSet SampleDesign::all_points() const {
  PointSet all(train_points.rows() + prediction_points.rows(), train_points.cols());
  all.topRows(train_points.rows()) = train_points;
  all.bottomRows(prediction_points.rows()) = prediction_points;
  return all;
}

Index default_grid_size(Strategy strategy) {
  switch (strategy) {
    case Strategy::UniformInterval:
    case Strategy::Equispaced:
    case Strategy::LegendreGauss: return 512;
    default: return 2000;
  }
}

SampleDesign make_design(const DesignParams& input) {
  validate(input);
  DesignParams params = input;
  if (params.grid_size == 0) params.grid_size = default_grid_size(params.strategy);
  SampleDesign out;
  out.strategy = params.strategy;
  for (int retry = 0; retry <= kMaxRetries; ++retry) {
    const std::uint64_t seed = params.seed + static_cast<std::uint64_t>(retry);
    if (draw(params, seed, out)) {
      out.seed = seed;
      out.seed_retries = retry;
      if (out.prediction_points.rows() == 0)
        throw InvalidInput("prediction grid is empty after removing training points");
      return out;
    }
  }
  throw InvalidInput("could not draw distinct training points");
}

int minimal_period(std::uint32_t config, int length) {
  const std::uint32_t full = length >= 32 ? ~0u : ((std::uint32_t{1} << length) - 1);
  for (int p = 1; p < length; ++p) {
    if (length % p != 0) continue;
    const std::uint32_t rotated = ((config >> p) | (config << (length - p))) & full;
    if (rotated == config) return p;
  }
  return length;
}

std::vector<std::uint32_t> spin_configurations(int length, SpinRowOrder order, std::uint64_t seed) {
  if (length < 1 || length > 24) throw InvalidInput("spin chain length must lie in [1, 24]");
  std::vector<std::uint32_t> configs(std::size_t{1} << length);
  std::iota(configs.begin(), configs.end(), 0u);
  if (order == SpinRowOrder::SeededPermutation) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = configs.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(configs[i - 1], configs[pick(rng)]);
    }
    return configs;
  }
  // Lexicographic with site 0 most significant and -1 (bit set) first.
  auto lex_key = [length](std::uint32_t c) {
    std::uint32_t key = 0;
    for (int s = 0; s < length; ++s)
      if (!((c >> s) & 1u)) key |= std::uint32_t{1} << (length - 1 - s);
    return key;
  };
  std::stable_sort(configs.begin(), configs.end(), [&](std::uint32_t a, std::uint32_t b) {
    const int pa = minimal_period(a, length), pb = minimal_period(b, length);
    if (pa != pb) return pa < pb;
    return lex_key(a) < lex_key(b);
  });
  return configs;
}

RealVector make_theta(const ParameterSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  switch (spec.scheme) {
    case ThetaScheme::UnstructuredIid: {
      if (spec.variance < 0.0) throw InvalidInput("variance must be >= 0");
      std::normal_distribution<double> normal(0.0, std::sqrt(spec.variance));
      RealVector theta(spec.length);
      for (Index j = 0; j < spec.length; ++j) theta(j) = normal(rng);
      return theta;
    }
    case ThetaScheme::PowerDecay: {
      std::bernoulli_distribution coin(0.5);
      RealVector theta(spec.length);
      for (Index j = 0; j < spec.length; ++j) {
        const double sign = spec.random_signs && coin(rng) ? -1.0 : 1.0;
        theta(j) = sign * spec.scale * std::pow(static_cast<double>(j + 1), -spec.exponent);
      }
      return theta;
    }
    case ThetaScheme::Explicit: {
      if (spec.length != 0 && spec.length != static_cast<Index>(spec.values.size()))
        throw InvalidInput("explicit theta has " + std::to_string(spec.values.size()) +
                           " values, expected " + std::to_string(spec.length));
      return Eigen::Map<const RealVector>(spec.values.data(),
                                          static_cast<Index>(spec.values.size()));
    }
  }
  return {};
}

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::UniformInterval: return "uniform";
    case Strategy::Equispaced: return "equispaced";
    case Strategy::LegendreGauss: return "legendre_gauss";
    case Strategy::SphereUniform: return "sphere";
    case Strategy::FromDataset: return "dataset";
    case Strategy::SpinConfigurations: return "spin";
  }
  return "unknown";
}

std::string_view to_string(ThetaScheme scheme) {
  switch (scheme) {
    case ThetaScheme::UnstructuredIid: return "iid";
    case ThetaScheme::PowerDecay: return "power";
    case ThetaScheme::Explicit: return "explicit";
  }
  return "unknown";
}

std::string_view to_string(SpinRowOrder order) {
  switch (order) {
    case SpinRowOrder::PeriodThenLexicographic: return "period_lex";
    case SpinRowOrder::SeededPermutation: return "permuted";
  }
  return "unknown";
}

}  // namespace gadkit::designs
