#include "gadkit/bases.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace gadkit::bases {

namespace {

constexpr Index kMaxChainLength = 24;

void validate(const BasisSpec& spec) {
  if (spec.column_budget < 1) throw InvalidInput("column_budget must be >= 1");
  if (spec.input_dim < 1) throw InvalidInput("input_dim must be >= 1");
  if (spec.ordering == Ordering::PhysicalClusterOrder && spec.family != Family::ClusterIsing)
    throw InvalidInput("PhysicalClusterOrder requires the ClusterIsing family");
  const auto& p = spec.params;
  switch (spec.family) {
    case Family::Monomial:
    case Family::Chebyshev:
    case Family::Legendre:
      if (spec.input_dim != 1) throw InvalidInput("polynomial bases need input_dim = 1");
      if (!(p.interval_lo < p.interval_hi)) throw InvalidInput("interval_lo must be < interval_hi");
      if (spec.family != Family::Monomial && (p.interval_lo < -1.0 || p.interval_hi > 1.0))
        throw InvalidInput("Chebyshev/Legendre interval must lie within [-1, 1]");
      break;
    case Family::FourierDiscrete:
      if (spec.input_dim != 1) throw InvalidInput("Fourier basis needs input_dim = 1");
      if (!(p.period > 0.0)) throw InvalidInput("period must be > 0");
      if (p.fourier_n < 1) throw InvalidInput("fourier_n must be >= 1");
      break;
    case Family::RandomFourierFeatures:
    case Family::RandomReluFeatures:
      break;
    case Family::ClusterIsing:
      if (p.chain_length < 1 || p.chain_length > kMaxChainLength)
        throw InvalidInput("chain_length must lie in [1, 24]");
      if (spec.input_dim != p.chain_length)
        throw InvalidInput("ClusterIsing input_dim must equal chain_length");
      if (p.max_cluster_order > p.chain_length)
        throw InvalidInput("max_cluster_order exceeds chain_length");
      break;
  }
}

int periodic_separation(int a, int b, int length) {
  const int d = std::abs(a - b);
  return std::min(d, length - d);
}

}  // namespace

FeatureWeights FeatureWeights::generate(Index count, Index input_dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  FeatureWeights w;
  w.vectors.resize(count, input_dim);
  for (Index k = 0; k < count; ++k)
    for (Index c = 0; c < input_dim; ++c) w.vectors(k, c) = normal(rng);
  return w;
}

std::vector<ClusterBasisIndex> enumerate_clusters(Index chain_length, Index max_order) {
  if (chain_length < 1 || chain_length > kMaxChainLength)
    throw InvalidInput("chain_length must lie in [1, 24]");
  if (max_order < 0) max_order = chain_length;
  const int length = static_cast<int>(chain_length);
  std::vector<ClusterBasisIndex> out;
  const std::uint32_t end = std::uint32_t{1} << length;
  for (std::uint32_t mask = 0; mask < end; ++mask) {
    const int order = std::popcount(mask);
    if (order > max_order) continue;
    ClusterBasisIndex c;
    c.mask = mask;
    c.order = order;
    for (int s = 0; s < length; ++s)
      if (mask & (std::uint32_t{1} << s)) c.sites.push_back(s);
    for (std::size_t i = 0; i < c.sites.size(); ++i)
      for (std::size_t j = i + 1; j < c.sites.size(); ++j)
        c.diameter = std::max(c.diameter, periodic_separation(c.sites[i], c.sites[j], length));
    out.push_back(std::move(c));
  }
  return out;
}

bool physical_less(const ClusterBasisIndex& a, const ClusterBasisIndex& b) {
  if (a.order != b.order) return a.order < b.order;
  if (a.diameter != b.diameter) return a.diameter < b.diameter;
  return a.sites < b.sites;
}

Index available_functions(const BasisSpec& spec) {
  if (spec.family != Family::ClusterIsing) return spec.column_budget;
  const Index length = spec.params.chain_length;
  const Index max_order =
      spec.params.max_cluster_order < 0 ? length : spec.params.max_cluster_order;
  Index total = 0;
  Index binom = 1;
  for (Index k = 0; k <= max_order; ++k) {
    total += binom;
    binom = binom * (length - k) / (k + 1);
  }
  return total;
}

std::vector<Index> column_order(const BasisSpec& spec) {
  validate(spec);
  const Index available = available_functions(spec);
  if (spec.column_budget > available)
    throw BudgetExceeded("column_budget exceeds the " + std::to_string(available) +
                         " functions this basis offers");
  std::vector<Index> order(static_cast<std::size_t>(available));
  std::iota(order.begin(), order.end(), Index{0});
  switch (spec.ordering) {
    case Ordering::Natural:
      break;
    case Ordering::SeededPermutation: {
      std::mt19937_64 rng(spec.ordering_seed);
      for (std::size_t i = order.size(); i > 1; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(order[i - 1], order[pick(rng)]);
      }
      break;
    }
    case Ordering::PhysicalClusterOrder: {
      const auto clusters =
          enumerate_clusters(spec.params.chain_length, spec.params.max_cluster_order);
      std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return physical_less(clusters[static_cast<std::size_t>(a)],
                             clusters[static_cast<std::size_t>(b)]);
      });
      break;
    }
  }
  order.resize(static_cast<std::size_t>(spec.column_budget));
  return order;
}

long long fourier_frequency(Index k, Index n) {
  if (k < n) return k;
  const long long r = k - n;
  return r % 2 == 0 ? n + r / 2 : -(r / 2 + 1);
}

std::vector<double> legendre_values(double x, Index degree) {
  std::vector<double> p(static_cast<std::size_t>(degree + 1));
  p[0] = 1.0;
  if (degree >= 1) p[1] = x;
  for (Index k = 1; k < degree; ++k) {
    const double kk = static_cast<double>(k);
    p[k + 1] = ((2.0 * kk + 1.0) * x * p[k] - kk * p[k - 1]) / (kk + 1.0);
  }
  return p;
}

std::vector<double> chebyshev_values(double x, Index degree) {
  std::vector<double> t(static_cast<std::size_t>(degree + 1));
  t[0] = 1.0;
  if (degree >= 1) t[1] = x;
  for (Index k = 1; k < degree; ++k) t[k + 1] = 2.0 * x * t[k] - t[k - 1];
  return t;
}

std::vector<double> legendre_gauss_nodes(Index n) {
  if (n < 1) throw InvalidInput("legendre_gauss_nodes: n must be >= 1");
  std::vector<double> nodes(static_cast<std::size_t>(n));
  const double nn = static_cast<double>(n);
  const Index half = (n + 1) / 2;
  for (Index i = 0; i < half; ++i) {
    // Largest root first.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nn + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (Index k = 1; k < n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk + 1.0) * x * p1 - kk * p0) / (kk + 1.0);
        p0 = p1;
        p1 = p2;
      }
      // p1 = P_n(x), p0 = P_{n-1}(x)
      const double dp = nn * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    nodes[static_cast<std::size_t>(i)] = -x;
  }
  if (n % 2 == 1) nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return nodes;
}

bool is_complex(Family family) {
  return family == Family::FourierDiscrete || family == Family::RandomFourierFeatures;
}

std::string_view to_string(Family family) {
  switch (family) {
    case Family::Monomial: return "monomial";
    case Family::Chebyshev: return "chebyshev";
    case Family::Legendre: return "legendre";
    case Family::FourierDiscrete: return "fourier";
    case Family::RandomFourierFeatures: return "rff";
    case Family::RandomReluFeatures: return "rrf";
    case Family::ClusterIsing: return "cluster_ising";
  }
  return "unknown";
}

std::string_view to_string(Ordering ordering) {
  switch (ordering) {
    case Ordering::Natural: return "natural";
    case Ordering::SeededPermutation: return "permuted";
    case Ordering::PhysicalClusterOrder: return "physical";
  }
  return "unknown";
}

Basis::Basis(BasisSpec spec) : spec_(std::move(spec)) {
  order_ = column_order(spec_);
  if (spec_.family == Family::RandomFourierFeatures || spec_.family == Family::RandomReluFeatures)
    weights_ = FeatureWeights::generate(spec_.column_budget, spec_.input_dim, spec_.seed);
  if (spec_.family == Family::ClusterIsing)
    clusters_ = enumerate_clusters(spec_.params.chain_length, spec_.params.max_cluster_order);
}

void Basis::check_points(const PointSet& points) const {
  if (points.cols() != spec_.input_dim)
    throw InvalidInput("points have " + std::to_string(points.cols()) +
                       " coordinates, basis expects " + std::to_string(spec_.input_dim));
  if (!points.allFinite()) throw InvalidInput("points contain non-finite coordinates");
  const auto& p = spec_.params;
  switch (spec_.family) {
    case Family::Monomial:
    case Family::Chebyshev:
    case Family::Legendre:
      if (points.size() && (points.minCoeff() < p.interval_lo || points.maxCoeff() > p.interval_hi))
        throw InvalidInput("point outside the polynomial interval");
      break;
    case Family::FourierDiscrete:
      if (points.size() && (points.minCoeff() < 0.0 || points.maxCoeff() > p.period))
        throw InvalidInput("point outside [0, period]");
      break;
    case Family::ClusterIsing:
      for (Index i = 0; i < points.size(); ++i) {
        const double s = points.data()[i];
        if (s != 1.0 && s != -1.0) throw InvalidInput("spin coordinates must be +1 or -1");
      }
      break;
    default:
      break;
  }
}

template <FieldScalar S>
Mat<S> Basis::evaluate_as(const PointSet& points, ColumnRange range) const {
  const Index rows = points.rows();
  const Index cols = range.hi - range.lo;
  Mat<S> out(rows, cols);
  const auto& p = spec_.params;
  switch (spec_.family) {
    case Family::Monomial:
    case Family::Chebyshev:
    case Family::Legendre: {
      Index max_degree = 0;
      for (Index j = 0; j < cols; ++j) max_degree = std::max(max_degree, order_[range.lo + j]);
      for (Index i = 0; i < rows; ++i) {
        const double x = points(i, 0);
        std::vector<double> values;
        if (spec_.family == Family::Legendre) {
          values = legendre_values(x, max_degree);
        } else if (spec_.family == Family::Chebyshev) {
          values = chebyshev_values(x, max_degree);
        } else {
          values.assign(static_cast<std::size_t>(max_degree + 1), 1.0);
          for (Index k = 1; k <= max_degree; ++k) values[k] = values[k - 1] * x;
        }
        for (Index j = 0; j < cols; ++j) out(i, j) = values[order_[range.lo + j]];
      }
      break;
    }
    case Family::FourierDiscrete:
      if constexpr (std::is_same_v<S, Complex>) {
        for (Index j = 0; j < cols; ++j) {
          const double freq =
              static_cast<double>(fourier_frequency(order_[range.lo + j], p.fourier_n));
          for (Index i = 0; i < rows; ++i) {
            // Reduce the phase to one cycle before scaling by 2 pi so that
            // aliased frequencies produce bit-identical columns at dyadic points.
            double cycles = std::fmod(freq * points(i, 0) / p.period, 1.0);
            if (cycles < 0.0) cycles += 1.0;
            out(i, j) = std::polar(1.0, 2.0 * std::numbers::pi * cycles);
          }
        }
      }
      break;
    case Family::RandomFourierFeatures:
      if constexpr (std::is_same_v<S, Complex>) {
        for (Index j = 0; j < cols; ++j) {
          const auto v = weights_.vectors.row(order_[range.lo + j]).transpose();
          const RealVector proj = points * v;
          for (Index i = 0; i < rows; ++i) out(i, j) = std::polar(1.0, std::numbers::pi * proj(i));
        }
      }
      break;
    case Family::RandomReluFeatures:
      if constexpr (std::is_same_v<S, double>) {
        for (Index j = 0; j < cols; ++j) {
          const auto v = weights_.vectors.row(order_[range.lo + j]).transpose();
          out.col(j) = (points * v).cwiseMax(0.0);
        }
      }
      break;
    case Family::ClusterIsing:
      if constexpr (std::is_same_v<S, double>) {
        for (Index i = 0; i < rows; ++i) {
          std::uint32_t down = 0;
          for (Index s = 0; s < points.cols(); ++s)
            if (points(i, s) < 0.0) down |= std::uint32_t{1} << s;
          for (Index j = 0; j < cols; ++j) {
            const auto& c = clusters_[static_cast<std::size_t>(order_[range.lo + j])];
            out(i, j) = (std::popcount(down & c.mask) % 2) ? -1.0 : 1.0;
          }
        }
      }
      break;
  }
  return out;
}

Matrix Basis::evaluate(const PointSet& points, ColumnRange range) const {
  if (range.lo < 0 || range.hi < range.lo)
    throw InvalidInput("invalid column range");
  if (range.hi > spec_.column_budget)
    throw BudgetExceeded("column range [" + std::to_string(range.lo) + ", " +
                         std::to_string(range.hi) + ") exceeds budget " +
                         std::to_string(spec_.column_budget));
  check_points(points);
  if (field() == Field::Complex) return Matrix(evaluate_as<Complex>(points, range));
  return Matrix(evaluate_as<double>(points, range));
}

Matrix evaluate_columns(const BasisSpec& spec, const PointSet& points, ColumnRange range) {
  return Basis(spec).evaluate(points, range);
}

}  // namespace gadkit::bases
