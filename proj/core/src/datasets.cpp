#include "gadkit/datasets.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <random>

namespace gadkit::datasets {

namespace {

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_all(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

double scale(std::uint8_t b, ScalePolicy policy) {
  return policy == ScalePolicy::UnitInterval ? static_cast<double>(b) / 255.0
                                             : static_cast<double>(b);
}

}  // namespace

PointCloud load_idx(const std::filesystem::path& path, Index max_items, ScalePolicy policy) {
  const auto bytes = read_all(path);
  if (bytes.size() < 4) throw FormatError("IDX header truncated", bytes.size());
  if (bytes[0] != 0 || bytes[1] != 0) throw FormatError("bad IDX magic", 0);
  if (bytes[2] != 0x08) throw FormatError("unsupported IDX element type", 2);
  const std::size_t ndims = bytes[3];
  if (ndims == 0) throw FormatError("IDX file declares zero dimensions", 3);
  const std::size_t header = 4 + 4 * ndims;
  if (bytes.size() < header) throw FormatError("IDX dimension table truncated", bytes.size());

  std::vector<std::uint64_t> dims(ndims);
  for (std::size_t d = 0; d < ndims; ++d) {
    const std::size_t o = 4 + 4 * d;
    dims[d] = (std::uint64_t{bytes[o]} << 24) | (std::uint64_t{bytes[o + 1]} << 16) |
              (std::uint64_t{bytes[o + 2]} << 8) | std::uint64_t{bytes[o + 3]};
  }
  std::uint64_t item_size = 1;
  for (std::size_t d = 1; d < ndims; ++d) item_size *= dims[d];
  const std::uint64_t expected = header + dims[0] * item_size;
  if (bytes.size() < expected) throw FormatError("IDX payload truncated", bytes.size());
  if (bytes.size() > expected) throw FormatError("IDX payload longer than declared", expected);

  const Index items = std::min<Index>(std::max<Index>(max_items, 0), static_cast<Index>(dims[0]));
  PointCloud cloud;
  cloud.source = Source::Idx;
  cloud.dim = static_cast<Index>(item_size);
  cloud.scale_policy = policy;
  cloud.points.resize(items, cloud.dim);
  for (Index i = 0; i < items; ++i)
    for (Index c = 0; c < cloud.dim; ++c)
      cloud.points(i, c) = scale(bytes[header + static_cast<std::size_t>(i * cloud.dim + c)], policy);
  return cloud;
}

PointCloud load_cifar_bin(const std::filesystem::path& path, Index max_items, ScalePolicy policy) {
  const auto bytes = read_all(path);
  const auto record = static_cast<std::size_t>(kCifarRecordBytes);
  if (bytes.size() % record != 0)
    throw FormatError("CIFAR file length is not a multiple of 3073",
                      bytes.size() - bytes.size() % record);
  const Index records = static_cast<Index>(bytes.size() / record);
  const Index items = std::min<Index>(std::max<Index>(max_items, 0), records);
  PointCloud cloud;
  cloud.source = Source::CifarBin;
  cloud.dim = kCifarPixels;
  cloud.scale_policy = policy;
  cloud.points.resize(items, kCifarPixels);
  for (Index i = 0; i < items; ++i) {
    // Skip the label byte.
    const std::size_t base = static_cast<std::size_t>(i) * record + 1;
    for (Index c = 0; c < kCifarPixels; ++c)
      cloud.points(i, c) = scale(bytes[base + static_cast<std::size_t>(c)], policy);
  }
  return cloud;
}

void write_idx(const std::filesystem::path& path, std::span<const std::uint32_t> dims,
               std::span<const std::uint8_t> payload) {
  if (dims.empty() || dims.size() > 255) throw InvalidInput("IDX needs 1..255 dimensions");
  std::vector<std::uint8_t> bytes{0, 0, 0x08, static_cast<std::uint8_t>(dims.size())};
  for (const auto d : dims) {
    bytes.push_back(static_cast<std::uint8_t>(d >> 24));
    bytes.push_back(static_cast<std::uint8_t>(d >> 16));
    bytes.push_back(static_cast<std::uint8_t>(d >> 8));
    bytes.push_back(static_cast<std::uint8_t>(d));
  }
  bytes.insert(bytes.end(), payload.begin(), payload.end());
  write_all(path, bytes);
}

void write_cifar_bin(const std::filesystem::path& path, std::span<const std::uint8_t> labels,
                     std::span<const std::uint8_t> pixels) {
  if (pixels.size() != labels.size() * static_cast<std::size_t>(kCifarPixels))
    throw InvalidInput("pixel count must be 3072 per label");
  std::vector<std::uint8_t> bytes;
  bytes.reserve(labels.size() * static_cast<std::size_t>(kCifarRecordBytes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    bytes.push_back(labels[i]);
    const auto row = pixels.subspan(i * kCifarPixels, kCifarPixels);
    bytes.insert(bytes.end(), row.begin(), row.end());
  }
  write_all(path, bytes);
}

PointCloud sphere_cloud(Index dim, Index count, std::uint64_t seed) {
  if (dim < 1) throw InvalidInput("sphere dimension must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  PointCloud cloud;
  cloud.dim = dim;
  cloud.points.resize(count, dim);
  const double radius = std::sqrt(static_cast<double>(dim));
  for (Index i = 0; i < count; ++i) {
    double norm = 0.0;
    do {
      for (Index c = 0; c < dim; ++c) cloud.points(i, c) = normal(rng);
      norm = cloud.points.row(i).norm();
    } while (norm == 0.0);
    cloud.points.row(i) *= radius / norm;
  }
  return cloud;
}

std::string_view to_string(Source source) {
  switch (source) {
    case Source::Idx: return "idx";
    case Source::CifarBin: return "cifar";
    case Source::Synthetic: return "synthetic";
  }
  return "unknown";
}

std::string_view to_string(ScalePolicy policy) {
  return policy == ScalePolicy::UnitInterval ? "unit" : "raw";
}

}  // namespace gadkit::datasets
