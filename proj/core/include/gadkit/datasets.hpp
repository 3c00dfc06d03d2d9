#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "gadkit/matrix.hpp"

/// Raw image datasets as unlabeled point clouds. Labels are never read into
/// the analysis path.
namespace gadkit::datasets {

enum class Source { Idx, CifarBin, Synthetic };
enum class ScalePolicy { RawBytes, UnitInterval };

struct PointCloud {
  PointSet points;  // one row per item
  Source source = Source::Synthetic;
  Index dim = 0;
  ScalePolicy scale_policy = ScalePolicy::UnitInterval;

  Index size() const { return points.rows(); }
};

inline constexpr Index kCifarRecordBytes = 3073;
inline constexpr Index kCifarPixels = 3072;

/// IDX file: 0x00 0x00, type byte 0x08 (unsigned byte), dimension count, then
/// big-endian uint32 sizes and the payload. Items are the first dimension,
/// flattened row-major.
PointCloud load_idx(const std::filesystem::path& path, Index max_items,
                    ScalePolicy policy = ScalePolicy::UnitInterval);

/// CIFAR-10 binary: 3073-byte records of one label byte and 3072 pixels.
PointCloud load_cifar_bin(const std::filesystem::path& path, Index max_items,
                          ScalePolicy policy = ScalePolicy::UnitInterval);

void write_idx(const std::filesystem::path& path, std::span<const std::uint32_t> dims,
               std::span<const std::uint8_t> payload);

/// Each record is a label byte followed by kCifarPixels pixel bytes.
void write_cifar_bin(const std::filesystem::path& path, std::span<const std::uint8_t> labels,
                     std::span<const std::uint8_t> pixels);

/// `count` points uniform on the sphere of radius sqrt(dim).
PointCloud sphere_cloud(Index dim, Index count, std::uint64_t seed);

std::string_view to_string(Source source);
std::string_view to_string(ScalePolicy policy);

}  // namespace gadkit::datasets
