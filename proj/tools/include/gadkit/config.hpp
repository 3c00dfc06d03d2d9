#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gadkit/bases.hpp"
#include "gadkit/datasets.hpp"
#include "gadkit/decomposition.hpp"
#include "gadkit/designs.hpp"
#include "gadkit/error.hpp"

/// Run configuration for the batch CLI and its text format.
///
/// The file is flat `key = value` lines grouped under `[section]` headers.
/// Blank lines and lines starting with `#` or `;` are ignored. Lists are
/// comma separated. Every key belongs to exactly one section; unknown keys,
/// repeated keys and missing required keys are errors.
namespace gadkit::experiments {

enum class Experiment { Sweep, FourierCheck, GaussCompare, RidgeSweep, IsingSweep, UnstructuredEB };
enum class DatasetFormat { None, Idx, Cifar };

/// Names the offending key as `section.key`; `line` is 0 when the problem is
/// not tied to one line (missing keys, cross-field checks).
class ConfigError : public InvalidInput {
 public:
  ConfigError(std::string key, int line, const std::string& message);
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

struct DesignConfig {
  designs::Strategy strategy = designs::Strategy::UniformInterval;
  Index n = 1;
  Index grid_size = 0;  // 0: strategy default
  double interval_lo = -1.0;
  double interval_hi = 1.0;
  designs::SpinRowOrder row_order = designs::SpinRowOrder::PeriodThenLexicographic;
  std::string dataset_path;
  DatasetFormat dataset_format = DatasetFormat::None;
  Index dataset_max_items = 10000;
  datasets::ScalePolicy scale = datasets::ScalePolicy::UnitInterval;

  bool operator==(const DesignConfig&) const = default;
};

struct GaussCompareConfig {
  Index m = 50;
  std::vector<Index> n_values;

  bool operator==(const GaussCompareConfig&) const = default;
};

struct UnstructuredConfig {
  Index draws = 2000;
  std::vector<Index> m_values;

  bool operator==(const UnstructuredConfig&) const = default;
};

/// `basis.seed`, `basis.ordering_seed`, `theta.seed` and `theta.length` are
/// not read from the file: seeds derive from the master seed and the theta
/// length is the column budget.
struct RunConfig {
  Experiment experiment = Experiment::Sweep;
  std::optional<std::uint64_t> seed;
  double rel_tol = linalg::kDefaultRelTol;
  int threads = 1;
  std::string output_dir = "out";

  bases::BasisSpec basis;
  DesignConfig design;
  designs::ParameterSpec theta;
  decomposition::ModelRange m_range;
  std::vector<double> lambdas{0.0};
  GaussCompareConfig gauss_compare;
  UnstructuredConfig unstructured;

  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(std::string_view text);

/// Canonical text form; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

/// Cross-field checks; throws ConfigError.
void validate(const RunConfig& config);

std::string_view to_string(Experiment experiment);
std::string_view to_string(DatasetFormat format);

}  // namespace gadkit::experiments
