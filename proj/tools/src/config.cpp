#include "gadkit/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <system_error>

namespace gadkit::experiments {

namespace {

// Thrown by value parsers; the caller attaches key and line.
struct BadValue {
  std::string message;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_integer(std::string_view s) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw BadValue{"expected an integer, got '" + std::string(s) + "'"};
  return value;
}

double parse_double(std::string_view s) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw BadValue{"expected a number, got '" + std::string(s) + "'"};
  if (!std::isfinite(value)) throw BadValue{"value must be finite"};
  return value;
}

bool parse_bool(std::string_view s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw BadValue{"expected true or false, got '" + std::string(s) + "'"};
}

template <typename F>
auto parse_list(std::string_view s, F parse_one) {
  std::vector<decltype(parse_one(s))> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    const auto item = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    if (item.empty()) throw BadValue{"empty list item"};
    out.push_back(parse_one(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename E>
E parse_enum(std::string_view s, std::initializer_list<E> options) {
  std::string allowed;
  for (E e : options) {
    if (to_string(e) == s) return e;
    allowed += (allowed.empty() ? "" : ", ") + std::string(to_string(e));
  }
  throw BadValue{"unknown value '" + std::string(s) + "' (allowed: " + allowed + ")"};
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T, typename F>
std::string join(const std::vector<T>& values, F format) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format(values[i]);
  }
  return out;
}

std::string format_index(Index v) { return std::to_string(v); }

using designs::Strategy;
using bases::Family;

constexpr std::initializer_list<Experiment> kExperiments = {
    Experiment::Sweep,      Experiment::FourierCheck, Experiment::GaussCompare,
    Experiment::RidgeSweep, Experiment::IsingSweep,   Experiment::UnstructuredEB};
constexpr std::initializer_list<Family> kFamilies = {
    Family::Monomial, Family::Chebyshev, Family::Legendre, Family::FourierDiscrete,
    Family::RandomFourierFeatures, Family::RandomReluFeatures, Family::ClusterIsing};
constexpr std::initializer_list<bases::Ordering> kOrderings = {
    bases::Ordering::Natural, bases::Ordering::SeededPermutation,
    bases::Ordering::PhysicalClusterOrder};
constexpr std::initializer_list<Strategy> kStrategies = {
    Strategy::UniformInterval, Strategy::Equispaced, Strategy::LegendreGauss,
    Strategy::SphereUniform,   Strategy::FromDataset, Strategy::SpinConfigurations};
constexpr std::initializer_list<designs::SpinRowOrder> kRowOrders = {
    designs::SpinRowOrder::PeriodThenLexicographic, designs::SpinRowOrder::SeededPermutation};
constexpr std::initializer_list<DatasetFormat> kFormats = {DatasetFormat::None, DatasetFormat::Idx,
                                                           DatasetFormat::Cifar};
constexpr std::initializer_list<datasets::ScalePolicy> kScales = {
    datasets::ScalePolicy::RawBytes, datasets::ScalePolicy::UnitInterval};
constexpr std::initializer_list<designs::ThetaScheme> kSchemes = {
    designs::ThetaScheme::UnstructuredIid, designs::ThetaScheme::PowerDecay,
    designs::ThetaScheme::Explicit};

struct Key {
  std::string section;
  std::string name;
  bool required;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::optional<std::string>(const RunConfig&)> get;

  std::string full() const { return section + "." + name; }
};

#define GADKIT_FIELD(sec, key, req, member, parse, format)                                        \
  Key {                                                                                           \
    sec, key, req, [](RunConfig& c, std::string_view v) { c.member = parse; },                    \
        [](const RunConfig& c) -> std::optional<std::string> { return format; }                   \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      GADKIT_FIELD("run", "experiment", true, experiment, parse_enum(v, kExperiments),
                   std::string(to_string(c.experiment))),
      Key{"run", "seed", false,
          [](RunConfig& c, std::string_view v) { c.seed = parse_integer<std::uint64_t>(v); },
          [](const RunConfig& c) -> std::optional<std::string> {
            if (!c.seed) return std::nullopt;
            return std::to_string(*c.seed);
          }},
      GADKIT_FIELD("run", "rel_tol", false, rel_tol, parse_double(v), format_double(c.rel_tol)),
      GADKIT_FIELD("run", "threads", false, threads, parse_integer<int>(v),
                   std::to_string(c.threads)),
      GADKIT_FIELD("run", "output_dir", false, output_dir, std::string(v), c.output_dir),

      GADKIT_FIELD("basis", "family", true, basis.family, parse_enum(v, kFamilies),
                   std::string(bases::to_string(c.basis.family))),
      GADKIT_FIELD("basis", "input_dim", false, basis.input_dim, parse_integer<Index>(v),
                   format_index(c.basis.input_dim)),
      GADKIT_FIELD("basis", "budget", true, basis.column_budget, parse_integer<Index>(v),
                   format_index(c.basis.column_budget)),
      GADKIT_FIELD("basis", "ordering", false, basis.ordering, parse_enum(v, kOrderings),
                   std::string(bases::to_string(c.basis.ordering))),
      GADKIT_FIELD("basis", "interval_lo", false, basis.params.interval_lo, parse_double(v),
                   format_double(c.basis.params.interval_lo)),
      GADKIT_FIELD("basis", "interval_hi", false, basis.params.interval_hi, parse_double(v),
                   format_double(c.basis.params.interval_hi)),
      GADKIT_FIELD("basis", "period", false, basis.params.period, parse_double(v),
                   format_double(c.basis.params.period)),
      GADKIT_FIELD("basis", "fourier_n", false, basis.params.fourier_n, parse_integer<Index>(v),
                   format_index(c.basis.params.fourier_n)),
      GADKIT_FIELD("basis", "chain_length", false, basis.params.chain_length,
                   parse_integer<Index>(v), format_index(c.basis.params.chain_length)),
      GADKIT_FIELD("basis", "max_cluster_order", false, basis.params.max_cluster_order,
                   parse_integer<Index>(v), format_index(c.basis.params.max_cluster_order)),

      GADKIT_FIELD("design", "strategy", true, design.strategy, parse_enum(v, kStrategies),
                   std::string(designs::to_string(c.design.strategy))),
      GADKIT_FIELD("design", "n", true, design.n, parse_integer<Index>(v),
                   format_index(c.design.n)),
      GADKIT_FIELD("design", "grid_size", false, design.grid_size, parse_integer<Index>(v),
                   format_index(c.design.grid_size)),
      GADKIT_FIELD("design", "interval_lo", false, design.interval_lo, parse_double(v),
                   format_double(c.design.interval_lo)),
      GADKIT_FIELD("design", "interval_hi", false, design.interval_hi, parse_double(v),
                   format_double(c.design.interval_hi)),
      GADKIT_FIELD("design", "row_order", false, design.row_order, parse_enum(v, kRowOrders),
                   std::string(to_string(c.design.row_order))),
      GADKIT_FIELD("design", "dataset_path", false, design.dataset_path, std::string(v),
                   c.design.dataset_path),
      GADKIT_FIELD("design", "dataset_format", false, design.dataset_format,
                   parse_enum(v, kFormats), std::string(to_string(c.design.dataset_format))),
      GADKIT_FIELD("design", "dataset_max_items", false, design.dataset_max_items,
                   parse_integer<Index>(v), format_index(c.design.dataset_max_items)),
      GADKIT_FIELD("design", "scale", false, design.scale, parse_enum(v, kScales),
                   std::string(datasets::to_string(c.design.scale))),

      GADKIT_FIELD("theta", "scheme", false, theta.scheme, parse_enum(v, kSchemes),
                   std::string(designs::to_string(c.theta.scheme))),
      GADKIT_FIELD("theta", "variance", false, theta.variance, parse_double(v),
                   format_double(c.theta.variance)),
      GADKIT_FIELD("theta", "scale", false, theta.scale, parse_double(v),
                   format_double(c.theta.scale)),
      GADKIT_FIELD("theta", "exponent", false, theta.exponent, parse_double(v),
                   format_double(c.theta.exponent)),
      GADKIT_FIELD("theta", "random_signs", false, theta.random_signs, parse_bool(v),
                   std::string(c.theta.random_signs ? "true" : "false")),
      GADKIT_FIELD("theta", "values", false, theta.values, parse_list(v, parse_double),
                   join(c.theta.values, format_double)),

      GADKIT_FIELD("sweep", "m_min", false, m_range.first, parse_integer<Index>(v),
                   format_index(c.m_range.first)),
      GADKIT_FIELD("sweep", "m_max", true, m_range.last, parse_integer<Index>(v),
                   format_index(c.m_range.last)),
      GADKIT_FIELD("sweep", "m_step", false, m_range.step, parse_integer<Index>(v),
                   format_index(c.m_range.step)),
      Key{"sweep", "lambda", false,
          [](RunConfig& c, std::string_view v) {
            c.lambdas = parse_list(v, parse_double);
          },
          [](const RunConfig& c) -> std::optional<std::string> {
            return join(c.lambdas, format_double);
          }},

      GADKIT_FIELD("gauss_compare", "m", false, gauss_compare.m, parse_integer<Index>(v),
                   format_index(c.gauss_compare.m)),
      GADKIT_FIELD("gauss_compare", "n_values", false, gauss_compare.n_values,
                   parse_list(v, parse_integer<Index>), join(c.gauss_compare.n_values, format_index)),

      GADKIT_FIELD("unstructured", "draws", false, unstructured.draws, parse_integer<Index>(v),
                   format_index(c.unstructured.draws)),
      GADKIT_FIELD("unstructured", "m_values", false, unstructured.m_values,
                   parse_list(v, parse_integer<Index>), join(c.unstructured.m_values, format_index)),
  };
  return table;
}

#undef GADKIT_FIELD

void fail(const std::string& key, const std::string& message) { throw ConfigError(key, 0, message); }

void check(bool ok, const std::string& key, const std::string& message) {
  if (!ok) fail(key, message);
}

}  // namespace

ConfigError::ConfigError(std::string key, int line, const std::string& message)
    : InvalidInput((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + "'" + key +
                   "': " + message),
      key_(std::move(key)),
      line_(line) {}

std::string_view to_string(Experiment experiment) {
  switch (experiment) {
    case Experiment::Sweep: return "sweep";
    case Experiment::FourierCheck: return "fourier_check";
    case Experiment::GaussCompare: return "gauss_compare";
    case Experiment::RidgeSweep: return "ridge_sweep";
    case Experiment::IsingSweep: return "ising_sweep";
    case Experiment::UnstructuredEB: return "unstructured_eb";
  }
  return "unknown";
}

std::string_view to_string(DatasetFormat format) {
  switch (format) {
    case DatasetFormat::None: return "none";
    case DatasetFormat::Idx: return "idx";
    case DatasetFormat::Cifar: return "cifar";
  }
  return "unknown";
}

void validate(const RunConfig& c) {
  check(c.rel_tol > 0.0 && c.rel_tol < 1.0, "run.rel_tol", "must lie in (0, 1)");
  check(c.threads >= 1 && c.threads <= 1024, "run.threads", "must lie in [1, 1024]");
  check(!c.output_dir.empty(), "run.output_dir", "must not be empty");

  const auto& b = c.basis;
  const Index budget = b.column_budget;
  check(budget >= 1, "basis.budget", "must be >= 1");
  check(b.input_dim >= 1, "basis.input_dim", "must be >= 1");
  check(b.params.interval_lo < b.params.interval_hi, "basis.interval_lo",
        "must be < basis.interval_hi");
  if (b.family == Family::Chebyshev || b.family == Family::Legendre)
    check(b.params.interval_lo >= -1.0 && b.params.interval_hi <= 1.0, "basis.interval_lo",
          "orthogonal polynomials need an interval inside [-1, 1]");
  check(b.params.period > 0.0, "basis.period", "must be > 0");
  if (b.family == Family::FourierDiscrete)
    check(b.params.fourier_n >= 1, "basis.fourier_n", "must be >= 1 for the fourier family");
  if (b.ordering == bases::Ordering::PhysicalClusterOrder)
    check(b.family == Family::ClusterIsing, "basis.ordering",
          "physical ordering applies to cluster_ising only");
  if (b.family == Family::ClusterIsing) {
    check(b.params.chain_length >= 1 && b.params.chain_length <= 20, "basis.chain_length",
          "must lie in [1, 20]");
    check(b.input_dim == b.params.chain_length, "basis.input_dim", "must equal chain_length");
    check(b.params.max_cluster_order >= -1, "basis.max_cluster_order", "must be >= -1");
    const Index available = bases::available_functions(b);
    check(budget <= available, "basis.budget",
          "exceeds the " + std::to_string(available) + " available clusters");
  }

  const auto& d = c.design;
  check(d.n >= 1, "design.n", "must be >= 1");
  check(d.grid_size >= 0, "design.grid_size", "must be >= 0 (0 picks the strategy default)");
  check(d.interval_lo < d.interval_hi, "design.interval_lo", "must be < design.interval_hi");
  check(d.dataset_max_items >= 1, "design.dataset_max_items", "must be >= 1");
  switch (d.strategy) {
    case Strategy::UniformInterval:
    case Strategy::Equispaced:
    case Strategy::LegendreGauss:
      check(b.input_dim == 1, "basis.input_dim", "interval designs need input_dim = 1");
      break;
    case Strategy::SphereUniform: break;
    case Strategy::FromDataset:
      check(!d.dataset_path.empty(), "design.dataset_path", "required for dataset designs");
      check(d.dataset_format != DatasetFormat::None, "design.dataset_format",
            "required for dataset designs");
      break;
    case Strategy::SpinConfigurations:
      check(b.family == Family::ClusterIsing, "design.strategy",
            "spin designs need the cluster_ising family");
      if (b.family == Family::ClusterIsing)
        check(d.n < (Index{1} << b.params.chain_length), "design.n",
              "must be smaller than 2^chain_length");
      break;
  }

  check(c.m_range.first >= 1, "sweep.m_min", "must be >= 1");
  check(c.m_range.step >= 1, "sweep.m_step", "must be >= 1");
  check(c.m_range.last >= c.m_range.first, "sweep.m_max", "must be >= sweep.m_min");
  check(c.m_range.last <= budget, "sweep.m_max", "exceeds basis.budget");
  check(!c.lambdas.empty(), "sweep.lambda", "needs at least one value");
  for (double l : c.lambdas) check(l >= 0.0, "sweep.lambda", "must be >= 0");

  const auto& t = c.theta;
  check(t.variance >= 0.0, "theta.variance", "must be >= 0");
  if (t.scheme == designs::ThetaScheme::Explicit)
    check(static_cast<Index>(t.values.size()) == budget, "theta.values",
          "needs exactly basis.budget values");

  switch (c.experiment) {
    case Experiment::Sweep:
    case Experiment::RidgeSweep: break;
    case Experiment::FourierCheck: {
      check(b.family == Family::FourierDiscrete, "basis.family", "fourier_check needs fourier");
      check(b.ordering == bases::Ordering::Natural, "basis.ordering",
            "fourier_check needs the natural ordering");
      check(d.strategy == Strategy::Equispaced, "design.strategy",
            "fourier_check needs equispaced points");
      check(d.n == b.params.fourier_n, "design.n", "must equal basis.fourier_n");
      check(d.interval_lo == 0.0 && d.interval_hi == b.params.period, "design.interval_lo",
            "fourier_check samples [0, period)");
      check(budget > b.params.fourier_n, "basis.budget", "must exceed basis.fourier_n");
      break;
    }
    case Experiment::GaussCompare: {
      const auto& g = c.gauss_compare;
      check(b.family == Family::Legendre, "basis.family", "gauss_compare needs legendre");
      check(b.params.interval_lo == -1.0 && b.params.interval_hi == 1.0, "basis.interval_lo",
            "gauss_compare uses [-1, 1]");
      check(d.interval_lo == -1.0 && d.interval_hi == 1.0, "design.interval_lo",
            "gauss_compare uses [-1, 1]");
      check(g.m >= 1 && g.m < budget, "gauss_compare.m", "must lie in [1, basis.budget)");
      check(!g.n_values.empty(), "gauss_compare.n_values", "needs at least one value");
      for (Index n : g.n_values) check(n >= 1, "gauss_compare.n_values", "values must be >= 1");
      break;
    }
    case Experiment::IsingSweep:
      check(b.family == Family::ClusterIsing, "basis.family", "ising_sweep needs cluster_ising");
      check(d.strategy == Strategy::SpinConfigurations, "design.strategy",
            "ising_sweep needs spin");
      break;
    case Experiment::UnstructuredEB: {
      const auto& u = c.unstructured;
      check(t.scheme == designs::ThetaScheme::UnstructuredIid, "theta.scheme",
            "unstructured_eb needs iid");
      check(u.draws >= 1, "unstructured.draws", "must be >= 1");
      check(!u.m_values.empty(), "unstructured.m_values", "needs at least one value");
      for (Index m : u.m_values)
        check(m >= 1 && m <= budget, "unstructured.m_values", "values must lie in [1, budget]");
      break;
    }
  }
}

RunConfig parse_config_text(std::string_view text) {
  std::map<std::string, const Key*, std::less<>> lookup;
  for (const auto& k : keys()) lookup[k.full()] = &k;

  RunConfig config;
  std::map<std::string, int> seen;
  std::set<std::string> sections;
  for (const auto& k : keys()) sections.insert(k.section);

  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    const auto raw = text.substr(pos, end == std::string_view::npos ? text.npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("[" + std::string(line), line_no, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!sections.count(section)) throw ConfigError(section, line_no, "unknown section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(std::string(line), line_no, "expected 'key = value'");
    const std::string name(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(name, line_no, "key outside any section");
    const std::string full = section + "." + name;
    const auto it = lookup.find(full);
    if (it == lookup.end()) throw ConfigError(full, line_no, "unknown key");
    if (seen.count(full))
      throw ConfigError(full, line_no,
                        "repeated key (first set on line " + std::to_string(seen[full]) + ")");
    seen[full] = line_no;
    try {
      it->second->set(config, value);
    } catch (const BadValue& e) {
      throw ConfigError(full, line_no, e.message);
    }
  }

  for (const auto& k : keys())
    if (k.required && !seen.count(k.full())) throw ConfigError(k.full(), 0, "missing required key");

  config.theta.length = config.basis.column_budget;
  try {
    validate(config);
  } catch (const ConfigError& e) {
    const auto it = seen.find(e.key());
    if (it == seen.end()) throw;
    std::string message = e.what();
    message = message.substr(message.find("': ") + 3);
    throw ConfigError(e.key(), it->second, message);
  }
  return config;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  std::string section;
  for (const auto& k : keys()) {
    const auto value = k.get(config);
    if (!value) continue;
    if (k.section != section) {
      if (!section.empty()) out += '\n';
      section = k.section;
      out += "[" + section + "]\n";
    }
    out += k.name + " = " + *value + "\n";
  }
  return out;
}

}  // namespace gadkit::experiments
