#include "gadkit/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <random>

#include "gadkit/bases.hpp"
#include "gadkit/datasets.hpp"
#include "gadkit/designs.hpp"
#include "gadkit/linalg.hpp"

#ifndef GADKIT_VERSION
#define GADKIT_VERSION "0.0.0"
#endif

namespace gadkit::experiments {

namespace {

using decomposition::SweepRecord;
using json = nlohmann::ordered_json;

constexpr Index kFullScaleN = 1000;
constexpr Index kFullScaleBudget = 6000;

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

std::vector<double> column(const std::vector<SweepRecord>& records, double SweepRecord::*field) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.*field);
  return out;
}

std::size_t count_failed(const std::vector<SweepRecord>& records) {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.error.empty(); }));
}

// Index of the largest finite value; records.size() if there is none.
std::size_t argmax(const std::vector<double>& values) {
  std::size_t best = values.size();
  for (std::size_t i = 0; i < values.size(); ++i)
    if (std::isfinite(values[i]) && (best == values.size() || values[i] > values[best])) best = i;
  return best;
}

bases::BasisSpec basis_spec(const RunConfig& c, const SeedPlan& s) {
  auto b = c.basis;
  b.seed = s.features;
  b.ordering_seed = s.ordering;
  return b;
}

designs::ParameterSpec theta_spec(const RunConfig& c, const SeedPlan& s) {
  auto t = c.theta;
  t.length = c.basis.column_budget;
  t.seed = s.theta;
  return t;
}

std::shared_ptr<const datasets::PointCloud> load_dataset(const RunConfig& c) {
  const auto& d = c.design;
  if (d.strategy != designs::Strategy::FromDataset) return nullptr;
  auto cloud = d.dataset_format == DatasetFormat::Idx
                   ? datasets::load_idx(d.dataset_path, d.dataset_max_items, d.scale)
                   : datasets::load_cifar_bin(d.dataset_path, d.dataset_max_items, d.scale);
  return std::make_shared<const datasets::PointCloud>(std::move(cloud));
}

designs::DesignParams design_params(const RunConfig& c, const SeedPlan& s) {
  designs::DesignParams p;
  p.strategy = c.design.strategy;
  p.n = c.design.n;
  p.grid_size = c.design.grid_size;
  p.input_dim = c.basis.input_dim;
  p.interval_lo = c.design.interval_lo;
  p.interval_hi = c.design.interval_hi;
  p.seed = s.design;
  p.spin_row_order = c.design.row_order;
  p.dataset = load_dataset(c);
  return p;
}

json describe(const designs::SampleDesign& d) {
  return json{{"strategy", designs::to_string(d.strategy)},
              {"train_rows", d.train_count()},
              {"prediction_rows", d.prediction_count()},
              {"seed_used", d.seed},
              {"seed_retries", d.seed_retries}};
}

decomposition::SweepOptions sweep_options(const RunConfig& c, double lambda) {
  decomposition::SweepOptions o;
  o.range = c.m_range;
  o.ridge.lambda = lambda;
  o.rel_tol = c.rel_tol;
  o.threads = c.threads;
  return o;
}

json sweep_summary(const std::vector<SweepRecord>& records, double lambda, Index n) {
  const auto pinv = column(records, &SweepRecord::norm_pinv_TM);
  const auto risk = column(records, &SweepRecord::risk_all);
  const std::size_t peak = argmax(pinv);
  const std::size_t best = [&] {
    std::size_t b = risk.size();
    for (std::size_t i = 0; i < risk.size(); ++i)
      if (std::isfinite(risk[i]) && (b == risk.size() || risk[i] < risk[b])) b = i;
    return b;
  }();
  json out{{"lambda", lambda}, {"steps", records.size()}, {"failed_steps", count_failed(records)}};
  if (peak < records.size()) {
    out["argmax_norm_pinv_TM_m"] = records[peak].m;
    out["max_norm_pinv_TM"] = pinv[peak];
  }
  if (best < records.size()) {
    out["argmin_risk_all_m"] = records[best].m;
    out["min_risk_all"] = risk[best];
  }
  out["norm_M_TU_nonincreasing"] = nonincreasing(column(records, &SweepRecord::norm_M_TU));
  out["nescience_error_nonincreasing"] =
      nonincreasing(column(records, &SweepRecord::nescience_error));
  if (lambda == 0.0) {
    out["bias_error_nondecreasing"] = nondecreasing(column(records, &SweepRecord::bias_error));
  } else {
    const double bound = 1.0 / std::sqrt(static_cast<double>(n) * lambda);
    const bool holds = std::all_of(records.begin(), records.end(), [&](const auto& r) {
      return !(r.norm_pinv_TM > bound * (1.0 + 1e-9));
    });
    out["norm_pinv_TM_bound"] = bound;
    out["norm_pinv_TM_bound_holds"] = holds;
  }
  return out;
}

std::vector<SweepRecord> run_lambdas(const RunConfig& c, const Matrix& full, Index n,
                                     const RealVector& theta, json& per_lambda) {
  std::vector<SweepRecord> all;
  per_lambda = json::array();
  for (double lambda : c.lambdas) {
    auto records = decomposition::sweep_matrix(full, n, theta, sweep_options(c, lambda));
    per_lambda.push_back(sweep_summary(records, lambda, n));
    all.insert(all.end(), std::make_move_iterator(records.begin()),
               std::make_move_iterator(records.end()));
  }
  return all;
}

RunOutput run_sweep(const RunConfig& c, const SeedPlan& s) {
  RunOutput out;
  const auto spec = basis_spec(c, s);
  const auto design = designs::make_design(design_params(c, s));
  const auto full = bases::Basis(spec).evaluate(design.all_points());
  const auto theta = designs::make_theta(theta_spec(c, s));
  json per_lambda;
  out.records = run_lambdas(c, full, design.train_count(), theta, per_lambda);
  out.design_info = describe(design);
  out.summary["sweeps"] = per_lambda;
  return out;
}

RunOutput run_fourier(const RunConfig& c, const SeedPlan& s) {
  RunOutput out = run_sweep(c, s);
  const auto spec = basis_spec(c, s);
  const Index n = spec.params.fourier_n;
  const Index budget = spec.column_budget;
  const bases::Basis basis(spec);
  const auto design = designs::make_design(design_params(c, s));
  const auto full = basis.evaluate(design.all_points()).get<Complex>();
  const auto panel = decomposition::build_panels<Complex>(full, design.train_count(), n, c.rel_tol);
  const ComplexMatrix a = decomposition::aliasing_operator(panel);

  // Unmodeled frequency f lands on the modeled column f mod n.
  ComplexMatrix expected = ComplexMatrix::Zero(n, budget - n);
  std::vector<Index> copies(static_cast<std::size_t>(n), 0);
  for (Index j = 0; j < budget - n; ++j) {
    const long long f = bases::fourier_frequency(basis.order()[static_cast<std::size_t>(n + j)], n);
    const Index alias = static_cast<Index>(((f % n) + n) % n);
    expected(alias, j) = 1.0;
    ++copies[static_cast<std::size_t>(alias)];
  }
  const double deviation = (a - expected).cwiseAbs().maxCoeff();
  const Index max_copies = *std::max_element(copies.begin(), copies.end());
  out.summary["fourier"] = json{{"n", n},
                                {"budget", budget},
                                {"max_deviation", deviation},
                                {"tolerance", 1e-10},
                                {"passes", deviation < 1e-10},
                                {"norm_A", linalg::spectral_norm<Complex>(a)},
                                {"max_alias_copies", max_copies},
                                {"expected_norm_A", std::sqrt(static_cast<double>(max_copies))}};
  return out;
}

RunOutput run_gauss(const RunConfig& c, const SeedPlan& s) {
  RunOutput out;
  const auto spec = basis_spec(c, s);
  const bases::Basis basis(spec);
  const auto theta = designs::make_theta(theta_spec(c, s));
  const Index m = c.gauss_compare.m;
  RunConfig single = c;
  single.m_range = {m, m, 1};

  std::vector<SweepRecord> uniform_records;
  std::string table =
      "n,norm_A_uniform,norm_A_gauss,ratio,norm_pinv_TM_uniform,norm_pinv_TM_gauss,rank_TM_uniform,"
      "rank_TM_gauss\n";
  double max_ratio = 0.0, max_gauss = 0.0;
  Index max_ratio_n = 0;
  json rows = json::array();
  for (Index n : c.gauss_compare.n_values) {
    auto records_for = [&](designs::Strategy strategy) {
      auto params = design_params(c, s);
      params.strategy = strategy;
      params.n = n;
      const auto design = designs::make_design(params);
      const auto full = basis.evaluate(design.all_points());
      auto r = decomposition::sweep_matrix(full, design.train_count(), theta,
                                           sweep_options(single, 0.0));
      return r.front();
    };
    const auto uniform = records_for(designs::Strategy::UniformInterval);
    const auto gauss = records_for(designs::Strategy::LegendreGauss);
    const double ratio = uniform.norm_A / gauss.norm_A;
    if (n < m && std::isfinite(ratio) && ratio > max_ratio) {
      max_ratio = ratio;
      max_ratio_n = n;
    }
    if (std::isfinite(gauss.norm_A)) max_gauss = std::max(max_gauss, gauss.norm_A);
    table += std::to_string(n) + "," + format_double(uniform.norm_A) + "," +
             format_double(gauss.norm_A) + "," + format_double(ratio) + "," +
             format_double(uniform.norm_pinv_TM) + "," + format_double(gauss.norm_pinv_TM) + "," +
             std::to_string(uniform.rank_TM) + "," + std::to_string(gauss.rank_TM) + "\n";
    rows.push_back(json{{"n", n}, {"ratio", number(ratio)}});
    uniform_records.push_back(uniform);
    out.records.push_back(gauss);
  }
  out.extra_files.push_back({"gauss_compare.csv", table});
  out.extra_files.push_back({"sweep_uniform.csv", sweep_csv(uniform_records)});
  out.failed_steps = count_failed(uniform_records);
  out.design_info = json{{"strategies", json::array({"uniform", "legendre_gauss"})},
                         {"n_values", c.gauss_compare.n_values},
                         {"note", "sweep.csv holds the legendre_gauss records in n_values order"}};
  out.summary["gauss_compare"] = json{{"m", m},
                                      {"max_ratio_below_m", max_ratio},
                                      {"n_at_max_ratio", max_ratio_n},
                                      {"ratio_at_least_1e3", max_ratio >= 1e3},
                                      {"max_norm_A_gauss", max_gauss},
                                      {"gauss_bounded_by_10", max_gauss <= 10.0},
                                      {"ratios", rows}};
  return out;
}

json peak_report(const std::vector<SweepRecord>& records, Index n) {
  const auto pinv = column(records, &SweepRecord::norm_pinv_TM);
  const auto peaks = local_maxima(pinv);
  json list = json::array();
  bool all_independent = true;
  for (std::size_t i : peaks) {
    list.push_back(json{{"m", records[i].m},
                        {"norm_pinv_TM", pinv[i]},
                        {"new_col_independent", records[i].new_col_independent}});
    all_independent = all_independent && records[i].new_col_independent;
  }
  const std::size_t top = argmax(pinv);
  json out{{"local_maxima", list},
           {"local_maxima_count", peaks.size()},
           {"all_maxima_at_independent_columns", all_independent}};
  if (top < records.size()) {
    out["argmax_norm_pinv_TM_m"] = records[top].m;
    out["peak_at_n"] = records[top].m == n;
    // Largest other local maximum relative to the global peak.
    double second = 0.0;
    for (std::size_t i : peaks)
      if (i != top) second = std::max(second, pinv[i]);
    out["second_peak_ratio"] = second / pinv[top];
  }
  return out;
}

RunOutput run_ising(const RunConfig& c, const SeedPlan& s) {
  RunOutput out;
  const auto spec = basis_spec(c, s);
  const Index budget = spec.column_budget;

  // One physical system: coefficients follow the physical rank of each
  // cluster, so every ordering sees the same function.
  const auto clusters = bases::enumerate_clusters(spec.params.chain_length, spec.params.max_cluster_order);
  std::vector<Index> by_rank(clusters.size());
  std::iota(by_rank.begin(), by_rank.end(), Index{0});
  std::stable_sort(by_rank.begin(), by_rank.end(), [&](Index a, Index b) {
    return bases::physical_less(clusters[static_cast<std::size_t>(a)],
                                clusters[static_cast<std::size_t>(b)]);
  });
  const auto generated = designs::make_theta(theta_spec(c, s));
  RealVector natural = RealVector::Zero(static_cast<Index>(clusters.size()));
  for (Index r = 0; r < budget; ++r) natural(by_rank[static_cast<std::size_t>(r)]) = generated(r);

  auto run_one = [&](const bases::BasisSpec& b, designs::DesignParams params, json& info) {
    const bases::Basis basis(b);
    const auto design = designs::make_design(params);
    const auto full = basis.evaluate(design.all_points());
    RealVector theta(budget);
    for (Index j = 0; j < budget; ++j) theta(j) = natural(basis.order()[static_cast<std::size_t>(j)]);
    info = describe(design);
    info["row_order"] = designs::to_string(params.spin_row_order);
    info["column_ordering"] = bases::to_string(b.ordering);
    return decomposition::sweep_matrix(full, design.train_count(), theta, sweep_options(c, 0.0));
  };

  json primary_info, random_info;
  out.records = run_one(spec, design_params(c, s), primary_info);

  auto shuffled = spec;
  shuffled.ordering = bases::Ordering::SeededPermutation;
  shuffled.ordering_seed = s.comparison;
  auto shuffled_rows = design_params(c, s);
  shuffled_rows.spin_row_order = designs::SpinRowOrder::SeededPermutation;
  shuffled_rows.seed = splitmix64(s.comparison);
  const auto randomized = run_one(shuffled, shuffled_rows, random_info);

  out.extra_files.push_back({"sweep_randomized.csv", sweep_csv(randomized)});
  out.failed_steps = count_failed(randomized);
  out.design_info = json{{"primary", primary_info}, {"randomized", random_info}};
  out.summary["ising"] = json{{"n", c.design.n},
                              {"budget", budget},
                              {"primary", peak_report(out.records, c.design.n)},
                              {"randomized", peak_report(randomized, c.design.n)}};
  return out;
}

template <FieldScalar S>
json monte_carlo_row(const Mat<S>& full, Index n, Index m, double variance, Index draws,
                     std::uint64_t seed, double rel_tol) {
  const auto panel = decomposition::build_panels<S>(full, n, m, rel_tol);
  const Mat<S> eb = decomposition::invertibility_operator(panel);
  const Index budget = full.cols();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(variance));
  RealMatrix thetas(budget, draws);
  for (Index k = 0; k < draws; ++k)
    for (Index j = 0; j < budget; ++j) thetas(j, k) = normal(rng);
  const Mat<S> images = eb * thetas.cast<S>();
  const double mean = images.colwise().squaredNorm().sum() / static_cast<double>(draws);
  const Index dim_k = m - panel.rank_tm;
  const Index dim_u = budget - m;
  const double expected = decomposition::expected_unstructured_error(variance, dim_k, dim_u);
  return json{{"m", m},
              {"dim_K", dim_k},
              {"dim_U", dim_u},
              {"mc_mean", mean},
              {"expected", expected},
              {"rel_error", expected > 0.0 ? std::abs(mean - expected) / expected : std::abs(mean)}};
}

RunOutput run_unstructured(const RunConfig& c, const SeedPlan& s) {
  RunOutput out = run_sweep(c, s);
  const auto spec = basis_spec(c, s);
  const auto design = designs::make_design(design_params(c, s));
  const auto full = bases::Basis(spec).evaluate(design.all_points());
  json rows = json::array();
  std::string table = "m,dim_K,dim_U,mc_mean,expected,rel_error\n";
  double worst = 0.0;
  std::uint64_t stream = s.monte_carlo;
  for (Index m : c.unstructured.m_values) {
    stream = splitmix64(stream);
    const auto row = full.visit([&](const auto& mat) {
      using S = typename std::decay_t<decltype(mat)>::Scalar;
      return monte_carlo_row<S>(mat, design.train_count(), m, c.theta.variance,
                                c.unstructured.draws, stream, c.rel_tol);
    });
    worst = std::max(worst, row["rel_error"].get<double>());
    table += std::to_string(m) + "," + std::to_string(row["dim_K"].get<Index>()) + "," +
             std::to_string(row["dim_U"].get<Index>()) + "," +
             format_double(row["mc_mean"].get<double>()) + "," +
             format_double(row["expected"].get<double>()) + "," + format_double(row["rel_error"].get<double>()) +
             "\n";
    rows.push_back(row);
  }
  out.extra_files.push_back({"unstructured.csv", table});
  out.summary["unstructured"] = json{{"variance", c.theta.variance},
                                     {"draws", c.unstructured.draws},
                                     {"max_rel_error", worst},
                                     {"within_5_percent", worst <= 0.05},
                                     {"rows", rows}};
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

std::string_view tool_version() { return GADKIT_VERSION; }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

SeedPlan derive_seeds(std::uint64_t master, std::string source) {
  SeedPlan s;
  s.master = master;
  s.source = std::move(source);
  std::uint64_t state = master;
  auto next = [&] {
    state = splitmix64(state);
    return state;
  };
  s.features = next();
  s.ordering = next();
  s.design = next();
  s.theta = next();
  s.monte_carlo = next();
  s.comparison = next();
  return s;
}

SeedPlan resolve_seeds(const RunConfig& config, const RunOverrides& overrides) {
  if (overrides.seed) return derive_seeds(*overrides.seed, "cli");
  if (config.seed) return derive_seeds(*config.seed, "config");
  if (const char* env = std::getenv("GADKIT_SEED"); env && *env) {
    std::uint64_t value = 0;
    const std::string_view text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
      throw InvalidInput("GADKIT_SEED must be an unsigned integer, got '" + std::string(text) + "'");
    return derive_seeds(value, "env");
  }
  return derive_seeds(0, "default");
}

RunConfig apply_overrides(RunConfig config, const RunOverrides& overrides) {
  if (overrides.output_dir) config.output_dir = *overrides.output_dir;
  if (overrides.threads) config.threads = *overrides.threads;
  if (overrides.full_scale &&
      (config.experiment == Experiment::Sweep || config.experiment == Experiment::RidgeSweep)) {
    config.design.n = kFullScaleN;
    config.design.grid_size = std::max(config.design.grid_size, kFullScaleN);
    config.basis.column_budget = kFullScaleBudget;
    config.theta.length = kFullScaleBudget;
    config.m_range.last = kFullScaleBudget;
    if (config.theta.scheme == designs::ThetaScheme::Explicit)
      throw ConfigError("theta.values", 0, "explicit theta cannot be rescaled by --full-scale");
  }
  validate(config);
  return config;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string sweep_csv(const std::vector<SweepRecord>& records) {
  std::string out = std::string(kSweepHeader) + "\n";
  for (const auto& r : records) {
    out += std::to_string(r.m);
    for (double v : {r.norm_A, r.norm_pinv_TM, r.norm_M_TU, r.alias_error, r.bias_error,
                     r.nescience_error, r.risk_all, r.risk_prediction_only}) {
      out += ',';
      out += format_double(v);
    }
    out += ',' + std::to_string(r.rank_TM) + ',' + (r.new_col_independent ? "1" : "0") + ',' +
           format_double(r.lambda) + ',' + csv_field(r.error) + '\n';
  }
  return out;
}

std::vector<std::size_t> local_maxima(const std::vector<double>& values, double rel_tol) {
  std::vector<std::size_t> out;
  const std::size_t size = values.size();
  auto same = [&](double a, double b) {
    return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
  };
  std::size_t i = 1;
  while (i + 1 < size) {
    if (!std::isfinite(values[i]) || !std::isfinite(values[i - 1])) {
      ++i;
      continue;
    }
    const bool rises = values[i] > values[i - 1] && !same(values[i], values[i - 1]);
    if (!rises) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end + 1 < size && std::isfinite(values[end + 1]) && same(values[end + 1], values[i]))
      ++end;
    if (end + 1 < size && std::isfinite(values[end + 1]) && values[end + 1] < values[i]) out.push_back(i);
    i = end + 1;
  }
  return out;
}

bool nonincreasing(const std::vector<double>& values, double rel_tol) {
  double scale = 0.0;
  for (double v : values)
    if (std::isfinite(v)) scale = std::max(scale, std::abs(v));
  const double tol = rel_tol * scale;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (std::isfinite(values[i]) && std::isfinite(values[i - 1]) && values[i] > values[i - 1] + tol)
      return false;
  return true;
}

bool nondecreasing(const std::vector<double>& values, double rel_tol) {
  std::vector<double> negated(values.size());
  std::transform(values.begin(), values.end(), negated.begin(), [](double v) { return -v; });
  return nonincreasing(negated, rel_tol);
}

nlohmann::ordered_json config_to_json(const RunConfig& config) {
  json out = json::object();
  const std::string text = serialize_config(config);
  std::string section;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = text.find('\n', pos);
    const std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line.substr(1, line.size() - 2);
      out[section] = json::object();
      continue;
    }
    const auto eq = line.find(" = ");
    out[section][line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

RunOutput execute(const RunConfig& config, const SeedPlan& seeds) {
  RunOutput out;
  switch (config.experiment) {
    case Experiment::Sweep:
    case Experiment::RidgeSweep: out = run_sweep(config, seeds); break;
    case Experiment::FourierCheck: out = run_fourier(config, seeds); break;
    case Experiment::GaussCompare: out = run_gauss(config, seeds); break;
    case Experiment::IsingSweep: out = run_ising(config, seeds); break;
    case Experiment::UnstructuredEB: out = run_unstructured(config, seeds); break;
  }
  out.failed_steps += count_failed(out.records);
  return out;
}

int run(const RunConfig& input, const RunOverrides& overrides) {
  const RunConfig config = apply_overrides(input, overrides);
  const SeedPlan seeds = resolve_seeds(config, overrides);
  const RunOutput result = execute(config, seeds);

  const std::filesystem::path dir(config.output_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "sweep.csv", sweep_csv(result.records));
  json files = json::array({"sweep.csv", "meta.json", "summary.json"});
  for (const auto& extra : result.extra_files) {
    write_file(dir / extra.name, extra.content);
    files.push_back(extra.name);
  }

  json summary{{"experiment", to_string(config.experiment)}, {"failed_steps", result.failed_steps}};
  summary.update(result.summary);
  write_file(dir / "summary.json", summary.dump(2) + "\n");

  json meta;
  meta["tool"] = "gadkit";
  meta["version"] = tool_version();
  meta["experiment"] = to_string(config.experiment);
  meta["config"] = config_to_json(config);
  meta["seeds"] = json{{"master", seeds.master},   {"source", seeds.source},
                       {"features", seeds.features}, {"ordering", seeds.ordering},
                       {"design", seeds.design},     {"theta", seeds.theta},
                       {"monte_carlo", seeds.monte_carlo}, {"comparison", seeds.comparison}};
  meta["grid_convention"] =
      json{{"risk_all", "mean squared error over training rows and prediction rows"},
           {"risk_prediction_only", "mean squared error over prediction rows only"},
           {"prediction_rows", "prediction grid with exact training points removed"}};
  meta["rel_tol"] = config.rel_tol;
  meta["rank_rule"] = "sigma_i > rel_tol * sigma_max * max(rows, cols)";
  meta["truncation"] = "nescience blocks hold the columns up to basis.budget";
  meta["design"] = result.design_info;
  if (config.design.strategy == designs::Strategy::SpinConfigurations)
    meta["row_order_note"] =
        "period_lex: rows sorted by smallest ring period, then lexicographically with site 0 most "
        "significant and spin -1 first";
  if (config.design.strategy == designs::Strategy::FromDataset)
    meta["scale_policy"] = datasets::to_string(config.design.scale);
  meta["threads"] = config.threads;
  meta["full_scale"] = overrides.full_scale;
  meta["failed_steps"] = result.failed_steps;
  meta["files"] = files;
  write_file(dir / "meta.json", meta.dump(2) + "\n");
  return 0;
}

}  // namespace gadkit::experiments
