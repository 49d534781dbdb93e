#include "nndc_tools/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nndc/nndc.hpp"
#include "nndc_tools/experiments.hpp"

namespace nndc::tools {

namespace {

constexpr std::uint64_t kSplitSalt = 0x73706c6974ULL;
constexpr std::uint64_t kSnnSplitSalt = 0x736e6e73706c6974ULL;

// ---------------------------------------------------------------------------
// Config records and CSV framing

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::string to_text(double v) { return format_double(v); }
std::string to_text(std::size_t v) { return std::to_string(v); }
std::string to_text(int v) { return std::to_string(v); }
std::string to_text(bool v) { return v ? "true" : "false"; }
std::string to_text(const std::string& v) { return v; }

template <typename T>
std::string to_text(const std::vector<T>& v) {
  std::vector<std::string> parts;
  for (const T& x : v) parts.push_back(to_text(x));
  return join(parts, ";");
}

/// Effective parameters of a run, in a fixed order, hashed into the CSV
/// comment line.
class ConfigRecord {
 public:
  explicit ConfigRecord(std::string command) : command_(std::move(command)) {}

  template <typename T>
  ConfigRecord& add(const std::string& key, const T& value) {
    items_.push_back(key + "=" + to_text(value));
    return *this;
  }

  std::string comment_line() const {
    const std::string body = join(items_, " ");
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(fnv1a(command_ + " " + body)));
    return "# nndc " + command_ + " config_hash=" + hash + " " + body;
  }

 private:
  std::string command_;
  std::vector<std::string> items_;
};

struct CsvOutput {
  std::string header;
  std::vector<std::string> rows;
};

void emit(const ConfigRecord& config, const CsvOutput& csv, const std::string& path,
          std::ostream& out) {
  std::string text = config.comment_line() + "\n" + csv.header + "\n";
  for (const std::string& row : csv.rows) text += row + "\n";
  if (path == "-") {
    out << text;
    out.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw InvalidArgument("output: cannot open '" + path + "' for writing");
  file << text;
  if (!file) throw DataError("output: write to '" + path + "' failed");
}

std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

// ---------------------------------------------------------------------------
// Dataset sources

struct DataOptions {
  std::string data;
  std::string data_format;
  std::string queries;
  std::string queries_format;
  std::size_t num_queries = 100;
  bool exclude_self = false;
};

void add_data_options(CLI::App* sub, DataOptions& o, bool required) {
  auto* data = sub->add_option("--data", o.data, "Database file (.bin/.nndc, .csv, .txt/.svm)");
  if (required) data->required();
  sub->add_option("--data-format", o.data_format,
                  "dense-binary | sparse-text | dense-csv (default: from extension)");
  sub->add_option("--queries", o.queries,
                  "Query file; without it --num-queries rows are held out of the database");
  sub->add_option("--queries-format", o.queries_format, "Format of --queries");
  sub->add_option("--num-queries", o.num_queries, "Queries held out when --queries is absent");
  sub->add_flag("--exclude-self", o.exclude_self,
                "Drop database points identical to a query (with --queries)");
}

void record_data_options(ConfigRecord& rec, const DataOptions& o) {
  rec.add("data", o.data).add("data-format", o.data_format).add("queries", o.queries);
  rec.add("queries-format", o.queries_format).add("num-queries", o.num_queries);
  rec.add("exclude-self", o.exclude_self);
}

Dataset load(const std::string& path, const std::string& format) {
  if (!std::filesystem::exists(path)) throw InvalidArgument("file not found: '" + path + "'");
  const Format f = format.empty() ? format_from_path(path) : parse_format(format);
  return read_dataset(std::filesystem::path(path), f);
}

std::vector<std::size_t> sample_rows(std::size_t n, std::size_t count, std::uint64_t seed,
                                     std::uint64_t salt) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  RandomStream rng(seed, salt);
  for (std::size_t i = 0; i < count; ++i) std::swap(rows[i], rows[i + rng.below(n - i)]);
  rows.resize(count);
  std::sort(rows.begin(), rows.end());
  return rows;
}

struct Split {
  Dataset held_out;
  Dataset rest;
};

/// Moves `count` seeded-random rows out of `data`; both parts keep row order.
Split hold_out(const Dataset& data, std::size_t count, std::uint64_t seed, std::uint64_t salt,
               const char* what) {
  if (count < 1 || count >= data.size()) {
    throw InvalidArgument(std::string(what) + ": need 1 <= count < n (count " +
                          std::to_string(count) + ", n " + std::to_string(data.size()) + ")");
  }
  const std::vector<std::size_t> picked = sample_rows(data.size(), count, seed, salt);
  std::vector<std::size_t> rest;
  rest.reserve(data.size() - count);
  std::size_t next = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (next < picked.size() && picked[next] == i) {
      ++next;
    } else {
      rest.push_back(i);
    }
  }
  return {data.subset(picked), data.subset(rest)};
}

Dataset drop_duplicates_of(const Dataset& data, const Dataset& queries) {
  std::set<std::vector<double>> seen;
  for (std::size_t q = 0; q < queries.size(); ++q) seen.insert(queries.point(q).to_dense());
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!seen.count(data.point(i).to_dense())) keep.push_back(i);
  }
  if (keep.empty()) throw DataError("--exclude-self removed every database point");
  return data.subset(keep);
}

struct LoadedData {
  Dataset database;
  Dataset queries;
};

LoadedData load_data(const DataOptions& o, std::uint64_t seed) {
  const Dataset all = load(o.data, o.data_format);
  if (o.queries.empty()) {
    Split split = hold_out(all, o.num_queries, seed, kSplitSalt, "--num-queries");
    return {split.rest, split.held_out};
  }
  Dataset queries = load(o.queries, o.queries_format);
  if (queries.dim() != all.dim()) {
    throw DataError("queries have dimension " + std::to_string(queries.dim()) +
                    ", database has " + std::to_string(all.dim()));
  }
  return {o.exclude_self ? drop_duplicates_of(all, queries) : all, queries};
}

ValueDistribution parse_distribution(const std::string& name) {
  if (name == "uniform") return ValueDistribution::kUniform01;
  if (name == "gaussian") return ValueDistribution::kGaussian;
  throw InvalidArgument("--dist must be uniform or gaussian, got '" + name + "'");
}

void check_positive_list(const std::vector<double>& v, const char* name) {
  if (v.empty()) throw InvalidArgument(std::string(name) + " must not be empty");
  for (double x : v) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw InvalidArgument(std::string(name) + " values must be positive");
    }
  }
}

template <typename T>
void check_nonempty(const std::vector<T>& v, const char* name) {
  if (v.empty()) throw InvalidArgument(std::string(name) + " must not be empty");
}

// ---------------------------------------------------------------------------
// Commands

struct GenOptions {
  std::size_t n = 0;
  std::size_t d = 0;
  double s = 1.0;
  std::string dist = "uniform";
  std::uint64_t seed = 1;
  std::string output;
  std::string format;
  std::string queries_output;
  std::size_t num_queries = 100;
};

void run_gen(const GenOptions& o) {
  SynthSpec spec{o.n, o.d, o.s, parse_distribution(o.dist), o.seed};
  spec.validate();
  const auto write = [&](const Dataset& data, const std::string& path) {
    const Format f = o.format.empty() ? format_from_path(path) : parse_format(o.format);
    write_dataset(data, std::filesystem::path(path), f);
  };
  write(gen_sparse_iid(spec), o.output);
  if (!o.queries_output.empty()) write(gen_queries(spec, o.num_queries), o.queries_output);
}

struct ContrastOptions {
  DataOptions data;
  std::vector<double> p{1.0};
  std::size_t k = 1;
  std::string estimator = "ratio-of-means";
  std::size_t pair_cap = kDefaultPairCap;
  std::uint64_t seed = 1;
};

CsvOutput run_contrast(const ContrastOptions& o, ConfigRecord& rec) {
  check_positive_list(o.p, "--p");
  EmpiricalEstimator est = EmpiricalEstimator::kRatioOfMeans;
  if (o.estimator == "mean-of-ratios") {
    est = EmpiricalEstimator::kMeanOfRatios;
  } else if (o.estimator != "ratio-of-means") {
    throw InvalidArgument("--estimator must be ratio-of-means or mean-of-ratios");
  }
  record_data_options(rec, o.data);
  rec.add("p", o.p).add("k", o.k).add("estimator", o.estimator).add("pair-cap", o.pair_cap);
  rec.add("seed", o.seed);

  const LoadedData in = load_data(o.data, o.seed);
  CsvOutput csv{contrast_csv_header() + ",seed", {}};
  const std::string seed = "," + std::to_string(o.seed);
  for (double p : o.p) {
    const ContrastReport emp = empirical_contrast(in.database, in.queries, p, o.k, est);
    csv.rows.push_back(to_csv_row(emp) + seed);
    const NormalizedVariance sig =
        empirical_sigma_prime(in.database, in.queries, p, o.pair_cap, o.seed);
    ContrastReport pred = predicted_contrast(sig.sigma_prime, in.database.size(), p, o.k);
    pred.d = emp.d;
    pred.s = emp.s;
    csv.rows.push_back(to_csv_row(pred) + seed);
    ContrastReport asym = asymptotic_contrast(sig.sigma_prime, in.database.size(), p);
    asym.d = emp.d;
    asym.s = emp.s;
    csv.rows.push_back(to_csv_row(asym) + seed);
  }
  return csv;
}

struct PredictOptions {
  std::vector<double> sigma{0.02, 0.04, 0.06, 0.08, 0.1, 0.12, 0.14, 0.16, 0.18, 0.2};
  std::vector<double> n{1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8};
  std::vector<double> p{1.0};
  std::size_t k = 1;
  bool asymptotic = false;
};

CsvOutput run_predict_sweep(const PredictOptions& o, ConfigRecord& rec) {
  check_positive_list(o.p, "--p");
  check_nonempty(o.sigma, "--sigma");
  check_nonempty(o.n, "--n");
  rec.add("sigma", o.sigma).add("n", o.n).add("p", o.p).add("k", o.k);
  rec.add("asymptotic", o.asymptotic);
  CsvOutput csv{contrast_csv_header(), {}};
  for (double p : o.p) {
    for (double sigma : o.sigma) {
      for (double nv : o.n) {
        if (!(nv >= 2.0) || nv != std::floor(nv)) {
          throw InvalidArgument("--n values must be integers >= 2");
        }
        const auto n = static_cast<std::size_t>(nv);
        csv.rows.push_back(to_csv_row(predicted_contrast(sigma, n, p, o.k)));
        if (o.asymptotic) csv.rows.push_back(to_csv_row(asymptotic_contrast(sigma, n, p)));
      }
    }
  }
  return csv;
}

enum class Axis { kDim, kSparsity, kSize, kP };

struct SweepOptions {
  std::size_t n = 10'000;
  std::size_t d = 64;
  double s = 1.0;
  double p = 1.0;
  std::size_t k = 1;
  std::size_t num_queries = 100;
  std::string dist = "uniform";
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::size_t sigma_pairs = 0;
  std::vector<double> grid;
};

std::string_view axis_name(Axis axis) {
  switch (axis) {
    case Axis::kDim: return "d";
    case Axis::kSparsity: return "s";
    case Axis::kSize: return "n";
    case Axis::kP: return "p";
  }
  return "";
}

std::string sweep_header() {
  return "axis,n,d,s,p,k,num_queries,seeds,sigma_prime_model,predicted,predicted_flags,"
         "empirical_mean,empirical_std,sigma_prime_empirical";
}

CsvOutput run_synthetic_sweep(Axis axis, const SweepOptions& o, ConfigRecord& rec) {
  check_nonempty(o.grid, "sweep grid");
  check_nonempty(o.seeds, "--seeds");
  rec.add("n", o.n).add("d", o.d).add("s", o.s).add("p", o.p).add("k", o.k);
  rec.add("num-queries", o.num_queries).add("dist", o.dist).add("seeds", o.seeds);
  rec.add("sigma-pairs", o.sigma_pairs).add(std::string(axis_name(axis)) + "-list", o.grid);

  CsvOutput csv{sweep_header(), {}};
  for (double value : o.grid) {
    SweepSetting st;
    st.n = o.n;
    st.d = o.d;
    st.s = o.s;
    st.p = o.p;
    st.k = o.k;
    st.num_queries = o.num_queries;
    st.distribution = parse_distribution(o.dist);
    st.seeds = o.seeds;
    st.sigma_pairs = o.sigma_pairs;
    const auto as_count = [&](const char* what) {
      if (!(value >= 1.0) || value != std::floor(value)) {
        throw InvalidArgument(std::string(what) + " values must be positive integers");
      }
      return static_cast<std::size_t>(value);
    };
    switch (axis) {
      case Axis::kDim: st.d = as_count("--d-list"); break;
      case Axis::kSparsity: st.s = value; break;
      case Axis::kSize: st.n = as_count("--n-list"); break;
      case Axis::kP: st.p = value; break;
    }
    const SweepResult r = run_sweep_point(st);
    csv.rows.push_back(std::string(axis_name(axis)) + "," + std::to_string(st.n) + "," +
                       std::to_string(st.d) + "," + format_double(st.s) + "," +
                       format_double(st.p) + "," + std::to_string(st.k) + "," +
                       std::to_string(st.num_queries) + "," + to_text(st.seeds) + "," +
                       format_double(r.sigma_prime_model) + "," + opt_text(r.predicted.c_r) +
                       "," + r.predicted.flags.to_string() + "," +
                       format_double(r.empirical_mean) + "," + format_double(r.empirical_std) +
                       "," + opt_text(r.sigma_prime_empirical_mean));
  }
  return csv;
}

struct IntrinsicCliOptions {
  DataOptions data;
  std::vector<double> p{1.0, 2.0};
  std::size_t d_max = 0;
  std::size_t pair_cap = kDefaultSweepPairs;
  double variance_fraction = 0.85;
  std::uint64_t seed = 1;
};

CsvOutput run_intrinsic(const IntrinsicCliOptions& o, ConfigRecord& rec) {
  check_positive_list(o.p, "--p");
  record_data_options(rec, o.data);
  rec.add("p", o.p).add("d-max", o.d_max).add("pair-cap", o.pair_cap);
  rec.add("variance-fraction", o.variance_fraction).add("seed", o.seed);

  const LoadedData in = load_data(o.data, o.seed);
  IntrinsicOptions opts;
  opts.pair_cap = o.pair_cap;
  opts.variance_fraction = o.variance_fraction;
  opts.seed = o.seed;
  const std::size_t d_max = o.d_max == 0 ? in.database.dim() : o.d_max;
  const DimReport r = intrinsic_dimension_by_contrast(in.database, in.queries, o.p, d_max, opts);

  CsvOutput csv{"d_prime,p,predicted,empirical,abs_discrepancy", {}};
  for (const DimDetail& row : r.details) {
    csv.rows.push_back(std::to_string(row.d_prime) + "," + format_double(row.p) + "," +
                       opt_text(row.predicted) + "," + format_double(row.empirical) + "," +
                       format_double(row.abs_discrepancy));
  }
  double best = 0.0;
  for (const DiscrepancyPoint& pt : r.discrepancy_curve) {
    if (pt.d_prime == r.d_star) best = pt.discrepancy;
  }
  csv.rows.push_back(std::to_string(r.d_star) + ",d_star,,," + format_double(best));
  csv.rows.push_back(std::to_string(r.d_e) + ",d_e,,,");
  return csv;
}

struct LshEvalOptions {
  DataOptions data;
  std::size_t n = 10'000;
  std::size_t d = 64;
  double s = 1.0;
  std::string dist = "uniform";
  std::string mode = "tables";
  int p = 2;
  std::vector<std::size_t> bits{16};
  std::vector<std::size_t> tables{1, 2, 4, 8, 16, 32, 64};
  std::vector<std::size_t> radius{0, 1, 2, 3, 4};
  double width = 0.0;
  double width_scale = 1.0;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
};

CsvOutput run_lsh_eval(const LshEvalOptions& o, ConfigRecord& rec) {
  if (o.mode != "tables" && o.mode != "hamming") {
    throw InvalidArgument("--mode must be tables or hamming");
  }
  if (o.p != 1 && o.p != 2) throw InvalidArgument("--p must be 1 or 2");
  if (o.width < 0.0) throw InvalidArgument("--width must be >= 0 (0 = automatic)");
  check_nonempty(o.bits, "--bits");
  check_nonempty(o.seeds, "--seeds");
  check_nonempty(o.mode == "tables" ? o.tables : o.radius,
                 o.mode == "tables" ? "--tables" : "--radius");
  const bool synthetic = o.data.data.empty();
  if (synthetic) {
    rec.add("n", o.n).add("d", o.d).add("s", o.s).add("dist", o.dist);
    rec.add("num-queries", o.data.num_queries);
  } else {
    record_data_options(rec, o.data);
  }
  rec.add("mode", o.mode).add("p", o.p).add("bits", o.bits);
  if (o.mode == "tables") {
    rec.add("tables", o.tables);
  } else {
    rec.add("radius", o.radius);
  }
  rec.add("width", o.width).add("width-scale", o.width_scale).add("seeds", o.seeds);

  std::optional<LoadedData> file_data;
  if (!synthetic) file_data = load_data(o.data, o.seeds.front());

  CsvOutput csv{recall_csv_header(), {}};
  for (std::uint64_t seed : o.seeds) {
    LoadedData in = file_data ? *file_data : [&] {
      SynthSpec spec{o.n, o.d, o.s, parse_distribution(o.dist), seed};
      return LoadedData{gen_sparse_iid(spec), gen_queries(spec, o.data.num_queries)};
    }();
    const std::vector<std::size_t> truth = nearest_indices(in.database, in.queries, o.p);
    for (std::size_t bits : o.bits) {
      if (o.mode == "tables") {
        LshParams params;
        params.bits = bits;
        params.tables = *std::max_element(o.tables.begin(), o.tables.end());
        params.p = o.p;
        if (o.width > 0.0) params.width = o.width;
        params.width_scale = o.width_scale;
        params.seed = seed;
        const LshIndex index = LshIndex::build(in.database, params);
        const auto points = lsh_table_recall(index, in.queries, truth, o.tables);
        for (std::size_t i = 0; i < points.size(); ++i) {
          csv.rows.push_back(recall_csv_row("lsh", o.p, bits, o.tables[i], seed, points[i]));
        }
      } else {
        const BinaryCodeIndex index = train_random_hash(in.database, bits, seed);
        const auto points = hamming_radius_recall(index, in.queries, truth, o.radius);
        for (std::size_t i = 0; i < points.size(); ++i) {
          csv.rows.push_back(
              recall_csv_row("lsh-hamming", o.p, bits, o.radius[i], seed, points[i]));
        }
      }
    }
  }
  return csv;
}

struct HashCompareOptions {
  DataOptions data;
  std::size_t n = 10'000;
  std::size_t d = 64;
  double noise_max = 4.0;
  double noise_condition = 100.0;
  std::size_t snn_queries = 1000;
  std::vector<std::size_t> bits{32};
  std::vector<double> budget_fraction{0.01, 0.02, 0.05, 0.1};
  std::vector<std::string> methods{"pca", "mrc", "lsh"};
  double ridge = kDefaultRidge;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
};

CsvOutput run_hash_compare_cmd(const HashCompareOptions& o, ConfigRecord& rec) {
  check_nonempty(o.bits, "--bits");
  check_nonempty(o.seeds, "--seeds");
  check_nonempty(o.methods, "--methods");
  check_positive_list(o.budget_fraction, "--budget-fraction");
  const bool synthetic = o.data.data.empty();
  if (synthetic) {
    rec.add("n", o.n).add("d", o.d).add("noise-max", o.noise_max);
    rec.add("noise-condition", o.noise_condition).add("num-queries", o.data.num_queries);
  } else {
    record_data_options(rec, o.data);
  }
  rec.add("snn-queries", o.snn_queries).add("bits", o.bits);
  rec.add("budget-fraction", o.budget_fraction).add("methods", o.methods);
  rec.add("ridge", o.ridge).add("seeds", o.seeds);

  HashCompareSetting st;
  st.n = o.n;
  st.d = o.d;
  st.num_queries = o.data.num_queries;
  st.num_snn_queries = o.snn_queries;
  st.bits = o.bits;
  st.methods.clear();
  for (const std::string& m : o.methods) st.methods.push_back(parse_method(m));
  st.ridge = o.ridge;

  const auto budgets_for = [&](std::size_t n) {
    std::vector<std::size_t> out;
    for (double f : o.budget_fraction) {
      if (f > 1.0) throw InvalidArgument("--budget-fraction values must be in (0, 1]");
      out.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(
                                                 std::llround(f * static_cast<double>(n)))));
    }
    return out;
  };

  std::vector<HashCompareRow> rows;
  if (synthetic) {
    st.noise_variance = geometric_noise(o.d, o.noise_max, o.noise_condition);
    st.budgets = budgets_for(o.n);
    for (std::uint64_t seed : o.seeds) {
      const auto r = run_hash_compare(st, seed);
      rows.insert(rows.end(), r.begin(), r.end());
    }
  } else {
    const LoadedData in = load_data(o.data, o.seeds.front());
    const Split snn =
        hold_out(in.database, o.snn_queries, o.seeds.front(), kSnnSplitSalt, "--snn-queries");
    st.budgets = budgets_for(snn.rest.size());
    for (std::uint64_t seed : o.seeds) {
      const auto r = run_hash_compare(snn.rest, in.queries, snn.held_out, st, seed);
      rows.insert(rows.end(), r.begin(), r.end());
    }
  }
  CsvOutput csv{recall_csv_header(), {}};
  for (const HashCompareRow& r : rows) {
    csv.rows.push_back(
        recall_csv_row(method_name(r.method), 2.0, r.bits, r.budget, r.seed, r.point));
  }
  return csv;
}

// ---------------------------------------------------------------------------

struct Common {
  std::string output = "-";
  std::size_t threads = 0;
  std::string config;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  std::string out(s.substr(b, e - b + 1));
  if (out.size() >= 2 && (out.front() == '"' || out.front() == '\'') && out.back() == out.front()) {
    out = out.substr(1, out.size() - 2);
  }
  return out;
}

/// Expands `--config FILE` into ordinary arguments. Keys already given on the
/// command line are skipped, so flags win over the file.
std::vector<std::string> expand_config(const CLI::App& app, std::vector<std::string> args) {
  if (args.size() < 2) return args;
  const CLI::App* sub = nullptr;
  try {
    sub = app.get_subcommand(args[1]);
  } catch (const CLI::OptionNotFound&) {
    return args;
  }
  std::string path;
  std::set<std::string> given;
  for (std::size_t i = 2; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) continue;
    const auto eq = a.find('=');
    const std::string key = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
    given.insert(key);
    if (key == "config") path = eq != std::string::npos ? a.substr(eq + 1) : (i + 1 < args.size() ? args[i + 1] : "");
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw InvalidArgument("--config: cannot read '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#' || text.front() == ';' || text.front() == '[') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("--config: line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") {
      throw InvalidArgument("--config: line " + std::to_string(line_no) + ": unknown option '" +
                            key + "' for " + sub->get_name());
    }
    if (given.count(key)) continue;
    if (opt->get_expected_max() == 0) {
      if (value == "true" || value == "1") args.push_back("--" + key);
    } else {
      args.push_back("--" + key + "=" + value);
    }
  }
  return args;
}

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& help,
                      Common& common, bool csv) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("--config", common.config,
                  "Flat key=value file of options; command-line flags win");
  if (csv) sub->add_option("-o,--output", common.output, "CSV output path ('-' = stdout)");
  sub->add_option("--threads", common.threads, "Worker threads (default: NNDC_THREADS or all)");
  return sub;
}

}  // namespace

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"nndc: relative contrast and nearest-neighbor hashing experiments", "nndc"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  Common common;

  GenOptions gen;
  auto* gen_cmd = add_command(app, "gen", "Generate a synthetic dataset file", common, false);
  gen_cmd->add_option("--n", gen.n, "Number of points")->required();
  gen_cmd->add_option("--d", gen.d, "Dimension")->required();
  gen_cmd->add_option("--s", gen.s, "Probability a coordinate is nonzero");
  gen_cmd->add_option("--dist", gen.dist, "Nonzero values: uniform (0,1) | gaussian");
  gen_cmd->add_option("--seed", gen.seed, "Generator seed");
  gen_cmd->add_option("-o,--output", gen.output, "Dataset path")->required();
  gen_cmd->add_option("--format", gen.format, "Output format (default: from extension)");
  gen_cmd->add_option("--queries-output", gen.queries_output,
                      "Also write --num-queries i.i.d. queries (seed + 1) here");
  gen_cmd->add_option("--num-queries", gen.num_queries, "Query count for --queries-output");

  ContrastOptions con;
  auto* con_cmd = add_command(
      app, "contrast",
      "Empirical, predicted and asymptotic relative contrast of a dataset.\n"
      "CSV: mode,n,d,s,p,k,sigma_prime,c_r,flags,seed (three rows per p; s is the observed\n"
      "nonzero fraction; sigma_prime is measured over (point, query) pairs)",
      common, true);
  add_data_options(con_cmd, con.data, true);
  con_cmd->add_option("--p", con.p, "Metric exponents")->delimiter(',');
  con_cmd->add_option("--k", con.k, "Neighbor rank");
  con_cmd->add_option("--estimator", con.estimator, "ratio-of-means | mean-of-ratios");
  con_cmd->add_option("--pair-cap", con.pair_cap, "Max pairs for the sigma' estimate");
  con_cmd->add_option("--seed", con.seed, "Seed for query split and pair sampling");

  PredictOptions pre;
  auto* pre_cmd = add_command(app, "predict-sweep",
                              "Predicted contrast over a sigma' x n grid.\n"
                              "CSV: mode,n,d,s,p,k,sigma_prime,c_r,flags",
                              common, true);
  pre_cmd->add_option("--sigma", pre.sigma, "sigma' values")->delimiter(',');
  pre_cmd->add_option("--n", pre.n, "Database sizes")->delimiter(',');
  pre_cmd->add_option("--p", pre.p, "Metric exponents")->delimiter(',');
  pre_cmd->add_option("--k", pre.k, "Neighbor rank");
  pre_cmd->add_flag("--asymptotic", pre.asymptotic, "Also emit the large-d asymptotic form");

  std::array<SweepOptions, 4> sweeps;
  std::size_t next_sweep = 0;
  const std::string sweep_help =
      "CSV: axis,n,d,s,p,k,num_queries,seeds,sigma_prime_model,predicted,predicted_flags,\n"
      "empirical_mean,empirical_std,sigma_prime_empirical (mean/std over seeds)";
  const auto add_sweep = [&](const std::string& name, const std::string& what,
                             const std::string& list, std::vector<double> defaults) {
    auto* sub = add_command(app, name, what + "\n" + sweep_help, common, true);
    SweepOptions& sweep = sweeps[next_sweep++];
    sub->add_option("--n", sweep.n, "Database size");
    sub->add_option("--d", sweep.d, "Dimension");
    sub->add_option("--s", sweep.s, "Sparsity (nonzero probability)");
    sub->add_option("--p", sweep.p, "Metric exponent");
    sub->add_option("--k", sweep.k, "Neighbor rank");
    sub->add_option("--num-queries", sweep.num_queries, "Queries per seed");
    sub->add_option("--dist", sweep.dist, "uniform | gaussian");
    sub->add_option("--seeds", sweep.seeds, "Seeds")->delimiter(',');
    sub->add_option("--sigma-pairs", sweep.sigma_pairs,
                    "Pairs for the empirical sigma' column (0 = skip)");
    sweep.grid = std::move(defaults);
    sub->add_option(list, sweep.grid, "Sweep values")->delimiter(',');
    return sub;
  };
  auto* dim_cmd = add_sweep("dim-sweep", "Contrast versus dimension", "--d-list",
                            {16, 32, 64, 128, 256, 512, 1024});
  auto* sps_cmd = add_sweep("sparsity-sweep", "Contrast versus sparsity", "--s-list",
                            {0.05, 0.1, 0.2, 0.5, 1.0});
  auto* nsw_cmd = add_sweep("n-sweep", "Contrast versus database size", "--n-list",
                            {1e3, 1e4, 1e5});
  auto* psw_cmd = add_sweep("p-sweep", "Contrast versus metric exponent", "--p-list",
                            {0.5, 1.0, 2.0, 3.0, 4.0});

  IntrinsicCliOptions intr;
  auto* intr_cmd = add_command(
      app, "intrinsic-dim",
      "Intrinsic dimension by contrast sweep.\n"
      "CSV: d_prime,p,predicted,empirical,abs_discrepancy; then '<d_star>,d_star,,,<min mean\n"
      "discrepancy>' and '<d_e>,d_e,,,' summary rows",
      common, true);
  add_data_options(intr_cmd, intr.data, true);
  intr_cmd->add_option("--p", intr.p, "Metric exponents")->delimiter(',');
  intr_cmd->add_option("--d-max", intr.d_max, "Largest d' (0 = d)");
  intr_cmd->add_option("--pair-cap", intr.pair_cap, "Pairs for per-dimension moments");
  intr_cmd->add_option("--variance-fraction", intr.variance_fraction, "Fraction for d_e");
  intr_cmd->add_option("--seed", intr.seed, "Seed");

  LshEvalOptions lsh;
  auto* lsh_cmd = add_command(
      app, "lsh-eval",
      "LSH recall versus tables (tables mode) or hamming radius of sign random projections\n"
      "(hamming mode). Without --data, uses synthetic data regenerated per seed.\n"
      "CSV: method,p,bits,tables_or_radius,seed,candidates_returned,recall",
      common, true);
  add_data_options(lsh_cmd, lsh.data, false);
  lsh_cmd->add_option("--n", lsh.n, "Synthetic database size");
  lsh_cmd->add_option("--d", lsh.d, "Synthetic dimension");
  lsh_cmd->add_option("--s", lsh.s, "Synthetic sparsity");
  lsh_cmd->add_option("--dist", lsh.dist, "Synthetic values: uniform | gaussian");
  lsh_cmd->add_option("--mode", lsh.mode, "tables | hamming");
  lsh_cmd->add_option("--p", lsh.p, "1 (Cauchy) or 2 (Gaussian)");
  lsh_cmd->add_option("--bits", lsh.bits, "Hash functions per table / code bits")->delimiter(',');
  lsh_cmd->add_option("--tables", lsh.tables, "Table counts (prefixes)")->delimiter(',');
  lsh_cmd->add_option("--radius", lsh.radius, "Hamming radii")->delimiter(',');
  lsh_cmd->add_option("--width", lsh.width, "Bucket width (0 = automatic)");
  lsh_cmd->add_option("--width-scale", lsh.width_scale, "Multiplier on the automatic width");
  lsh_cmd->add_option("--seeds", lsh.seeds, "Seeds")->delimiter(',');

  HashCompareOptions hc;
  auto* hc_cmd = add_command(
      app, "hash-compare",
      "PCA vs contrast-maximizing (mrc) vs random-projection (lsh) binary codes, hamming\n"
      "ranking at candidate budgets. Without --data, uses Gaussian data with anisotropic\n"
      "query noise. CSV: method,p,bits,tables_or_radius(=budget),seed,candidates_returned,recall",
      common, true);
  add_data_options(hc_cmd, hc.data, false);
  hc_cmd->add_option("--n", hc.n, "Synthetic database size");
  hc_cmd->add_option("--d", hc.d, "Synthetic dimension");
  hc_cmd->add_option("--noise-max", hc.noise_max, "Largest per-coordinate noise variance");
  hc_cmd->add_option("--noise-condition", hc.noise_condition, "Largest / smallest noise variance");
  hc_cmd->add_option("--snn-queries", hc.snn_queries, "Held-out queries used to estimate S_NN");
  hc_cmd->add_option("--bits", hc.bits, "Code lengths")->delimiter(',');
  hc_cmd->add_option("--budget-fraction", hc.budget_fraction, "Candidate budgets as fractions of n")
      ->delimiter(',');
  hc_cmd->add_option("--methods", hc.methods, "pca,mrc,lsh")->delimiter(',');
  hc_cmd->add_option("--ridge", hc.ridge, "Relative ridge on S_NN");
  hc_cmd->add_option("--seeds", hc.seeds, "Seeds")->delimiter(',');

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = expand_config(app, std::move(args));
    std::reverse(args.begin(), args.end());
    args.pop_back();  // program name
    app.parse(args);
  } catch (const InvalidArgument& e) {
    err << "nndc: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, eo;
    const int code = app.exit(e, o, eo);
    out << o.str();
    err << eo.str();
    return code == 0 ? kExitOk : kExitConfig;
  }

  std::string command;
  for (const CLI::App* sub : app.get_subcommands()) command = sub->get_name();
  try {
    if (common.threads > 0) set_thread_count(common.threads);
    ConfigRecord rec(command);
    if (*gen_cmd) {
      run_gen(gen);
      return kExitOk;
    }
    CsvOutput csv;
    if (*con_cmd) {
      csv = run_contrast(con, rec);
    } else if (*pre_cmd) {
      csv = run_predict_sweep(pre, rec);
    } else if (*dim_cmd) {
      csv = run_synthetic_sweep(Axis::kDim, sweeps[0], rec);
    } else if (*sps_cmd) {
      csv = run_synthetic_sweep(Axis::kSparsity, sweeps[1], rec);
    } else if (*nsw_cmd) {
      csv = run_synthetic_sweep(Axis::kSize, sweeps[2], rec);
    } else if (*psw_cmd) {
      csv = run_synthetic_sweep(Axis::kP, sweeps[3], rec);
    } else if (*intr_cmd) {
      csv = run_intrinsic(intr, rec);
    } else if (*lsh_cmd) {
      csv = run_lsh_eval(lsh, rec);
    } else if (*hc_cmd) {
      csv = run_hash_compare_cmd(hc, rec);
    }
    emit(rec, csv, common.output, out);
    return kExitOk;
  } catch (const InvalidArgument& e) {
    err << "nndc " << command << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    err << "nndc " << command << ": " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "nndc " << command << ": " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace nndc::tools
