#include "rffol/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "rffol/data.hpp"
#include "rffol/errors.hpp"
#include "rffol/eval.hpp"
#include "rffol/features.hpp"
#include "rffol/learner.hpp"
#include "rffol/model_io.hpp"
#include "rffol/wilcoxon.hpp"

namespace rffol::cli {
namespace {

using Record = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

enum class Format { Text, JsonLines };

std::string shortest(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

/// One report line: space-separated key=value pairs, or one JSON object.
void emit(std::ostream& out, Format format, const Record& record) {
  if (format == Format::JsonLines) {
    out << record.dump() << '\n';
    return;
  }
  bool first = true;
  for (const auto& [key, value] : record.items()) {
    if (!first) out << ' ';
    first = false;
    if (key == "record") {
      out << value.get<std::string>();
      continue;
    }
    out << key << '=';
    if (value.is_string()) {
      out << value.get<std::string>();
    } else if (value.is_number_float()) {
      out << shortest(value.get<double>());
    } else {
      out << value.dump();
    }
  }
  out << '\n';
}

/// Deletes registered output files unless the command commits.
class OutputGuard {
 public:
  void add(const std::string& path) {
    if (!path.empty() && path != "-") paths_.push_back(path);
  }
  void commit() { paths_.clear(); }
  ~OutputGuard() {
    for (const auto& p : paths_) std::remove(p.c_str());
  }

 private:
  std::vector<std::string> paths_;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size())
      throw UsageError("bad value '" + tok + "' in " + what);
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(what + " is empty");
  return out;
}

struct DataArgs {
  std::string path;
  std::optional<std::size_t> dim;
  std::string labels;

  ParseOptions options(std::optional<std::size_t> model_dim = std::nullopt) const {
    ParseOptions o;
    o.dimension = dim ? dim : model_dim;
    if (!labels.empty()) o.labels = parse_label_list(labels);
    return o;
  }
};

void add_data_options(CLI::App* cmd, DataArgs& args) {
  cmd->add_option("--data", args.path, "LIBSVM input file")->required();
  cmd->add_option("--dim", args.dim, "Feature dimension (default: largest index seen)");
  cmd->add_option("--labels", args.labels, "Comma-separated label set, e.g. -1,1 or 1,2,3");
}

struct ModelArgs {
  std::string algo = "mpu-fogdub";
  std::string variant = "mpu";
  std::size_t num_features = 400;
  double sigma2 = 1.0;
  double eta_w = 100.0;
  double eta_u = 0.1;
  double eta_b = 0.01;
  std::uint64_t seed = 1;
};

void add_model_options(CLI::App* cmd, ModelArgs& args) {
  cmd->add_option("--algo", args.algo, "fogd | mpu-fogdu | mpu-fogdub")->capture_default_str();
  cmd->add_option("--variant", args.variant, "Feature map: mpu | phasecos | cossin")->capture_default_str();
  cmd->add_option("--D", args.num_features, "Number of random frequencies")->capture_default_str();
  cmd->add_option("--sigma2", args.sigma2, "Gaussian kernel width sigma^2")->capture_default_str();
  cmd->add_option("--eta-w", args.eta_w, "Weight step size")->capture_default_str();
  cmd->add_option("--eta-u", args.eta_u, "Frequency step size")->capture_default_str();
  cmd->add_option("--eta-b", args.eta_b, "Phase step size")->capture_default_str();
}

HyperParams to_params(const ModelArgs& a) {
  return {a.num_features, a.sigma2, a.eta_w, a.eta_u, a.eta_b, parse_map_variant(a.variant)};
}

Record trace_record(const TrainTrace& trace) {
  Record r;
  r["record"] = "trace";
  r["steps"] = trace.steps;
  r["mistakes"] = trace.mistakes;
  r["loss_events"] = trace.loss_events;
  r["mistake_rate"] = trace.steps ? static_cast<double>(trace.mistakes) / static_cast<double>(trace.steps) : 0.0;
  return r;
}

Record eval_record(const EvalReport& report, bool timing) {
  Record r;
  r["record"] = "eval";
  r["instances"] = report.instance_count;
  r["correct"] = report.correct;
  r["accuracy"] = report.test_accuracy;
  if (timing) r["test_seconds"] = report.test_seconds;
  return r;
}

struct Common {
  std::string format = "text";
  bool no_timing = false;

  Format fmt() const {
    if (format == "text") return Format::Text;
    if (format == "json-lines" || format == "jsonl") return Format::JsonLines;
    throw UsageError("unknown report format '" + format + "'");
  }
};

// ---------------------------------------------------------------------------

struct TrainCmd {
  DataArgs data;
  ModelArgs model;
  std::string out;
  std::string trace_path;
  std::size_t checkpoint = 1000;
};

int run_train(const TrainCmd& c, const Common& common, std::ostream& out, OutputGuard& guard) {
  const auto ds = read_libsvm_file(c.data.path, c.data.options());
  if (ds.empty()) throw DataError("training file has no instances");
  const auto mode = parse_update_mode(c.model.algo);
  auto model = make_model(to_params(c.model), mode, ds.dimension, ds.class_count(), c.model.seed);

  TrainOptions options;
  options.checkpoint_interval = c.checkpoint;
  const auto start = Clock::now();
  guard.add(c.out);
  guard.add(c.trace_path);
  const auto trace = train_online(model, ds, options);
  const double seconds = seconds_since(start);
  save_model(c.out, model);

  std::ofstream trace_file;
  std::ostream* sink = &out;
  if (!c.trace_path.empty()) {
    trace_file.open(c.trace_path, std::ios::trunc);
    if (!trace_file) throw DataError("cannot write '" + c.trace_path + "'");
    sink = &trace_file;
  }
  auto rec = trace_record(trace);
  if (!common.no_timing) rec["train_seconds"] = seconds;
  emit(*sink, common.fmt(), rec);
  for (const auto& cp : trace.cumulative_mistake_rate) {
    Record r;
    r["record"] = "checkpoint";
    r["step"] = cp.step;
    r["mistakes"] = cp.mistakes;
    r["rate"] = cp.rate;
    emit(*sink, common.fmt(), r);
  }
  return kExitOk;
}

struct PredictCmd {
  DataArgs data;
  std::string model;
  std::string out;
};

Dataset load_for_model(const DataArgs& args, const OnlineModel& model) {
  auto ds = read_libsvm_file(args.path, args.options(model.map.input_dim()));
  if (!ds.empty() && model_rows_for(ds.class_count()) != model.class_count)
    throw DataError("data has " + std::to_string(ds.class_count()) + " labels but the model has " +
                    std::to_string(model.class_count) + " score rows; pass --labels");
  return ds;
}

int run_predict(const PredictCmd& c, std::ostream& out, OutputGuard& guard) {
  const auto model = load_model(c.model);
  const auto ds = load_for_model(c.data, model);
  std::ofstream file;
  std::ostream* sink = &out;
  if (!c.out.empty() && c.out != "-") {
    guard.add(c.out);
    file.open(c.out, std::ios::trunc);
    if (!file) throw DataError("cannot write '" + c.out + "'");
    sink = &file;
  }
  for (const auto& inst : ds.instances) *sink << shortest(ds.label_map.to_original(predict(model, inst.features))) << '\n';
  return kExitOk;
}

struct EvalCmd {
  DataArgs data;
  std::string model;
};

int run_eval(const EvalCmd& c, const Common& common, std::ostream& out) {
  const auto model = load_model(c.model);
  const auto ds = load_for_model(c.data, model);
  emit(out, common.fmt(), eval_record(evaluate(model, ds), !common.no_timing));
  return kExitOk;
}

struct BenchCmd {
  DataArgs data;
  ModelArgs model;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> subset;
  std::size_t folds = 0;
  std::string grid_d, grid_sigma2, grid_eta_b;
  std::string name;
  std::string model_out;
  std::optional<std::size_t> threads;
};

int run_bench_cmd(const BenchCmd& c, const Common& common, std::ostream& out, OutputGuard& guard) {
  if (!c.seed) throw UsageError("bench requires --seed");
  const auto ds = read_libsvm_file(c.data.path, c.data.options());
  const auto mode = parse_update_mode(c.model.algo);

  BenchConfig config;
  config.mode = mode;
  config.seed = *c.seed;
  config.base = default_params(mode);
  config.base.variant = parse_map_variant(c.model.variant);
  config.base.eta_w = c.model.eta_w;
  if (mode != UpdateMode::WOnly) config.base.eta_u = c.model.eta_u;
  config.grid = default_grid(mode, ds.class_count() > 2);
  config.grid.folds = c.folds;
  for (auto& axis : config.grid.axes) {
    if (axis.name == "D" && !c.grid_d.empty()) axis.values = parse_list(c.grid_d, "--grid-D");
    if (axis.name == "sigma2" && !c.grid_sigma2.empty()) axis.values = parse_list(c.grid_sigma2, "--grid-sigma2");
    if (axis.name == "eta_b" && !c.grid_eta_b.empty()) axis.values = parse_list(c.grid_eta_b, "--grid-eta-b");
  }
  config.subset = c.subset;
  config.threads = c.threads.value_or(worker_count());

  guard.add(c.model_out);
  const auto result = run_bench(ds, config);
  if (!c.model_out.empty()) save_model(c.model_out, result.model);

  Record r;
  r["record"] = "bench";
  r["dataset"] = c.name.empty() ? c.data.path : c.name;
  r["algo"] = std::string(to_string(mode));
  r["seed"] = *c.seed;
  r["D"] = result.grid.best.num_features;
  r["sigma2"] = result.grid.best.sigma2;
  r["eta_w"] = result.grid.best.eta_w;
  r["eta_u"] = result.grid.best.eta_u;
  r["eta_b"] = result.grid.best.eta_b;
  r["cells"] = result.grid.cells.size();
  r["validation_acc"] = result.grid.cells[result.grid.best_index].accuracy;
  if (!common.no_timing) {
    r["train_s"] = fixed(result.report.train_seconds, 2);
    r["test_s"] = fixed(result.report.test_seconds, 2);
  }
  r["online_mistakes"] = result.report.mistakes_online;
  r["test_acc_pct"] = fixed(100.0 * result.report.test_accuracy, 3);
  emit(out, common.fmt(), r);
  return kExitOk;
}

struct KernelCmd {
  std::size_t d = 5;
  std::size_t num_features = 1000;
  double sigma2 = 1.0;
  std::string variant = "phasecos";
  std::size_t pairs = 100;
  std::uint64_t seed = 1;
};

int run_kernel_check(const KernelCmd& c, const Common& common, std::ostream& out) {
  if (c.pairs == 0) throw UsageError("--pairs must be >= 1");
  std::mt19937_64 engine(c.seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::vector<VectorPair> pairs(c.pairs);
  for (auto& [x, y] : pairs) {
    x.resize(c.d);
    y.resize(c.d);
    for (auto& v : x) v = uniform(engine);
    for (auto& v : y) v = uniform(engine);
  }
  if (!(c.sigma2 > 0.0)) throw UsageError("--sigma2 must be positive");
  const auto report =
      approximation_report({c.d, c.num_features, std::sqrt(c.sigma2), parse_map_variant(c.variant)}, pairs, c.seed);
  Record r;
  r["record"] = "kernel-check";
  r["variant"] = std::string(to_string(report.variant));
  r["d"] = c.d;
  r["D"] = c.num_features;
  r["sigma2"] = c.sigma2;
  r["pairs"] = report.pair_count;
  r["mean_abs_error"] = report.mean_abs_error;
  r["max_abs_error"] = report.max_abs_error;
  emit(out, common.fmt(), r);
  return kExitOk;
}

struct DriftCmd {
  std::size_t d = 5;
  std::size_t segment_length = 5000;
  std::size_t segments = 2;
  double angle_deg = 90.0;
  double noise = 0.0;
  std::size_t seeds = 10;
  std::string algo = "mpu-fogdub";
  std::size_t num_features = 200;
  double sigma2 = 1.0;
  double eta_w = 100.0;
  double eta_u = 0.1;
  double eta_b = 0.01;
  std::string export_path;
};

int run_drift(const DriftCmd& c, const Common& common, std::ostream& out, OutputGuard& guard) {
  DriftExperimentConfig config;
  config.stream.dimension = c.d;
  config.stream.segment_lengths.assign(c.segments, c.segment_length);
  config.stream.rotation_angles = {c.angle_deg * std::numbers::pi / 180.0};
  config.stream.noise_std = c.noise;
  config.seeds.clear();
  for (std::uint64_t s = 1; s <= c.seeds; ++s) config.seeds.push_back(s);
  config.params = {c.num_features, c.sigma2, c.eta_w, c.eta_u, c.eta_b, MapVariant::MpuScaled};
  config.adaptive_mode = parse_update_mode(c.algo);

  if (!c.export_path.empty()) {
    guard.add(c.export_path);
    auto stream_config = config.stream;
    stream_config.seed = config.seeds.empty() ? 1 : config.seeds.front();
    std::ofstream file(c.export_path, std::ios::trunc);
    if (!file) throw DataError("cannot write '" + c.export_path + "'");
    write_libsvm(file, generate_drift_stream(stream_config));
  }

  const auto result = run_drift_experiment(config);
  for (const auto& run : result.runs) {
    Record r;
    r["record"] = "drift-seed";
    r["seed"] = run.seed;
    r["fogd_post_drift_rate"] = run.fixed_post_drift_rate;
    r[std::string(to_string(config.adaptive_mode)) + "_post_drift_rate"] = run.adaptive_post_drift_rate;
    emit(out, common.fmt(), r);
  }
  Record s;
  s["record"] = "drift-summary";
  s["seeds"] = result.runs.size();
  s["adaptive_wins"] = result.adaptive_wins;
  s["r_plus"] = result.wilcoxon.r_plus;
  s["r_minus"] = result.wilcoxon.r_minus;
  s["T"] = result.wilcoxon.t;
  s["z"] = result.wilcoxon.z;
  emit(out, common.fmt(), s);
  return kExitOk;
}

struct StatsCmd {
  bool paper_tables = false;
  std::string file;
  std::string a;
  std::string b;
};

/// CSV with a header of column names and one numeric row per dataset.
std::pair<std::vector<double>, std::vector<double>> read_columns(const std::string& path, const std::string& a,
                                                                 const std::string& b) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  const auto split_row = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto first = cell.find_first_not_of(" \t\r");
      const auto last = cell.find_last_not_of(" \t\r");
      cells.push_back(first == std::string::npos ? "" : cell.substr(first, last - first + 1));
    }
    return cells;
  };
  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path + "' is empty");
  const auto header = split_row(line);
  const auto column = [&](const std::string& name) {
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (header[k] == name) return k;
    }
    throw DataError("column '" + name + "' not found in '" + path + "'");
  };
  const auto ia = column(a);
  const auto ib = column(b);
  std::vector<double> va, vb;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size()) throw DataError("wrong number of columns", line_no);
    for (auto [idx, dst] : {std::pair{ia, &va}, std::pair{ib, &vb}}) {
      double v = 0.0;
      const auto& s = cells[idx];
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw DataError("non-numeric cell '" + s + "'", line_no);
      dst->push_back(v);
    }
  }
  return {va, vb};
}

int run_stats(const StatsCmd& c, const Common& common, std::ostream& out) {
  if (c.paper_tables == !c.file.empty()) throw UsageError("stats needs exactly one of --paper-tables or --file");
  std::vector<double> a, b;
  std::string name_a = c.a, name_b = c.b;
  if (c.paper_tables) {
    auto cols = reference::paired(c.a, c.b);
    a = std::move(cols.a);
    b = std::move(cols.b);
    name_a = reference::kAlgorithms[reference::algorithm_index(c.a)];
    name_b = reference::kAlgorithms[reference::algorithm_index(c.b)];
  } else {
    std::tie(a, b) = read_columns(c.file, c.a, c.b);
  }
  const auto w = wilcoxon(a, b);
  Record r;
  r["record"] = "wilcoxon";
  r["a"] = name_a;
  r["b"] = name_b;
  r["n"] = w.n;
  r["r_plus"] = w.r_plus;
  r["r_minus"] = w.r_minus;
  r["T"] = w.t;
  r["z"] = fixed(w.z, 2);
  r["z_exact"] = w.z;
  r["significant"] = significant_at_005(w);
  emit(out, common.fmt(), r);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Online kernel classification with learnable random Fourier features", "rffol"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--format", common.format, "Report format: text | json-lines")->capture_default_str();
  app.add_flag("--no-timing", common.no_timing, "Omit wall-clock fields from reports");

  TrainCmd train;
  auto* train_cmd = app.add_subcommand("train", "Train a model online over a LIBSVM file");
  add_data_options(train_cmd, train.data);
  add_model_options(train_cmd, train.model);
  train_cmd->add_option("--seed", train.model.seed, "Map seed")->capture_default_str();
  train_cmd->add_option("--out", train.out, "Model output path")->required();
  train_cmd->add_option("--trace", train.trace_path, "Write the training trace here instead of stdout");
  train_cmd->add_option("--checkpoint", train.checkpoint, "Mistake-rate checkpoint interval")->capture_default_str();

  PredictCmd pred;
  auto* predict_cmd = app.add_subcommand("predict", "Write one predicted label per input line");
  add_data_options(predict_cmd, pred.data);
  predict_cmd->add_option("--model", pred.model, "Model file")->required();
  predict_cmd->add_option("--out", pred.out, "Output path (default stdout)");

  EvalCmd ev;
  auto* eval_cmd = app.add_subcommand("eval", "Accuracy of a model on a LIBSVM file");
  add_data_options(eval_cmd, ev.data);
  eval_cmd->add_option("--model", ev.model, "Model file")->required();

  BenchCmd bench;
  auto* bench_cmd = app.add_subcommand("bench", "Split, normalize, grid-search, train and test one algorithm");
  add_data_options(bench_cmd, bench.data);
  add_model_options(bench_cmd, bench.model);
  bench_cmd->add_option("--seed", bench.seed, "Seed for split, shuffle and maps (required)");
  bench_cmd->add_option("--subset", bench.subset, "Use only this many instances");
  bench_cmd->add_option("--folds", bench.folds, "k-fold cross-validation instead of the validation split");
  bench_cmd->add_option("--grid-D", bench.grid_d, "Comma-separated D candidates");
  bench_cmd->add_option("--grid-sigma2", bench.grid_sigma2, "Comma-separated sigma^2 candidates");
  bench_cmd->add_option("--grid-eta-b", bench.grid_eta_b, "Comma-separated eta_b candidates");
  bench_cmd->add_option("--name", bench.name, "Dataset name for the report");
  bench_cmd->add_option("--model-out", bench.model_out, "Write the final model here");
  bench_cmd->add_option("--threads", bench.threads, "Worker count (default RFFOL_THREADS or all cores)");

  KernelCmd kern;
  auto* kernel_cmd = app.add_subcommand("kernel-check", "Kernel approximation error of a feature map");
  kernel_cmd->add_option("--d", kern.d, "Input dimension")->capture_default_str();
  kernel_cmd->add_option("--D", kern.num_features, "Number of frequencies")->capture_default_str();
  kernel_cmd->add_option("--sigma2", kern.sigma2, "Kernel width sigma^2")->capture_default_str();
  kernel_cmd->add_option("--variant", kern.variant, "mpu | phasecos | cossin")->capture_default_str();
  kernel_cmd->add_option("--pairs", kern.pairs, "Random pairs in [-1,1]^d")->capture_default_str();
  kernel_cmd->add_option("--seed", kern.seed, "Seed for pairs and map")->capture_default_str();

  DriftCmd drift;
  auto* drift_cmd = app.add_subcommand("drift", "Paired fixed-map vs adaptive-map runs on rotating streams");
  drift_cmd->add_option("--d", drift.d, "Input dimension")->capture_default_str();
  drift_cmd->add_option("--segment-length", drift.segment_length, "Instances per segment")->capture_default_str();
  drift_cmd->add_option("--segments", drift.segments, "Number of segments")->capture_default_str();
  drift_cmd->add_option("--angle-deg", drift.angle_deg, "Rotation per boundary, degrees")->capture_default_str();
  drift_cmd->add_option("--noise", drift.noise, "Margin noise standard deviation")->capture_default_str();
  drift_cmd->add_option("--seeds", drift.seeds, "Run seeds 1..N")->capture_default_str();
  drift_cmd->add_option("--algo", drift.algo, "Adaptive algorithm: mpu-fogdu | mpu-fogdub")->capture_default_str();
  drift_cmd->add_option("--D", drift.num_features, "Number of frequencies")->capture_default_str();
  drift_cmd->add_option("--sigma2", drift.sigma2, "Kernel width sigma^2")->capture_default_str();
  drift_cmd->add_option("--eta-w", drift.eta_w, "Weight step size")->capture_default_str();
  drift_cmd->add_option("--eta-u", drift.eta_u, "Frequency step size")->capture_default_str();
  drift_cmd->add_option("--eta-b", drift.eta_b, "Phase step size")->capture_default_str();
  drift_cmd->add_option("--export", drift.export_path, "Write the first seed's stream as LIBSVM");

  StatsCmd stats;
  auto* stats_cmd = app.add_subcommand("stats", "Wilcoxon signed-ranks test between two accuracy columns");
  stats_cmd->add_flag("--paper-tables", stats.paper_tables, "Use the embedded reference accuracy tables");
  stats_cmd->add_option("--file", stats.file, "CSV with named accuracy columns");
  stats_cmd->add_option("--a", stats.a, "First algorithm/column")->required();
  stats_cmd->add_option("--b", stats.b, "Second algorithm/column")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  OutputGuard guard;
  try {
    common.fmt();
    int code = kExitOk;
    if (train_cmd->parsed()) code = run_train(train, common, out, guard);
    if (predict_cmd->parsed()) code = run_predict(pred, out, guard);
    if (eval_cmd->parsed()) code = run_eval(ev, common, out);
    if (bench_cmd->parsed()) code = run_bench_cmd(bench, common, out, guard);
    if (kernel_cmd->parsed()) code = run_kernel_check(kern, common, out);
    if (drift_cmd->parsed()) code = run_drift(drift, common, out, guard);
    if (stats_cmd->parsed()) code = run_stats(stats, common, out);
    guard.commit();
    return code;
  } catch (const UsageError& e) {
    err << "rffol: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DivergenceError& e) {
    err << "rffol: divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const DataError& e) {
    err << "rffol: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "rffol: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace rffol::cli
