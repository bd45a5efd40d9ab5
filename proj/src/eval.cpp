#include "rffol/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>

#include "rffol/errors.hpp"

namespace rffol {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Runs job(i) for i in [0, count) on up to `threads` workers.
template <typename Job>
void parallel_for(std::size_t count, std::size_t threads, Job job) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
  }
  for (auto& th : pool) th.join();
}

double train_and_score(const HyperParams& params, UpdateMode mode, const Dataset& train, const Dataset& validation,
                       std::uint64_t seed) {
  auto model = make_model(params, mode, train.dimension, train.class_count(), seed);
  TrainOptions options;
  options.checkpoint_interval = 0;
  train_online(model, train, options);
  return evaluate(model, validation).test_accuracy;
}

Dataset merged(const Dataset& a, const Dataset& b) {
  Dataset out = a;
  out.instances.insert(out.instances.end(), b.instances.begin(), b.instances.end());
  out.dimension = std::max(a.dimension, b.dimension);
  return out;
}

}  // namespace

EvalReport evaluate(const OnlineModel& model, const Dataset& dataset) {
  if (dataset.empty()) throw DataError("cannot evaluate on an empty dataset");
  const auto start = Clock::now();
  EvalReport report;
  for (const auto& inst : dataset.instances) {
    if (predict(model, inst.features) == inst.label) ++report.correct;
  }
  report.test_seconds = seconds_since(start);
  report.instance_count = dataset.size();
  report.test_accuracy = static_cast<double>(report.correct) / static_cast<double>(report.instance_count);
  return report;
}

OnlineModel make_model(const HyperParams& params, UpdateMode mode, std::size_t input_dim, std::size_t classes,
                       std::uint64_t seed) {
  if (!(params.sigma2 > 0.0)) throw UsageError("sigma2 must be positive");
  auto map = sample_frequencies(input_dim, params.num_features, std::sqrt(params.sigma2), seed, params.variant);
  return init_model(std::move(map), model_rows_for(classes), params.eta_w, params.eta_u, params.eta_b, mode);
}

std::size_t GridSpec::cell_count() const {
  std::size_t n = 1;
  for (const auto& axis : axes) n *= axis.values.size();
  return n;
}

HyperParams GridSpec::cell(const HyperParams& base, std::size_t index) const {
  if (index >= cell_count()) throw UsageError("grid cell " + std::to_string(index) + " out of range");
  HyperParams p = base;
  for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
    const auto& axis = *it;
    const double v = axis.values[index % axis.values.size()];
    index /= axis.values.size();
    if (axis.name == "D") {
      if (!(v >= 1.0) || v != std::floor(v)) throw UsageError("grid value for D must be a positive integer");
      p.num_features = static_cast<std::size_t>(v);
    } else if (axis.name == "sigma2") {
      p.sigma2 = v;
    } else if (axis.name == "eta_w") {
      p.eta_w = v;
    } else if (axis.name == "eta_u") {
      p.eta_u = v;
    } else if (axis.name == "eta_b") {
      p.eta_b = v;
    } else {
      throw UsageError("unknown grid axis '" + axis.name + "'");
    }
  }
  return p;
}

GridSpec default_grid(UpdateMode mode, bool multiclass) {
  GridSpec spec;
  if (multiclass) {
    spec.axes.push_back({"D", {200, 300, 400, 500, 1000, 2000}});
  } else {
    spec.axes.push_back({"D", {200, 300, 400, 500, 1000, 2000, 4000, 6000, 8000}});
  }
  GridAxis widths{"sigma2", {}};
  for (int e = -16; e <= 4; e += 2) widths.values.push_back(std::ldexp(1.0, e));
  spec.axes.push_back(std::move(widths));
  if (mode == UpdateMode::WUB) spec.axes.push_back({"eta_b", {1e-6, 1e-4, 1e-2, 1e-1}});
  return spec;
}

HyperParams default_params(UpdateMode mode) {
  HyperParams p;
  p.eta_w = 100.0;
  p.eta_u = mode == UpdateMode::WOnly ? 0.0 : 0.1;
  p.eta_b = mode == UpdateMode::WUB ? 0.01 : 0.0;
  return p;
}

std::size_t worker_count() {
  if (const char* env = std::getenv("RFFOL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

GridResult grid_search(const GridSpec& spec, const HyperParams& base, const Dataset& train,
                       const Dataset& validation, UpdateMode mode, std::uint64_t seed, std::size_t threads) {
  for (const auto& axis : spec.axes) {
    if (axis.values.empty()) throw UsageError("grid axis '" + axis.name + "' has no values");
  }
  if (train.empty()) throw DataError("grid search needs a non-empty training set");

  std::vector<Dataset> fold_train, fold_val;
  if (spec.folds >= 2) {
    const auto pool = shuffled(merged(train, validation), seed);
    if (pool.size() < spec.folds) throw DataError("fewer instances than folds");
    for (std::size_t f = 0; f < spec.folds; ++f) {
      Dataset tr = head(pool, 0), va = head(pool, 0);
      for (std::size_t k = 0; k < pool.size(); ++k) {
        (k * spec.folds / pool.size() == f ? va : tr).instances.push_back(pool.instances[k]);
      }
      fold_train.push_back(std::move(tr));
      fold_val.push_back(std::move(va));
    }
  } else if (validation.empty()) {
    throw DataError("grid search needs a non-empty validation set");
  }

  const std::size_t count = spec.cell_count();
  GridResult result;
  result.cells.resize(count);
  std::vector<std::exception_ptr> errors(count);
  parallel_for(count, threads, [&](std::size_t i) {
    auto& cell = result.cells[i];
    cell.params = spec.cell(base, i);
    try {
      if (spec.folds >= 2) {
        double total = 0.0;
        for (std::size_t f = 0; f < spec.folds; ++f)
          total += train_and_score(cell.params, mode, fold_train[f], fold_val[f], seed);
        cell.accuracy = total / static_cast<double>(spec.folds);
      } else {
        cell.accuracy = train_and_score(cell.params, mode, train, validation, seed);
      }
    } catch (const DivergenceError& e) {
      cell.failed = true;
      cell.error = e.what();
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  bool any = false;
  for (std::size_t i = 0; i < count; ++i) {
    const auto& cell = result.cells[i];
    if (cell.failed) continue;
    if (!any || cell.accuracy > result.cells[result.best_index].accuracy) {
      result.best_index = i;
      any = true;
    }
  }
  if (!any) throw DivergenceError("every grid cell diverged");
  result.best = result.cells[result.best_index].params;
  return result;
}

BenchResult run_bench(const Dataset& dataset, const BenchConfig& config) {
  if (dataset.empty()) throw DataError("bench needs a non-empty dataset");
  const Dataset& source = dataset;
  Dataset reduced;
  if (config.subset) reduced = head(shuffled(dataset, config.seed), *config.subset);
  const auto parts = split(config.subset ? reduced : source, config.seed);

  const auto normalizer = fit_normalizer(parts.train);
  const auto train = apply_normalizer(normalizer, parts.train);
  const auto validation = apply_normalizer(normalizer, parts.validation);
  const auto test = apply_normalizer(normalizer, parts.test);

  auto grid = grid_search(config.grid, config.base, train, validation, config.mode, config.seed, config.threads);

  auto model = make_model(grid.best, config.mode, train.dimension, train.class_count(), config.seed);
  const auto start = Clock::now();
  auto trace = train_online(model, train);
  const double train_seconds = seconds_since(start);

  auto report = evaluate(model, test);
  report.train_seconds = train_seconds;
  report.mistakes_online = trace.mistakes;
  return {std::move(grid), std::move(model), std::move(trace), report};
}

namespace {

double post_drift_rate(const TrainTrace& trace, std::size_t boundary) {
  std::size_t at_boundary = 0;
  for (const auto& c : trace.cumulative_mistake_rate) {
    if (c.step == boundary) at_boundary = c.mistakes;
  }
  return static_cast<double>(trace.mistakes - at_boundary) / static_cast<double>(trace.steps - boundary);
}

}  // namespace

DriftExperimentResult run_drift_experiment(const DriftExperimentConfig& config) {
  if (config.seeds.empty()) throw UsageError("drift experiment needs at least one seed");
  if (config.adaptive_mode == UpdateMode::WOnly) throw UsageError("adaptive mode must update the map");

  DriftExperimentResult result;
  std::vector<double> fixed_acc, adaptive_acc;
  for (const auto seed : config.seeds) {
    auto stream_config = config.stream;
    stream_config.seed = seed;
    const auto stream = generate_drift_stream(stream_config);
    const std::size_t boundary = stream_config.segment_lengths.front();

    TrainOptions options;
    options.checkpoint_interval = 0;
    options.extra_checkpoints = {boundary};

    auto fixed = make_model(config.params, UpdateMode::WOnly, stream.dimension, stream.class_count(), seed);
    auto adaptive = fixed;
    adaptive.mode = config.adaptive_mode;
    const auto fixed_trace = train_online(fixed, stream, options);
    const auto adaptive_trace = train_online(adaptive, stream, options);

    DriftSeedResult run{seed, post_drift_rate(fixed_trace, boundary), post_drift_rate(adaptive_trace, boundary)};
    if (run.adaptive_post_drift_rate < run.fixed_post_drift_rate) ++result.adaptive_wins;
    fixed_acc.push_back(1.0 - run.fixed_post_drift_rate);
    adaptive_acc.push_back(1.0 - run.adaptive_post_drift_rate);
    result.runs.push_back(run);
  }
  result.wilcoxon = wilcoxon(fixed_acc, adaptive_acc);
  return result;
}

}  // namespace rffol
