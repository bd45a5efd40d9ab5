#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rffol/data.hpp"
#include "rffol/features.hpp"
#include "rffol/learner.hpp"
#include "rffol/wilcoxon.hpp"

namespace rffol {

struct EvalReport {
  double test_accuracy = 0.0;
  double train_seconds = 0.0;
  double test_seconds = 0.0;
  std::size_t mistakes_online = 0;
  std::size_t instance_count = 0;
  std::size_t correct = 0;
};

/// Accuracy of `predict` over the dataset, timing the prediction pass.
EvalReport evaluate(const OnlineModel& model, const Dataset& dataset);

/// Everything needed to build one model, apart from the data.
struct HyperParams {
  std::size_t num_features = 400;
  double sigma2 = 1.0;
  double eta_w = 100.0;
  double eta_u = 0.1;
  double eta_b = 0.01;
  MapVariant variant = MapVariant::MpuScaled;

  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

/// Fresh model for data of the given dimension and label count. The map is
/// drawn with sigma = sqrt(sigma2) from `seed`.
OnlineModel make_model(const HyperParams& params, UpdateMode mode, std::size_t input_dim, std::size_t classes,
                       std::uint64_t seed);

/// One named hyperparameter axis. Recognised names: D, sigma2, eta_w, eta_u, eta_b.
struct GridAxis {
  std::string name;
  std::vector<double> values;
};

struct GridSpec {
  std::vector<GridAxis> axes;
  /// 0 or 1: select on the validation set. k >= 2: k-fold cross-validation
  /// over train and validation combined.
  std::size_t folds = 0;

  std::size_t cell_count() const;
  /// Parameters of cell `index`; the first axis varies slowest.
  HyperParams cell(const HyperParams& base, std::size_t index) const;
};

/// Candidate lists for each algorithm: D x sigma2, plus eta_b for
/// MPU-FOGDUB. Multi-class data uses the shorter D list.
GridSpec default_grid(UpdateMode mode, bool multiclass);

/// Fixed rates for a mode: eta_w = 100 and eta_u = 0.1; FOGD gets eta_u = eta_b = 0
/// and MPU-FOGDU eta_b = 0.
HyperParams default_params(UpdateMode mode);

struct CellResult {
  HyperParams params;
  double accuracy = 0.0;
  bool failed = false;
  std::string error;
};

struct GridResult {
  std::size_t best_index = 0;
  HyperParams best;
  std::vector<CellResult> cells;
};

/// Worker count from RFFOL_THREADS, else hardware concurrency (at least 1).
std::size_t worker_count();

/// Trains one model per cell and keeps the most accurate, first index on
/// ties. Diverging cells are recorded as failed; if every cell fails a
/// DivergenceError is thrown. Results do not depend on `threads`.
GridResult grid_search(const GridSpec& spec, const HyperParams& base, const Dataset& train,
                       const Dataset& validation, UpdateMode mode, std::uint64_t seed, std::size_t threads = 1);

struct BenchConfig {
  UpdateMode mode = UpdateMode::WUB;
  std::uint64_t seed = 1;
  HyperParams base;
  GridSpec grid;
  /// Keep only this many instances (after a seeded shuffle) before splitting.
  std::optional<std::size_t> subset;
  std::size_t threads = 1;
};

struct BenchResult {
  GridResult grid;
  OnlineModel model;
  TrainTrace trace;
  EvalReport report;
};

/// Split 60/20/20, normalize on the training part, grid-search on
/// validation, retrain the best cell on the training part and score the
/// test part.
BenchResult run_bench(const Dataset& dataset, const BenchConfig& config);

struct DriftExperimentConfig {
  DriftStreamConfig stream;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  HyperParams params{200, 1.0, 100.0, 0.1, 0.01, MapVariant::MpuScaled};
  UpdateMode adaptive_mode = UpdateMode::WUB;
};

struct DriftSeedResult {
  std::uint64_t seed;
  double fixed_post_drift_rate;
  double adaptive_post_drift_rate;
};

struct DriftExperimentResult {
  std::vector<DriftSeedResult> runs;
  std::size_t adaptive_wins = 0;
  /// a = post-drift online accuracy of the fixed map, b = of the adaptive map.
  WilcoxonResult wilcoxon;
};

/// For each seed: one drift stream and one map, trained once with a fixed
/// map (FOGD) and once with `adaptive_mode`. Compares cumulative mistake
/// rates over everything after the first segment.
DriftExperimentResult run_drift_experiment(const DriftExperimentConfig& config);

}  // namespace rffol
