#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rffol/errors.hpp"
#include "rffol/features.hpp"
#include "rffol/sparse.hpp"

namespace rffol {

/// Which parameters an update touches: w only (FOGD), w and u (MPU-FOGDU),
/// or w, u and b (MPU-FOGDUB).
enum class UpdateMode : std::uint8_t { WOnly = 0, WU = 1, WUB = 2 };

std::string_view to_string(UpdateMode mode);
/// Accepts "fogd", "mpu-fogdu", "mpu-fogdub" (and the enum names).
UpdateMode parse_update_mode(std::string_view name);

/// Learner state. `class_count == 1` is a binary model with labels in
/// {-1, +1}; otherwise labels are class indices 0..m-1 and there is one
/// weight row per class. Weights are row-major, m x map.output_dim().
struct OnlineModel {
  FeatureMap map;
  std::vector<double> weights;
  double eta_w = 0.0;
  double eta_u = 0.0;
  double eta_b = 0.0;
  UpdateMode mode = UpdateMode::WOnly;
  std::size_t class_count = 1;

  bool binary() const noexcept { return class_count == 1; }
  std::size_t rows() const noexcept { return class_count; }
  std::size_t width() const noexcept { return map.output_dim(); }
  std::span<const double> row(std::size_t r) const { return {weights.data() + r * width(), width()}; }
  std::span<double> row(std::size_t r) { return {weights.data() + r * width(), width()}; }

  friend bool operator==(const OnlineModel&, const OnlineModel&) = default;
};

/// Zero weights. Rejects class_count < 1, eta_w <= 0, negative or non-finite rates.
OnlineModel init_model(FeatureMap map, std::size_t class_count, double eta_w, double eta_u, double eta_b,
                       UpdateMode mode);

/// Number of weight rows for a dataset with `dataset_classes` labels.
inline std::size_t model_rows_for(std::size_t dataset_classes) {
  return dataset_classes <= 2 ? 1 : dataset_classes;
}

/// Hinge-loss subgradients at one example.
///
/// The weight gradient is stored as signed copies of phi: row `rows[k]` of
/// g_w equals `signs[k] * phi` and every other row is zero. The phase
/// gradient g_b is dense; the frequency gradient is the outer product
/// g_u(i, j) = x_i * g_b[j], kept implicit through `input`.
struct GradientSet {
  double loss = 0.0;
  std::vector<double> phi;
  std::vector<std::size_t> rows;
  std::vector<double> signs;
  std::vector<double> g_b;
  SparseVector input;

  bool zero() const noexcept { return loss == 0.0; }

  /// Dense m x width weight gradient.
  std::vector<double> weight_gradient(std::size_t class_count) const;
  /// Entry (i, j) of the d x D frequency gradient; i is 0-based.
  double frequency_gradient(std::size_t i, std::size_t j) const;
  /// Dense d x D frequency gradient, row-major.
  std::vector<double> frequency_gradient_dense(std::size_t input_dim) const;
};

struct TrainTrace {
  struct Checkpoint {
    std::size_t step;
    std::size_t mistakes;
    double rate;
  };

  std::size_t steps = 0;
  std::size_t mistakes = 0;
  std::size_t loss_events = 0;
  std::vector<Checkpoint> cumulative_mistake_rate;
};

struct TrainOptions {
  /// Record a cumulative mistake-rate checkpoint every this many steps (0
  /// disables periodic checkpoints). The final step is always recorded.
  std::size_t checkpoint_interval = 1000;
  /// Additional checkpoint steps, e.g. segment boundaries of a drift stream.
  std::vector<std::size_t> extra_checkpoints;
};

/// Per-class scores w . phi(x); a single entry for binary models.
std::vector<double> score(const OnlineModel& model, SparseView x);

/// max(0, 1 - label * score); label must be -1 or +1.
double hinge_loss_binary(int label, double score);

struct Margin {
  double gamma;
  std::size_t runner_up;
  double loss;
};

/// Margin between the true class and the best other class (ties to the
/// lowest index), and its hinge loss.
Margin multiclass_margin(std::span<const double> scores, std::size_t label);

GradientSet gradients(const OnlineModel& model, SparseView x, int label);

/// Applies one update. A zero-loss gradient leaves the model untouched.
/// Throws DivergenceError if a touched parameter becomes non-finite.
void step(OnlineModel& model, const GradientSet& grads);

/// Binary: sign of the score with sign(0) = +1. Multi-class: argmax, ties to
/// the lowest index.
int predict(const OnlineModel& model, SparseView x);
int predict_from_scores(const OnlineModel& model, std::span<const double> scores);

/// Algorithm 1 over the stream: predict, measure the loss, update when the
/// loss is positive. Every instance is seen exactly once, in order.
/// A DivergenceError carries the 0-based index of the offending instance.
template <typename Stream>
TrainTrace train_online(OnlineModel& model, const Stream& stream, const TrainOptions& options = {});

namespace detail {

/// One example's forward pass: activations, phi and scores. Shared by
/// prediction and gradient computation so training evaluates the map once.
struct Forward {
  std::vector<double> activations;
  std::vector<double> phi;
  std::vector<double> scores;
};

void forward(const OnlineModel& model, SparseView x, Forward& out);
GradientSet gradients_from(const OnlineModel& model, const Forward& fwd, SparseView x, int label);
void check_label(const OnlineModel& model, int label);

class TraceRecorder {
 public:
  TraceRecorder(const TrainOptions& options, TrainTrace& trace) : options_(options), trace_(trace) {}
  void record(bool mistake, bool loss_event);
  void finish();

 private:
  void checkpoint();

  const TrainOptions& options_;
  TrainTrace& trace_;
};

}  // namespace detail

template <typename Stream>
TrainTrace train_online(OnlineModel& model, const Stream& stream, const TrainOptions& options) {
  TrainTrace trace;
  detail::TraceRecorder recorder(options, trace);
  detail::Forward fwd;
  std::size_t index = 0;
  for (const auto& inst : stream) {
    const SparseView x(inst.features);
    detail::check_label(model, inst.label);
    detail::forward(model, x, fwd);
    const bool mistake = predict_from_scores(model, fwd.scores) != inst.label;
    auto grads = detail::gradients_from(model, fwd, x, inst.label);
    const bool loss_event = !grads.zero();
    if (loss_event) {
      try {
        step(model, grads);
      } catch (const DivergenceError& e) {
        throw DivergenceError(std::string(e.what()) + " at step " + std::to_string(index), index);
      }
    }
    recorder.record(mistake, loss_event);
    ++index;
  }
  recorder.finish();
  return trace;
}

}  // namespace rffol
