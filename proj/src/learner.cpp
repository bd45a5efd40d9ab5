#include "rffol/learner.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rffol {

std::string_view to_string(UpdateMode mode) {
  switch (mode) {
    case UpdateMode::WOnly:
      return "fogd";
    case UpdateMode::WU:
      return "mpu-fogdu";
    case UpdateMode::WUB:
      return "mpu-fogdub";
  }
  return "unknown";
}

UpdateMode parse_update_mode(std::string_view name) {
  if (name == "fogd" || name == "wonly") return UpdateMode::WOnly;
  if (name == "mpu-fogdu" || name == "wu") return UpdateMode::WU;
  if (name == "mpu-fogdub" || name == "wub") return UpdateMode::WUB;
  throw UsageError("unknown algorithm '" + std::string(name) + "' (expected fogd, mpu-fogdu or mpu-fogdub)");
}

OnlineModel init_model(FeatureMap map, std::size_t class_count, double eta_w, double eta_u, double eta_b,
                       UpdateMode mode) {
  if (class_count < 1) throw UsageError("class count must be >= 1");
  if (!std::isfinite(eta_w) || !std::isfinite(eta_u) || !std::isfinite(eta_b))
    throw UsageError("learning rates must be finite");
  if (!(eta_w > 0.0)) throw UsageError("weight learning rate must be positive");
  if (eta_u < 0.0 || eta_b < 0.0) throw UsageError("learning rates must be non-negative");
  if (map.variant() == MapVariant::CosSin && mode != UpdateMode::WOnly)
    throw UsageError("cos/sin maps only support weight-only training");

  OnlineModel model{std::move(map), {}, eta_w, eta_u, eta_b, mode, class_count};
  model.weights.assign(class_count * model.width(), 0.0);
  return model;
}

std::vector<double> GradientSet::weight_gradient(std::size_t class_count) const {
  std::vector<double> out(class_count * phi.size(), 0.0);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (std::size_t j = 0; j < phi.size(); ++j) out[rows[k] * phi.size() + j] = signs[k] * phi[j];
  }
  return out;
}

double GradientSet::frequency_gradient(std::size_t i, std::size_t j) const {
  for (const auto& f : input) {
    if (f.index == i + 1) return f.value * g_b[j];
  }
  return 0.0;
}

std::vector<double> GradientSet::frequency_gradient_dense(std::size_t input_dim) const {
  const std::size_t big_d = g_b.size();
  std::vector<double> out(input_dim * big_d, 0.0);
  for (const auto& f : input) {
    for (std::size_t j = 0; j < big_d; ++j) out[(f.index - 1) * big_d + j] = f.value * g_b[j];
  }
  return out;
}

std::vector<double> score(const OnlineModel& model, SparseView x) {
  detail::Forward fwd;
  detail::forward(model, x, fwd);
  return std::move(fwd.scores);
}

double hinge_loss_binary(int label, double score) {
  if (label != -1 && label != 1) throw UsageError("binary label must be -1 or +1, got " + std::to_string(label));
  return std::max(0.0, 1.0 - label * score);
}

Margin multiclass_margin(std::span<const double> scores, std::size_t label) {
  if (scores.size() < 2) throw UsageError("multi-class margin needs at least two scores");
  if (label >= scores.size()) throw UsageError("class label " + std::to_string(label) + " out of range");
  std::size_t runner_up = label == 0 ? 1 : 0;
  for (std::size_t r = 0; r < scores.size(); ++r) {
    if (r != label && scores[r] > scores[runner_up]) runner_up = r;
  }
  const double gamma = scores[label] - scores[runner_up];
  return {gamma, runner_up, std::max(0.0, 1.0 - gamma)};
}

int predict_from_scores(const OnlineModel& model, std::span<const double> scores) {
  if (model.binary()) return scores[0] >= 0.0 ? 1 : -1;
  return static_cast<int>(std::distance(scores.begin(), std::max_element(scores.begin(), scores.end())));
}

int predict(const OnlineModel& model, SparseView x) { return predict_from_scores(model, score(model, x)); }

GradientSet gradients(const OnlineModel& model, SparseView x, int label) {
  detail::check_label(model, label);
  detail::Forward fwd;
  detail::forward(model, x, fwd);
  return detail::gradients_from(model, fwd, x, label);
}

void step(OnlineModel& model, const GradientSet& grads) {
  if (grads.zero()) return;
  const std::size_t width = model.width();
  if (grads.phi.size() != width) throw UsageError("gradient does not match model width");

  bool finite = true;
  for (std::size_t k = 0; k < grads.rows.size(); ++k) {
    auto w = model.row(grads.rows[k]);
    const double coeff = model.eta_w * grads.signs[k];
    for (std::size_t j = 0; j < width; ++j) {
      w[j] -= coeff * grads.phi[j];
      finite = finite && std::isfinite(w[j]);
    }
  }
  if (!finite) throw DivergenceError("non-finite weight after update");

  if (model.mode == UpdateMode::WOnly) return;
  if (model.map.variant() == MapVariant::CosSin) throw UsageError("cos/sin maps only support weight-only training");

  const std::size_t big_d = model.map.num_features();
  auto freq = model.map.mutable_frequencies();
  for (const auto& f : grads.input) {
    double* u = freq.data() + (f.index - 1) * big_d;
    const double coeff = model.eta_u * f.value;
    for (std::size_t j = 0; j < big_d; ++j) {
      u[j] -= coeff * grads.g_b[j];
      finite = finite && std::isfinite(u[j]);
    }
  }
  if (!finite) throw DivergenceError("non-finite frequency after update");

  if (model.mode != UpdateMode::WUB) return;
  auto phases = model.map.mutable_phases();
  for (std::size_t j = 0; j < big_d; ++j) {
    phases[j] -= model.eta_b * grads.g_b[j];
    finite = finite && std::isfinite(phases[j]);
  }
  if (!finite) throw DivergenceError("non-finite phase after update");
}

namespace detail {

void check_label(const OnlineModel& model, int label) {
  if (model.binary()) {
    if (label != -1 && label != 1)
      throw DataError("binary model expects labels -1/+1, got " + std::to_string(label));
  } else if (label < 0 || static_cast<std::size_t>(label) >= model.class_count) {
    throw DataError("class label " + std::to_string(label) + " out of range for " +
                    std::to_string(model.class_count) + " classes");
  }
}

void forward(const OnlineModel& model, SparseView x, Forward& out) {
  const auto& map = model.map;
  out.activations.resize(map.num_features());
  out.phi.resize(map.output_dim());
  out.scores.resize(model.rows());
  map.activations(x, out.activations);
  map.transform_from_activations(out.activations, out.phi);
  for (std::size_t r = 0; r < model.rows(); ++r) {
    const auto w = model.row(r);
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * out.phi[j];
    out.scores[r] = s;
  }
}

GradientSet gradients_from(const OnlineModel& model, const Forward& fwd, SparseView x, int label) {
  GradientSet g;
  const std::size_t big_d = model.map.num_features();
  g.phi = fwd.phi;
  g.g_b.assign(big_d, 0.0);

  // Difference of the two active weight rows: y * w for binary, w_label - w_runner_up otherwise.
  std::vector<double> active;
  if (model.binary()) {
    g.loss = hinge_loss_binary(label, fwd.scores[0]);
    if (g.loss == 0.0) return g;
    g.rows = {0};
    g.signs = {-static_cast<double>(label)};
    const auto w = model.row(0);
    active.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(big_d));
    for (auto& v : active) v *= label;
  } else {
    const auto margin = multiclass_margin(fwd.scores, static_cast<std::size_t>(label));
    g.loss = margin.loss;
    if (g.loss == 0.0) return g;
    g.rows = {static_cast<std::size_t>(label), margin.runner_up};
    g.signs = {-1.0, 1.0};
    const auto wl = model.row(static_cast<std::size_t>(label));
    const auto ws = model.row(margin.runner_up);
    active.resize(big_d);
    for (std::size_t j = 0; j < big_d; ++j) active[j] = wl[j] - ws[j];
  }
  if (model.map.variant() == MapVariant::CosSin) {
    if (model.mode != UpdateMode::WOnly)
      throw UsageError("frequency and phase gradients are undefined for cos/sin maps");
    return g;
  }
  const double amp = model.map.amplitude();
  for (std::size_t j = 0; j < big_d; ++j) g.g_b[j] = active[j] * amp * std::sin(fwd.activations[j]);
  g.input.assign(x.begin(), x.end());
  return g;
}

void TraceRecorder::record(bool mistake, bool loss_event) {
  ++trace_.steps;
  if (mistake) ++trace_.mistakes;
  if (loss_event) ++trace_.loss_events;
  const bool periodic = options_.checkpoint_interval != 0 && trace_.steps % options_.checkpoint_interval == 0;
  const bool extra = std::find(options_.extra_checkpoints.begin(), options_.extra_checkpoints.end(),
                               trace_.steps) != options_.extra_checkpoints.end();
  if (periodic || extra) checkpoint();
}

void TraceRecorder::finish() {
  if (trace_.steps == 0) return;
  if (trace_.cumulative_mistake_rate.empty() || trace_.cumulative_mistake_rate.back().step != trace_.steps)
    checkpoint();
}

void TraceRecorder::checkpoint() {
  trace_.cumulative_mistake_rate.push_back(
      {trace_.steps, trace_.mistakes, static_cast<double>(trace_.mistakes) / static_cast<double>(trace_.steps)});
}

}  // namespace detail
}  // namespace rffol
