#include "rffol/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "rffol/errors.hpp"

namespace rffol {

std::string_view to_string(MapVariant v) {
  switch (v) {
    case MapVariant::CosSin:
      return "cossin";
    case MapVariant::PhaseCos:
      return "phasecos";
    case MapVariant::MpuScaled:
      return "mpu";
  }
  return "unknown";
}

MapVariant parse_map_variant(std::string_view name) {
  if (name == "cossin") return MapVariant::CosSin;
  if (name == "phasecos") return MapVariant::PhaseCos;
  if (name == "mpu" || name == "mpuscaled") return MapVariant::MpuScaled;
  throw UsageError("unknown map variant '" + std::string(name) + "'");
}

FeatureMap::FeatureMap(std::size_t input_dim, std::size_t num_features, double sigma,
                       MapVariant variant, std::uint64_t seed, std::vector<double> frequencies,
                       std::vector<double> phases)
    : input_dim_(input_dim),
      num_features_(num_features),
      sigma_(sigma),
      variant_(variant),
      seed_(seed),
      frequencies_(std::move(frequencies)),
      phases_(std::move(phases)) {
  if (input_dim_ == 0) throw UsageError("feature map input dimension must be >= 1");
  if (num_features_ == 0) throw UsageError("feature map needs at least one frequency");
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) throw UsageError("kernel width must be positive and finite");
  if (frequencies_.size() != input_dim_ * num_features_)
    throw UsageError("frequency matrix has " + std::to_string(frequencies_.size()) + " entries, expected " +
                     std::to_string(input_dim_ * num_features_));
  if (phases_.size() != num_features_)
    throw UsageError("phase vector has " + std::to_string(phases_.size()) + " entries, expected " +
                     std::to_string(num_features_));
  if (!std::all_of(frequencies_.begin(), frequencies_.end(), [](double v) { return std::isfinite(v); }))
    throw UsageError("frequency matrix has non-finite entries");
}

std::size_t FeatureMap::output_dim() const noexcept {
  return variant_ == MapVariant::CosSin ? 2 * num_features_ : num_features_;
}

double FeatureMap::amplitude() const noexcept {
  const auto big_d = static_cast<double>(num_features_);
  switch (variant_) {
    case MapVariant::CosSin:
      return 1.0 / std::sqrt(big_d);
    case MapVariant::PhaseCos:
      return std::sqrt(2.0 / big_d);
    case MapVariant::MpuScaled:
      return std::numbers::sqrt2 / big_d;
  }
  return 0.0;
}

void FeatureMap::check_input(SparseView x) const {
  for (const auto& f : x) {
    if (f.index == 0 || f.index > input_dim_)
      throw DataError("feature index " + std::to_string(f.index) + " outside map dimension " +
                      std::to_string(input_dim_));
  }
}

void FeatureMap::activations(SparseView x, std::span<double> out) const {
  check_input(x);
  if (out.size() != num_features_) throw UsageError("activation buffer has wrong length");
  if (variant_ == MapVariant::CosSin) {
    std::fill(out.begin(), out.end(), 0.0);
  } else {
    std::copy(phases_.begin(), phases_.end(), out.begin());
  }
  // Row i of the frequency matrix holds component i of every u_j.
  for (const auto& f : x) {
    const double* row = frequencies_.data() + (f.index - 1) * num_features_;
    for (std::size_t j = 0; j < num_features_; ++j) out[j] += f.value * row[j];
  }
}

std::vector<double> FeatureMap::activations(SparseView x) const {
  std::vector<double> out(num_features_);
  activations(x, out);
  return out;
}

void FeatureMap::transform_from_activations(std::span<const double> act, std::span<double> out) const {
  if (act.size() != num_features_ || out.size() != output_dim())
    throw UsageError("transform buffer has wrong length");
  const double amp = amplitude();
  for (std::size_t j = 0; j < num_features_; ++j) out[j] = amp * std::cos(act[j]);
  if (variant_ == MapVariant::CosSin) {
    for (std::size_t j = 0; j < num_features_; ++j) out[num_features_ + j] = amp * std::sin(act[j]);
  }
}

std::vector<double> FeatureMap::transform(SparseView x) const {
  std::vector<double> act(num_features_);
  activations(x, act);
  std::vector<double> out(output_dim());
  transform_from_activations(act, out);
  return out;
}

std::vector<double> FeatureMap::transform(std::span<const double> dense_x) const {
  if (dense_x.size() != input_dim_)
    throw DataError("input has length " + std::to_string(dense_x.size()) + ", map expects " +
                    std::to_string(input_dim_));
  return transform(to_sparse(dense_x));
}

FeatureMap sample_frequencies(std::size_t input_dim, std::size_t num_features, double sigma,
                              std::uint64_t seed, MapVariant variant) {
  if (input_dim == 0) throw UsageError("input dimension must be >= 1");
  if (num_features == 0) throw UsageError("number of features must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw UsageError("kernel width must be positive and finite");

  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / sigma);
  std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);

  std::vector<double> frequencies(input_dim * num_features);
  for (auto& v : frequencies) v = normal(engine);
  std::vector<double> phases(num_features);
  for (auto& v : phases) v = uniform(engine);
  return FeatureMap(input_dim, num_features, sigma, variant, seed, std::move(frequencies), std::move(phases));
}

double rbf_kernel(std::span<const double> x, std::span<const double> y, double sigma) {
  if (x.size() != y.size()) throw DataError("rbf_kernel: length mismatch");
  if (!(sigma > 0.0)) throw UsageError("rbf_kernel: sigma must be positive");
  double sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - y[i];
    sq += diff * diff;
  }
  return std::exp(-sq / (2.0 * sigma * sigma));
}

double approx_kernel(const FeatureMap& map, std::span<const double> x, std::span<const double> y) {
  const auto zx = map.transform(x);
  const auto zy = map.transform(y);
  double dot = 0.0;
  for (std::size_t k = 0; k < zx.size(); ++k) dot += zx[k] * zy[k];
  return dot;
}

KernelApproxReport approximation_report(const MapParams& params, std::span<const VectorPair> pairs,
                                        std::uint64_t seed) {
  if (pairs.empty()) throw UsageError("approximation_report needs at least one pair");
  const auto map = sample_frequencies(params.input_dim, params.num_features, params.sigma, seed, params.variant);

  KernelApproxReport report;
  report.variant = params.variant;
  report.pair_count = pairs.size();
  double total = 0.0;
  for (const auto& [x, y] : pairs) {
    const double err = std::abs(approx_kernel(map, x, y) - rbf_kernel(x, y, params.sigma));
    total += err;
    report.max_abs_error = std::max(report.max_abs_error, err);
  }
  report.mean_abs_error = total / static_cast<double>(pairs.size());
  return report;
}

}  // namespace rffol
