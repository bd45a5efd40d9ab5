#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "rffol/sparse.hpp"

namespace rffol {

/// Random Fourier feature map variants.
///
///  - CosSin:    2D components, (1/sqrt(D)) cos(u_j.x) followed by (1/sqrt(D)) sin(u_j.x)
///  - PhaseCos:  D components, sqrt(2/D) cos(u_j.x + b_j)
///  - MpuScaled: D components, (sqrt(2)/D) cos(u_j.x + b_j)
///
/// MpuScaled is PhaseCos divided by sqrt(D), so its kernel estimate is the
/// PhaseCos estimate divided by D.
enum class MapVariant : std::uint8_t { CosSin = 0, PhaseCos = 1, MpuScaled = 2 };

std::string_view to_string(MapVariant v);
MapVariant parse_map_variant(std::string_view name);

/// Frequencies u (d x D, row-major: entry (i, j) is component i of u_j) and
/// phases b (length D) for a Gaussian kernel of width sigma.
///
/// The map is a plain value. The learner mutates frequencies and phases in
/// place during training; nothing here wraps phases back into [0, 2pi].
class FeatureMap {
 public:
  FeatureMap(std::size_t input_dim, std::size_t num_features, double sigma, MapVariant variant,
             std::uint64_t seed, std::vector<double> frequencies, std::vector<double> phases);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t num_features() const noexcept { return num_features_; }
  /// Length of transform(): 2D for CosSin, D otherwise.
  std::size_t output_dim() const noexcept;
  double sigma() const noexcept { return sigma_; }
  MapVariant variant() const noexcept { return variant_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// Per-component amplitude: 1/sqrt(D), sqrt(2/D) or sqrt(2)/D.
  double amplitude() const noexcept;

  std::span<const double> frequencies() const noexcept { return frequencies_; }
  std::span<const double> phases() const noexcept { return phases_; }
  std::span<double> mutable_frequencies() noexcept { return frequencies_; }
  std::span<double> mutable_phases() noexcept { return phases_; }

  double frequency(std::size_t i, std::size_t j) const { return frequencies_[i * num_features_ + j]; }

  /// a_j = u_j.x + b_j (b omitted for CosSin). Sparse indices are 1-based.
  void activations(SparseView x, std::span<double> out) const;
  std::vector<double> activations(SparseView x) const;

  /// Feature vector phi(x) computed from precomputed activations.
  void transform_from_activations(std::span<const double> act, std::span<double> out) const;

  std::vector<double> transform(SparseView x) const;
  std::vector<double> transform(std::span<const double> dense_x) const;

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

 private:
  void check_input(SparseView x) const;

  std::size_t input_dim_;
  std::size_t num_features_;
  double sigma_;
  MapVariant variant_;
  std::uint64_t seed_;
  std::vector<double> frequencies_;
  std::vector<double> phases_;
};

/// Draws u entries i.i.d. N(0, 1/sigma^2) and b entries uniform on [0, 2pi]
/// from a single engine seeded with `seed`: all frequencies row-major first,
/// then phases. The variant does not affect the draws, so maps of different
/// variants with the same arguments share u and b.
FeatureMap sample_frequencies(std::size_t input_dim, std::size_t num_features, double sigma,
                              std::uint64_t seed, MapVariant variant = MapVariant::MpuScaled);

/// exp(-|x - y|^2 / (2 sigma^2)).
double rbf_kernel(std::span<const double> x, std::span<const double> y, double sigma);

/// transform(x) . transform(y).
double approx_kernel(const FeatureMap& map, std::span<const double> x, std::span<const double> y);

struct KernelApproxReport {
  double mean_abs_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t pair_count = 0;
  MapVariant variant = MapVariant::MpuScaled;
};

struct MapParams {
  std::size_t input_dim;
  std::size_t num_features;
  double sigma;
  MapVariant variant;
};

using VectorPair = std::pair<std::vector<double>, std::vector<double>>;

/// Draws a fresh map and reports |approx_kernel - rbf_kernel| over the pairs.
KernelApproxReport approximation_report(const MapParams& params, std::span<const VectorPair> pairs,
                                        std::uint64_t seed);

}  // namespace rffol
