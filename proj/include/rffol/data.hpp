#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rffol/sparse.hpp"

namespace rffol {

/// Binary labels are -1/+1; multi-class labels are 0-based class indices.
struct Instance {
  SparseVector features;
  int label = 0;

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Internal label <-> original label table. Originals are kept sorted
/// ascending; with two entries the smaller maps to -1 and the larger to +1,
/// otherwise entry k maps to class k.
struct LabelMap {
  std::vector<double> originals;

  std::size_t class_count() const noexcept { return originals.size(); }
  bool binary() const noexcept { return originals.size() == 2; }
  /// Internal label for an original value, or nullopt when unknown.
  std::optional<int> to_internal(double original) const;
  double to_original(int internal) const;

  friend bool operator==(const LabelMap&, const LabelMap&) = default;
};

struct Dataset {
  std::vector<Instance> instances;
  std::size_t dimension = 0;
  LabelMap label_map;

  std::size_t size() const noexcept { return instances.size(); }
  bool empty() const noexcept { return instances.empty(); }
  std::size_t class_count() const noexcept { return label_map.class_count(); }
  auto begin() const { return instances.begin(); }
  auto end() const { return instances.end(); }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct ParseOptions {
  /// Force d instead of taking the largest index seen; larger indices are an error.
  std::optional<std::size_t> dimension;
  /// Fix the label table instead of deriving it from the file; unknown labels are an error.
  std::optional<LabelMap> labels;
};

/// LIBSVM text: one "label idx:val idx:val ..." per line, indices strictly
/// increasing. Blank lines are skipped; everything else either parses or
/// throws a DataError naming the line.
Dataset parse_libsvm(std::string_view text, const ParseOptions& options = {});
Dataset read_libsvm_file(const std::string& path, const ParseOptions& options = {});

/// Inverse of parse_libsvm, writing original labels and shortest
/// round-trip decimal values.
std::string to_libsvm(const Dataset& dataset);
void write_libsvm(std::ostream& out, const Dataset& dataset);

/// Parses "1,2,3" into a label table (sorted, duplicates rejected).
LabelMap parse_label_list(std::string_view list);

/// Per-feature affine map onto [-1, 1] fitted on a training set. Absent
/// entries of a sparse instance count as zeros when fitting.
class Normalizer {
 public:
  struct Range {
    double min;
    double max;
  };

  explicit Normalizer(std::vector<std::optional<Range>> ranges) : ranges_(std::move(ranges)) {}

  /// Feature j (1-based) -> range, or nullopt when j never appeared in the fitting set.
  const std::optional<Range>& range(std::size_t index) const;
  std::size_t dimension() const noexcept { return ranges_.size(); }

  double apply(std::size_t index, double value) const;

 private:
  std::vector<std::optional<Range>> ranges_;
};

Normalizer fit_normalizer(const Dataset& dataset);
Dataset apply_normalizer(const Normalizer& normalizer, const Dataset& dataset);

struct Split {
  Dataset train;
  Dataset validation;
  Dataset test;
};

/// Seeded uniform shuffle followed by a contiguous cut into
/// floor(r0 n), floor(r1 n) and the remainder.
Split split(const Dataset& dataset, std::array<double, 3> ratios, std::uint64_t seed);
inline Split split(const Dataset& dataset, std::uint64_t seed) { return split(dataset, {0.6, 0.2, 0.2}, seed); }

/// Seeded shuffle of the instance order.
Dataset shuffled(const Dataset& dataset, std::uint64_t seed);
/// First n instances (or all when n exceeds the size).
Dataset head(const Dataset& dataset, std::size_t n);

struct DriftStreamConfig {
  std::size_t dimension = 5;
  std::vector<std::size_t> segment_lengths{5000, 5000};
  /// Rotation applied at each boundary (segment_lengths.size() - 1 entries,
  /// or a single entry reused at every boundary).
  std::vector<double> rotation_angles{1.5707963267948966};
  double noise_std = 0.0;
  std::uint64_t seed = 1;
};

/// x uniform on [-1, 1]^d labelled by sign(w.x + e), e ~ N(0, noise_std^2),
/// sign(0) = +1. w starts as a random unit vector and rotates by the
/// configured angle inside a fixed random 2-plane at every segment boundary.
Dataset generate_drift_stream(const DriftStreamConfig& config);

/// Unit direction labelling segment `segment` (0-based) of the stream.
std::vector<double> drift_direction(const DriftStreamConfig& config, std::size_t segment);

}  // namespace rffol
