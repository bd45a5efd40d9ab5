#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rffol {

/// One nonzero entry of a sparse vector. Indices are 1-based, as in LIBSVM.
struct Feature {
  std::uint32_t index;
  double value;

  friend bool operator==(const Feature&, const Feature&) = default;
};

/// Strictly increasing indices, no duplicates.
using SparseVector = std::vector<Feature>;
using SparseView = std::span<const Feature>;

/// Sparse view of a dense vector, skipping exact zeros.
inline SparseVector to_sparse(std::span<const double> dense) {
  SparseVector out;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) out.push_back({static_cast<std::uint32_t>(i + 1), dense[i]});
  }
  return out;
}

inline std::vector<double> to_dense(SparseView x, std::size_t dim) {
  std::vector<double> out(dim, 0.0);
  for (const auto& f : x) {
    if (f.index >= 1 && f.index <= dim) out[f.index - 1] = f.value;
  }
  return out;
}

}  // namespace rffol
