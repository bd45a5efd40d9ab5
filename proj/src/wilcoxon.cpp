#include "rffol/wilcoxon.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <string>

#include "rffol/errors.hpp"

namespace rffol {
namespace {

constexpr double kRelativeTieTolerance = 1e-9;

bool tied(double x, double y) {
  return std::abs(x - y) <= kRelativeTieTolerance * std::max(std::abs(x), std::abs(y));
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });

  std::vector<double> ranks(values.size());
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() && tied(values[order[start]], values[order[end]])) ++end;
    // Positions start..end-1 hold ranks start+1..end.
    const double avg = (static_cast<double>(start + 1) + static_cast<double>(end)) / 2.0;
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = avg;
    start = end;
  }
  return ranks;
}

WilcoxonResult wilcoxon(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw UsageError("wilcoxon: score lists differ in length");
  if (a.empty()) throw UsageError("wilcoxon: need at least one pair");

  const std::size_t n = a.size();
  std::vector<double> diff(n), magnitude(n);
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = a[i] - b[i];
    const double scale = std::max(std::abs(a[i]), std::abs(b[i]));
    if (std::abs(diff[i]) <= kRelativeTieTolerance * scale) diff[i] = 0.0;
    magnitude[i] = std::abs(diff[i]);
  }
  const auto ranks = average_ranks(magnitude);

  WilcoxonResult r;
  r.n = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (diff[i] > 0.0) {
      r.r_plus += ranks[i];
    } else if (diff[i] < 0.0) {
      r.r_minus += ranks[i];
    } else {
      r.r_plus += ranks[i] / 2.0;
      r.r_minus += ranks[i] / 2.0;
    }
  }
  r.t = std::min(r.r_plus, r.r_minus);
  const auto nd = static_cast<double>(n);
  r.z = (r.t - nd * (nd + 1.0) / 4.0) / std::sqrt(nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0);
  return r;
}

namespace reference {
namespace {

constexpr double kNone = -1.0;

// Rows follow kAlgorithms, columns follow kDatasets.
constexpr double kTable[10][12] = {
    // skin    kddcup08 ijcnn1  w7a     codrna  covtype combined mnist600k poker  acoustic forest  aloi
    {90.233, 100.000, 67.672, 95.556, 91.790, 75.317, 73.563, 53.961, 27.160, 67.039, 51.347, 58.419},  // LR
    {90.068, 100.000, 71.670, 96.457, 91.843, 76.072, 77.792, 83.743, 31.614, 67.335, 71.210, 75.879},  // OGD
    {81.630, 100.000, 70.022, 95.681, 91.791, 75.195, 75.936, 82.630, 28.331, 65.489, 69.334, 75.674},  // PA
    {99.942, 100.000, 98.014, 98.477, 96.172, 85.316, 79.249, 95.680, 48.089, 67.658, 75.685, 86.694},  // FOGD
    {99.047, 99.452, 90.572, 97.062, 92.468, 71.721, 71.526, 78.585, 52.290, 67.500, 67.913, 52.180},   // NOGD
    {99.949, 100.000, 97.780, 98.494, 96.030, 85.045, 79.995, 95.712, 48.702, 67.438, 75.298, 86.778},  // RRF
    {99.829, 100.000, 98.687, 98.664, 96.258, 81.204, kNone, kNone, kNone, kNone, kNone, kNone},        // PAMO
    {99.616, 99.717, 94.062, 98.360, 95.107, 71.149, 60.601, 84.399, 44.396, 58.972, 63.478, 27.301},   // AVM
    {99.951, 100.000, 98.885, 98.388, 96.588, 90.880, 83.223, 99.096, 93.658, 74.032, 84.884, 83.576},  // MPU-FOGDU
    {99.954, 100.000, 98.885, 98.396, 96.701, 90.927, 83.214, 99.097, 94.270, 74.304, 84.951, 83.597},  // MPU-FOGDUB
};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::size_t dataset_index(std::string_view dataset) {
  const auto key = lower(dataset);
  for (std::size_t k = 0; k < kDatasets.size(); ++k) {
    if (lower(kDatasets[k]) == key) return k;
  }
  throw UsageError("unknown dataset '" + std::string(dataset) + "'");
}

}  // namespace

std::size_t algorithm_index(std::string_view algorithm) {
  const auto key = lower(algorithm);
  for (std::size_t k = 0; k < kAlgorithms.size(); ++k) {
    if (lower(kAlgorithms[k]) == key) return k;
  }
  throw UsageError("unknown algorithm '" + std::string(algorithm) + "'");
}

std::optional<double> accuracy(std::string_view algorithm, std::string_view dataset) {
  const double v = kTable[algorithm_index(algorithm)][dataset_index(dataset)];
  if (v == kNone) return std::nullopt;
  return v;
}

PairedColumns paired(std::string_view algorithm_a, std::string_view algorithm_b) {
  const auto ia = algorithm_index(algorithm_a);
  const auto ib = algorithm_index(algorithm_b);
  PairedColumns out;
  for (std::size_t k = 0; k < kDatasets.size(); ++k) {
    if (kTable[ia][k] == kNone || kTable[ib][k] == kNone) continue;
    out.a.push_back(kTable[ia][k]);
    out.b.push_back(kTable[ib][k]);
    out.datasets.push_back(kDatasets[k]);
  }
  return out;
}

}  // namespace reference
}  // namespace rffol
