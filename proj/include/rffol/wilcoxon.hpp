#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace rffol {

struct WilcoxonResult {
  double r_plus = 0.0;
  double r_minus = 0.0;
  double t = 0.0;
  double z = 0.0;
  std::size_t n = 0;
};

/// Wilcoxon signed-ranks statistic for paired scores. d_i = a_i - b_i is
/// ranked by |d_i| (average ranks on ties); zero differences are ranked and
/// their ranks split evenly between R+ and R-. T = min(R+, R-) and
/// z = (T - n(n+1)/4) / sqrt(n(n+1)(2n+1)/24).
///
/// Differences are compared with a relative tolerance of 1e-9 so that values
/// equal in decimal but not in binary (0.90 - 0.95 vs 0.80 - 0.85) tie.
WilcoxonResult wilcoxon(std::span<const double> a, std::span<const double> b);

/// Average ranks (1-based) of the values, ascending, ties within the relative tolerance.
std::vector<double> average_ranks(std::span<const double> values);

/// |z| above the two-sided 0.05 critical value.
inline bool significant_at_005(const WilcoxonResult& r) { return r.z < -1.96 || r.z > 1.96; }

/// Reference test accuracies (percent) of ten online classifiers on twelve
/// benchmark datasets. PAMO has no multi-class entries.
namespace reference {

inline constexpr std::array<std::string_view, 10> kAlgorithms{
    "LR", "OGD", "PA", "FOGD", "NOGD", "RRF", "PAMO", "AVM", "MPU-FOGDU", "MPU-FOGDUB"};

inline constexpr std::array<std::string_view, 12> kDatasets{
    "skin",     "kddcup08", "ijcnn1",  "w7a",      "codrna", "covtype",
    "combined", "mnist600k", "poker", "acoustic", "forest", "aloi"};

/// Accuracy for (algorithm, dataset), nullopt where the table has no entry.
/// Names are matched case-insensitively. Throws UsageError for unknown names.
std::optional<double> accuracy(std::string_view algorithm, std::string_view dataset);

/// Index into kAlgorithms, case-insensitive; accepts CLI spellings like "mpu-fogdub".
std::size_t algorithm_index(std::string_view algorithm);

struct PairedColumns {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<std::string_view> datasets;
};

/// Accuracy columns of two algorithms over the datasets where both have entries.
PairedColumns paired(std::string_view algorithm_a, std::string_view algorithm_b);

}  // namespace reference
}  // namespace rffol
