#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "rffol/errors.hpp"
#include "rffol/features.hpp"
#include "test_support.hpp"

using namespace rffol;
using rffol::testing::uniform_vector;

namespace {

FeatureMap fixed_map(MapVariant variant, std::size_t d, std::vector<double> u, std::vector<double> b) {
  const std::size_t big_d = b.size();
  return FeatureMap(d, big_d, 1.0, variant, 0, std::move(u), std::move(b));
}

}  // namespace

TEST_CASE("sample_frequencies is deterministic per seed") {
  const auto a = sample_frequencies(3, 100, 1.0, 7);
  const auto b = sample_frequencies(3, 100, 1.0, 7);
  CHECK(a == b);
  const auto c = sample_frequencies(3, 100, 1.0, 8);
  CHECK_FALSE(a == c);
  // Variant does not change the draws.
  const auto p = sample_frequencies(3, 100, 1.0, 7, MapVariant::PhaseCos);
  CHECK(std::equal(a.frequencies().begin(), a.frequencies().end(), p.frequencies().begin()));
  CHECK(std::equal(a.phases().begin(), a.phases().end(), p.phases().begin()));
}

TEST_CASE("sampled frequencies follow N(0, 1/sigma^2)") {
  const double sigma = 2.0;
  const std::size_t big_d = 100000;
  const auto map = sample_frequencies(1, big_d, sigma, 1);
  const auto u = map.frequencies();
  const double mean = std::accumulate(u.begin(), u.end(), 0.0) / static_cast<double>(big_d);
  double var = 0.0;
  for (double v : u) var += (v - mean) * (v - mean);
  var /= static_cast<double>(big_d - 1);

  // Standard error of the mean is (1/sigma)/sqrt(D).
  CHECK(std::abs(mean) < 4.0 * (1.0 / sigma) / std::sqrt(static_cast<double>(big_d)));
  // Sample variance: sd of s^2 is about sigma_u^2 sqrt(2/(D-1)) ~ 0.45% here.
  CHECK(std::abs(var - 0.25) < 0.05 * 0.25);

  for (double b : map.phases()) {
    CHECK(b >= 0.0);
    CHECK(b <= 2.0 * std::numbers::pi);
  }
}

TEST_CASE("sample_frequencies rejects bad arguments") {
  CHECK_THROWS_AS(sample_frequencies(0, 10, 1.0, 1), UsageError);
  CHECK_THROWS_AS(sample_frequencies(3, 0, 1.0, 1), UsageError);
  CHECK_THROWS_AS(sample_frequencies(3, 10, 0.0, 1), UsageError);
  CHECK_THROWS_AS(sample_frequencies(3, 10, -1.0, 1), UsageError);
  CHECK_THROWS_AS(sample_frequencies(3, 10, std::numeric_limits<double>::infinity(), 1), UsageError);
  CHECK_THROWS_AS(sample_frequencies(3, 10, std::nan(""), 1), UsageError);
}

TEST_CASE("FeatureMap rejects non-finite frequencies") {
  CHECK_THROWS_AS(fixed_map(MapVariant::MpuScaled, 1, {std::nan("")}, {0.0}), UsageError);
  CHECK_THROWS_AS(fixed_map(MapVariant::MpuScaled, 2, {0.0}, {0.0}), UsageError);
}

TEST_CASE("transform examples") {
  SUBCASE("MpuScaled with zero frequencies") {
    const auto map = fixed_map(MapVariant::MpuScaled, 2, {0, 0, 0, 0}, {0.0, std::numbers::pi / 2});
    const std::vector<double> x{0.3, -0.8};
    const auto z = map.transform(x);
    REQUIRE(z.size() == 2);
    CHECK(z[0] == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
    CHECK(std::abs(z[1]) < 1e-16);
  }
  SUBCASE("CosSin with a zero frequency") {
    const auto map = fixed_map(MapVariant::CosSin, 3, {0, 0, 0}, {1.234});
    const std::vector<double> x{0.1, 0.2, 0.3};
    const auto z = map.transform(x);
    REQUIRE(z.size() == 2);
    CHECK(z[0] == 1.0);
    CHECK(z[1] == 0.0);
  }
  SUBCASE("PhaseCos is MpuScaled times sqrt(D)") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      const auto mpu = sample_frequencies(4, 16, 1.5, 100 + trial, MapVariant::MpuScaled);
      const auto pc = sample_frequencies(4, 16, 1.5, 100 + trial, MapVariant::PhaseCos);
      const auto x = uniform_vector(4, rng);
      const auto zm = mpu.transform(x);
      const auto zp = pc.transform(x);
      for (std::size_t j = 0; j < 16; ++j) {
        if (std::abs(zm[j]) < 1e-12) continue;
        CHECK(zp[j] / zm[j] == doctest::Approx(4.0).epsilon(4 * std::numeric_limits<double>::epsilon()));
      }
    }
  }
}

TEST_CASE("sparse and dense transforms agree") {
  const auto map = sample_frequencies(6, 32, 1.0, 5);
  const std::vector<double> dense{0.0, 0.5, 0.0, -0.25, 1.0, 0.0};
  const auto sparse = to_sparse(dense);
  CHECK(sparse.size() == 3);
  CHECK(map.transform(dense) == map.transform(SparseView(sparse)));
}

TEST_CASE("transform dimension mismatch") {
  const auto map = sample_frequencies(3, 8, 1.0, 1);
  const std::vector<double> short_x{1.0, 2.0};
  CHECK_THROWS_AS(map.transform(short_x), DataError);
  const SparseVector out_of_range{{4, 1.0}};
  CHECK_THROWS_AS(map.transform(SparseView(out_of_range)), DataError);
}

TEST_CASE("transform components are bounded by the amplitude") {
  std::mt19937_64 rng(11);
  for (std::size_t big_d : {1u, 7u, 64u}) {
    const auto mpu = sample_frequencies(5, big_d, 0.5, big_d, MapVariant::MpuScaled);
    const auto pc = sample_frequencies(5, big_d, 0.5, big_d, MapVariant::PhaseCos);
    for (int t = 0; t < 50; ++t) {
      const auto x = uniform_vector(5, rng, -3.0, 3.0);
      for (double v : mpu.transform(x)) CHECK(std::abs(v) <= std::sqrt(2.0) / static_cast<double>(big_d));
      for (double v : pc.transform(x)) CHECK(std::abs(v) <= std::sqrt(2.0 / static_cast<double>(big_d)));
    }
  }
}

TEST_CASE("rbf_kernel") {
  const std::vector<double> x{0.2, -0.4, 0.9};
  CHECK(rbf_kernel(x, x, 0.3) == 1.0);

  // |x - y|^2 = 2 sigma^2 -> e^-1.
  const double sigma = 0.7;
  const std::vector<double> y{x[0] + sigma * std::sqrt(2.0), x[1], x[2]};
  CHECK(rbf_kernel(x, y, sigma) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));

  double prev = 1.0;
  for (double dist = 0.5; dist < 20.0; dist += 0.5) {
    const std::vector<double> z{x[0] + dist, x[1], x[2]};
    const double k = rbf_kernel(x, z, 1.0);
    CHECK(k < prev);
    CHECK(k >= 0.0);
    prev = k;
  }
  CHECK(prev < 1e-80);

  CHECK_THROWS_AS(rbf_kernel(x, std::vector<double>{1.0}, 1.0), DataError);
  CHECK_THROWS_AS(rbf_kernel(x, x, 0.0), UsageError);
}

TEST_CASE("approx_kernel") {
  std::mt19937_64 rng(21);

  SUBCASE("CosSin is exact on the diagonal") {
    for (int t = 0; t < 20; ++t) {
      const auto map = sample_frequencies(4, 50, 1.0, t, MapVariant::CosSin);
      const auto x = uniform_vector(4, rng);
      CHECK(approx_kernel(map, x, x) == doctest::Approx(1.0).epsilon(1e-14));
    }
  }

  SUBCASE("PhaseCos with many features is within three standard errors") {
    const std::size_t big_d = 50000;
    const auto map = sample_frequencies(5, big_d, 1.0, 99, MapVariant::PhaseCos);
    const auto x = uniform_vector(5, rng);
    const auto y = uniform_vector(5, rng);
    // Per-frequency terms 2 cos(a_j(x)) cos(a_j(y)); their mean is the estimate.
    const auto ax = map.activations(to_sparse(x));
    const auto ay = map.activations(to_sparse(y));
    double mean = 0.0;
    for (std::size_t j = 0; j < big_d; ++j) mean += 2.0 * std::cos(ax[j]) * std::cos(ay[j]);
    mean /= static_cast<double>(big_d);
    double var = 0.0;
    for (std::size_t j = 0; j < big_d; ++j) {
      const double c = 2.0 * std::cos(ax[j]) * std::cos(ay[j]) - mean;
      var += c * c;
    }
    var /= static_cast<double>(big_d - 1);

    const double approx = approx_kernel(map, x, y);
    CHECK(approx == doctest::Approx(mean).epsilon(1e-10));
    CHECK(std::abs(approx - rbf_kernel(x, y, 1.0)) < 3.0 * std::sqrt(var / static_cast<double>(big_d)));
  }

  SUBCASE("MpuScaled estimate is the PhaseCos estimate divided by D") {
    for (int t = 0; t < 20; ++t) {
      const auto mpu = sample_frequencies(3, 40, 1.0, t, MapVariant::MpuScaled);
      const auto pc = sample_frequencies(3, 40, 1.0, t, MapVariant::PhaseCos);
      const auto x = uniform_vector(3, rng);
      const auto y = uniform_vector(3, rng);
      CHECK(approx_kernel(mpu, x, y) == doctest::Approx(approx_kernel(pc, x, y) / 40.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("Monte-Carlo unbiasedness of CosSin and PhaseCos") {
  std::mt19937_64 rng(5);
  const auto x = uniform_vector(5, rng);
  const auto y = uniform_vector(5, rng);
  const double exact = rbf_kernel(x, y, 1.0);
  for (auto variant : {MapVariant::CosSin, MapVariant::PhaseCos}) {
    const std::size_t maps = 10000;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t m = 0; m < maps; ++m) {
      const double v = approx_kernel(sample_frequencies(5, 1, 1.0, 1000 + m, variant), x, y);
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / maps;
    const double var = (sum_sq - maps * mean * mean) / (maps - 1);
    CHECK(std::abs(mean - exact) < 4.0 * std::sqrt(var / maps));
  }
}

TEST_CASE("approximation_report") {
  std::mt19937_64 rng(8);

  SUBCASE("CosSin on identical pairs has zero error") {
    std::vector<VectorPair> pairs;
    for (int k = 0; k < 10; ++k) {
      auto x = uniform_vector(5, rng);
      pairs.emplace_back(x, x);
    }
    const auto r = approximation_report({5, 64, 1.0, MapVariant::CosSin}, pairs, 3);
    CHECK(r.mean_abs_error < 1e-14);
    CHECK(r.pair_count == 10);
    CHECK(r.variant == MapVariant::CosSin);
  }

  std::vector<VectorPair> pairs;
  for (int k = 0; k < 100; ++k) pairs.emplace_back(uniform_vector(5, rng), uniform_vector(5, rng));

  SUBCASE("PhaseCos error shrinks with D") {
    double small = 0.0, large = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      small += approximation_report({5, 100, 1.0, MapVariant::PhaseCos}, pairs, seed).mean_abs_error;
      large += approximation_report({5, 10000, 1.0, MapVariant::PhaseCos}, pairs, seed).mean_abs_error;
    }
    CHECK(large < small);
  }

  SUBCASE("MpuScaled error is the error of the 1/D-scaled estimate") {
    const auto r = approximation_report({5, 100, 1.0, MapVariant::MpuScaled}, pairs, 4);
    const auto pc = sample_frequencies(5, 100, 1.0, 4, MapVariant::PhaseCos);
    double total = 0.0, worst = 0.0;
    for (const auto& [x, y] : pairs) {
      const double e = std::abs(approx_kernel(pc, x, y) / 100.0 - rbf_kernel(x, y, 1.0));
      total += e;
      worst = std::max(worst, e);
    }
    CHECK(r.mean_abs_error == doctest::Approx(total / 100.0).epsilon(1e-12));
    CHECK(r.max_abs_error == doctest::Approx(worst).epsilon(1e-12));
    CHECK(r.mean_abs_error <= r.max_abs_error);
  }

  CHECK_THROWS_AS(approximation_report({5, 10, 1.0, MapVariant::PhaseCos}, {}, 1), UsageError);
}

TEST_CASE("variant names round-trip") {
  for (auto v : {MapVariant::CosSin, MapVariant::PhaseCos, MapVariant::MpuScaled})
    CHECK(parse_map_variant(to_string(v)) == v);
  CHECK_THROWS_AS(parse_map_variant("nystrom"), UsageError);
}
