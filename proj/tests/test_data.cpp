#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "rffol/data.hpp"
#include "rffol/errors.hpp"
#include "test_support.hpp"

using namespace rffol;

namespace {

Dataset random_dataset(std::size_t n, std::size_t d, std::size_t classes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> val(-50.0, 50.0);
  std::bernoulli_distribution keep(0.4);
  std::uniform_int_distribution<int> cls(0, static_cast<int>(classes) - 1);
  Dataset ds;
  ds.dimension = d;
  for (std::size_t c = 0; c < classes; ++c) ds.label_map.originals.push_back(static_cast<double>(c) * 1.5 - 2.0);
  for (std::size_t k = 0; k < n; ++k) {
    Instance inst;
    for (std::uint32_t j = 1; j <= d; ++j)
      if (keep(rng)) inst.features.push_back({j, val(rng)});
    inst.label = classes == 2 ? (cls(rng) == 0 ? -1 : 1) : cls(rng);
    ds.instances.push_back(std::move(inst));
  }
  // Make sure the largest index appears so d round-trips.
  ds.instances.front().features.push_back({static_cast<std::uint32_t>(d), 0.125});
  std::sort(ds.instances.front().features.begin(), ds.instances.front().features.end(),
            [](const Feature& a, const Feature& b) { return a.index < b.index; });
  ds.instances.front().features.erase(
      std::unique(ds.instances.front().features.begin(), ds.instances.front().features.end(),
                  [](const Feature& a, const Feature& b) { return a.index == b.index; }),
      ds.instances.front().features.end());
  return ds;
}

std::size_t error_line(std::string_view text) {
  try {
    parse_libsvm(text);
  } catch (const DataError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("parse_libsvm basics") {
  const auto ds = parse_libsvm("1 1:0.5 3:-0.2\n-1 2:4\n");
  REQUIRE(ds.size() == 2);
  CHECK(ds.dimension == 3);
  CHECK(ds.instances[0].label == 1);
  CHECK(ds.instances[0].features == SparseVector{{1, 0.5}, {3, -0.2}});
  CHECK(ds.instances[1].label == -1);
  CHECK(ds.class_count() == 2);
}

TEST_CASE("binary labels map the smaller original to -1") {
  const auto ds = parse_libsvm("2 4:1\n1 2:1\n");
  CHECK(ds.label_map.originals == std::vector<double>{1.0, 2.0});
  CHECK(ds.instances[0].label == 1);
  CHECK(ds.instances[1].label == -1);
  CHECK(ds.label_map.to_original(-1) == 1.0);
}

TEST_CASE("multi-class labels map to sorted indices") {
  const auto ds = parse_libsvm("7 1:1\n3 1:2\n5 1:3\n3 1:4\n");
  CHECK(ds.class_count() == 3);
  std::vector<int> labels;
  for (const auto& i : ds) labels.push_back(i.label);
  CHECK(labels == std::vector<int>{2, 0, 1, 0});
}

TEST_CASE("parse options") {
  const auto ds = parse_libsvm("+1 1:1\n", {std::size_t{10}, parse_label_list("-1,1")});
  CHECK(ds.dimension == 10);
  CHECK(ds.instances[0].label == 1);
  CHECK_THROWS_AS(parse_libsvm("1 11:1\n-1 1:1\n", {std::size_t{10}, std::nullopt}), DataError);
  CHECK_THROWS_AS(parse_libsvm("3 1:1\n", {std::nullopt, parse_label_list("1,2")}), DataError);
  CHECK_THROWS_AS(parse_libsvm("1 1:1\n1 2:1\n"), DataError);
  CHECK_THROWS_AS(parse_label_list("1,1"), UsageError);
  CHECK_THROWS_AS(parse_label_list("1,x"), UsageError);
}

TEST_CASE("parse errors carry line numbers") {
  CHECK(error_line("1 1:1\n-1 2:x\n") == 2);
  CHECK(error_line("1 1:1\n\n-1 2:1 2:3\n") == 3);
  CHECK(error_line("1 3:1 2:1\n") == 1);
  CHECK(error_line("1 1:1\n-1 junk\n") == 2);
  CHECK(error_line("1 0:1\n") == 1);
  CHECK(error_line("abc 1:1\n") == 1);
  CHECK(error_line("1:1 2:1\n") == 1);
  CHECK(error_line("1 1:nan\n") == 1);
}

TEST_CASE("blank lines are skipped, CRLF tolerated") {
  const auto ds = parse_libsvm("\n1 1:1\r\n   \n-1 2:2\r\n");
  CHECK(ds.size() == 2);
  CHECK(ds.instances[1].features == SparseVector{{2, 2.0}});
}

TEST_CASE("round-trip through LIBSVM text") {
  for (std::size_t classes : {2u, 4u}) {
    const auto ds = random_dataset(300, 12, classes, 40 + classes);
    const auto back = parse_libsvm(to_libsvm(ds));
    CHECK(back == ds);
  }
}

TEST_CASE("normalizer") {
  SUBCASE("examples") {
    Dataset fit;
    fit.dimension = 2;
    fit.label_map.originals = {-1, 1};
    fit.instances = {{{{1, 0.0}, {2, 3.0}}, 1}, {{{1, 10.0}, {2, 3.0}}, -1}};
    const auto norm = fit_normalizer(fit);
    CHECK(norm.apply(1, 5.0) == 0.0);
    CHECK(norm.apply(1, 0.0) == -1.0);
    CHECK(norm.apply(1, 10.0) == 1.0);
    CHECK(norm.apply(1, 20.0) == 1.0);
    CHECK(norm.apply(2, 3.0) == 0.0);
    CHECK(norm.apply(2, 99.0) == 0.0);
    CHECK(norm.apply(7, 4.0) == 1.0);
    CHECK(norm.apply(7, -0.5) == -0.5);
  }
  SUBCASE("implicit zeros take part in the range") {
    Dataset fit;
    fit.dimension = 1;
    fit.label_map.originals = {-1, 1};
    fit.instances = {{{{1, 4.0}}, 1}, {{}, -1}};
    const auto norm = fit_normalizer(fit);
    REQUIRE(norm.range(1).has_value());
    CHECK(norm.range(1)->min == 0.0);
    CHECK(norm.range(1)->max == 4.0);
    const auto out = apply_normalizer(norm, fit);
    CHECK(out.instances[0].features == SparseVector{{1, 1.0}});
    CHECK(out.instances[1].features == SparseVector{{1, -1.0}});
  }
  SUBCASE("fitted values land in [-1,1] and refitting is the identity") {
    const auto ds = random_dataset(200, 8, 2, 5);
    const auto once = apply_normalizer(fit_normalizer(ds), ds);
    for (const auto& inst : once)
      for (const auto& f : inst.features) {
        CHECK(f.value >= -1.0);
        CHECK(f.value <= 1.0);
      }
    const auto twice = apply_normalizer(fit_normalizer(once), once);
    REQUIRE(twice.size() == once.size());
    for (std::size_t k = 0; k < once.size(); ++k) {
      const auto& a = once.instances[k].features;
      const auto& b = twice.instances[k].features;
      REQUIRE(a.size() == b.size());
      for (std::size_t j = 0; j < a.size(); ++j) {
        CHECK(a[j].index == b[j].index);
        CHECK(a[j].value == doctest::Approx(b[j].value).epsilon(1e-12));
      }
    }
  }
  CHECK_THROWS_AS(fit_normalizer(Dataset{}), DataError);
}

TEST_CASE("split") {
  Dataset ds;
  ds.dimension = 1;
  ds.label_map.originals = {-1, 1};
  for (int k = 0; k < 10; ++k) ds.instances.push_back({{{1, static_cast<double>(k + 1)}}, k % 2 ? 1 : -1});

  const auto s = split(ds, 3);
  CHECK(s.train.size() == 6);
  CHECK(s.validation.size() == 2);
  CHECK(s.test.size() == 2);

  const auto again = split(ds, 3);
  CHECK(again.train == s.train);
  CHECK(again.validation == s.validation);
  CHECK(again.test == s.test);

  CHECK(split(ds, {0.7, 0.2, 0.1}, 1).train.size() == 7);
  CHECK_THROWS_AS(split(ds, {0.5, 0.2, 0.2}, 1), UsageError);
  CHECK_THROWS_AS(split(ds, {0.8, 0.2, 0.0}, 1), UsageError);
  CHECK_THROWS_AS(split(Dataset{}, 1), DataError);
}

TEST_CASE("split partitions the dataset for every seed") {
  const auto ds = random_dataset(137, 5, 3, 9);
  std::map<std::pair<int, std::vector<std::pair<std::uint32_t, double>>>, int> original;
  const auto key = [](const Instance& i) {
    std::vector<std::pair<std::uint32_t, double>> f;
    for (const auto& x : i.features) f.emplace_back(x.index, x.value);
    return std::pair{i.label, f};
  };
  for (const auto& i : ds) ++original[key(i)];
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = split(ds, seed);
    CHECK(s.train.size() == 82);
    CHECK(s.validation.size() == 27);
    CHECK(s.test.size() == 28);
    auto counts = original;
    for (const auto* part : {&s.train, &s.validation, &s.test})
      for (const auto& i : *part) --counts[key(i)];
    CHECK(std::all_of(counts.begin(), counts.end(), [](const auto& kv) { return kv.second == 0; }));
  }
}

TEST_CASE("drift stream") {
  DriftStreamConfig config;
  config.dimension = 5;
  config.segment_lengths = {4000, 4000};
  config.rotation_angles = {std::numbers::pi / 2};
  config.seed = 12;

  const auto a = generate_drift_stream(config);
  const auto b = generate_drift_stream(config);
  CHECK(a == b);
  CHECK(a.size() == 8000);
  CHECK(a.dimension == 5);
  CHECK(a.class_count() == 2);

  SUBCASE("class balance per segment") {
    for (std::size_t s = 0; s < 2; ++s) {
      std::size_t pos = 0;
      for (std::size_t k = s * 4000; k < (s + 1) * 4000; ++k) pos += a.instances[k].label == 1;
      CHECK(std::abs(static_cast<double>(pos) / 4000.0 - 0.5) < 0.05);
    }
  }

  SUBCASE("the segment-1 boundary is a coin flip on segment 2 after a 90 degree rotation") {
    const auto w = drift_direction(config, 0);
    const auto w2 = drift_direction(config, 1);
    double dot = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
      dot += w[i] * w2[i];
      norm += w2[i] * w2[i];
    }
    CHECK(std::abs(dot) < 1e-12);
    CHECK(norm == doctest::Approx(1.0));

    std::size_t agree1 = 0, agree2 = 0;
    for (std::size_t k = 0; k < 8000; ++k) {
      const auto x = to_dense(a.instances[k].features, 5);
      double m = 0.0;
      for (std::size_t i = 0; i < 5; ++i) m += w[i] * x[i];
      const bool ok = (m >= 0.0 ? 1 : -1) == a.instances[k].label;
      (k < 4000 ? agree1 : agree2) += ok;
    }
    CHECK(agree1 == 4000);
    CHECK(std::abs(static_cast<double>(agree2) / 4000.0 - 0.5) < 0.04);
  }

  SUBCASE("noise flips a fraction of labels") {
    auto noisy = config;
    noisy.noise_std = 0.3;
    const auto n = generate_drift_stream(noisy);
    const auto w = drift_direction(noisy, 0);
    std::size_t flips = 0;
    for (std::size_t k = 0; k < 4000; ++k) {
      const auto x = to_dense(n.instances[k].features, 5);
      double m = 0.0;
      for (std::size_t i = 0; i < 5; ++i) m += w[i] * x[i];
      flips += (m >= 0.0 ? 1 : -1) != n.instances[k].label;
    }
    CHECK(flips > 100);
    CHECK(flips < 1000);
  }

  SUBCASE("invalid configs") {
    auto bad = config;
    bad.dimension = 1;
    CHECK_THROWS_AS(generate_drift_stream(bad), UsageError);
    bad = config;
    bad.segment_lengths = {100};
    CHECK_THROWS_AS(generate_drift_stream(bad), UsageError);
    bad = config;
    bad.segment_lengths = {100, 0};
    CHECK_THROWS_AS(generate_drift_stream(bad), UsageError);
    bad = config;
    bad.segment_lengths = {10, 10, 10};
    bad.rotation_angles = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(generate_drift_stream(bad), UsageError);
    bad = config;
    bad.noise_std = -1.0;
    CHECK_THROWS_AS(generate_drift_stream(bad), UsageError);
  }
}
