#include "rffol/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "rffol/errors.hpp"

namespace rffol {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::optional<double> parse_double(std::string_view tok) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

std::optional<std::uint32_t> parse_index(std::string_view tok) {
  std::uint32_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

void append_number(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

struct RawLine {
  std::size_t line;
  double label;
  SparseVector features;
};

}  // namespace

std::optional<int> LabelMap::to_internal(double original) const {
  const auto it = std::find(originals.begin(), originals.end(), original);
  if (it == originals.end()) return std::nullopt;
  const auto k = static_cast<int>(std::distance(originals.begin(), it));
  if (binary()) return k == 0 ? -1 : 1;
  return k;
}

double LabelMap::to_original(int internal) const {
  if (binary()) {
    if (internal != -1 && internal != 1) throw UsageError("binary label must be -1 or +1");
    return originals[internal == -1 ? 0 : 1];
  }
  if (internal < 0 || static_cast<std::size_t>(internal) >= originals.size())
    throw UsageError("class index " + std::to_string(internal) + " out of range");
  return originals[static_cast<std::size_t>(internal)];
}

LabelMap parse_label_list(std::string_view list) {
  LabelMap map;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto comma = list.find(',', start);
    const auto tok = list.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    const auto v = parse_double(tok);
    if (!v) throw UsageError("bad label '" + std::string(tok) + "' in label list");
    map.originals.push_back(*v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  std::sort(map.originals.begin(), map.originals.end());
  if (std::adjacent_find(map.originals.begin(), map.originals.end()) != map.originals.end())
    throw UsageError("duplicate label in label list");
  if (map.originals.size() < 2) throw UsageError("label list needs at least two labels");
  return map;
}

Dataset parse_libsvm(std::string_view text, const ParseOptions& options) {
  std::vector<RawLine> raw;
  std::size_t max_index = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;

    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && is_space(line[i])) ++i;
      const std::size_t begin = i;
      while (i < line.size() && !is_space(line[i])) ++i;
      if (i > begin) tokens.push_back(line.substr(begin, i - begin));
    }
    if (tokens.empty()) continue;

    RawLine rec{line_no, 0.0, {}};
    const auto label = parse_double(tokens[0]);
    if (!label || !std::isfinite(*label)) {
      if (tokens[0].find(':') != std::string_view::npos) throw DataError("missing label", line_no);
      throw DataError("malformed label '" + std::string(tokens[0]) + "'", line_no);
    }
    rec.label = *label;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const auto tok = tokens[t];
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) throw DataError("malformed token '" + std::string(tok) + "'", line_no);
      const auto idx = parse_index(tok.substr(0, colon));
      if (!idx || *idx == 0) throw DataError("bad feature index in '" + std::string(tok) + "'", line_no);
      const auto val = parse_double(tok.substr(colon + 1));
      if (!val) throw DataError("non-numeric value in '" + std::string(tok) + "'", line_no);
      if (!std::isfinite(*val)) throw DataError("non-finite value in '" + std::string(tok) + "'", line_no);
      if (!rec.features.empty()) {
        if (*idx == rec.features.back().index) throw DataError("duplicate index " + std::to_string(*idx), line_no);
        if (*idx < rec.features.back().index) throw DataError("decreasing index " + std::to_string(*idx), line_no);
      }
      if (options.dimension && *idx > *options.dimension)
        throw DataError("index " + std::to_string(*idx) + " exceeds dimension " + std::to_string(*options.dimension),
                        line_no);
      rec.features.push_back({*idx, *val});
      max_index = std::max<std::size_t>(max_index, *idx);
    }
    raw.push_back(std::move(rec));
  }

  Dataset ds;
  ds.dimension = options.dimension.value_or(max_index);
  if (options.labels) {
    ds.label_map = *options.labels;
  } else {
    for (const auto& r : raw) ds.label_map.originals.push_back(r.label);
    std::sort(ds.label_map.originals.begin(), ds.label_map.originals.end());
    ds.label_map.originals.erase(std::unique(ds.label_map.originals.begin(), ds.label_map.originals.end()),
                                 ds.label_map.originals.end());
    if (ds.label_map.originals.size() == 1)
      throw DataError("only one distinct label; supply the label set explicitly");
  }

  ds.instances.reserve(raw.size());
  for (auto& r : raw) {
    const auto internal = ds.label_map.to_internal(r.label);
    if (!internal) {
      std::string label;
      append_number(label, r.label);
      throw DataError("label " + label + " not in the label set", r.line);
    }
    ds.instances.push_back({std::move(r.features), *internal});
  }
  return ds;
}

Dataset read_libsvm_file(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_libsvm(buf.str(), options);
}

std::string to_libsvm(const Dataset& dataset) {
  std::string out;
  for (const auto& inst : dataset.instances) {
    append_number(out, dataset.label_map.to_original(inst.label));
    for (const auto& f : inst.features) {
      out.push_back(' ');
      out.append(std::to_string(f.index));
      out.push_back(':');
      append_number(out, f.value);
    }
    out.push_back('\n');
  }
  return out;
}

void write_libsvm(std::ostream& out, const Dataset& dataset) { out << to_libsvm(dataset); }

const std::optional<Normalizer::Range>& Normalizer::range(std::size_t index) const {
  static const std::optional<Range> none;
  if (index == 0 || index > ranges_.size()) return none;
  return ranges_[index - 1];
}

double Normalizer::apply(std::size_t index, double value) const {
  const auto& r = range(index);
  if (!r) return std::clamp(value, -1.0, 1.0);
  if (r->max == r->min) return 0.0;
  return std::clamp(2.0 * (value - r->min) / (r->max - r->min) - 1.0, -1.0, 1.0);
}

Normalizer fit_normalizer(const Dataset& dataset) {
  if (dataset.empty()) throw DataError("cannot fit a normalizer on an empty dataset");
  std::vector<std::optional<Normalizer::Range>> ranges(dataset.dimension);
  std::vector<std::size_t> counts(dataset.dimension, 0);
  for (const auto& inst : dataset.instances) {
    for (const auto& f : inst.features) {
      if (f.index > dataset.dimension) throw DataError("feature index exceeds dataset dimension");
      auto& r = ranges[f.index - 1];
      if (!r) {
        r = Normalizer::Range{f.value, f.value};
      } else {
        r->min = std::min(r->min, f.value);
        r->max = std::max(r->max, f.value);
      }
      ++counts[f.index - 1];
    }
  }
  // Instances without an entry hold an implicit zero.
  for (std::size_t j = 0; j < ranges.size(); ++j) {
    if (ranges[j] && counts[j] < dataset.size()) {
      ranges[j]->min = std::min(ranges[j]->min, 0.0);
      ranges[j]->max = std::max(ranges[j]->max, 0.0);
    }
  }
  return Normalizer(std::move(ranges));
}

Dataset apply_normalizer(const Normalizer& normalizer, const Dataset& dataset) {
  Dataset out;
  out.dimension = dataset.dimension;
  out.label_map = dataset.label_map;
  out.instances.reserve(dataset.size());
  const std::size_t fitted = std::min(normalizer.dimension(), dataset.dimension);
  std::vector<double> dense;
  for (const auto& inst : dataset.instances) {
    dense.assign(dataset.dimension, 0.0);
    for (const auto& f : inst.features) {
      if (f.index > dataset.dimension) throw DataError("feature index exceeds dataset dimension");
      dense[f.index - 1] = f.value;
    }
    Instance n{{}, inst.label};
    for (std::size_t j = 1; j <= dataset.dimension; ++j) {
      const double v = j <= fitted ? normalizer.apply(j, dense[j - 1]) : std::clamp(dense[j - 1], -1.0, 1.0);
      if (v != 0.0) n.features.push_back({static_cast<std::uint32_t>(j), v});
    }
    out.instances.push_back(std::move(n));
  }
  return out;
}

namespace {

std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 engine(seed);
  std::shuffle(order.begin(), order.end(), engine);
  return order;
}

Dataset with_instances(const Dataset& like, std::vector<Instance> instances) {
  Dataset out;
  out.instances = std::move(instances);
  out.dimension = like.dimension;
  out.label_map = like.label_map;
  return out;
}

}  // namespace

Split split(const Dataset& dataset, std::array<double, 3> ratios, std::uint64_t seed) {
  if (dataset.empty()) throw DataError("cannot split an empty dataset");
  for (double r : ratios) {
    if (!(r > 0.0)) throw UsageError("split ratios must be positive");
  }
  if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) throw UsageError("split ratios must sum to 1");

  const std::size_t n = dataset.size();
  // Guard against 0.7 * 10 = 6.9999...
  const auto cut = [n](double r) { return static_cast<std::size_t>(std::floor(r * static_cast<double>(n) + 1e-9)); };
  const std::size_t n_train = cut(ratios[0]);
  const std::size_t n_val = std::min(cut(ratios[1]), n - n_train);

  const auto order = permutation(n, seed);
  std::vector<Instance> train, val, test;
  train.reserve(n_train);
  val.reserve(n_val);
  test.reserve(n - n_train - n_val);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& inst = dataset.instances[order[k]];
    if (k < n_train) {
      train.push_back(inst);
    } else if (k < n_train + n_val) {
      val.push_back(inst);
    } else {
      test.push_back(inst);
    }
  }
  return {with_instances(dataset, std::move(train)), with_instances(dataset, std::move(val)),
          with_instances(dataset, std::move(test))};
}

Dataset shuffled(const Dataset& dataset, std::uint64_t seed) {
  const auto order = permutation(dataset.size(), seed);
  std::vector<Instance> out;
  out.reserve(dataset.size());
  for (auto k : order) out.push_back(dataset.instances[k]);
  return with_instances(dataset, std::move(out));
}

Dataset head(const Dataset& dataset, std::size_t n) {
  n = std::min(n, dataset.size());
  return with_instances(dataset, {dataset.instances.begin(), dataset.instances.begin() + static_cast<std::ptrdiff_t>(n)});
}

namespace {

void validate(const DriftStreamConfig& config) {
  if (config.dimension < 2) throw UsageError("drift stream needs dimension >= 2");
  if (config.segment_lengths.size() < 2) throw UsageError("drift stream needs at least two segments");
  for (auto len : config.segment_lengths) {
    if (len == 0) throw UsageError("drift segments must be non-empty");
  }
  const std::size_t boundaries = config.segment_lengths.size() - 1;
  if (config.rotation_angles.size() != boundaries && config.rotation_angles.size() != 1)
    throw UsageError("need one rotation angle per segment boundary (or a single shared angle)");
  for (double a : config.rotation_angles) {
    if (!std::isfinite(a)) throw UsageError("rotation angles must be finite");
  }
  if (!(config.noise_std >= 0.0) || !std::isfinite(config.noise_std))
    throw UsageError("noise_std must be a non-negative finite number");
}

struct DriftBasis {
  std::vector<double> w;
  std::vector<double> v;
};

DriftBasis draw_basis(std::size_t d, std::mt19937_64& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  DriftBasis basis{std::vector<double>(d), std::vector<double>(d)};
  const auto normalize = [](std::vector<double>& a) {
    double n = 0.0;
    for (double x : a) n += x * x;
    n = std::sqrt(n);
    for (double& x : a) x /= n;
  };
  for (double& x : basis.w) x = normal(engine);
  normalize(basis.w);
  for (double& x : basis.v) x = normal(engine);
  double proj = 0.0;
  for (std::size_t i = 0; i < d; ++i) proj += basis.v[i] * basis.w[i];
  for (std::size_t i = 0; i < d; ++i) basis.v[i] -= proj * basis.w[i];
  normalize(basis.v);
  return basis;
}

double cumulative_angle(const DriftStreamConfig& config, std::size_t segment) {
  double theta = 0.0;
  for (std::size_t k = 0; k < segment; ++k)
    theta += config.rotation_angles.size() == 1 ? config.rotation_angles[0] : config.rotation_angles[k];
  return theta;
}

std::vector<double> rotated(const DriftBasis& basis, double theta) {
  std::vector<double> out(basis.w.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::cos(theta) * basis.w[i] + std::sin(theta) * basis.v[i];
  return out;
}

}  // namespace

std::vector<double> drift_direction(const DriftStreamConfig& config, std::size_t segment) {
  validate(config);
  std::mt19937_64 engine(config.seed);
  return rotated(draw_basis(config.dimension, engine), cumulative_angle(config, segment));
}

Dataset generate_drift_stream(const DriftStreamConfig& config) {
  validate(config);
  std::mt19937_64 engine(config.seed);
  const auto basis = draw_basis(config.dimension, engine);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::normal_distribution<double> noise(0.0, config.noise_std > 0.0 ? config.noise_std : 1.0);

  Dataset ds;
  ds.dimension = config.dimension;
  ds.label_map.originals = {-1.0, 1.0};
  std::vector<double> x(config.dimension);
  for (std::size_t s = 0; s < config.segment_lengths.size(); ++s) {
    const auto w = rotated(basis, cumulative_angle(config, s));
    for (std::size_t t = 0; t < config.segment_lengths[s]; ++t) {
      double margin = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = uniform(engine);
        margin += w[i] * x[i];
      }
      if (config.noise_std > 0.0) margin += noise(engine);
      ds.instances.push_back({to_sparse(x), margin >= 0.0 ? 1 : -1});
    }
  }
  return ds;
}

}  // namespace rffol
