#include "rffol/model_io.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>

#include "rffol/errors.hpp"

namespace rffol {
namespace {

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u64(std::uint64_t v) {
    for (int k = 0; k < 8; ++k) out_.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void f64s(const std::vector<double>& v) {
    for (double x : v) f64(x);
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& in) : in_(in) {}

  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw DataError("model file is truncated");
  }
  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * k);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::vector<double> f64s(std::uint64_t count) {
    if (count > (in_.size() - pos_) / 8) throw DataError("model file is truncated");
    std::vector<double> v(count);
    for (auto& x : v) x = f64();
    return v;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  const std::vector<std::uint8_t>& in_;
  std::size_t pos_ = 0;
};

std::uint64_t checked_product(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) throw DataError("model dimensions overflow");
  return a * b;
}

}  // namespace

std::vector<std::uint8_t> encode_model(const OnlineModel& model) {
  Writer w;
  w.bytes(kModelMagic, sizeof(kModelMagic));
  w.bytes(&kModelVersion, 1);

  const auto& map = model.map;
  w.u64(static_cast<std::uint64_t>(map.variant()));
  w.u64(map.input_dim());
  w.u64(map.num_features());
  w.f64(map.sigma());
  w.u64(map.seed());
  for (double v : map.frequencies()) w.f64(v);
  for (double v : map.phases()) w.f64(v);

  w.u64(static_cast<std::uint64_t>(model.mode));
  w.u64(model.class_count);
  w.f64(model.eta_w);
  w.f64(model.eta_u);
  w.f64(model.eta_b);
  w.f64s(model.weights);
  return w.take();
}

OnlineModel decode_model(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  for (char c : kModelMagic) {
    if (r.u8() != static_cast<std::uint8_t>(c)) throw DataError("not a model file (bad magic)");
  }
  if (const auto version = r.u8(); version != kModelVersion)
    throw DataError("unsupported model format version " + std::to_string(version));

  const auto variant_tag = r.u64();
  if (variant_tag > static_cast<std::uint64_t>(MapVariant::MpuScaled)) throw DataError("unknown map variant tag");
  const auto d = r.u64();
  const auto big_d = r.u64();
  const double sigma = r.f64();
  const auto seed = r.u64();
  auto frequencies = r.f64s(checked_product(d, big_d));
  auto phases = r.f64s(big_d);

  const auto mode_tag = r.u64();
  if (mode_tag > static_cast<std::uint64_t>(UpdateMode::WUB)) throw DataError("unknown update mode tag");
  const auto m = r.u64();
  const double eta_w = r.f64();
  const double eta_u = r.f64();
  const double eta_b = r.f64();

  const auto variant = static_cast<MapVariant>(variant_tag);
  const auto width = variant == MapVariant::CosSin ? checked_product(2, big_d) : big_d;
  auto weights = r.f64s(checked_product(m, width));
  if (!r.done()) throw DataError("trailing bytes after model");
  for (double v : weights) {
    if (!std::isfinite(v)) throw DataError("model file has a non-finite weight");
  }

  try {
    FeatureMap map(d, big_d, sigma, variant, seed, std::move(frequencies), std::move(phases));
    auto model = init_model(std::move(map), m, eta_w, eta_u, eta_b, static_cast<UpdateMode>(mode_tag));
    model.weights = std::move(weights);
    return model;
  } catch (const UsageError& e) {
    throw DataError(std::string("invalid model file: ") + e.what());
  }
}

void write_model(std::ostream& out, const OnlineModel& model) {
  const auto bytes = encode_model(model);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

OnlineModel read_model(std::istream& in) {
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_model(bytes);
}

void save_model(const std::string& path, const OnlineModel& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  write_model(out, model);
  if (!out.flush()) throw DataError("failed writing '" + path + "'");
}

OnlineModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model '" + path + "'");
  return read_model(in);
}

}  // namespace rffol
