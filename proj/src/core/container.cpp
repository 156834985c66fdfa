#include "container.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace lvq {

namespace {
constexpr uint16_t kVersion = 1;
constexpr uint64_t kMaxDim = 4096;
constexpr uint64_t kMaxCount = 1ull << 40;
constexpr uint64_t kMaxTargets = 1024;

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) fail(ErrorCode::Format, std::string(what) + " not finite");
}
}  // namespace

void ByteWriter::u16(uint16_t v) {
  buf.push_back(uint8_t(v));
  buf.push_back(uint8_t(v >> 8));
}

void ByteWriter::u64(uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(uint8_t(v >> (8 * i)));
}

void ByteWriter::f64(double v) { u64(std::bit_cast<uint64_t>(v)); }

void ByteWriter::bytes(const uint8_t* p, size_t n) {
  buf.insert(buf.end(), p, p + n);
}

void ByteWriter::tag(const char* four) {
  buf.insert(buf.end(), four, four + 4);
}

uint16_t ByteReader::u16() {
  if (at + 2 > n) fail(ErrorCode::Format, "file truncated");
  uint16_t v = uint16_t(p[at]) | (uint16_t(p[at + 1]) << 8);
  at += 2;
  return v;
}

uint64_t ByteReader::u64() {
  if (at + 8 > n) fail(ErrorCode::Format, "file truncated");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= uint64_t(p[at + i]) << (8 * i);
  at += 8;
  return v;
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

void ByteReader::bytes(uint8_t* out, size_t count) {
  if (at + count > n) fail(ErrorCode::Format, "file truncated");
  std::memcpy(out, p + at, count);
  at += count;
}

void ByteReader::expect_tag(const char* four, const char* what) {
  if (at + 4 > n || std::memcmp(p + at, four, 4) != 0)
    fail(ErrorCode::Format, std::string("not a ") + what + " file");
  at += 4;
}

void write_file(const std::string& path, const std::vector<uint8_t>& data) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) fail(ErrorCode::Io, "cannot open for writing: " + path);
  size_t wrote = data.empty() ? 0 : std::fwrite(data.data(), 1, data.size(), f);
  bool ok = (wrote == data.size()) && std::fclose(f) == 0;
  if (!ok) fail(ErrorCode::Io, "write failed: " + path);
}

std::vector<uint8_t> read_file(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) fail(ErrorCode::Io, "cannot open: " + path);
  std::fseek(f, 0, SEEK_END);
  long size = std::ftell(f);
  std::fseek(f, 0, SEEK_SET);
  if (size < 0) {
    std::fclose(f);
    fail(ErrorCode::Io, "cannot stat: " + path);
  }
  std::vector<uint8_t> data(static_cast<size_t>(size));
  size_t got = size ? std::fread(data.data(), 1, data.size(), f) : 0;
  std::fclose(f);
  if (got != data.size()) fail(ErrorCode::Io, "read failed: " + path);
  return data;
}

void save_model(const std::string& path, const Model& model) {
  const TrainState& st = model.state;
  const int n = st.basis.dim, k = st.basis.skew_count();
  ByteWriter w;
  w.tag("SLVM");
  w.u16(kVersion);
  w.u16(uint16_t(model.kind));
  w.u16(uint16_t(n));
  w.u16(uint16_t(st.gains.count()));
  for (int i = 0; i < k; ++i) w.f64(st.basis.skew_u[i]);
  for (int i = 0; i < k; ++i) w.f64(st.basis.skew_v[i]);
  for (int i = 0; i < n; ++i) w.f64(st.basis.log_sigma[i]);
  for (int i = 0; i < n; ++i) w.f64(st.mu[i]);
  for (int i = 0; i < n; ++i) w.f64(st.sigma[i]);
  w.f64(st.q_s);
  for (int m = 0; m < st.gains.count(); ++m) w.f64(st.gains.log_gain[m]);
  if (model.lambdas.size() != size_t(st.gains.count()))
    fail(ErrorCode::InvalidArgument, "model needs one rate weight per target");
  for (double l : model.lambdas) w.f64(l);
  write_file(path, w.buf);
}

Model load_model(const std::string& path) {
  std::vector<uint8_t> data = read_file(path);
  ByteReader r(data.data(), data.size());
  r.expect_tag("SLVM", "model");
  if (r.u16() != kVersion) fail(ErrorCode::Format, "unsupported model version");
  uint16_t kind = r.u16();
  if (kind > uint16_t(QuantizerKind::Salvq))
    fail(ErrorCode::Format, "unknown quantizer kind");
  uint16_t dim = r.u16();
  uint16_t targets = r.u16();
  if (dim == 0 || dim > kMaxDim || targets == 0 || targets > kMaxTargets)
    fail(ErrorCode::Format, "model header out of range");

  Model model;
  model.kind = QuantizerKind(kind);
  model.state = TrainState::init(dim, targets);
  TrainState& st = model.state;
  const int k = st.basis.skew_count();
  for (int i = 0; i < k; ++i) st.basis.skew_u[i] = r.f64();
  for (int i = 0; i < k; ++i) st.basis.skew_v[i] = r.f64();
  for (int i = 0; i < dim; ++i) st.basis.log_sigma[i] = r.f64();
  for (int i = 0; i < dim; ++i) st.mu[i] = r.f64();
  for (int i = 0; i < dim; ++i) st.sigma[i] = r.f64();
  st.q_s = r.f64();
  for (int m = 0; m < targets; ++m) st.gains.log_gain[m] = r.f64();
  model.lambdas.resize(targets);
  for (int m = 0; m < targets; ++m) model.lambdas[m] = r.f64();
  if (r.remaining() != 0) fail(ErrorCode::Format, "trailing bytes in model");

  check_finite(st.q_s, "q_s");
  if (!(st.q_s > 0.0)) fail(ErrorCode::Format, "q_s must be positive");
  for (int i = 0; i < dim; ++i) {
    check_finite(st.sigma[i], "sigma");
    if (!(st.sigma[i] > 0.0)) fail(ErrorCode::Format, "sigma must be positive");
    check_finite(st.mu[i], "mu");
    check_finite(st.basis.log_sigma[i], "basis log_sigma");
  }
  for (int i = 0; i < k; ++i) {
    check_finite(st.basis.skew_u[i], "skew");
    check_finite(st.basis.skew_v[i], "skew");
  }
  for (int m = 0; m < targets; ++m) check_finite(st.gains.log_gain[m], "gain");
  for (double l : model.lambdas)
    if (!std::isfinite(l) || !(l > 0.0))
      fail(ErrorCode::Format, "rate weights must be positive finite");
  return model;
}

void save_vectors(const std::string& path, const Eigen::MatrixXd& columns) {
  ByteWriter w;
  w.tag("LVQV");
  w.u16(kVersion);
  w.u16(uint16_t(columns.rows()));
  w.u64(uint64_t(columns.cols()));
  for (int64_t c = 0; c < columns.cols(); ++c)
    for (int64_t i = 0; i < columns.rows(); ++i) {
      float f = float(columns(i, c));
      uint32_t b = std::bit_cast<uint32_t>(f);
      for (int s = 0; s < 4; ++s) w.buf.push_back(uint8_t(b >> (8 * s)));
    }
  write_file(path, w.buf);
}

Eigen::MatrixXd load_vectors(const std::string& path) {
  std::vector<uint8_t> data = read_file(path);
  ByteReader r(data.data(), data.size());
  r.expect_tag("LVQV", "vector");
  if (r.u16() != kVersion) fail(ErrorCode::Format, "unsupported vector version");
  uint16_t dim = r.u16();
  uint64_t count = r.u64();
  if (dim == 0 || dim > kMaxDim || count > kMaxCount)
    fail(ErrorCode::Format, "vector header out of range");
  if (r.remaining() != size_t(4) * dim * count)
    fail(ErrorCode::Format, "vector payload size mismatch");
  Eigen::MatrixXd out(dim, int64_t(count));
  for (int64_t c = 0; c < int64_t(count); ++c)
    for (int i = 0; i < dim; ++i) {
      uint32_t b = 0;
      for (int s = 0; s < 4; ++s) b |= uint32_t(r.p[r.at + s]) << (8 * s);
      r.at += 4;
      float f = std::bit_cast<float>(b);
      if (!std::isfinite(f)) fail(ErrorCode::NonFinite, "non-finite vector data");
      out(i, c) = double(f);
    }
  return out;
}

void write_stream_header(ByteWriter& w, const StreamHeader& h) {
  w.tag("SLVQ");
  w.u16(kVersion);
  w.u16(h.dim);
  w.u64(h.count);
  w.f64(h.step_scale);
  w.f64(h.q_s);
  for (int i = 0; i < h.dim; ++i) w.f64(h.sigma[i]);
  for (int i = 0; i < h.dim; ++i) w.f64(h.mu[i]);
  for (int i = 0; i < h.dim; ++i)
    for (int j = 0; j < h.dim; ++j) w.f64(h.basis(i, j));
}

StreamHeader read_stream_header(ByteReader& r) {
  r.expect_tag("SLVQ", "stream");
  if (r.u16() != kVersion) fail(ErrorCode::Format, "unsupported stream version");
  StreamHeader h;
  h.dim = r.u16();
  if (h.dim == 0 || h.dim > kMaxDim)
    fail(ErrorCode::Format, "stream dimension out of range");
  h.count = r.u64();
  if (h.count > kMaxCount) fail(ErrorCode::Format, "stream count out of range");
  h.step_scale = r.f64();
  h.q_s = r.f64();
  check_finite(h.step_scale, "step");
  check_finite(h.q_s, "q_s");
  if (!(h.step_scale > 0.0) || !(h.q_s > 0.0))
    fail(ErrorCode::Format, "stream steps must be positive");
  h.sigma.resize(h.dim);
  h.mu.resize(h.dim);
  h.basis.resize(h.dim, h.dim);
  for (int i = 0; i < h.dim; ++i) h.sigma[i] = r.f64();
  for (int i = 0; i < h.dim; ++i) h.mu[i] = r.f64();
  for (int i = 0; i < h.dim; ++i)
    for (int j = 0; j < h.dim; ++j) h.basis(i, j) = r.f64();
  return h;
}

}  // namespace lvq
