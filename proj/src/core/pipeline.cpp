#include "pipeline.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "container.hpp"
#include "detmath.hpp"
#include "lattice.hpp"
#include "optimizer.hpp"
#include "rounding.hpp"
#include "symbol_model.hpp"

namespace lvq {

const char* quantizer_kind_name(QuantizerKind kind) {
  switch (kind) {
    case QuantizerKind::Usq: return "usq";
    case QuantizerKind::FixedE8: return "e8";
    case QuantizerKind::Salvq: return "salvq";
  }
  return "?";
}

namespace {

void validate_kind_dim(QuantizerKind kind, int dim) {
  if (kind == QuantizerKind::FixedE8 && dim % 8 != 0)
    fail(ErrorCode::InvalidArgument,
         "the fixed lattice quantizer needs the dimension divisible by 8");
}

// Decoder-identical reconstruction; both sides must run this exact
// expression so the round-trip check can demand bit equality.
Eigen::VectorXd reconstruct_column(const Eigen::MatrixXd& b,
                                   const Eigen::VectorXd& mu, double s,
                                   const Eigen::VectorXd& z) {
  return b * (s * z) + mu;
}

struct DimModels {
  std::vector<WindowModel> plain;
  // for every eighth dimension, both parity restrictions of the same window
  std::vector<WindowModel> even_sum, odd_sum;

  DimModels(const Model& model, double s, bool lattice_blocks) {
    const TrainState& st = model.state;
    for (int i = 0; i < model.dim(); ++i) {
      double sig = st.sigma[i] / s;
      if (lattice_blocks && i % 8 == 7) {
        // the last block coordinate has its parity fixed by the first seven
        even_sum.emplace_back(0.0, sig, 2, 0);
        odd_sum.emplace_back(0.0, sig, 2, 1);
      }
      // unconditional so plain stays indexable by absolute dimension
      plain.emplace_back(0.0, sig);
    }
  }

  const WindowModel& parity(int dim_index, int phase) const {
    int block = dim_index / 8;
    return phase == 0 ? even_sum[block] : odd_sum[block];
  }
};

struct EncodedPayload {
  std::vector<uint8_t> bytes;
  Eigen::MatrixXd recon;
};

EncodedPayload encode_payload(const Model& model, const Eigen::MatrixXd& data,
                              double s) {
  const int n = model.dim();
  const int64_t count = data.cols();
  const TrainState& st = model.state;
  MaterializedBasis m = materialize(st.basis);
  DimModels models(model, s, model.kind == QuantizerKind::FixedE8);

  RangeEncoder enc;
  EncodedPayload out;
  out.recon.resize(n, count);
  Eigen::VectorXd z(n);

  for (int64_t c = 0; c < count; ++c) {
    Eigen::VectorXd fc = data.col(c) - st.mu;
    if (model.kind == QuantizerKind::FixedE8) {
      Eigen::VectorXd y = fc / s;
      for (int b = 0; b < n / 8; ++b) {
        LatticePoint p = nearest_point_e8(y.segment(8 * b, 8));
        int coset =
            (p.embedding[0] != round_half_even(p.embedding[0])) ? 1 : 0;
        int64_t k[8];
        int64_t parity = 0;
        for (int i = 0; i < 8; ++i) {
          k[i] = checked_symbol(p.embedding[i] - 0.5 * coset);
          if (i < 7) parity = (parity + k[i]) & 1;
        }
        encode_bit(enc, coset);
        for (int i = 0; i < 7; ++i)
          encode_value(enc, models.plain[8 * b + i], k[i]);
        encode_value(enc, models.parity(8 * b + 7, int(parity)), k[7]);
        for (int i = 0; i < 8; ++i)
          z[8 * b + i] = double(k[i]) + 0.5 * coset;
      }
    } else {
      Eigen::VectorXd x = (m.w * fc) / s;
      for (int i = 0; i < n; ++i) {
        int64_t u = checked_symbol(x[i]);
        encode_value(enc, models.plain[i], u);
        z[i] = double(u);
      }
    }
    out.recon.col(c) = reconstruct_column(m.b, st.mu, s, z);
  }
  out.bytes = enc.finish();
  return out;
}

}  // namespace

std::vector<uint8_t> compress(const Model& model, const Eigen::MatrixXd& data,
                              int target) {
  const TrainState& st = model.state;
  const int n = model.dim();
  validate_kind_dim(model.kind, n);
  if (data.rows() != n)
    fail(ErrorCode::DimensionMismatch, "data dimension differs from the model");
  if (!data.allFinite()) fail(ErrorCode::NonFinite, "data has non-finite values");
  const double s = st.gains.step(target, st.q_s);

  EncodedPayload payload = encode_payload(model, data, s);

  StreamHeader h;
  h.dim = uint16_t(n);
  h.count = uint64_t(data.cols());
  h.step_scale = s;
  h.q_s = st.q_s;
  h.sigma = st.sigma;
  h.mu = st.mu;
  h.basis = materialize(st.basis).b;

  ByteWriter w;
  write_stream_header(w, h);
  w.u64(payload.bytes.size());
  w.bytes(payload.bytes.data(), payload.bytes.size());
  return std::move(w.buf);
}

Eigen::MatrixXd decompress(const Model& model,
                           const std::vector<uint8_t>& stream) {
  const TrainState& st = model.state;
  const int n = model.dim();
  validate_kind_dim(model.kind, n);

  ByteReader r(stream.data(), stream.size());
  StreamHeader h = read_stream_header(r);
  uint64_t payload_size = r.u64();
  if (r.remaining() != payload_size)
    fail(ErrorCode::CorruptStream, "stream payload size mismatch");

  if (h.dim != n)
    fail(ErrorCode::DimensionMismatch, "stream dimension differs from the model");
  MaterializedBasis m = materialize(st.basis);
  bool match = h.q_s == st.q_s && h.sigma == st.sigma && h.mu == st.mu &&
               h.basis == m.b;
  bool step_known = false;
  for (int t = 0; t < st.gains.count(); ++t)
    step_known = step_known || h.step_scale == st.gains.step(t, st.q_s);
  if (!match || !step_known)
    fail(ErrorCode::InvalidArgument, "stream was written by a different model");

  const double s = h.step_scale;
  DimModels models(model, s, model.kind == QuantizerKind::FixedE8);
  RangeDecoder dec(stream.data() + r.at, payload_size);

  Eigen::MatrixXd out(n, int64_t(h.count));
  Eigen::VectorXd z(n);
  for (int64_t c = 0; c < int64_t(h.count); ++c) {
    if (model.kind == QuantizerKind::FixedE8) {
      for (int b = 0; b < n / 8; ++b) {
        int coset = decode_bit(dec);
        int64_t k[8];
        int64_t parity = 0;
        for (int i = 0; i < 7; ++i) {
          k[i] = decode_value(dec, models.plain[8 * b + i]);
          parity = (parity + k[i]) & 1;
        }
        k[7] = decode_value(dec, models.parity(8 * b + 7, int(parity)));
        for (int i = 0; i < 8; ++i)
          z[8 * b + i] = double(k[i]) + 0.5 * coset;
      }
    } else {
      for (int i = 0; i < n; ++i)
        z[i] = double(decode_value(dec, models.plain[i]));
    }
    out.col(c) = reconstruct_column(m.b, st.mu, s, z);
  }
  return out;
}

Model train_model(const Eigen::MatrixXd& train_data, const TrainConfig& cfg) {
  const int n = int(train_data.rows());
  const int64_t cols = train_data.cols();
  validate_kind_dim(cfg.kind, n);
  validate_lambdas(cfg.lambdas);
  if (cols < 2) fail(ErrorCode::EmptyInput, "training needs at least 2 vectors");
  if (cfg.batch < 1 || cfg.iters < 0 || !(cfg.lr > 0.0))
    fail(ErrorCode::InvalidArgument, "bad training configuration");
  if (!train_data.allFinite())
    fail(ErrorCode::NonFinite, "training data has non-finite values");

  const int targets = int(cfg.lambdas.size());
  TrainState st = TrainState::init(n, targets);
  st.mu = train_data.rowwise().mean();
  Eigen::MatrixXd centered = train_data.colwise() - st.mu;
  st.sigma = (centered.array().square().rowwise().mean() + 1e-12).sqrt();
  st.q_s = 0.5;

  const bool freeze_basis = cfg.kind != QuantizerKind::Salvq;
  const bool freeze_gains = targets == 1;
  const int k = st.basis.skew_count();

  Adam adam(flat_size(st), cfg.lr);
  Rng rng_batch(derive_seed(cfg.seed, 1));
  Rng rng_noise(derive_seed(cfg.seed, 2));
  Rng rng_target(derive_seed(cfg.seed, 3));

  const int nb = int(std::min<int64_t>(cfg.batch, cols));
  Eigen::MatrixXd batch(n, nb), noise(n, nb);
  for (int it = 0; it < cfg.iters; ++it) {
    int target = sample_target(rng_target, targets);
    for (int j = 0; j < nb; ++j) {
      batch.col(j) = train_data.col(int64_t(rng_batch.next_below(uint64_t(cols))));
      for (int i = 0; i < n; ++i) noise(i, j) = rng_noise.next_sym_unit();
    }
    TrainGrad grad(st);
    forward_pass(st, batch, noise, cfg.lambdas[size_t(target)], target, &grad);

    Eigen::VectorXd g = flatten_grad(grad);
    if (freeze_basis) g.head(2 * k + n).setZero();
    if (freeze_gains) g.tail(targets).setZero();

    Eigen::VectorXd p = flatten(st);
    adam.step(p, g);
    unflatten(p, st);
    st.sigma = st.sigma.cwiseMax(1e-6);
    st.q_s = std::max(st.q_s, 1e-9);
  }

  Model model;
  model.kind = cfg.kind;
  model.state = st;
  model.lambdas = cfg.lambdas;
  return model;
}

RdPoint evaluate(const Model& model, const Eigen::MatrixXd& data, int target,
                 double peak) {
  if (data.cols() == 0) fail(ErrorCode::EmptyInput, "nothing to evaluate");
  if (!(peak > 0.0)) fail(ErrorCode::InvalidArgument, "peak must be positive");
  const TrainState& st = model.state;
  const double s = st.gains.step(target, st.q_s);

  EncodedPayload enc = encode_payload(model, data, s);

  // run the real decoder over the real bytes and demand the exact doubles
  std::vector<uint8_t> stream = compress(model, data, target);
  Eigen::MatrixXd decoded = decompress(model, stream);
  if (decoded.rows() != enc.recon.rows() || decoded.cols() != enc.recon.cols())
    fail(ErrorCode::RoundTripMismatch, "decoded shape differs");
  for (int64_t c = 0; c < decoded.cols(); ++c)
    for (int i = 0; i < decoded.rows(); ++i)
      if (decoded(i, c) != enc.recon(i, c))
        fail(ErrorCode::RoundTripMismatch,
             "decoder and encoder reconstructions differ");

  RdPoint p;
  p.target = target;
  p.lambda = size_t(target) < model.lambdas.size() ? model.lambdas[target] : 0.0;
  p.bits_per_vector = 8.0 * double(enc.bytes.size()) / double(data.cols());
  p.mse = (data - decoded).squaredNorm() / double(data.size());
  p.psnr_db = 10.0 * std::log10(peak * peak / p.mse);
  return p;
}

std::vector<RdPoint> sweep_lambdas(const Eigen::MatrixXd& train_split,
                                   const Eigen::MatrixXd& report_split,
                                   const TrainConfig& base,
                                   const std::vector<double>& lambdas,
                                   double peak, int jobs) {
  if (lambdas.empty()) fail(ErrorCode::InvalidArgument, "empty sweep");
  for (double l : lambdas)
    if (!(l > 0.0)) fail(ErrorCode::InvalidArgument, "sweep weights must be positive");
  if (jobs < 1) jobs = 1;

  std::vector<RdPoint> points(lambdas.size());
  std::vector<std::string> errors(lambdas.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= lambdas.size()) return;
      try {
        TrainConfig cfg = base;
        cfg.lambdas = {lambdas[i]};
        cfg.seed = base.seed + i;
        Model m = train_model(train_split, cfg);
        points[i] = evaluate(m, report_split, 0, peak);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  size_t threads = std::min(size_t(jobs), lambdas.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (!e.empty()) fail(ErrorCode::InvalidArgument, "sweep point failed: " + e);
  return points;
}

}  // namespace lvq
