#include "lvqlab.h"

#include <cstring>
#include <new>
#include <string>

#include "core/bdrate.hpp"
#include "core/container.hpp"
#include "core/lattice.hpp"
#include "core/pipeline.hpp"
#include "core/source.hpp"

struct lvq_vectors {
  Eigen::MatrixXd data;
};

struct lvq_model {
  lvq::Model model;
};

namespace {

thread_local std::string g_last_error;

lvq_status to_status(lvq::ErrorCode c) {
  // ErrorCode values map to status 1..15 in declaration order
  return static_cast<lvq_status>(static_cast<int>(c) + 1);
}

// Every exported function funnels through here so exceptions never cross
// the C boundary.
template <typename Fn>
lvq_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return LVQ_OK;
  } catch (const lvq::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return LVQ_E_PANIC;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LVQ_E_PANIC;
  }
}

lvq_status report(lvq_status s, const char* msg) {
  g_last_error = msg;
  return s;
}

lvq::TrainConfig to_train_config(const lvq_train_config* cfg) {
  lvq::TrainConfig c;
  if (cfg->quantizer < 0 || cfg->quantizer > LVQ_QUANTIZER_SALVQ)
    lvq::fail(lvq::ErrorCode::InvalidArgument, "unknown quantizer kind");
  c.kind = static_cast<lvq::QuantizerKind>(cfg->quantizer);
  if (!cfg->lambdas || cfg->lambda_count <= 0)
    lvq::fail(lvq::ErrorCode::InvalidArgument, "need at least one lambda");
  c.lambdas.assign(cfg->lambdas, cfg->lambdas + cfg->lambda_count);
  c.iters = cfg->iters;
  c.batch = cfg->batch;
  c.lr = cfg->lr;
  c.seed = cfg->seed;
  return c;
}

lvq_rd_point to_c_point(const lvq::RdPoint& p) {
  lvq_rd_point q;
  q.lambda = p.lambda;
  q.target = p.target;
  q.bits_per_vector = p.bits_per_vector;
  q.mse = p.mse;
  q.psnr_db = p.psnr_db;
  return q;
}

std::vector<lvq::RdPoint> to_cpp_points(const lvq_rd_point* pts, int count) {
  std::vector<lvq::RdPoint> out;
  for (int i = 0; i < count; ++i) {
    lvq::RdPoint p;
    p.lambda = pts[i].lambda;
    p.target = pts[i].target;
    p.bits_per_vector = pts[i].bits_per_vector;
    p.mse = pts[i].mse;
    p.psnr_db = pts[i].psnr_db;
    out.push_back(p);
  }
  return out;
}

}  // namespace

extern "C" {

const char* lvq_status_name(lvq_status s) {
  if (s == LVQ_OK) return "Ok";
  if (s == LVQ_E_PANIC) return "Panic";
  int c = static_cast<int>(s) - 1;
  if (c < 0 || c > static_cast<int>(lvq::ErrorCode::Format)) return "Unknown";
  return lvq::error_code_name(static_cast<lvq::ErrorCode>(c));
}

const char* lvq_last_error(void) { return g_last_error.c_str(); }

const char* lvq_version(void) { return "1.0.0"; }

lvq_status lvq_vectors_ar1(int dim, double rho, double var, int64_t count,
                           uint64_t seed, lvq_vectors** out) {
  if (!out) return report(LVQ_E_INVALID_ARGUMENT, "null output handle");
  return guarded([&] {
    *out = new lvq_vectors{lvq::ar1_vectors(dim, rho, var, count, seed)};
  });
}

lvq_status lvq_vectors_open(const char* path, lvq_vectors** out) {
  if (!out || !path) return report(LVQ_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new lvq_vectors{lvq::load_vectors(path)}; });
}

lvq_status lvq_vectors_save(const lvq_vectors* v, const char* path) {
  if (!v || !path) return report(LVQ_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] { lvq::save_vectors(path, v->data); });
}

lvq_status lvq_vectors_split(const lvq_vectors* all, lvq_vectors** train,
                             lvq_vectors** holdout) {
  if (!all || !train || !holdout)
    return report(LVQ_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    Eigen::MatrixXd t, h;
    lvq::split_train_eval(all->data, t, h);
    *train = new lvq_vectors{std::move(t)};
    *holdout = new lvq_vectors{std::move(h)};
  });
}

int lvq_vectors_dim(const lvq_vectors* v) {
  return v ? static_cast<int>(v->data.rows()) : 0;
}

int64_t lvq_vectors_count(const lvq_vectors* v) {
  return v ? static_cast<int64_t>(v->data.cols()) : 0;
}

lvq_status lvq_vectors_get(const lvq_vectors* v, int64_t index, double* dst) {
  if (!v || !dst) return report(LVQ_E_INVALID_ARGUMENT, "null argument");
  if (index < 0 || index >= v->data.cols())
    return report(LVQ_E_INDEX_OUT_OF_RANGE, "vector index out of range");
  Eigen::VectorXd col = v->data.col(index);
  std::memcpy(dst, col.data(), sizeof(double) * size_t(col.size()));
  g_last_error.clear();
  return LVQ_OK;
}

lvq_status lvq_vectors_peak(const lvq_vectors* v, double* out) {
  if (!v || !out) return report(LVQ_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = lvq::source_peak(v->data); });
}

void lvq_vectors_free(lvq_vectors* v) { delete v; }

void lvq_train_config_init(lvq_train_config* cfg) {
  if (!cfg) return;
  static const double kDefaultLambda = 0.008;
  cfg->quantizer = LVQ_QUANTIZER_USQ;
  cfg->lambdas = &kDefaultLambda;
  cfg->lambda_count = 1;
  cfg->iters = 5000;
  cfg->batch = 256;
  cfg->lr = 0.01;
  cfg->seed = 0;
}

lvq_status lvq_train(const lvq_vectors* train_data,
                     const lvq_train_config* cfg, lvq_model** out) {
  if (!train_data || !cfg || !out)
    return report(LVQ_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out =
        new lvq_model{lvq::train_model(train_data->data, to_train_config(cfg))};
  });
}

lvq_status lvq_model_open(const char* path, lvq_model** out) {
  if (!path || !out) return report(LVQ_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new lvq_model{lvq::load_model(path)}; });
}

lvq_status lvq_model_save(const lvq_model* m, const char* path) {
  if (!m || !path) return report(LVQ_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] { lvq::save_model(path, m->model); });
}

int lvq_model_dim(const lvq_model* m) { return m ? m->model.dim() : 0; }

int lvq_model_targets(const lvq_model* m) { return m ? m->model.targets() : 0; }

int lvq_model_quantizer(const lvq_model* m) {
  return m ? static_cast<int>(m->model.kind) : -1;
}

lvq_status lvq_model_step(const lvq_model* m, int target, double* out) {
  if (!m || !out) return report(LVQ_E_INVALID_ARGUMENT, "null argument");
  return guarded(
      [&] { *out = m->model.state.gains.step(target, m->model.state.q_s); });
}

lvq_status lvq_model_lambda(const lvq_model* m, int target, double* out) {
  if (!m || !out) return report(LVQ_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    if (target < 0 || size_t(target) >= m->model.lambdas.size())
      lvq::fail(lvq::ErrorCode::IndexOutOfRange, "no such rate target");
    *out = m->model.lambdas[size_t(target)];
  });
}

void lvq_model_free(lvq_model* m) { delete m; }

lvq_status lvq_compress_file(const lvq_model* m, const lvq_vectors* data,
                             int target, const char* out_path,
                             uint64_t* payload_bytes) {
  if (!m || !data || !out_path)
    return report(LVQ_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::vector<uint8_t> stream = lvq::compress(m->model, data->data, target);
    if (payload_bytes) {
      // payload length sits behind the stream header
      lvq::ByteReader r(stream.data(), stream.size());
      lvq::read_stream_header(r);
      *payload_bytes = r.u64();
    }
    lvq::write_file(out_path, stream);
  });
}

lvq_status lvq_decompress_file(const lvq_model* m, const char* stream_path,
                               lvq_vectors** out) {
  if (!m || !stream_path || !out)
    return report(LVQ_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::vector<uint8_t> stream = lvq::read_file(stream_path);
    *out = new lvq_vectors{lvq::decompress(m->model, stream)};
  });
}

lvq_status lvq_evaluate(const lvq_model* m, const lvq_vectors* data,
                        int target, double peak, lvq_rd_point* out) {
  if (!m || !data || !out)
    return report(LVQ_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = to_c_point(lvq::evaluate(m->model, data->data, target, peak));
  });
}

lvq_status lvq_sweep(const lvq_vectors* train_data,
                     const lvq_vectors* report_data,
                     const lvq_train_config* base, const double* lambdas,
                     int lambda_count, double peak, int jobs,
                     lvq_rd_point* out) {
  if (!train_data || !report_data || !base || !lambdas || !out)
    return report(LVQ_E_INVALID_ARGUMENT, "null argument");
  if (lambda_count <= 0)
    return report(LVQ_E_INVALID_ARGUMENT, "need at least one lambda");
  return guarded([&] {
    std::vector<double> ls(lambdas, lambdas + lambda_count);
    std::vector<lvq::RdPoint> pts =
        lvq::sweep_lambdas(train_data->data, report_data->data,
                           to_train_config(base), ls, peak, jobs);
    for (int i = 0; i < lambda_count; ++i) out[i] = to_c_point(pts[size_t(i)]);
  });
}

lvq_status lvq_bd_rate(const lvq_rd_point* ref, int ref_count,
                       const lvq_rd_point* test, int test_count, double* out) {
  if (!ref || !test || !out)
    return report(LVQ_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = lvq::bd_rate_percent(to_cpp_points(ref, ref_count),
                                to_cpp_points(test, test_count));
  });
}

lvq_status lvq_nsm(const char* lattice, int dim, int64_t samples,
                   uint64_t seed, double* g, double* std_error) {
  if (!lattice || !g) return report(LVQ_E_INVALID_ARGUMENT, "null argument");
  if (samples <= 0) return report(LVQ_E_INVALID_ARGUMENT, "samples must be positive");
  return guarded([&] {
    lvq::NamedLattice which;
    std::string name(lattice);
    if (name == "zn") {
      which = lvq::NamedLattice::Zn;
    } else if (name == "dn") {
      which = lvq::NamedLattice::Dn;
    } else if (name == "e8") {
      which = lvq::NamedLattice::E8;
    } else if (name == "a2") {
      which = lvq::NamedLattice::A2;
    } else {
      lvq::fail(lvq::ErrorCode::BadSourceSpec,
                "unknown lattice name: " + name);
    }
    lvq::NsmEstimate est = lvq::nsm_monte_carlo(which, dim, samples, seed);
    *g = est.g;
    if (std_error) *std_error = est.std_error;
  });
}

}  // extern "C"
