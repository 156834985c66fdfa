/* C interface to the lattice quantization toolkit. Every entry point is
 * thread-compatible: handles are not internally synchronized, but distinct
 * handles may be used from distinct threads freely. Functions return
 * LVQ_OK or a status code; lvq_last_error() describes the most recent
 * failure on the calling thread. */
#ifndef LVQLAB_H
#define LVQLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. 0 is success; everything else maps one-to-one onto the
 * library's internal failure kinds and is stable across releases. */
typedef enum lvq_status {
  LVQ_OK = 0,
  LVQ_E_INVALID_ARGUMENT = 1,
  LVQ_E_DIMENSION_MISMATCH = 2,
  LVQ_E_SINGULAR_BASIS = 3,
  LVQ_E_NON_FINITE = 4,
  LVQ_E_SEARCH_TOO_LARGE = 5,
  LVQ_E_ALPHABET_OVERFLOW = 6,
  LVQ_E_CORRUPT_STREAM = 7,
  LVQ_E_EMPTY_INPUT = 8,
  LVQ_E_BAD_SOURCE_SPEC = 9,
  LVQ_E_INDEX_OUT_OF_RANGE = 10,
  LVQ_E_TOO_FEW_POINTS = 11,
  LVQ_E_INSUFFICIENT_OVERLAP = 12,
  LVQ_E_ROUND_TRIP_MISMATCH = 13,
  LVQ_E_IO = 14,
  LVQ_E_FORMAT = 15,
  LVQ_E_PANIC = 16 /* unexpected internal failure */
} lvq_status;

const char* lvq_status_name(lvq_status s);

/* Message for the last failing call on this thread; empty string if the
 * last call succeeded. The pointer stays valid until the next call from
 * the same thread. */
const char* lvq_last_error(void);

const char* lvq_version(void);

/* ---- vector sets (columns are vectors; doubles in memory, f32 on disk) */

typedef struct lvq_vectors lvq_vectors;

lvq_status lvq_vectors_ar1(int dim, double rho, double var, int64_t count,
                           uint64_t seed, lvq_vectors** out);
lvq_status lvq_vectors_open(const char* path, lvq_vectors** out);
lvq_status lvq_vectors_save(const lvq_vectors* v, const char* path);
/* every tenth vector (index 9 mod 10) goes to holdout, the rest to train */
lvq_status lvq_vectors_split(const lvq_vectors* all, lvq_vectors** train,
                             lvq_vectors** holdout);
int lvq_vectors_dim(const lvq_vectors* v);
int64_t lvq_vectors_count(const lvq_vectors* v);
/* copies vector `index` into dst[0..dim) */
lvq_status lvq_vectors_get(const lvq_vectors* v, int64_t index, double* dst);
/* distortion reference level: four standard deviations of the scalars */
lvq_status lvq_vectors_peak(const lvq_vectors* v, double* out);
void lvq_vectors_free(lvq_vectors* v);

/* ---- models */

typedef struct lvq_model lvq_model;

enum {
  LVQ_QUANTIZER_USQ = 0,
  LVQ_QUANTIZER_E8 = 1,
  LVQ_QUANTIZER_SALVQ = 2
};

typedef struct lvq_train_config {
  int quantizer;         /* LVQ_QUANTIZER_* */
  const double* lambdas; /* strictly increasing rate weights */
  int lambda_count;      /* > 1 trains one multi-rate model */
  int iters;
  int batch;
  double lr;
  uint64_t seed;
} lvq_train_config;

/* sensible defaults: usq, single lambda 0.008, 5000 iters, batch 256,
 * lr 0.01, seed 0 (lambdas points at a static buffer) */
void lvq_train_config_init(lvq_train_config* cfg);

lvq_status lvq_train(const lvq_vectors* train_data,
                     const lvq_train_config* cfg, lvq_model** out);
lvq_status lvq_model_open(const char* path, lvq_model** out);
lvq_status lvq_model_save(const lvq_model* m, const char* path);
int lvq_model_dim(const lvq_model* m);
int lvq_model_targets(const lvq_model* m);
int lvq_model_quantizer(const lvq_model* m);
/* realized quantization step for a rate target */
lvq_status lvq_model_step(const lvq_model* m, int target, double* out);
/* rate weight the target was trained against */
lvq_status lvq_model_lambda(const lvq_model* m, int target, double* out);
void lvq_model_free(lvq_model* m);

/* ---- coding */

/* writes a self-describing bitstream; payload_bytes (optional) receives the
 * entropy-coded byte count, excluding the header */
lvq_status lvq_compress_file(const lvq_model* m, const lvq_vectors* data,
                             int target, const char* out_path,
                             uint64_t* payload_bytes);
lvq_status lvq_decompress_file(const lvq_model* m, const char* stream_path,
                               lvq_vectors** out);

/* ---- metrics */

typedef struct lvq_rd_point {
  double lambda;
  int target;
  double bits_per_vector; /* entropy-coded payload only */
  double mse;
  double psnr_db;
} lvq_rd_point;

/* full compress + decompress, verifying the decoder reproduces the
 * encoder-side reconstruction bit-exactly */
lvq_status lvq_evaluate(const lvq_model* m, const lvq_vectors* data,
                        int target, double peak, lvq_rd_point* out);

/* trains one single-rate model per lambda (seed = base seed + index) and
 * evaluates each on report_data; out must hold lambda_count entries;
 * jobs > 1 runs trainings in parallel without changing the results */
lvq_status lvq_sweep(const lvq_vectors* train_data,
                     const lvq_vectors* report_data,
                     const lvq_train_config* base, const double* lambdas,
                     int lambda_count, double peak, int jobs,
                     lvq_rd_point* out);

/* average rate difference of test vs ref in percent over the shared
 * quality range; negative means test is cheaper at equal quality */
lvq_status lvq_bd_rate(const lvq_rd_point* ref, int ref_count,
                       const lvq_rd_point* test, int test_count, double* out);

/* Monte Carlo normalized second moment of a named lattice: "zn", "dn",
 * "e8" (dim must be 8), or "a2" (dim must be 2) */
lvq_status lvq_nsm(const char* lattice, int dim, int64_t samples,
                   uint64_t seed, double* g, double* std_error);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LVQLAB_H */
