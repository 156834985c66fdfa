// Command-line front end. Everything goes through the shared library's C
// interface; stdout carries machine-readable CSV only, diagnostics and the
// resolved configuration go to stderr.
#include <CLI11.hpp>
#include <lvqlab.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr const char* kCsvHeader = "lambda,target,bits_per_vector,mse,psnr_db";

struct VecDel {
  void operator()(lvq_vectors* v) const { lvq_vectors_free(v); }
};
struct ModelDel {
  void operator()(lvq_model* m) const { lvq_model_free(m); }
};
using VecPtr = std::unique_ptr<lvq_vectors, VecDel>;
using ModelPtr = std::unique_ptr<lvq_model, ModelDel>;

// Exit 2: bad invocation or malformed input files. Exit 1: data-dependent
// aborts (numeric blowups, corrupt payloads) from an otherwise valid call.
int exit_code_for(lvq_status s) {
  switch (s) {
    case LVQ_E_NON_FINITE:
    case LVQ_E_CORRUPT_STREAM:
    case LVQ_E_ROUND_TRIP_MISMATCH:
    case LVQ_E_SINGULAR_BASIS:
    case LVQ_E_SEARCH_TOO_LARGE:
    case LVQ_E_ALPHABET_OVERFLOW:
    case LVQ_E_PANIC:
      return 1;
    default:
      return 2;
  }
}

[[noreturn]] void die(lvq_status s, const std::string& doing) {
  std::fprintf(stderr, "error: %s: %s (%s)\n", doing.c_str(),
               lvq_last_error(), lvq_status_name(s));
  std::exit(exit_code_for(s));
}

[[noreturn]] void die_usage(const std::string& msg) {
  std::fprintf(stderr, "error: %s\n", msg.c_str());
  std::exit(2);
}

void check(lvq_status s, const std::string& doing) {
  if (s != LVQ_OK) die(s, doing);
}

// ---- source specs: ar1:n=8,rho=0.9,var=1,count=10000 or file:PATH

VecPtr load_source(const std::string& spec) {
  lvq_vectors* raw = nullptr;
  if (spec.rfind("file:", 0) == 0) {
    check(lvq_vectors_open(spec.substr(5).c_str(), &raw), "open " + spec);
    return VecPtr(raw);
  }
  if (spec.rfind("ar1:", 0) != 0)
    die_usage("source must start with ar1: or file: (got '" + spec + "')");
  int n = 8;
  double rho = 0.9, var = 1.0;
  long long count = 10000, seed = 0;
  std::stringstream ss(spec.substr(4));
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t eq = item.find('=');
    if (eq == std::string::npos)
      die_usage("source parameter '" + item + "' is not key=value");
    std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    try {
      if (key == "n") {
        n = std::stoi(val);
      } else if (key == "rho") {
        rho = std::stod(val);
      } else if (key == "var") {
        var = std::stod(val);
      } else if (key == "count") {
        count = std::stoll(val);
      } else if (key == "seed") {
        seed = std::stoll(val);
      } else {
        die_usage("unknown source parameter '" + key + "'");
      }
    } catch (const std::exception&) {
      die_usage("source parameter '" + item + "' has a bad value");
    }
  }
  check(lvq_vectors_ar1(n, rho, var, count, uint64_t(seed), &raw),
        "generate " + spec);
  return VecPtr(raw);
}

int quantizer_from_name(const std::string& name) {
  if (name == "usq") return LVQ_QUANTIZER_USQ;
  if (name == "e8") return LVQ_QUANTIZER_E8;
  if (name == "salvq") return LVQ_QUANTIZER_SALVQ;
  die_usage("quantizer must be usq, e8 or salvq (got '" + name + "')");
}

// ---- key=value config file; values act as defaults, flags still win

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::map<std::string, std::string> kv;
  std::ifstream in(path);
  if (!in) die_usage("cannot open config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    size_t eq = line.find('=', start);
    if (eq == std::string::npos)
      die_usage("config line " + std::to_string(lineno) + " is not key=value");
    size_t kend = line.find_last_not_of(" \t", eq - 1);
    std::string key = line.substr(start, kend - start + 1);
    size_t vstart = line.find_first_not_of(" \t", eq + 1);
    std::string val =
        vstart == std::string::npos ? "" : line.substr(vstart);
    size_t vend = val.find_last_not_of(" \t");
    if (vend != std::string::npos) val.resize(vend + 1);
    kv[key] = val;
  }
  return kv;
}

struct Defaults {
  std::string source = "ar1:n=8,rho=0.9,var=1,count=10000";
  std::string quantizer = "salvq";
  std::vector<double> lambdas = {0.008};
  int iters = 5000;
  int batch = 256;
  double lr = 0.01;
  long long seed = 0;
  int jobs = 1;

  // precedence below flags: config file beats the environment seed
  void apply_env() {
    if (const char* env = std::getenv("LVQLAB_SEED")) {
      try {
        seed = std::stoll(env);
      } catch (const std::exception&) {
        die_usage("LVQLAB_SEED is not an integer");
      }
    }
  }

  void apply_config(const std::map<std::string, std::string>& kv) {
    try {
      for (const auto& [key, val] : kv) {
        if (key == "source") {
          source = val;
        } else if (key == "quantizer") {
          quantizer = val;
        } else if (key == "lambdas" || key == "lambda") {
          lambdas = parse_lambda_list(val);
        } else if (key == "iters") {
          iters = std::stoi(val);
        } else if (key == "batch") {
          batch = std::stoi(val);
        } else if (key == "lr") {
          lr = std::stod(val);
        } else if (key == "seed") {
          seed = std::stoll(val);
        } else if (key == "jobs") {
          jobs = std::stoi(val);
        } else {
          die_usage("unknown config key '" + key + "'");
        }
      }
    } catch (const std::exception&) {
      die_usage("bad value in config file");
    }
  }

  static std::vector<double> parse_lambda_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    if (out.empty()) throw std::runtime_error("empty lambda list");
    return out;
  }
};

std::string join_lambdas(const std::vector<double>& ls) {
  std::string out;
  char buf[64];
  for (size_t i = 0; i < ls.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.17g", i ? "," : "", ls[i]);
    out += buf;
  }
  return out;
}

void print_rd_row(const lvq_rd_point& p) {
  std::printf("%.17g,%d,%.17g,%.17g,%.17g\n", p.lambda, p.target,
              p.bits_per_vector, p.mse, p.psnr_db);
}

std::vector<lvq_rd_point> read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) die_usage("cannot open curve file " + path);
  std::string line;
  if (!std::getline(in, line)) die_usage("curve file " + path + " is empty");
  if (line != kCsvHeader)
    die_usage("curve file " + path + " must start with '" + kCsvHeader + "'");
  std::vector<lvq_rd_point> pts;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    lvq_rd_point p;
    double target = 0.0;
    double* fields[5] = {&p.lambda, &target, &p.bits_per_vector, &p.mse,
                         &p.psnr_db};
    std::stringstream ss(line);
    std::string cell;
    for (int i = 0; i < 5; ++i) {
      if (!std::getline(ss, cell, ','))
        die_usage(path + ":" + std::to_string(lineno) + ": expected 5 fields");
      try {
        size_t used = 0;
        *fields[i] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        die_usage(path + ":" + std::to_string(lineno) + ": bad number '" +
                  cell + "'");
      }
    }
    if (std::getline(ss, cell, ','))
      die_usage(path + ":" + std::to_string(lineno) + ": expected 5 fields");
    p.target = int(target);
    pts.push_back(p);
  }
  return pts;
}

VecPtr pick_split(const VecPtr& all, const std::string& split) {
  if (split == "all") return {};
  lvq_vectors *train = nullptr, *hold = nullptr;
  check(lvq_vectors_split(all.get(), &train, &hold), "split source");
  if (split == "train") {
    lvq_vectors_free(hold);
    return VecPtr(train);
  }
  if (split == "eval") {
    lvq_vectors_free(train);
    return VecPtr(hold);
  }
  die_usage("split must be train, eval or all (got '" + split + "')");
}

}  // namespace

int main(int argc, char** argv) {
  Defaults d;
  d.apply_env();
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) {
      d.apply_config(read_config_file(argv[i + 1]));
    } else if (a.rfind("--config=", 0) == 0) {
      d.apply_config(read_config_file(a.substr(9)));
    }
  }

  CLI::App app{"lattice vector quantization toolkit"};
  app.require_subcommand(1);
  std::string config_path;  // consumed in the pre-scan above
  app.add_option("--config", config_path, "key=value defaults file")
      ->configurable(false);
  app.fallthrough();

  // shared option storage; each subcommand registers the flags it uses
  std::string source = d.source, quantizer = d.quantizer;
  std::string model_path, input_path, out_path, ref_path, test_path;
  std::string split = "eval";
  std::vector<double> lambdas = d.lambdas;
  int iters = d.iters, batch = d.batch, jobs = d.jobs, target = 0;
  double lr = d.lr;
  long long seed = d.seed;
  bool all_targets = false;

  auto add_source = [&](CLI::App* cmd) {
    cmd->add_option("--source", source,
                    "ar1:n=8,rho=0.9,var=1,count=10000[,seed=S] or file:PATH");
  };
  auto add_train_flags = [&](CLI::App* cmd) {
    cmd->add_option("--quantizer", quantizer, "usq | e8 | salvq");
    cmd->add_option("--lambda,--lambdas", lambdas,
                    "rate weight(s); several train one multi-rate model")
        ->delimiter(',');
    cmd->add_option("--iters", iters, "optimizer steps");
    cmd->add_option("--batch", batch, "vectors per step");
    cmd->add_option("--lr", lr, "learning rate");
    cmd->add_option("--seed", seed, "rng seed");
  };

  CLI::App* gen = app.add_subcommand("gen", "write a source as a vector file");
  add_source(gen);
  gen->add_option("--out", out_path, "output vector file")->required();

  CLI::App* train = app.add_subcommand("train", "fit a model on a source");
  add_source(train);
  add_train_flags(train);
  train->add_option("--out", out_path, "output model file")->required();

  CLI::App* compress =
      app.add_subcommand("compress", "encode a vector file with a model");
  compress->add_option("--model", model_path)->required();
  compress->add_option("--input", input_path, "vector file")->required();
  compress->add_option("--target", target, "rate target index");
  compress->add_option("--out", out_path, "output bitstream")->required();

  CLI::App* decompress =
      app.add_subcommand("decompress", "decode a bitstream with its model");
  decompress->add_option("--model", model_path)->required();
  decompress->add_option("--input", input_path, "bitstream")->required();
  decompress->add_option("--out", out_path, "output vector file")->required();

  CLI::App* eval =
      app.add_subcommand("eval", "rate-distortion of a model on a source");
  eval->add_option("--model", model_path)->required();
  add_source(eval);
  eval->add_option("--split", split, "train | eval | all (default eval)");
  eval->add_option("--target", target, "rate target index");
  eval->add_flag("--all-targets", all_targets, "one row per rate target");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "single-rate model per lambda, evaluated on the holdout");
  add_source(sweep);
  add_train_flags(sweep);
  sweep->add_option("--jobs", jobs, "parallel trainings");

  CLI::App* bdrate =
      app.add_subcommand("bdrate", "average rate difference of two curves");
  bdrate->add_option("--ref", ref_path, "reference curve CSV")->required();
  bdrate->add_option("--test", test_path, "test curve CSV")->required();

  CLI::App* nsm = app.add_subcommand(
      "nsm", "Monte Carlo normalized second moment of a lattice");
  std::string lattice = "zn";
  int nsm_dim = 2;
  long long nsm_samples = 1000000;
  nsm->add_option("lattice", lattice, "zn | dn | e8 | a2")->required();
  nsm->add_option("dim", nsm_dim, "dimension")->required();
  nsm->add_option("samples", nsm_samples, "sample count")->required();
  nsm->add_option("--seed", seed, "rng seed");

  // lets the app-level --config appear after the subcommand name too
  for (CLI::App* sub : {gen, train, compress, decompress, eval, sweep, bdrate, nsm})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::exit(app.exit(e));
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::exit(2);
  }

  lvq_train_config cfg;
  lvq_train_config_init(&cfg);
  cfg.lambdas = lambdas.data();
  cfg.lambda_count = int(lambdas.size());
  cfg.iters = iters;
  cfg.batch = batch;
  cfg.lr = lr;
  cfg.seed = uint64_t(seed);

  if (gen->parsed()) {
    std::fprintf(stderr, "# gen source=%s out=%s\n", source.c_str(),
                 out_path.c_str());
    VecPtr v = load_source(source);
    check(lvq_vectors_save(v.get(), out_path.c_str()), "write " + out_path);
    std::fprintf(stderr, "wrote %lld vectors of dim %d\n",
                 (long long)lvq_vectors_count(v.get()),
                 lvq_vectors_dim(v.get()));
    return 0;
  }

  if (train->parsed()) {
    cfg.quantizer = quantizer_from_name(quantizer);
    std::fprintf(stderr,
                 "# train source=%s quantizer=%s lambdas=%s iters=%d "
                 "batch=%d lr=%.17g seed=%lld out=%s\n",
                 source.c_str(), quantizer.c_str(),
                 join_lambdas(lambdas).c_str(), iters, batch, lr, seed,
                 out_path.c_str());
    VecPtr all = load_source(source);
    VecPtr tr = pick_split(all, "train");
    lvq_model* m = nullptr;
    check(lvq_train(tr.get(), &cfg, &m), "train");
    ModelPtr model(m);
    check(lvq_model_save(m, out_path.c_str()), "write " + out_path);
    std::fprintf(stderr, "trained on %lld vectors, wrote %s\n",
                 (long long)lvq_vectors_count(tr.get()), out_path.c_str());
    return 0;
  }

  if (compress->parsed()) {
    std::fprintf(stderr, "# compress model=%s input=%s target=%d out=%s\n",
                 model_path.c_str(), input_path.c_str(), target,
                 out_path.c_str());
    lvq_model* m = nullptr;
    check(lvq_model_open(model_path.c_str(), &m), "open " + model_path);
    ModelPtr model(m);
    lvq_vectors* v = nullptr;
    check(lvq_vectors_open(input_path.c_str(), &v), "open " + input_path);
    VecPtr data(v);
    uint64_t payload = 0;
    check(lvq_compress_file(m, v, target, out_path.c_str(), &payload),
          "compress");
    std::fprintf(stderr, "%lld vectors -> %llu payload bytes\n",
                 (long long)lvq_vectors_count(v),
                 (unsigned long long)payload);
    return 0;
  }

  if (decompress->parsed()) {
    std::fprintf(stderr, "# decompress model=%s input=%s out=%s\n",
                 model_path.c_str(), input_path.c_str(), out_path.c_str());
    lvq_model* m = nullptr;
    check(lvq_model_open(model_path.c_str(), &m), "open " + model_path);
    ModelPtr model(m);
    lvq_vectors* v = nullptr;
    check(lvq_decompress_file(m, input_path.c_str(), &v), "decompress");
    VecPtr data(v);
    check(lvq_vectors_save(v, out_path.c_str()), "write " + out_path);
    std::fprintf(stderr, "decoded %lld vectors of dim %d\n",
                 (long long)lvq_vectors_count(v), lvq_vectors_dim(v));
    return 0;
  }

  if (eval->parsed()) {
    std::string which =
        all_targets ? "all targets" : "target=" + std::to_string(target);
    std::fprintf(stderr, "# eval model=%s source=%s split=%s %s\n",
                 model_path.c_str(), source.c_str(), split.c_str(),
                 which.c_str());
    lvq_model* m = nullptr;
    check(lvq_model_open(model_path.c_str(), &m), "open " + model_path);
    ModelPtr model(m);
    VecPtr all = load_source(source);
    double peak = 0.0;
    check(lvq_vectors_peak(all.get(), &peak), "peak");
    VecPtr part = pick_split(all, split);
    const lvq_vectors* data = part ? part.get() : all.get();
    if (!all_targets && (target < 0 || target >= lvq_model_targets(m)))
      die_usage("target " + std::to_string(target) + " out of range (model has " +
                std::to_string(lvq_model_targets(m)) + ")");
    std::printf("%s\n", kCsvHeader);
    int first = all_targets ? 0 : target;
    int last = all_targets ? lvq_model_targets(m) - 1 : target;
    for (int t = first; t <= last; ++t) {
      lvq_rd_point p;
      check(lvq_evaluate(m, data, t, peak, &p), "evaluate");
      print_rd_row(p);
    }
    return 0;
  }

  if (sweep->parsed()) {
    cfg.quantizer = quantizer_from_name(quantizer);
    std::fprintf(stderr,
                 "# sweep source=%s quantizer=%s lambdas=%s iters=%d "
                 "batch=%d lr=%.17g seed=%lld jobs=%d\n",
                 source.c_str(), quantizer.c_str(),
                 join_lambdas(lambdas).c_str(), iters, batch, lr, seed, jobs);
    VecPtr all = load_source(source);
    double peak = 0.0;
    check(lvq_vectors_peak(all.get(), &peak), "peak");
    lvq_vectors *tr = nullptr, *hold = nullptr;
    check(lvq_vectors_split(all.get(), &tr, &hold), "split source");
    VecPtr train_v(tr), hold_v(hold);
    std::vector<lvq_rd_point> pts(lambdas.size());
    check(lvq_sweep(tr, hold, &cfg, lambdas.data(), int(lambdas.size()), peak,
                    jobs, pts.data()),
          "sweep");
    std::printf("%s\n", kCsvHeader);
    for (const auto& p : pts) print_rd_row(p);
    return 0;
  }

  if (bdrate->parsed()) {
    std::fprintf(stderr, "# bdrate ref=%s test=%s\n", ref_path.c_str(),
                 test_path.c_str());
    std::vector<lvq_rd_point> ref = read_curve_csv(ref_path);
    std::vector<lvq_rd_point> test = read_curve_csv(test_path);
    double bd = 0.0;
    check(lvq_bd_rate(ref.data(), int(ref.size()), test.data(),
                      int(test.size()), &bd),
          "bdrate");
    std::printf("bd_rate_percent\n%.6f\n", bd);
    return 0;
  }

  if (nsm->parsed()) {
    std::fprintf(stderr, "# nsm lattice=%s dim=%d samples=%lld seed=%lld\n",
                 lattice.c_str(), nsm_dim, nsm_samples, seed);
    double g = 0.0, se = 0.0;
    check(lvq_nsm(lattice.c_str(), nsm_dim, nsm_samples, uint64_t(seed), &g,
                  &se),
          "nsm");
    std::printf("lattice,samples,g,std_error\n");
    std::printf("%s,%lld,%.9f,%.3e\n", lattice.c_str(), nsm_samples, g, se);
    return 0;
  }

  die_usage("no subcommand");  // unreachable with require_subcommand
}
