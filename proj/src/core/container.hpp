#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "model.hpp"

namespace lvq {

// On-disk formats, all little-endian:
//   model   "SLVM" ver:u16 kind:u16 dim:u16 targets:u16 params:f64...
//   vectors "LVQV" ver:u16 dim:u16 count:u64 data:f32...
//   stream  "SLVQ" ver:u16 dim:u16 count:u64 step:f64 q_s:f64
//           sigma:f64*dim mu:f64*dim basis:f64*dim*dim
//           payload_size:u64 payload:bytes
// The stream header repeats the decoding-relevant model state so a stream
// plus its model can be cross-checked field for field before any symbol is
// decoded.

struct ByteWriter {
  std::vector<uint8_t> buf;
  void u16(uint16_t v);
  void u64(uint64_t v);
  void f64(double v);
  void bytes(const uint8_t* p, size_t n);
  void tag(const char* four);
};

struct ByteReader {
  const uint8_t* p;
  size_t n;
  size_t at = 0;
  ByteReader(const uint8_t* data, size_t size) : p(data), n(size) {}
  uint16_t u16();
  uint64_t u64();
  double f64();
  void bytes(uint8_t* out, size_t count);
  void expect_tag(const char* four, const char* what);
  size_t remaining() const { return n - at; }
};

void write_file(const std::string& path, const std::vector<uint8_t>& data);
std::vector<uint8_t> read_file(const std::string& path);

void save_model(const std::string& path, const Model& model);
Model load_model(const std::string& path);

void save_vectors(const std::string& path, const Eigen::MatrixXd& columns);
Eigen::MatrixXd load_vectors(const std::string& path);

struct StreamHeader {
  uint16_t dim = 0;
  uint64_t count = 0;
  double step_scale = 0.0;  // realized step for the encoded target
  double q_s = 0.0;
  Eigen::VectorXd sigma, mu;
  Eigen::MatrixXd basis;  // materialized B, row-major on disk
};

void write_stream_header(ByteWriter& w, const StreamHeader& h);
StreamHeader read_stream_header(ByteReader& r);

}  // namespace lvq
