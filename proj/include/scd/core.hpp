#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace scd {

// Dense row-major double matrix. Rows are facilities and columns are
// consumers everywhere in this project unless a function says otherwise.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double init = 0.0)
      : rows_(rows), cols_(cols), v_(static_cast<size_t>(rows) * cols, init) {}

  double& operator()(int r, int c) { return v_[static_cast<size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return v_[static_cast<size_t>(r) * cols_ + c]; }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return v_.empty(); }

  double row_sum(int r) const {
    double s = 0.0;
    for (int c = 0; c < cols_; ++c) s += (*this)(r, c);
    return s;
  }
  double col_sum(int c) const {
    double s = 0.0;
    for (int r = 0; r < rows_; ++r) s += (*this)(r, c);
    return s;
  }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && v_ == o.v_;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> v_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Deterministic derivation of per-task seeds (bench instances, SA/VNS
// replications, per-scenario streams) from one master seed.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 1));
}

// Malformed input files (missing/ill-typed fields).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structurally valid file whose values break an instance invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scd
