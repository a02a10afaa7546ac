#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "diffsr/numerics/errors.hpp"

namespace diffsr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Batches are stored column-major with one sample per column.
using Batch = Eigen::MatrixXd;

std::string shape_string(const Matrix& m);

void require_length(const Vector& v, Eigen::Index n, std::string_view what);
void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, std::string_view what);
void require_same_shape(const Matrix& a, const Matrix& b, std::string_view what);

bool all_finite(std::span<const double> xs);
inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline std::span<double> as_span(Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
inline std::span<const double> as_span(const Matrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}
inline std::span<double> as_span(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
inline std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

/// A named view into a parameter (or gradient) tensor.
struct ParamView {
  std::string name;
  std::span<double> data;
};

/// Concatenate two batches column-wise shaped (rows_a + rows_b) x n.
Batch stack_rows(const Batch& top, const Batch& bottom);

}  // namespace diffsr
