#include "diffsr/numerics/linalg.hpp"

#include <cmath>

namespace diffsr {

std::string shape_string(const Matrix& m) {
  return "(" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")";
}

void require_length(const Vector& v, Eigen::Index n, std::string_view what) {
  if (v.size() != n)
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(n) + ", got " +
                         std::to_string(v.size()));
}

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, std::string_view what) {
  if (m.rows() != rows || m.cols() != cols)
    throw DimensionError(std::string(what) + ": expected (" + std::to_string(rows) + "x" +
                         std::to_string(cols) + "), got " + shape_string(m));
}

void require_same_shape(const Matrix& a, const Matrix& b, std::string_view what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError(std::string(what) + ": shape " + shape_string(a) + " vs " + shape_string(b));
}

bool all_finite(std::span<const double> xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

Batch stack_rows(const Batch& top, const Batch& bottom) {
  if (top.cols() != bottom.cols())
    throw DimensionError("stack_rows: column counts " + std::to_string(top.cols()) + " vs " +
                         std::to_string(bottom.cols()));
  Batch out(top.rows() + bottom.rows(), top.cols());
  out.topRows(top.rows()) = top;
  out.bottomRows(bottom.rows()) = bottom;
  return out;
}

}  // namespace diffsr
