#include "diffsr/kernels/kernels.hpp"

#include "diffsr/kernels/vmath.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

namespace diffsr::kernels {
namespace {

Eigen::Index block_count(Eigen::Index n, Eigen::Index block) { return (n + block - 1) / block; }

template <class Fn>
void for_blocks(Eigen::Index n, Eigen::Index block, Fn&& fn) {
  const Eigen::Index blocks = block_count(n, block);
#pragma omp parallel for schedule(static) if (blocks > 1)
  for (Eigen::Index k = 0; k < blocks; ++k) {
    const Eigen::Index begin = k * block;
    fn(begin, std::min(block, n - begin));
  }
}

void sin_columns(const Eigen::Ref<const Matrix>& Z, Eigen::Ref<Matrix> out, bool cosine) {
  for (Eigen::Index k = 0; k < Z.cols(); ++k) {
    if (cosine)
      vcos(Z.col(k).data(), out.col(k).data(), Z.rows());
    else
      vsin(Z.col(k).data(), out.col(k).data(), Z.rows());
  }
}

void apply_activation(Activation act, const Eigen::Ref<const Matrix>& Z, Eigen::Ref<Matrix> A) {
  const auto z = Z.array();
  switch (act) {
    case Activation::identity: A = Z; break;
    case Activation::relu: A = z.cwiseMax(0.0).matrix(); break;
    case Activation::tanh: A = z.tanh().matrix(); break;
    case Activation::elu: A = (z.max(0.0) + z.min(0.0).exp() - 1.0).matrix(); break;
    case Activation::sin: sin_columns(Z, A, false); break;
  }
}

// dZ <- dZ * act'(Z)
void scale_by_slope(Activation act, const Eigen::Ref<const Matrix>& Z, Eigen::Ref<Matrix> dZ) {
  const auto z = Z.array();
  auto dz = dZ.array();
  switch (act) {
    case Activation::identity: break;
    case Activation::relu: dz *= (z > 0.0).cast<double>(); break;
    case Activation::tanh: dz *= 1.0 - z.tanh().square(); break;
    case Activation::elu: dz *= z.min(0.0).exp(); break;
    case Activation::sin: {
      Matrix c(Z.rows(), Z.cols());
      sin_columns(Z, c, true);
      dz *= c.array();
      break;
    }
  }
}

}  // namespace

int max_threads() { return omp_get_max_threads(); }

void dense_forward(Exec exec, const Matrix& W, const Vector* bias, Activation act, const Batch& X,
                   Batch& Z, Batch& A) {
  require_shape(X, W.cols(), X.cols(), "dense_forward input");
  if (bias) require_length(*bias, W.rows(), "dense_forward bias");
  const Eigen::Index out = W.rows(), in = W.cols(), n = X.cols();
  Z.resize(out, n);
  A.resize(out, n);

  if (exec == Exec::serial) {
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index i = 0; i < out; ++i) {
        double acc = bias ? (*bias)(i) : 0.0;
        for (Eigen::Index j = 0; j < in; ++j) acc += W(i, j) * X(j, k);
        Z(i, k) = acc;
        A(i, k) = activate(act, acc);
      }
    }
    return;
  }

  for_blocks(n, kColumnChunk, [&](Eigen::Index c0, Eigen::Index len) {
    auto z = Z.middleCols(c0, len);
    z.noalias() = W * X.middleCols(c0, len);
    if (bias) z.colwise() += *bias;
    apply_activation(act, z, A.middleCols(c0, len));
  });
}

void dense_backward(Exec exec, const Matrix& W, Activation act, const Batch& X, const Batch& Z,
                    const Batch& dA, Matrix& dW, Vector* db, Batch* dX) {
  const Eigen::Index out = W.rows(), in = W.cols(), n = X.cols();
  require_shape(X, in, n, "dense_backward input");
  require_shape(Z, out, n, "dense_backward pre-activation");
  require_shape(dA, out, n, "dense_backward output gradient");
  dW.resize(out, in);
  if (db) db->resize(out);
  if (dX) dX->resize(in, n);

  Batch dZ(out, n);
  if (exec == Exec::serial) {
    for (Eigen::Index k = 0; k < n; ++k)
      for (Eigen::Index i = 0; i < out; ++i) dZ(i, k) = dA(i, k) * activation_slope(act, Z(i, k));
    for (Eigen::Index i = 0; i < out; ++i) {
      for (Eigen::Index j = 0; j < in; ++j) {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) acc += dZ(i, k) * X(j, k);
        dW(i, j) = acc;
      }
      if (db) {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) acc += dZ(i, k);
        (*db)(i) = acc;
      }
    }
    if (dX) {
      for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index j = 0; j < in; ++j) {
          double acc = 0.0;
          for (Eigen::Index i = 0; i < out; ++i) acc += W(i, j) * dZ(i, k);
          (*dX)(j, k) = acc;
        }
    }
    return;
  }

  for_blocks(n, kColumnChunk, [&](Eigen::Index c0, Eigen::Index len) {
    dZ.middleCols(c0, len) = dA.middleCols(c0, len);
    scale_by_slope(act, Z.middleCols(c0, len), dZ.middleCols(c0, len));
  });
  for_blocks(out, kRowBlock, [&](Eigen::Index r0, Eigen::Index len) {
    dW.middleRows(r0, len).noalias() = dZ.middleRows(r0, len) * X.transpose();
    if (db) db->segment(r0, len) = dZ.middleRows(r0, len).rowwise().sum();
  });
  if (dX) {
    for_blocks(n, kColumnChunk, [&](Eigen::Index c0, Eigen::Index len) {
      dX->middleCols(c0, len).noalias() = W.transpose() * dZ.middleCols(c0, len);
    });
  }
}

void dense_input_grad(Exec exec, const Matrix& W, Activation act, const Batch& Z, const Batch& dA,
                      Batch& dX) {
  const Eigen::Index out = W.rows(), in = W.cols(), n = Z.cols();
  require_shape(Z, out, n, "dense_input_grad pre-activation");
  require_shape(dA, out, n, "dense_input_grad output gradient");
  dX.resize(in, n);
  if (exec == Exec::serial) {
    for (Eigen::Index k = 0; k < n; ++k)
      for (Eigen::Index j = 0; j < in; ++j) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < out; ++i) acc += W(i, j) * dA(i, k) * activation_slope(act, Z(i, k));
        dX(j, k) = acc;
      }
    return;
  }
  for_blocks(n, kColumnChunk, [&](Eigen::Index c0, Eigen::Index len) {
    Matrix dz = dA.middleCols(c0, len);
    scale_by_slope(act, Z.middleCols(c0, len), dz);
    dX.middleCols(c0, len).noalias() = W.transpose() * dz;
  });
}

void bilinear_contract(Exec exec, const Batch& psi, const Batch& zeta, Eigen::Index d, Batch& out) {
  const Eigen::Index m = psi.rows(), n = psi.cols();
  require_shape(zeta, m * d, n, "bilinear_contract zeta");
  out.resize(d, n);
  auto column = [&](Eigen::Index k) {
    for (Eigen::Index j = 0; j < d; ++j) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) acc += psi(i, k) * zeta(i * d + j, k);
      out(j, k) = acc;
    }
  };
  if (exec == Exec::serial) {
    for (Eigen::Index k = 0; k < n; ++k) column(k);
    return;
  }
  for_blocks(n, kColumnChunk, [&](Eigen::Index c0, Eigen::Index len) {
    for (Eigen::Index k = c0; k < c0 + len; ++k) {
      // Row-major m x d block of column k.
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> z(
          zeta.col(k).data(), m, d);
      out.col(k).noalias() = z.transpose() * psi.col(k);
    }
  });
}

void bilinear_backward(Exec exec, const Batch& psi, const Batch& zeta, const Batch& dout,
                       Batch& dpsi, Batch& dzeta) {
  const Eigen::Index m = psi.rows(), n = psi.cols(), d = dout.rows();
  require_shape(zeta, m * d, n, "bilinear_backward zeta");
  require_shape(dout, d, n, "bilinear_backward output gradient");
  dpsi.resize(m, n);
  dzeta.resize(m * d, n);
  auto column = [&](Eigen::Index k) {
    for (Eigen::Index i = 0; i < m; ++i) {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < d; ++j) {
        acc += zeta(i * d + j, k) * dout(j, k);
        dzeta(i * d + j, k) = psi(i, k) * dout(j, k);
      }
      dpsi(i, k) = acc;
    }
  };
  if (exec == Exec::serial) {
    for (Eigen::Index k = 0; k < n; ++k) column(k);
    return;
  }
  for_blocks(n, kColumnChunk, [&](Eigen::Index c0, Eigen::Index len) {
    for (Eigen::Index k = c0; k < c0 + len; ++k) column(k);
  });
}

void rff_features(Exec exec, const Matrix& omegas, const Batch& X, Batch& out) {
  const Eigen::Index features = omegas.rows(), n = X.cols();
  require_shape(X, omegas.cols(), n, "rff_features input");
  out.resize(2 * features, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(features));
  if (exec == Exec::serial) {
    for (Eigen::Index k = 0; k < n; ++k)
      for (Eigen::Index i = 0; i < features; ++i) {
        double proj = 0.0;
        for (Eigen::Index j = 0; j < omegas.cols(); ++j) proj += omegas(i, j) * X(j, k);
        out(i, k) = scale * std::cos(proj);
        out(features + i, k) = scale * std::sin(proj);
      }
    return;
  }
  for_blocks(n, kColumnChunk, [&](Eigen::Index c0, Eigen::Index len) {
    const Matrix proj = omegas * X.middleCols(c0, len);
    sin_columns(proj, out.block(0, c0, features, len), true);
    sin_columns(proj, out.block(features, c0, features, len), false);
    out.middleCols(c0, len) *= scale;
  });
}

void gaussian_gram(Exec exec, const Batch& P, const Batch& Q, Matrix& out) {
  if (P.rows() != Q.rows())
    throw DimensionError("gaussian_gram: point dimensions " + std::to_string(P.rows()) + " vs " +
                         std::to_string(Q.rows()));
  const Eigen::Index np = P.cols(), nq = Q.cols();
  out.resize(np, nq);
  if (exec == Exec::serial) {
    for (Eigen::Index i = 0; i < np; ++i)
      for (Eigen::Index j = 0; j < nq; ++j) out(i, j) = std::exp(-0.5 * (P.col(i) - Q.col(j)).squaredNorm());
    return;
  }
  for_blocks(nq, kColumnChunk, [&](Eigen::Index c0, Eigen::Index len) {
    for (Eigen::Index j = c0; j < c0 + len; ++j)
      for (Eigen::Index i = 0; i < np; ++i) out(i, j) = std::exp(-0.5 * (P.col(i) - Q.col(j)).squaredNorm());
  });
}

void quadratic_forms(Exec exec, const Matrix& M, const Batch& X, Vector& out) {
  require_shape(M, X.rows(), X.rows(), "quadratic_forms matrix");
  const Eigen::Index n = X.cols(), d = X.rows();
  out.resize(n);
  if (exec == Exec::serial) {
    for (Eigen::Index k = 0; k < n; ++k) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) acc += X(i, k) * M(i, j) * X(j, k);
      out(k) = acc;
    }
    return;
  }
  for_blocks(n, kColumnChunk, [&](Eigen::Index c0, Eigen::Index len) {
    const Matrix MX = M * X.middleCols(c0, len);
    out.segment(c0, len) = (X.middleCols(c0, len).array() * MX.array()).colwise().sum().transpose();
  });
}

}  // namespace diffsr::kernels
