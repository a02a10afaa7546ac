#pragma once

// Batched numeric kernels. Every kernel has two implementations:
//
//   Exec::serial    plain loops, one sample at a time. Kept as the reference
//                   the tests compare against.
//   Exec::parallel  OpenMP over fixed-size column chunks or row blocks, with
//                   Eigen products inside each block.
//
// Block boundaries never depend on the thread count and no kernel reduces
// across threads, so parallel results are bitwise independent of
// OMP_NUM_THREADS.

#include <Eigen/Dense>

#include "diffsr/kernels/activation.hpp"
#include "diffsr/numerics/linalg.hpp"

namespace diffsr::kernels {

enum class Exec { serial, parallel };

inline constexpr Eigen::Index kColumnChunk = 64;
inline constexpr Eigen::Index kRowBlock = 32;

int max_threads();

/// Z = W X (+ b), A = act(Z). X is in x B; Z and A are resized to out x B.
void dense_forward(Exec exec, const Matrix& W, const Vector* bias, Activation act, const Batch& X,
                   Batch& Z, Batch& A);

/// Backward of dense_forward given dL/dA. Writes dW (and db when non-null)
/// and, when dX is non-null, dL/dX.
void dense_backward(Exec exec, const Matrix& W, Activation act, const Batch& X, const Batch& Z,
                    const Batch& dA, Matrix& dW, Vector* db, Batch* dX);

/// dL/dX only, skipping the parameter gradients.
void dense_input_grad(Exec exec, const Matrix& W, Activation act, const Batch& Z, const Batch& dA,
                      Batch& dX);

/// out(:,k) = Zeta_kᵀ psi_k, where column k of Zeta holds an m x d matrix
/// laid out row-major (entry (i, j) at i*d + j).
void bilinear_contract(Exec exec, const Batch& psi, const Batch& zeta, Eigen::Index d, Batch& out);

/// Gradients of the contraction given dL/dout.
void bilinear_backward(Exec exec, const Batch& psi, const Batch& zeta, const Batch& dout,
                       Batch& dpsi, Batch& dzeta);

/// Random Fourier features, (1/sqrt N) [cos(Ωx); sin(Ωx)], out is 2N x B.
void rff_features(Exec exec, const Matrix& omegas, const Batch& X, Batch& out);

/// out(i, j) = exp(-|p_i - q_j|² / 2) for columns p_i of P and q_j of Q.
void gaussian_gram(Exec exec, const Batch& P, const Batch& Q, Matrix& out);

/// out(k) = x_kᵀ M x_k for columns x_k of X.
void quadratic_forms(Exec exec, const Matrix& M, const Batch& X, Vector& out);

}  // namespace diffsr::kernels
