#include "diffsr/kernels/vmath.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

namespace diffsr::kernels {
namespace {

constexpr double kTwoOverPi = 0.63661977236758134308;
constexpr double kPio2a = 1.57079632673412561417;
constexpr double kPio2b = 6.07710050630396597660e-11;
constexpr double kPio2c = 2.02226624879595063154e-21;
constexpr double kRoundMagic = 6755399441055744.0;

bool in_range(const double* x, Eigen::Index n) {
  double worst = 0.0;
#pragma omp simd reduction(max : worst)
  for (Eigen::Index i = 0; i < n; ++i) worst = std::max(worst, std::abs(x[i]));
  return worst <= kVmathRange;
}

// shift 0 gives sin, shift 1 gives cos.
void sincos_kernel(const double* __restrict x, double* __restrict out, Eigen::Index n, int shift) {
#pragma omp simd
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = x[i];
    const double t = v * kTwoOverPi + kRoundMagic;
    const double k = t - kRoundMagic;
    const double r = ((v - k * kPio2a) - k * kPio2b) - k * kPio2c;
    const double z = r * r;
    const double s =
        r + r * z *
                (-1.66666666666666307295e-1 +
                 z * (8.33333333332211858878e-3 +
                      z * (-1.98412698295895385996e-4 +
                           z * (2.75573136213857245213e-6 +
                                z * (-2.50507477628578072866e-8 + z * 1.58962301576546568060e-10)))));
    const double c =
        1.0 - 0.5 * z +
        z * z *
            (4.16666666666665929218e-2 +
             z * (-1.38888888888730564116e-3 +
                  z * (2.48015872888517045348e-5 +
                       z * (-2.75573141792967388112e-7 +
                            z * (2.08757008419747316778e-9 + z * -1.13585365213876817300e-11)))));
    const std::int64_t q = std::bit_cast<std::int64_t>(t) + shift;
    const double odd = static_cast<double>(q & 1);
    const double sign = 1.0 - 2.0 * static_cast<double>((q >> 1) & 1);
    out[i] = sign * ((1.0 - odd) * s + odd * c);
  }
}

}  // namespace

void vsin(const double* x, double* out, Eigen::Index n) {
  if (in_range(x, n)) return sincos_kernel(x, out, n, 0);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = std::sin(x[i]);
}

void vcos(const double* x, double* out, Eigen::Index n) {
  if (in_range(x, n)) return sincos_kernel(x, out, n, 1);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = std::cos(x[i]);
}

}  // namespace diffsr::kernels
