#pragma once

#include <cmath>
#include <optional>
#include <string_view>

namespace diffsr::kernels {

enum class Activation { identity, relu, tanh, elu, sin };

std::string_view to_string(Activation act);
std::optional<Activation> parse_activation(std::string_view name);

inline double activate(Activation act, double z) {
  switch (act) {
    case Activation::identity: return z;
    case Activation::relu: return z > 0.0 ? z : 0.0;
    case Activation::tanh: return std::tanh(z);
    case Activation::elu: return z > 0.0 ? z : std::expm1(z);
    case Activation::sin: return std::sin(z);
  }
  return z;
}

/// Derivative expressed through the pre-activation z.
inline double activation_slope(Activation act, double z) {
  switch (act) {
    case Activation::identity: return 1.0;
    case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::elu: return z > 0.0 ? 1.0 : std::exp(z);
    case Activation::sin: return std::cos(z);
  }
  return 1.0;
}

}  // namespace diffsr::kernels
