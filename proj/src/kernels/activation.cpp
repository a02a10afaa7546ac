#include "diffsr/kernels/activation.hpp"

namespace diffsr::kernels {

std::string_view to_string(Activation act) {
  switch (act) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::elu: return "elu";
    case Activation::sin: return "sin";
  }
  return "identity";
}

std::optional<Activation> parse_activation(std::string_view name) {
  if (name == "identity") return Activation::identity;
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  if (name == "elu") return Activation::elu;
  if (name == "sin") return Activation::sin;
  return std::nullopt;
}

}  // namespace diffsr::kernels
