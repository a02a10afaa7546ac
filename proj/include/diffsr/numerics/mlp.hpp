#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "diffsr/kernels/kernels.hpp"
#include "diffsr/numerics/linalg.hpp"
#include "diffsr/numerics/rng.hpp"

namespace diffsr {

using kernels::Activation;
using kernels::Exec;

struct Layer {
  Matrix weight;  // out x in
  Vector bias;    // empty when the layer has no bias
  Activation activation = Activation::identity;

  bool has_bias() const { return bias.size() > 0; }
  Eigen::Index in_dim() const { return weight.cols(); }
  Eigen::Index out_dim() const { return weight.rows(); }
};

struct LayerSpec {
  Eigen::Index out = 0;
  Activation activation = Activation::identity;
  bool bias = true;
};

/// Gradient buffers with the same layout as an Mlp's parameters.
struct MlpGrad {
  std::vector<Matrix> weight;
  std::vector<Vector> bias;

  std::vector<ParamView> views();
  MlpGrad& operator+=(const MlpGrad& other);
  MlpGrad& operator*=(double s);
  void set_zero();
};

/// Cached activations of one forward call. Immutable once returned.
struct MlpTape {
  const void* owner = nullptr;
  std::vector<Batch> inputs;  // input to each layer
  std::vector<Batch> pre;     // pre-activation of each layer
  Batch output;

  Eigen::Index batch_size() const { return output.cols(); }
};

/// Feedforward stack of affine layers with elementwise activations.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<Layer> layers);

  /// Layers chained from `input_dim`; weights and biases uniform in ±1/sqrt(fan_in).
  static Mlp create(Eigen::Index input_dim, std::span<const LayerSpec> specs, Rng& rng);

  /// Hidden layers of `width` with `hidden` activation followed by a linear output layer.
  static Mlp create(Eigen::Index input_dim, std::span<const Eigen::Index> hidden_widths,
                    Eigen::Index output_dim, Activation hidden, Rng& rng);

  Eigen::Index input_dim() const;
  Eigen::Index output_dim() const;
  std::size_t depth() const { return layers_.size(); }
  std::size_t parameter_count() const;

  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }

  /// Views in a fixed order: layer0.weight, layer0.bias, layer1.weight, ...
  std::vector<ParamView> parameters();
  MlpGrad zero_grad() const;

  MlpTape forward(const Batch& input, Exec exec = Exec::parallel) const;
  Batch evaluate(const Batch& input, Exec exec = Exec::parallel) const;

  /// Exact gradients of <output_grad, output> with respect to parameters, plus
  /// the input gradient when `input_grad` is non-null.
  MlpGrad backward(const MlpTape& tape, const Batch& output_grad, Batch* input_grad,
                   Exec exec = Exec::parallel) const;

  /// Same, discarding parameter gradients.
  Batch input_gradient(const MlpTape& tape, const Batch& output_grad,
                       Exec exec = Exec::parallel) const;

 private:
  void check_tape(const MlpTape& tape) const;

  std::vector<Layer> layers_;
};

/// Single-sample convenience wrappers.
std::pair<Vector, MlpTape> mlp_forward(const Mlp& net, const Vector& input);
std::pair<MlpGrad, Vector> mlp_backward(const Mlp& net, const MlpTape& tape, const Vector& output_grad);

/// target <- (1 - tau) target + tau online, over identically shaped nets.
void blend_into(Mlp& target, const Mlp& online, double tau);

}  // namespace diffsr
