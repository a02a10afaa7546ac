#include "diffsr/numerics/mlp.hpp"

#include <cmath>
#include <string>

namespace diffsr {

std::vector<ParamView> MlpGrad::views() {
  std::vector<ParamView> out;
  for (std::size_t l = 0; l < weight.size(); ++l) {
    out.push_back({"layer" + std::to_string(l) + ".weight", as_span(weight[l])});
    if (bias[l].size() > 0) out.push_back({"layer" + std::to_string(l) + ".bias", as_span(bias[l])});
  }
  return out;
}

MlpGrad& MlpGrad::operator+=(const MlpGrad& other) {
  if (other.weight.size() != weight.size()) throw DimensionError("MlpGrad +=: layer count mismatch");
  for (std::size_t l = 0; l < weight.size(); ++l) {
    require_same_shape(weight[l], other.weight[l], "MlpGrad += weight");
    weight[l] += other.weight[l];
    if (bias[l].size() > 0) bias[l] += other.bias[l];
  }
  return *this;
}

MlpGrad& MlpGrad::operator*=(double s) {
  for (auto& w : weight) w *= s;
  for (auto& b : bias) b *= s;
  return *this;
}

void MlpGrad::set_zero() {
  for (auto& w : weight) w.setZero();
  for (auto& b : bias) b.setZero();
}

Mlp::Mlp(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ContractError("Mlp: at least one layer required");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    if (layer.has_bias()) require_length(layer.bias, layer.out_dim(), "Mlp bias");
    if (l > 0 && layers_[l - 1].out_dim() != layer.in_dim())
      throw DimensionError("Mlp: layer " + std::to_string(l - 1) + " emits " +
                           std::to_string(layers_[l - 1].out_dim()) + " but layer " + std::to_string(l) +
                           " expects " + std::to_string(layer.in_dim()));
    if (!layer.weight.allFinite() || !layer.bias.allFinite())
      throw PoisonError("Mlp: non-finite parameter in layer " + std::to_string(l));
  }
}

Mlp Mlp::create(Eigen::Index input_dim, std::span<const LayerSpec> specs, Rng& rng) {
  std::vector<Layer> layers;
  Eigen::Index in = input_dim;
  for (const LayerSpec& spec : specs) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    Layer layer;
    layer.weight = rng.uniform_matrix(spec.out, in, -bound, bound);
    if (spec.bias) layer.bias = rng.uniform_matrix(spec.out, 1, -bound, bound).col(0);
    layer.activation = spec.activation;
    layers.push_back(std::move(layer));
    in = spec.out;
  }
  return Mlp(std::move(layers));
}

Mlp Mlp::create(Eigen::Index input_dim, std::span<const Eigen::Index> hidden_widths,
                Eigen::Index output_dim, Activation hidden, Rng& rng) {
  std::vector<LayerSpec> specs;
  for (Eigen::Index w : hidden_widths) specs.push_back({w, hidden, true});
  specs.push_back({output_dim, Activation::identity, true});
  return create(input_dim, specs, rng);
}

Eigen::Index Mlp::input_dim() const { return layers_.empty() ? 0 : layers_.front().in_dim(); }
Eigen::Index Mlp::output_dim() const { return layers_.empty() ? 0 : layers_.back().out_dim(); }

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const Layer& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

std::vector<ParamView> Mlp::parameters() {
  std::vector<ParamView> out;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    out.push_back({"layer" + std::to_string(l) + ".weight", as_span(layers_[l].weight)});
    if (layers_[l].has_bias()) out.push_back({"layer" + std::to_string(l) + ".bias", as_span(layers_[l].bias)});
  }
  return out;
}

MlpGrad Mlp::zero_grad() const {
  MlpGrad g;
  for (const Layer& l : layers_) {
    g.weight.push_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
    g.bias.push_back(Vector::Zero(l.bias.size()));
  }
  return g;
}

MlpTape Mlp::forward(const Batch& input, Exec exec) const {
  if (input.rows() != input_dim())
    throw DimensionError("Mlp::forward: input has " + std::to_string(input.rows()) + " rows, net expects " +
                         std::to_string(input_dim()));
  MlpTape tape;
  tape.owner = this;
  tape.inputs.reserve(layers_.size());
  tape.pre.reserve(layers_.size());
  Batch current = input;
  for (const Layer& layer : layers_) {
    Batch z, a;
    kernels::dense_forward(exec, layer.weight, layer.has_bias() ? &layer.bias : nullptr, layer.activation,
                           current, z, a);
    tape.inputs.push_back(std::move(current));
    tape.pre.push_back(std::move(z));
    current = std::move(a);
  }
  tape.output = std::move(current);
  return tape;
}

Batch Mlp::evaluate(const Batch& input, Exec exec) const { return forward(input, exec).output; }

void Mlp::check_tape(const MlpTape& tape) const {
  if (tape.owner != this || tape.pre.size() != layers_.size())
    throw ContractError("Mlp::backward: tape was not produced by this network");
  for (std::size_t l = 0; l < layers_.size(); ++l)
    if (tape.pre[l].rows() != layers_[l].out_dim() || tape.inputs[l].rows() != layers_[l].in_dim())
      throw ContractError("Mlp::backward: stale tape (layer " + std::to_string(l) + " shape changed)");
}

MlpGrad Mlp::backward(const MlpTape& tape, const Batch& output_grad, Batch* input_grad, Exec exec) const {
  check_tape(tape);
  require_shape(output_grad, output_dim(), tape.batch_size(), "Mlp::backward output gradient");
  MlpGrad grad;
  grad.weight.resize(layers_.size());
  grad.bias.resize(layers_.size());
  Batch upstream = output_grad;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const Layer& layer = layers_[k];
    Batch dx;
    const bool need_dx = k > 0 || input_grad != nullptr;
    kernels::dense_backward(exec, layer.weight, layer.activation, tape.inputs[k], tape.pre[k], upstream,
                            grad.weight[k], layer.has_bias() ? &grad.bias[k] : nullptr,
                            need_dx ? &dx : nullptr);
    upstream = std::move(dx);
  }
  if (input_grad) *input_grad = std::move(upstream);
  return grad;
}

Batch Mlp::input_gradient(const MlpTape& tape, const Batch& output_grad, Exec exec) const {
  check_tape(tape);
  require_shape(output_grad, output_dim(), tape.batch_size(), "Mlp::input_gradient output gradient");
  Batch upstream = output_grad;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const Layer& layer = layers_[k];
    Batch dx;
    kernels::dense_input_grad(exec, layer.weight, layer.activation, tape.pre[k], upstream, dx);
    upstream = std::move(dx);
  }
  return upstream;
}

std::pair<Vector, MlpTape> mlp_forward(const Mlp& net, const Vector& input) {
  MlpTape tape = net.forward(input, Exec::serial);
  Vector out = tape.output.col(0);
  return {std::move(out), std::move(tape)};
}

std::pair<MlpGrad, Vector> mlp_backward(const Mlp& net, const MlpTape& tape, const Vector& output_grad) {
  Batch dx;
  MlpGrad g = net.backward(tape, output_grad, &dx, Exec::serial);
  return {std::move(g), dx.col(0)};
}

void blend_into(Mlp& target, const Mlp& online, double tau) {
  if (target.depth() != online.depth()) throw DimensionError("blend_into: depth mismatch");
  for (std::size_t l = 0; l < target.depth(); ++l) {
    Layer& t = target.layers()[l];
    const Layer& o = online.layers()[l];
    require_same_shape(t.weight, o.weight, "blend_into weight");
    require_same_shape(t.bias, o.bias, "blend_into bias");
    t.weight = (1.0 - tau) * t.weight + tau * o.weight;
    t.bias = (1.0 - tau) * t.bias + tau * o.bias;
  }
}

}  // namespace diffsr
