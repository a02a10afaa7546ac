#include "diffsr/diffusion/head.hpp"

#include <cmath>

namespace diffsr::diffusion {

ReprHead::ReprHead(Mlp net) : net_(std::move(net)) {
  const auto& layers = net_.layers();
  if (layers.size() != 2 || layers[0].has_bias() || layers[1].has_bias() ||
      layers[0].activation != Activation::sin || layers[1].activation != Activation::elu)
    throw ContractError("ReprHead: expected bias-free sin layer followed by bias-free elu layer");
}

ReprHead ReprHead::create(Eigen::Index feature_dim, Eigen::Index fourier_dim, Eigen::Index repr_dim, Rng& rng) {
  std::vector<Layer> layers(2);
  layers[0].weight = rng.normal_matrix(fourier_dim, feature_dim);
  layers[0].activation = Activation::sin;
  const double bound = 1.0 / std::sqrt(static_cast<double>(fourier_dim));
  layers[1].weight = rng.uniform_matrix(repr_dim, fourier_dim, -bound, bound);
  layers[1].activation = Activation::elu;
  return ReprHead(Mlp(std::move(layers)));
}

Vector phi(const ReprHead& head, const ScorePair& sp, const Vector& s, const Vector& a) {
  const Batch psi = sp.psi_features(s, a, Exec::serial);
  if (psi.rows() != head.input_dim())
    throw DimensionError("phi: head expects " + std::to_string(head.input_dim()) + " psi features, got " +
                         std::to_string(psi.rows()));
  return head.apply(psi, Exec::serial).col(0);
}

}  // namespace diffsr::diffusion
