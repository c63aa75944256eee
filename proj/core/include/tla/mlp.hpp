#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tla/rng.hpp"
#include "tla/tensor.hpp"

namespace tla {

/// Output-unit nonlinearity. Hidden layers are always rectifiers.
enum class Activation : std::uint8_t {
  kIdentity = 0,   // critics
  kTanh = 1,       // bounded-saturating action heads, scaled per dimension
  kLogistic = 2,   // gate probability head
};

/// Two-hidden-layer perceptron (any depth is supported, two is what the
/// agents use) with per-output-dimension activation and scale. Forward
/// caches the activations required by backward; the cache belongs to the
/// last forward call.
class Mlp {
 public:
  struct Layer {
    Tensor weight;  // [out x in], row-major
    Tensor bias;    // [out]
  };

  Mlp() = default;

  /// dims = {in, hidden..., out}; one activation for every output dimension.
  Mlp(const std::vector<std::size_t>& dims, Activation output_activation,
      std::vector<double> output_scale = {});

  /// dims as above with per-dimension output activations, e.g. a bounded
  /// action head plus a logistic gate head.
  Mlp(const std::vector<std::size_t>& dims, std::vector<Activation> output_activations,
      std::vector<double> output_scale);

  /// Uniform +-1/sqrt(fan_in) init for weights and biases, layer by layer.
  void init(Rng& rng);

  /// input [batch x in] -> output [batch x out]. Retains what backward needs.
  Tensor forward(const Tensor& input);

  /// Backpropagates upstream [batch x out] through the cached forward pass,
  /// filling every parameter's grad slot and returning the input gradient
  /// [batch x in]. With input_grad_only, parameter grads are left untouched.
  Tensor backward(const Tensor& upstream, bool input_grad_only = false);

  std::size_t input_dim() const { return layers_.front().weight.shape[1]; }
  std::size_t output_dim() const { return layers_.back().weight.shape[0]; }
  std::size_t num_layers() const { return layers_.size(); }
  std::size_t num_params() const;

  Layer& layer(std::size_t i) { return layers_[i]; }
  const Layer& layer(std::size_t i) const { return layers_[i]; }

  const std::vector<Activation>& output_activations() const { return out_act_; }
  const std::vector<double>& output_scale() const { return out_scale_; }

  /// True when dims, activations and scales all agree.
  bool congruent_with(const Mlp& other) const;

  /// Visits every parameter tensor in layer order: weight0, bias0, weight1, ...
  template <typename Fn>
  void visit_params(Fn&& fn) {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      fn("layers[" + std::to_string(i) + "].weight", layers_[i].weight);
      fn("layers[" + std::to_string(i) + "].bias", layers_[i].bias);
    }
  }
  template <typename Fn>
  void visit_params(Fn&& fn) const {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      fn("layers[" + std::to_string(i) + "].weight", layers_[i].weight);
      fn("layers[" + std::to_string(i) + "].bias", layers_[i].bias);
    }
  }

 private:
  std::vector<Layer> layers_;
  std::vector<Activation> out_act_;
  std::vector<double> out_scale_;

  // Forward cache: layer inputs (x0 = net input, then post-relu activations)
  // plus the raw output activations before scaling. Buffers persist across
  // calls so the training loop does not reallocate them every step.
  std::vector<Tensor> cached_inputs_;
  Tensor cached_raw_out_;  // activation values before scale (tanh/logistic/z)
  Tensor delta_scratch_[2];
  bool has_forward_ = false;
};

/// target <- tau * source + (1 - tau) * target, elementwise over all params.
void soft_update(Mlp& target, const Mlp& source, double tau);

/// Max absolute parameter difference, used by the soft-update geometry tests.
double max_param_distance(const Mlp& a, const Mlp& b);

}  // namespace tla
