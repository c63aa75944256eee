#include "tla/mlp.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>

namespace tla {

namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<EMat>;
using CMapMat = Eigen::Map<const EMat>;

CMapMat as_mat(const Tensor& t, std::size_t rows, std::size_t cols) {
  return CMapMat(t.data.data(), static_cast<Eigen::Index>(rows),
                 static_cast<Eigen::Index>(cols));
}

MapMat as_mat(Tensor& t, std::size_t rows, std::size_t cols) {
  return MapMat(t.data.data(), static_cast<Eigen::Index>(rows),
                static_cast<Eigen::Index>(cols));
}

MapMat grad_mat(Tensor& t, std::size_t rows, std::size_t cols) {
  return MapMat(t.grad.data(), static_cast<Eigen::Index>(rows),
                static_cast<Eigen::Index>(cols));
}

}  // namespace

Mlp::Mlp(const std::vector<std::size_t>& dims, Activation output_activation,
         std::vector<double> output_scale)
    : Mlp(dims, std::vector<Activation>(dims.back(), output_activation),
          std::move(output_scale)) {}

Mlp::Mlp(const std::vector<std::size_t>& dims, std::vector<Activation> output_activations,
         std::vector<double> output_scale) {
  check(dims.size() >= 2, "Mlp: need at least input and output dims");
  for (std::size_t d : dims) check(d > 0, "Mlp: zero-sized layer");
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    Layer l;
    l.weight = Tensor::zeros({dims[i + 1], dims[i]});
    l.bias = Tensor::zeros({dims[i + 1]});
    l.weight.alloc_grad();
    l.bias.alloc_grad();
    layers_.push_back(std::move(l));
  }
  check(output_activations.size() == dims.back(),
        "Mlp: one output activation per output dimension required");
  out_act_ = std::move(output_activations);
  if (output_scale.empty()) output_scale.assign(dims.back(), 1.0);
  check(output_scale.size() == dims.back(), "Mlp: output_scale width mismatch");
  out_scale_ = std::move(output_scale);
}

void Mlp::init(Rng& rng) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Rng layer_rng = rng.stream("init_layer", i);
    const double bound = 1.0 / std::sqrt(static_cast<double>(layers_[i].weight.shape[1]));
    for (double& w : layers_[i].weight.data) w = layer_rng.uniform(-bound, bound);
    for (double& b : layers_[i].bias.data) b = layer_rng.uniform(-bound, bound);
  }
}

std::size_t Mlp::num_params() const {
  std::size_t n = 0;
  for (const Layer& l : layers_) n += l.weight.numel() + l.bias.numel();
  return n;
}

bool Mlp::congruent_with(const Mlp& other) const {
  if (layers_.size() != other.layers_.size()) return false;
  for (std::size_t i = 0; i < layers_.size(); ++i)
    if (layers_[i].weight.shape != other.layers_[i].weight.shape) return false;
  return out_act_ == other.out_act_ && out_scale_ == other.out_scale_;
}

namespace {

// Assignment into a reused buffer keeps its heap allocation.
void assign_shape(Tensor& t, std::size_t rows, std::size_t cols) {
  t.shape = {rows, cols};
  t.data.resize(rows * cols);
}

}  // namespace

Tensor Mlp::forward(const Tensor& input) {
  check(input.shape.size() == 2, "Mlp::forward: input must be [batch x in]");
  const std::size_t batch = input.shape[0];
  check(input.shape[1] == input_dim(),
        "Mlp::forward: input width " + std::to_string(input.shape[1]) +
            " does not match first layer input " + std::to_string(input_dim()));

  cached_inputs_.resize(layers_.size());
  cached_inputs_[0].shape = input.shape;
  cached_inputs_[0].data.assign(input.data.begin(), input.data.end());

  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& l = layers_[i];
    const std::size_t out = l.weight.shape[0];
    const std::size_t in = l.weight.shape[1];
    const bool last = i + 1 == layers_.size();
    Tensor& next = last ? cached_raw_out_ : cached_inputs_[i + 1];
    assign_shape(next, batch, out);
    // z = x * W^T + b
    as_mat(next, batch, out).noalias() =
        as_mat(cached_inputs_[i], batch, in) * as_mat(l.weight, out, in).transpose();
    for (std::size_t r = 0; r < batch; ++r)
      for (std::size_t c = 0; c < out; ++c) next.data[r * out + c] += l.bias.data[c];

    if (!last) {
      for (double& v : next.data) v = v > 0.0 ? v : 0.0;  // rectifier
    } else {
      // Raw output activations are what backward needs; the returned tensor
      // carries the per-dimension scale on top.
      for (std::size_t r = 0; r < batch; ++r) {
        for (std::size_t c = 0; c < out; ++c) {
          double& v = next.data[r * out + c];
          switch (out_act_[c]) {
            case Activation::kIdentity: break;
            case Activation::kTanh: v = std::tanh(v); break;
            case Activation::kLogistic: v = 1.0 / (1.0 + std::exp(-v)); break;
          }
        }
      }
    }
  }
  has_forward_ = true;
  Tensor result = cached_raw_out_;
  const std::size_t out = output_dim();
  for (std::size_t r = 0; r < batch; ++r)
    for (std::size_t c = 0; c < out; ++c) result.data[r * out + c] *= out_scale_[c];
  return result;
}

Tensor Mlp::backward(const Tensor& upstream, bool input_grad_only) {
  check(has_forward_, "Mlp::backward: no forward pass cached");
  const std::size_t batch = cached_inputs_[0].shape[0];
  check(upstream.shape.size() == 2 && upstream.shape[0] == batch &&
            upstream.shape[1] == output_dim(),
        "Mlp::backward: upstream gradient shape mismatch");
  has_forward_ = false;

  // Through output scale and activation.
  const std::size_t out = output_dim();
  Tensor* delta = &delta_scratch_[0];
  delta->shape = upstream.shape;
  delta->data.assign(upstream.data.begin(), upstream.data.end());
  for (std::size_t r = 0; r < batch; ++r) {
    for (std::size_t c = 0; c < out; ++c) {
      double& d = delta->data[r * out + c];
      const double a = cached_raw_out_.data[r * out + c];
      d *= out_scale_[c];
      switch (out_act_[c]) {
        case Activation::kIdentity: break;
        case Activation::kTanh: d *= 1.0 - a * a; break;
        case Activation::kLogistic: d *= a * (1.0 - a); break;
      }
    }
  }

  Tensor* prev = &delta_scratch_[1];
  for (std::size_t i = layers_.size(); i-- > 0;) {
    Layer& l = layers_[i];
    const std::size_t lo = l.weight.shape[0];
    const std::size_t li = l.weight.shape[1];
    const Tensor& x = cached_inputs_[i];

    if (!input_grad_only) {
      // dW = delta^T * x, db = column sums of delta
      grad_mat(l.weight, lo, li).noalias() =
          as_mat(*delta, batch, lo).transpose() * as_mat(x, batch, li);
      for (std::size_t c = 0; c < lo; ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < batch; ++r) s += delta->data[r * lo + c];
        l.bias.grad[c] = s;
      }
    }

    assign_shape(*prev, batch, li);
    as_mat(*prev, batch, li).noalias() =
        as_mat(*delta, batch, lo) * as_mat(l.weight, lo, li);
    if (i > 0) {
      // Gate by the rectifier: cached post-activation is zero exactly where
      // the unit was inactive.
      for (std::size_t k = 0; k < prev->data.size(); ++k)
        if (x.data[k] <= 0.0) prev->data[k] = 0.0;
    }
    std::swap(delta, prev);
  }
  return *delta;
}

void soft_update(Mlp& target, const Mlp& source, double tau) {
  check(tau > 0.0 && tau <= 1.0, "soft_update: tau must be in (0, 1]");
  check(target.congruent_with(source), "soft_update: architecture mismatch");
  for (std::size_t i = 0; i < target.num_layers(); ++i) {
    auto blend = [tau](Tensor& t, const Tensor& s) {
      for (std::size_t k = 0; k < t.data.size(); ++k)
        t.data[k] = tau * s.data[k] + (1.0 - tau) * t.data[k];
    };
    blend(target.layer(i).weight, source.layer(i).weight);
    blend(target.layer(i).bias, source.layer(i).bias);
  }
}

double max_param_distance(const Mlp& a, const Mlp& b) {
  check(a.congruent_with(b), "max_param_distance: architecture mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.num_layers(); ++i) {
    for (std::size_t k = 0; k < a.layer(i).weight.numel(); ++k)
      m = std::max(m, std::abs(a.layer(i).weight.data[k] - b.layer(i).weight.data[k]));
    for (std::size_t k = 0; k < a.layer(i).bias.numel(); ++k)
      m = std::max(m, std::abs(a.layer(i).bias.data[k] - b.layer(i).bias.data[k]));
  }
  return m;
}

}  // namespace tla
