#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tla {

/// Thrown when an operation's preconditions are violated (shape mismatches,
/// non-finite inputs, missing forward pass, ...).
class ContractError : public std::runtime_error {
 public:
  explicit ContractError(const std::string& what) : std::runtime_error(what) {}
};

inline void check(bool cond, const std::string& msg) {
  if (!cond) throw ContractError(msg);
}

/// Dense n-dimensional array of doubles with an optional gradient slot of the
/// same length. All network parameters and activations are Tensors.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty when absent

  Tensor() = default;
  Tensor(std::vector<std::size_t> s, std::vector<double> d)
      : shape(std::move(s)), data(std::move(d)) {
    check(numel_of(shape) == data.size(), "Tensor: shape does not match data length");
  }

  static std::size_t numel_of(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
  }

  static Tensor zeros(std::vector<std::size_t> shape) {
    std::size_t n = numel_of(shape);
    return Tensor(std::move(shape), std::vector<double>(n, 0.0));
  }

  static Tensor full(std::vector<std::size_t> shape, double value) {
    std::size_t n = numel_of(shape);
    return Tensor(std::move(shape), std::vector<double>(n, value));
  }

  std::size_t numel() const { return data.size(); }

  /// Row/column accessors for the 2-d case (row-major layout).
  std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }

  double& at(std::size_t r, std::size_t c) { return data[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols() + c]; }

  void alloc_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
  }
  void zero_grad() { grad.assign(grad.size(), 0.0); }
  bool has_grad() const { return grad.size() == data.size() && !data.empty(); }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

}  // namespace tla
