#include "tla/adam.hpp"

#include <cmath>
#include <string>

namespace tla {

void adam_step(Mlp& net, AdamState& state) {
  check(state.first_moment.size() == net.num_params() &&
            state.second_moment.size() == net.num_params(),
        "adam_step: moment arrays not congruent with parameters");
  state.step_count += 1;
  const double b1 = state.beta1, b2 = state.beta2;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.step_count));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.step_count));
  const double lr = state.learning_rate;
  const double eps = state.epsilon;

  std::size_t offset = 0;
  net.visit_params([&](const std::string& name, Tensor& p) {
    check(p.has_grad(), "adam_step: missing gradient for " + name);
    for (std::size_t k = 0; k < p.numel(); ++k) {
      const double g = p.grad[k];
      if (!std::isfinite(g))
        throw ContractError("adam_step: non-finite gradient in " + name + "[" +
                            std::to_string(k) + "]");
      double& m = state.first_moment[offset + k];
      double& v = state.second_moment[offset + k];
      m = b1 * m + (1.0 - b1) * g;
      v = b2 * v + (1.0 - b2) * g * g;
      const double m_hat = m / corr1;
      const double v_hat = v / corr2;
      p.data[k] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
    offset += p.numel();
  });
}

}  // namespace tla
