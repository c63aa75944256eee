#pragma once

#include <iosfwd>
#include <string>

#include "tla/adam.hpp"
#include "tla/mlp.hpp"

namespace tla {

/// Self-describing binary container for networks and optimizer state.
/// Layout (little-endian):
///   "TLANET01" | u32 n_layers | per layer: u32 out, u32 in
///   u32 out_dim | per output dim: u8 activation tag, f64 scale
///   per layer: f64 weight[out*in], f64 bias[out]
/// Doubles are stored as raw IEEE-754 bits, so save/load round-trips are
/// bit-exact.
void save_mlp(std::ostream& out, const Mlp& net);
Mlp load_mlp(std::istream& in);

/// "TLAOPT01" | f64 lr, beta1, beta2, eps | u64 step_count |
/// u64 n | f64 first_moment[n] | f64 second_moment[n]
void save_adam(std::ostream& out, const AdamState& state);
AdamState load_adam(std::istream& in);

void save_mlp_file(const std::string& path, const Mlp& net);
Mlp load_mlp_file(const std::string& path);

}  // namespace tla
