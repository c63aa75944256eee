#include "tla/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

namespace tla {

namespace {

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  check(static_cast<bool>(in), "checkpoint: truncated stream");
  return v;
}

void write_doubles(std::ostream& out, const std::vector<double>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_doubles(std::istream& in, std::vector<double>& v) {
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(double)));
  check(static_cast<bool>(in), "checkpoint: truncated stream");
}

void expect_magic(std::istream& in, const char* magic) {
  char buf[8];
  in.read(buf, 8);
  check(static_cast<bool>(in) && std::memcmp(buf, magic, 8) == 0,
        std::string("checkpoint: bad magic, expected ") + magic);
}

}  // namespace

void save_mlp(std::ostream& out, const Mlp& net) {
  out.write("TLANET01", 8);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(net.num_layers()));
  for (std::size_t i = 0; i < net.num_layers(); ++i) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(net.layer(i).weight.shape[0]));
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(net.layer(i).weight.shape[1]));
  }
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(net.output_dim()));
  for (std::size_t c = 0; c < net.output_dim(); ++c) {
    write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(net.output_activations()[c]));
    write_pod<double>(out, net.output_scale()[c]);
  }
  for (std::size_t i = 0; i < net.num_layers(); ++i) {
    write_doubles(out, net.layer(i).weight.data);
    write_doubles(out, net.layer(i).bias.data);
  }
}

Mlp load_mlp(std::istream& in) {
  expect_magic(in, "TLANET01");
  const auto n_layers = read_pod<std::uint32_t>(in);
  check(n_layers >= 1, "checkpoint: empty network");
  std::vector<std::size_t> dims;
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    const auto out = read_pod<std::uint32_t>(in);
    const auto inw = read_pod<std::uint32_t>(in);
    if (i == 0) dims.push_back(inw);
    check(dims.back() == inw, "checkpoint: layer dims do not chain");
    dims.push_back(out);
  }
  const auto out_dim = read_pod<std::uint32_t>(in);
  check(out_dim == dims.back(), "checkpoint: output dim mismatch");
  std::vector<Activation> acts(out_dim);
  std::vector<double> scale(out_dim);
  for (std::uint32_t c = 0; c < out_dim; ++c) {
    const auto tag = read_pod<std::uint8_t>(in);
    check(tag <= 2, "checkpoint: unknown activation tag");
    acts[c] = static_cast<Activation>(tag);
    scale[c] = read_pod<double>(in);
  }
  Mlp net(dims, acts, scale);
  for (std::size_t i = 0; i < net.num_layers(); ++i) {
    read_doubles(in, net.layer(i).weight.data);
    read_doubles(in, net.layer(i).bias.data);
  }
  return net;
}

void save_adam(std::ostream& out, const AdamState& s) {
  out.write("TLAOPT01", 8);
  write_pod<double>(out, s.learning_rate);
  write_pod<double>(out, s.beta1);
  write_pod<double>(out, s.beta2);
  write_pod<double>(out, s.epsilon);
  write_pod<std::uint64_t>(out, s.step_count);
  write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(s.first_moment.size()));
  write_doubles(out, s.first_moment);
  write_doubles(out, s.second_moment);
}

AdamState load_adam(std::istream& in) {
  expect_magic(in, "TLAOPT01");
  AdamState s;
  s.learning_rate = read_pod<double>(in);
  s.beta1 = read_pod<double>(in);
  s.beta2 = read_pod<double>(in);
  s.epsilon = read_pod<double>(in);
  s.step_count = read_pod<std::uint64_t>(in);
  const auto n = read_pod<std::uint64_t>(in);
  s.first_moment.resize(n);
  s.second_moment.resize(n);
  read_doubles(in, s.first_moment);
  read_doubles(in, s.second_moment);
  return s;
}

void save_mlp_file(const std::string& path, const Mlp& net) {
  std::ofstream out(path, std::ios::binary);
  check(static_cast<bool>(out), "checkpoint: cannot open " + path + " for writing");
  save_mlp(out, net);
  check(static_cast<bool>(out), "checkpoint: write failed for " + path);
}

Mlp load_mlp_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  check(static_cast<bool>(in), "checkpoint: cannot open " + path);
  return load_mlp(in);
}

}  // namespace tla
