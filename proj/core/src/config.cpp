#include "tla/config.hpp"

#include <fstream>
#include <sstream>

#include "tla/csv.hpp"
#include "tla/tensor.hpp"

namespace tla {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ContractError("config: expected a boolean, got '" + v + "'");
}

std::vector<std::uint64_t> parse_seed_list(const std::string& v) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) seeds.push_back(std::stoull(tok));
  }
  check(!seeds.empty(), "config: seeds must be a non-empty list");
  return seeds;
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

}  // namespace

double default_lambda(const std::string& env_id) {
  // 0.1 x typical per-step reward magnitude: ~5 for the pendulum cost,
  // ~0.1 for mountain car's action cost, 1 for the cart-pole survival bonus.
  if (env_id == "pendulum") return 0.5;
  if (env_id == "mountaincar") return 0.01;
  if (env_id == "cartpole") return 0.1;
  throw ContractError("default_lambda: unknown environment '" + env_id + "'");
}

double ExperimentConfig::effective_lambda() const {
  return lambda >= 0.0 ? lambda : default_lambda(env_id);
}

void ExperimentConfig::finalize() {
  if (realtime) {
    if (algorithm == "td3") algorithm = "td3_delayed";
    if (algorithm == "tla_c") algorithm = "tla_realtime";
  }
  if (algorithm == "td3_delayed" || algorithm == "tla_realtime") realtime = true;
  const bool known = algorithm == "td3" || algorithm == "tla_c" || algorithm == "tla_o" ||
                     algorithm == "td3_delayed" || algorithm == "tla_realtime";
  check(known, "config: unknown algorithm '" + algorithm + "'");
  check(env_id == "pendulum" || env_id == "mountaincar" || env_id == "cartpole",
        "config: unknown environment '" + env_id + "'");
  check(!seeds.empty(), "config: seeds must be non-empty");
  check(total_steps >= warmup_steps, "config: total_steps must cover the warmup");
  check(n >= 1, "config: n must be >= 1");
  check(threshold >= 0.0, "config: threshold must be >= 0");
  check(eval_every > 0 && eval_episodes > 0, "config: eval cadence must be positive");
}

std::string ExperimentConfig::to_key_values() const {
  std::ostringstream os;
  os << "algorithm = " << algorithm << "\n";
  os << "env = " << env_id << "\n";
  os << "seeds = ";
  for (std::size_t i = 0; i < seeds.size(); ++i) os << (i ? "," : "") << seeds[i];
  os << "\n";
  os << "total_steps = " << total_steps << "\n";
  os << "pretrain_steps = " << pretrain_steps << "\n";
  os << "eval_every = " << eval_every << "\n";
  os << "eval_episodes = " << eval_episodes << "\n";
  os << "n = " << n << "\n";
  os << "threshold = " << CsvWriter::format_double(threshold) << "\n";
  os << "lambda = " << CsvWriter::format_double(effective_lambda()) << "\n";
  os << "augment = " << bool_str(augment) << "\n";
  os << "penalty = " << bool_str(penalty) << "\n";
  os << "realtime = " << bool_str(realtime) << "\n";
  os << "per_dimension_threshold = " << bool_str(per_dimension_threshold) << "\n";
  os << "window_discount = " << bool_str(window_discount) << "\n";
  if (!fast_checkpoint.empty()) os << "fast_checkpoint = " << fast_checkpoint << "\n";
  os << "learning_rate = " << CsvWriter::format_double(learning_rate) << "\n";
  os << "discount = " << CsvWriter::format_double(discount) << "\n";
  os << "tau = " << CsvWriter::format_double(tau) << "\n";
  os << "policy_noise = " << CsvWriter::format_double(policy_noise) << "\n";
  os << "noise_clip = " << CsvWriter::format_double(noise_clip) << "\n";
  os << "policy_delay = " << policy_delay << "\n";
  os << "exploration_noise = " << CsvWriter::format_double(exploration_noise) << "\n";
  os << "warmup_steps = " << warmup_steps << "\n";
  os << "pretrain_warmup_steps = " << pretrain_warmup_steps << "\n";
  os << "batch_size = " << batch_size << "\n";
  os << "buffer_capacity = " << buffer_capacity << "\n";
  os << "hidden1 = " << hidden1 << "\n";
  os << "hidden2 = " << hidden2 << "\n";
  os << "out = " << out_dir << "\n";
  os << "workers = " << workers << "\n";
  return os.str();
}

void apply_override(ExperimentConfig& c, const std::string& key, const std::string& value) {
  const std::string k = trim(key);
  const std::string v = trim(value);
  try {
    if (k == "algorithm" || k == "algo") c.algorithm = v;
    else if (k == "variant") {
      if (v == "closed_loop") c.algorithm = "tla_c";
      else if (v == "open_loop") c.algorithm = "tla_o";
      else throw ContractError("config: variant must be closed_loop or open_loop");
    }
    else if (k == "env") c.env_id = v;
    else if (k == "seeds" || k == "seed") c.seeds = parse_seed_list(v);
    else if (k == "total_steps" || k == "steps") c.total_steps = std::stoull(v);
    else if (k == "pretrain_steps") c.pretrain_steps = std::stoull(v);
    else if (k == "eval_every") c.eval_every = std::stoull(v);
    else if (k == "eval_episodes") c.eval_episodes = std::stoi(v);
    else if (k == "n") c.n = std::stoi(v);
    else if (k == "threshold") c.threshold = std::stod(v);
    else if (k == "lambda") c.lambda = std::stod(v);
    else if (k == "augment") c.augment = parse_bool(v);
    else if (k == "penalty") c.penalty = parse_bool(v);
    else if (k == "realtime") c.realtime = parse_bool(v);
    else if (k == "per_dimension_threshold") c.per_dimension_threshold = parse_bool(v);
    else if (k == "window_discount") c.window_discount = parse_bool(v);
    else if (k == "fast_checkpoint") c.fast_checkpoint = v;
    else if (k == "learning_rate" || k == "lr") c.learning_rate = std::stod(v);
    else if (k == "discount" || k == "gamma") c.discount = std::stod(v);
    else if (k == "tau") c.tau = std::stod(v);
    else if (k == "policy_noise") c.policy_noise = std::stod(v);
    else if (k == "noise_clip") c.noise_clip = std::stod(v);
    else if (k == "policy_delay") c.policy_delay = std::stoi(v);
    else if (k == "exploration_noise") c.exploration_noise = std::stod(v);
    else if (k == "warmup_steps") c.warmup_steps = std::stoull(v);
    else if (k == "pretrain_warmup_steps") c.pretrain_warmup_steps = std::stoull(v);
    else if (k == "batch_size") c.batch_size = std::stoull(v);
    else if (k == "buffer_capacity") c.buffer_capacity = std::stoull(v);
    else if (k == "hidden1") c.hidden1 = std::stoull(v);
    else if (k == "hidden2") c.hidden2 = std::stoull(v);
    else if (k == "out" || k == "out_dir") c.out_dir = v;
    else if (k == "workers") c.workers = std::stoi(v);
    else throw ContractError("config: unknown key '" + k + "'");
  } catch (const std::invalid_argument&) {
    throw ContractError("config: bad value '" + v + "' for key '" + k + "'");
  } catch (const std::out_of_range&) {
    throw ContractError("config: value '" + v + "' out of range for key '" + k + "'");
  }
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig c;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    check(eq != std::string::npos,
          "config: line " + std::to_string(lineno) + " is not key = value");
    apply_override(c, line.substr(0, eq), line.substr(eq + 1));
  }
  return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  check(static_cast<bool>(f), "config: cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace tla
