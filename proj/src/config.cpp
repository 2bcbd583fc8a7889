#include "ellroll/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ellroll/errors.hpp"
#include "ellroll/rng.hpp"

namespace ellroll {

namespace pt = boost::property_tree;

namespace {

std::string fmt_num(double v) { return fmt::format("{}", v); }

template <typename T>
std::string fmt_list(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += fmt_num(xs[i]);
    } else {
      out += fmt::format("{}", xs[i]);
    }
  }
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::logic_error&) {
  }
  throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used == v.size()) return i;
  } catch (const std::logic_error&) {
  }
  throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const unsigned long long i = std::stoull(v, &used);
    if (used == v.size() && v.find('-') == std::string::npos) return i;
  } catch (const std::logic_error&) {
  }
  throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + v + "'");
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" + v + "'");
}

// Ordered list of (section, key, value) in canonical order.
using Entries = std::vector<std::tuple<std::string, std::string, std::string>>;

Entries entries_of(const RunConfig& c) {
  const auto& a = c.agent;
  const auto& s = c.sulqr;
  std::vector<std::string> task_keys;
  for (TaskId t : c.sweep.tasks) task_keys.emplace_back(task_key(t));
  return {
      {"run", "task", std::string(task_key(c.task))},
      {"run", "seed", std::to_string(c.seed)},
      {"run", "epochs", std::to_string(c.epochs)},
      {"run", "episode_steps", std::to_string(c.episode_steps)},
      {"run", "reward", std::string(to_string(c.reward))},
      {"run", "out", c.out_dir},
      {"body", "mass_g", fmt_num(c.mass_g)},
      {"body", "semi_major_mm", fmt_num(c.semi_major_mm)},
      {"body", "semi_minor_mm", fmt_num(c.semi_minor_mm)},
      {"body", "gravity", fmt_num(c.gravity)},
      {"body", "torque_limit", fmt_num(c.torque_limit)},
      {"sim", "sim_dt", fmt_num(c.clock.sim_dt)},
      {"sim", "ctrl_period", std::to_string(c.clock.ctrl_period)},
      {"sim", "reset_theta_noise", fmt_num(c.reset_theta_noise)},
      {"sim", "reset_omega_noise", fmt_num(c.reset_omega_noise)},
      {"agent", "gamma", fmt_num(a.gamma)},
      {"agent", "learning_rate", fmt_num(a.learning_rate)},
      {"agent", "batch_size", std::to_string(a.batch_size)},
      {"agent", "epsilon_start", fmt_num(a.epsilon_start)},
      {"agent", "epsilon_min", fmt_num(a.epsilon_min)},
      {"agent", "epsilon_decay", fmt_num(a.epsilon_decay)},
      {"agent", "update_every", std::to_string(a.update_every)},
      {"agent", "target_sync_every", std::to_string(a.target_sync_every)},
      {"agent", "buffer_capacity", std::to_string(a.buffer_capacity)},
      {"agent", "normalize_observations", a.normalize_observations ? "true" : "false"},
      {"agent", "hidden", fmt_list(a.hidden)},
      {"sulqr", "energy_gain", fmt_num(s.energy_gain)},
      {"sulqr", "q_theta", fmt_num(s.state_cost(0, 0))},
      {"sulqr", "q_cross", fmt_num(s.state_cost(0, 1))},
      {"sulqr", "q_omega", fmt_num(s.state_cost(1, 1))},
      {"sulqr", "input_cost", fmt_num(s.input_cost)},
      {"sulqr", "blend_angle", fmt_num(s.blend_angle)},
      {"sulqr", "blend_speed", fmt_num(s.blend_speed)},
      {"sulqr", "sign_softening", fmt_num(s.sign_softening)},
      {"sulqr", "crossing_margin", fmt_num(s.crossing_margin)},
      {"sulqr", "rest_nudge", s.rest_nudge ? "true" : "false"},
      {"metrics", "settle_band", fmt_num(c.metrics.settle_band)},
      {"metrics", "tail_fraction", fmt_num(c.metrics.tail_fraction)},
      {"sweep", "masses_g", fmt_list(c.sweep.masses_g)},
      {"sweep", "semi_majors_mm", fmt_list(c.sweep.semi_majors_mm)},
      {"sweep", "tasks", fmt_list(task_keys)},
      {"sweep", "workers", std::to_string(c.sweep.workers)},
  };
}

void apply(RunConfig& c, const std::string& section, const std::string& key, const std::string& v) {
  const std::string k = section + "." + key;
  auto& a = c.agent;
  auto& s = c.sulqr;
  auto int_of = [&](const std::string& v2) { return static_cast<int>(to_int(k, v2)); };
  auto num_list = [&](const std::string& v2) {
    std::vector<double> out;
    for (const auto& item : split_list(v2)) out.push_back(to_double(k, item));
    return out;
  };

  if (k == "run.task") c.task = parse_task(v);
  else if (k == "run.seed") c.seed = to_u64(k, v);
  else if (k == "run.epochs") c.epochs = int_of(v);
  else if (k == "run.episode_steps") c.episode_steps = int_of(v);
  else if (k == "run.reward") c.reward = parse_reward_variant(v);
  else if (k == "run.out") c.out_dir = v;
  else if (k == "body.mass_g") c.mass_g = to_double(k, v);
  else if (k == "body.semi_major_mm") c.semi_major_mm = to_double(k, v);
  else if (k == "body.semi_minor_mm") c.semi_minor_mm = to_double(k, v);
  else if (k == "body.gravity") c.gravity = to_double(k, v);
  else if (k == "body.torque_limit") c.torque_limit = to_double(k, v);
  else if (k == "sim.sim_dt") c.clock.sim_dt = to_double(k, v);
  else if (k == "sim.ctrl_period") c.clock.ctrl_period = int_of(v);
  else if (k == "sim.reset_theta_noise") c.reset_theta_noise = to_double(k, v);
  else if (k == "sim.reset_omega_noise") c.reset_omega_noise = to_double(k, v);
  else if (k == "agent.gamma") a.gamma = to_double(k, v);
  else if (k == "agent.learning_rate") a.learning_rate = to_double(k, v);
  else if (k == "agent.batch_size") a.batch_size = int_of(v);
  else if (k == "agent.epsilon_start") a.epsilon_start = to_double(k, v);
  else if (k == "agent.epsilon_min") a.epsilon_min = to_double(k, v);
  else if (k == "agent.epsilon_decay") a.epsilon_decay = to_double(k, v);
  else if (k == "agent.update_every") a.update_every = int_of(v);
  else if (k == "agent.target_sync_every") a.target_sync_every = int_of(v);
  else if (k == "agent.buffer_capacity") a.buffer_capacity = int_of(v);
  else if (k == "agent.normalize_observations") a.normalize_observations = to_bool(k, v);
  else if (k == "agent.hidden") {
    a.hidden.clear();
    for (const auto& item : split_list(v)) a.hidden.push_back(int_of(item));
  }
  else if (k == "sulqr.energy_gain") s.energy_gain = to_double(k, v);
  else if (k == "sulqr.q_theta") s.state_cost(0, 0) = to_double(k, v);
  else if (k == "sulqr.q_cross") s.state_cost(0, 1) = s.state_cost(1, 0) = to_double(k, v);
  else if (k == "sulqr.q_omega") s.state_cost(1, 1) = to_double(k, v);
  else if (k == "sulqr.input_cost") s.input_cost = to_double(k, v);
  else if (k == "sulqr.blend_angle") s.blend_angle = to_double(k, v);
  else if (k == "sulqr.blend_speed") s.blend_speed = to_double(k, v);
  else if (k == "sulqr.sign_softening") s.sign_softening = to_double(k, v);
  else if (k == "sulqr.crossing_margin") s.crossing_margin = to_double(k, v);
  else if (k == "sulqr.rest_nudge") s.rest_nudge = to_bool(k, v);
  else if (k == "metrics.settle_band") c.metrics.settle_band = to_double(k, v);
  else if (k == "metrics.tail_fraction") c.metrics.tail_fraction = to_double(k, v);
  else if (k == "sweep.masses_g") c.sweep.masses_g = num_list(v);
  else if (k == "sweep.semi_majors_mm") c.sweep.semi_majors_mm = num_list(v);
  else if (k == "sweep.tasks") {
    c.sweep.tasks.clear();
    for (const auto& item : split_list(v)) c.sweep.tasks.push_back(parse_task(item));
  }
  else if (k == "sweep.workers") c.sweep.workers = int_of(v);
  else throw ConfigError("unknown config key '" + k + "'");
}

}  // namespace

void RunConfig::validate() const {
  if (epochs < 1) throw ConfigError("run.epochs must be >= 1");
  if (episode_steps < 1) throw ConfigError("run.episode_steps must be >= 1");
  physics().validate();
  clock.validate();
  if (reset_theta_noise < 0.0 || reset_omega_noise < 0.0) throw ConfigError("reset noise amplitudes must be >= 0");
  agent.validate();
  sulqr.validate();
  if (!(metrics.settle_band > 0.0)) throw ConfigError("metrics.settle_band must be positive");
  if (!(metrics.tail_fraction > 0.0 && metrics.tail_fraction <= 1.0))
    throw ConfigError("metrics.tail_fraction must be in (0, 1]");
  if (sweep.workers < 0) throw ConfigError("sweep.workers must be >= 0");
}

EllipseParams RunConfig::physics() const {
  return {mass_g * 1e-3, semi_major_mm * 1e-3, semi_minor_mm * 1e-3, gravity, torque_limit};
}

TaskSpec RunConfig::task_spec() const { return TaskSpec::canonical(task, episode_steps, reward); }

ResetNoise RunConfig::reset_noise() const {
  return {reset_theta_noise, reset_omega_noise, derive_seed(seed, "reset")};
}

std::string RunConfig::serialize() const {
  std::string out;
  std::string section;
  for (const auto& [sec, key, value] : entries_of(*this)) {
    if (sec != section) {
      if (!section.empty()) out += '\n';
      out += "[" + sec + "]\n";
      section = sec;
    }
    out += key + " = " + value + "\n";
  }
  return out;
}

std::string RunConfig::hash() const {
  RunConfig c = *this;
  c.out_dir.clear();
  return fmt::format("{:016x}", fnv1a64(c.serialize()));
}

RunConfig RunConfig::parse(std::string_view ini_text) {
  pt::ptree tree;
  std::istringstream in{std::string(ini_text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  RunConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config key '" + section + "' must live inside a [section]");
    for (const auto& [key, value] : body) apply(c, section, key, value.get_value<std::string>());
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

void RunConfig::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write config '" + path + "'");
  f << serialize();
}

}  // namespace ellroll
