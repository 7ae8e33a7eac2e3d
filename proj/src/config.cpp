#include "evospike/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace evospike {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string part;
  while (std::getline(in, part, ',')) {
    part = trim(part);
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

/// Sectioned key/value file: "key = value" lines, sections in
/// brackets, '#' or ';' comments.
struct KeyValueFile {
  std::map<std::string, std::map<std::string, std::string>> sections;

  static KeyValueFile parse(const std::string& text) {
    KeyValueFile f;
    std::istringstream in(text);
    std::string line;
    std::string section; // "" = top level
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto comment = line.find_first_of("#;");
      if (comment != std::string::npos) line = line.substr(0, comment);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw std::runtime_error("config line " + std::to_string(line_no) +
                                   ": unterminated section header");
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("config line " + std::to_string(line_no) +
                                 ": expected key = value");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty())
        throw std::runtime_error("config line " + std::to_string(line_no) +
                                 ": empty key");
      f.sections[section][key] = value;
    }
    return f;
  }

  const std::string* find(const std::string& section,
                          const std::string& key) const {
    const auto s = sections.find(section);
    if (s == sections.end()) return nullptr;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
  }
};

double parse_double(const std::string& where, const std::string& value) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    if (value == "inf" || value == "+inf")
      return std::numeric_limits<double>::infinity();
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size())
    throw std::runtime_error(where + ": bad number '" + value + "'");
  return out;
}

std::int64_t parse_int(const std::string& where, const std::string& value) {
  std::size_t used = 0;
  std::int64_t out = 0;
  try {
    out = std::stoll(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size())
    throw std::runtime_error(where + ": bad integer '" + value + "'");
  return out;
}

Topology parse_architecture(const std::string& value) {
  Topology t;
  std::istringstream in(value);
  std::string part;
  while (std::getline(in, part, '-'))
    t.layer_sizes.push_back(
        static_cast<int>(parse_int("architecture", trim(part))));
  return t;
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  const KeyValueFile f = KeyValueFile::parse(text);
  ExperimentConfig c;

  auto top = [&](const char* key) { return f.find("", key); };
  auto need = [&](const std::string& section, const char* key) -> const std::string& {
    const std::string* v = f.find(section, key);
    if (!v)
      throw std::runtime_error("config: missing key '" +
                               (section.empty() ? std::string(key)
                                                : section + "." + key) +
                               "'");
    return *v;
  };

  const std::string task = trim(need("", "task"));
  if (task == "xor")
    c.task = ExperimentConfig::Task::Xor;
  else if (task == "iris")
    c.task = ExperimentConfig::Task::Iris;
  else
    throw std::runtime_error("config: task must be xor or iris, got '" + task + "'");

  c.architecture = parse_architecture(need("", "architecture"));

  c.schemes.clear();
  for (const std::string& tag : split_list(need("", "scheme")))
    c.schemes.push_back(weight_scheme_from_string(tag));

  if (const std::string* v = top("coding")) c.coding = xor_coding_from_string(*v);

  c.seeds.clear();
  for (const std::string& s : split_list(need("", "seeds")))
    c.seeds.push_back(static_cast<std::uint64_t>(parse_int("seeds", s)));

  if (const std::string* v = top("output_dir")) c.output_dir = *v;
  if (const std::string* v = top("workers"))
    c.workers = static_cast<int>(parse_int("workers", *v));
  if (const std::string* v = top("data")) c.data_path = *v;
  if (const std::string* v = top("train_size"))
    c.train_size_per_class = static_cast<int>(parse_int("train_size", *v));
  if (const std::string* v = top("cv_seed"))
    c.cv_seed = static_cast<std::uint64_t>(parse_int("cv_seed", *v));

  c.sim.sim_time_ms = parse_double("sim.sim_time_ms", need("sim", "sim_time_ms"));
  c.dts.clear();
  for (const std::string& d : split_list(need("sim", "dt")))
    c.dts.push_back(parse_double("sim.dt", d));
  c.sim.dt = c.dts.empty() ? 1.0 : c.dts.front();
  c.sim.tau = parse_double("sim.tau", need("sim", "tau"));
  c.sim.tau_r = parse_double("sim.tau_r", need("sim", "tau_r"));
  c.sim.threshold = parse_double("sim.threshold", need("sim", "threshold"));

  c.ga.population_size =
      static_cast<int>(parse_int("ga.population_size", need("ga", "population_size")));
  c.ga.crossover_rate =
      parse_double("ga.crossover_rate", need("ga", "crossover_rate"));
  c.ga.mutation_rate = parse_double("ga.mutation_rate", need("ga", "mutation_rate"));
  c.ga.selective_pressure =
      parse_double("ga.selective_pressure", need("ga", "selective_pressure"));
  c.ga.elite_count =
      static_cast<int>(parse_int("ga.elite_count", need("ga", "elite_count")));
  c.ga.max_generations =
      static_cast<int>(parse_int("ga.max_generations", need("ga", "max_generations")));
  c.ga.target_mse = parse_double("ga.target_mse", need("ga", "target_mse"));

  if (c.task == ExperimentConfig::Task::Iris) {
    c.grf.m = static_cast<int>(parse_int("grf.m", need("grf", "m")));
    c.grf.i_min = parse_double("grf.i_min", need("grf", "i_min"));
    c.grf.i_max = parse_double("grf.i_max", need("grf", "i_max"));
    c.grf.gamma = parse_double("grf.gamma", need("grf", "gamma"));
    c.grf.fire_threshold =
        parse_double("grf.fire_threshold", need("grf", "fire_threshold"));
    c.grf.encode_window =
        parse_double("grf.encode_window", need("grf", "encode_window"));
  }
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str());
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::vector<std::string> validate_config(const ExperimentConfig& config) {
  std::vector<std::string> errors;
  auto check = [&](bool ok, const std::string& message) {
    if (!ok) errors.push_back(message);
  };

  try {
    config.architecture.validate();
  } catch (const std::exception& e) {
    errors.push_back(e.what());
    return errors;
  }

  check(!config.schemes.empty(), "at least one weight scheme is required");
  check(!config.seeds.empty(), "at least one seed is required");
  check(!config.dts.empty(), "at least one time step is required");
  check(config.architecture.output_count() == 1,
        "architecture must end in a single output neuron");

  for (double dt : config.dts) {
    SimParams sim = config.sim;
    sim.dt = dt;
    try {
      sim.validate();
    } catch (const std::exception& e) {
      errors.push_back(e.what());
    }
  }
  try {
    config.ga.validate();
  } catch (const std::exception& e) {
    errors.push_back(e.what());
  }

  const double theta = config.sim.threshold;
  if (config.task == ExperimentConfig::Task::Xor) {
    check(config.architecture.input_count() == 3,
          "xor task needs 3 input neurons (reference + 2 operands)");
    const bool hidden = config.architecture.layer_count() > 2;
    if (hidden) {
      check(config.coding == XorCoding::HiddenLayer,
            "xor with a hidden layer uses hidden-layer output coding");
      check(theta == 1.5, "xor with a hidden layer runs at threshold 1.5");
    } else {
      check(config.coding == XorCoding::Binary,
            "xor without a hidden layer uses binary output coding");
      check(theta == 3.0, "xor without a hidden layer runs at threshold 3");
    }
  } else {
    check(config.schemes.size() == 1,
          "iris runs use a single weight scheme (threshold depends on it)");
    check(config.dts.size() == 1, "iris runs use a single time step");
    check(config.architecture.input_count() == kIrisInputNeurons,
          "iris task needs 33 input neurons (4 x 8 receptive fields + reference)");
    try {
      config.grf.validate();
    } catch (const std::exception& e) {
      errors.push_back(e.what());
    }
    check(config.grf.m == 8, "iris encoding uses 8 receptive fields per feature");
    if (!config.schemes.empty()) {
      const double expected =
          config.schemes.front() == WeightScheme::HalfStep ? 3.0 : 6.0;
      check(theta == expected,
            "iris threshold must be " + format_double(expected) + " for the " +
                to_string(config.schemes.front()) + " scheme");
    }
    check(config.train_size_per_class >= 1 && config.train_size_per_class <= 49,
          "train_size must leave at least one validation sample per class");
  }
  return errors;
}

void require_valid(const ExperimentConfig& config) {
  const auto errors = validate_config(config);
  if (errors.empty()) return;
  std::string message = "invalid experiment config:";
  for (const std::string& e : errors) message += "\n  - " + e;
  throw std::invalid_argument(message);
}

} // namespace evospike
