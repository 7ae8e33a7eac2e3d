#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "evospike/codec.hpp"
#include "evospike/dataset.hpp"
#include "evospike/encoders.hpp"
#include "evospike/ga.hpp"
#include "evospike/srm.hpp"

namespace evospike {

/// Declarative description of one experiment, read from a plain-text
/// key/value file with [sim], [ga] and [grf] sections.
struct ExperimentConfig {
  enum class Task { Xor, Iris };

  Task task = Task::Xor;
  Topology architecture;
  std::vector<WeightScheme> schemes; // XOR runs may sweep both schemes
  std::vector<double> dts;           // XOR runs may sweep time steps
  XorCoding coding = XorCoding::HiddenLayer;
  SimParams sim;                     // sim.dt is replaced per swept dt
  GaParams ga;                       // ga.rng_seed is replaced per seed
  GrfParams grf;
  std::vector<std::uint64_t> seeds;
  std::string output_dir = "out";
  int workers = 0;

  // Iris-specific.
  std::string data_path = "data/iris.csv";
  int train_size_per_class = 30;
  std::uint64_t cv_seed = 1;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

/// Every violated constraint, one message per line item; empty means
/// the config is runnable. Includes the fixed threshold rules:
/// XOR with a hidden layer -> 1.5, XOR without -> 3 (binary coding),
/// iris -> 3 for HalfStep and 6 for Integer.
std::vector<std::string> validate_config(const ExperimentConfig& config);

/// Throws std::invalid_argument listing all validation errors.
void require_valid(const ExperimentConfig& config);

/// The four truth-table patterns as a GA fitness task.
FitnessTask make_xor_task(const Topology& topology, WeightScheme scheme,
                          XorCoding coding, const SimParams& sim);

/// Population-coded iris task over the chosen sample subset.
FitnessTask make_iris_task(const std::vector<IrisSample>& samples,
                           const std::vector<int>& indices,
                           const Topology& topology, WeightScheme scheme,
                           const SimParams& sim, const GrfParams& grf,
                           const ClassTargets& targets);

/// Fraction of `indices` whose decoded output class matches the label.
double iris_accuracy(const Topology& topology,
                     std::span<const SynapseValue> synapses,
                     const std::vector<IrisSample>& samples,
                     const std::vector<int>& indices, const SimParams& sim,
                     const GrfParams& grf, const ClassTargets& targets);

struct XorCell {
  WeightScheme scheme = WeightScheme::HalfStep;
  double dt = 1.0;
  std::uint64_t seed = 0;
  double best_mse = 0.0;
  int generations = 0;
  bool converged = false;
  std::string genome_file; // relative to output_dir
  std::string log_file;
  std::vector<double> mse_history;
};

struct XorReport {
  std::vector<XorCell> cells;
  std::string results_csv; // path of the emitted table
};

/// Trains every (scheme, dt, seed) combination, stores per-run genome
/// and training-log files and a results table covering the sweep.
XorReport run_xor(const ExperimentConfig& config);

struct IrisCell {
  int fold = 0;
  WeightScheme scheme = WeightScheme::HalfStep;
  std::uint64_t seed = 0;
  double train_mse = 0.0;
  int generations = 0;
  bool converged = false;
  double val_accuracy = 0.0;
  std::string genome_file;
  std::string log_file;
  std::vector<double> mse_history;
};

struct IrisReport {
  FoldPlan plan;
  std::vector<IrisCell> cells;
  /// Mean over folds of (1 - best seed accuracy), and of the
  /// per-fold median-seed error.
  double mean_error_best = 0.0;
  double mean_error_median = 0.0;
  std::string results_csv;
};

IrisReport run_iris(const ExperimentConfig& config);

struct EvalResult {
  std::vector<std::vector<SpikeTrain>> outputs; // per pattern, per neuron
  std::vector<double> first_spikes;             // output neuron, surrogate when silent
  double mse = 0.0;
  std::optional<double> accuracy; // iris only
};

/// Pure inference of a stored genome against the config's task. For
/// iris the genome is scored on fold `fold` of the config's plan
/// (training MSE and validation accuracy).
EvalResult eval_genome(const GenomeFile& genome, const ExperimentConfig& config,
                       std::optional<int> fold = std::nullopt);

struct OracleResult {
  WeightScheme scheme = WeightScheme::HalfStep;
  double dt = 1.0;
  Chromosome best;
  double mse = 0.0;
};

/// Exhaustive enumeration for every (scheme, dt) of the config.
/// Refuses genomes over 24 bits.
std::vector<OracleResult> enumerate_oracle(const ExperimentConfig& config);

/// Per-neuron membrane trace as CSV rows (t_ms, neuron_id, u, spiked).
/// Neuron ids are global layer-major indices; input neurons carry no
/// membrane potential and are omitted.
std::string trace_csv(const Topology& topology,
                      std::span<const SynapseValue> synapses,
                      const std::vector<SpikeTrain>& inputs,
                      const SimParams& sim);

/// Line plot of the same trace: one polyline per neuron plus the
/// threshold line.
std::string trace_svg(const Topology& topology,
                      std::span<const SynapseValue> synapses,
                      const std::vector<SpikeTrain>& inputs,
                      const SimParams& sim);

/// Input trains for one pattern of the config's task (XOR row or
/// encoded iris sample).
std::vector<SpikeTrain> pattern_inputs(const ExperimentConfig& config,
                                       int pattern_index);

/// Shortest round-trip decimal form, used for every number written to
/// a report so that stored values parse back bit-identically.
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace evospike
