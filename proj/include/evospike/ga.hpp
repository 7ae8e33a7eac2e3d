#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "evospike/codec.hpp"
#include "evospike/srm.hpp"

namespace evospike {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits of one draw.
/// Used instead of std::uniform_real_distribution so that streams are
/// identical across standard library implementations.
inline double next_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1p-53;
}

/// Uniform integer in [0, n).
inline std::size_t next_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(next_unit(rng) * static_cast<double>(n));
}

struct GaParams {
  int population_size = 200;
  double crossover_rate = 0.6;
  double mutation_rate = 0.01;
  double selective_pressure = 1.5;
  int elite_count = 8;
  int max_generations = 200;
  double target_mse = 0.0;
  std::uint64_t rng_seed = 1;

  void validate() const;
};

struct Individual {
  Chromosome chromosome;
  std::optional<double> mse;
};

using Population = std::vector<Individual>;

/// One supervised task: simulate the network on each pattern and score
/// the output neuron's first spike against the desired time.
struct Pattern {
  std::vector<SpikeTrain> inputs;
  /// Desired first-spike time; nullopt means "must stay silent" and is
  /// scored as desired time = sim_time_ms.
  std::optional<double> desired_ms;
};

struct FitnessTask {
  Topology topology;
  WeightScheme scheme = WeightScheme::HalfStep;
  SimParams sim;
  std::vector<Pattern> patterns;

  void validate() const;
};

struct GenerationStats {
  double best_mse = 0.0;
  double mean_mse = 0.0;
  std::uint64_t evaluations_total = 0;
};

struct TrainReport {
  Individual best;
  int generations_run = 0;
  std::vector<double> mse_history; // best MSE per generation, entry 0 = initial
  std::vector<GenerationStats> stats;
  bool converged = false;
};

/// Worker count for the parallel fitness-evaluation region. Results
/// are merged by individual index, so the output is identical for any
/// worker count.
struct ExecutionPolicy {
  int workers = 0; // 0 = hardware concurrency
};

/// Reusable evaluator: pre-quantizes the task's spike times onto the
/// simulation grid once, then scores chromosomes without allocation.
class FitnessEvaluator {
public:
  explicit FitnessEvaluator(const FitnessTask& task);

  double evaluate(const Chromosome& c) const;
  double evaluate(const Chromosome& c, SimWorkspace& ws) const;
  const FitnessTask& task() const { return task_; }

  /// First spike time of the output neuron per pattern (surrogate
  /// sim_time_ms when silent).
  std::vector<double> output_times(const Chromosome& c) const;

private:
  FitnessTask task_;
};

/// Mean squared error (ms^2) between per-pattern output first-spike
/// times and desired times. A silent output is assigned the surrogate
/// time sim_time_ms.
double evaluate_mse(const Chromosome& c, const FitnessTask& task);

/// Linear ranking selection probabilities, best rank first:
/// p(r) = (1/N)*(SP - 2*(SP-1)*(r-1)/(N-1)). Sum is 1 and the
/// best/worst ratio is SP/(2-SP).
std::vector<double> baker_probabilities(int ranked_count,
                                        double selective_pressure);

/// Roulette-wheel draw; returns i with probability probs[i].
/// Precondition: probs sums to 1 within 1e-9.
template <class Urbg>
std::size_t select_parent(std::span<const double> probs, Urbg& rng) {
  const double u =
      static_cast<double>(static_cast<std::uint64_t>(rng()) >> 11) * 0x1p-53;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return probs.empty() ? 0 : probs.size() - 1;
}

/// Per-bit exchange under a fair-coin mask: child1 takes a where the
/// mask bit is 0 and b where it is 1; child2 is the complement.
template <class Urbg>
std::pair<Chromosome, Chromosome> uniform_crossover(const Chromosome& a,
                                                    const Chromosome& b,
                                                    Urbg& rng) {
  if (a.size() != b.size())
    throw std::invalid_argument("uniform_crossover: length mismatch");
  Chromosome c1 = a, c2 = b;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (rng() & 1u) {
      c1.bits[i] = b.bits[i];
      c2.bits[i] = a.bits[i];
    }
  }
  return {std::move(c1), std::move(c2)};
}

/// Flips each bit independently with probability `rate`.
template <class Urbg>
Chromosome mutate(const Chromosome& c, double rate, Urbg& rng) {
  Chromosome out = c;
  for (auto& bit : out.bits) {
    const double u =
        static_cast<double>(static_cast<std::uint64_t>(rng()) >> 11) * 0x1p-53;
    if (u < rate) bit ^= 1u;
  }
  return out;
}

/// Random population of `size` genomes with i.i.d. fair-coin bits,
/// all evaluated.
Population init_population(int size, std::size_t chromosome_bits, Rng& rng,
                           const FitnessEvaluator& eval,
                           const ExecutionPolicy& policy = {});

/// One generation: rank by MSE ascending (stable), copy the top
/// elite_count unchanged, fill the rest with selection -> crossover
/// (with probability crossover_rate per pair) -> mutation, then
/// evaluate the offspring. Population size is preserved.
Population step_generation(const Population& pop, const GaParams& params,
                           const FitnessEvaluator& eval, Rng& rng,
                           const ExecutionPolicy& policy = {});

/// Full run: iterate step_generation until best MSE <= target_mse or
/// max_generations is reached. Deterministic for a fixed seed.
TrainReport train(const GaParams& params, const FitnessTask& task,
                  const ExecutionPolicy& policy = {});

/// Brute-force oracle: enumerates every chromosome (guarded to at most
/// `max_bits` = 24 bits) and returns a global-minimum-MSE chromosome
/// with its MSE. Ties resolve to the lowest bit-string value.
std::pair<Chromosome, double> exhaustive_search(const FitnessTask& task,
                                                int max_bits = 24);

} // namespace evospike
