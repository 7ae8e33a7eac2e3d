#include "evospike/ga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace evospike {

void GaParams::validate() const {
  if (population_size < 2 || population_size % 2 != 0)
    throw std::invalid_argument("GaParams: population_size must be even and >= 2");
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0))
    throw std::invalid_argument("GaParams: crossover_rate must be in [0, 1]");
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
    throw std::invalid_argument("GaParams: mutation_rate must be in [0, 1]");
  if (!(selective_pressure > 1.0 && selective_pressure <= 2.0))
    throw std::invalid_argument("GaParams: selective_pressure must be in (1, 2]");
  if (elite_count < 0 || elite_count >= population_size)
    throw std::invalid_argument("GaParams: elite_count must be in [0, population_size)");
  if (max_generations < 0)
    throw std::invalid_argument("GaParams: max_generations must be >= 0");
}

void FitnessTask::validate() const {
  topology.validate();
  sim.validate();
  if (topology.output_count() != 1)
    throw std::invalid_argument("FitnessTask: exactly one output neuron is scored");
  if (patterns.empty())
    throw std::invalid_argument("FitnessTask: at least one pattern required");
  for (const Pattern& p : patterns) {
    if (static_cast<int>(p.inputs.size()) != topology.input_count())
      throw std::invalid_argument("FitnessTask: pattern input count mismatch");
    for (const SpikeTrain& train : p.inputs)
      validate_spike_train(train, sim.sim_time_ms);
    if (p.desired_ms && (*p.desired_ms < 0 || *p.desired_ms > sim.sim_time_ms))
      throw std::invalid_argument("FitnessTask: desired time outside simulation window");
  }
}

FitnessEvaluator::FitnessEvaluator(const FitnessTask& task) : task_(task) {
  task_.validate();
}

double FitnessEvaluator::evaluate(const Chromosome& c) const {
  SimWorkspace ws;
  return evaluate(c, ws);
}

double FitnessEvaluator::evaluate(const Chromosome& c, SimWorkspace& ws) const {
  const auto synapses = decode_chromosome(c, task_.topology, task_.scheme);
  const double surrogate = task_.sim.sim_time_ms;
  double sum = 0.0;
  for (const Pattern& p : task_.patterns) {
    const auto trains =
        simulate_network(task_.topology, synapses, p.inputs, task_.sim, nullptr, &ws);
    const double actual = trains.back().first_or(surrogate);
    const double desired = p.desired_ms.value_or(surrogate);
    const double err = actual - desired;
    sum += err * err;
  }
  return sum / static_cast<double>(task_.patterns.size());
}

std::vector<double> FitnessEvaluator::output_times(const Chromosome& c) const {
  const auto synapses = decode_chromosome(c, task_.topology, task_.scheme);
  const double surrogate = task_.sim.sim_time_ms;
  std::vector<double> out;
  out.reserve(task_.patterns.size());
  SimWorkspace ws;
  for (const Pattern& p : task_.patterns) {
    const auto trains =
        simulate_network(task_.topology, synapses, p.inputs, task_.sim, nullptr, &ws);
    out.push_back(trains.back().first_or(surrogate));
  }
  return out;
}

double evaluate_mse(const Chromosome& c, const FitnessTask& task) {
  return FitnessEvaluator(task).evaluate(c);
}

std::vector<double> baker_probabilities(int ranked_count,
                                        double selective_pressure) {
  if (ranked_count < 2)
    throw std::invalid_argument("baker_probabilities: need at least 2 ranks");
  const double n = static_cast<double>(ranked_count);
  const double sp = selective_pressure;
  std::vector<double> probs(static_cast<std::size_t>(ranked_count));
  for (int r = 0; r < ranked_count; ++r)
    probs[static_cast<std::size_t>(r)] =
        (sp - 2.0 * (sp - 1.0) * static_cast<double>(r) / (n - 1.0)) / n;
  return probs;
}

namespace {

// Evaluates individuals [0, n) lacking an MSE, merged back by index so
// the result is independent of scheduling.
void evaluate_all(Population& pop, const FitnessEvaluator& eval,
                  const ExecutionPolicy& policy, std::uint64_t& eval_counter) {
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < pop.size(); ++i)
    if (!pop[i].mse) pending.push_back(i);
  if (pending.empty()) return;
  eval_counter += pending.size();

  int workers = policy.workers > 0
                    ? policy.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(pending.size())));

  if (workers == 1) {
    SimWorkspace ws;
    for (std::size_t i : pending)
      pop[i].mse = eval.evaluate(pop[i].chromosome, ws);
    return;
  }

  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      SimWorkspace ws;
      for (std::size_t k = static_cast<std::size_t>(w); k < pending.size();
           k += static_cast<std::size_t>(workers)) {
        const std::size_t i = pending[k];
        pop[i].mse = eval.evaluate(pop[i].chromosome, ws);
      }
    });
  }
  for (auto& t : threads) t.join();
}

std::vector<std::size_t> rank_by_mse(const Population& pop) {
  std::vector<std::size_t> order(pop.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return *pop[a].mse < *pop[b].mse;
  });
  return order;
}

GenerationStats stats_of(const Population& pop, std::uint64_t evals) {
  GenerationStats s;
  s.best_mse = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (const Individual& ind : pop) {
    s.best_mse = std::min(s.best_mse, *ind.mse);
    sum += *ind.mse;
  }
  s.mean_mse = sum / static_cast<double>(pop.size());
  s.evaluations_total = evals;
  return s;
}

} // namespace

Population init_population(int size, std::size_t chromosome_bits, Rng& rng,
                           const FitnessEvaluator& eval,
                           const ExecutionPolicy& policy) {
  Population pop(static_cast<std::size_t>(size));
  for (Individual& ind : pop) {
    ind.chromosome.bits.resize(chromosome_bits);
    for (auto& bit : ind.chromosome.bits)
      bit = static_cast<std::uint8_t>(rng() & 1u);
  }
  std::uint64_t evals = 0;
  evaluate_all(pop, eval, policy, evals);
  return pop;
}

Population step_generation(const Population& pop, const GaParams& params,
                           const FitnessEvaluator& eval, Rng& rng,
                           const ExecutionPolicy& policy) {
  params.validate();
  for (const Individual& ind : pop)
    if (!ind.mse)
      throw std::invalid_argument("step_generation: population not fully evaluated");

  const auto order = rank_by_mse(pop);
  const auto probs =
      baker_probabilities(static_cast<int>(pop.size()), params.selective_pressure);

  Population next;
  next.reserve(pop.size());
  for (int e = 0; e < params.elite_count; ++e)
    next.push_back(pop[order[static_cast<std::size_t>(e)]]);

  const std::size_t offspring_needed = pop.size() - next.size();
  std::vector<Individual> offspring;
  offspring.reserve(offspring_needed);
  while (offspring.size() < offspring_needed) {
    const std::size_t ra = select_parent(probs, rng);
    const std::size_t rb = select_parent(probs, rng);
    Chromosome c1 = pop[order[ra]].chromosome;
    Chromosome c2 = pop[order[rb]].chromosome;
    if (next_unit(rng) < params.crossover_rate)
      std::tie(c1, c2) = uniform_crossover(c1, c2, rng);
    c1 = mutate(c1, params.mutation_rate, rng);
    c2 = mutate(c2, params.mutation_rate, rng);
    offspring.push_back({std::move(c1), std::nullopt});
    if (offspring.size() < offspring_needed)
      offspring.push_back({std::move(c2), std::nullopt});
  }

  for (Individual& child : offspring) next.push_back(std::move(child));
  std::uint64_t evals = 0;
  evaluate_all(next, eval, policy, evals);
  return next;
}

TrainReport train(const GaParams& params, const FitnessTask& task,
                  const ExecutionPolicy& policy) {
  params.validate();
  const FitnessEvaluator eval(task);
  const std::size_t bits =
      static_cast<std::size_t>(task.topology.synapse_count()) * kBitsPerGene;

  Rng rng(params.rng_seed);
  Population pop = init_population(params.population_size, bits, rng, eval, policy);
  std::uint64_t evaluations = static_cast<std::uint64_t>(params.population_size);

  TrainReport report;
  auto record = [&](const Population& p) {
    const GenerationStats s = stats_of(p, evaluations);
    report.mse_history.push_back(s.best_mse);
    report.stats.push_back(s);
  };
  record(pop);

  auto best_of = [](const Population& p) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.size(); ++i)
      if (*p[i].mse < *p[best].mse) best = i;
    return best;
  };

  report.best = pop[best_of(pop)];
  report.converged = *report.best.mse <= params.target_mse;

  for (int g = 0; g < params.max_generations && !report.converged; ++g) {
    pop = step_generation(pop, params, eval, rng, policy);
    evaluations +=
        static_cast<std::uint64_t>(params.population_size - params.elite_count);
    record(pop);
    report.generations_run = g + 1;
    const Individual& best = pop[best_of(pop)];
    if (*best.mse < *report.best.mse) report.best = best;
    report.converged = *report.best.mse <= params.target_mse;
  }
  return report;
}

std::pair<Chromosome, double> exhaustive_search(const FitnessTask& task,
                                                int max_bits) {
  const FitnessEvaluator eval(task);
  const int bits = task.topology.synapse_count() * kBitsPerGene;
  if (bits > max_bits)
    throw std::invalid_argument("exhaustive_search: " + std::to_string(bits) +
                                "-bit genome exceeds the " +
                                std::to_string(max_bits) + "-bit guard");

  Chromosome c;
  c.bits.assign(static_cast<std::size_t>(bits), 0);
  Chromosome best = c;
  SimWorkspace ws;
  double best_mse = eval.evaluate(c, ws);

  const std::uint64_t total = std::uint64_t{1} << bits;
  for (std::uint64_t value = 1; value < total; ++value) {
    for (int b = 0; b < bits; ++b)
      c.bits[static_cast<std::size_t>(b)] =
          static_cast<std::uint8_t>((value >> (bits - 1 - b)) & 1u);
    const double mse = eval.evaluate(c, ws);
    if (mse < best_mse) { // strict: ties keep the lowest bit-string value
      best_mse = mse;
      best = c;
    }
  }
  return {best, best_mse};
}

} // namespace evospike
