#include "evospike/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace evospike {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, const std::string& content) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

FitnessTask make_xor_task(const Topology& topology, WeightScheme scheme,
                          XorCoding coding, const SimParams& sim) {
  FitnessTask task;
  task.topology = topology;
  task.scheme = scheme;
  task.sim = sim;
  for (const XorPattern& row : xor_patterns(coding)) {
    Pattern p;
    for (double t : row.input_times) p.inputs.push_back(SpikeTrain{{t}});
    p.desired_ms = row.target_ms;
    task.patterns.push_back(std::move(p));
  }
  task.validate();
  return task;
}

FitnessTask make_iris_task(const std::vector<IrisSample>& samples,
                           const std::vector<int>& indices,
                           const Topology& topology, WeightScheme scheme,
                           const SimParams& sim, const GrfParams& grf,
                           const ClassTargets& targets) {
  targets.validate();
  FitnessTask task;
  task.topology = topology;
  task.scheme = scheme;
  task.sim = sim;
  for (int idx : indices) {
    const IrisSample& sample = samples.at(static_cast<std::size_t>(idx));
    Pattern p;
    p.inputs = encode_iris_sample(sample.features, grf, sim.dt);
    p.desired_ms = targets.target_for(sample.label);
    task.patterns.push_back(std::move(p));
  }
  task.validate();
  return task;
}

double iris_accuracy(const Topology& topology,
                     std::span<const SynapseValue> synapses,
                     const std::vector<IrisSample>& samples,
                     const std::vector<int>& indices, const SimParams& sim,
                     const GrfParams& grf, const ClassTargets& targets) {
  if (indices.empty()) throw std::invalid_argument("iris_accuracy: no samples");
  SimWorkspace ws;
  int correct = 0;
  for (int idx : indices) {
    const IrisSample& sample = samples.at(static_cast<std::size_t>(idx));
    const auto inputs = encode_iris_sample(sample.features, grf, sim.dt);
    const auto trains =
        simulate_network(topology, synapses, inputs, sim, nullptr, &ws);
    const auto decoded = decode_output_class(trains.back(), targets);
    if (decoded && *decoded == sample.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(indices.size());
}

namespace {

std::string architecture_string(const Topology& t) {
  std::string out;
  for (std::size_t i = 0; i < t.layer_sizes.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(t.layer_sizes[i]);
  }
  return out;
}

std::string training_log_csv(const TrainReport& report) {
  std::string out = "generation,best_mse,mean_mse,evaluations_total\n";
  for (std::size_t g = 0; g < report.stats.size(); ++g) {
    const GenerationStats& s = report.stats[g];
    out += std::to_string(g) + "," + format_double(s.best_mse) + "," +
           format_double(s.mean_mse) + "," +
           std::to_string(s.evaluations_total) + "\n";
  }
  return out;
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

struct ReferenceAccuracy {
  double spikeprop, quickprop, rprop;
};

// Published accuracies (percent) for the same stratified training-set
// sizes, reported alongside our results for comparison.
ReferenceAccuracy reference_accuracy(int train_size_per_class) {
  switch (train_size_per_class) {
    case 10: return {92.7, 85.2, 90.3};
    case 20: return {91.9, 91.0, 94.8};
    case 25: return {85.2, 92.3, 93.2};
    case 30: return {86.2, 91.7, 93.5};
    default: return {0.0, 0.0, 0.0};
  }
}

} // namespace

XorReport run_xor(const ExperimentConfig& config) {
  require_valid(config);
  if (config.task != ExperimentConfig::Task::Xor)
    throw std::invalid_argument("run_xor: config task is not xor");

  const ExecutionPolicy policy{config.workers};
  XorReport report;
  std::string results = "architecture,scheme,dt,seed,best_mse,generations,converged,genome_file\n";

  for (WeightScheme scheme : config.schemes) {
    for (double dt : config.dts) {
      SimParams sim = config.sim;
      sim.dt = dt;
      const FitnessTask task =
          make_xor_task(config.architecture, scheme, config.coding, sim);
      for (std::uint64_t seed : config.seeds) {
        GaParams ga = config.ga;
        ga.rng_seed = seed;
        const TrainReport trained = train(ga, task, policy);

        XorCell cell;
        cell.scheme = scheme;
        cell.dt = dt;
        cell.seed = seed;
        cell.best_mse = *trained.best.mse;
        cell.generations = trained.generations_run;
        cell.converged = trained.converged;
        cell.mse_history = trained.mse_history;

        const std::string stem = to_string(scheme) + "_dt" + format_double(dt) +
                                 "_seed" + std::to_string(seed);
        cell.log_file = stem + "_log.csv";
        cell.genome_file = stem + "_genome.txt";
        write_text_file(config.output_dir + "/" + cell.log_file,
                        training_log_csv(trained));
        save_genome_file(
            GenomeFile{scheme, config.architecture, trained.best.chromosome},
            config.output_dir + "/" + cell.genome_file);

        results += architecture_string(config.architecture) + "," +
                   to_string(scheme) + "," + format_double(dt) + "," +
                   std::to_string(seed) + "," + format_double(cell.best_mse) +
                   "," + std::to_string(cell.generations) + "," +
                   (cell.converged ? "1" : "0") + "," + cell.genome_file + "\n";
        report.cells.push_back(std::move(cell));
      }
    }
  }

  report.results_csv = config.output_dir + "/results.csv";
  write_text_file(report.results_csv, results);

  // One aggregate row per (scheme, dt) cell of the sweep.
  std::string summary =
      "architecture,scheme,dt,seeds,best_mse,median_generations,converged_count\n";
  for (WeightScheme scheme : config.schemes) {
    for (double dt : config.dts) {
      double best = std::numeric_limits<double>::infinity();
      std::vector<double> gens;
      int converged = 0;
      for (const XorCell& cell : report.cells) {
        if (cell.scheme != scheme || cell.dt != dt) continue;
        best = std::min(best, cell.best_mse);
        gens.push_back(static_cast<double>(cell.generations));
        converged += cell.converged ? 1 : 0;
      }
      summary += architecture_string(config.architecture) + "," +
                 to_string(scheme) + "," + format_double(dt) + "," +
                 std::to_string(gens.size()) + "," + format_double(best) + "," +
                 format_double(median_of(gens)) + "," +
                 std::to_string(converged) + "\n";
    }
  }
  write_text_file(config.output_dir + "/summary.csv", summary);
  return report;
}

IrisReport run_iris(const ExperimentConfig& config) {
  require_valid(config);
  if (config.task != ExperimentConfig::Task::Iris)
    throw std::invalid_argument("run_iris: config task is not iris");

  const ExecutionPolicy policy{config.workers};
  const auto samples = load_iris_file(config.data_path);
  const ClassTargets targets = iris_class_targets();
  const WeightScheme scheme = config.schemes.front();

  IrisReport report;
  report.plan = make_fold_plan(samples, config.train_size_per_class, config.cv_seed);
  write_text_file(config.output_dir + "/fold_plan.csv", fold_plan_csv(report.plan));

  std::string results =
      "train_size,fold,scheme,seed,train_mse,generations,converged,val_accuracy,genome_file\n";

  for (std::size_t fold_id = 0; fold_id < report.plan.folds.size(); ++fold_id) {
    const Fold& fold = report.plan.folds[fold_id];
    const FitnessTask task =
        make_iris_task(samples, fold.train, config.architecture, scheme,
                       config.sim, config.grf, targets);
    for (std::uint64_t seed : config.seeds) {
      GaParams ga = config.ga;
      ga.rng_seed = seed;
      const TrainReport trained = train(ga, task, policy);

      const auto synapses =
          decode_chromosome(trained.best.chromosome, config.architecture, scheme);
      IrisCell cell;
      cell.fold = static_cast<int>(fold_id);
      cell.scheme = scheme;
      cell.seed = seed;
      cell.train_mse = *trained.best.mse;
      cell.generations = trained.generations_run;
      cell.converged = trained.converged;
      cell.val_accuracy =
          iris_accuracy(config.architecture, synapses, samples, fold.validation,
                        config.sim, config.grf, targets);
      cell.mse_history = trained.mse_history;

      const std::string stem =
          "fold" + std::to_string(fold_id) + "_seed" + std::to_string(seed);
      cell.log_file = stem + "_log.csv";
      cell.genome_file = stem + "_genome.txt";
      write_text_file(config.output_dir + "/" + cell.log_file,
                      training_log_csv(trained));
      save_genome_file(
          GenomeFile{scheme, config.architecture, trained.best.chromosome},
          config.output_dir + "/" + cell.genome_file);

      results += std::to_string(config.train_size_per_class) + "," +
                 std::to_string(fold_id) + "," + to_string(scheme) + "," +
                 std::to_string(seed) + "," + format_double(cell.train_mse) +
                 "," + std::to_string(cell.generations) + "," +
                 (cell.converged ? "1" : "0") + "," +
                 format_double(cell.val_accuracy) + "," + cell.genome_file + "\n";
      report.cells.push_back(std::move(cell));
    }
  }

  report.results_csv = config.output_dir + "/results.csv";
  write_text_file(report.results_csv, results);

  // Fold-level errors aggregated over the seed batch.
  std::vector<double> best_errors, median_errors;
  double best_accuracy = 0.0;
  for (std::size_t fold_id = 0; fold_id < report.plan.folds.size(); ++fold_id) {
    std::vector<double> accs;
    for (const IrisCell& cell : report.cells)
      if (cell.fold == static_cast<int>(fold_id)) accs.push_back(cell.val_accuracy);
    const double fold_best = *std::max_element(accs.begin(), accs.end());
    best_errors.push_back(1.0 - fold_best);
    median_errors.push_back(1.0 - median_of(accs));
    best_accuracy = std::max(best_accuracy, fold_best);
  }
  report.mean_error_best = mean_validation_error(best_errors);
  report.mean_error_median = mean_validation_error(median_errors);

  const ReferenceAccuracy ref = reference_accuracy(config.train_size_per_class);
  std::string summary =
      "train_size,folds,scheme,mean_accuracy_best,mean_accuracy_median,best_accuracy,"
      "spikeprop_ref_pct,quickprop_ref_pct,rprop_ref_pct\n";
  summary += std::to_string(config.train_size_per_class) + "," +
             std::to_string(report.plan.folds.size()) + "," + to_string(scheme) +
             "," + format_double(1.0 - report.mean_error_best) + "," +
             format_double(1.0 - report.mean_error_median) + "," +
             format_double(best_accuracy) + "," + format_double(ref.spikeprop) +
             "," + format_double(ref.quickprop) + "," + format_double(ref.rprop) +
             "\n";
  write_text_file(config.output_dir + "/summary.csv", summary);
  return report;
}

EvalResult eval_genome(const GenomeFile& genome, const ExperimentConfig& config,
                       std::optional<int> fold) {
  require_valid(config);
  if (!(genome.topology == config.architecture))
    throw std::invalid_argument("eval_genome: genome topology " +
                                architecture_string(genome.topology) +
                                " does not match configured architecture " +
                                architecture_string(config.architecture));

  FitnessTask task;
  EvalResult result;
  if (config.task == ExperimentConfig::Task::Xor) {
    task = make_xor_task(config.architecture, genome.scheme, config.coding,
                         config.sim);
  } else {
    const auto samples = load_iris_file(config.data_path);
    const auto plan =
        make_fold_plan(samples, config.train_size_per_class, config.cv_seed);
    const int fold_id = fold.value_or(0);
    if (fold_id < 0 || fold_id >= static_cast<int>(plan.folds.size()))
      throw std::invalid_argument("eval_genome: fold " + std::to_string(fold_id) +
                                  " outside plan with " +
                                  std::to_string(plan.folds.size()) + " folds");
    const ClassTargets targets = iris_class_targets();
    task = make_iris_task(samples, plan.folds[static_cast<std::size_t>(fold_id)].train,
                          config.architecture, genome.scheme, config.sim,
                          config.grf, targets);
    const auto synapses =
        decode_chromosome(genome.chromosome, config.architecture, genome.scheme);
    result.accuracy = iris_accuracy(
        config.architecture, synapses, samples,
        plan.folds[static_cast<std::size_t>(fold_id)].validation, config.sim,
        config.grf, targets);
  }

  const auto synapses =
      decode_chromosome(genome.chromosome, config.architecture, genome.scheme);
  SimWorkspace ws;
  double sum = 0.0;
  for (const Pattern& p : task.patterns) {
    auto trains = simulate_network(config.architecture, synapses, p.inputs,
                                   task.sim, nullptr, &ws);
    const double actual = trains.back().first_or(task.sim.sim_time_ms);
    const double desired = p.desired_ms.value_or(task.sim.sim_time_ms);
    sum += (actual - desired) * (actual - desired);
    result.first_spikes.push_back(actual);
    result.outputs.push_back(std::move(trains));
  }
  result.mse = sum / static_cast<double>(task.patterns.size());
  return result;
}

std::vector<OracleResult> enumerate_oracle(const ExperimentConfig& config) {
  require_valid(config);
  if (config.task != ExperimentConfig::Task::Xor)
    throw std::invalid_argument("enumerate_oracle: only xor tasks are enumerable");
  std::vector<OracleResult> out;
  for (WeightScheme scheme : config.schemes) {
    for (double dt : config.dts) {
      SimParams sim = config.sim;
      sim.dt = dt;
      const FitnessTask task =
          make_xor_task(config.architecture, scheme, config.coding, sim);
      auto [chromosome, mse] = exhaustive_search(task);
      out.push_back({scheme, dt, std::move(chromosome), mse});
    }
  }
  return out;
}

std::vector<SpikeTrain> pattern_inputs(const ExperimentConfig& config,
                                       int pattern_index) {
  if (config.task == ExperimentConfig::Task::Xor) {
    const auto patterns = xor_patterns(config.coding);
    if (pattern_index < 0 || pattern_index >= static_cast<int>(patterns.size()))
      throw std::invalid_argument("pattern index must be 0..3");
    std::vector<SpikeTrain> inputs;
    for (double t : patterns[static_cast<std::size_t>(pattern_index)].input_times)
      inputs.push_back(SpikeTrain{{t}});
    return inputs;
  }
  const auto samples = load_iris_file(config.data_path);
  if (pattern_index < 0 || pattern_index >= static_cast<int>(samples.size()))
    throw std::invalid_argument("sample index must be 0.." +
                                std::to_string(samples.size() - 1));
  return encode_iris_sample(samples[static_cast<std::size_t>(pattern_index)].features,
                            config.grf, config.sim.dt);
}

std::string trace_csv(const Topology& topology,
                      std::span<const SynapseValue> synapses,
                      const std::vector<SpikeTrain>& inputs,
                      const SimParams& sim) {
  NetworkTrace trace;
  simulate_network(topology, synapses, inputs, sim, &trace);
  const std::int64_t n_steps = sim.step_count();
  std::string out = "t_ms,neuron_id,u,spiked\n";
  for (std::size_t n = 0; n < trace.u.size(); ++n) {
    const int neuron_id = topology.input_count() + static_cast<int>(n);
    for (std::int64_t s = 0; s <= n_steps; ++s) {
      out += format_double(static_cast<double>(s) * sim.dt) + "," +
             std::to_string(neuron_id) + "," +
             format_double(trace.u[n][static_cast<std::size_t>(s)]) + "," +
             (trace.spiked[n][static_cast<std::size_t>(s)] ? "1" : "0") + "\n";
    }
  }
  return out;
}

std::string trace_svg(const Topology& topology,
                      std::span<const SynapseValue> synapses,
                      const std::vector<SpikeTrain>& inputs,
                      const SimParams& sim) {
  NetworkTrace trace;
  simulate_network(topology, synapses, inputs, sim, &trace);
  const std::int64_t n_steps = sim.step_count();

  constexpr double kWidth = 960, kHeight = 540;
  constexpr double kLeft = 64, kRight = 24, kTop = 24, kBottom = 48;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double u_min = 0.0, u_max = sim.threshold;
  for (const auto& row : trace.u)
    for (double u : row) {
      u_min = std::min(u_min, u);
      u_max = std::max(u_max, u);
    }
  const double pad = 0.05 * (u_max - u_min + 1e-12);
  u_min -= pad;
  u_max += pad;

  auto sx = [&](double t) { return kLeft + plot_w * t / sim.sim_time_ms; };
  auto sy = [&](double u) { return kTop + plot_h * (u_max - u) / (u_max - u_min); };

  static const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                   "#bcbd22", "#17becf"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Axes and ticks.
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\""
      << kLeft + plot_w << "\" y2=\"" << kTop + plot_h
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double t = sim.sim_time_ms * i / 5.0;
    svg << "<line x1=\"" << sx(t) << "\" y1=\"" << kTop + plot_h << "\" x2=\""
        << sx(t) << "\" y2=\"" << kTop + plot_h + 6 << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << sx(t) << "\" y=\"" << kTop + plot_h + 20
        << "\" font-size=\"12\" text-anchor=\"middle\">" << format_double(t)
        << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double u = u_min + (u_max - u_min) * i / 4.0;
    svg << "<line x1=\"" << kLeft - 6 << "\" y1=\"" << sy(u) << "\" x2=\""
        << kLeft << "\" y2=\"" << sy(u) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << kLeft - 10 << "\" y=\"" << sy(u) + 4
        << "\" font-size=\"12\" text-anchor=\"end\">"
        << format_double(std::round(u * 100.0) / 100.0) << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 8
      << "\" font-size=\"13\" text-anchor=\"middle\">t (ms)</text>\n";

  // Threshold line.
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << sy(sim.threshold) << "\" x2=\""
      << kLeft + plot_w << "\" y2=\"" << sy(sim.threshold)
      << "\" stroke=\"#888\" stroke-dasharray=\"6 4\"/>\n";

  for (std::size_t n = 0; n < trace.u.size(); ++n) {
    const char* color = kPalette[n % (sizeof kPalette / sizeof *kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.2\" points=\"";
    for (std::int64_t s = 0; s <= n_steps; ++s)
      svg << sx(static_cast<double>(s) * sim.dt) << ","
          << sy(trace.u[n][static_cast<std::size_t>(s)]) << " ";
    svg << "\"/>\n";
    const int neuron_id = topology.input_count() + static_cast<int>(n);
    svg << "<text x=\"" << kLeft + plot_w - 60 << "\" y=\""
        << kTop + 16 + 16 * static_cast<double>(n) << "\" font-size=\"12\" fill=\""
        << color << "\">neuron " << neuron_id << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

} // namespace evospike
