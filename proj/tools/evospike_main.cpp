#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "evospike/experiment.hpp"

namespace {

using namespace evospike;

ExperimentConfig load_and_check(const std::string& config_path,
                                const std::string& out_override,
                                const std::vector<std::uint64_t>& seed_override) {
  ExperimentConfig config = load_config_file(config_path);
  if (!out_override.empty()) config.output_dir = out_override;
  if (!seed_override.empty()) config.seeds = seed_override;
  const auto errors = validate_config(config);
  if (!errors.empty()) {
    std::fprintf(stderr, "%s: invalid configuration\n", config_path.c_str());
    for (const auto& e : errors) std::fprintf(stderr, "  - %s\n", e.c_str());
    std::exit(1);
  }
  return config;
}

int cmd_train_xor(const std::string& config_path, const std::string& out,
                  const std::vector<std::uint64_t>& seeds) {
  const ExperimentConfig config = load_and_check(config_path, out, seeds);
  const XorReport report = run_xor(config);
  std::printf("wrote %s\n", report.results_csv.c_str());
  for (const XorCell& cell : report.cells)
    std::printf("%s dt=%s seed=%llu best_mse=%s generations=%d%s\n",
                to_string(cell.scheme).c_str(), format_double(cell.dt).c_str(),
                static_cast<unsigned long long>(cell.seed),
                format_double(cell.best_mse).c_str(), cell.generations,
                cell.converged ? " (converged)" : "");
  return 0;
}

int cmd_train_iris(const std::string& config_path, const std::string& out,
                   const std::vector<std::uint64_t>& seeds) {
  const ExperimentConfig config = load_and_check(config_path, out, seeds);
  const IrisReport report = run_iris(config);
  std::printf("wrote %s\n", report.results_csv.c_str());
  for (const IrisCell& cell : report.cells)
    std::printf("fold=%d seed=%llu train_mse=%s generations=%d val_accuracy=%s\n",
                cell.fold, static_cast<unsigned long long>(cell.seed),
                format_double(cell.train_mse).c_str(), cell.generations,
                format_double(cell.val_accuracy).c_str());
  std::printf("mean accuracy (best seed per fold): %s\n",
              format_double(1.0 - report.mean_error_best).c_str());
  return 0;
}

int cmd_eval(const std::string& config_path, const std::string& genome_path,
             std::optional<int> fold, const std::string& trace_dir) {
  const ExperimentConfig config = load_and_check(config_path, "", {});
  const GenomeFile genome = load_genome_file(genome_path);
  const EvalResult result = eval_genome(genome, config, fold);
  for (std::size_t p = 0; p < result.first_spikes.size(); ++p) {
    std::printf("pattern %zu: output first spike %s\n", p,
                format_double(result.first_spikes[p]).c_str());
  }
  std::printf("mse: %s\n", format_double(result.mse).c_str());
  if (result.accuracy)
    std::printf("validation accuracy: %s\n",
                format_double(*result.accuracy).c_str());

  if (!trace_dir.empty()) {
    const auto synapses =
        decode_chromosome(genome.chromosome, genome.topology, genome.scheme);
    const std::size_t count = config.task == ExperimentConfig::Task::Xor
                                  ? result.first_spikes.size()
                                  : std::size_t{0};
    for (std::size_t p = 0; p < count; ++p) {
      const auto inputs = pattern_inputs(config, static_cast<int>(p));
      write_text_file(trace_dir + "/pattern" + std::to_string(p) + "_trace.csv",
                      trace_csv(genome.topology, synapses, inputs, config.sim));
    }
    if (count) std::printf("wrote traces to %s\n", trace_dir.c_str());
  }
  return 0;
}

int cmd_oracle(const std::string& config_path, const std::string& out) {
  const ExperimentConfig config = load_and_check(config_path, out, {});
  const auto results = enumerate_oracle(config);
  for (const OracleResult& r : results) {
    std::printf("%s dt=%s: global optimum mse=%s\n", to_string(r.scheme).c_str(),
                format_double(r.dt).c_str(), format_double(r.mse).c_str());
    const std::string path = config.output_dir + "/oracle_" + to_string(r.scheme) +
                             "_dt" + format_double(r.dt) + "_genome.txt";
    save_genome_file(GenomeFile{r.scheme, config.architecture, r.best}, path);
    std::printf("  genome: %s\n", path.c_str());

    // Compare against any previously stored GA results for this sweep cell.
    const std::string results_path = config.output_dir + "/results.csv";
    try {
      const std::string table = read_text_file(results_path);
      double ga_best = std::numeric_limits<double>::infinity();
      std::istringstream lines(table);
      std::string line;
      std::getline(lines, line); // header
      while (std::getline(lines, line)) {
        std::vector<std::string> fields;
        std::istringstream row(line);
        std::string field;
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (fields.size() < 8) continue;
        if (fields[1] != to_string(r.scheme) || fields[2] != format_double(r.dt))
          continue;
        ga_best = std::min(ga_best, std::stod(fields[4]));
      }
      if (std::isfinite(ga_best))
        std::printf("  stored GA best for this cell: %s (%s)\n",
                    format_double(ga_best).c_str(),
                    ga_best == r.mse ? "matches oracle" : "above oracle");
    } catch (const std::exception&) {
      // No stored results to compare against.
    }
  }
  return 0;
}

int cmd_trace(const std::string& config_path, const std::string& genome_path,
              int pattern, const std::string& out_csv, const std::string& out_svg) {
  const ExperimentConfig config = load_and_check(config_path, "", {});
  const GenomeFile genome = load_genome_file(genome_path);
  if (!(genome.topology == config.architecture))
    throw std::runtime_error("genome topology does not match configuration");
  const auto synapses =
      decode_chromosome(genome.chromosome, genome.topology, genome.scheme);
  const auto inputs = pattern_inputs(config, pattern);
  write_text_file(out_csv, trace_csv(genome.topology, synapses, inputs, config.sim));
  std::printf("wrote %s\n", out_csv.c_str());
  if (!out_svg.empty()) {
    write_text_file(out_svg, trace_svg(genome.topology, synapses, inputs, config.sim));
    std::printf("wrote %s\n", out_svg.c_str());
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Genetic training of limited-precision spiking networks"};
  app.require_subcommand(1);

  std::string config_path, genome_path, out_dir, trace_dir, out_csv, out_svg;
  std::vector<std::uint64_t> seeds;
  int pattern = 0;
  int fold = -1;

  auto* train_xor = app.add_subcommand("train-xor", "Train XOR networks");
  train_xor->add_option("--config", config_path, "experiment config")->required();
  train_xor->add_option("--out", out_dir, "override output directory");
  train_xor->add_option("--seed", seeds, "override the config seed list");

  auto* train_iris = app.add_subcommand("train-iris", "Train iris classifiers");
  train_iris->add_option("--config", config_path, "experiment config")->required();
  train_iris->add_option("--out", out_dir, "override output directory");
  train_iris->add_option("--seed", seeds, "override the config seed list");

  auto* eval = app.add_subcommand("eval", "Evaluate a stored genome");
  eval->add_option("--config", config_path, "experiment config")->required();
  eval->add_option("--genome", genome_path, "genome file")->required();
  eval->add_option("--fold", fold, "iris fold index (default 0)");
  eval->add_option("--trace-dir", trace_dir, "emit per-pattern trace CSVs");

  auto* oracle = app.add_subcommand("oracle", "Exhaustive search of small genomes");
  oracle->add_option("--config", config_path, "experiment config")->required();
  oracle->add_option("--out", out_dir, "override output directory");

  auto* trace = app.add_subcommand("trace", "Membrane-potential trace of one pattern");
  trace->add_option("--config", config_path, "experiment config")->required();
  trace->add_option("--genome", genome_path, "genome file")->required();
  trace->add_option("--pattern", pattern, "pattern/sample index")->required();
  trace->add_option("--out", out_csv, "trace CSV path")->required();
  trace->add_option("--svg", out_svg, "optional SVG plot path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_xor->parsed()) return cmd_train_xor(config_path, out_dir, seeds);
    if (train_iris->parsed()) return cmd_train_iris(config_path, out_dir, seeds);
    if (eval->parsed())
      return cmd_eval(config_path, genome_path,
                      fold >= 0 ? std::optional<int>(fold) : std::nullopt,
                      trace_dir);
    if (oracle->parsed()) return cmd_oracle(config_path, out_dir);
    if (trace->parsed())
      return cmd_trace(config_path, genome_path, pattern, out_csv, out_svg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
