#include <doctest.h>

#include <filesystem>

#include "evospike/experiment.hpp"

using namespace evospike;

namespace {

const char* kXorConfig = R"(
task = xor
architecture = 3-5-1
scheme = integer
coding = hidden-layer
seeds = 1, 2
output_dir = {OUT}

[sim]
sim_time_ms = 50
dt = 1
tau = 3
tau_r = 20
threshold = 1.5

[ga]
population_size = 20
crossover_rate = 0.6
mutation_rate = 0.01
selective_pressure = 1.5
elite_count = 2
max_generations = 5
target_mse = 0
)";

std::string with_out(const std::string& text, const std::string& out) {
  std::string replaced = text;
  const auto pos = replaced.find("{OUT}");
  replaced.replace(pos, 5, out);
  return replaced;
}

std::string temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

} // namespace

TEST_CASE("config files parse into typed experiments") {
  const ExperimentConfig c = parse_config_text(with_out(kXorConfig, "out"));
  CHECK(c.task == ExperimentConfig::Task::Xor);
  CHECK(c.architecture.layer_sizes == std::vector<int>{3, 5, 1});
  CHECK(c.schemes == std::vector<WeightScheme>{WeightScheme::Integer});
  CHECK(c.coding == XorCoding::HiddenLayer);
  CHECK(c.seeds == std::vector<std::uint64_t>{1, 2});
  CHECK(c.dts == std::vector<double>{1.0});
  CHECK(c.sim.threshold == 1.5);
  CHECK(c.ga.population_size == 20);
  CHECK(validate_config(c).empty());

  CHECK_THROWS(parse_config_text("task = xor\n")); // missing keys
  CHECK_THROWS(parse_config_text("nonsense without equals\n"));
}

TEST_CASE("validation enforces the fixed threshold rules") {
  ExperimentConfig c = parse_config_text(with_out(kXorConfig, "out"));

  c.sim.threshold = 2.0;
  CHECK(!validate_config(c).empty());

  c.sim.threshold = 1.5;
  c.architecture = Topology{{3, 1}};
  auto errors = validate_config(c); // 3-1 needs binary coding and threshold 3
  CHECK(errors.size() >= 2);
  c.coding = XorCoding::Binary;
  c.sim.threshold = 3.0;
  CHECK(validate_config(c).empty());

  // Iris thresholds are scheme-dependent.
  c.task = ExperimentConfig::Task::Iris;
  c.architecture = Topology{{33, 8, 1}};
  c.schemes = {WeightScheme::Integer};
  c.sim.threshold = 6.0;
  c.data_path = "data/iris.csv";
  CHECK(validate_config(c).empty());
  c.sim.threshold = 3.0;
  CHECK(!validate_config(c).empty());
  c.schemes = {WeightScheme::HalfStep};
  CHECK(validate_config(c).empty());

  c.train_size_per_class = 50;
  CHECK(!validate_config(c).empty());
}

TEST_CASE("eval_genome reproduces the silent-network surrogate score") {
  ExperimentConfig c = parse_config_text(with_out(kXorConfig, "out"));
  c.schemes = {WeightScheme::HalfStep};

  GenomeFile genome;
  genome.scheme = WeightScheme::HalfStep;
  genome.topology = Topology{{3, 5, 1}};
  genome.chromosome.bits.assign(120, 0);

  const EvalResult result = eval_genome(genome, c);
  CHECK(result.mse == doctest::Approx(1344.5).epsilon(1e-12));
  CHECK(result.first_spikes == std::vector<double>{50.0, 50.0, 50.0, 50.0});
  for (const auto& pattern : result.outputs)
    for (const auto& train : pattern) CHECK(train.empty());

  genome.topology = Topology{{3, 2, 1}};
  genome.chromosome.bits.assign(48, 0);
  CHECK_THROWS_AS(eval_genome(genome, c), std::invalid_argument);
}

TEST_CASE("trace output covers every neuron and grid step") {
  const Topology topo{{3, 5, 1}};
  SimParams sim;
  std::vector<SynapseValue> synapses(static_cast<std::size_t>(topo.synapse_count()),
                                     {0.0, 1.0});
  const std::vector<SpikeTrain> inputs = {SpikeTrain{{1.0}}, SpikeTrain{{1.0}},
                                          SpikeTrain{{7.0}}};
  const std::string csv = trace_csv(topo, synapses, inputs, sim);
  std::size_t rows = 0;
  for (char ch : csv)
    if (ch == '\n') ++rows;
  CHECK(rows == 1 + static_cast<std::size_t>(51 * 6)); // header + steps x neurons

  // A silent network records a flat zero potential and no spike flags.
  CHECK(csv.find(",1\n") == std::string::npos);
  CHECK(csv.find("0,3,0,0\n") != std::string::npos);

  const std::string svg = trace_svg(topo, synapses, inputs, sim);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
}

TEST_CASE("run_xor emits reproducible files and auditable tables") {
  const std::string out_a = temp_dir("evospike_xor_a");
  const std::string out_b = temp_dir("evospike_xor_b");
  ExperimentConfig config = parse_config_text(with_out(kXorConfig, out_a));

  const XorReport report_a = run_xor(config);
  config.output_dir = out_b;
  const XorReport report_b = run_xor(config);

  REQUIRE(report_a.cells.size() == 2);
  for (std::size_t i = 0; i < report_a.cells.size(); ++i) {
    const XorCell& cell = report_a.cells[i];
    // Byte-identical artifacts when re-run with the same seeds.
    CHECK(read_text_file(out_a + "/" + cell.log_file) ==
          read_text_file(out_b + "/" + report_b.cells[i].log_file));
    CHECK(read_text_file(out_a + "/" + cell.genome_file) ==
          read_text_file(out_b + "/" + report_b.cells[i].genome_file));

    // Audit: the stored genome re-evaluates to the stored MSE.
    const GenomeFile genome = load_genome_file(out_a + "/" + cell.genome_file);
    const EvalResult eval = eval_genome(genome, config);
    CHECK(eval.mse == cell.best_mse);

    // The history is monotone under elitism.
    for (std::size_t g = 1; g < cell.mse_history.size(); ++g)
      CHECK(cell.mse_history[g] <= cell.mse_history[g - 1] + 1e-12);
  }

  CHECK(read_text_file(report_a.results_csv) ==
        read_text_file(report_b.results_csv));

  std::filesystem::remove_all(out_a);
  std::filesystem::remove_all(out_b);
}

TEST_CASE("oracle enumeration refuses oversized genomes") {
  ExperimentConfig config = parse_config_text(with_out(kXorConfig, "out"));
  CHECK_THROWS_AS(enumerate_oracle(config), std::invalid_argument);
}

TEST_CASE("pattern inputs follow the task encoding") {
  ExperimentConfig config = parse_config_text(with_out(kXorConfig, "out"));
  const auto inputs = pattern_inputs(config, 3);
  REQUIRE(inputs.size() == 3);
  CHECK(inputs[0].times == std::vector<double>{1.0});
  CHECK(inputs[1].times == std::vector<double>{7.0});
  CHECK(inputs[2].times == std::vector<double>{7.0});
  CHECK_THROWS(pattern_inputs(config, 4));
}
