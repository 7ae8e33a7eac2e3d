#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace evospike {

/// Simulation constants for the spike-response neuron model.
/// All times are in milliseconds, potentials are dimensionless.
struct SimParams {
  double sim_time_ms = 50.0;
  double dt = 1.0;
  double tau = 3.0;    // PSP decay constant
  double tau_r = 20.0; // refractory decay constant
  double threshold = 1.5;

  /// Number of grid steps; the grid is {0, dt, ..., sim_time_ms}.
  std::int64_t step_count() const;
  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

/// Layer sizes of a fully connected feed-forward network with exactly
/// one synapse per connection.
struct Topology {
  std::vector<int> layer_sizes;

  int layer_count() const { return static_cast<int>(layer_sizes.size()); }
  int input_count() const { return layer_sizes.front(); }
  int output_count() const { return layer_sizes.back(); }
  int neuron_count() const;
  int non_input_count() const { return neuron_count() - input_count(); }
  int synapse_count() const;
  /// Canonical synapse order: (layer transition, postsynaptic index,
  /// presynaptic index), lexicographic. This fixes the genome layout.
  int synapse_index(int layer, int post, int pre) const;
  void validate() const;

  bool operator==(const Topology&) const = default;
};

/// Ordered spike times of one neuron, strictly increasing, in ms.
struct SpikeTrain {
  std::vector<double> times;

  bool empty() const { return times.empty(); }
  /// First spike, or `surrogate` when the train is empty.
  double first_or(double surrogate) const {
    return times.empty() ? surrogate : times.front();
  }
};

/// Throws std::invalid_argument unless `train` is strictly increasing
/// and contained in [0, sim_time_ms].
void validate_spike_train(const SpikeTrain& train, double sim_time_ms);

/// One synapse: signed weight (sign selects excitatory/inhibitory role)
/// and axonal delay in ms.
struct SynapseValue {
  double weight = 0.0;
  double delay = 1.0;

  bool operator==(const SynapseValue&) const = default;
};

/// Unweighted postsynaptic potential at t_e ms after spike arrival:
/// (t_e/tau)*exp(-t_e/tau) for t_e > 0, else 0.
double psp_kernel(double t_e, double tau);

/// Spike-after potential t_p ms after the neuron's own spike:
/// -4*threshold*exp(-t_p/tau_r) for t_p > 0, else 0.
double refractory_kernel(double t_p, double threshold, double tau_r);

/// Membrane potential of one neuron at time t: sum of weighted,
/// delayed PSPs over all presynaptic spikes plus the refractory term
/// from the neuron's most recent own spike before t.
double membrane_potential(
    double t,
    std::span<const std::pair<SynapseValue, SpikeTrain>> inputs,
    std::optional<double> own_last_spike, const SimParams& params);

/// Per-step membrane trace of every non-input neuron. Row-major:
/// u[neuron][step], spiked[neuron][step]. Neuron indices follow the
/// layer-major order of the non-input neurons.
struct NetworkTrace {
  std::vector<std::vector<double>> u;
  std::vector<std::vector<std::uint8_t>> spiked;
};

/// Scratch buffers reused across repeated simulations (GA fitness
/// evaluation calls this millions of times).
struct SimWorkspace {
  std::vector<double> arrival;
  std::vector<std::int32_t> touched;
  std::vector<std::vector<std::int64_t>> spike_steps;
};

/// Time-stepped sweep over the grid {0, dt, ..., sim_time_ms}.
/// A neuron fires at grid time t when u(t) >= threshold and
/// u(t) > u(t - dt); it cannot fire at t = 0. Emitted spikes feed the
/// refractory term and downstream layers; neurons may fire repeatedly.
/// Input spike times are quantized to the nearest grid point.
/// Returns one SpikeTrain per non-input neuron, layer-major.
std::vector<SpikeTrain> simulate_network(
    const Topology& topology, std::span<const SynapseValue> synapses,
    const std::vector<SpikeTrain>& input_trains, const SimParams& params,
    NetworkTrace* trace = nullptr, SimWorkspace* workspace = nullptr);

} // namespace evospike
