#include "evospike/srm.hpp"

#include <cmath>
#include <string>

namespace evospike {

namespace {

std::int64_t steps_for(double sim_time_ms, double dt) {
  const double ratio = sim_time_ms / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, std::abs(ratio)))
    throw std::invalid_argument(
        "SimParams: sim_time_ms must be an integer multiple of dt");
  return static_cast<std::int64_t>(rounded);
}

} // namespace

std::int64_t SimParams::step_count() const {
  return steps_for(sim_time_ms, dt);
}

void SimParams::validate() const {
  if (!(sim_time_ms > 0)) throw std::invalid_argument("SimParams: sim_time_ms must be > 0");
  if (!(dt > 0)) throw std::invalid_argument("SimParams: dt must be > 0");
  if (!(dt <= sim_time_ms)) throw std::invalid_argument("SimParams: dt must be <= sim_time_ms");
  if (!(tau > 0)) throw std::invalid_argument("SimParams: tau must be > 0");
  if (!(tau_r > 0)) throw std::invalid_argument("SimParams: tau_r must be > 0");
  if (!(threshold > 0)) throw std::invalid_argument("SimParams: threshold must be > 0");
  steps_for(sim_time_ms, dt);
}

int Topology::neuron_count() const {
  int n = 0;
  for (int s : layer_sizes) n += s;
  return n;
}

int Topology::synapse_count() const {
  int n = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l)
    n += layer_sizes[l] * layer_sizes[l + 1];
  return n;
}

int Topology::synapse_index(int layer, int post, int pre) const {
  int offset = 0;
  for (int l = 0; l < layer; ++l) offset += layer_sizes[l] * layer_sizes[l + 1];
  return offset + post * layer_sizes[layer] + pre;
}

void Topology::validate() const {
  if (layer_sizes.size() < 2)
    throw std::invalid_argument("Topology: need at least 2 layers");
  for (int s : layer_sizes)
    if (s < 1) throw std::invalid_argument("Topology: every layer size must be >= 1");
}

void validate_spike_train(const SpikeTrain& train, double sim_time_ms) {
  double prev = -1.0;
  for (double t : train.times) {
    if (!(t >= 0.0) || !(t <= sim_time_ms))
      throw std::invalid_argument("SpikeTrain: time " + std::to_string(t) +
                                  " outside [0, sim_time_ms]");
    if (!(t > prev))
      throw std::invalid_argument("SpikeTrain: times must be strictly increasing");
    prev = t;
  }
}

double psp_kernel(double t_e, double tau) {
  if (!(tau > 0)) throw std::invalid_argument("psp_kernel: tau must be > 0");
  if (t_e <= 0.0) return 0.0;
  return (t_e / tau) * std::exp(-t_e / tau);
}

double refractory_kernel(double t_p, double threshold, double tau_r) {
  if (!(threshold > 0))
    throw std::invalid_argument("refractory_kernel: threshold must be > 0");
  if (!(tau_r > 0))
    throw std::invalid_argument("refractory_kernel: tau_r must be > 0");
  if (t_p <= 0.0) return 0.0;
  return -4.0 * threshold * std::exp(-t_p / tau_r);
}

double membrane_potential(
    double t, std::span<const std::pair<SynapseValue, SpikeTrain>> inputs,
    std::optional<double> own_last_spike, const SimParams& params) {
  params.validate();
  double u = 0.0;
  if (own_last_spike)
    u += refractory_kernel(t - *own_last_spike, params.threshold, params.tau_r);
  for (const auto& [synapse, train] : inputs) {
    validate_spike_train(train, params.sim_time_ms);
    for (double g : train.times)
      u += synapse.weight * psp_kernel(t - g - synapse.delay, params.tau);
  }
  return u;
}

namespace {

// The PSP sum over arrivals a (weight w_a at step s_a) is
//   u_psp(n) = (dt/tau) * B(n),   B(n) = sum_a w_a (n - s_a) alpha^(n - s_a)
// with alpha = exp(-dt/tau). Carrying A(n) = sum_a w_a alpha^(n - s_a)
// gives the per-step recurrences
//   B(n) = alpha * (B(n-1) + A(n-1)),  A(n) = alpha * A(n-1) + arrivals(n),
// which reproduce the kernel exactly on the grid (an arrival at n
// contributes 0 at n, matching H(0) = 0). The refractory term is one
// decaying state reset to -4*threshold at each own spike.
struct NeuronSweep {
  double a = 0.0;
  double b = 0.0;
  double refr = 0.0;
  double u_prev = 0.0;
};

} // namespace

std::vector<SpikeTrain> simulate_network(
    const Topology& topology, std::span<const SynapseValue> synapses,
    const std::vector<SpikeTrain>& input_trains, const SimParams& params,
    NetworkTrace* trace, SimWorkspace* workspace) {
  topology.validate();
  params.validate();
  if (static_cast<int>(synapses.size()) != topology.synapse_count())
    throw std::invalid_argument("simulate_network: synapse count mismatch");
  if (static_cast<int>(input_trains.size()) != topology.input_count())
    throw std::invalid_argument("simulate_network: input train count mismatch");
  for (const SpikeTrain& train : input_trains)
    validate_spike_train(train, params.sim_time_ms);

  const std::int64_t n_steps = params.step_count();
  const double dt = params.dt;
  const double alpha = std::exp(-dt / params.tau);
  const double beta = std::exp(-dt / params.tau_r);
  const double psp_scale = dt / params.tau;
  const double theta = params.threshold;

  SimWorkspace local;
  SimWorkspace& ws = workspace ? *workspace : local;
  if (ws.arrival.size() < static_cast<std::size_t>(n_steps + 1))
    ws.arrival.assign(static_cast<std::size_t>(n_steps + 1), 0.0);
  const int non_input = topology.non_input_count();
  ws.spike_steps.resize(topology.neuron_count());
  for (auto& v : ws.spike_steps) v.clear();

  // Input spike times quantized to the grid.
  for (int i = 0; i < topology.input_count(); ++i)
    for (double t : input_trains[i].times)
      ws.spike_steps[i].push_back(std::llround(t / dt));

  if (trace) {
    trace->u.assign(non_input, {});
    trace->spiked.assign(non_input, {});
    for (int n = 0; n < non_input; ++n) {
      trace->u[n].assign(static_cast<std::size_t>(n_steps + 1), 0.0);
      trace->spiked[n].assign(static_cast<std::size_t>(n_steps + 1), 0);
    }
  }

  std::vector<SpikeTrain> out(non_input);

  // Feed-forward with strictly positive delays: each layer's spikes can
  // be completed over the whole grid before the next layer runs.
  int layer_base = 0;           // global index of the first neuron in layer l
  int trace_index = 0;          // non-input neuron counter
  for (int layer = 0; layer + 1 < topology.layer_count(); ++layer) {
    const int pre_count = topology.layer_sizes[layer];
    const int post_count = topology.layer_sizes[layer + 1];
    const int post_base = layer_base + pre_count;

    for (int post = 0; post < post_count; ++post) {
      // Bucket every presynaptic spike by arrival step.
      ws.touched.clear();
      for (int pre = 0; pre < pre_count; ++pre) {
        const SynapseValue& syn =
            synapses[static_cast<std::size_t>(topology.synapse_index(layer, post, pre))];
        if (syn.delay < 0)
          throw std::invalid_argument("simulate_network: negative delay");
        const std::int64_t delay_steps = std::llround(syn.delay / dt);
        for (std::int64_t spike_step : ws.spike_steps[layer_base + pre]) {
          const std::int64_t arrival = spike_step + delay_steps;
          if (arrival > n_steps) continue;
          if (ws.arrival[static_cast<std::size_t>(arrival)] == 0.0)
            ws.touched.push_back(static_cast<std::int32_t>(arrival));
          ws.arrival[static_cast<std::size_t>(arrival)] += syn.weight;
        }
      }

      auto& spikes = ws.spike_steps[post_base + post];
      NeuronSweep s;
      s.a = ws.arrival[0]; // arrivals at step 0 shape u from step 1 on
      for (std::int64_t step = 1; step <= n_steps; ++step) {
        s.b = alpha * (s.b + s.a);
        s.a = alpha * s.a + ws.arrival[static_cast<std::size_t>(step)];
        s.refr *= beta;
        const double u = psp_scale * s.b + s.refr;
        const bool fired = u >= theta && u > s.u_prev;
        if (trace) {
          trace->u[trace_index][static_cast<std::size_t>(step)] = u;
          trace->spiked[trace_index][static_cast<std::size_t>(step)] = fired ? 1 : 0;
        }
        if (fired) {
          spikes.push_back(step);
          s.refr = -4.0 * theta; // most recent own spike only
        }
        s.u_prev = u;
      }

      for (std::int32_t a : ws.touched) ws.arrival[static_cast<std::size_t>(a)] = 0.0;
      out[post_base + post - topology.input_count()].times.reserve(spikes.size());
      for (std::int64_t step : spikes)
        out[post_base + post - topology.input_count()].times.push_back(
            static_cast<double>(step) * dt);
      ++trace_index;
    }
    layer_base += pre_count;
  }
  return out;
}

} // namespace evospike
