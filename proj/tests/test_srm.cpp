#include <doctest.h>

#include <cmath>
#include <random>

#include "evospike/codec.hpp"
#include "evospike/srm.hpp"

using namespace evospike;

namespace {

// Direct evaluation of the membrane formula, independent of the
// incremental sweep used by simulate_network. Single neuron, one
// synapse per input train, refractory from the most recent own spike.
std::vector<double> reference_spikes(const std::vector<SynapseValue>& synapses,
                                     const std::vector<SpikeTrain>& inputs,
                                     const SimParams& p) {
  const auto n = static_cast<std::int64_t>(std::llround(p.sim_time_ms / p.dt));
  std::vector<double> spikes;
  double u_prev = 0.0;
  for (std::int64_t s = 0; s <= n; ++s) {
    const double t = static_cast<double>(s) * p.dt;
    double u = 0.0;
    if (!spikes.empty()) {
      const double tp = t - spikes.back();
      if (tp > 0) u += -4.0 * p.threshold * std::exp(-tp / p.tau_r);
    }
    for (std::size_t i = 0; i < synapses.size(); ++i) {
      for (double g : inputs[i].times) {
        const double te = t - g - synapses[i].delay;
        if (te > 0) u += synapses[i].weight * (te / p.tau) * std::exp(-te / p.tau);
      }
    }
    if (s > 0 && u >= p.threshold && u > u_prev) spikes.push_back(t);
    u_prev = u;
  }
  return spikes;
}

} // namespace

TEST_CASE("psp kernel matches closed form") {
  CHECK(psp_kernel(3.0, 3.0) == doctest::Approx(0.36787944117144233).epsilon(1e-12));
  CHECK(psp_kernel(6.0, 3.0) == doctest::Approx(0.2706705664732254).epsilon(1e-12));
  CHECK(psp_kernel(-1.0, 3.0) == 0.0);
  CHECK(psp_kernel(0.0, 3.0) == 0.0);
  CHECK_THROWS_AS(psp_kernel(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(psp_kernel(1.0, -3.0), std::invalid_argument);
}

TEST_CASE("psp kernel peaks at tau with value 1/e") {
  const double tau = 3.0;
  CHECK(std::abs(psp_kernel(tau, tau) - std::exp(-1.0)) < 1e-9);
  double best_t = 0.0, best_v = -1.0;
  for (double t = 1e-4; t <= 5.0 * tau; t += 1e-4) {
    const double v = psp_kernel(t, tau);
    if (v > best_v) {
      best_v = v;
      best_t = t;
    }
  }
  CHECK(std::abs(best_v - std::exp(-1.0)) < 1e-6);
  CHECK(std::abs(best_t - tau) < 1e-2);
}

TEST_CASE("refractory kernel matches closed form") {
  CHECK(refractory_kernel(0.0001, 1.5, 20.0) ==
        doctest::Approx(-5.999970000075).epsilon(1e-12));
  CHECK(refractory_kernel(20.0, 1.5, 20.0) ==
        doctest::Approx(-2.207276647028654).epsilon(1e-12));
  CHECK(refractory_kernel(-5.0, 1.5, 20.0) == 0.0);
  CHECK(refractory_kernel(0.0, 1.5, 20.0) == 0.0);
  CHECK_THROWS_AS(refractory_kernel(1.0, 0.0, 20.0), std::invalid_argument);
  CHECK_THROWS_AS(refractory_kernel(1.0, 1.5, -1.0), std::invalid_argument);
}

TEST_CASE("kernels vanish for all non-positive arguments") {
  for (double t = -50.0; t <= 0.0; t += 0.37) {
    CHECK(psp_kernel(t, 3.0) == 0.0);
    CHECK(refractory_kernel(t, 1.5, 20.0) == 0.0);
  }
}

TEST_CASE("membrane potential: single weighted delayed PSP") {
  SimParams p;
  const std::vector<std::pair<SynapseValue, SpikeTrain>> inputs = {
      {{2.0, 3.0}, SpikeTrain{{1.0}}}};
  const double u = membrane_potential(7.0, inputs, std::nullopt, p);
  CHECK(u == doctest::Approx(0.7357588823428847).epsilon(1e-12));
}

TEST_CASE("membrane potential: empty input sums to zero") {
  SimParams p;
  for (double t = 0.0; t <= 50.0; t += 5.0)
    CHECK(membrane_potential(t, {}, std::nullopt, p) == 0.0);
}

TEST_CASE("membrane potential: zero weights leave only the refractory term") {
  SimParams p;
  const std::vector<std::pair<SynapseValue, SpikeTrain>> inputs = {
      {{0.0, 2.0}, SpikeTrain{{1.0, 4.0}}}, {{0.0, 5.0}, SpikeTrain{{2.0}}}};
  const double t = 12.0, own = 9.0;
  CHECK(membrane_potential(t, inputs, own, p) ==
        doctest::Approx(refractory_kernel(t - own, p.threshold, p.tau_r)));
}

TEST_CASE("membrane potential: PSP part is linear in the weights") {
  SimParams p;
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const double w = -2.0 + 4.0 * static_cast<double>(rng() >> 11) * 0x1p-53;
    const double d = 1.0 + static_cast<double>(rng() % 8);
    const std::vector<std::pair<SynapseValue, SpikeTrain>> one = {
        {{w, d}, SpikeTrain{{1.0, 6.0}}}};
    const std::vector<std::pair<SynapseValue, SpikeTrain>> three = {
        {{3.0 * w, d}, SpikeTrain{{1.0, 6.0}}}};
    const double t = 2.0 + static_cast<double>(rng() % 40);
    CHECK(membrane_potential(t, three, std::nullopt, p) ==
          doctest::Approx(3.0 * membrane_potential(t, one, std::nullopt, p))
              .epsilon(1e-12));
  }
}

TEST_CASE("simulate: all-zero weights keep every neuron silent") {
  Topology topo{{3, 5, 1}};
  std::vector<SynapseValue> synapses(static_cast<std::size_t>(topo.synapse_count()),
                                     {0.0, 1.0});
  SimParams p;
  const std::vector<SpikeTrain> inputs = {SpikeTrain{{1.0}}, SpikeTrain{{1.0}},
                                          SpikeTrain{{7.0}}};
  for (const SpikeTrain& train : simulate_network(topo, synapses, inputs, p))
    CHECK(train.empty());
}

TEST_CASE("simulate: one max half-step PSP cannot reach threshold 3") {
  Topology topo{{1, 1}};
  SimParams p;
  p.threshold = 3.0;
  const std::vector<SynapseValue> synapses = {{2.0, 1.0}};
  const auto out = simulate_network(topo, synapses, {SpikeTrain{{1.0}}}, p);
  CHECK(out[0].empty());
}

TEST_CASE("simulate: deterministic and grid-aligned") {
  Topology topo{{3, 5, 1}};
  SimParams p;
  std::mt19937_64 rng(41);
  const auto& weights = weight_codebook(WeightScheme::Integer);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<SynapseValue> synapses;
    for (int s = 0; s < topo.synapse_count(); ++s)
      synapses.push_back({weights[rng() % 8], delay_codebook()[rng() % 8]});
    const std::vector<SpikeTrain> inputs = {
        SpikeTrain{{1.0}}, SpikeTrain{{static_cast<double>(1 + rng() % 7)}},
        SpikeTrain{{static_cast<double>(1 + rng() % 7)}}};
    const auto a = simulate_network(topo, synapses, inputs, p);
    const auto b = simulate_network(topo, synapses, inputs, p);
    for (std::size_t n = 0; n < a.size(); ++n) {
      CHECK(a[n].times == b[n].times);
      double prev = -1.0;
      for (double t : a[n].times) {
        CHECK(t > prev);
        CHECK(t >= 0.0);
        CHECK(t <= p.sim_time_ms);
        const double steps = t / p.dt;
        CHECK(std::abs(steps - std::round(steps)) < 1e-9);
        prev = t;
      }
    }
  }
}

TEST_CASE("simulate agrees with direct formula evaluation") {
  Topology topo{{2, 1}};
  SimParams p;
  p.threshold = 0.5;
  std::mt19937_64 rng(123);
  const auto& weights = weight_codebook(WeightScheme::HalfStep);
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<SynapseValue> synapses = {
        {weights[rng() % 8], delay_codebook()[rng() % 8]},
        {weights[rng() % 8], delay_codebook()[rng() % 8]}};
    const std::vector<SpikeTrain> inputs = {
        SpikeTrain{{static_cast<double>(1 + rng() % 5),
                    static_cast<double>(10 + rng() % 10)}},
        SpikeTrain{{static_cast<double>(1 + rng() % 9)}}};
    const auto sim = simulate_network(topo, synapses, inputs, p);
    const auto ref = reference_spikes(synapses, inputs, p);
    REQUIRE(sim[0].times.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i)
      CHECK(sim[0].times[i] == doctest::Approx(ref[i]).epsilon(1e-12));
  }
}

TEST_CASE("simulate trace matches membrane_potential at every grid point") {
  Topology topo{{2, 2, 1}};
  SimParams p;
  p.threshold = 0.7;
  const std::vector<SynapseValue> synapses = {
      {1.5, 1.0}, {2.0, 2.0}, {-0.5, 1.0}, {1.0, 3.0}, {2.0, 1.0}, {1.5, 4.0}};
  const std::vector<SpikeTrain> inputs = {SpikeTrain{{1.0, 5.0}}, SpikeTrain{{2.0}}};

  NetworkTrace trace;
  const auto out = simulate_network(topo, synapses, inputs, p, &trace);

  // Hidden neuron 0 receives synapses (layer 0, post 0, pre 0..1).
  const std::vector<std::pair<SynapseValue, SpikeTrain>> fanin = {
      {synapses[0], inputs[0]}, {synapses[1], inputs[1]}};
  const auto n_steps = p.step_count();
  for (std::int64_t s = 0; s <= n_steps; ++s) {
    const double t = static_cast<double>(s) * p.dt;
    std::optional<double> last;
    for (double spike : out[0].times)
      if (spike < t) last = spike;
    const double expected = membrane_potential(t, fanin, last, p);
    CHECK(trace.u[0][static_cast<std::size_t>(s)] ==
          doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("doubling the weight never reduces the spike count of one PSP") {
  SimParams p;
  p.threshold = 0.5;
  Topology topo{{1, 1}};
  for (double w : weight_codebook(WeightScheme::HalfStep)) {
    if (w <= 0) continue;
    for (double d : delay_codebook()) {
      const auto once =
          simulate_network(topo, {{SynapseValue{w, d}}}, {SpikeTrain{{1.0}}}, p);
      const auto twice =
          simulate_network(topo, {{SynapseValue{2.0 * w, d}}}, {SpikeTrain{{1.0}}}, p);
      CHECK(twice[0].times.size() >= once[0].times.size());
    }
  }
}

TEST_CASE("refractory state follows every spike") {
  // Drive one neuron with a strong early volley so it fires, then check
  // that the next grid step carries the full -4*theta*exp(-dt/tau_r)
  // undershoot and that no two consecutive steps fire while the PSP sum
  // stays below theta + 4*theta*exp(-dt/tau_r).
  SimParams p;
  p.threshold = 0.5;
  Topology topo{{1, 1}};
  const std::vector<SynapseValue> synapses = {{2.0, 1.0}};
  const std::vector<SpikeTrain> inputs = {SpikeTrain{{1.0, 2.0, 3.0, 4.0, 5.0}}};

  NetworkTrace trace;
  const auto out = simulate_network(topo, synapses, inputs, p, &trace);
  REQUIRE(!out[0].empty());

  const std::vector<std::pair<SynapseValue, SpikeTrain>> fanin = {
      {synapses[0], inputs[0]}};
  const double bound = p.threshold + 4.0 * p.threshold * std::exp(-p.dt / p.tau_r);
  for (double spike : out[0].times) {
    const double t_next = spike + p.dt;
    if (t_next > p.sim_time_ms) continue;
    const double psp_only = membrane_potential(t_next, fanin, std::nullopt, p);
    const auto step = static_cast<std::size_t>(std::llround(t_next / p.dt));
    const double u_next = trace.u[0][step];
    CHECK(u_next <= psp_only - 4.0 * p.threshold * std::exp(-p.dt / p.tau_r) + 1e-9);
    if (psp_only < bound) CHECK(trace.spiked[0][step] == 0);
  }
}

TEST_CASE("structural validation") {
  Topology topo{{3, 5, 1}};
  SimParams p;
  std::vector<SynapseValue> synapses(19, {1.0, 1.0}); // one short
  const std::vector<SpikeTrain> inputs = {SpikeTrain{{1.0}}, SpikeTrain{{1.0}},
                                          SpikeTrain{{7.0}}};
  CHECK_THROWS_AS(simulate_network(topo, synapses, inputs, p),
                  std::invalid_argument);
  synapses.push_back({1.0, 1.0});
  CHECK_THROWS_AS(
      simulate_network(topo, synapses, {SpikeTrain{{1.0}}, SpikeTrain{{1.0}}}, p),
      std::invalid_argument);
  CHECK_THROWS_AS(
      simulate_network(topo, synapses,
                       {SpikeTrain{{3.0, 2.0}}, SpikeTrain{{1.0}}, SpikeTrain{{1.0}}},
                       p),
      std::invalid_argument);

  CHECK(topo.synapse_count() == 20);
  CHECK(topo.synapse_index(0, 0, 0) == 0);
  CHECK(topo.synapse_index(0, 1, 0) == 3);
  CHECK(topo.synapse_index(1, 0, 4) == 19);

  SimParams bad;
  bad.dt = 0.3; // 50 / 0.3 is not an integer
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = SimParams{};
  bad.tau = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
