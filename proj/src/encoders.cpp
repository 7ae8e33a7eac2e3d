#include "evospike/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evospike {

std::string to_string(XorCoding coding) {
  return coding == XorCoding::HiddenLayer ? "hidden-layer" : "binary";
}

XorCoding xor_coding_from_string(const std::string& tag) {
  std::string t = tag;
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (t == "hidden-layer" || t == "hidden_layer") return XorCoding::HiddenLayer;
  if (t == "binary") return XorCoding::Binary;
  throw std::invalid_argument("unknown xor coding: " + tag);
}

XorPattern encode_xor(bool b1, bool b2, XorCoding coding) {
  constexpr double kLogicZeroMs = 1.0;
  constexpr double kLogicOneMs = 7.0;
  constexpr double kOutputZeroMs = 17.0;
  constexpr double kOutputOneMs = 10.0;

  XorPattern p;
  p.b1 = b1;
  p.b2 = b2;
  p.input_times = {kReferenceSpikeMs, b1 ? kLogicOneMs : kLogicZeroMs,
                   b2 ? kLogicOneMs : kLogicZeroMs};
  const bool out = b1 != b2;
  if (coding == XorCoding::HiddenLayer)
    p.target_ms = out ? kOutputOneMs : kOutputZeroMs;
  else
    p.target_ms = out ? std::optional<double>(kOutputOneMs) : std::nullopt;
  return p;
}

std::vector<XorPattern> xor_patterns(XorCoding coding) {
  return {encode_xor(false, false, coding), encode_xor(false, true, coding),
          encode_xor(true, false, coding), encode_xor(true, true, coding)};
}

void GrfParams::validate() const {
  if (m < 3) throw std::invalid_argument("GrfParams: m must be >= 3");
  if (!(i_max > i_min)) throw std::invalid_argument("GrfParams: i_max must exceed i_min");
  if (!(gamma > 0)) throw std::invalid_argument("GrfParams: gamma must be > 0");
  if (!(fire_threshold > 0 && fire_threshold < 1))
    throw std::invalid_argument("GrfParams: fire_threshold must be in (0, 1)");
  if (!(encode_window > 0))
    throw std::invalid_argument("GrfParams: encode_window must be > 0");
}

std::vector<std::pair<double, double>> grf_centers_widths(const GrfParams& p) {
  p.validate();
  const double spacing = (p.i_max - p.i_min) / static_cast<double>(p.m - 2);
  const double sigma = spacing / p.gamma;
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(p.m));
  for (int i = 1; i <= p.m; ++i)
    out.emplace_back(p.i_min + (2.0 * i - 3.0) / 2.0 * spacing, sigma);
  return out;
}

std::vector<std::optional<double>> grf_spike_times(double x, const GrfParams& p,
                                                   double sim_dt) {
  const auto fields = grf_centers_widths(p);
  std::vector<std::optional<double>> out;
  out.reserve(fields.size());
  for (const auto& [center, sigma] : fields) {
    const double z = (x - center) / sigma;
    const double response = std::exp(-0.5 * z * z);
    if (response < p.fire_threshold) {
      out.push_back(std::nullopt);
      continue;
    }
    const double t = (1.0 - response) * p.encode_window;
    // Round half-up onto the simulation grid.
    const double stepped = std::floor(t / sim_dt + 0.5) * sim_dt;
    out.push_back(stepped);
  }
  return out;
}

std::vector<SpikeTrain> encode_iris_sample(const std::array<double, 4>& features,
                                           const GrfParams& p, double sim_dt) {
  std::vector<SpikeTrain> trains;
  trains.reserve(kIrisInputNeurons);
  trains.push_back(SpikeTrain{{kReferenceSpikeMs}});
  for (double x : features) {
    for (const auto& t : grf_spike_times(x, p, sim_dt)) {
      if (t)
        trains.push_back(SpikeTrain{{*t}});
      else
        trains.push_back(SpikeTrain{});
    }
  }
  return trains;
}

std::string to_string(IrisClass c) {
  switch (c) {
    case IrisClass::Setosa: return "setosa";
    case IrisClass::Versicolor: return "versicolor";
    case IrisClass::Virginica: return "virginica";
  }
  return "?";
}

void ClassTargets::validate() const {
  if (targets.empty()) throw std::invalid_argument("ClassTargets: no targets");
  if (!(tolerance_ms >= 0)) throw std::invalid_argument("ClassTargets: negative tolerance");
  for (std::size_t i = 0; i < targets.size(); ++i)
    for (std::size_t j = i + 1; j < targets.size(); ++j)
      if (std::abs(targets[i].second - targets[j].second) <= 2.0 * tolerance_ms)
        throw std::invalid_argument("ClassTargets: classification windows overlap");
}

double ClassTargets::target_for(IrisClass c) const {
  for (const auto& [cls, t] : targets)
    if (cls == c) return t;
  throw std::invalid_argument("ClassTargets: class has no target");
}

ClassTargets iris_class_targets() {
  ClassTargets t;
  t.targets = {{IrisClass::Setosa, 15.0},
               {IrisClass::Versicolor, 20.0},
               {IrisClass::Virginica, 25.0}};
  t.tolerance_ms = 2.0;
  return t;
}

std::optional<IrisClass> decode_output_class(const SpikeTrain& train,
                                             const ClassTargets& targets) {
  if (train.empty()) return std::nullopt;
  const double t = train.times.front();
  std::optional<IrisClass> match;
  for (const auto& [cls, target] : targets.targets) {
    if (std::abs(t - target) <= targets.tolerance_ms) {
      if (match) return std::nullopt; // ambiguous
      match = cls;
    }
  }
  return match;
}

} // namespace evospike
