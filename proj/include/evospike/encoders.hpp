#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "evospike/srm.hpp"

namespace evospike {

/// How XOR outputs are represented as spike times.
///  - HiddenLayer: logic 0 -> output spike at 17 ms, logic 1 -> 10 ms.
///  - Binary: logic 0 -> no output spike, logic 1 -> spike at 10 ms
///    (used by the architecture without a hidden layer).
enum class XorCoding { HiddenLayer, Binary };

std::string to_string(XorCoding coding);
XorCoding xor_coding_from_string(const std::string& tag);

/// One XOR truth-table row as spike times. Inputs are the reference
/// neuron (always 1 ms) and the two operands (logic 0 -> 1 ms,
/// logic 1 -> 7 ms).
struct XorPattern {
  bool b1 = false;
  bool b2 = false;
  std::array<double, 3> input_times{1.0, 1.0, 1.0}; // reference, i1, i2
  std::optional<double> target_ms;                  // nullopt = no spike
};

XorPattern encode_xor(bool b1, bool b2, XorCoding coding);

/// All four truth-table rows in (0,0), (0,1), (1,0), (1,1) order.
std::vector<XorPattern> xor_patterns(XorCoding coding);

/// Gaussian receptive field population-coding parameters.
struct GrfParams {
  int m = 8;              // GRF neurons per feature
  double i_min = 0.0;     // data range
  double i_max = 50.0;
  double gamma = 1.5;     // width divisor
  double fire_threshold = 0.1; // minimum response that emits a spike
  double encode_window = 10.0; // ms; response 1 -> 0 ms, response 0 -> window

  void validate() const;
};

/// Center and width of GRF i (1-based):
///   C_i = i_min + ((2i-3)/2) * (i_max-i_min)/(m-2)
///   sigma = (1/gamma) * (i_max-i_min)/(m-2)   (identical for all i)
std::vector<std::pair<double, double>> grf_centers_widths(const GrfParams& p);

/// Per-GRF spike time for a feature value. Response
/// phi = exp(-(x-C)^2 / (2 sigma^2)); below fire_threshold the neuron
/// stays silent, otherwise it fires at (1-phi)*encode_window rounded
/// half-up to the simulation grid.
std::vector<std::optional<double>> grf_spike_times(double x,
                                                   const GrfParams& p,
                                                   double sim_dt);

inline constexpr int kIrisFeatures = 4;
inline constexpr int kIrisInputNeurons = 33; // 4 x 8 GRFs + reference
inline constexpr double kReferenceSpikeMs = 1.0;

/// 33 trains: index 0 is the reference neuron (always one spike at
/// 1 ms), then 8 GRF trains per feature in feature order. Silent GRFs
/// produce empty trains.
std::vector<SpikeTrain> encode_iris_sample(const std::array<double, 4>& features,
                                           const GrfParams& p, double sim_dt);

enum class IrisClass { Setosa, Versicolor, Virginica };

std::string to_string(IrisClass c);

/// Desired output spike time per class plus the classification window.
struct ClassTargets {
  std::vector<std::pair<IrisClass, double>> targets;
  double tolerance_ms = 2.0;

  /// Throws unless the +/- tolerance windows are pairwise disjoint.
  void validate() const;
  double target_for(IrisClass c) const;
};

/// Setosa 15 ms, Versicolor 20 ms, Virginica 25 ms, 2 ms window.
ClassTargets iris_class_targets();

/// First spike within the tolerance window of exactly one class gives
/// that class; a silent train or an out-of-window spike is
/// misclassified (nullopt).
std::optional<IrisClass> decode_output_class(const SpikeTrain& train,
                                             const ClassTargets& targets);

} // namespace evospike
