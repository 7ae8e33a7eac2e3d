#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "evospike/srm.hpp"

namespace evospike {

/// The two 3-bit weight codebooks. HalfStep quantizes in steps of 0.5,
/// Integer in steps of 1. Delays share one codebook {1..8} ms.
enum class WeightScheme { HalfStep, Integer };

std::string to_string(WeightScheme scheme);
WeightScheme weight_scheme_from_string(const std::string& tag);

/// 8 weights in ascending order; the 3-bit index is the ascending rank.
const std::array<double, 8>& weight_codebook(WeightScheme scheme);

/// 8 delays in ms: delay = delay_idx + 1.
const std::array<double, 8>& delay_codebook();

/// One synapse as a pair of 3-bit codebook indices.
struct SynapseGene {
  std::uint8_t weight_idx = 0;
  std::uint8_t delay_idx = 0;

  bool operator==(const SynapseGene&) const = default;
};

/// Packed genome: 6 bits per synapse, stored one bit per byte in
/// canonical synapse order. Gene layout is [w2 w1 w0 d2 d1 d0],
/// MSB-first, weight bits before delay bits.
struct Chromosome {
  std::vector<std::uint8_t> bits;

  std::size_t size() const { return bits.size(); }
  bool operator==(const Chromosome&) const = default;
};

inline constexpr int kBitsPerGene = 6;

/// Decodes 6 bits into a synapse value under `scheme`.
SynapseValue decode_gene(std::span<const std::uint8_t> bits6,
                         WeightScheme scheme);

/// Inverse of decode_gene. Throws std::domain_error when the weight or
/// delay is not an exact codebook member.
std::array<std::uint8_t, kBitsPerGene> encode_gene(const SynapseValue& value,
                                                   WeightScheme scheme);

/// Decodes a whole genome into synapse values in canonical order.
std::vector<SynapseValue> decode_chromosome(const Chromosome& c,
                                            const Topology& topology,
                                            WeightScheme scheme);

/// Packs synapse values (all exact codebook members) into a genome.
Chromosome encode_chromosome(std::span<const SynapseValue> synapses,
                             WeightScheme scheme);

/// Genome file: line 1 scheme tag, line 2 dash-separated layer sizes,
/// line 3 the '0'/'1' bit string.
struct GenomeFile {
  WeightScheme scheme = WeightScheme::HalfStep;
  Topology topology;
  Chromosome chromosome;
};

std::string write_genome_text(const GenomeFile& genome);
GenomeFile parse_genome_text(const std::string& text);
void save_genome_file(const GenomeFile& genome, const std::string& path);
GenomeFile load_genome_file(const std::string& path);

} // namespace evospike
