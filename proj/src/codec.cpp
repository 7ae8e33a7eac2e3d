#include "evospike/codec.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace evospike {

namespace {

const std::array<double, 8> kHalfStepWeights{-1.5, -1.0, -0.5, 0.0,
                                             0.5,  1.0,  1.5,  2.0};
const std::array<double, 8> kIntegerWeights{-3.0, -2.0, -1.0, 0.0,
                                            1.0,  2.0,  3.0,  4.0};
const std::array<double, 8> kDelays{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0};

std::uint8_t bits3_to_index(std::span<const std::uint8_t> bits) {
  return static_cast<std::uint8_t>((bits[0] << 2) | (bits[1] << 1) | bits[2]);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

} // namespace

std::string to_string(WeightScheme scheme) {
  return scheme == WeightScheme::HalfStep ? "halfstep" : "integer";
}

WeightScheme weight_scheme_from_string(const std::string& tag) {
  const std::string t = lower(tag);
  if (t == "halfstep" || t == "half-step") return WeightScheme::HalfStep;
  if (t == "integer") return WeightScheme::Integer;
  throw std::invalid_argument("unknown weight scheme: " + tag);
}

const std::array<double, 8>& weight_codebook(WeightScheme scheme) {
  return scheme == WeightScheme::HalfStep ? kHalfStepWeights : kIntegerWeights;
}

const std::array<double, 8>& delay_codebook() { return kDelays; }

SynapseValue decode_gene(std::span<const std::uint8_t> bits6,
                         WeightScheme scheme) {
  if (bits6.size() != kBitsPerGene)
    throw std::invalid_argument("decode_gene: expected 6 bits");
  const std::uint8_t w = bits3_to_index(bits6.subspan(0, 3));
  const std::uint8_t d = bits3_to_index(bits6.subspan(3, 3));
  return {weight_codebook(scheme)[w], delay_codebook()[d]};
}

std::array<std::uint8_t, kBitsPerGene> encode_gene(const SynapseValue& value,
                                                   WeightScheme scheme) {
  const auto& weights = weight_codebook(scheme);
  const auto wit = std::find(weights.begin(), weights.end(), value.weight);
  if (wit == weights.end())
    throw std::domain_error("encode_gene: weight not in codebook");
  const auto& delays = delay_codebook();
  const auto dit = std::find(delays.begin(), delays.end(), value.delay);
  if (dit == delays.end())
    throw std::domain_error("encode_gene: delay not in codebook");
  const auto w = static_cast<std::uint8_t>(wit - weights.begin());
  const auto d = static_cast<std::uint8_t>(dit - delays.begin());
  return {static_cast<std::uint8_t>((w >> 2) & 1),
          static_cast<std::uint8_t>((w >> 1) & 1),
          static_cast<std::uint8_t>(w & 1),
          static_cast<std::uint8_t>((d >> 2) & 1),
          static_cast<std::uint8_t>((d >> 1) & 1),
          static_cast<std::uint8_t>(d & 1)};
}

std::vector<SynapseValue> decode_chromosome(const Chromosome& c,
                                            const Topology& topology,
                                            WeightScheme scheme) {
  topology.validate();
  const std::size_t expected =
      static_cast<std::size_t>(topology.synapse_count()) * kBitsPerGene;
  if (c.size() != expected)
    throw std::invalid_argument("decode_chromosome: expected " +
                                std::to_string(expected) + " bits, got " +
                                std::to_string(c.size()));
  std::vector<SynapseValue> out;
  out.reserve(static_cast<std::size_t>(topology.synapse_count()));
  for (std::size_t g = 0; g < c.size(); g += kBitsPerGene)
    out.push_back(decode_gene({c.bits.data() + g, kBitsPerGene}, scheme));
  return out;
}

Chromosome encode_chromosome(std::span<const SynapseValue> synapses,
                             WeightScheme scheme) {
  Chromosome c;
  c.bits.reserve(synapses.size() * kBitsPerGene);
  for (const SynapseValue& v : synapses) {
    const auto gene = encode_gene(v, scheme);
    c.bits.insert(c.bits.end(), gene.begin(), gene.end());
  }
  return c;
}

std::string write_genome_text(const GenomeFile& genome) {
  std::string out = to_string(genome.scheme);
  out += '\n';
  for (std::size_t i = 0; i < genome.topology.layer_sizes.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(genome.topology.layer_sizes[i]);
  }
  out += '\n';
  for (std::uint8_t bit : genome.chromosome.bits) out += bit ? '1' : '0';
  out += '\n';
  return out;
}

GenomeFile parse_genome_text(const std::string& text) {
  std::istringstream in(text);
  std::string scheme_line, topo_line, bits_line;
  if (!std::getline(in, scheme_line) || !std::getline(in, topo_line) ||
      !std::getline(in, bits_line))
    throw std::runtime_error("genome file: expected 3 lines");
  auto strip = [](std::string& s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  };
  strip(scheme_line);
  strip(topo_line);
  strip(bits_line);

  GenomeFile genome;
  genome.scheme = weight_scheme_from_string(scheme_line);

  std::istringstream topo(topo_line);
  std::string part;
  while (std::getline(topo, part, '-')) {
    try {
      genome.topology.layer_sizes.push_back(std::stoi(part));
    } catch (const std::exception&) {
      throw std::runtime_error("genome file: bad topology token '" + part + "'");
    }
  }
  genome.topology.validate();

  for (char ch : bits_line) {
    if (ch != '0' && ch != '1')
      throw std::runtime_error("genome file: bit string must be 0/1");
    genome.chromosome.bits.push_back(ch == '1' ? 1 : 0);
  }
  const std::size_t expected =
      static_cast<std::size_t>(genome.topology.synapse_count()) * kBitsPerGene;
  if (genome.chromosome.size() != expected)
    throw std::runtime_error("genome file: expected " + std::to_string(expected) +
                             " bits for topology, got " +
                             std::to_string(genome.chromosome.size()));
  return genome;
}

void save_genome_file(const GenomeFile& genome, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << write_genome_text(genome);
}

GenomeFile load_genome_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open genome file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_genome_text(buf.str());
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

} // namespace evospike
