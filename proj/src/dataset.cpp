#include "evospike/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace evospike {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

IrisClass parse_label(std::string label, int line_no) {
  std::transform(label.begin(), label.end(), label.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (label.rfind("iris-", 0) == 0) label = label.substr(5);
  if (label == "setosa") return IrisClass::Setosa;
  if (label == "versicolor") return IrisClass::Versicolor;
  if (label == "virginica") return IrisClass::Virginica;
  throw std::runtime_error("line " + std::to_string(line_no) +
                           ": unknown label '" + label + "'");
}

} // namespace

std::vector<IrisSample> load_iris(std::istream& in) {
  std::vector<IrisSample> samples;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;

    std::vector<std::string> fields;
    std::istringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(trim(field));
    if (fields.size() != 5)
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected 5 comma-separated fields, got " +
                               std::to_string(fields.size()));

    IrisSample sample;
    for (int f = 0; f < 4; ++f) {
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(fields[static_cast<std::size_t>(f)], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != fields[static_cast<std::size_t>(f)].size() ||
          !std::isfinite(value) || value <= 0.0)
        throw std::runtime_error("line " + std::to_string(line_no) +
                                 ": bad feature value '" +
                                 fields[static_cast<std::size_t>(f)] + "'");
      sample.features[static_cast<std::size_t>(f)] = value;
    }
    sample.label = parse_label(fields[4], line_no);
    samples.push_back(sample);
  }
  if (samples.empty()) throw std::runtime_error("no samples");
  return samples;
}

std::vector<IrisSample> load_iris_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);
  try {
    return load_iris(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

FoldPlan make_fold_plan(const std::vector<IrisSample>& samples,
                        int train_size_per_class, std::uint64_t seed) {
  // Group indices by class.
  std::vector<std::vector<int>> by_class(3);
  for (std::size_t i = 0; i < samples.size(); ++i)
    by_class[static_cast<std::size_t>(samples[i].label)].push_back(
        static_cast<int>(i));

  std::size_t per_class = by_class[0].size();
  for (const auto& cls : by_class) {
    if (cls.empty()) throw std::invalid_argument("make_fold_plan: empty class");
    per_class = std::min(per_class, cls.size());
  }
  if (train_size_per_class < 1 ||
      static_cast<std::size_t>(train_size_per_class) >= per_class)
    throw std::invalid_argument(
        "make_fold_plan: train_size_per_class must leave validation samples");

  // Hand-rolled Fisher-Yates so plans are identical across platforms.
  std::mt19937_64 rng(seed);
  for (auto& cls : by_class) {
    for (std::size_t i = cls.size() - 1; i > 0; --i) {
      const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
      const std::size_t j = static_cast<std::size_t>(u * static_cast<double>(i + 1));
      std::swap(cls[i], cls[j]);
    }
  }

  const int k_folds = static_cast<int>(per_class) / train_size_per_class;
  FoldPlan plan;
  plan.train_size_per_class = train_size_per_class;
  for (int k = 0; k < k_folds; ++k) {
    Fold fold;
    std::vector<bool> in_train(samples.size(), false);
    for (const auto& cls : by_class)
      for (int j = 0; j < train_size_per_class; ++j) {
        const int idx = cls[static_cast<std::size_t>(k * train_size_per_class + j)];
        in_train[static_cast<std::size_t>(idx)] = true;
        fold.train.push_back(idx);
      }
    for (std::size_t i = 0; i < samples.size(); ++i)
      if (!in_train[i]) fold.validation.push_back(static_cast<int>(i));
    std::sort(fold.train.begin(), fold.train.end());
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

double mean_validation_error(const std::vector<double>& per_fold_errors) {
  if (per_fold_errors.empty())
    throw std::invalid_argument("mean_validation_error: empty fold list");
  const double sum =
      std::accumulate(per_fold_errors.begin(), per_fold_errors.end(), 0.0);
  return sum / static_cast<double>(per_fold_errors.size());
}

std::string fold_plan_csv(const FoldPlan& plan) {
  std::string out = "fold_id,role,sample_index\n";
  for (std::size_t k = 0; k < plan.folds.size(); ++k) {
    for (int i : plan.folds[k].train)
      out += std::to_string(k) + ",train," + std::to_string(i) + "\n";
    for (int i : plan.folds[k].validation)
      out += std::to_string(k) + ",val," + std::to_string(i) + "\n";
  }
  return out;
}

} // namespace evospike
