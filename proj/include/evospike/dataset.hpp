#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "evospike/encoders.hpp"

namespace evospike {

struct IrisSample {
  std::array<double, 4> features{}; // sepal length/width, petal length/width (cm)
  IrisClass label = IrisClass::Setosa;
};

/// Parses CSV lines "f1,f2,f3,f4,label". Labels accept the UCI
/// "Iris-setosa" form or the bare class name, case-insensitively.
/// Parse errors report the 1-based line number.
std::vector<IrisSample> load_iris(std::istream& in);
std::vector<IrisSample> load_iris_file(const std::string& path);

/// Class-stratified cross-validation plan. Each fold trains on
/// train_size_per_class samples from every class and validates on the
/// complement, so train and validation are disjoint and cover all
/// samples.
struct Fold {
  std::vector<int> train;
  std::vector<int> validation;
};

struct FoldPlan {
  int train_size_per_class = 0;
  std::vector<Fold> folds;
};

/// K = floor(per-class count / train_size_per_class) folds; fold k
/// trains on the k-th shuffled block of each class. The class-internal
/// order is shuffled once by `seed` (Fisher-Yates over a seeded
/// mt19937_64, so plans are identical across platforms).
FoldPlan make_fold_plan(const std::vector<IrisSample>& samples,
                        int train_size_per_class, std::uint64_t seed);

/// Arithmetic mean of per-fold validation errors.
double mean_validation_error(const std::vector<double>& per_fold_errors);

/// Audit serialization: one row "fold_id,role,sample_index" per
/// membership, role in {train, val}.
std::string fold_plan_csv(const FoldPlan& plan);

} // namespace evospike
