#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include "evospike/dataset.hpp"

using namespace evospike;

TEST_CASE("the bundled dataset loads 50 samples per class") {
  const auto samples = load_iris_file("data/iris.csv");
  REQUIRE(samples.size() == 150);
  std::map<IrisClass, int> counts;
  for (const auto& s : samples) counts[s.label]++;
  CHECK(counts[IrisClass::Setosa] == 50);
  CHECK(counts[IrisClass::Versicolor] == 50);
  CHECK(counts[IrisClass::Virginica] == 50);

  CHECK(samples[0].features == std::array<double, 4>{5.1, 3.5, 1.4, 0.2});
  CHECK(samples[0].label == IrisClass::Setosa);
  for (const auto& s : samples)
    for (double f : s.features) {
      CHECK(f > 0.0);
      CHECK(f < 10.0);
    }
}

TEST_CASE("loader reports malformed input with line numbers") {
  std::istringstream empty("");
  CHECK_THROWS_WITH_AS(load_iris(empty), "no samples", std::runtime_error);

  std::istringstream short_row("5.1,3.5,1.4,Iris-setosa\n");
  CHECK_THROWS_AS(load_iris(short_row), std::runtime_error);

  std::istringstream bad_label("5.1,3.5,1.4,0.2,Iris-rosa\n");
  try {
    load_iris(bad_label);
    FAIL("expected error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }

  std::istringstream bad_value("5.1,3.5,1.4,0.2,Iris-setosa\n5.1,x,1.4,0.2,Iris-setosa\n");
  try {
    load_iris(bad_value);
    FAIL("expected error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }

  std::istringstream bare_label("6.0,2.9,4.5,1.5,versicolor\n");
  CHECK(load_iris(bare_label)[0].label == IrisClass::Versicolor);
}

TEST_CASE("fold plans are stratified partitions") {
  const auto samples = load_iris_file("data/iris.csv");

  const struct {
    int size;
    int folds;
    std::size_t train_total;
  } cases[] = {{10, 5, 30}, {20, 2, 60}, {25, 2, 75}, {30, 1, 90}};

  for (const auto& c : cases) {
    const FoldPlan plan = make_fold_plan(samples, c.size, 42);
    CHECK(plan.folds.size() == static_cast<std::size_t>(c.folds));
    for (const Fold& fold : plan.folds) {
      CHECK(fold.train.size() == c.train_total);
      CHECK(fold.train.size() + fold.validation.size() == samples.size());

      std::set<int> train(fold.train.begin(), fold.train.end());
      for (int idx : fold.validation) CHECK(train.count(idx) == 0);

      std::map<IrisClass, int> per_class;
      for (int idx : fold.train)
        per_class[samples[static_cast<std::size_t>(idx)].label]++;
      for (const auto& [cls, count] : per_class) CHECK(count == c.size);
    }
  }

  // K*size = 50: every sample validates in at least one fold.
  const FoldPlan plan25 = make_fold_plan(samples, 25, 7);
  std::set<int> validated;
  for (const Fold& fold : plan25.folds)
    validated.insert(fold.validation.begin(), fold.validation.end());
  CHECK(validated.size() == samples.size());

  // Deterministic under a fixed seed, different under another.
  const FoldPlan again = make_fold_plan(samples, 10, 42);
  const FoldPlan other = make_fold_plan(samples, 10, 43);
  CHECK(again.folds[0].train == make_fold_plan(samples, 10, 42).folds[0].train);
  CHECK(again.folds[0].train != other.folds[0].train);

  CHECK_THROWS_AS(make_fold_plan(samples, 50, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_fold_plan(samples, 0, 1), std::invalid_argument);
}

TEST_CASE("mean validation error is the fold average") {
  CHECK(mean_validation_error({0.1, 0.2}) == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(mean_validation_error({0.37}) == doctest::Approx(0.37));
  CHECK(mean_validation_error({0, 0, 0, 0, 0}) == 0.0);
  CHECK_THROWS_AS(mean_validation_error({}), std::invalid_argument);
}

TEST_CASE("fold plan serialization lists every membership") {
  const auto samples = load_iris_file("data/iris.csv");
  const FoldPlan plan = make_fold_plan(samples, 30, 1);
  const std::string csv = fold_plan_csv(plan);
  CHECK(csv.rfind("fold_id,role,sample_index\n", 0) == 0);
  std::size_t rows = 0;
  for (char ch : csv)
    if (ch == '\n') ++rows;
  CHECK(rows == 1 + 150); // header + one row per sample for K=1
}
