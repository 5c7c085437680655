#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "core/eval.hpp"
#include "core/rng.hpp"

using namespace paikit;

TEST_CASE("confusion matrix for perfect predictions is diagonal") {
  const std::vector<std::string> vocab = {"a", "b", "c"};
  const std::vector<std::string> truth = {"a", "b", "c", "a", "b", "c"};
  const ConfusionMatrix cm = confusion_matrix(truth, truth, vocab);
  CHECK(cm.trace() == 6);
  CHECK(cm.total() == 6);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(cm.counts[i][j] == (i == j ? 2 : 0));
    }
  }
}

TEST_CASE("all predictions in one class fill a single column") {
  const std::vector<std::string> vocab = {"x", "y"};
  const std::vector<std::string> truth = {"x", "y", "x", "y", "y"};
  const std::vector<std::string> pred(5, "x");
  const ConfusionMatrix cm = confusion_matrix(truth, pred, vocab);
  CHECK(cm.counts[0][0] == 2);
  CHECK(cm.counts[1][0] == 3);
  CHECK(cm.counts[0][1] == 0);
  CHECK(cm.counts[1][1] == 0);
}

TEST_CASE("binary confusion matches the tp/fn/fp/tn layout") {
  // tp=8 fn=2 fp=3 tn=7 with "pos" listed first
  const std::vector<std::string> vocab = {"pos", "neg"};
  std::vector<std::string> truth, pred;
  for (int i = 0; i < 8; ++i) { truth.push_back("pos"); pred.push_back("pos"); }
  for (int i = 0; i < 2; ++i) { truth.push_back("pos"); pred.push_back("neg"); }
  for (int i = 0; i < 3; ++i) { truth.push_back("neg"); pred.push_back("pos"); }
  for (int i = 0; i < 7; ++i) { truth.push_back("neg"); pred.push_back("neg"); }
  const ConfusionMatrix cm = confusion_matrix(truth, pred, vocab);
  CHECK(cm.counts[0][0] == 8);
  CHECK(cm.counts[0][1] == 2);
  CHECK(cm.counts[1][0] == 3);
  CHECK(cm.counts[1][1] == 7);
}

TEST_CASE("labels outside the vocabulary are rejected") {
  CHECK_THROWS_AS(confusion_matrix({"a"}, {"z"}, {"a", "b"}), Error);
  CHECK_THROWS_AS(confusion_matrix({"z"}, {"a"}, {"a", "b"}), Error);
  CHECK_THROWS_AS(confusion_matrix({"a", "b"}, {"a"}, {"a", "b"}), Error);
}

TEST_CASE("f1 score basics") {
  CHECK(f1_score(10, 0, 0) == doctest::Approx(1.0));
  CHECK(f1_score(8, 2, 2) == doctest::Approx(0.8));
  CHECK(f1_score(0, 5, 5) == doctest::Approx(0.0));
  CHECK(std::isnan(f1_score(0, 0, 0)));
  CHECK_THROWS_AS(f1_score(-1, 0, 0), Error);
}

TEST_CASE("f1 is the harmonic mean and is symmetric in fp and fn") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const long tp = static_cast<long>(rng.index(20));
    const long fp = static_cast<long>(rng.index(20));
    const long fn = static_cast<long>(rng.index(20));
    if (tp + fp + fn == 0) continue;
    const double f = f1_score(tp, fp, fn);
    CHECK(f1_score(tp, fn, fp) == doctest::Approx(f).epsilon(1e-12));
    const double p = tp + fp > 0 ? double(tp) / (tp + fp) : 0.0;
    const double r = tp + fn > 0 ? double(tp) / (tp + fn) : 0.0;
    if (p + r > 0) {
      CHECK(f == doctest::Approx(2 * p * r / (p + r)).epsilon(1e-12));
    } else {
      CHECK(f == doctest::Approx(0.0));
    }
    CHECK((f == 1.0) == (fp == 0 && fn == 0 && tp > 0));
  }
}

TEST_CASE("score report row sums, accuracy and macro average") {
  const std::vector<std::string> vocab = {"a", "b"};
  const std::vector<std::string> truth = {"a", "a", "a", "b", "b", "b"};
  const std::vector<std::string> pred = {"a", "a", "b", "b", "b", "a"};
  const ConfusionMatrix cm = confusion_matrix(truth, pred, vocab);
  long row0 = cm.counts[0][0] + cm.counts[0][1];
  CHECK(row0 == 3);  // class support
  const ScoreReport rep = score_report(cm);
  CHECK(rep.per_class[0].support == 3);
  CHECK(rep.per_class[1].support == 3);
  CHECK(rep.macro_f1 ==
        doctest::Approx((rep.per_class[0].f1 + rep.per_class[1].f1) / 2));
  CHECK(static_cast<double>(cm.trace()) / cm.total() ==
        doctest::Approx(4.0 / 6.0));
}

TEST_CASE("macro average skips classes that never occur") {
  // vocabulary contains "ghost" with no true or predicted samples
  const std::vector<std::string> vocab = {"a", "b", "ghost"};
  const std::vector<std::string> truth = {"a", "b", "a", "b"};
  const std::vector<std::string> pred = {"a", "b", "b", "a"};
  const ScoreReport rep = score_report(confusion_matrix(truth, pred, vocab));
  CHECK_FALSE(rep.per_class[2].defined);
  CHECK(rep.macro_f1 ==
        doctest::Approx((rep.per_class[0].f1 + rep.per_class[1].f1) / 2));
}

TEST_CASE("stratified folds on balanced data are balanced") {
  std::vector<std::string> labels;
  for (int i = 0; i < 100; ++i) labels.push_back(i % 2 ? "m" : "f");
  CvPlan plan;
  plan.n_folds = 10;
  plan.seed = 4;
  const auto splits = stratified_kfold(labels, plan);
  REQUIRE(splits.size() == 10);
  for (const FoldSplit& s : splits) {
    CHECK(s.test_indices.size() == 10);
    CHECK(s.train_indices.size() == 90);
    int f = 0, m = 0;
    for (int i : s.test_indices) (labels[i] == "f" ? f : m)++;
    CHECK(f == 5);
    CHECK(m == 5);
  }
}

TEST_CASE("folds partition the dataset") {
  Rng rng(6);
  std::vector<std::string> labels;
  for (int i = 0; i < 173; ++i) {
    labels.push_back(std::to_string(rng.index(3)));
  }
  CvPlan plan;
  plan.n_folds = 7;
  plan.seed = 11;
  plan.n_repeats = 2;
  const auto splits = stratified_kfold(labels, plan);
  REQUIRE(splits.size() == 14);
  for (int rep = 0; rep < 2; ++rep) {
    std::set<int> seen;
    for (int f = 0; f < 7; ++f) {
      const FoldSplit& s = splits[rep * 7 + f];
      for (int i : s.test_indices) {
        CHECK(seen.insert(i).second);  // disjoint
      }
      // train and test are complementary
      CHECK(s.train_indices.size() + s.test_indices.size() == labels.size());
      const std::set<int> train_set(s.train_indices.begin(),
                                    s.train_indices.end());
      for (int i : s.test_indices) CHECK(train_set.count(i) == 0);
      // per-fold class proportions within one sample of the global share
      for (const char* cls : {"0", "1", "2"}) {
        const long total =
            std::count(labels.begin(), labels.end(), std::string(cls));
        long in_fold = 0;
        for (int i : s.test_indices) {
          if (labels[i] == cls) ++in_fold;
        }
        const double expected =
            static_cast<double>(total) / plan.n_folds;
        CHECK(std::fabs(in_fold - expected) <= 1.0);
      }
    }
    CHECK(seen.size() == labels.size());  // coverage
  }
}

TEST_CASE("fold assignment is deterministic per seed") {
  std::vector<std::string> labels;
  for (int i = 0; i < 60; ++i) labels.push_back(i % 2 ? "x" : "y");
  CvPlan plan;
  plan.n_folds = 5;
  plan.seed = 21;
  const auto a = stratified_kfold(labels, plan);
  const auto b = stratified_kfold(labels, plan);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].test_indices == b[i].test_indices);
  }
  plan.seed = 22;
  const auto c = stratified_kfold(labels, plan);
  bool any_difference = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].test_indices != c[i].test_indices) any_difference = true;
  }
  CHECK(any_difference);
}

TEST_CASE("classes smaller than the fold count are rejected") {
  std::vector<std::string> labels(30, "big");
  labels[0] = "tiny";
  labels[1] = "tiny";
  CvPlan plan;
  plan.n_folds = 10;
  CHECK_THROWS_WITH_AS(stratified_kfold(labels, plan),
                       doctest::Contains("tiny"), Error);
}

namespace {

void blob_data(int n, double gap, Eigen::MatrixXd& x,
               std::vector<std::string>& labels, Rng& rng) {
  x.resize(n, 5);
  labels.clear();
  for (int i = 0; i < n; ++i) {
    const bool pos = i % 2 == 1;
    for (int j = 0; j < 5; ++j) x(i, j) = rng.normal();
    x(i, 0) += pos ? gap : 0.0;
    labels.push_back(pos ? "b" : "a");
  }
}

MlpConfig small_config(int epochs, int input_dim = 5) {
  MlpConfig c;
  c.input_dim = input_dim;
  c.hidden_neurons = 12;
  c.output_classes = 2;
  c.epochs = epochs;
  return c;
}

}  // namespace

TEST_CASE("cross validation on separable data scores highly") {
  Rng rng(31);
  Eigen::MatrixXd x;
  std::vector<std::string> labels;
  blob_data(200, 8.0, x, labels, rng);
  CvPlan plan;
  plan.seed = 3;
  const EvalReport rep = cross_validate(small_config(80), x, labels, plan, 2);
  CHECK(rep.mean_macro_f1 >= 0.95);
  CHECK(rep.summed_confusion.total() == 200);
  CHECK(rep.fold_scores.size() == 10);
}

TEST_CASE("cross validation on no-signal data stays near chance") {
  Rng rng(33);
  Eigen::MatrixXd x;
  std::vector<std::string> labels;
  blob_data(300, 0.0, x, labels, rng);
  CvPlan plan;
  plan.seed = 5;
  const EvalReport rep = cross_validate(small_config(60), x, labels, plan, 2);
  CHECK(rep.mean_macro_f1 >= 0.40);
  CHECK(rep.mean_macro_f1 <= 0.60);
}

TEST_CASE("each sample is tested exactly once per repeat") {
  Rng rng(37);
  Eigen::MatrixXd x;
  std::vector<std::string> labels;
  blob_data(120, 3.0, x, labels, rng);
  CvPlan plan;
  plan.seed = 1;
  plan.n_repeats = 2;
  const EvalReport rep = cross_validate(small_config(10), x, labels, plan, 2);
  CHECK(rep.summed_confusion.total() == 240);
  CHECK(rep.fold_scores.size() == 20);
}

TEST_CASE("parallel and serial cross validation agree bit-for-bit") {
  Rng rng(41);
  Eigen::MatrixXd x;
  std::vector<std::string> labels;
  blob_data(100, 2.0, x, labels, rng);
  CvPlan plan;
  plan.seed = 17;
  const EvalReport serial = cross_validate(small_config(15), x, labels, plan, 1);
  const EvalReport parallel =
      cross_validate(small_config(15), x, labels, plan, 4);
  CHECK(serial.mean_macro_f1 == parallel.mean_macro_f1);
  CHECK(serial.std_macro_f1 == parallel.std_macro_f1);
  CHECK(serial.summed_confusion.counts == parallel.summed_confusion.counts);
}

TEST_CASE("test-fold poisoning cannot leak into training statistics") {
  Rng rng(43);
  Eigen::MatrixXd x;
  std::vector<std::string> labels;
  blob_data(100, 4.0, x, labels, rng);
  CvPlan plan;
  plan.seed = 9;
  const auto splits = stratified_kfold(labels, plan);
  const FoldSplit& split = splits[0];

  MlpConfig config = small_config(20);
  config.rng_seed = 123;
  const std::vector<std::string> vocab = {"a", "b"};
  const FoldResult clean = train_eval_fold(config, x, labels, vocab, split);

  Eigen::MatrixXd poisoned = x;
  for (int i : split.test_indices) {
    poisoned.row(i) *= 1000.0;  // absurd test-fold rescaling
  }
  const FoldResult dirty = train_eval_fold(config, poisoned, labels, vocab,
                                           split);
  // normalization and weights are fitted on the train split only
  CHECK((clean.model.scaler.mean.array() ==
         dirty.model.scaler.mean.array()).all());
  CHECK((clean.model.scaler.std.array() ==
         dirty.model.scaler.std.array()).all());
  CHECK((clean.model.params.w1.array() ==
         dirty.model.params.w1.array()).all());
  CHECK((clean.model.params.w2.array() ==
         dirty.model.params.w2.array()).all());
}
