#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "core/mlp.hpp"

namespace paikit {

// K x K table of counts; rows are true labels, columns predicted,
// both in vocabulary order.
struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<long>> counts;

  long total() const;
  long trace() const;
  void add(const ConfusionMatrix& other);
};

ConfusionMatrix confusion_matrix(const std::vector<std::string>& true_labels,
                                 const std::vector<std::string>& predicted,
                                 const std::vector<std::string>& vocab);

// Harmonic-mean F1 from raw counts. 0 when precision + recall is 0;
// NaN (undefined-score sentinel) when tp, fp and fn are all zero.
double f1_score(long n_tp, long n_fp, long n_fn);

struct ClassScore {
  std::string label;
  long support = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool defined = true;  // false when the class never occurs at all
};

struct ScoreReport {
  std::vector<ClassScore> per_class;
  double macro_f1 = 0.0;  // mean over classes with defined F1
};

ScoreReport score_report(const ConfusionMatrix& cm);

struct CvPlan {
  int n_folds = 10;
  int n_repeats = 1;
  std::uint64_t seed = 0;
};

struct FoldSplit {
  std::vector<int> train_indices;
  std::vector<int> test_indices;
};

// Stratified partition: per-fold class proportions match the global
// proportions within one sample; folds are disjoint and cover the data.
// Each repeat reshuffles. Deterministic given plan.seed.
std::vector<FoldSplit> stratified_kfold(const std::vector<std::string>& labels,
                                        const CvPlan& plan);

struct FoldResult {
  MlpModel model;
  ConfusionMatrix confusion;
  ScoreReport scores;
};

// Trains on the train split (scaler fitted there only) and scores the
// test split. Exposed so leakage properties can be checked directly.
FoldResult train_eval_fold(const MlpConfig& config,
                           const Eigen::MatrixXd& raw_rows,
                           const std::vector<std::string>& labels,
                           const std::vector<std::string>& vocab,
                           const FoldSplit& split);

struct EvalReport {
  std::vector<ScoreReport> fold_scores;
  std::vector<ConfusionMatrix> fold_confusions;
  ConfusionMatrix summed_confusion;
  double mean_macro_f1 = 0.0;
  double std_macro_f1 = 0.0;  // sample standard deviation over folds
};

// Fresh model per fold with rng_seed = plan.seed + global fold index.
// Folds may be trained concurrently (jobs > 1); aggregation is ordered.
EvalReport cross_validate(const MlpConfig& config,
                          const Eigen::MatrixXd& raw_rows,
                          const std::vector<std::string>& labels,
                          const CvPlan& plan, int jobs = 1);

}  // namespace paikit
