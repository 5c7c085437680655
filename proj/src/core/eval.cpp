#include "core/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include "core/rng.hpp"

namespace paikit {

long ConfusionMatrix::total() const {
  long t = 0;
  for (const auto& row : counts)
    for (long c : row) t += c;
  return t;
}

long ConfusionMatrix::trace() const {
  long t = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
  return t;
}

void ConfusionMatrix::add(const ConfusionMatrix& other) {
  if (labels != other.labels) {
    fail(ErrorKind::Validation, "cannot add confusion matrices over "
                                "different vocabularies");
  }
  for (std::size_t i = 0; i < counts.size(); ++i)
    for (std::size_t j = 0; j < counts.size(); ++j)
      counts[i][j] += other.counts[i][j];
}

ConfusionMatrix confusion_matrix(const std::vector<std::string>& true_labels,
                                 const std::vector<std::string>& predicted,
                                 const std::vector<std::string>& vocab) {
  if (true_labels.size() != predicted.size()) {
    fail(ErrorKind::Validation, "label sequences differ in length");
  }
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < vocab.size(); ++i)
    index[vocab[i]] = static_cast<int>(i);
  ConfusionMatrix cm;
  cm.labels = vocab;
  cm.counts.assign(vocab.size(), std::vector<long>(vocab.size(), 0));
  for (std::size_t i = 0; i < true_labels.size(); ++i) {
    const auto it_t = index.find(true_labels[i]);
    const auto it_p = index.find(predicted[i]);
    if (it_t == index.end()) {
      fail(ErrorKind::Validation,
           "true label '" + true_labels[i] + "' not in vocabulary");
    }
    if (it_p == index.end()) {
      fail(ErrorKind::Validation,
           "predicted label '" + predicted[i] + "' not in vocabulary");
    }
    cm.counts[it_t->second][it_p->second]++;
  }
  return cm;
}

double f1_score(long n_tp, long n_fp, long n_fn) {
  if (n_tp < 0 || n_fp < 0 || n_fn < 0) {
    fail(ErrorKind::Validation, "negative count");
  }
  if (n_tp == 0 && n_fp == 0 && n_fn == 0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double p = (n_tp + n_fp) > 0
                       ? static_cast<double>(n_tp) / (n_tp + n_fp)
                       : 0.0;
  const double r = (n_tp + n_fn) > 0
                       ? static_cast<double>(n_tp) / (n_tp + n_fn)
                       : 0.0;
  if (p + r == 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

ScoreReport score_report(const ConfusionMatrix& cm) {
  const std::size_t k = cm.labels.size();
  ScoreReport rep;
  double f1_sum = 0.0;
  int f1_defined = 0;
  for (std::size_t i = 0; i < k; ++i) {
    long tp = cm.counts[i][i];
    long fn = 0, fp = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if (j != i) {
        fn += cm.counts[i][j];
        fp += cm.counts[j][i];
      }
    }
    ClassScore s;
    s.label = cm.labels[i];
    s.support = tp + fn;
    s.precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    s.recall = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    const double f1 = f1_score(tp, fp, fn);
    if (std::isnan(f1)) {
      s.defined = false;
      s.f1 = 0.0;
    } else {
      s.f1 = f1;
      f1_sum += f1;
      ++f1_defined;
    }
    rep.per_class.push_back(std::move(s));
  }
  rep.macro_f1 = f1_defined > 0 ? f1_sum / f1_defined : 0.0;
  return rep;
}

std::vector<FoldSplit> stratified_kfold(const std::vector<std::string>& labels,
                                        const CvPlan& plan) {
  if (plan.n_folds < 2) {
    fail(ErrorKind::Config, "need at least 2 folds");
  }
  if (plan.n_repeats < 1) {
    fail(ErrorKind::Config, "n_repeats must be >= 1");
  }
  std::map<std::string, std::vector<int>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[labels[i]].push_back(static_cast<int>(i));
  }
  for (const auto& [label, idx] : by_class) {
    if (static_cast<int>(idx.size()) < plan.n_folds) {
      fail(ErrorKind::Validation,
           "class '" + label + "' has " + std::to_string(idx.size()) +
               " samples, fewer than " + std::to_string(plan.n_folds) +
               " folds");
    }
  }

  Rng rng(plan.seed);
  std::vector<FoldSplit> out;
  out.reserve(static_cast<std::size_t>(plan.n_folds) * plan.n_repeats);
  const std::size_t n = labels.size();
  for (int rep = 0; rep < plan.n_repeats; ++rep) {
    std::vector<std::vector<int>> fold_members(plan.n_folds);
    for (auto& [label, idx] : by_class) {
      std::vector<int> shuffled = idx;
      rng.shuffle(shuffled);
      const std::size_t m = shuffled.size();
      for (int f = 0; f < plan.n_folds; ++f) {
        const std::size_t lo = f * m / plan.n_folds;
        const std::size_t hi = (f + 1) * m / plan.n_folds;
        for (std::size_t i = lo; i < hi; ++i) {
          fold_members[f].push_back(shuffled[i]);
        }
      }
    }
    std::vector<int> fold_of(n, -1);
    for (int f = 0; f < plan.n_folds; ++f) {
      for (int i : fold_members[f]) fold_of[i] = f;
    }
    for (int f = 0; f < plan.n_folds; ++f) {
      FoldSplit split;
      for (std::size_t i = 0; i < n; ++i) {
        if (fold_of[i] == f) {
          split.test_indices.push_back(static_cast<int>(i));
        } else {
          split.train_indices.push_back(static_cast<int>(i));
        }
      }
      out.push_back(std::move(split));
    }
  }
  return out;
}

FoldResult train_eval_fold(const MlpConfig& config,
                           const Eigen::MatrixXd& raw_rows,
                           const std::vector<std::string>& labels,
                           const std::vector<std::string>& vocab,
                           const FoldSplit& split) {
  const auto take = [&](const std::vector<int>& idx, Eigen::MatrixXd& x,
                        std::vector<std::string>& y) {
    x.resize(static_cast<Eigen::Index>(idx.size()), raw_rows.cols());
    y.clear();
    y.reserve(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      x.row(static_cast<Eigen::Index>(i)) = raw_rows.row(idx[i]);
      y.push_back(labels[idx[i]]);
    }
  };

  Eigen::MatrixXd x_train;
  std::vector<std::string> y_train;
  take(split.train_indices, x_train, y_train);

  FoldResult res;
  res.model = train(config, x_train, y_train).first;

  std::vector<std::string> y_true, y_pred;
  y_true.reserve(split.test_indices.size());
  y_pred.reserve(split.test_indices.size());
  for (int i : split.test_indices) {
    y_true.push_back(labels[i]);
    y_pred.push_back(predict(res.model, raw_rows.row(i).transpose()).first);
  }
  res.confusion = confusion_matrix(y_true, y_pred, vocab);
  res.scores = score_report(res.confusion);
  return res;
}

EvalReport cross_validate(const MlpConfig& config,
                          const Eigen::MatrixXd& raw_rows,
                          const std::vector<std::string>& labels,
                          const CvPlan& plan, int jobs) {
  const std::vector<FoldSplit> splits = stratified_kfold(labels, plan);

  std::vector<std::string> vocab;
  {
    std::map<std::string, int> uniq;
    for (const auto& l : labels) uniq[l] = 1;
    for (const auto& [l, _] : uniq) vocab.push_back(l);
  }

  std::vector<FoldResult> results(splits.size());
  std::vector<std::string> errors(splits.size());
  const int workers = std::max(1, std::min<int>(jobs,
      static_cast<int>(splits.size())));

  const auto run_range = [&](std::size_t worker) {
    for (std::size_t f = worker; f < splits.size(); f += workers) {
      MlpConfig fold_config = config;
      fold_config.rng_seed = plan.seed + static_cast<std::uint64_t>(f);
      fold_config.output_classes = static_cast<int>(vocab.size());
      try {
        results[f] = train_eval_fold(fold_config, raw_rows, labels, vocab,
                                     splits[f]);
      } catch (const std::exception& e) {
        errors[f] = e.what();
      }
    }
  };

  if (workers == 1) {
    run_range(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_range, w);
    for (auto& t : pool) t.join();
  }
  for (const std::string& e : errors) {
    if (!e.empty()) fail(ErrorKind::Optimizer, "fold failed: " + e);
  }

  EvalReport rep;
  rep.summed_confusion.labels = vocab;
  rep.summed_confusion.counts.assign(vocab.size(),
                                     std::vector<long>(vocab.size(), 0));
  double sum = 0.0, sumsq = 0.0;
  for (const FoldResult& r : results) {
    rep.fold_scores.push_back(r.scores);
    rep.fold_confusions.push_back(r.confusion);
    rep.summed_confusion.add(r.confusion);
    sum += r.scores.macro_f1;
    sumsq += r.scores.macro_f1 * r.scores.macro_f1;
  }
  const double k = static_cast<double>(results.size());
  rep.mean_macro_f1 = sum / k;
  rep.std_macro_f1 =
      k > 1 ? std::sqrt(std::max(0.0, (sumsq - sum * sum / k) / (k - 1)))
            : 0.0;
  return rep;
}

}  // namespace paikit
