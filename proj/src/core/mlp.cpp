#include "core/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "core/rng.hpp"

namespace paikit {

using json = nlohmann::ordered_json;

void MlpConfig::validate() const {
  if (input_dim <= 0 || hidden_neurons <= 0 || output_classes < 2 ||
      epochs <= 0 || batch_size <= 0) {
    fail(ErrorKind::Config, "MlpConfig: dimensions and epochs must be positive"
                            " and output_classes >= 2");
  }
  if (!(learning_rate > 0.0) || !(beta1 > 0.0 && beta1 < 1.0) ||
      !(beta2 > 0.0 && beta2 <= 1.0) || !(epsilon > 0.0)) {
    fail(ErrorKind::Config, "MlpConfig: invalid optimizer constants");
  }
}

MlpParams MlpParams::zeros_like(const MlpParams& other) {
  MlpParams p;
  p.w1 = Eigen::MatrixXd::Zero(other.w1.rows(), other.w1.cols());
  p.b1 = Eigen::VectorXd::Zero(other.b1.size());
  p.w2 = Eigen::MatrixXd::Zero(other.w2.rows(), other.w2.cols());
  p.b2 = Eigen::VectorXd::Zero(other.b2.size());
  return p;
}

FeatureScaler FeatureScaler::fit(const Eigen::MatrixXd& rows) {
  const Eigen::Index n = rows.rows();
  const Eigen::Index d = rows.cols();
  if (n == 0) fail(ErrorKind::Validation, "cannot fit scaler on empty data");
  FeatureScaler s;
  s.mean = rows.colwise().mean();
  s.std = Eigen::VectorXd::Ones(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double var =
        (rows.col(j).array() - s.mean(j)).square().sum() / n;
    const double sd = std::sqrt(var);
    if (sd > 0.0) {
      s.std(j) = sd;
    } else {
      s.constant_features.push_back(static_cast<int>(j));
    }
  }
  return s;
}

Eigen::VectorXd FeatureScaler::apply(const Eigen::VectorXd& raw) const {
  return (raw - mean).cwiseQuotient(std);
}

Eigen::MatrixXd FeatureScaler::apply_rows(const Eigen::MatrixXd& rows) const {
  return (rows.rowwise() - mean.transpose()).array().rowwise() /
         std.transpose().array();
}

namespace {

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
  return 1.0 / (1.0 + (-z.array()).exp());
}

// columnwise softmax, shifted by the column max for stability
Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const Eigen::ArrayXd shifted =
        logits.col(c).array() - logits.col(c).maxCoeff();
    const Eigen::ArrayXd e = shifted.exp();
    p.col(c) = e / e.sum();
  }
  return p;
}

void check_batch(const MlpParams& params, const Eigen::MatrixXd& scaled,
                 const std::vector<int>& labels) {
  if (scaled.cols() == 0) {
    fail(ErrorKind::Validation, "empty batch");
  }
  if (scaled.rows() != params.w1.cols()) {
    fail(ErrorKind::Shape,
         "feature dimension " + std::to_string(scaled.rows()) +
             " does not match model input " + std::to_string(params.w1.cols()));
  }
  if (static_cast<Eigen::Index>(labels.size()) != scaled.cols()) {
    fail(ErrorKind::Validation, "labels/batch size mismatch");
  }
  const int k = static_cast<int>(params.w2.rows());
  for (int y : labels) {
    if (y < 0 || y >= k) {
      fail(ErrorKind::Validation, "label index out of vocabulary");
    }
  }
}

struct ForwardCache {
  Eigen::MatrixXd hidden;  // sigmoid activations, hidden x batch
  Eigen::MatrixXd probs;   // softmax outputs, classes x batch
  Eigen::MatrixXd logits;  // classes x batch
};

ForwardCache forward_batch(const MlpParams& params,
                           const Eigen::MatrixXd& scaled) {
  ForwardCache c;
  c.hidden =
      sigmoid((params.w1 * scaled).colwise() + params.b1);
  c.logits = (params.w2 * c.hidden).colwise() + params.b2;
  c.probs = softmax_columns(c.logits);
  return c;
}

double loss_from_cache(const ForwardCache& c, const std::vector<int>& labels) {
  const Eigen::Index b = c.logits.cols();
  double total = 0.0;
  for (Eigen::Index i = 0; i < b; ++i) {
    // -log p[y] computed from logits via logsumexp
    const double mx = c.logits.col(i).maxCoeff();
    const double lse =
        mx + std::log((c.logits.col(i).array() - mx).exp().sum());
    total += lse - c.logits(labels[i], i);
  }
  return total / static_cast<double>(b);
}

MlpParams gradients_from_cache(const MlpParams& params,
                               const Eigen::MatrixXd& scaled,
                               const ForwardCache& c,
                               const std::vector<int>& labels) {
  const Eigen::Index b = scaled.cols();
  Eigen::MatrixXd dlogits = c.probs;
  for (Eigen::Index i = 0; i < b; ++i) dlogits(labels[i], i) -= 1.0;
  dlogits /= static_cast<double>(b);

  MlpParams g;
  g.w2 = dlogits * c.hidden.transpose();
  g.b2 = dlogits.rowwise().sum();
  const Eigen::MatrixXd dhidden = params.w2.transpose() * dlogits;
  const Eigen::MatrixXd dz1 =
      dhidden.array() * c.hidden.array() * (1.0 - c.hidden.array());
  g.w1 = dz1 * scaled.transpose();
  g.b1 = dz1.rowwise().sum();
  return g;
}

}  // namespace

Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& raw) {
  if (raw.size() != model.config.input_dim) {
    fail(ErrorKind::Shape,
         "expected " + std::to_string(model.config.input_dim) +
             " features, got " + std::to_string(raw.size()));
  }
  if (!raw.allFinite()) {
    fail(ErrorKind::Validation, "non-finite feature in input");
  }
  const Eigen::VectorXd scaled = model.scaler.apply(raw);
  return forward_batch(model.params, scaled).probs.col(0);
}

double batch_loss(const MlpParams& params, const Eigen::MatrixXd& scaled,
                  const std::vector<int>& labels) {
  check_batch(params, scaled, labels);
  return loss_from_cache(forward_batch(params, scaled), labels);
}

MlpParams backward(const MlpParams& params, const Eigen::MatrixXd& scaled,
                   const std::vector<int>& labels) {
  check_batch(params, scaled, labels);
  const ForwardCache c = forward_batch(params, scaled);
  return gradients_from_cache(params, scaled, c, labels);
}

AdamaxState AdamaxState::zeros_like(const MlpParams& params) {
  AdamaxState s;
  s.m = MlpParams::zeros_like(params);
  s.u = MlpParams::zeros_like(params);
  return s;
}

namespace {

template <typename Mat>
void adamax_update_one(Mat& theta, const Mat& g, Mat& m, Mat& u, double step,
                       double beta1, double beta2, double eps) {
  if (!g.allFinite()) {
    fail(ErrorKind::Optimizer, "non-finite gradient");
  }
  m = beta1 * m + (1.0 - beta1) * g;
  u = (beta2 * u).cwiseMax(g.cwiseAbs());
  theta.array() -= step * m.array() / (u.array() + eps);
}

}  // namespace

void adamax_step(MlpParams& params, const MlpParams& grads, AdamaxState& state,
                 int t, double lr, double beta1, double beta2, double eps) {
  if (t < 1) fail(ErrorKind::Config, "adamax step index must be >= 1");
  const double step = lr / (1.0 - std::pow(beta1, t));
  adamax_update_one(params.w1, grads.w1, state.m.w1, state.u.w1, step, beta1,
                    beta2, eps);
  adamax_update_one(params.b1, grads.b1, state.m.b1, state.u.b1, step, beta1,
                    beta2, eps);
  adamax_update_one(params.w2, grads.w2, state.m.w2, state.u.w2, step, beta1,
                    beta2, eps);
  adamax_update_one(params.b2, grads.b2, state.m.b2, state.u.b2, step, beta1,
                    beta2, eps);
}

namespace {

Eigen::MatrixXd glorot_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = rng.uniform(-limit, limit);
    }
  }
  return m;
}

}  // namespace

std::pair<MlpModel, TrainLog> train(const MlpConfig& config,
                                    const Eigen::MatrixXd& raw_rows,
                                    const std::vector<std::string>& labels) {
  config.validate();
  const Eigen::Index n = raw_rows.rows();
  if (n == 0) fail(ErrorKind::Validation, "empty training set");
  if (raw_rows.cols() != config.input_dim) {
    fail(ErrorKind::Shape, "training data has " +
                               std::to_string(raw_rows.cols()) +
                               " features, config expects " +
                               std::to_string(config.input_dim));
  }
  if (!raw_rows.allFinite()) {
    fail(ErrorKind::Validation, "non-finite feature in training data");
  }
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    fail(ErrorKind::Validation, "label count does not match rows");
  }

  const std::set<std::string> vocab_set(labels.begin(), labels.end());
  if (vocab_set.size() < 2) {
    fail(ErrorKind::Validation,
         "training data contains a single class: '" + *vocab_set.begin() +
             "'");
  }
  if (static_cast<int>(vocab_set.size()) != config.output_classes) {
    fail(ErrorKind::Config,
         "config.output_classes=" + std::to_string(config.output_classes) +
             " but data has " + std::to_string(vocab_set.size()) +
             " classes");
  }

  MlpModel model;
  model.config = config;
  model.label_vocab.assign(vocab_set.begin(), vocab_set.end());
  std::map<std::string, int> label_index;
  for (std::size_t i = 0; i < model.label_vocab.size(); ++i) {
    label_index[model.label_vocab[i]] = static_cast<int>(i);
  }
  std::vector<int> y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = label_index[labels[i]];

  model.scaler = FeatureScaler::fit(raw_rows);
  // samples stored column-wise for the batch kernels
  const Eigen::MatrixXd x =
      model.scaler.apply_rows(raw_rows).transpose();

  Rng rng(config.rng_seed);
  const int k = config.output_classes;
  model.params.w1 = glorot_uniform(config.hidden_neurons, config.input_dim, rng);
  model.params.b1 = Eigen::VectorXd::Zero(config.hidden_neurons);
  model.params.w2 = glorot_uniform(k, config.hidden_neurons, rng);
  model.params.b2 = Eigen::VectorXd::Zero(k);

  AdamaxState state = AdamaxState::zeros_like(model.params);
  TrainLog log;
  log.seed = config.rng_seed;
  log.loss.reserve(config.epochs);
  log.accuracy.reserve(config.epochs);

  std::vector<int> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = static_cast<int>(i);

  int t = 0;
  Eigen::MatrixXd xb;
  std::vector<int> yb;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    long correct = 0;
    for (Eigen::Index start = 0; start < n; start += config.batch_size) {
      const Eigen::Index bsz = std::min<Eigen::Index>(config.batch_size,
                                                      n - start);
      xb.resize(config.input_dim, bsz);
      yb.resize(bsz);
      for (Eigen::Index i = 0; i < bsz; ++i) {
        xb.col(i) = x.col(order[start + i]);
        yb[i] = y[order[start + i]];
      }

      const ForwardCache cache = forward_batch(model.params, xb);
      epoch_loss += loss_from_cache(cache, yb) * static_cast<double>(bsz);
      for (Eigen::Index i = 0; i < bsz; ++i) {
        Eigen::Index arg = 0;
        cache.probs.col(i).maxCoeff(&arg);
        if (static_cast<int>(arg) == yb[i]) ++correct;
      }

      const MlpParams g = gradients_from_cache(model.params, xb, cache, yb);
      adamax_step(model.params, g, state, ++t, config.learning_rate,
                  config.beta1, config.beta2, config.epsilon);
    }
    epoch_loss /= static_cast<double>(n);
    if (!std::isfinite(epoch_loss)) {
      fail(ErrorKind::Optimizer,
           "non-finite training loss at epoch " + std::to_string(epoch + 1));
    }
    log.loss.push_back(epoch_loss);
    log.accuracy.push_back(static_cast<double>(correct) /
                           static_cast<double>(n));
  }
  return {std::move(model), std::move(log)};
}

std::pair<std::string, Eigen::VectorXd> predict(const MlpModel& model,
                                                const Eigen::VectorXd& raw) {
  const Eigen::VectorXd probs = forward(model, raw);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < probs.size(); ++i) {
    if (probs(i) > probs(best)) best = i;  // ties keep the lowest index
  }
  return {model.label_vocab[static_cast<std::size_t>(best)], probs};
}

namespace {

constexpr int kModelFormatVersion = 1;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Eigen::MatrixXd(0, 0);
  const Eigen::Index cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j.at(r);
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      fail(ErrorKind::Parse, "ragged weight matrix in model file");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = row.at(c).get<double>();
    }
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j.at(i).get<double>();
  return v;
}

}  // namespace

void save_model(const MlpModel& model, const std::string& path) {
  json j;
  j["format"] = "paikit-mlp";
  j["version"] = kModelFormatVersion;
  j["config"] = {{"input_dim", model.config.input_dim},
                 {"hidden_neurons", model.config.hidden_neurons},
                 {"output_classes", model.config.output_classes},
                 {"epochs", model.config.epochs},
                 {"learning_rate", model.config.learning_rate},
                 {"beta1", model.config.beta1},
                 {"beta2", model.config.beta2},
                 {"epsilon", model.config.epsilon},
                 {"batch_size", model.config.batch_size},
                 {"rng_seed", model.config.rng_seed}};
  j["label_vocab"] = model.label_vocab;
  j["scaler"] = {{"mean", vector_to_json(model.scaler.mean)},
                 {"std", vector_to_json(model.scaler.std)},
                 {"constant_features", model.scaler.constant_features}};
  j["w1"] = matrix_to_json(model.params.w1);
  j["b1"] = vector_to_json(model.params.b1);
  j["w2"] = matrix_to_json(model.params.w2);
  j["b2"] = vector_to_json(model.params.b2);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorKind::Io, "write failed for " + path);
}

MlpModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path + " for reading");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, "invalid model file " + path + ": " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "paikit-mlp") {
      fail(ErrorKind::Parse, path + " is not a model file");
    }
    if (j.at("version").get<int>() != kModelFormatVersion) {
      fail(ErrorKind::Unsupported,
           "model format version " + j.at("version").dump() +
               " is not supported (expected " +
               std::to_string(kModelFormatVersion) + ")");
    }
    MlpModel m;
    const json& c = j.at("config");
    m.config.input_dim = c.at("input_dim").get<int>();
    m.config.hidden_neurons = c.at("hidden_neurons").get<int>();
    m.config.output_classes = c.at("output_classes").get<int>();
    m.config.epochs = c.at("epochs").get<int>();
    m.config.learning_rate = c.at("learning_rate").get<double>();
    m.config.beta1 = c.at("beta1").get<double>();
    m.config.beta2 = c.at("beta2").get<double>();
    m.config.epsilon = c.at("epsilon").get<double>();
    m.config.batch_size = c.at("batch_size").get<int>();
    m.config.rng_seed = c.at("rng_seed").get<std::uint64_t>();
    m.label_vocab = j.at("label_vocab").get<std::vector<std::string>>();
    m.scaler.mean = vector_from_json(j.at("scaler").at("mean"));
    m.scaler.std = vector_from_json(j.at("scaler").at("std"));
    m.scaler.constant_features =
        j.at("scaler").at("constant_features").get<std::vector<int>>();
    m.params.w1 = matrix_from_json(j.at("w1"));
    m.params.b1 = vector_from_json(j.at("b1"));
    m.params.w2 = matrix_from_json(j.at("w2"));
    m.params.b2 = vector_from_json(j.at("b2"));
    if (m.params.w1.rows() != m.config.hidden_neurons ||
        m.params.w1.cols() != m.config.input_dim ||
        m.params.w2.rows() != m.config.output_classes ||
        static_cast<int>(m.label_vocab.size()) != m.config.output_classes) {
      fail(ErrorKind::Parse, "inconsistent shapes in model file " + path);
    }
    return m;
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, "invalid model file " + path + ": " + e.what());
  }
}

}  // namespace paikit
