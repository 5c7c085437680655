#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "core/common.hpp"

namespace paikit {

// Single-hidden-layer perceptron: sigmoid hidden activations, softmax
// output, trained with mini-batch Adamax on categorical cross-entropy.
struct MlpConfig {
  int input_dim = 208;
  int hidden_neurons = 128;
  int output_classes = 2;
  int epochs = 500;
  double learning_rate = 0.01;
  double beta1 = 0.9;   // first-moment decay ("momentum")
  double beta2 = 0.999; // infinity-norm decay
  double epsilon = 1e-8;
  int batch_size = 32;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct MlpParams {
  Eigen::MatrixXd w1;  // hidden x input
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  // classes x hidden
  Eigen::VectorXd b2;

  static MlpParams zeros_like(const MlpParams& other);
};

// Per-feature standardization fitted on training data. Features with
// zero standard deviation are recorded and passed through unscaled.
struct FeatureScaler {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;  // 1.0 for constant features
  std::vector<int> constant_features;

  static FeatureScaler fit(const Eigen::MatrixXd& rows_by_features);
  Eigen::VectorXd apply(const Eigen::VectorXd& raw) const;
  Eigen::MatrixXd apply_rows(const Eigen::MatrixXd& rows_by_features) const;
};

struct MlpModel {
  MlpConfig config;
  MlpParams params;
  std::vector<std::string> label_vocab;
  FeatureScaler scaler;
};

struct TrainLog {
  std::vector<double> loss;      // per epoch, batch-averaged
  std::vector<double> accuracy;  // per epoch, batch-averaged
  std::uint64_t seed = 0;
};

// Class probabilities for one raw feature vector (standardization is
// applied internally). Output sums to 1.
Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& raw);

// Columns of `scaled` are already-standardized samples; `labels` are
// class indices. Returns mean categorical cross-entropy.
double batch_loss(const MlpParams& params, const Eigen::MatrixXd& scaled,
                  const std::vector<int>& labels);

// Analytic gradients of batch_loss with respect to every parameter.
MlpParams backward(const MlpParams& params, const Eigen::MatrixXd& scaled,
                   const std::vector<int>& labels);

struct AdamaxState {
  MlpParams m;  // first moment
  MlpParams u;  // infinity norm
  static AdamaxState zeros_like(const MlpParams& params);
};

// One Adamax update, t is the 1-based step index:
//   m <- b1*m + (1-b1)*g;  u <- max(b2*u, |g|);
//   theta <- theta - lr/(1-b1^t) * m/(u+eps)
void adamax_step(MlpParams& params, const MlpParams& grads, AdamaxState& state,
                 int t, double lr, double beta1, double beta2, double eps);

// Trains on raw features (rows x input_dim) with string labels drawn
// from at least two classes. Deterministic given config.rng_seed.
std::pair<MlpModel, TrainLog> train(const MlpConfig& config,
                                    const Eigen::MatrixXd& raw_rows,
                                    const std::vector<std::string>& labels);

// Argmax label; ties broken toward the lowest vocabulary index.
std::pair<std::string, Eigen::VectorXd> predict(const MlpModel& model,
                                                const Eigen::VectorXd& raw);

// Versioned JSON serialization; load(save(m)) is bit-exact.
void save_model(const MlpModel& model, const std::string& path);
MlpModel load_model(const std::string& path);

}  // namespace paikit
