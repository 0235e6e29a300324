#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sigver/features.hpp"
#include "sigver/scg.hpp"

namespace sigver::ann {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline constexpr int kDefaultHidden = 200;

/// input -> tanh hidden layer -> softmax over writer classes.
struct MlpModel {
  Matrix w1;  // hidden x input
  Vector b1;  // hidden
  Matrix w2;  // classes x hidden
  Vector b2;  // classes
  std::vector<std::string> class_labels;
  features::Normalizer normalizer;  // applied by callers before forward()
  std::uint64_t seed = 0;

  int input_dim() const noexcept { return static_cast<int>(w1.cols()); }
  int hidden_dim() const noexcept { return static_cast<int>(w1.rows()); }
  int n_classes() const noexcept { return static_cast<int>(w2.rows()); }

  /// Parameters flattened as W1 (row-major), b1, W2 (row-major), b2.
  std::size_t parameter_count() const noexcept;
  std::vector<double> flatten() const;
  void unflatten(std::span<const double> params);

  /// Index of a class label; throws UnknownWriter.
  int class_index(std::string_view label) const;
};

/// Glorot-uniform weights, zero biases; bit-reproducible for a given seed.
MlpModel init_model(int n_classes, std::uint64_t seed, int input_dim = features::kFeatureDim,
                    int hidden = kDefaultHidden);

/// Max-subtracted softmax.
std::vector<double> softmax(std::span<const double> logits);

Vector logits(const MlpModel& model, std::span<const double> x);

/// Class probabilities for a normalized input. Throws NonFiniteInput.
std::vector<double> forward(const MlpModel& model, std::span<const double> x);

/// Row-per-sample inputs with integer class targets.
struct Batch {
  Matrix x;
  std::vector<int> y;

  std::size_t size() const noexcept { return y.size(); }
};

struct LossGradient {
  double loss = 0.0;
  std::vector<double> grad;  // flattening order of MlpModel::flatten()
};

/// Mean cross-entropy over the batch. Throws EmptyBatch.
LossGradient loss_and_gradient(const MlpModel& model, const Batch& batch);
double mean_loss(const MlpModel& model, const Batch& batch);
double accuracy(const MlpModel& model, const Batch& batch);

struct TrainOptions {
  int max_epochs = 500;
  double val_fraction = 0.15;
  int patience = 20;
  double sigma = 5e-5;
  double lambda_init = 5e-7;
  std::uint64_t seed = 0;
};

enum class StopReason { MaxEpochs, EarlyStopping, GradientTolerance };
std::string_view to_string(StopReason reason) noexcept;

struct TrainHistory {
  // One entry per SCG iteration, preceded by the initial weights at index 0.
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  std::vector<double> val_accuracy;
  std::vector<bool> accepted;
  StopReason stop = StopReason::MaxEpochs;
  int best_iteration = 0;  // 0 = the initial weights
};

struct TrainResult {
  MlpModel model;
  TrainHistory history;
};

/// Holds out a seeded, per-class validation split of `train` for early
/// stopping, then trains on the rest. Throws SingleClassData.
TrainResult scg_train(MlpModel model, const Batch& train, const TrainOptions& options);

/// Trains on `train` and early-stops on an explicit validation set.
TrainResult scg_train(MlpModel model, const Batch& train, const Batch& val, const TrainOptions& options);

struct Prediction {
  int class_index = 0;
  double score = 0.0;  // probability of the chosen class
};

/// Argmax of forward(); ties go to the lowest class index.
Prediction predict(const MlpModel& model, std::span<const double> x);

/// Versioned text format, first line `SIGVER-MODEL v1`.
std::string save_model(const MlpModel& model);
MlpModel load_model(std::string_view text);

}  // namespace sigver::ann
