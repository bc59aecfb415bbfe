#pragma once

// Small dense networks with hand-written backpropagation.
//
// Parameters of each model live in one flat vector so the optimizer, the
// gradient checker and the model files can treat them uniformly. Matrices
// are stored row-major.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ddp/corpus.hpp"

namespace ddp {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixView = Eigen::Map<RowMatrix>;
using ConstMatrixView = Eigen::Map<const RowMatrix>;
using VectorView = Eigen::Map<Eigen::VectorXd>;
using ConstVectorView = Eigen::Map<const Eigen::VectorXd>;

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);
// -log p[gold]. Throws Error when gold is out of range.
double cross_entropy(const Eigen::VectorXd& probs, int gold);
// Index of the largest entry, lowest index on ties. Entries with mask false
// are skipped; an empty mask allows everything.
int argmax(const Eigen::VectorXd& values, const std::vector<bool>& mask = {});

// Uniform in +-sqrt(6 / (fan_in + fan_out)).
void glorot_fill(std::span<double> out, int fan_in, int fan_out, std::mt19937_64& rng);

struct ClassSample {
  Eigen::VectorXd input;
  int gold = 0;
};

// input -> ReLU(W1 x + b1) -> W2 h + b2 -> softmax.
// Parameter order: W1 [hidden x input], b1 [hidden], W2 [outputs x hidden],
// b2 [outputs].
class FeedForwardModel {
 public:
  FeedForwardModel() = default;
  FeedForwardModel(int input_dim, int hidden, int outputs);

  int input_dim() const { return input_dim_; }
  int hidden() const { return hidden_; }
  int outputs() const { return outputs_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  // Glorot weights, zero biases.
  void initialize(std::uint64_t seed);

  Eigen::VectorXd logits(const Eigen::VectorXd& x) const;
  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;

  double loss(const ClassSample& s) const;
  // Returns the loss and adds its gradient into grad.
  double accumulate_gradient(const ClassSample& s, std::span<double> grad) const;
  bool correct(const ClassSample& s) const;

 private:
  void check_input(const Eigen::VectorXd& x) const;
  std::size_t w1() const { return 0; }
  std::size_t b1() const { return w1() + static_cast<std::size_t>(hidden_) * input_dim_; }
  std::size_t w2() const { return b1() + static_cast<std::size_t>(hidden_); }
  std::size_t b2() const { return w2() + static_cast<std::size_t>(outputs_) * hidden_; }

  int input_dim_ = 0;
  int hidden_ = 0;
  int outputs_ = 0;
  std::vector<double> params_;
};

struct SequenceSample {
  std::vector<Eigen::VectorXd> inputs;
  std::vector<int> gold;
};

// Bidirectional LSTM tagger with a softmax layer per position.
//
// Each direction has W [4R x input], U [4R x R], b [4R] with gate blocks in
// the order input, forget, candidate, output:
//   c_t = f * c_{t-1} + i * g,  h_t = o * tanh(c_t).
// Parameter order: forward cell (W, U, b), backward cell (W, U, b),
// output Wo [outputs x 2R] acting on [h_fwd ; h_bwd], bo [outputs].
class BiLstmTagger {
 public:
  BiLstmTagger() = default;
  BiLstmTagger(int input_dim, int hidden, int outputs);

  int input_dim() const { return input_dim_; }
  int hidden() const { return hidden_; }
  int outputs() const { return outputs_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  void initialize(std::uint64_t seed);

  // One distribution per position. Throws Error on an empty sequence.
  std::vector<Eigen::VectorXd> forward(const std::vector<Eigen::VectorXd>& inputs) const;

  double loss(const SequenceSample& s) const;
  double accumulate_gradient(const SequenceSample& s, std::span<double> grad) const;
  bool correct(const SequenceSample& s) const;

  // Same network with the two directions swapped; tagging a reversed
  // sequence with it yields the reversed outputs.
  BiLstmTagger mirrored() const;

 private:
  struct Trace;
  std::size_t cell_size() const;
  std::size_t cell_offset(int direction) const { return direction * cell_size(); }
  std::size_t wo() const { return 2 * cell_size(); }
  std::size_t bo() const { return wo() + static_cast<std::size_t>(outputs_) * 2 * hidden_; }
  void run(const std::vector<Eigen::VectorXd>& inputs, Trace& trace) const;

  int input_dim_ = 0;
  int hidden_ = 0;
  int outputs_ = 0;
  std::vector<double> params_;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  int epochs = 1;
  std::uint64_t seed = 42;
  int batch_size = 16;
  double clip_norm = 5.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  // Throws Error for a negative learning rate or epochs < 1.
  void validate() const;
};

class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t size, const TrainConfig& config);
  void step(std::span<double> params, std::span<const double> grad);

 private:
  TrainConfig config_;
  std::vector<double> m_, v_;
  long t_ = 0;
};

struct TrainReport {
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::vector<double> epoch_losses;  // mean sample loss seen during each epoch
  double final_accuracy = 0.0;
};

// Mean loss and accuracy of a model over a dataset.
template <class Model, class Sample>
std::pair<double, double> evaluate_dataset(const Model& model, std::span<const Sample> data) {
  double loss = 0.0;
  std::size_t correct = 0;
  for (const Sample& s : data) {
    loss += model.loss(s);
    if (model.correct(s)) ++correct;
  }
  const double n = static_cast<double>(data.size());
  return {loss / n, static_cast<double>(correct) / n};
}

// Mini-batch Adam on mean cross-entropy with gradient-norm clipping. The
// sample order is reshuffled every epoch from config.seed.
template <class Model, class Sample>
TrainReport train(Model& model, std::span<const Sample> data, const TrainConfig& config) {
  config.validate();
  if (data.empty()) throw Error("training set is empty");

  TrainReport report;
  report.initial_loss = evaluate_dataset(model, data).first;

  std::vector<double>& params = model.params();
  AdamOptimizer adam(params.size(), config);
  std::vector<double> grad(params.size());
  std::vector<std::size_t> order(data.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::mt19937_64 rng(config.seed);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t k = order.size() - 1; k > 0; --k) {
      std::swap(order[k], order[rng() % (k + 1)]);
    }
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t k = start; k < end; ++k) epoch_loss += model.accumulate_gradient(data[order[k]], grad);

      const double scale = 1.0 / static_cast<double>(end - start);
      double norm2 = 0.0;
      for (double& g : grad) {
        g *= scale;
        norm2 += g * g;
      }
      const double norm = std::sqrt(norm2);
      if (norm > config.clip_norm) {
        for (double& g : grad) g *= config.clip_norm / norm;
      }
      adam.step(params, grad);
    }
    report.epoch_losses.push_back(epoch_loss / static_cast<double>(data.size()));
  }
  std::tie(report.final_loss, report.final_accuracy) = evaluate_dataset(model, data);
  return report;
}

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  bool passed = false;
};

// Compares an analytic gradient with central differences of `loss` taken by
// perturbing `params` in place (restored afterwards). The relative error of
// one coordinate is |a - n| / max(|a|, |n|, 1e-8).
GradCheckReport grad_check(std::span<double> params, const std::function<double()>& loss,
                           std::span<const double> analytic, double tolerance,
                           double step = 1e-4);

}  // namespace ddp
