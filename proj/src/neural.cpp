#include "ddp/neural.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ddp {

namespace {

Eigen::VectorXd sigmoid(const Eigen::VectorXd& z) {
  return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

Eigen::VectorXd tanh_vec(const Eigen::VectorXd& z) {
  return z.unaryExpr([](double v) { return std::tanh(v); });
}

}  // namespace

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double shift = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - shift).exp().matrix();
  return e / e.sum();
}

double cross_entropy(const Eigen::VectorXd& probs, int gold) {
  if (gold < 0 || gold >= probs.size()) {
    throw Error("gold label " + std::to_string(gold) + " outside [0, " + std::to_string(probs.size()) + ")");
  }
  return -std::log(probs[gold]);
}

int argmax(const Eigen::VectorXd& values, const std::vector<bool>& mask) {
  int best = -1;
  for (int k = 0; k < values.size(); ++k) {
    if (!mask.empty() && !mask[static_cast<std::size_t>(k)]) continue;
    if (best < 0 || values[k] > values[best]) best = k;
  }
  if (best < 0) throw Error("argmax over an empty selection");
  return best;
}

void glorot_fill(std::span<double> out, int fan_in, int fan_out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : out) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v = (2.0 * u - 1.0) * limit;
  }
}

// --- FeedForwardModel --------------------------------------------------------

FeedForwardModel::FeedForwardModel(int input_dim, int hidden, int outputs)
    : input_dim_(input_dim), hidden_(hidden), outputs_(outputs) {
  if (input_dim < 1 || hidden < 1 || outputs < 1) throw Error("feed-forward dimensions must be positive");
  params_.assign(b2() + static_cast<std::size_t>(outputs_), 0.0);
}

void FeedForwardModel::initialize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::fill(params_.begin(), params_.end(), 0.0);
  glorot_fill(std::span(params_).subspan(w1(), b1() - w1()), input_dim_, hidden_, rng);
  glorot_fill(std::span(params_).subspan(w2(), b2() - w2()), hidden_, outputs_, rng);
}

void FeedForwardModel::check_input(const Eigen::VectorXd& x) const {
  if (x.size() != input_dim_) {
    throw Error("feed-forward input has dimension " + std::to_string(x.size()) + ", expected " +
                std::to_string(input_dim_));
  }
}

Eigen::VectorXd FeedForwardModel::logits(const Eigen::VectorXd& x) const {
  check_input(x);
  ConstMatrixView W1(params_.data() + w1(), hidden_, input_dim_);
  ConstVectorView B1(params_.data() + b1(), hidden_);
  ConstMatrixView W2(params_.data() + w2(), outputs_, hidden_);
  ConstVectorView B2(params_.data() + b2(), outputs_);
  const Eigen::VectorXd h = (W1 * x + B1).cwiseMax(0.0);
  return W2 * h + B2;
}

Eigen::VectorXd FeedForwardModel::forward(const Eigen::VectorXd& x) const { return softmax(logits(x)); }

double FeedForwardModel::loss(const ClassSample& s) const { return cross_entropy(forward(s.input), s.gold); }

bool FeedForwardModel::correct(const ClassSample& s) const { return argmax(logits(s.input)) == s.gold; }

double FeedForwardModel::accumulate_gradient(const ClassSample& s, std::span<double> grad) const {
  check_input(s.input);
  ConstMatrixView W1(params_.data() + w1(), hidden_, input_dim_);
  ConstVectorView B1(params_.data() + b1(), hidden_);
  ConstMatrixView W2(params_.data() + w2(), outputs_, hidden_);
  ConstVectorView B2(params_.data() + b2(), outputs_);
  MatrixView gW1(grad.data() + w1(), hidden_, input_dim_);
  VectorView gB1(grad.data() + b1(), hidden_);
  MatrixView gW2(grad.data() + w2(), outputs_, hidden_);
  VectorView gB2(grad.data() + b2(), outputs_);

  const Eigen::VectorXd pre = W1 * s.input + B1;
  const Eigen::VectorXd h = pre.cwiseMax(0.0);
  const Eigen::VectorXd probs = softmax(W2 * h + B2);
  const double loss = cross_entropy(probs, s.gold);

  Eigen::VectorXd dlogits = probs;
  dlogits[s.gold] -= 1.0;
  gW2.noalias() += dlogits * h.transpose();
  gB2 += dlogits;
  Eigen::VectorXd dh = W2.transpose() * dlogits;
  for (int k = 0; k < hidden_; ++k) {
    if (pre[k] <= 0.0) dh[k] = 0.0;
  }
  gW1.noalias() += dh * s.input.transpose();
  gB1 += dh;
  return loss;
}

// --- BiLstmTagger ------------------------------------------------------------

struct BiLstmTagger::Trace {
  // Per direction and position (in sequence order).
  std::vector<Eigen::VectorXd> gates[2];  // activated [i, f, g, o]
  std::vector<Eigen::VectorXd> cell[2];
  std::vector<Eigen::VectorXd> hidden[2];
  std::vector<Eigen::VectorXd> probs;
};

BiLstmTagger::BiLstmTagger(int input_dim, int hidden, int outputs)
    : input_dim_(input_dim), hidden_(hidden), outputs_(outputs) {
  if (input_dim < 1 || hidden < 1 || outputs < 1) throw Error("tagger dimensions must be positive");
  params_.assign(bo() + static_cast<std::size_t>(outputs_), 0.0);
}

std::size_t BiLstmTagger::cell_size() const {
  const std::size_t g = 4 * static_cast<std::size_t>(hidden_);
  return g * input_dim_ + g * hidden_ + g;
}

void BiLstmTagger::initialize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::fill(params_.begin(), params_.end(), 0.0);
  const std::size_t g = 4 * static_cast<std::size_t>(hidden_);
  for (int dir = 0; dir < 2; ++dir) {
    const std::size_t base = cell_offset(dir);
    glorot_fill(std::span(params_).subspan(base, g * input_dim_), input_dim_, 4 * hidden_, rng);
    glorot_fill(std::span(params_).subspan(base + g * input_dim_, g * hidden_), hidden_, 4 * hidden_, rng);
  }
  glorot_fill(std::span(params_).subspan(wo(), bo() - wo()), 2 * hidden_, outputs_, rng);
}

void BiLstmTagger::run(const std::vector<Eigen::VectorXd>& inputs, Trace& tr) const {
  if (inputs.empty()) throw Error("cannot tag an empty sequence");
  const int T = static_cast<int>(inputs.size());
  const int R = hidden_;
  const std::size_t g = 4 * static_cast<std::size_t>(R);
  for (const auto& x : inputs) {
    if (x.size() != input_dim_) {
      throw Error("tagger input has dimension " + std::to_string(x.size()) + ", expected " +
                  std::to_string(input_dim_));
    }
  }

  for (int dir = 0; dir < 2; ++dir) {
    const double* base = params_.data() + cell_offset(dir);
    ConstMatrixView W(base, static_cast<Eigen::Index>(g), input_dim_);
    ConstMatrixView U(base + g * input_dim_, static_cast<Eigen::Index>(g), R);
    ConstVectorView b(base + g * input_dim_ + g * R, static_cast<Eigen::Index>(g));

    tr.gates[dir].assign(static_cast<std::size_t>(T), {});
    tr.cell[dir].assign(static_cast<std::size_t>(T), {});
    tr.hidden[dir].assign(static_cast<std::size_t>(T), {});
    Eigen::VectorXd h = Eigen::VectorXd::Zero(R), c = Eigen::VectorXd::Zero(R);
    for (int step = 0; step < T; ++step) {
      const int t = dir == 0 ? step : T - 1 - step;
      const Eigen::VectorXd z = W * inputs[static_cast<std::size_t>(t)] + U * h + b;
      Eigen::VectorXd act(g);
      act.segment(0, R) = sigmoid(z.segment(0, R));
      act.segment(R, R) = sigmoid(z.segment(R, R));
      act.segment(2 * R, R) = tanh_vec(z.segment(2 * R, R));
      act.segment(3 * R, R) = sigmoid(z.segment(3 * R, R));
      c = act.segment(R, R).cwiseProduct(c) + act.segment(0, R).cwiseProduct(act.segment(2 * R, R));
      h = act.segment(3 * R, R).cwiseProduct(tanh_vec(c));
      tr.gates[dir][static_cast<std::size_t>(t)] = std::move(act);
      tr.cell[dir][static_cast<std::size_t>(t)] = c;
      tr.hidden[dir][static_cast<std::size_t>(t)] = h;
    }
  }

  ConstMatrixView Wo(params_.data() + wo(), outputs_, 2 * R);
  ConstVectorView Bo(params_.data() + bo(), outputs_);
  tr.probs.resize(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    const auto k = static_cast<std::size_t>(t);
    tr.probs[k] = softmax(Wo.leftCols(R) * tr.hidden[0][k] + Wo.rightCols(R) * tr.hidden[1][k] + Bo);
  }
}

std::vector<Eigen::VectorXd> BiLstmTagger::forward(const std::vector<Eigen::VectorXd>& inputs) const {
  Trace tr;
  run(inputs, tr);
  return std::move(tr.probs);
}

double BiLstmTagger::loss(const SequenceSample& s) const {
  const auto probs = forward(s.inputs);
  if (s.gold.size() != probs.size()) throw Error("gold labels do not match the sequence length");
  double total = 0.0;
  for (std::size_t t = 0; t < probs.size(); ++t) total += cross_entropy(probs[t], s.gold[t]);
  return total;
}

bool BiLstmTagger::correct(const SequenceSample& s) const {
  const auto probs = forward(s.inputs);
  for (std::size_t t = 0; t < probs.size(); ++t) {
    if (argmax(probs[t]) != s.gold[t]) return false;
  }
  return true;
}

double BiLstmTagger::accumulate_gradient(const SequenceSample& s, std::span<double> grad) const {
  Trace tr;
  run(s.inputs, tr);
  const int T = static_cast<int>(s.inputs.size());
  if (static_cast<int>(s.gold.size()) != T) throw Error("gold labels do not match the sequence length");
  const int R = hidden_;
  const std::size_t g = 4 * static_cast<std::size_t>(R);

  ConstMatrixView Wo(params_.data() + wo(), outputs_, 2 * R);
  MatrixView gWo(grad.data() + wo(), outputs_, 2 * R);
  VectorView gBo(grad.data() + bo(), outputs_);

  double loss = 0.0;
  std::vector<Eigen::VectorXd> dh_out[2];
  dh_out[0].resize(static_cast<std::size_t>(T));
  dh_out[1].resize(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    const auto k = static_cast<std::size_t>(t);
    loss += cross_entropy(tr.probs[k], s.gold[k]);
    Eigen::VectorXd dlogits = tr.probs[k];
    dlogits[s.gold[k]] -= 1.0;
    gWo.leftCols(R).noalias() += dlogits * tr.hidden[0][k].transpose();
    gWo.rightCols(R).noalias() += dlogits * tr.hidden[1][k].transpose();
    gBo += dlogits;
    dh_out[0][k] = Wo.leftCols(R).transpose() * dlogits;
    dh_out[1][k] = Wo.rightCols(R).transpose() * dlogits;
  }

  for (int dir = 0; dir < 2; ++dir) {
    const double* base = params_.data() + cell_offset(dir);
    ConstMatrixView U(base + g * input_dim_, static_cast<Eigen::Index>(g), R);
    double* gbase = grad.data() + cell_offset(dir);
    MatrixView gW(gbase, static_cast<Eigen::Index>(g), input_dim_);
    MatrixView gU(gbase + g * input_dim_, static_cast<Eigen::Index>(g), R);
    VectorView gb(gbase + g * input_dim_ + g * R, static_cast<Eigen::Index>(g));

    Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(R);
    Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(R);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(R);
    // Walk the direction's time steps in reverse processing order.
    for (int step = T - 1; step >= 0; --step) {
      const int t = dir == 0 ? step : T - 1 - step;
      const int prev = dir == 0 ? t - 1 : t + 1;
      const bool has_prev = prev >= 0 && prev < T;
      const auto k = static_cast<std::size_t>(t);
      const Eigen::VectorXd& act = tr.gates[dir][k];
      const Eigen::VectorXd& c = tr.cell[dir][k];
      const Eigen::VectorXd& c_prev = has_prev ? tr.cell[dir][static_cast<std::size_t>(prev)] : zero;
      const Eigen::VectorXd& h_prev = has_prev ? tr.hidden[dir][static_cast<std::size_t>(prev)] : zero;

      const auto i = act.segment(0, R);
      const auto f = act.segment(R, R);
      const auto gg = act.segment(2 * R, R);
      const auto o = act.segment(3 * R, R);

      const Eigen::VectorXd dh = dh_out[dir][k] + dh_next;
      const Eigen::VectorXd tc = tanh_vec(c);
      Eigen::VectorXd dc = dc_next + dh.cwiseProduct(o).cwiseProduct((1.0 - tc.array().square()).matrix());

      Eigen::VectorXd dz(g);
      dz.segment(0, R) = dc.cwiseProduct(gg).cwiseProduct(i.cwiseProduct((1.0 - i.array()).matrix()));
      dz.segment(R, R) = dc.cwiseProduct(c_prev).cwiseProduct(f.cwiseProduct((1.0 - f.array()).matrix()));
      dz.segment(2 * R, R) = dc.cwiseProduct(i).cwiseProduct((1.0 - gg.array().square()).matrix());
      dz.segment(3 * R, R) = dh.cwiseProduct(tc).cwiseProduct(o.cwiseProduct((1.0 - o.array()).matrix()));

      gW.noalias() += dz * s.inputs[k].transpose();
      gU.noalias() += dz * h_prev.transpose();
      gb += dz;
      dh_next = U.transpose() * dz;
      dc_next = dc.cwiseProduct(f);
    }
  }
  return loss;
}

BiLstmTagger BiLstmTagger::mirrored() const {
  BiLstmTagger m(input_dim_, hidden_, outputs_);
  const std::size_t cs = cell_size();
  std::copy_n(params_.begin() + static_cast<std::ptrdiff_t>(cell_offset(0)), cs,
              m.params_.begin() + static_cast<std::ptrdiff_t>(cell_offset(1)));
  std::copy_n(params_.begin() + static_cast<std::ptrdiff_t>(cell_offset(1)), cs,
              m.params_.begin() + static_cast<std::ptrdiff_t>(cell_offset(0)));
  ConstMatrixView Wo(params_.data() + wo(), outputs_, 2 * hidden_);
  MatrixView mWo(m.params_.data() + wo(), outputs_, 2 * hidden_);
  mWo.leftCols(hidden_) = Wo.rightCols(hidden_);
  mWo.rightCols(hidden_) = Wo.leftCols(hidden_);
  std::copy(params_.begin() + static_cast<std::ptrdiff_t>(bo()), params_.end(),
            m.params_.begin() + static_cast<std::ptrdiff_t>(bo()));
  return m;
}

// --- training ----------------------------------------------------------------

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw Error("learning rate must be non-negative");
  if (epochs < 1) throw Error("epochs must be at least 1");
  if (batch_size < 1) throw Error("batch size must be at least 1");
}

AdamOptimizer::AdamOptimizer(std::size_t size, const TrainConfig& config)
    : config_(config), m_(size, 0.0), v_(size, 0.0) {}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    m_[k] = config_.beta1 * m_[k] + (1.0 - config_.beta1) * grad[k];
    v_[k] = config_.beta2 * v_[k] + (1.0 - config_.beta2) * grad[k] * grad[k];
    params[k] -= config_.learning_rate * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + config_.epsilon);
  }
}

GradCheckReport grad_check(std::span<double> params, const std::function<double()>& loss,
                           std::span<const double> analytic, double tolerance, double step) {
  if (analytic.size() != params.size()) throw Error("gradient size does not match the parameters");
  GradCheckReport report;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double saved = params[k];
    params[k] = saved + step;
    const double up = loss();
    params[k] = saved - step;
    const double down = loss();
    params[k] = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double denom = std::max({std::abs(analytic[k]), std::abs(numeric), 1e-8});
    const double rel = std::abs(analytic[k] - numeric) / denom;
    if (rel > report.max_relative_error) {
      report.max_relative_error = rel;
      report.worst_index = k;
    }
  }
  report.passed = report.max_relative_error < tolerance;
  return report;
}

}  // namespace ddp
