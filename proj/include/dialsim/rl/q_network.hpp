#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dialsim/core/random.hpp"
#include "dialsim/env/environment.hpp"

namespace dialsim::rl {

/// One-hidden-layer MLP: q = W2 tanh(W1 x + b1) + b2.
///
/// Parameters live in one flat vector laid out as [W1 (H x in), b1 (H),
/// W2 (out x H), b2 (out)], row-major.
class QNetwork {
 public:
  QNetwork() = default;
  QNetwork(std::size_t in_dim, std::size_t hidden, std::size_t out_dim);

  /// Glorot-uniform weights, zero biases.
  void init_random(core::Rng& rng);

  std::size_t in_dim() const { return in_; }
  std::size_t hidden() const { return hidden_; }
  std::size_t out_dim() const { return out_; }
  std::size_t num_params() const { return params_.size(); }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  /// Throws std::invalid_argument on a dimension mismatch.
  std::vector<double> forward(std::span<const double> x) const;
  /// Also returns the hidden activations, for backpropagation.
  void forward(std::span<const double> x, std::vector<double>& h, std::vector<double>& q) const;

  /// Row-parallel (OpenMP) batch forward and its serial reference.
  std::vector<std::vector<double>> forward_batch(const std::vector<std::vector<double>>& xs) const;
  std::vector<std::vector<double>> forward_batch_serial(
      const std::vector<std::vector<double>>& xs) const;

  /// Index of the largest action value; ties go to the lowest index.
  std::size_t greedy_action(std::span<const double> x) const;

  bool operator==(const QNetwork&) const = default;

  std::size_t w1_offset() const { return 0; }
  std::size_t b1_offset() const { return hidden_ * in_; }
  std::size_t w2_offset() const { return b1_offset() + hidden_; }
  std::size_t b2_offset() const { return w2_offset() + out_ * hidden_; }

 private:
  std::size_t in_ = 0, hidden_ = 0, out_ = 0;
  std::vector<double> params_;
};

/// y = r, or r + gamma * max_a' Q_target(s', a') when not done.
double bellman_target(const QNetwork& target, const env::Experience& e, double gamma);

struct LossAndGradient {
  double loss = 0.0;             // mean squared TD error
  std::vector<double> gradient;  // d loss / d params, same layout as params()
};

LossAndGradient compute_gradient(const QNetwork& net, const QNetwork& target,
                                 std::span<const env::Experience* const> batch, double gamma);

/// One SGD step on `net` (target untouched) with the gradient rescaled to at
/// most `clip_norm` in L2 norm; clip_norm <= 0 disables clipping. Returns the
/// pre-step mean loss. Throws std::runtime_error if the loss or any gradient
/// entry is not finite.
double q_batch_update(QNetwork& net, const QNetwork& target,
                      std::span<const env::Experience* const> batch, double gamma, double lr,
                      double clip_norm = 1.0);

}  // namespace dialsim::rl
