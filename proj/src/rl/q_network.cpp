#include "dialsim/rl/q_network.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dialsim::rl {

QNetwork::QNetwork(std::size_t in_dim, std::size_t hidden, std::size_t out_dim)
    : in_(in_dim), hidden_(hidden), out_(out_dim),
      params_(hidden * in_dim + hidden + out_dim * hidden + out_dim, 0.0) {
  if (in_dim == 0 || hidden == 0 || out_dim == 0)
    throw std::invalid_argument("network dimensions must be positive");
}

void QNetwork::init_random(core::Rng& rng) {
  std::fill(params_.begin(), params_.end(), 0.0);
  const double a1 = std::sqrt(6.0 / static_cast<double>(in_ + hidden_));
  const double a2 = std::sqrt(6.0 / static_cast<double>(hidden_ + out_));
  std::uniform_real_distribution<double> d1(-a1, a1), d2(-a2, a2);
  for (std::size_t i = 0; i < hidden_ * in_; ++i) params_[w1_offset() + i] = d1(rng);
  for (std::size_t i = 0; i < out_ * hidden_; ++i) params_[w2_offset() + i] = d2(rng);
}

void QNetwork::forward(std::span<const double> x, std::vector<double>& h,
                       std::vector<double>& q) const {
  if (x.size() != in_) {
    std::ostringstream msg;
    msg << "q_forward: input has " << x.size() << " features, network expects " << in_;
    throw std::invalid_argument(msg.str());
  }
  h.assign(hidden_, 0.0);
  q.assign(out_, 0.0);
  const double* w1 = params_.data() + w1_offset();
  const double* b1 = params_.data() + b1_offset();
  const double* w2 = params_.data() + w2_offset();
  const double* b2 = params_.data() + b2_offset();
  for (std::size_t j = 0; j < hidden_; ++j) {
    double z = b1[j];
    const double* row = w1 + j * in_;
    for (std::size_t i = 0; i < in_; ++i) z += row[i] * x[i];
    h[j] = std::tanh(z);
  }
  for (std::size_t a = 0; a < out_; ++a) {
    double v = b2[a];
    const double* row = w2 + a * hidden_;
    for (std::size_t j = 0; j < hidden_; ++j) v += row[j] * h[j];
    q[a] = v;
  }
}

std::vector<double> QNetwork::forward(std::span<const double> x) const {
  std::vector<double> h, q;
  forward(x, h, q);
  return q;
}

std::vector<std::vector<double>> QNetwork::forward_batch_serial(
    const std::vector<std::vector<double>>& xs) const {
  std::vector<std::vector<double>> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = forward(xs[i]);
  return out;
}

std::vector<std::vector<double>> QNetwork::forward_batch(
    const std::vector<std::vector<double>>& xs) const {
  for (const auto& x : xs) {
    if (x.size() != in_) throw std::invalid_argument("q_forward: batch row has wrong dimension");
  }
  std::vector<std::vector<double>> out(xs.size());
  const auto n = static_cast<std::ptrdiff_t>(xs.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = forward(xs[i]);
  return out;
}

std::size_t QNetwork::greedy_action(std::span<const double> x) const {
  auto q = forward(x);
  return static_cast<std::size_t>(std::max_element(q.begin(), q.end()) - q.begin());
}

double bellman_target(const QNetwork& target, const env::Experience& e, double gamma) {
  if (e.done) return e.r;
  auto q = target.forward(e.s_next);
  return e.r + gamma * *std::max_element(q.begin(), q.end());
}

LossAndGradient compute_gradient(const QNetwork& net, const QNetwork& target,
                                 std::span<const env::Experience* const> batch, double gamma) {
  if (batch.empty()) throw std::invalid_argument("q_batch_update: empty batch");
  LossAndGradient out;
  out.gradient.assign(net.num_params(), 0.0);
  const std::size_t in = net.in_dim(), hid = net.hidden();
  const double* w2 = net.params().data() + net.w2_offset();
  double* g_w1 = out.gradient.data() + net.w1_offset();
  double* g_b1 = out.gradient.data() + net.b1_offset();
  double* g_w2 = out.gradient.data() + net.w2_offset();
  double* g_b2 = out.gradient.data() + net.b2_offset();
  const double scale = 1.0 / static_cast<double>(batch.size());

  std::vector<double> h, q;
  for (const auto* e : batch) {
    if (e->a >= net.out_dim()) throw std::invalid_argument("experience action out of range");
    const double y = bellman_target(target, *e, gamma);
    net.forward(e->s, h, q);
    const double err = q[e->a] - y;
    out.loss += err * err * scale;
    const double dq = 2.0 * err * scale;
    g_b2[e->a] += dq;
    double* gw2_row = g_w2 + e->a * hid;
    const double* w2_row = w2 + e->a * hid;
    for (std::size_t j = 0; j < hid; ++j) {
      gw2_row[j] += dq * h[j];
      const double dz = dq * w2_row[j] * (1.0 - h[j] * h[j]);
      if (dz == 0.0) continue;
      g_b1[j] += dz;
      double* gw1_row = g_w1 + j * in;
      for (std::size_t i = 0; i < in; ++i) {
        if (e->s[i] != 0.0) gw1_row[i] += dz * e->s[i];
      }
    }
  }
  return out;
}

double q_batch_update(QNetwork& net, const QNetwork& target,
                      std::span<const env::Experience* const> batch, double gamma, double lr,
                      double clip_norm) {
  auto lg = compute_gradient(net, target, batch, gamma);
  double sq = 0.0;
  for (double g : lg.gradient) sq += g * g;
  if (!std::isfinite(lg.loss) || !std::isfinite(sq)) {
    std::ostringstream msg;
    msg << "q_batch_update: non-finite loss (" << lg.loss << ") or gradient norm^2 (" << sq
        << ") on a batch of " << batch.size() << "; lower the learning rate";
    throw std::runtime_error(msg.str());
  }
  const double norm = std::sqrt(sq);
  const double step = (clip_norm > 0.0 && norm > clip_norm) ? lr * clip_norm / norm : lr;
  auto& p = net.params();
  for (std::size_t i = 0; i < p.size(); ++i) p[i] -= step * lg.gradient[i];
  return lg.loss;
}

}  // namespace dialsim::rl
