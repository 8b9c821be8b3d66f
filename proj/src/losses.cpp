#include "stripe/losses.hpp"

#include <stdexcept>

#include "stripe/dpp.hpp"

namespace stripe::losses {

void LossConfig::validate() const {
  if (alpha < 0.0 || alpha > 1.0)
    throw std::invalid_argument("LossConfig: alpha must be in [0,1]");
  if (gamma <= 0.0) throw std::invalid_argument("LossConfig: gamma must be > 0");
  if (lambda < 0.0) throw std::invalid_argument("LossConfig: lambda must be >= 0");
  if (sigma <= 0.0) throw std::invalid_argument("LossConfig: sigma must be > 0");
}

double mse_loss(const Trajectory& yhat, const Trajectory& y) {
  if (yhat.rows() != y.rows() || yhat.cols() != y.cols())
    throw std::invalid_argument("mse_loss: shape mismatch");
  return (yhat - y).array().square().mean();
}

double dilate_loss(const Trajectory& yhat, const Trajectory& y,
                   const LossConfig& cfg) {
  cfg.validate();
  const auto delta = alignment::cost_matrix_sqeuclid(yhat, y);
  const auto res = alignment::soft_dtw(delta.delta, cfg.gamma);
  const auto omega = alignment::omega_dissimilarity(int(y.cols()));
  const double tdi = (omega.array() * res.expected_alignment.array()).sum();
  return cfg.alpha * res.dtw + (1.0 - cfg.alpha) * tdi;
}

nn::Tape::Var dilate_loss_var(nn::Tape& t, nn::Tape::Var yhat, nn::Tape::Var y,
                              const LossConfig& cfg) {
  cfg.validate();
  const int tau = int(t.value(y).cols());
  nn::Tape::Var delta = t.pairwise_sqdiff(yhat, y);
  nn::Tape::Var dtw = t.soft_dtw(delta, cfg.gamma);
  nn::Tape::Var tdi =
      t.soft_tdi(delta, alignment::omega_dissimilarity(tau), cfg.gamma);
  return t.add(t.scale(dtw, cfg.alpha), t.scale(tdi, 1.0 - cfg.alpha));
}

nn::Tape::Var mse_loss_var(nn::Tape& t, nn::Tape::Var yhat, nn::Tape::Var y) {
  return t.mean(t.square(t.sub(yhat, y)));
}

double variety_loss(const std::vector<Trajectory>& samples, const Trajectory& y,
                    const BaseLoss& base) {
  if (samples.empty())
    throw std::invalid_argument("variety_loss: empty sample list");
  double best = base(samples[0], y);
  for (std::size_t i = 1; i < samples.size(); ++i)
    best = std::min(best, base(samples[i], y));
  return best;
}

double stripe_objective(const Trajectory& yhat0, const Trajectory& y0,
                        const std::vector<Trajectory>& samples,
                        const KernelMatrixBuilder& k_builder,
                        const LossConfig& cfg) {
  if (samples.empty())
    throw std::invalid_argument("stripe_objective: empty sample list");
  dpp::KernelMatrix km;
  km.k = k_builder(samples);
  return dilate_loss(yhat0, y0, cfg) + cfg.lambda * dpp::diversity_loss(km);
}

}  // namespace stripe::losses
