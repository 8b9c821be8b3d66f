#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "stripe/alignment.hpp"
#include "stripe/tape.hpp"

namespace stripe::losses {

using alignment::Trajectory;

struct LossConfig {
  double alpha = 0.5;
  double gamma = 0.01;
  double lambda = 1.0;
  double sigma = 1.0;
  void validate() const;
};

using BaseLoss = std::function<double(const Trajectory&, const Trajectory&)>;

// Mean over all d*tau entries of the squared difference.
double mse_loss(const Trajectory& yhat, const Trajectory& y);

// alpha * DTW_gamma + (1-alpha) * TDI_gamma with squared-Euclidean costs and
// the dissimilarity omega (deviation from the diagonal is penalized).
double dilate_loss(const Trajectory& yhat, const Trajectory& y,
                   const LossConfig& cfg);

// Differentiable version on the tape; y may be a constant leaf.
nn::Tape::Var dilate_loss_var(nn::Tape& t, nn::Tape::Var yhat, nn::Tape::Var y,
                              const LossConfig& cfg);
nn::Tape::Var mse_loss_var(nn::Tape& t, nn::Tape::Var yhat, nn::Tape::Var y);

// min_i base(samples[i], y); the subgradient flows only to the argmin sample.
double variety_loss(const std::vector<Trajectory>& samples, const Trajectory& y,
                    const BaseLoss& base);

// Builds the N x N kernel matrix over a candidate set.
using KernelMatrixBuilder =
    std::function<Eigen::MatrixXd(const std::vector<Trajectory>&)>;

// L_quality(yhat0, y0) + lambda * L_diversity(samples; K); quality is DILATE.
double stripe_objective(const Trajectory& yhat0, const Trajectory& y0,
                        const std::vector<Trajectory>& samples,
                        const KernelMatrixBuilder& k_builder,
                        const LossConfig& cfg);

}  // namespace stripe::losses
