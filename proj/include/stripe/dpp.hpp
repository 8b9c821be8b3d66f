#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "stripe/losses.hpp"
#include "stripe/tape.hpp"

namespace stripe::dpp {

using alignment::Trajectory;
using losses::LossConfig;

enum class KernelKind { Shape, Time, MseRbf, Dilate };

KernelKind kernel_kind_from_string(const std::string& name);
std::string to_string(KernelKind kind);

struct KernelMatrix {
  Eigen::MatrixXd k;
  KernelKind kind = KernelKind::Shape;
};

// exp(-gamma * DTW_gamma) over the PSD-log cost matrix.
double kernel_shape(const Trajectory& y1, const Trajectory& y2,
                    const LossConfig& cfg);

// exp(-DTW_gamma/gamma) * TDI_gamma with the similarity omega; equals the
// path sum  sum_A <A, Omega_sim> e^{-<A,Delta>/gamma}.
double kernel_time(const Trajectory& y1, const Trajectory& y2,
                   const LossConfig& cfg);

// Ablation kernels. kernel_dilate is not guaranteed PSD.
double kernel_mse_rbf(const Trajectory& y1, const Trajectory& y2,
                      double bandwidth);
double kernel_dilate(const Trajectory& y1, const Trajectory& y2,
                     const LossConfig& cfg);

// Upper triangle evaluated, mirrored, then symmetrized as (K + K^T)/2.
KernelMatrix kernel_matrix(const std::vector<Trajectory>& set, KernelKind kind,
                           const LossConfig& cfg);

// -Trace(I - (K+I)^{-1}), via a Cholesky solve of K + I.
double diversity_loss(const KernelMatrix& k);

// sum_i lambda_i / (1 + lambda_i) over the eigenvalues; the independent
// algebraic route for diversity_loss.
double expected_cardinality(const KernelMatrix& k);

struct PsdCheck {
  double min_eig = 0.0;
  double max_eig = 0.0;
  bool pass = false;
};
PsdCheck psd_check(const KernelMatrix& k, double tol = 1e-8);

// Gradient of diversity_loss(kernel_matrix(set)) with respect to every
// trajectory entry, computed by backpropagation through the kernel DPs.
std::vector<Eigen::MatrixXd> diversity_loss_grad(
    const std::vector<Trajectory>& set, KernelKind kind, const LossConfig& cfg);

// Tape builders used by the training loops.
nn::Tape::Var kernel_var(nn::Tape& t, nn::Tape::Var y1, nn::Tape::Var y2,
                         KernelKind kind, const LossConfig& cfg);
nn::Tape::Var kernel_matrix_var(nn::Tape& t,
                                const std::vector<nn::Tape::Var>& set,
                                KernelKind kind, const LossConfig& cfg);
nn::Tape::Var diversity_loss_var(nn::Tape& t,
                                 const std::vector<nn::Tape::Var>& set,
                                 KernelKind kind, const LossConfig& cfg);

}  // namespace stripe::dpp
