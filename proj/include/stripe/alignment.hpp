#pragma once

#include <Eigen/Dense>

namespace stripe::alignment {

// A trajectory is a d x tau matrix, one column per timestep.
using Trajectory = Eigen::MatrixXd;

struct CostMatrix {
  Eigen::MatrixXd delta;  // tau1 x tau2 pairwise timestep costs
  double gamma = 0.0;     // smoothing used to build it (0 for plain costs)
};

struct AlignmentResult {
  double dtw = 0.0;                    // soft-DTW value
  double log_partition = 0.0;          // log Z = -dtw / gamma
  Eigen::MatrixXd expected_alignment;  // E[A] under the Gibbs path distribution
};

// delta[i][j] = squared Euclidean distance between column i of y1 and
// column j of y2.
CostMatrix cost_matrix_sqeuclid(const Trajectory& y1, const Trajectory& y2);

// PSD-inducing cost: delta[i][j] = -gamma * log k(y1_i, y2_j) with
// k(u,v) = (1/2) e^{-(u-v)^2/sigma^2} / (1 - (1/2) e^{-(u-v)^2/sigma^2}),
// which expands to gamma * [ r/sigma^2 - log(2 - e^{-r/sigma^2}) ] for
// r = squared distance. Zero whenever the two timestep values coincide.
CostMatrix cost_matrix_psd_log(const Trajectory& y1, const Trajectory& y2,
                               double gamma, double sigma);

// omega[i][j] = 1 / ((i-j)^2 + 1); reward for staying near the diagonal.
Eigen::MatrixXd omega_similarity(int tau);

// omega[i][j] = (i-j)^2 / tau^2; penalty for leaving the diagonal.
Eigen::MatrixXd omega_dissimilarity(int tau);

// Soft-DTW forward recursion plus the backward pass filling E[A] so that
// expected_alignment = d(dtw)/d(delta).
AlignmentResult soft_dtw(const Eigen::MatrixXd& delta, double gamma);

// Gibbs expectation of <A, Omega>; Frobenius product of omega with the
// expected alignment.
double soft_tdi(const Eigen::MatrixXd& delta, const Eigen::MatrixXd& omega,
                double gamma);

// Classic min-path DTW. hard_tdi evaluates <Omega, A*> on the argmin path,
// ties broken diagonal > vertical > horizontal.
double hard_dtw(const Eigen::MatrixXd& delta);
double hard_tdi(const Eigen::MatrixXd& delta, const Eigen::MatrixXd& omega);

struct BruteForceResult {
  double dtw = 0.0;
  double tdi = 0.0;
  Eigen::MatrixXd expected_alignment;
  long n_paths = 0;
};

// Test oracle: explicit enumeration of every monotone path from (0,0) to
// (tau1-1, tau2-1). Refuses grids larger than 7x7.
BruteForceResult brute_force_alignment(const Eigen::MatrixXd& delta,
                                       const Eigen::MatrixXd& omega,
                                       double gamma);

// Internal forward used by the differentiable TDI node: cell log-partitions
// L[i][j] and conditional omega expectations S[i][j] of paths ending at
// (i,j). tdi = S[last], dtw = -gamma * L[last].
struct SoftAlignmentTables {
  Eigen::MatrixXd log_partial;   // L
  Eigen::MatrixXd omega_expect;  // S
  double dtw = 0.0;
  double tdi = 0.0;
};
SoftAlignmentTables soft_alignment_tables(const Eigen::MatrixXd& delta,
                                          const Eigen::MatrixXd& omega,
                                          double gamma);

// Reverse pass through soft_alignment_tables: given d(tdi), accumulate
// d(delta). Used by the tape's fused TDI node.
Eigen::MatrixXd soft_tdi_grad_delta(const Eigen::MatrixXd& delta,
                                    const Eigen::MatrixXd& omega, double gamma,
                                    const SoftAlignmentTables& tabs,
                                    double upstream);

}  // namespace stripe::alignment
