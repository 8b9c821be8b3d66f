#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace stripe::data {

struct Example {
  Eigen::MatrixXd input;                 // d x T
  std::vector<Eigen::MatrixXd> futures;  // each d x tau
};

struct Dataset {
  std::vector<Example> train, valid, test;
  Eigen::VectorXd mean;  // per-channel normalization constants
  Eigen::VectorXd stdev;
  int dim = 1;
  int input_len = 0;
  int horizon = 0;
};

// Two-peaks input (T=20), step-function futures (tau=20): peaks at random
// positions i1 < i2 with amplitudes j1, j2 ~ U[0,1]; each future is a step
// of amplitude j2-j1 at window position i2 + (i2-i1) + randint(-3,3) - T,
// resampled until it lands inside the window. Additive Gaussian noise of
// standard deviation noise_std on every series.
Dataset generate_synthetic(int n_inputs, int n_futures, std::uint64_t seed,
                           double noise_std = 0.1);

// One-value-per-row CSV (optional header) -> sliding windows of length
// T + tau at the given stride, split 70/15/15 chronologically;
// z-normalization constants come from the train split only.
Dataset load_series_csv(const std::string& path, int input_len, int output_len,
                        int stride);

// Dataset container format: CSV with header
// split,series_id,future_id,role,v0,...  (future_id -1 for input rows).
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

Eigen::MatrixXd normalize(const Eigen::MatrixXd& x, const Eigen::VectorXd& mean,
                          const Eigen::VectorXd& stdev);
Eigen::MatrixXd denormalize(const Eigen::MatrixXd& x,
                            const Eigen::VectorXd& mean,
                            const Eigen::VectorXd& stdev);

}  // namespace stripe::data
