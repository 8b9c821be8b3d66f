#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace stripe {

// Every hyperparameter in one validated record. Defaults follow the
// recommended settings where stated; widths are desk scale.
struct RunConfig {
  double gamma = 0.01;   // DP smoothing
  double sigma = 1.0;    // PSD kernel bandwidth
  double alpha = 0.5;    // DILATE shape/time mix
  double lambda = 1.0;   // quality/diversity tradeoff
  int latent = 16;       // k, split into shape and time halves
  int hidden = 32;       // GRU width
  int mlp_hidden = 64;   // proposal perceptron width
  int n_shape = 10;      // N_s
  int n_time = 10;       // N_t
  int n_eval = 10;       // N, evaluation subsample size
  int predictor_steps = 1000;
  int proposal_steps = 500;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  int input_len = 20;    // T
  int horizon = 20;      // tau
  double noise_std = 0.1;
  std::string quality_loss = "dilate";  // or "mse"

  void validate() const;  // throws std::invalid_argument on a bad field

  // Applies one `key = value` assignment; rejects unknown keys.
  void set(std::string_view key, std::string_view value);

  // Loads a line-oriented `key = value` file ('#' comments, blank lines ok).
  static RunConfig from_file(const std::string& path);

  std::string to_string() const;  // key = value form, one per line
};

// Derives a named RNG sub-stream seed from the root seed so that data,
// initialization and sampling randomness stay independent.
std::uint64_t substream(std::uint64_t root, std::string_view name);

namespace io {
// Writes content to path via temp file + rename; interrupted runs never
// leave partial files.
void atomic_write(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);
}  // namespace io

}  // namespace stripe
