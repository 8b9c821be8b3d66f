#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "stripe/tape.hpp"

namespace stripe::nn {

struct Param {
  std::string name;
  Eigen::MatrixXd value;
  Eigen::MatrixXd grad;
  Eigen::MatrixXd adam_m;
  Eigen::MatrixXd adam_v;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Named parameter arrays with paired gradient buffers. Initialization is a
// pure function of (seed, creation order, shape): uniform fan-in scaling.
class ParameterStore {
 public:
  explicit ParameterStore(std::uint64_t seed) : seed_(seed), rng_(seed) {}

  Param& add(const std::string& name, int rows, int cols);
  Param& add_zeros(const std::string& name, int rows, int cols);
  Param& operator[](const std::string& name);
  const Param& at(const std::string& name) const;
  bool has(const std::string& name) const;

  std::vector<Param>& params() { return params_; }
  const std::vector<Param>& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }

  void zero_grad();
  // Standard Adam with bias correction; t is the 1-based step counter.
  void adam_step(const AdamConfig& cfg, long t);

  void save(const std::string& path) const;
  static ParameterStore load(const std::string& path);

 private:
  std::uint64_t seed_;
  std::mt19937_64 rng_;
  std::vector<Param> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Maps parameters onto tape leaves for one forward/backward pass. Each
// parameter is bound at most once per tape; trainable bindings copy tape
// gradients back into the store on collect().
class Binding {
 public:
  Binding(Tape& tape, bool trainable) : tape_(&tape), trainable_(trainable) {}

  Tape::Var var(Param& p);
  void collect();

 private:
  Tape* tape_;
  bool trainable_;
  std::unordered_map<Param*, Tape::Var> cache_;
};

class Dense {
 public:
  Dense(ParameterStore& store, const std::string& prefix, int in, int out);
  Tape::Var apply(Tape& t, Binding& b, Tape::Var x) const;
  int out_dim() const { return out_; }

 private:
  Param* w_;
  Param* bias_;
  int out_;
};

// Gated recurrent unit: z and r gates plus a candidate state,
// h' = (1-z) o h + z o n. Zero parameters give h' = h/2.
class GruCell {
 public:
  GruCell(ParameterStore& store, const std::string& prefix, int in, int hidden);
  Tape::Var step(Tape& t, Binding& b, Tape::Var x, Tape::Var h) const;
  int hidden() const { return hidden_; }

 private:
  Param *wz_, *uz_, *bz_;
  Param *wr_, *ur_, *br_;
  Param *wn_, *un_, *bn_;
  int hidden_;
};

// Perceptron with LeakyReLU activations and layer normalization after each
// hidden linear map.
class Mlp {
 public:
  Mlp(ParameterStore& store, const std::string& prefix, int in,
      const std::vector<int>& hidden, int out);
  Tape::Var apply(Tape& t, Binding& b, Tape::Var x) const;

 private:
  std::vector<Dense> layers_;
  std::vector<Param*> ln_gain_;
  std::vector<Param*> ln_bias_;
  Dense out_;
};

}  // namespace stripe::nn
