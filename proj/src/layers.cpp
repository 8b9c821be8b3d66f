#include "stripe/layers.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace stripe::nn {

Param& ParameterStore::add(const std::string& name, int rows, int cols) {
  Param& p = add_zeros(name, rows, cols);
  // Uniform fan-in scaling: U(-a, a) with a = 1/sqrt(cols).
  const double a = 1.0 / std::sqrt(double(cols));
  std::uniform_real_distribution<double> dist(-a, a);
  for (Eigen::Index i = 0; i < p.value.rows(); ++i)
    for (Eigen::Index j = 0; j < p.value.cols(); ++j)
      p.value(i, j) = dist(rng_);
  return p;
}

Param& ParameterStore::add_zeros(const std::string& name, int rows, int cols) {
  if (index_.count(name))
    throw std::invalid_argument("duplicate parameter name: " + name);
  Param p;
  p.name = name;
  p.value = Eigen::MatrixXd::Zero(rows, cols);
  p.grad = Eigen::MatrixXd::Zero(rows, cols);
  p.adam_m = Eigen::MatrixXd::Zero(rows, cols);
  p.adam_v = Eigen::MatrixXd::Zero(rows, cols);
  index_[name] = params_.size();
  params_.push_back(std::move(p));
  return params_.back();
}

Param& ParameterStore::operator[](const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end())
    throw std::out_of_range("unknown parameter: " + name);
  return params_[it->second];
}

const Param& ParameterStore::at(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end())
    throw std::out_of_range("unknown parameter: " + name);
  return params_[it->second];
}

bool ParameterStore::has(const std::string& name) const {
  return index_.count(name) > 0;
}

void ParameterStore::zero_grad() {
  for (Param& p : params_) p.grad.setZero();
}

void ParameterStore::adam_step(const AdamConfig& cfg, long t) {
  if (t < 1) throw std::invalid_argument("adam_step: t must be >= 1");
  const double c1 = 1.0 - std::pow(cfg.beta1, double(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, double(t));
  for (Param& p : params_) {
    p.adam_m = cfg.beta1 * p.adam_m + (1.0 - cfg.beta1) * p.grad;
    p.adam_v =
        cfg.beta2 * p.adam_v.array() + (1.0 - cfg.beta2) * p.grad.array().square();
    p.value.array() -= cfg.lr * (p.adam_m.array() / c1) /
                       ((p.adam_v.array() / c2).sqrt() + cfg.eps);
  }
}

void ParameterStore::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open checkpoint for write: " + path);
  out << "stripe-checkpoint v1\n";
  out << "seed " << seed_ << "\n";
  char buf[64];
  for (const Param& p : params_) {
    out << "param " << p.name << " " << p.value.rows() << " " << p.value.cols()
        << "\n";
    for (Eigen::Index i = 0; i < p.value.rows(); ++i) {
      for (Eigen::Index j = 0; j < p.value.cols(); ++j) {
        std::snprintf(buf, sizeof buf, "%a", p.value(i, j));
        out << buf << (j + 1 == p.value.cols() ? "" : " ");
      }
      out << "\n";
    }
  }
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

ParameterStore ParameterStore::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string line;
  std::getline(in, line);
  if (line != "stripe-checkpoint v1")
    throw std::runtime_error("bad checkpoint header in " + path);
  std::string key;
  std::uint64_t seed = 0;
  in >> key >> seed;
  if (key != "seed") throw std::runtime_error("bad checkpoint seed line");
  ParameterStore store(seed);
  while (in >> key) {
    if (key != "param") throw std::runtime_error("bad checkpoint record: " + key);
    std::string name;
    int rows = 0, cols = 0;
    in >> name >> rows >> cols;
    Param& p = store.add_zeros(name, rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) {
        std::string tok;
        in >> tok;
        p.value(i, j) = std::strtod(tok.c_str(), nullptr);
      }
  }
  return store;
}

Tape::Var Binding::var(Param& p) {
  auto it = cache_.find(&p);
  if (it != cache_.end()) return it->second;
  Tape::Var v = tape_->input(p.value);
  cache_.emplace(&p, v);
  return v;
}

void Binding::collect() {
  if (!trainable_) return;
  for (auto& [p, v] : cache_) p->grad += tape_->grad(v);
}

Dense::Dense(ParameterStore& store, const std::string& prefix, int in, int out)
    : w_(&store.add(prefix + ".w", out, in)),
      bias_(&store.add_zeros(prefix + ".b", out, 1)),
      out_(out) {}

Tape::Var Dense::apply(Tape& t, Binding& b, Tape::Var x) const {
  return t.add(t.matmul(b.var(*w_), x), b.var(*bias_));
}

GruCell::GruCell(ParameterStore& store, const std::string& prefix, int in,
                 int hidden)
    : wz_(&store.add(prefix + ".wz", hidden, in)),
      uz_(&store.add(prefix + ".uz", hidden, hidden)),
      bz_(&store.add_zeros(prefix + ".bz", hidden, 1)),
      wr_(&store.add(prefix + ".wr", hidden, in)),
      ur_(&store.add(prefix + ".ur", hidden, hidden)),
      br_(&store.add_zeros(prefix + ".br", hidden, 1)),
      wn_(&store.add(prefix + ".wn", hidden, in)),
      un_(&store.add(prefix + ".un", hidden, hidden)),
      bn_(&store.add_zeros(prefix + ".bn", hidden, 1)),
      hidden_(hidden) {}

Tape::Var GruCell::step(Tape& t, Binding& b, Tape::Var x, Tape::Var h) const {
  Tape::Var z = t.sigmoid(t.add(
      t.add(t.matmul(b.var(*wz_), x), t.matmul(b.var(*uz_), h)), b.var(*bz_)));
  Tape::Var r = t.sigmoid(t.add(
      t.add(t.matmul(b.var(*wr_), x), t.matmul(b.var(*ur_), h)), b.var(*br_)));
  Tape::Var n = t.tanh(t.add(
      t.add(t.matmul(b.var(*wn_), x), t.cmul(r, t.matmul(b.var(*un_), h))),
      b.var(*bn_)));
  // h' = (1-z) o h + z o n
  Tape::Var keep = t.cmul(t.add_const(t.neg(z), 1.0), h);
  return t.add(keep, t.cmul(z, n));
}

Mlp::Mlp(ParameterStore& store, const std::string& prefix, int in,
         const std::vector<int>& hidden, int out)
    : out_([&] {
        int cur = in;
        for (std::size_t i = 0; i < hidden.size(); ++i) {
          layers_.emplace_back(store, prefix + ".h" + std::to_string(i), cur,
                               hidden[i]);
          Param& gain = store.add_zeros(prefix + ".ln" + std::to_string(i) + ".g",
                                        hidden[i], 1);
          gain.value.setOnes();
          ln_gain_.push_back(&gain);
          ln_bias_.push_back(&store.add_zeros(
              prefix + ".ln" + std::to_string(i) + ".b", hidden[i], 1));
          cur = hidden[i];
        }
        return Dense(store, prefix + ".out", cur, out);
      }()) {}

Tape::Var Mlp::apply(Tape& t, Binding& b, Tape::Var x) const {
  Tape::Var cur = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    cur = layers_[i].apply(t, b, cur);
    cur = t.add(t.cmul(t.normalize(cur), b.var(*ln_gain_[i])),
                b.var(*ln_bias_[i]));
    cur = t.leaky_relu(cur);
  }
  return out_.apply(t, b, cur);
}

}  // namespace stripe::nn
