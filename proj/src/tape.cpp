#include "stripe/tape.hpp"

#include <cmath>
#include <stdexcept>

#include "stripe/alignment.hpp"

namespace stripe::nn {

Tape::Var Tape::push(Eigen::MatrixXd val, std::function<void()> back) {
  Node n;
  n.grad = Eigen::MatrixXd::Zero(val.rows(), val.cols());
  n.val = std::move(val);
  n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return static_cast<Var>(nodes_.size() - 1);
}

Tape::Var Tape::input(const Eigen::MatrixXd& v) { return push(v); }

Tape::Var Tape::scalar(double v) {
  Eigen::MatrixXd m(1, 1);
  m(0, 0) = v;
  return push(m);
}

void Tape::backward(Var root) {
  if (nodes_[root].val.size() != 1)
    throw std::invalid_argument("backward: root must be a scalar node");
  nodes_[root].grad(0, 0) = 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it)
    if (it->back) it->back();
}

Tape::Var Tape::matmul(Var a, Var b) {
  Var out = push(nodes_[a].val * nodes_[b].val);
  return nodes_[out].back = [this, a, b, out] {
           nodes_[a].grad += nodes_[out].grad * nodes_[b].val.transpose();
           nodes_[b].grad += nodes_[a].val.transpose() * nodes_[out].grad;
         },
         out;
}

Tape::Var Tape::add(Var a, Var b) {
  Var out = push(nodes_[a].val + nodes_[b].val);
  return nodes_[out].back = [this, a, b, out] {
           nodes_[a].grad += nodes_[out].grad;
           nodes_[b].grad += nodes_[out].grad;
         },
         out;
}

Tape::Var Tape::sub(Var a, Var b) {
  Var out = push(nodes_[a].val - nodes_[b].val);
  return nodes_[out].back = [this, a, b, out] {
           nodes_[a].grad += nodes_[out].grad;
           nodes_[b].grad -= nodes_[out].grad;
         },
         out;
}

Tape::Var Tape::cmul(Var a, Var b) {
  Var out = push(nodes_[a].val.cwiseProduct(nodes_[b].val));
  return nodes_[out].back = [this, a, b, out] {
           nodes_[a].grad += nodes_[out].grad.cwiseProduct(nodes_[b].val);
           nodes_[b].grad += nodes_[out].grad.cwiseProduct(nodes_[a].val);
         },
         out;
}

Tape::Var Tape::scale(Var a, double s) {
  Var out = push(nodes_[a].val * s);
  return nodes_[out].back =
             [this, a, out, s] { nodes_[a].grad += nodes_[out].grad * s; },
         out;
}

Tape::Var Tape::add_const(Var a, double c) {
  Var out = push(nodes_[a].val.array() + c);
  return nodes_[out].back =
             [this, a, out] { nodes_[a].grad += nodes_[out].grad; },
         out;
}

Tape::Var Tape::sigmoid(Var a) {
  Eigen::MatrixXd y = 1.0 / (1.0 + (-nodes_[a].val.array()).exp());
  Var out = push(std::move(y));
  return nodes_[out].back = [this, a, out] {
           const auto& y = nodes_[out].val.array();
           nodes_[a].grad.array() +=
               nodes_[out].grad.array() * y * (1.0 - y);
         },
         out;
}

Tape::Var Tape::tanh(Var a) {
  Var out = push(nodes_[a].val.array().tanh());
  return nodes_[out].back = [this, a, out] {
           const auto& y = nodes_[out].val.array();
           nodes_[a].grad.array() += nodes_[out].grad.array() * (1.0 - y * y);
         },
         out;
}

Tape::Var Tape::leaky_relu(Var a, double slope) {
  Eigen::MatrixXd y = nodes_[a].val.unaryExpr(
      [slope](double x) { return x > 0.0 ? x : slope * x; });
  Var out = push(std::move(y));
  return nodes_[out].back = [this, a, out, slope] {
           nodes_[a].grad.array() +=
               nodes_[out].grad.array() *
               nodes_[a].val.array().unaryExpr(
                   [slope](double x) { return x > 0.0 ? 1.0 : slope; });
         },
         out;
}

Tape::Var Tape::exp(Var a) {
  Var out = push(nodes_[a].val.array().exp());
  return nodes_[out].back = [this, a, out] {
           nodes_[a].grad.array() +=
               nodes_[out].grad.array() * nodes_[out].val.array();
         },
         out;
}

Tape::Var Tape::log(Var a) {
  Var out = push(nodes_[a].val.array().log());
  return nodes_[out].back = [this, a, out] {
           nodes_[a].grad.array() +=
               nodes_[out].grad.array() / nodes_[a].val.array();
         },
         out;
}

Tape::Var Tape::square(Var a) {
  Var out = push(nodes_[a].val.array().square());
  return nodes_[out].back = [this, a, out] {
           nodes_[a].grad.array() +=
               2.0 * nodes_[out].grad.array() * nodes_[a].val.array();
         },
         out;
}

Tape::Var Tape::sum(Var a) {
  Eigen::MatrixXd s(1, 1);
  s(0, 0) = nodes_[a].val.sum();
  Var out = push(std::move(s));
  return nodes_[out].back = [this, a, out] {
           nodes_[a].grad.array() += nodes_[out].grad(0, 0);
         },
         out;
}

Tape::Var Tape::mean(Var a) {
  Eigen::MatrixXd s(1, 1);
  s(0, 0) = nodes_[a].val.mean();
  Var out = push(std::move(s));
  return nodes_[out].back = [this, a, out] {
           nodes_[a].grad.array() +=
               nodes_[out].grad(0, 0) / double(nodes_[a].val.size());
         },
         out;
}

Tape::Var Tape::vconcat(Var a, Var b) {
  const auto& va = nodes_[a].val;
  const auto& vb = nodes_[b].val;
  if (va.cols() != vb.cols())
    throw std::invalid_argument("vconcat: column mismatch");
  Eigen::MatrixXd v(va.rows() + vb.rows(), va.cols());
  v << va, vb;
  Var out = push(std::move(v));
  return nodes_[out].back = [this, a, b, out] {
           const auto ra = nodes_[a].val.rows();
           const auto rb = nodes_[b].val.rows();
           const auto c = nodes_[a].val.cols();
           nodes_[a].grad += nodes_[out].grad.block(0, 0, ra, c);
           nodes_[b].grad += nodes_[out].grad.block(ra, 0, rb, c);
         },
         out;
}

Tape::Var Tape::hconcat(Var a, Var b) {
  const auto& va = nodes_[a].val;
  const auto& vb = nodes_[b].val;
  if (va.rows() != vb.rows()) throw std::invalid_argument("hconcat: row mismatch");
  Eigen::MatrixXd v(va.rows(), va.cols() + vb.cols());
  v << va, vb;
  Var out = push(std::move(v));
  return nodes_[out].back = [this, a, b, out] {
           const auto r = nodes_[a].val.rows();
           const auto ca = nodes_[a].val.cols();
           const auto cb = nodes_[b].val.cols();
           nodes_[a].grad += nodes_[out].grad.block(0, 0, r, ca);
           nodes_[b].grad += nodes_[out].grad.block(0, ca, r, cb);
         },
         out;
}

Tape::Var Tape::rows(Var a, int start, int count) {
  Var out = push(nodes_[a].val.middleRows(start, count));
  return nodes_[out].back = [this, a, out, start, count] {
           nodes_[a].grad.middleRows(start, count) += nodes_[out].grad;
         },
         out;
}

Tape::Var Tape::normalize(Var a, double eps) {
  const auto& x = nodes_[a].val;
  const double n = double(x.size());
  const double mu = x.mean();
  const double var = (x.array() - mu).square().sum() / n;
  const double s = std::sqrt(var + eps);
  Var out = push((x.array() - mu) / s);
  return nodes_[out].back = [this, a, out, s, n] {
           const auto& g = nodes_[out].grad.array();
           const auto& y = nodes_[out].val.array();
           const double gm = g.sum() / n;
           const double gym = (g * y).sum() / n;
           nodes_[a].grad.array() += (g - gm - y * gym) / s;
         },
         out;
}

Tape::Var Tape::pairwise_sqdiff(Var a, Var b) {
  const auto& va = nodes_[a].val;
  const auto& vb = nodes_[b].val;
  if (va.rows() != vb.rows())
    throw std::invalid_argument("pairwise_sqdiff: dimension mismatch");
  Eigen::MatrixXd d(va.cols(), vb.cols());
  for (Eigen::Index i = 0; i < va.cols(); ++i)
    for (Eigen::Index j = 0; j < vb.cols(); ++j)
      d(i, j) = (va.col(i) - vb.col(j)).squaredNorm();
  Var out = push(std::move(d));
  return nodes_[out].back = [this, a, b, out] {
           const auto& va = nodes_[a].val;
           const auto& vb = nodes_[b].val;
           const auto& g = nodes_[out].grad;
           for (Eigen::Index i = 0; i < va.cols(); ++i)
             for (Eigen::Index j = 0; j < vb.cols(); ++j) {
               const Eigen::VectorXd diff = 2.0 * g(i, j) * (va.col(i) - vb.col(j));
               nodes_[a].grad.col(i) += diff;
               nodes_[b].grad.col(j) -= diff;
             }
         },
         out;
}

Tape::Var Tape::soft_dtw(Var delta, double gamma) {
  auto res = alignment::soft_dtw(nodes_[delta].val, gamma);
  Eigen::MatrixXd v(1, 1);
  v(0, 0) = res.dtw;
  Var out = push(std::move(v));
  return nodes_[out].back = [this, delta, out,
                             e = std::move(res.expected_alignment)] {
           nodes_[delta].grad += nodes_[out].grad(0, 0) * e;
         },
         out;
}

Tape::Var Tape::soft_tdi(Var delta, const Eigen::MatrixXd& omega, double gamma) {
  auto tabs = alignment::soft_alignment_tables(nodes_[delta].val, omega, gamma);
  Eigen::MatrixXd v(1, 1);
  v(0, 0) = tabs.tdi;
  Var out = push(std::move(v));
  return nodes_[out].back = [this, delta, out, omega, gamma,
                             tabs = std::move(tabs)] {
           nodes_[delta].grad += alignment::soft_tdi_grad_delta(
               nodes_[delta].val, omega, gamma, tabs, nodes_[out].grad(0, 0));
         },
         out;
}

Tape::Var Tape::dpp_diversity(Var k) {
  const auto& K = nodes_[k].val;
  const Eigen::Index n = K.rows();
  if (n != K.cols()) throw std::invalid_argument("dpp_diversity: K not square");
  Eigen::MatrixXd shifted = K + Eigen::MatrixXd::Identity(n, n);
  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("dpp_diversity: K + I is not positive definite");
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  Eigen::MatrixXd v(1, 1);
  v(0, 0) = -(double(n) - inv.trace());
  Var out = push(std::move(v));
  return nodes_[out].back = [this, k, out, inv = std::move(inv)] {
           nodes_[k].grad -= nodes_[out].grad(0, 0) * (inv * inv);
         },
         out;
}

Tape::Var Tape::from_scalars(int r, int c, const std::vector<Var>& entries) {
  if (int(entries.size()) != r * c)
    throw std::invalid_argument("from_scalars: entry count mismatch");
  Eigen::MatrixXd v(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) v(i, j) = nodes_[entries[i * c + j]].val(0, 0);
  Var out = push(std::move(v));
  return nodes_[out].back = [this, r, c, entries, out] {
           for (int i = 0; i < r; ++i)
             for (int j = 0; j < c; ++j)
               nodes_[entries[i * c + j]].grad(0, 0) += nodes_[out].grad(i, j);
         },
         out;
}

}  // namespace stripe::nn
