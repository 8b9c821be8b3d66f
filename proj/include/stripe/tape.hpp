#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace stripe::nn {

// Reverse-mode tape over matrix-valued nodes. One forward pass records the
// graph; backward() traverses it once in reverse and is a no-op afterwards
// until new nodes are recorded. Tapes are cheap, single-use objects: build
// one per training step and discard it.
class Tape {
 public:
  using Var = int;

  Var input(const Eigen::MatrixXd& v);  // leaf
  Var scalar(double v);                 // 1x1 leaf

  const Eigen::MatrixXd& value(Var v) const { return nodes_[v].val; }
  const Eigen::MatrixXd& grad(Var v) const { return nodes_[v].grad; }
  double value_scalar(Var v) const { return nodes_[v].val(0, 0); }

  // Seeds d(root)=1 (root must be 1x1) and backpropagates through every
  // recorded node.
  void backward(Var root);

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var cmul(Var a, Var b);  // elementwise
  Var scale(Var a, double s);
  Var add_const(Var a, double c);
  Var neg(Var a) { return scale(a, -1.0); }
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var leaky_relu(Var a, double slope = 0.01);
  Var exp(Var a);
  Var log(Var a);
  Var square(Var a);
  Var sum(Var a);   // 1x1
  Var mean(Var a);  // 1x1
  Var vconcat(Var a, Var b);
  Var hconcat(Var a, Var b);
  Var rows(Var a, int start, int count);

  // (x - mean) / sqrt(var + eps) over all entries of a vector.
  Var normalize(Var a, double eps = 1e-5);

  // Columns of a (d x n) and b (d x m) -> n x m matrix of squared distances.
  Var pairwise_sqdiff(Var a, Var b);

  // Fused alignment nodes; delta is a tau1 x tau2 cost-matrix var.
  Var soft_dtw(Var delta, double gamma);
  Var soft_tdi(Var delta, const Eigen::MatrixXd& omega, double gamma);

  // -Trace(I - (K+I)^{-1}); backward is -(K+I)^{-2}. K must be symmetric
  // with eigenvalues > -1.
  Var dpp_diversity(Var k);

  // Builds an r x c matrix from scalar vars laid out row-major.
  Var from_scalars(int r, int c, const std::vector<Var>& entries);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Eigen::MatrixXd val;
    Eigen::MatrixXd grad;
    std::function<void()> back;  // empty for leaves
  };
  Var push(Eigen::MatrixXd val, std::function<void()> back = {});
  std::vector<Node> nodes_;
};

}  // namespace stripe::nn
