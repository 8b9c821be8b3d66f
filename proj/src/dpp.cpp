#include "stripe/dpp.hpp"

#include <cmath>
#include <stdexcept>

namespace stripe::dpp {

KernelKind kernel_kind_from_string(const std::string& name) {
  if (name == "shape") return KernelKind::Shape;
  if (name == "time") return KernelKind::Time;
  if (name == "mse") return KernelKind::MseRbf;
  if (name == "dilate") return KernelKind::Dilate;
  throw std::invalid_argument("unknown kernel kind: " + name);
}

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Shape: return "shape";
    case KernelKind::Time: return "time";
    case KernelKind::MseRbf: return "mse";
    case KernelKind::Dilate: return "dilate";
  }
  return "?";
}

double kernel_shape(const Trajectory& y1, const Trajectory& y2,
                    const LossConfig& cfg) {
  cfg.validate();
  const auto delta = alignment::cost_matrix_psd_log(y1, y2, cfg.gamma, cfg.sigma);
  const auto res = alignment::soft_dtw(delta.delta, cfg.gamma);
  return std::exp(-cfg.gamma * res.dtw);
}

double kernel_time(const Trajectory& y1, const Trajectory& y2,
                   const LossConfig& cfg) {
  cfg.validate();
  const auto delta = alignment::cost_matrix_psd_log(y1, y2, cfg.gamma, cfg.sigma);
  const auto omega = alignment::omega_similarity(int(y1.cols()));
  const auto tabs = alignment::soft_alignment_tables(delta.delta, omega, cfg.gamma);
  // Z * TDI with Z = e^{-DTW/gamma} = e^{log_partial(end)}
  return std::exp(-tabs.dtw / cfg.gamma) * tabs.tdi;
}

double kernel_mse_rbf(const Trajectory& y1, const Trajectory& y2,
                      double bandwidth) {
  if (bandwidth <= 0.0)
    throw std::invalid_argument("kernel_mse_rbf: bandwidth must be > 0");
  const double n = double(y1.size());
  return std::exp(-(y1 - y2).squaredNorm() / (bandwidth * bandwidth * n));
}

double kernel_dilate(const Trajectory& y1, const Trajectory& y2,
                     const LossConfig& cfg) {
  return std::exp(-cfg.gamma * losses::dilate_loss(y1, y2, cfg));
}

namespace {

double kernel_eval(const Trajectory& a, const Trajectory& b, KernelKind kind,
                   const LossConfig& cfg) {
  switch (kind) {
    case KernelKind::Shape: return kernel_shape(a, b, cfg);
    case KernelKind::Time: return kernel_time(a, b, cfg);
    case KernelKind::MseRbf: return kernel_mse_rbf(a, b, cfg.sigma);
    case KernelKind::Dilate: return kernel_dilate(a, b, cfg);
  }
  throw std::logic_error("unreachable kernel kind");
}

}  // namespace

KernelMatrix kernel_matrix(const std::vector<Trajectory>& set, KernelKind kind,
                           const LossConfig& cfg) {
  if (set.empty()) throw std::invalid_argument("kernel_matrix: empty set");
  const int n = int(set.size());
  KernelMatrix km;
  km.kind = kind;
  km.k.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double v = kernel_eval(set[i], set[j], kind, cfg);
      km.k(i, j) = v;
      km.k(j, i) = v;
    }
  km.k = 0.5 * (km.k + km.k.transpose()).eval();
  return km;
}

double diversity_loss(const KernelMatrix& km) {
  const Eigen::Index n = km.k.rows();
  if (n < 1 || n != km.k.cols())
    throw std::invalid_argument("diversity_loss: K must be square");
  Eigen::MatrixXd shifted = km.k + Eigen::MatrixXd::Identity(n, n);
  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(
        "diversity_loss: K + I is not positive definite (eigenvalue <= -1)");
  const double tr = llt.solve(Eigen::MatrixXd::Identity(n, n)).trace();
  return -(double(n) - tr);
}

double expected_cardinality(const KernelMatrix& km) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(km.k);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("expected_cardinality: eigendecomposition failed");
  const auto& ev = es.eigenvalues();
  const double max_eig = ev.maxCoeff();
  if (ev.minCoeff() < -1e-8 * std::max(1.0, max_eig))
    throw std::runtime_error("expected_cardinality: kernel is not PSD");
  double s = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) s += ev[i] / (1.0 + ev[i]);
  return s;
}

PsdCheck psd_check(const KernelMatrix& km, double tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(km.k,
                                                    Eigen::EigenvaluesOnly);
  PsdCheck out;
  out.min_eig = es.eigenvalues().minCoeff();
  out.max_eig = es.eigenvalues().maxCoeff();
  out.pass = out.min_eig >= -tol * std::max(1.0, out.max_eig);
  return out;
}

nn::Tape::Var kernel_var(nn::Tape& t, nn::Tape::Var y1, nn::Tape::Var y2,
                         KernelKind kind, const LossConfig& cfg) {
  using Var = nn::Tape::Var;
  switch (kind) {
    case KernelKind::Shape: {
      Var r = t.scale(t.pairwise_sqdiff(y1, y2), 1.0 / (cfg.sigma * cfg.sigma));
      Var delta = t.sub(t.scale(r, cfg.gamma),
                        t.scale(t.log(t.add_const(t.neg(t.exp(t.neg(r))), 2.0)),
                                cfg.gamma));
      return t.exp(t.scale(t.soft_dtw(delta, cfg.gamma), -cfg.gamma));
    }
    case KernelKind::Time: {
      const int tau = int(t.value(y1).cols());
      Var r = t.scale(t.pairwise_sqdiff(y1, y2), 1.0 / (cfg.sigma * cfg.sigma));
      Var delta = t.sub(t.scale(r, cfg.gamma),
                        t.scale(t.log(t.add_const(t.neg(t.exp(t.neg(r))), 2.0)),
                                cfg.gamma));
      Var z = t.exp(t.scale(t.soft_dtw(delta, cfg.gamma), -1.0 / cfg.gamma));
      return t.cmul(z, t.soft_tdi(delta, alignment::omega_similarity(tau),
                                  cfg.gamma));
    }
    case KernelKind::MseRbf: {
      const double n = double(t.value(y1).size());
      Var d = t.sum(t.square(t.sub(y1, y2)));
      return t.exp(t.scale(d, -1.0 / (cfg.sigma * cfg.sigma * n)));
    }
    case KernelKind::Dilate:
      return t.exp(
          t.scale(losses::dilate_loss_var(t, y1, y2, cfg), -cfg.gamma));
  }
  throw std::logic_error("unreachable kernel kind");
}

nn::Tape::Var kernel_matrix_var(nn::Tape& t,
                                const std::vector<nn::Tape::Var>& set,
                                KernelKind kind, const LossConfig& cfg) {
  if (set.empty()) throw std::invalid_argument("kernel_matrix_var: empty set");
  const int n = int(set.size());
  std::vector<nn::Tape::Var> entries(std::size_t(n) * n, -1);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      nn::Tape::Var v = kernel_var(t, set[i], set[j], kind, cfg);
      entries[std::size_t(i) * n + j] = v;
      entries[std::size_t(j) * n + i] = v;
    }
  return t.from_scalars(n, n, entries);
}

nn::Tape::Var diversity_loss_var(nn::Tape& t,
                                 const std::vector<nn::Tape::Var>& set,
                                 KernelKind kind, const LossConfig& cfg) {
  return t.dpp_diversity(kernel_matrix_var(t, set, kind, cfg));
}

std::vector<Eigen::MatrixXd> diversity_loss_grad(
    const std::vector<Trajectory>& set, KernelKind kind,
    const LossConfig& cfg) {
  nn::Tape t;
  std::vector<nn::Tape::Var> vars;
  vars.reserve(set.size());
  for (const Trajectory& y : set) vars.push_back(t.input(y));
  nn::Tape::Var loss = diversity_loss_var(t, vars, kind, cfg);
  t.backward(loss);
  std::vector<Eigen::MatrixXd> grads;
  grads.reserve(set.size());
  for (nn::Tape::Var v : vars) grads.push_back(t.grad(v));
  return grads;
}

}  // namespace stripe::dpp
