#include "stripe/alignment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace stripe::alignment {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double softmin3(double a, double b, double c, double gamma) {
  const double m = std::min(a, std::min(b, c));
  if (!(m < kInf)) return kInf;
  const double s = std::exp(-(a - m) / gamma) + std::exp(-(b - m) / gamma) +
                   std::exp(-(c - m) / gamma);
  return m - gamma * std::log(s);
}

void check_same_shape(const Trajectory& y1, const Trajectory& y2) {
  if (y1.rows() != y2.rows() || y1.cols() != y2.cols())
    throw std::invalid_argument("trajectory shape mismatch");
}

}  // namespace

CostMatrix cost_matrix_sqeuclid(const Trajectory& y1, const Trajectory& y2) {
  check_same_shape(y1, y2);
  const Eigen::Index n = y1.cols(), m = y2.cols();
  CostMatrix out;
  out.delta.resize(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      out.delta(i, j) = (y1.col(i) - y2.col(j)).squaredNorm();
  return out;
}

CostMatrix cost_matrix_psd_log(const Trajectory& y1, const Trajectory& y2,
                               double gamma, double sigma) {
  check_same_shape(y1, y2);
  if (gamma <= 0.0 || sigma <= 0.0)
    throw std::invalid_argument("cost_matrix_psd_log: gamma and sigma must be > 0");
  const Eigen::Index n = y1.cols(), m = y2.cols();
  CostMatrix out;
  out.gamma = gamma;
  out.delta.resize(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      const double r = (y1.col(i) - y2.col(j)).squaredNorm() / (sigma * sigma);
      // log argument lies in [1, 2), always safe
      out.delta(i, j) = gamma * (r - std::log(2.0 - std::exp(-r)));
    }
  return out;
}

Eigen::MatrixXd omega_similarity(int tau) {
  if (tau < 1) throw std::invalid_argument("omega_similarity: tau must be >= 1");
  Eigen::MatrixXd omega(tau, tau);
  for (int i = 0; i < tau; ++i)
    for (int j = 0; j < tau; ++j)
      omega(i, j) = 1.0 / (double(i - j) * double(i - j) + 1.0);
  return omega;
}

Eigen::MatrixXd omega_dissimilarity(int tau) {
  if (tau < 1) throw std::invalid_argument("omega_dissimilarity: tau must be >= 1");
  Eigen::MatrixXd omega(tau, tau);
  for (int i = 0; i < tau; ++i)
    for (int j = 0; j < tau; ++j)
      omega(i, j) = double(i - j) * double(i - j) / (double(tau) * double(tau));
  return omega;
}

AlignmentResult soft_dtw(const Eigen::MatrixXd& delta, double gamma) {
  if (gamma <= 0.0) throw std::invalid_argument("soft_dtw: gamma must be > 0");
  const Eigen::Index n = delta.rows(), m = delta.cols();
  if (n < 1 || m < 1) throw std::invalid_argument("soft_dtw: empty cost matrix");

  // Forward: R is 1-based with an infinite border.
  Eigen::MatrixXd R = Eigen::MatrixXd::Constant(n + 2, m + 2, kInf);
  R(0, 0) = 0.0;
  for (Eigen::Index i = 1; i <= n; ++i)
    for (Eigen::Index j = 1; j <= m; ++j)
      R(i, j) = delta(i - 1, j - 1) +
                softmin3(R(i - 1, j - 1), R(i - 1, j), R(i, j - 1), gamma);

  AlignmentResult res;
  res.dtw = R(n, m);
  res.log_partition = -res.dtw / gamma;

  // Backward: fill E = dR(n,m)/d(delta) in reverse order.
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n + 2, m + 2);
  D.block(1, 1, n, m) = delta;
  for (Eigen::Index i = 1; i <= n; ++i) R(i, m + 1) = -kInf;
  for (Eigen::Index j = 1; j <= m; ++j) R(n + 1, j) = -kInf;
  R(n + 1, m + 1) = R(n, m);
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n + 2, m + 2);
  E(n + 1, m + 1) = 1.0;
  for (Eigen::Index j = m; j >= 1; --j)
    for (Eigen::Index i = n; i >= 1; --i) {
      const double a = std::exp((R(i + 1, j) - R(i, j) - D(i + 1, j)) / gamma);
      const double b = std::exp((R(i, j + 1) - R(i, j) - D(i, j + 1)) / gamma);
      const double c =
          std::exp((R(i + 1, j + 1) - R(i, j) - D(i + 1, j + 1)) / gamma);
      E(i, j) = a * E(i + 1, j) + b * E(i, j + 1) + c * E(i + 1, j + 1);
    }
  res.expected_alignment = E.block(1, 1, n, m);
  return res;
}

double soft_tdi(const Eigen::MatrixXd& delta, const Eigen::MatrixXd& omega,
                double gamma) {
  if (delta.rows() != omega.rows() || delta.cols() != omega.cols())
    throw std::invalid_argument("soft_tdi: omega/delta shape mismatch");
  const AlignmentResult res = soft_dtw(delta, gamma);
  return (omega.array() * res.expected_alignment.array()).sum();
}

double hard_dtw(const Eigen::MatrixXd& delta) {
  const Eigen::Index n = delta.rows(), m = delta.cols();
  Eigen::MatrixXd R = Eigen::MatrixXd::Constant(n, m, kInf);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      double best = 0.0;
      if (i > 0 || j > 0) {
        best = kInf;
        if (i > 0 && j > 0) best = std::min(best, R(i - 1, j - 1));
        if (i > 0) best = std::min(best, R(i - 1, j));
        if (j > 0) best = std::min(best, R(i, j - 1));
      }
      R(i, j) = delta(i, j) + best;
    }
  return R(n - 1, m - 1);
}

double hard_tdi(const Eigen::MatrixXd& delta, const Eigen::MatrixXd& omega) {
  if (delta.rows() != omega.rows() || delta.cols() != omega.cols())
    throw std::invalid_argument("hard_tdi: omega/delta shape mismatch");
  const Eigen::Index n = delta.rows(), m = delta.cols();
  Eigen::MatrixXd R = Eigen::MatrixXd::Constant(n, m, kInf);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      double best = 0.0;
      if (i > 0 || j > 0) {
        best = kInf;
        if (i > 0 && j > 0) best = std::min(best, R(i - 1, j - 1));
        if (i > 0) best = std::min(best, R(i - 1, j));
        if (j > 0) best = std::min(best, R(i, j - 1));
      }
      R(i, j) = delta(i, j) + best;
    }
  // Backtrack the argmin path, ties broken diagonal > vertical > horizontal.
  double tdi = 0.0;
  Eigen::Index i = n - 1, j = m - 1;
  while (true) {
    tdi += omega(i, j);
    if (i == 0 && j == 0) break;
    const double want = R(i, j) - delta(i, j);
    if (i > 0 && j > 0 && R(i - 1, j - 1) == want) {
      --i;
      --j;
    } else if (i > 0 && R(i - 1, j) == want) {
      --i;
    } else {
      --j;
    }
  }
  return tdi;
}

BruteForceResult brute_force_alignment(const Eigen::MatrixXd& delta,
                                       const Eigen::MatrixXd& omega,
                                       double gamma) {
  const Eigen::Index n = delta.rows(), m = delta.cols();
  if (n > 7 || m > 7)
    throw std::invalid_argument("brute_force_alignment: grid larger than 7x7");
  if (delta.rows() != omega.rows() || delta.cols() != omega.cols())
    throw std::invalid_argument("brute_force_alignment: shape mismatch");
  if (gamma <= 0.0) throw std::invalid_argument("gamma must be > 0");

  struct Path {
    double cost;
    double omega_sum;
    std::vector<std::pair<int, int>> cells;
  };
  std::vector<Path> paths;
  std::vector<std::pair<int, int>> cur;

  // Enumerate all monotone paths with moves down / right / diagonal.
  auto dfs = [&](auto&& self, int i, int j, double cost, double osum) -> void {
    cur.emplace_back(i, j);
    cost += delta(i, j);
    osum += omega(i, j);
    if (i == n - 1 && j == m - 1) {
      paths.push_back({cost, osum, cur});
    } else {
      if (i + 1 < n && j + 1 < m) self(self, i + 1, j + 1, cost, osum);
      if (i + 1 < n) self(self, i + 1, j, cost, osum);
      if (j + 1 < m) self(self, i, j + 1, cost, osum);
    }
    cur.pop_back();
  };
  dfs(dfs, 0, 0, 0.0, 0.0);

  double min_cost = kInf;
  for (const Path& p : paths) min_cost = std::min(min_cost, p.cost);

  double z = 0.0, v = 0.0;
  Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(n, m);
  for (const Path& p : paths) {
    const double w = std::exp(-(p.cost - min_cost) / gamma);
    z += w;
    v += w * p.omega_sum;
    for (const auto& [ci, cj] : p.cells) expect(ci, cj) += w;
  }
  BruteForceResult res;
  res.dtw = min_cost - gamma * std::log(z);
  res.tdi = v / z;
  res.expected_alignment = expect / z;
  res.n_paths = static_cast<long>(paths.size());
  return res;
}

SoftAlignmentTables soft_alignment_tables(const Eigen::MatrixXd& delta,
                                          const Eigen::MatrixXd& omega,
                                          double gamma) {
  if (gamma <= 0.0) throw std::invalid_argument("gamma must be > 0");
  if (delta.rows() != omega.rows() || delta.cols() != omega.cols())
    throw std::invalid_argument("soft_alignment_tables: shape mismatch");
  const Eigen::Index n = delta.rows(), m = delta.cols();
  SoftAlignmentTables t;
  t.log_partial.resize(n, m);
  t.omega_expect.resize(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      double lp[3];
      double sp[3];
      int np = 0;
      if (i > 0 && j > 0) {
        lp[np] = t.log_partial(i - 1, j - 1);
        sp[np++] = t.omega_expect(i - 1, j - 1);
      }
      if (i > 0) {
        lp[np] = t.log_partial(i - 1, j);
        sp[np++] = t.omega_expect(i - 1, j);
      }
      if (j > 0) {
        lp[np] = t.log_partial(i, j - 1);
        sp[np++] = t.omega_expect(i, j - 1);
      }
      if (np == 0) {
        t.log_partial(i, j) = -delta(i, j) / gamma;
        t.omega_expect(i, j) = omega(i, j);
        continue;
      }
      double mx = lp[0];
      for (int p = 1; p < np; ++p) mx = std::max(mx, lp[p]);
      double z = 0.0, s = 0.0;
      for (int p = 0; p < np; ++p) {
        const double w = std::exp(lp[p] - mx);
        z += w;
        s += w * sp[p];
      }
      t.log_partial(i, j) = -delta(i, j) / gamma + mx + std::log(z);
      t.omega_expect(i, j) = omega(i, j) + s / z;
    }
  t.dtw = -gamma * t.log_partial(n - 1, m - 1);
  t.tdi = t.omega_expect(n - 1, m - 1);
  return t;
}

Eigen::MatrixXd soft_tdi_grad_delta(const Eigen::MatrixXd& delta,
                                    const Eigen::MatrixXd& omega, double gamma,
                                    const SoftAlignmentTables& tabs,
                                    double upstream) {
  const Eigen::Index n = delta.rows(), m = delta.cols();
  Eigen::MatrixXd gL = Eigen::MatrixXd::Zero(n, m);
  Eigen::MatrixXd gS = Eigen::MatrixXd::Zero(n, m);
  Eigen::MatrixXd gd = Eigen::MatrixXd::Zero(n, m);
  gS(n - 1, m - 1) = upstream;

  for (Eigen::Index i = n - 1; i >= 0; --i)
    for (Eigen::Index j = m - 1; j >= 0; --j) {
      Eigen::Index pi[3], pj[3];
      int np = 0;
      if (i > 0 && j > 0) {
        pi[np] = i - 1;
        pj[np++] = j - 1;
      }
      if (i > 0) {
        pi[np] = i - 1;
        pj[np++] = j;
      }
      if (j > 0) {
        pi[np] = i;
        pj[np++] = j - 1;
      }
      gd(i, j) += gL(i, j) * (-1.0 / gamma);
      if (np == 0) continue;
      double mx = tabs.log_partial(pi[0], pj[0]);
      for (int p = 1; p < np; ++p)
        mx = std::max(mx, tabs.log_partial(pi[p], pj[p]));
      double z = 0.0;
      double w[3];
      for (int p = 0; p < np; ++p) {
        w[p] = std::exp(tabs.log_partial(pi[p], pj[p]) - mx);
        z += w[p];
      }
      const double sbar = tabs.omega_expect(i, j) - omega(i, j);
      for (int p = 0; p < np; ++p) {
        w[p] /= z;
        gS(pi[p], pj[p]) += gS(i, j) * w[p];
        gL(pi[p], pj[p]) +=
            gS(i, j) * w[p] * (tabs.omega_expect(pi[p], pj[p]) - sbar) +
            gL(i, j) * w[p];
      }
    }
  return gd;
}

}  // namespace stripe::alignment
