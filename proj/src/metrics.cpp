#include "blocksdp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace blocksdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t symmetric_difference_size(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t i = 0, j = 0, count = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
      ++count;
    } else {
      ++j;
      ++count;
    }
  }
  return count + (a.size() - i) + (b.size() - j);
}

}  // namespace

std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols()) throw std::invalid_argument("cost matrix must be square");
  const int n = static_cast<int>(cost.rows());
  if (n == 0) return {};

  // Potentials method, 1-based with a dummy row/column 0.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j)
        if (!used[j]) {
          double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
          if (minv[j] < delta) {
            delta = minv[j];
            j1 = j;
          }
        }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

double misclassification(const Labels& zhat, const Labels& z) {
  if (zhat.n() != z.n()) throw std::invalid_argument("label length mismatch");
  const int n = z.n();
  if (n == 0) return 0.0;
  const int K = std::max(zhat.num_classes(), z.num_classes());

  Eigen::MatrixXd agree = Eigen::MatrixXd::Zero(K, K);
  for (int i = 0; i < n; ++i) agree(zhat.z[i], z.z[i]) += 1.0;

  std::vector<int> match = min_cost_assignment(-agree);
  double hits = 0.0;
  for (int a = 0; a < K; ++a) hits += agree(a, match[a]);
  return 1.0 - hits / n;
}

double community_set_error(const std::vector<std::vector<int>>& Chat,
                           const std::vector<std::vector<int>>& C) {
  const int mh = static_cast<int>(Chat.size());
  const int mt = static_cast<int>(C.size());
  double denom = 0.0;
  for (const auto& set : C) denom += static_cast<double>(set.size());

  auto sorted = [](const std::vector<int>& s) {
    std::vector<int> out = s;
    std::sort(out.begin(), out.end());
    return out;
  };
  std::vector<std::vector<int>> hs, ts;
  for (const auto& s : Chat) hs.push_back(sorted(s));
  for (const auto& s : C) ts.push_back(sorted(s));

  const int dim = mh + mt;
  if (dim == 0) return 0.0;
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      if (i < mh && j < mt)
        cost(i, j) = static_cast<double>(symmetric_difference_size(hs[i], ts[j]));
      else if (i < mh)
        cost(i, j) = static_cast<double>(hs[i].size());  // unmatched estimate
      else if (j < mt)
        cost(i, j) = static_cast<double>(ts[j].size());  // unmatched truth
    }

  std::vector<int> match = min_cost_assignment(cost);
  double total = 0.0;
  for (int i = 0; i < dim; ++i) total += cost(i, match[i]);
  if (denom == 0.0) return total > 0.0 ? 1.0 : 0.0;
  return total / denom;
}

double kl_bernoulli(double p, double q) {
  if (p < 0.0 || p > 1.0 || q < 0.0 || q > 1.0)
    throw std::invalid_argument("kl_bernoulli arguments must lie in [0,1]");
  auto term = [](double x, double y) {
    if (x == 0.0) return 0.0;
    if (y == 0.0) return kInf;
    return x * std::log(x / y);
  };
  return term(p, q) + term(1.0 - p, 1.0 - q);
}

double normalized_kl_risk(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q) {
  const int n = static_cast<int>(P.rows());
  if (Q.rows() != n || Q.cols() != P.cols() || P.cols() != n)
    throw std::invalid_argument("size mismatch");
  double rho = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) rho += P(i, j);
  rho /= static_cast<double>(n) * (n - 1);
  if (rho == 0.0) throw std::invalid_argument("P has zero density");

  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) total += kl_bernoulli(P(i, j), Q(i, j));
  return total / (static_cast<double>(n) * n * rho);
}

double best_blockmodel_risk(const Eigen::MatrixXd& P, const ThetaHat& th) {
  const int n = static_cast<int>(P.rows());
  const int K = th.K();
  if (std::pow(static_cast<double>(K), n) > 1e6)
    throw std::invalid_argument("instance too large for exhaustive risk");

  double rho = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) rho += P(i, j);
  rho /= static_cast<double>(n) * (n - 1);
  if (rho == 0.0) throw std::invalid_argument("P has zero density");

  // kl(P_ij, theta_ab) per dyad and class pair, indexed [i*n + j][a*K + b].
  std::vector<std::vector<double>> tab(n * n, std::vector<double>(K * K, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int a = 0; a < K; ++a)
        for (int b = 0; b < K; ++b)
          tab[i * n + j][a * K + b] = kl_bernoulli(P(i, j), th.theta(a, b));

  std::vector<int> z(n, 0);
  double best = kInf;
  while (true) {
    double total = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) total += tab[i * n + j][z[i] * K + z[j]];
    best = std::min(best, total);

    int pos = n - 1;
    while (pos >= 0 && z[pos] == K - 1) {
      z[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++z[pos];
  }
  return best / (static_cast<double>(n) * n * rho);
}

double subspace_distance(const Eigen::MatrixXd& Vhat, const Eigen::MatrixXd& V) {
  if (Vhat.rows() != V.rows() || Vhat.cols() != V.cols())
    throw std::invalid_argument("size mismatch");
  const int K = static_cast<int>(V.cols());
  auto check_orthonormal = [K](const Eigen::MatrixXd& M, const char* name) {
    Eigen::MatrixXd G = M.transpose() * M;
    if ((G - Eigen::MatrixXd::Identity(K, K)).cwiseAbs().maxCoeff() > 1e-8)
      throw std::invalid_argument(std::string(name) + " must have orthonormal columns");
  };
  check_orthonormal(Vhat, "Vhat");
  check_orthonormal(V, "V");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Vhat.transpose() * V,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXd O = svd.matrixU() * svd.matrixV().transpose();
  return (Vhat * O - V).squaredNorm();
}

double aligned_rms(const Eigen::MatrixXd& yhat, const Eigen::MatrixXd& y) {
  if (yhat.rows() != y.rows() || yhat.cols() != y.cols())
    throw std::invalid_argument("size mismatch");
  const int n = static_cast<int>(y.rows());
  if (n == 0) return 0.0;
  Eigen::MatrixXd A = yhat.rowwise() - yhat.colwise().mean();
  Eigen::MatrixXd B = y.rowwise() - y.colwise().mean();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A.transpose() * B,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXd O = svd.matrixU() * svd.matrixV().transpose();
  return (A * O - B).norm() / std::sqrt(static_cast<double>(n));
}

double disagreement_fraction(const Eigen::MatrixXd& Phat, const Eigen::MatrixXd& theta,
                             const Labels& z) {
  const int n = static_cast<int>(Phat.rows());
  if (z.n() != n) throw std::invalid_argument("label count mismatch");
  double count = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && Phat(i, j) != theta(z.z[i], z.z[j])) count += 1.0;
  return count / (static_cast<double>(n) * (n - 1));
}

}  // namespace blocksdp
