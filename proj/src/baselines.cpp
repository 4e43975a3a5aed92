#include "blocksdp/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "blocksdp/estimators.hpp"

namespace blocksdp {

Labels spectral_cluster_adjacency(const Adjacency& A, int K, std::uint64_t seed) {
  return spectral_cluster(A.dense(), K, seed);
}

EdgeProbMatrix usvt_estimate(const Adjacency& A, double c) {
  if (A.n < 2) throw std::invalid_argument("usvt needs at least two nodes");
  const int n = A.n;
  double rho = std::max(empirical_density(A), 1.0 / n);
  double threshold = c * std::sqrt(n * rho);

  // A is symmetric, so singular values are |eigenvalues| and the truncated
  // SVD is a truncated eigendecomposition.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.dense());
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double lam = es.eigenvalues()(i);
    if (std::abs(lam) > threshold)
      P += lam * es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose();
  }
  P = P.cwiseMax(0.0).cwiseMin(1.0);
  P = 0.5 * (P + P.transpose());
  P.diagonal().setZero();
  return EdgeProbMatrix{P};
}

Eigen::MatrixXd usvt_latent(const Adjacency& A, double sigma, int d, double c) {
  if (sigma <= 0.0) throw std::invalid_argument("sigma must be positive");
  constexpr double eps = 1e-6;
  Eigen::MatrixXd P = usvt_estimate(A, c).P.cwiseMax(eps).cwiseMin(1.0 - eps);
  const int n = A.n;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      // log odds < 0 (P > 1/2) would mean negative distance; clamp at 0.
      double dist = std::max(0.0, sigma * std::log((1.0 - P(i, j)) / P(i, j)));
      D(i, j) = dist * dist;
    }
  return embed_coordinates(D, d);
}

}  // namespace blocksdp
