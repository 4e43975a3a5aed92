#include "blocksdp/objective.hpp"

#include <cmath>
#include <stdexcept>

namespace blocksdp {

namespace {

constexpr double kClamp = 1e-12;

Eigen::MatrixXd clamped(const Eigen::MatrixXd& theta) {
  if (theta.rows() != theta.cols()) throw std::invalid_argument("theta must be square");
  return theta.cwiseMax(kClamp).cwiseMin(1.0 - kClamp);
}

BlockMatrix build_from_weights(const Eigen::MatrixXd& W, const ThetaHat& th,
                               const ObjectiveOptions& opts) {
  const int n = static_cast<int>(W.rows());
  const int K = th.K();
  const Eigen::MatrixXd log_t = th.theta.array().log().matrix();
  const Eigen::MatrixXd log_1mt = (1.0 - th.theta.array()).log().matrix();
  BlockMatrix F(n, K);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j && !opts.include_diagonal_blocks) continue;
      double w = (i == j) ? 0.0 : W(i, j);
      F.block(i, j) = w * log_t + (1.0 - w) * log_1mt;
    }
  }
  return F;
}

}  // namespace

ThetaHat ThetaHat::from_matrix(const Eigen::MatrixXd& theta) {
  ThetaHat th;
  th.theta = clamped(theta);
  th.value_classes = equal_value_classes(th.theta);
  return th;
}

ThetaHat ThetaHat::from_scheme(const SchemeBasis& basis, const SchemeCoeffs& coeffs) {
  ThetaHat th = from_matrix(expand(coeffs, basis));
  // Re-read the coefficients off the clamped matrix so expand(coeffs) stays
  // an exact reconstruction.
  th.scheme = SchemeAttachment{basis, decompose(th.theta, basis)};
  return th;
}

BlockMatrix build_objective(const Adjacency& A, const ThetaHat& th, ObjectiveOptions opts) {
  return build_from_weights(A.dense(), th, opts);
}

BlockMatrix build_ideal_objective(const EdgeProbMatrix& P, const ThetaHat& th,
                                  ObjectiveOptions opts) {
  return build_from_weights(P.P, th, opts);
}

double combinatorial_value(const BlockMatrix& F, const Labels& z) {
  if (z.n() != F.n) throw std::invalid_argument("label count mismatch");
  double total = 0.0;
  for (int i = 0; i < F.n; ++i)
    for (int j = 0; j < F.n; ++j) total += F.data(z.z[i] + i * F.K, z.z[j] + j * F.K);
  return total;
}

std::pair<Labels, double> brute_force_ml(const BlockMatrix& F) {
  const int n = F.n;
  const int K = F.K;
  double combos = std::pow(static_cast<double>(K), n);
  if (combos > 1e6) throw std::invalid_argument("instance too large for brute force");

  Labels z;
  z.z.assign(n, 0);
  Labels best = z;
  double best_val = combinatorial_value(F, z);
  // Odometer enumeration with the last coordinate fastest visits labelings
  // in lexicographic order, so strict improvement keeps the first maximizer.
  while (true) {
    int pos = n - 1;
    while (pos >= 0 && z.z[pos] == K - 1) {
      z.z[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++z.z[pos];
    double val = combinatorial_value(F, z);
    if (val > best_val) {
      best_val = val;
      best = z;
    }
  }
  return {best, best_val};
}

}  // namespace blocksdp
