#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>

#include "blocksdp/model.hpp"
#include "blocksdp/scheme.hpp"

namespace blocksdp {

// Symmetric nK x nK matrix addressed by (node pair, class pair) blocks:
// M^{(ij)}_{ab} = data(a + i*K, b + j*K) with 0-based i,j,a,b.
struct BlockMatrix {
  int n = 0;
  int K = 0;
  Eigen::MatrixXd data;

  BlockMatrix() = default;
  BlockMatrix(int n_, int K_) : n(n_), K(K_), data(Eigen::MatrixXd::Zero(n_ * K_, n_ * K_)) {}

  int dim() const { return n * K; }
  auto block(int i, int j) { return data.block(i * K, j * K, K, K); }
  auto block(int i, int j) const { return data.block(i * K, j * K, K, K); }
};

struct SchemeAttachment {
  SchemeBasis basis;
  SchemeCoeffs coeffs;
};

// Solver-side parameter matrix: clamped into (0,1), with its equal-value
// partition and an optional scheme representation.
struct ThetaHat {
  Eigen::MatrixXd theta;  // clamped copy
  ValuePartition value_classes;
  std::optional<SchemeAttachment> scheme;

  int K() const { return static_cast<int>(theta.rows()); }

  static ThetaHat from_matrix(const Eigen::MatrixXd& theta);
  static ThetaHat from_scheme(const SchemeBasis& basis, const SchemeCoeffs& coeffs);
};

struct ObjectiveOptions {
  // The model places no likelihood on self-pairs (P_ii = 0); by default the
  // diagonal blocks are zeroed rather than filled with log(1-theta) terms.
  bool include_diagonal_blocks = false;
};

// F^{(ij)}_{ab} = A_ij log theta_ab + (1 - A_ij) log(1 - theta_ab).
BlockMatrix build_objective(const Adjacency& A, const ThetaHat& th, ObjectiveOptions opts = {});

// Same with P_ij in place of A_ij.
BlockMatrix build_ideal_objective(const EdgeProbMatrix& P, const ThetaHat& th,
                                  ObjectiveOptions opts = {});

// sum_{i,j} F^{(ij)}_{z_i z_j} = <F, x(z) x(z)^T>.
double combinatorial_value(const BlockMatrix& F, const Labels& z);

// Exhaustive maximizer of combinatorial_value; K^n <= 10^6 guarded, ties
// broken toward the lexicographically first labeling.
std::pair<Labels, double> brute_force_ml(const BlockMatrix& F);

}  // namespace blocksdp
