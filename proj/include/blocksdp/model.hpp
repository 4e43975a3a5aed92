#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace blocksdp {

// Node class assignments. Classes are 0-based in memory; file formats and
// CLI output use 1..K.
struct Labels {
  std::vector<int> z;

  int n() const { return static_cast<int>(z.size()); }
  int num_classes() const;  // 1 + max entry; 0 for empty
};

// Blockmodel parameters (K classes, symmetric connectivity theta, class
// distribution pi).
struct BlockParams {
  int K = 0;
  Eigen::MatrixXd theta;  // K x K, symmetric, entries in [0,1]
  Eigen::VectorXd pi;     // length K, sums to 1

  static BlockParams make(const Eigen::MatrixXd& theta, const Eigen::VectorXd& pi);
};

// Dyad probability matrix of the general Bernoulli model: symmetric, zero
// diagonal, entries in [0,1].
struct EdgeProbMatrix {
  Eigen::MatrixXd P;

  int n() const { return static_cast<int>(P.rows()); }
  static EdgeProbMatrix make(const Eigen::MatrixXd& P);
};

// Undirected simple graph stored as a sorted upper-triangular edge list.
struct Adjacency {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // i < j, sorted

  Eigen::MatrixXd dense() const;
  std::size_t edge_count() const { return edges.size(); }
  bool has_edge(int i, int j) const;
  static Adjacency from_dense(const Eigen::MatrixXd& A);
};

// Latent space model configuration: coordinates in [0,1]^d and bandwidth.
struct LatentConfig {
  int d = 0;
  double sigma = 1.0;
  Eigen::MatrixXd coords;  // n x d, rows in [0,1]^d

  static LatentConfig make(double sigma, const Eigen::MatrixXd& coords);
};

// Sparse-regime parametrization theta* = alpha * B* with a candidate Bhat.
struct SparseScaling {
  double alpha = 0.0;
  Eigen::MatrixXd Bstar;
  Eigen::MatrixXd Bhat;
};

// Partition of [K]^2 into cells of equal matrix value (bitwise equality).
struct ValuePartition {
  std::vector<double> values;                            // one per cell
  std::vector<std::vector<std::pair<int, int>>> cells;   // (a,b) pairs per cell
  Eigen::MatrixXi cell_of;                               // K x K -> cell index

  int num_cells() const { return static_cast<int>(values.size()); }
};

// Result of the structure/Bregman misspecification check.
struct MisspecReport {
  bool pass = false;
  bool partition_mismatch = false;
  // (a,b,c,d) tuples violating the strict Bregman inequality.
  std::vector<std::array<int, 4>> violations;
};

Labels sample_labels(const Eigen::VectorXd& pi, int n, std::uint64_t seed);

// P_ij = theta_{z_i z_j} with the diagonal retained (used by spectrum checks).
Eigen::MatrixXd block_lookup_matrix(const Eigen::MatrixXd& theta, const Labels& z);

// P_ij = theta_{z_i z_j} off-diagonal, P_ii = 0.
EdgeProbMatrix block_probability_matrix(const Eigen::MatrixXd& theta, const Labels& z);

// Independent Bernoulli(P_ij) draws on the upper triangle, keyed per
// unordered pair (seed, node_ids[i], node_ids[j]). node_ids defaults to
// 0..n-1; passing a permutation reproduces a relabeled graph.
Adjacency sample_adjacency(const EdgeProbMatrix& P, std::uint64_t seed,
                           const std::vector<int>* node_ids = nullptr);

// P_ij = logistic(-||y_i - y_j|| / sigma), zero diagonal.
EdgeProbMatrix latent_probability_matrix(const LatentConfig& cfg);

// (1/(n(n-1))) * sum_ij A_ij; each edge counts twice in the numerator.
double empirical_density(const Adjacency& A);

ValuePartition equal_value_classes(const Eigen::MatrixXd& B);

MisspecReport check_misspecification(const Eigen::MatrixXd& Bhat, const Eigen::MatrixXd& Bstar);

// n*alpha times the eigenvalues of Dhat^{1/2} B* Dhat^{1/2}, Dhat the
// diagonal matrix of empirical class frequencies of z. Sorted ascending.
Eigen::VectorXd expected_spectrum(const Eigen::MatrixXd& Bstar, const Labels& z, double alpha);

}  // namespace blocksdp
