#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "blocksdp/model.hpp"
#include "blocksdp/objective.hpp"
#include "blocksdp/solver.hpp"

namespace blocksdp {

// Everything recovered from one SDP solution; model-specific members stay
// empty when not applicable.
struct EstimateBundle {
  EdgeProbMatrix Phat;
  std::optional<EdgeProbMatrix> Ptilde;
  Labels zhat;
  Eigen::MatrixXd theta_est;
  std::vector<std::vector<int>> communities;  // overlapping model
  std::optional<Eigen::MatrixXd> Dhat;        // latent model
  std::optional<Eigen::MatrixXd> coords;      // latent model
};

// Coordinates of the (2k)^d torus grid classes and their pairwise squared
// toric distances.
struct ToricGrid {
  int k = 0;
  int d = 0;
  Eigen::MatrixXd points;  // K x d, entries in [0,2)
  Eigen::MatrixXd sqdist;  // K x K
};

// Dyad-wise mode of the theta values under X^(ij), mass averaged over the
// (i,j) and (j,i) blocks; ties go to the smallest value.
EdgeProbMatrix map_estimate_P(const SdpSolution& X, const ThetaHat& th);

// Dyad-wise sample: P~_ij = theta_ab with probability X^(ij)_ab.
EdgeProbMatrix randomized_estimate_P(const SdpSolution& X, const ThetaHat& th, std::uint64_t seed);

// K-means (10 restarts, Lloyd) on the rows of the K largest-|lambda|
// eigenvectors of M.
Labels spectral_cluster(const Eigen::MatrixXd& M, int K, std::uint64_t seed);

// Between-block edge densities induced by zhat; empty cells give 0 with a
// warning.
Eigen::MatrixXd estimate_theta(const Adjacency& A, const Labels& zhat, int K);

// Ghat_ab = 1{theta_est_ab >= (gamma0 + gamma1)/2}; requires gamma0 > gamma1.
Eigen::MatrixXd threshold_graph(const Eigen::MatrixXd& theta_est, double gamma0, double gamma1);

// All maximal cliques (Bron-Kerbosch), each sorted, list sorted; K <= 64.
std::vector<std::vector<int>> maximal_cliques(const Eigen::MatrixXd& G);

// C_l = { i : zhat_i in clique_l }.
std::vector<std::vector<int>> overlapping_communities(const Labels& zhat,
                                                      const std::vector<std::vector<int>>& cliques);

ToricGrid toric_grid(int k, int d);

// theta_ab = logistic(-delta(gamma_a, gamma_b)/sigma) with the toric scheme
// attached.
ThetaHat latent_theta(int k, int d, double sigma);

// Dyad-wise mode of squared-distance values under X^(ij); ties go to the
// smallest distance.
Eigen::MatrixXd map_estimate_D(const SdpSolution& X, const ToricGrid& grid);

Eigen::MatrixXd randomized_estimate_D(const SdpSolution& X, const ToricGrid& grid,
                                      std::uint64_t seed);

// Classical MDS: top-d eigencoordinates of -1/2 (I - J/n) D (I - J/n).
Eigen::MatrixXd embed_coordinates(const Eigen::MatrixXd& D, int d);

}  // namespace blocksdp
