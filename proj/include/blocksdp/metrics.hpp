#pragma once

#include <Eigen/Dense>
#include <vector>

#include "blocksdp/model.hpp"
#include "blocksdp/objective.hpp"

namespace blocksdp {

// Minimal-cost perfect assignment on a square cost matrix (Hungarian
// algorithm); returns the column matched to each row.
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

// Fraction of disagreeing labels minimized over class relabelings.
double misclassification(const Labels& zhat, const Labels& z);

// Total symmetric difference under the best matching of estimated to true
// sets (unmatched sets cost their size), divided by sum |C_l|.
double community_set_error(const std::vector<std::vector<int>>& Chat,
                           const std::vector<std::vector<int>>& C);

// Bernoulli KL divergence with the 0 log 0 = 0 convention; +infinity when
// q is degenerate and p disagrees.
double kl_bernoulli(double p, double q);

// (1 / (n^2 rho)) sum_{i != j} KL(P_ij, Q_ij), rho the density of P.
double normalized_kl_risk(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q);

// Exhaustive min over labelings of the normalized KL risk against the
// blockmodel theta_{z_i z_j}; K^n <= 10^6 guarded.
double best_blockmodel_risk(const Eigen::MatrixXd& P, const ThetaHat& th);

// min over orthogonal O of ||Vhat O - V||_F^2 (orthonormal columns required).
double subspace_distance(const Eigen::MatrixXd& Vhat, const Eigen::MatrixXd& V);

// RMS row error after centering both point sets and aligning over the full
// orthogonal group.
double aligned_rms(const Eigen::MatrixXd& yhat, const Eigen::MatrixXd& y);

// Fraction of off-diagonal dyads where Phat differs from theta_{z_i z_j}.
double disagreement_fraction(const Eigen::MatrixXd& Phat, const Eigen::MatrixXd& theta,
                             const Labels& z);

}  // namespace blocksdp
