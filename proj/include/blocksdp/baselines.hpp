#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "blocksdp/model.hpp"

namespace blocksdp {

// Spectral clustering applied directly to the adjacency matrix.
Labels spectral_cluster_adjacency(const Adjacency& A, int K, std::uint64_t seed);

// Universal singular value thresholding: drop singular values below
// c * sqrt(n * max(density, 1/n)), clip the reassembly into [0,1].
EdgeProbMatrix usvt_estimate(const Adjacency& A, double c = 2.01);

// USVT estimate of P, inverted through the logistic link to squared
// distances, then embedded by classical MDS.
Eigen::MatrixXd usvt_latent(const Adjacency& A, double sigma, int d, double c = 2.01);

}  // namespace blocksdp
