#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "blocksdp/baselines.hpp"
#include "blocksdp/estimators.hpp"
#include "blocksdp/metrics.hpp"
#include "blocksdp/rng.hpp"

using namespace blocksdp;

TEST_CASE("spectral_cluster_adjacency") {
  SUBCASE("dense planted bisection") {
    const int n = 60;
    Eigen::MatrixXd theta(2, 2);
    theta << 0.8, 0.1, 0.1, 0.8;
    Labels z;
    for (int i = 0; i < n; ++i) z.z.push_back(i < n / 2 ? 0 : 1);
    Adjacency A = sample_adjacency(block_probability_matrix(theta, z), 19);
    Labels zhat = spectral_cluster_adjacency(A, 2, 1);
    CHECK(misclassification(zhat, z) < 0.05);
  }
  SUBCASE("empty graph degenerates without error") {
    Adjacency A{10, {}};
    Labels zhat = spectral_cluster_adjacency(A, 2, 1);
    CHECK(zhat.n() == 10);
  }
}

TEST_CASE("usvt_estimate") {
  SUBCASE("complete graph keeps the dominant direction") {
    const int n = 20;
    Adjacency A;
    A.n = n;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) A.edges.emplace_back(i, j);
    EdgeProbMatrix P = usvt_estimate(A);
    Eigen::MatrixXd expect = Eigen::MatrixXd::Ones(n, n);
    expect.diagonal().setZero();
    CHECK((P.P - expect).cwiseAbs().maxCoeff() <= 0.1);
  }
  SUBCASE("empty graph gives zero") {
    Adjacency A{10, {}};
    CHECK(usvt_estimate(A).P.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("rank-2 dense P is recovered to moderate accuracy") {
    const int n = 200;
    Eigen::MatrixXd theta(2, 2);
    theta << 0.7, 0.3, 0.3, 0.5;
    Labels z;
    for (int i = 0; i < n; ++i) z.z.push_back(i % 2);
    EdgeProbMatrix P = block_probability_matrix(theta, z);
    Adjacency A = sample_adjacency(P, 7);
    EdgeProbMatrix Phat = usvt_estimate(A);
    CHECK((Phat.P - P.P).norm() / P.P.norm() < 0.2);
  }
  SUBCASE("output is symmetric with zero diagonal in [0,1]") {
    Eigen::MatrixXd Pm = Eigen::MatrixXd::Constant(30, 30, 0.4);
    Pm.diagonal().setZero();
    Adjacency A = sample_adjacency(EdgeProbMatrix{Pm}, 3);
    EdgeProbMatrix Phat = usvt_estimate(A);
    CHECK((Phat.P - Phat.P.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(Phat.P.diagonal().cwiseAbs().maxCoeff() == 0.0);
    CHECK(Phat.P.minCoeff() >= 0.0);
    CHECK(Phat.P.maxCoeff() <= 1.0);
  }
}

TEST_CASE("usvt_latent") {
  SUBCASE("exact link inversion recovers coordinates") {
    // oracle for the inversion step: exact P, invert log odds, embed
    KeyedRng rng(40);
    const int n = 30;
    const double sigma = 0.4;
    Eigen::MatrixXd y(n, 2);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 2; ++j) y(i, j) = rng.next_double();
    EdgeProbMatrix P = latent_probability_matrix(LatentConfig::make(sigma, y));
    Eigen::MatrixXd D(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) {
          D(i, j) = 0.0;
          continue;
        }
        double dist = sigma * std::log((1.0 - P.P(i, j)) / P.P(i, j));
        D(i, j) = dist * dist;
      }
    Eigen::MatrixXd yhat = embed_coordinates(D, 2);
    CHECK(aligned_rms(yhat, y) <= 1e-6);
  }
  SUBCASE("flat coin-flip estimates collapse to the origin") {
    // a graph dense enough that USVT keeps lambda ~ n/2: all entries near 1/2
    const int n = 40;
    Eigen::MatrixXd Pm = Eigen::MatrixXd::Constant(n, n, 0.5);
    Pm.diagonal().setZero();
    Adjacency A = sample_adjacency(EdgeProbMatrix{Pm}, 9);
    Eigen::MatrixXd yhat = usvt_latent(A, 0.5, 2);
    // distances shrink toward zero, so the spread is far below the truth's
    CHECK(yhat.cwiseAbs().maxCoeff() < 1.0);
  }
}
