#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "blocksdp/rng.hpp"
#include "blocksdp/solver.hpp"

using namespace blocksdp;

namespace {

BlockMatrix random_symmetric(int n, int K, std::uint64_t seed, double scale = 1.0) {
  KeyedRng rng(seed);
  BlockMatrix M(n, K);
  for (int r = 0; r < M.dim(); ++r)
    for (int c = r; c < M.dim(); ++c)
      M.data(r, c) = M.data(c, r) = scale * (rng.next_double() - 0.5);
  return M;
}

// Random matrix with every block in the scheme span, symmetrized.
BlockMatrix random_span(int n, const SchemeBasis& basis, std::uint64_t seed) {
  KeyedRng rng(seed);
  const int K = basis.K();
  BlockMatrix M(n, K);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Eigen::MatrixXd blk = Eigen::MatrixXd::Zero(K, K);
      for (int c = 0; c < basis.num_mats(); ++c)
        blk += (rng.next_double() * 2.0 - 1.0) * basis.mats[c];
      M.block(i, j) = blk;
      M.block(j, i) = blk.transpose();
    }
  return M;
}

BlockMatrix planted_objective(int n, double in_p, double out_p, std::uint64_t seed,
                              Labels* z_out = nullptr) {
  Eigen::MatrixXd theta(2, 2);
  theta << in_p, out_p, out_p, in_p;
  Labels z;
  for (int i = 0; i < n; ++i) z.z.push_back(i < n / 2 ? 0 : 1);
  if (z_out) *z_out = z;
  EdgeProbMatrix P = block_probability_matrix(theta, z);
  Adjacency A = sample_adjacency(P, seed);
  ThetaHat th = ThetaHat::from_matrix(theta);
  return build_objective(A, th);
}

}  // namespace

TEST_CASE("project_affine") {
  SUBCASE("zero maps to uniform blocks") {
    BlockMatrix M(2, 2);
    BlockMatrix P = project_affine(M);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK((P.block(i, j).array() - 0.25).abs().maxCoeff() <= 1e-15);
  }
  SUBCASE("idempotent") {
    BlockMatrix M = random_symmetric(3, 2, 21);
    BlockMatrix P1 = project_affine(M);
    BlockMatrix P2 = project_affine(P1);
    CHECK((P1.data - P2.data).cwiseAbs().maxCoeff() <= 1e-14);
  }
  SUBCASE("matches the equality-constrained least-squares oracle") {
    // minimize ||X - M||_F^2 s.t. <J, X> = 1 via the KKT system
    BlockMatrix M = random_symmetric(1, 2, 33);
    const int d = 4;  // vectorized block
    Eigen::MatrixXd A(d + 1, d + 1);
    A.setZero();
    A.topLeftCorner(d, d) = 2.0 * Eigen::MatrixXd::Identity(d, d);
    A.topRightCorner(d, 1).setOnes();
    A.bottomLeftCorner(1, d).setOnes();
    Eigen::VectorXd rhs(d + 1);
    Eigen::Map<const Eigen::VectorXd> m(M.data.data(), d);
    rhs.head(d) = 2.0 * m;
    rhs(d) = 1.0;
    Eigen::VectorXd sol = A.fullPivLu().solve(rhs);

    BlockMatrix P = project_affine(M);
    Eigen::Map<const Eigen::VectorXd> p(P.data.data(), d);
    CHECK((p - sol.head(d)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("project_psd_dense") {
  SUBCASE("identity unchanged") {
    BlockMatrix M(2, 2);
    M.data = Eigen::MatrixXd::Identity(4, 4);
    CHECK((project_psd_dense(M).data - M.data).cwiseAbs().maxCoeff() <= 1e-14);
  }
  SUBCASE("clips a negative eigenvalue") {
    BlockMatrix M(1, 2);
    M.data << 1.0, 0.0, 0.0, -1.0;
    Eigen::MatrixXd expect(2, 2);
    expect << 1.0, 0.0, 0.0, 0.0;
    CHECK((project_psd_dense(M).data - expect).cwiseAbs().maxCoeff() <= 1e-14);
  }
  SUBCASE("is the closest PSD matrix") {
    BlockMatrix M = random_symmetric(3, 2, 5);
    BlockMatrix P = project_psd_dense(M);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P.data);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
    double base = (M.data - P.data).norm();
    KeyedRng rng(6);
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::MatrixXd R(6, 6);
      for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) R(r, c) = rng.next_double() - 0.5;
      Eigen::MatrixXd S = R * R.transpose();  // random PSD
      CHECK(base <= (M.data - S).norm() + 1e-12);
    }
  }
  SUBCASE("rejects asymmetric input") {
    BlockMatrix M(1, 2);
    M.data << 0.0, 1.0, 0.0, 0.0;
    CHECK_THROWS(project_psd_dense(M));
  }
}

TEST_CASE("extract_eigencoeffs") {
  SchemeBasis basis = community_scheme(3);
  SUBCASE("identity blocks give all-ones coefficients") {
    BlockMatrix M(2, 3);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) M.block(i, j) = Eigen::MatrixXd::Identity(3, 3);
    auto lambda = extract_eigencoeffs(M, basis);
    REQUIRE(lambda.size() == 2);
    for (const auto& L : lambda) CHECK((L.array() - 1.0).abs().maxCoeff() <= 1e-12);
  }
  SUBCASE("idempotent expansion isolates one cell") {
    BlockMatrix M(2, 3);
    double c = 2.5;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) M.block(i, j) = c * basis.idempotents[0];
    auto lambda = extract_eigencoeffs(M, basis);
    CHECK((lambda[0].array() - c).abs().maxCoeff() <= 1e-10);
    CHECK(lambda[1].cwiseAbs().maxCoeff() <= 1e-10);
  }
  SUBCASE("round trip reconstruction") {
    BlockMatrix M = random_span(3, basis, 44);
    auto lambda = extract_eigencoeffs(M, basis);
    BlockMatrix rec(3, 3);
    for (std::size_t l = 0; l < lambda.size(); ++l)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) rec.block(i, j) += lambda[l](i, j) * basis.idempotents[l];
    CHECK((rec.data - M.data).cwiseAbs().maxCoeff() <= 1e-10);
  }
  SUBCASE("rejects blocks outside the span") {
    BlockMatrix M = random_symmetric(2, 3, 3);
    CHECK_THROWS(extract_eigencoeffs(M, basis));
  }
}

TEST_CASE("project_psd_structured") {
  SUBCASE("PSD in-span input unchanged") {
    SchemeBasis basis = community_scheme(2);
    BlockMatrix M(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) M.block(i, j) = Eigen::MatrixXd::Constant(2, 2, 0.25);
    BlockMatrix P = project_psd_structured(M, basis);
    CHECK((P.data - M.data).cwiseAbs().maxCoeff() <= 1e-9);
  }
  SUBCASE("hand-built negative cell matches dense") {
    SchemeBasis basis = community_scheme(2);
    BlockMatrix M(2, 2);
    M.block(0, 0) = Eigen::MatrixXd::Identity(2, 2);
    M.block(1, 1) = Eigen::MatrixXd::Identity(2, 2);
    M.block(0, 1) = -2.0 * Eigen::MatrixXd::Identity(2, 2);
    M.block(1, 0) = -2.0 * Eigen::MatrixXd::Identity(2, 2);
    BlockMatrix Ps = project_psd_structured(M, basis);
    BlockMatrix Pd = project_psd_dense(M);
    CHECK((Ps.data - Pd.data).norm() <= 1e-8);
  }
  SUBCASE("matches dense projection on random span matrices") {
    std::vector<SchemeBasis> bases;
    bases.push_back(community_scheme(2));
    bases.push_back(community_scheme(4));
    bases.push_back(overlapping_scheme(2));
    bases.push_back(toric_scheme(2, 1));
    int seed = 100;
    for (const auto& basis : bases)
      for (int trial = 0; trial < 6; ++trial) {
        BlockMatrix M = random_span(4, basis, seed++);
        BlockMatrix Ps = project_psd_structured(M, basis);
        BlockMatrix Pd = project_psd_dense(M);
        CHECK((Ps.data - Pd.data).norm() <= 1e-8);
      }
  }
}

TEST_CASE("admm_step") {
  SUBCASE("F = 0 reaches its fixed point in one step") {
    const int n = 2, K = 2;
    BlockMatrix F(n, K);
    SolverConfig cfg;
    cfg.mode = SolveMode::dense;
    AdmmState s = init_admm_state(F, cfg);
    admm_step(s, F, cfg);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        CHECK((s.X.block(i, j).array() - 1.0 / (K * K)).abs().maxCoeff() <= 1e-12);
    CHECK((s.W.data - s.X.data).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((s.Y.data - s.X.data).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(s.U.data.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(s.V.data.cwiseAbs().maxCoeff() <= 1e-12);

    BlockMatrix X1 = s.X;
    admm_step(s, F, cfg);
    CHECK((s.X.data - X1.data).cwiseAbs().maxCoeff() <= 1e-12);
    auto [primal, dual] = residuals(s);
    CHECK(primal <= 1e-13);
    CHECK(dual <= 1e-13);
  }
  SUBCASE("iterates stay symmetric") {
    BlockMatrix F = planted_objective(6, 0.8, 0.1, 9);
    SolverConfig cfg;
    cfg.mode = SolveMode::dense;
    AdmmState s = init_admm_state(F, cfg);
    for (int t = 0; t < 10; ++t) {
      admm_step(s, F, cfg);
      for (const BlockMatrix* M : {&s.X, &s.W, &s.Y, &s.U, &s.V})
        CHECK((M->data - M->data.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
  SUBCASE("first residual from zero state is positive") {
    BlockMatrix F = planted_objective(4, 0.9, 0.1, 2);
    SolverConfig cfg;
    cfg.mode = SolveMode::dense;
    AdmmState s = init_admm_state(F, cfg);
    admm_step(s, F, cfg);
    auto [primal, dual] = residuals(s);
    CHECK(primal > 0.0);
  }
  SUBCASE("scheme-span objective keeps every iterate in span") {
    SchemeBasis basis = community_scheme(2);
    Eigen::MatrixXd theta(2, 2);
    theta << 0.8, 0.1, 0.1, 0.8;
    ThetaHat th = ThetaHat::from_scheme(basis, decompose(theta, basis));
    Labels z{{0, 0, 0, 1, 1, 1}};
    Adjacency A = sample_adjacency(block_probability_matrix(theta, z), 8);
    BlockMatrix F = build_objective(A, th);
    SolverConfig cfg;
    cfg.mode = SolveMode::dense;  // the plain recursion, not the fast path
    AdmmState s = init_admm_state(F, cfg);
    for (int t = 0; t < 20; ++t) {
      admm_step(s, F, cfg);
      for (const BlockMatrix* M : {&s.X, &s.W, &s.Y, &s.U, &s.V})
        for (int i = 0; i < 6; ++i)
          for (int j = 0; j < 6; ++j) {
            double spread = 0.0;
            try_decompose(M->block(i, j), *&basis, &spread, 1e-8);
            // near-zero eigenvalue crossings at convergence cost a few digits
            CHECK(spread <= 1e-8);
          }
    }
  }
}

TEST_CASE("solve") {
  SUBCASE("strong-signal relaxation is tight at small size") {
    Labels z;
    BlockMatrix F = planted_objective(4, 0.95, 0.02, 17, &z);
    SolverConfig cfg;
    cfg.tol_primal = cfg.tol_dual = 1e-7;
    cfg.mode = SolveMode::dense;
    SdpSolution sol = solve(F, cfg);
    CHECK(sol.converged);
    auto [zb, brute] = brute_force_ml(F);
    CHECK(sol.objective >= brute - 1e-5);
    CHECK(std::abs(sol.objective - brute) <= 1e-3);
    CHECK(feasibility_error(sol.X) <= 10.0 * cfg.tol_primal);
  }
  SUBCASE("constant blocks converge with flat objective") {
    const int n = 4, K = 2;
    BlockMatrix F(n, K);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) F.block(i, j).setConstant(-0.4);
    SolverConfig cfg;
    cfg.mode = SolveMode::dense;
    SdpSolution sol = solve(F, cfg);
    CHECK(sol.converged);
    CHECK(sol.objective == doctest::Approx(-0.4 * n * (n - 1)).epsilon(1e-5));
  }
  SUBCASE("structured and dense iterates match step by step") {
    SchemeBasis basis = community_scheme(2);
    Eigen::MatrixXd theta(2, 2);
    theta << 0.7, 0.1, 0.1, 0.7;
    ThetaHat th = ThetaHat::from_scheme(basis, decompose(theta, basis));
    Labels z{{0, 0, 1, 1}};
    Adjacency A = sample_adjacency(block_probability_matrix(theta, z), 3);
    BlockMatrix F = build_objective(A, th);

    std::vector<BlockMatrix> dense_iters, structured_iters;
    SolverConfig cfg;
    cfg.max_iter = 30;
    cfg.tol_primal = cfg.tol_dual = 1e-14;  // run all 30 steps
    cfg.mode = SolveMode::dense;
    try {
      solve(F, cfg, &basis, [&](const AdmmState& s) { dense_iters.push_back(s.X); });
    } catch (const DivergenceError&) {
    }
    cfg.mode = SolveMode::structured;
    try {
      solve(F, cfg, &basis, [&](const AdmmState& s) { structured_iters.push_back(s.X); });
    } catch (const DivergenceError&) {
    }
    REQUIRE(dense_iters.size() == structured_iters.size());
    for (std::size_t t = 0; t < dense_iters.size(); ++t)
      CHECK((dense_iters[t].data - structured_iters[t].data).norm() <= 1e-7);
  }
  SUBCASE("objective stabilizes at convergence") {
    BlockMatrix F = planted_objective(8, 0.85, 0.1, 23);
    SolverConfig cfg;
    cfg.mode = SolveMode::dense;
    cfg.tol_primal = cfg.tol_dual = 1e-9;
    cfg.max_iter = 20000;
    SdpSolution sol = solve(F, cfg);
    REQUIRE(sol.converged);
    REQUIRE(sol.history.size() >= 2);
    double last = sol.history.back().objective;
    double prev = sol.history[sol.history.size() - 2].objective;
    CHECK(std::abs(last - prev) <= 1e-6 * std::max(1.0, std::abs(last)));
  }
  SUBCASE("block-constant shifts leave the solution unchanged") {
    BlockMatrix F = planted_objective(5, 0.9, 0.05, 29);
    SolverConfig cfg;
    cfg.tol_primal = cfg.tol_dual = 1e-8;
    cfg.mode = SolveMode::dense;
    SdpSolution base = solve(F, cfg);
    BlockMatrix shifted = F;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        if (i != j) shifted.block(i, j).array() += 0.37;
    SdpSolution moved = solve(shifted, cfg);
    CHECK((base.X.data - moved.X.data).norm() <= 1e-5 * base.X.dim());
  }
  SUBCASE("auto mode picks structured for span objectives") {
    SchemeBasis basis = community_scheme(2);
    Eigen::MatrixXd theta(2, 2);
    theta << 0.7, 0.1, 0.1, 0.7;
    ThetaHat th = ThetaHat::from_scheme(basis, decompose(theta, basis));
    Adjacency A = sample_adjacency(
        block_probability_matrix(theta, Labels{{0, 0, 1, 1}}), 3);
    BlockMatrix F = build_objective(A, th);
    SdpSolution sol = solve(F, SolverConfig{}, &basis);
    CHECK(sol.mode_used == SolveMode::structured);
    BlockMatrix Fd = random_symmetric(4, 2, 55);
    SdpSolution sold = solve(Fd, SolverConfig{}, &basis);
    CHECK(sold.mode_used == SolveMode::dense);
  }
}

TEST_CASE("feasibility_error") {
  SUBCASE("indicator outer products are feasible") {
    const int n = 3, K = 2;
    Labels z{{0, 1, 0}};
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n * K);
    for (int i = 0; i < n; ++i) x(i * K + z.z[i]) = 1.0;
    BlockMatrix X(n, K);
    X.data = x * x.transpose();
    CHECK(feasibility_error(X) <= 1e-12);
  }
  SUBCASE("uniform blocks are feasible") {
    BlockMatrix X(2, 2);
    X.data.setConstant(0.25);
    CHECK(feasibility_error(X) <= 1e-12);
  }
  SUBCASE("zero matrix violates the block sums by 1") {
    BlockMatrix X(2, 2);
    CHECK(feasibility_error(X) == doctest::Approx(1.0));
  }
}
