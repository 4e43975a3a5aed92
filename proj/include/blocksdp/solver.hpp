#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <vector>

#include "blocksdp/objective.hpp"
#include "blocksdp/scheme.hpp"

namespace blocksdp {

enum class SolveMode { dense, structured, auto_detect };

struct SolverConfig {
  // ADMM stepsize, applied as penalty * ||F||_F / (nK) so the update
  // F / stepsize is scale-free in F.
  double penalty = 1.0;
  int max_iter = 2000;
  double tol_primal = 1e-5;
  double tol_dual = 1e-5;
  SolveMode mode = SolveMode::auto_detect;
};

struct IterationStats {
  double primal = 0.0;
  double dual = 0.0;
  double objective = 0.0;
  double wall_ms = 0.0;
};

struct AdmmState {
  BlockMatrix X, W, Y, U, V;
  BlockMatrix W_prev, Y_prev;
  int t = 0;
  double penalty_eff = 1.0;
  std::vector<IterationStats> history;
};

struct SdpSolution {
  BlockMatrix X;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  SolveMode mode_used = SolveMode::dense;
  std::vector<IterationStats> history;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& msg, std::vector<IterationStats> hist)
      : std::runtime_error(msg), history(std::move(hist)) {}
  std::vector<IterationStats> history;
};

// Orthogonal projection onto { each K x K block sums to 1 }:
// M^(ij) <- M^(ij) - ((sum M^(ij)) - 1)/K^2 * J.
BlockMatrix project_affine(BlockMatrix M);

// Eigendecompose, clip negative eigenvalues, reassemble. Throws when the
// input is asymmetric beyond 1e-8 (relative to its magnitude).
BlockMatrix project_psd_dense(const BlockMatrix& M);

// Per-eigenspace coefficient matrices: Lambda_l(i,j) = tr(E_l M^(ij)) / |S_l|.
// Requires every block in the scheme span (spot-checked; full check in
// debug builds).
std::vector<Eigen::MatrixXd> extract_eigencoeffs(const BlockMatrix& M, const SchemeBasis& basis);

// sum_l PSD-projection(Lambda_l) (x) E_l, assembled blockwise.
BlockMatrix project_psd_structured(const BlockMatrix& M, const SchemeBasis& basis);

AdmmState init_admm_state(const BlockMatrix& F, const SolverConfig& cfg);

// One pass of the five ADMM updates. mode=auto dispatches the PSD step to
// the structured path when a basis is supplied.
void admm_step(AdmmState& state, const BlockMatrix& F, const SolverConfig& cfg,
               const SchemeBasis* basis = nullptr);

// (primal, dual) residuals of the last step; requires t >= 1.
std::pair<double, double> residuals(const AdmmState& state);

// max over: entrywise negativity, eigenvalue negativity, block-sum deviation.
double feasibility_error(const BlockMatrix& X);

using IterCallback = std::function<void(const AdmmState&)>;

// Run ADMM to tolerance. In structured mode the recursion operates on the
// scheme-span coefficients directly (l+1 matrices of size n x n), which is
// where the speedup over dense eigendecomposition comes from; the dense
// state is only materialized for callbacks and the final solution.
SdpSolution solve(const BlockMatrix& F, const SolverConfig& cfg,
                  const SchemeBasis* basis = nullptr, const IterCallback& callback = {});

}  // namespace blocksdp
