#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace blocksdp {

// An association scheme {B_0..B_l} together with the shared eigenbasis V,
// the eigenspace partition S_0..S_m of [K], and the eigenvalue table
// lambda_j^{(i)} (row i = basis matrix, column j = eigenspace cell).
//
// The basis matrices are binary with disjoint supports covering [K]^2, so a
// matrix in their span is identified by l+1 scalars and the eigenspace
// projectors E_j = sum_{k in S_j} v_k v_k^T diagonalize everything in the
// span simultaneously.
struct SchemeBasis {
  std::vector<Eigen::MatrixXd> mats;        // B_0..B_l, binary symmetric
  Eigen::MatrixXd eigvecs;                  // V, K x K orthonormal
  std::vector<std::vector<int>> partition;  // S_0..S_m, column indices of V
  Eigen::MatrixXd eigtable;                 // (l+1) x (m+1)
  std::vector<Eigen::MatrixXd> idempotents; // E_0..E_m
  Eigen::MatrixXd idem_coeff;               // (l+1) x (m+1): E_j = sum_c idem_coeff(c,j) B_c
  std::vector<std::pair<int, int>> support_rep;  // one support entry per B_c
  std::vector<int> support_size;                 // |support(B_c)|

  int K() const { return mats.empty() ? 0 : static_cast<int>(mats[0].rows()); }
  int num_mats() const { return static_cast<int>(mats.size()); }
  int num_cells() const { return static_cast<int>(partition.size()); }
};

struct SchemeCoeffs {
  Eigen::VectorXd gamma;  // one coefficient per basis matrix
};

// Axiom check outcome. axiom 0 means malformed input (non-binary or
// asymmetric), 1..3 correspond to the definition's three properties.
struct SchemeReport {
  bool pass = false;
  int violated_axiom = 0;
  std::string detail;
};

SchemeReport verify_scheme(const std::vector<Eigen::MatrixXd>& mats);

// Shared eigenbasis of a verified scheme, via a generic element with the
// given weights (defaults to the first l+1 primes). Throws std::runtime_error
// when eigenvalue grouping is ambiguous at the tolerance; callers may retry
// with different weights.
struct EigenbasisResult {
  Eigen::MatrixXd eigvecs;
  std::vector<std::vector<int>> partition;
  Eigen::MatrixXd eigtable;
};
EigenbasisResult common_eigenbasis(const std::vector<Eigen::MatrixXd>& mats,
                                   const std::vector<double>& weights = {},
                                   double group_tol = 1e-8);

// Full basis construction: verify + eigenbasis + projectors. Throws
// std::invalid_argument when verification fails.
SchemeBasis make_scheme_basis(const std::vector<Eigen::MatrixXd>& mats,
                              const std::vector<double>& weights = {});

// {I, J - I}: same-class vs different-class.
SchemeBasis community_scheme(int K);

// K = k^2 classes indexed by digit pairs; B_1 = exactly one digit equal,
// B_2 = no digit equal.
SchemeBasis overlapping_scheme(int k);

// K = (2k)^d classes on a d-fold discrete torus; one basis matrix per
// distinct tuple of cyclic digit distances, (k+1)^d in total.
SchemeBasis toric_scheme(int k, int d);

Eigen::MatrixXd expand(const SchemeCoeffs& coeffs, const SchemeBasis& basis);

// Reads one coefficient per disjoint support; nullopt when M is not constant
// on some support (spread beyond tol). spread_out reports the worst spread.
std::optional<SchemeCoeffs> try_decompose(const Eigen::MatrixXd& M, const SchemeBasis& basis,
                                          double* spread_out = nullptr, double tol = 1e-12);

// Throwing variant of try_decompose.
SchemeCoeffs decompose(const Eigen::MatrixXd& M, const SchemeBasis& basis, double tol = 1e-12);

}  // namespace blocksdp
