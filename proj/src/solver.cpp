#include "blocksdp/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "blocksdp/rng.hpp"

namespace blocksdp {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void check_symmetric(const Eigen::MatrixXd& M, const char* what) {
  double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw std::invalid_argument(std::string(what) + " must be symmetric");
}

// PSD part of a symmetric matrix, reconstructed from whichever side of the
// spectrum has fewer eigenvalues.
Eigen::MatrixXd psd_clip(const Eigen::MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  const Eigen::VectorXd& vals = es.eigenvalues();
  const int n = static_cast<int>(S.rows());
  int nneg = 0;
  while (nneg < n && vals(nneg) < 0.0) ++nneg;
  const int npos = n - nneg;
  if (nneg == 0) return S;
  if (npos == 0) return Eigen::MatrixXd::Zero(n, n);
  if (nneg <= npos) {
    Eigen::MatrixXd Un = es.eigenvectors().leftCols(nneg);
    return S - Un * vals.head(nneg).asDiagonal() * Un.transpose();
  }
  Eigen::MatrixXd Up = es.eigenvectors().rightCols(npos);
  return Up * vals.tail(npos).asDiagonal() * Up.transpose();
}

// n x n view of one (a,b) class-pair slice across all node-pair blocks.
using SliceStride = Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>;
using Slice = Eigen::Map<Eigen::MatrixXd, 0, SliceStride>;
using ConstSlice = Eigen::Map<const Eigen::MatrixXd, 0, SliceStride>;

Slice slice(BlockMatrix& M, int a, int b) {
  auto os = M.data.outerStride();
  return Slice(M.data.data() + a + b * os, M.n, M.n, SliceStride(M.K * os, M.K));
}

ConstSlice slice(const BlockMatrix& M, int a, int b) {
  auto os = M.data.outerStride();
  return ConstSlice(M.data.data() + a + b * os, M.n, M.n, SliceStride(M.K * os, M.K));
}

double frob(const BlockMatrix& A, const BlockMatrix& B) {
  return (A.data - B.data).norm();
}

// ---- structured fast path: the recursion on scheme-span coefficients ----

// A matrix with every block in span(B_0..B_l) is l+1 coefficient matrices
// of size n x n (disjoint binary supports). All five ADMM updates act
// coefficient-wise, which replaces the nK eigendecomposition by m+1
// decompositions of size n.
struct CoeffStack {
  std::vector<Eigen::MatrixXd> g;

  static CoeffStack zero(int n, int count) {
    CoeffStack s;
    s.g.assign(count, Eigen::MatrixXd::Zero(n, n));
    return s;
  }
};

CoeffStack to_coeffs(const BlockMatrix& M, const SchemeBasis& basis) {
  CoeffStack s;
  s.g.reserve(basis.num_mats());
  for (int c = 0; c < basis.num_mats(); ++c) {
    auto [a, b] = basis.support_rep[c];
    s.g.emplace_back(slice(M, a, b));
  }
  return s;
}

BlockMatrix from_coeffs(const CoeffStack& s, const SchemeBasis& basis, int n) {
  BlockMatrix M(n, basis.K());
  const int K = basis.K();
  for (int c = 0; c < basis.num_mats(); ++c)
    for (int a = 0; a < K; ++a)
      for (int b = 0; b < K; ++b)
        if (basis.mats[c](a, b) != 0.0) slice(M, a, b) = s.g[c];
  return M;
}

double coeff_inner(const CoeffStack& A, const CoeffStack& B, const SchemeBasis& basis) {
  double total = 0.0;
  for (std::size_t c = 0; c < A.g.size(); ++c)
    total += basis.support_size[c] * A.g[c].cwiseProduct(B.g[c]).sum();
  return total;
}

double coeff_dist(const CoeffStack& A, const CoeffStack& B, const SchemeBasis& basis) {
  double total = 0.0;
  for (std::size_t c = 0; c < A.g.size(); ++c)
    total += basis.support_size[c] * (A.g[c] - B.g[c]).squaredNorm();
  return std::sqrt(total);
}

void coeff_project_affine(CoeffStack& s, const SchemeBasis& basis) {
  const double K2 = static_cast<double>(basis.K()) * basis.K();
  Eigen::MatrixXd shift = Eigen::MatrixXd::Constant(s.g[0].rows(), s.g[0].cols(), -1.0);
  for (std::size_t c = 0; c < s.g.size(); ++c) shift += basis.support_size[c] * s.g[c];
  shift /= K2;
  for (auto& gc : s.g) gc -= shift;
}

void coeff_project_psd(const CoeffStack& in, CoeffStack& out, const SchemeBasis& basis) {
  const int cells = basis.num_cells();
  const int nb = basis.num_mats();
  std::vector<Eigen::MatrixXd> lambda(cells);
  for (int l = 0; l < cells; ++l) {
    lambda[l] = basis.eigtable(0, l) * in.g[0];
    for (int c = 1; c < nb; ++c) lambda[l] += basis.eigtable(c, l) * in.g[c];
    lambda[l] = psd_clip(0.5 * (lambda[l] + lambda[l].transpose()));
  }
  for (int c = 0; c < nb; ++c) {
    out.g[c] = basis.idem_coeff(c, 0) * lambda[0];
    for (int l = 1; l < cells; ++l) out.g[c] += basis.idem_coeff(c, l) * lambda[l];
  }
}

struct CoeffAdmm {
  CoeffStack X, W, Y, U, V, W_prev, Y_prev;

  static CoeffAdmm zero(int n, int count) {
    CoeffAdmm s;
    s.X = CoeffStack::zero(n, count);
    s.W = s.X;
    s.Y = s.X;
    s.U = s.X;
    s.V = s.X;
    s.W_prev = s.X;
    s.Y_prev = s.X;
    return s;
  }
};

void coeff_step(CoeffAdmm& s, const CoeffStack& F, double penalty, const SchemeBasis& basis) {
  const int nb = static_cast<int>(F.g.size());
  for (int c = 0; c < nb; ++c)
    s.X.g[c] = 0.5 * (s.W.g[c] - s.U.g[c] + s.Y.g[c] - s.V.g[c] + F.g[c] / penalty);
  coeff_project_affine(s.X, basis);
  s.W_prev = s.W;
  s.Y_prev = s.Y;
  for (int c = 0; c < nb; ++c) s.W.g[c] = (s.X.g[c] + s.U.g[c]).cwiseMax(0.0);
  CoeffStack XV = s.X;
  for (int c = 0; c < nb; ++c) XV.g[c] += s.V.g[c];
  coeff_project_psd(XV, s.Y, basis);
  for (int c = 0; c < nb; ++c) {
    s.U.g[c] += s.X.g[c] - s.W.g[c];
    s.V.g[c] += s.X.g[c] - s.Y.g[c];
  }
}

// ---- shared driver pieces ----

double resolve_penalty(const BlockMatrix& F, const SolverConfig& cfg) {
  if (cfg.penalty <= 0.0) throw std::invalid_argument("penalty must be positive");
  double scale = F.data.norm() / F.dim();
  return scale > 0.0 ? cfg.penalty * scale : cfg.penalty;
}

bool spans_scheme(const BlockMatrix& F, const SchemeBasis& basis) {
  KeyedRng rng(0x7370616e /*span*/);
  const int checks = 32;
  for (int s = 0; s < checks; ++s) {
    int i = static_cast<int>(rng.next_below(F.n));
    int j = static_cast<int>(rng.next_below(F.n));
    Eigen::MatrixXd blk = F.block(i, j);
    double tol = 1e-8 * std::max(1.0, blk.cwiseAbs().maxCoeff());
    if (!try_decompose(blk, basis, nullptr, tol)) return false;
  }
  return true;
}

struct StopTracker {
  double best = std::numeric_limits<double>::infinity();

  // Residuals growing 100x past their running minimum marks divergence.
  bool diverged(double primal, double dual, int t) {
    double r = std::max(primal, dual);
    best = std::min(best, r);
    return t >= 10 && r > 100.0 * best;
  }
};

}  // namespace

BlockMatrix project_affine(BlockMatrix M) {
  const double K2 = static_cast<double>(M.K) * M.K;
  for (int i = 0; i < M.n; ++i)
    for (int j = 0; j < M.n; ++j) {
      auto blk = M.block(i, j);
      blk.array() -= (blk.sum() - 1.0) / K2;
    }
  return M;
}

BlockMatrix project_psd_dense(const BlockMatrix& M) {
  check_symmetric(M.data, "psd projection input");
  BlockMatrix out = M;
  out.data = psd_clip(0.5 * (M.data + M.data.transpose()));
  return out;
}

std::vector<Eigen::MatrixXd> extract_eigencoeffs(const BlockMatrix& M, const SchemeBasis& basis) {
  if (M.K != basis.K()) throw std::invalid_argument("scheme size does not match block size");
#ifdef NDEBUG
  const bool full_check = false;
#else
  const bool full_check = true;
#endif
  KeyedRng rng(0x65787472 /*extr*/);
  const int spot = std::min(32, M.n * M.n);
  for (int s = 0; s < (full_check ? M.n * M.n : spot); ++s) {
    int i, j;
    if (full_check) {
      i = s / M.n;
      j = s % M.n;
    } else {
      i = static_cast<int>(rng.next_below(M.n));
      j = static_cast<int>(rng.next_below(M.n));
    }
    Eigen::MatrixXd blk = M.block(i, j);
    double tol = 1e-7 * std::max(1.0, blk.cwiseAbs().maxCoeff());
    double spread = 0.0;
    if (!try_decompose(blk, basis, &spread, tol)) {
      std::ostringstream os;
      os << "block (" << i << "," << j << ") outside scheme span (spread " << spread << ")";
      throw std::invalid_argument(os.str());
    }
  }

  const int K = basis.K();
  std::vector<Eigen::MatrixXd> lambda(basis.num_cells());
  for (int l = 0; l < basis.num_cells(); ++l) {
    lambda[l] = Eigen::MatrixXd::Zero(M.n, M.n);
    const Eigen::MatrixXd& E = basis.idempotents[l];
    for (int a = 0; a < K; ++a)
      for (int b = 0; b < K; ++b)
        if (E(a, b) != 0.0) lambda[l] += E(a, b) * slice(M, a, b);
    lambda[l] /= static_cast<double>(basis.partition[l].size());
  }
  return lambda;
}

BlockMatrix project_psd_structured(const BlockMatrix& M, const SchemeBasis& basis) {
  std::vector<Eigen::MatrixXd> lambda = extract_eigencoeffs(M, basis);
  for (auto& L : lambda) L = psd_clip(0.5 * (L + L.transpose()));

  BlockMatrix out(M.n, M.K);
  const int K = basis.K();
  for (int l = 0; l < basis.num_cells(); ++l) {
    const Eigen::MatrixXd& E = basis.idempotents[l];
    for (int a = 0; a < K; ++a)
      for (int b = 0; b < K; ++b)
        if (E(a, b) != 0.0) slice(out, a, b) += E(a, b) * lambda[l];
  }
  return out;
}

AdmmState init_admm_state(const BlockMatrix& F, const SolverConfig& cfg) {
  AdmmState s;
  s.X = BlockMatrix(F.n, F.K);
  s.W = s.X;
  s.Y = s.X;
  s.U = s.X;
  s.V = s.X;
  s.W_prev = s.X;
  s.Y_prev = s.X;
  s.penalty_eff = resolve_penalty(F, cfg);
  return s;
}

void admm_step(AdmmState& s, const BlockMatrix& F, const SolverConfig& cfg,
               const SchemeBasis* basis) {
  bool structured = cfg.mode == SolveMode::structured ||
                    (cfg.mode == SolveMode::auto_detect && basis != nullptr);
  if (structured && basis == nullptr)
    throw std::invalid_argument("structured mode requires a scheme basis");

  BlockMatrix T(F.n, F.K);
  T.data = 0.5 * (s.W.data - s.U.data + s.Y.data - s.V.data + F.data / s.penalty_eff);
  s.X = project_affine(std::move(T));
  s.W_prev = s.W;
  s.Y_prev = s.Y;
  s.W.data = (s.X.data + s.U.data).cwiseMax(0.0);
  BlockMatrix XV = s.X;
  XV.data += s.V.data;
  s.Y = structured ? project_psd_structured(XV, *basis) : project_psd_dense(XV);
  s.U.data += s.X.data - s.W.data;
  s.V.data += s.X.data - s.Y.data;
  ++s.t;
}

std::pair<double, double> residuals(const AdmmState& s) {
  if (s.t < 1) throw std::logic_error("residuals require at least one step");
  const double dim = s.X.dim();
  double primal = std::max(frob(s.X, s.W), frob(s.X, s.Y)) / dim;
  double dual = s.penalty_eff * std::max(frob(s.W, s.W_prev), frob(s.Y, s.Y_prev)) / dim;
  return {primal, dual};
}

double feasibility_error(const BlockMatrix& X) {
  double neg_entry = std::max(0.0, -X.data.minCoeff());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (X.data + X.data.transpose()),
                                                    Eigen::EigenvaluesOnly);
  double neg_eig = std::max(0.0, -es.eigenvalues()(0));
  double sum_dev = 0.0;
  for (int i = 0; i < X.n; ++i)
    for (int j = 0; j < X.n; ++j) sum_dev = std::max(sum_dev, std::abs(X.block(i, j).sum() - 1.0));
  return std::max({neg_entry, neg_eig, sum_dev});
}

SdpSolution solve(const BlockMatrix& F, const SolverConfig& cfg, const SchemeBasis* basis,
                  const IterCallback& callback) {
  check_symmetric(F.data, "objective");
  if (cfg.max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");

  SolveMode mode = cfg.mode;
  if (mode == SolveMode::auto_detect)
    mode = (basis != nullptr && spans_scheme(F, *basis)) ? SolveMode::structured : SolveMode::dense;
  if (mode == SolveMode::structured && basis == nullptr)
    throw std::invalid_argument("structured mode requires a scheme basis");

  SolverConfig run_cfg = cfg;
  run_cfg.mode = mode;

  SdpSolution sol;
  sol.mode_used = mode;
  StopTracker tracker;
  const double penalty = resolve_penalty(F, cfg);
  auto t0 = Clock::now();

  if (mode == SolveMode::dense) {
    AdmmState s = init_admm_state(F, run_cfg);
    for (int t = 0; t < cfg.max_iter; ++t) {
      admm_step(s, F, run_cfg, basis);
      auto [primal, dual] = residuals(s);
      double obj = F.data.cwiseProduct(s.X.data).sum();
      s.history.push_back({primal, dual, obj, elapsed_ms(t0)});
      if (callback) callback(s);
      if (tracker.diverged(primal, dual, s.t))
        throw DivergenceError("ADMM residuals diverged", s.history);
      if (primal < cfg.tol_primal && dual < cfg.tol_dual) {
        sol.converged = true;
        break;
      }
    }
    sol.iterations = s.t;
    sol.history = s.history;
    sol.X = project_affine(std::move(s.W));
  } else {
    const int nb = basis->num_mats();
    CoeffStack f = to_coeffs(F, *basis);
    CoeffAdmm s = CoeffAdmm::zero(F.n, nb);
    std::vector<IterationStats> history;
    int t = 0;
    for (; t < cfg.max_iter; ++t) {
      coeff_step(s, f, penalty, *basis);
      const double dim = F.dim();
      double primal =
          std::max(coeff_dist(s.X, s.W, *basis), coeff_dist(s.X, s.Y, *basis)) / dim;
      double dual = penalty *
                    std::max(coeff_dist(s.W, s.W_prev, *basis), coeff_dist(s.Y, s.Y_prev, *basis)) /
                    dim;
      double obj = coeff_inner(f, s.X, *basis);
      history.push_back({primal, dual, obj, elapsed_ms(t0)});
      if (callback) {
        AdmmState dense_view = init_admm_state(F, run_cfg);
        dense_view.X = from_coeffs(s.X, *basis, F.n);
        dense_view.W = from_coeffs(s.W, *basis, F.n);
        dense_view.Y = from_coeffs(s.Y, *basis, F.n);
        dense_view.U = from_coeffs(s.U, *basis, F.n);
        dense_view.V = from_coeffs(s.V, *basis, F.n);
        dense_view.W_prev = from_coeffs(s.W_prev, *basis, F.n);
        dense_view.Y_prev = from_coeffs(s.Y_prev, *basis, F.n);
        dense_view.t = t + 1;
        dense_view.penalty_eff = penalty;
        dense_view.history = history;
        callback(dense_view);
      }
      if (tracker.diverged(history.back().primal, history.back().dual, t + 1))
        throw DivergenceError("ADMM residuals diverged", history);
      if (history.back().primal < cfg.tol_primal && history.back().dual < cfg.tol_dual) {
        sol.converged = true;
        ++t;
        break;
      }
    }
    sol.iterations = t;
    sol.history = std::move(history);
    sol.X = project_affine(from_coeffs(s.W, *basis, F.n));
  }

  sol.objective = F.data.cwiseProduct(sol.X.data).sum();
  return sol;
}

}  // namespace blocksdp
