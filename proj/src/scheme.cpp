#include "blocksdp/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace blocksdp {

namespace {

constexpr int kPrimes[] = {2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,
                           43,  47,  53,  59,  61,  67,  71,  73,  79,  83,  89,  97,  101,
                           103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167,
                           173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229, 233, 239,
                           241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311};

Eigen::MatrixXi to_int(const Eigen::MatrixXd& M) {
  Eigen::MatrixXi out(M.rows(), M.cols());
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) out(i, j) = static_cast<int>(M(i, j));
  return out;
}

}  // namespace

SchemeReport verify_scheme(const std::vector<Eigen::MatrixXd>& mats) {
  if (mats.empty()) throw std::invalid_argument("empty scheme");
  const int K = static_cast<int>(mats[0].rows());
  for (const auto& B : mats) {
    if (B.rows() != K || B.cols() != K) throw std::invalid_argument("scheme matrices must be square and equal size");
    for (int a = 0; a < K; ++a)
      for (int b = 0; b < K; ++b) {
        if (B(a, b) != 0.0 && B(a, b) != 1.0) throw std::invalid_argument("scheme matrices must be binary");
        if (B(a, b) != B(b, a)) throw std::invalid_argument("scheme matrices must be symmetric");
      }
  }

  SchemeReport rep;
  std::vector<Eigen::MatrixXi> bi;
  bi.reserve(mats.size());
  for (const auto& B : mats) bi.push_back(to_int(B));

  if (bi[0] != Eigen::MatrixXi(Eigen::MatrixXi::Identity(K, K))) {
    rep.violated_axiom = 1;
    rep.detail = "B_0 != I";
    return rep;
  }

  Eigen::MatrixXi sum = Eigen::MatrixXi::Zero(K, K);
  for (const auto& B : bi) sum += B;
  if (sum != Eigen::MatrixXi(Eigen::MatrixXi::Ones(K, K))) {
    rep.violated_axiom = 2;
    rep.detail = "sum of basis matrices != all-ones";
    return rep;
  }

  // Supports are disjoint and cover [K]^2 once axiom 2 holds, so span
  // membership of an integer matrix means: constant on every support.
  for (std::size_t i = 0; i < bi.size(); ++i) {
    for (std::size_t j = i; j < bi.size(); ++j) {
      Eigen::MatrixXi prod = bi[i] * bi[j];
      for (std::size_t l = 0; l < bi.size(); ++l) {
        int ref = -1;
        for (int a = 0; a < K; ++a)
          for (int b = 0; b < K; ++b) {
            if (bi[l](a, b) == 0) continue;
            if (ref < 0) ref = prod(a, b);
            if (prod(a, b) != ref) {
              rep.violated_axiom = 3;
              std::ostringstream os;
              os << "B_" << i << " * B_" << j << " not constant on support of B_" << l;
              rep.detail = os.str();
              return rep;
            }
          }
      }
    }
  }

  rep.pass = true;
  return rep;
}

EigenbasisResult common_eigenbasis(const std::vector<Eigen::MatrixXd>& mats,
                                   const std::vector<double>& weights, double group_tol) {
  const int K = static_cast<int>(mats[0].rows());
  const int nb = static_cast<int>(mats.size());
  std::vector<double> w = weights;
  if (w.empty()) {
    // Square roots of distinct primes are linearly independent over the
    // integers, so integer eigenvalue tables cannot produce colliding
    // generic eigenvalues (plain primes do collide, e.g. for the 2-fold
    // toric scheme with k=2).
    if (nb > static_cast<int>(std::size(kPrimes))) throw std::invalid_argument("too many basis matrices for default weights");
    for (int i = 0; i < nb; ++i) w.push_back(std::sqrt(static_cast<double>(kPrimes[i])));
  }
  if (static_cast<int>(w.size()) != nb) throw std::invalid_argument("weight count mismatch");

  Eigen::MatrixXd generic = Eigen::MatrixXd::Zero(K, K);
  for (int i = 0; i < nb; ++i) generic += w[i] * mats[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(generic);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");

  EigenbasisResult res;
  res.eigvecs = es.eigenvectors();
  const Eigen::VectorXd& vals = es.eigenvalues();
  double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());

  res.partition.push_back({0});
  for (int k = 1; k < K; ++k) {
    if (vals(k) - vals(k - 1) <= group_tol * scale)
      res.partition.back().push_back(k);
    else
      res.partition.push_back({k});
  }

  // The all-ones direction is a shared eigenvector (constant row sums);
  // normalize it to exactly +1/sqrt(K) inside its cell.
  Eigen::VectorXd ones_unit = Eigen::VectorXd::Constant(K, 1.0 / std::sqrt(static_cast<double>(K)));
  for (auto& cell : res.partition) {
    Eigen::MatrixXd Vc(K, cell.size());
    for (std::size_t c = 0; c < cell.size(); ++c) Vc.col(c) = res.eigvecs.col(cell[c]);
    Eigen::VectorXd proj = Vc * (Vc.transpose() * ones_unit);
    if ((proj - ones_unit).norm() <= 1e-6) {
      Eigen::VectorXd wv = Vc.transpose() * ones_unit;  // unit vector in cell coordinates
      Eigen::VectorXd u = wv;
      u(0) -= 1.0;
      if (u.norm() > 1e-14) {
        Eigen::MatrixXd H = Eigen::MatrixXd::Identity(cell.size(), cell.size()) -
                            (2.0 / u.squaredNorm()) * (u * u.transpose());
        Vc = Vc * H;
      }
      Vc.col(0) = ones_unit;
      for (std::size_t c = 0; c < cell.size(); ++c) res.eigvecs.col(cell[c]) = Vc.col(c);
      break;
    }
  }

  res.eigtable.resize(nb, res.partition.size());
  for (int i = 0; i < nb; ++i)
    for (std::size_t j = 0; j < res.partition.size(); ++j) {
      const Eigen::VectorXd v = res.eigvecs.col(res.partition[j][0]);
      res.eigtable(i, j) = v.dot(mats[i] * v);
    }

  // A merged eigenvalue cell cannot reproduce basis matrices that separate
  // it; reconstruction failure therefore flags grouping ambiguity.
  for (int i = 0; i < nb; ++i) {
    Eigen::MatrixXd rec = Eigen::MatrixXd::Zero(K, K);
    for (std::size_t j = 0; j < res.partition.size(); ++j) {
      Eigen::MatrixXd E = Eigen::MatrixXd::Zero(K, K);
      for (int k : res.partition[j]) E += res.eigvecs.col(k) * res.eigvecs.col(k).transpose();
      rec += res.eigtable(i, j) * E;
    }
    if ((rec - mats[i]).cwiseAbs().maxCoeff() > 1e-9)
      throw std::runtime_error(
          "eigenvalue grouping ambiguous for the chosen generic weights; retry with different weights");
  }

  return res;
}

SchemeBasis make_scheme_basis(const std::vector<Eigen::MatrixXd>& mats,
                              const std::vector<double>& weights) {
  SchemeReport rep = verify_scheme(mats);
  if (!rep.pass) throw std::invalid_argument("not an association scheme (axiom " +
                                             std::to_string(rep.violated_axiom) + "): " + rep.detail);
  EigenbasisResult eb = common_eigenbasis(mats, weights);

  SchemeBasis basis;
  basis.mats = mats;
  basis.eigvecs = eb.eigvecs;
  basis.partition = eb.partition;
  basis.eigtable = eb.eigtable;

  const int K = basis.K();
  for (const auto& cell : basis.partition) {
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(K, K);
    for (int k : cell) E += basis.eigvecs.col(k) * basis.eigvecs.col(k).transpose();
    basis.idempotents.push_back(E);
  }

  for (const auto& B : mats) {
    bool found = false;
    for (int a = 0; a < K && !found; ++a)
      for (int b = 0; b < K && !found; ++b)
        if (B(a, b) != 0.0) {
          basis.support_rep.emplace_back(a, b);
          found = true;
        }
    if (!found) throw std::invalid_argument("scheme contains an all-zero matrix");
    basis.support_size.push_back(static_cast<int>(B.sum()));
  }

  // The projectors lie in the span of the basis, so they are constant on
  // each support; record those constants for fast span-domain transforms.
  basis.idem_coeff.resize(basis.num_mats(), basis.num_cells());
  for (int c = 0; c < basis.num_mats(); ++c)
    for (int j = 0; j < basis.num_cells(); ++j) {
      double v = basis.idempotents[j](basis.support_rep[c].first, basis.support_rep[c].second);
      basis.idem_coeff(c, j) = v;
      for (int a = 0; a < K; ++a)
        for (int b = 0; b < K; ++b)
          if (mats[c](a, b) != 0.0 && std::abs(basis.idempotents[j](a, b) - v) > 1e-8)
            throw std::runtime_error("eigenspace projector not constant on a basis support");
    }

  return basis;
}

SchemeBasis community_scheme(int K) {
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  std::vector<Eigen::MatrixXd> mats;
  mats.push_back(Eigen::MatrixXd::Identity(K, K));
  if (K > 1) mats.push_back(Eigen::MatrixXd::Ones(K, K) - Eigen::MatrixXd::Identity(K, K));
  return make_scheme_basis(mats);
}

SchemeBasis overlapping_scheme(int k) {
  if (k < 2) throw std::invalid_argument("k must be >= 2");
  const int K = k * k;
  std::vector<Eigen::MatrixXd> mats(3, Eigen::MatrixXd::Zero(K, K));
  for (int a = 0; a < K; ++a) {
    int a1 = a / k, a2 = a % k;
    for (int b = 0; b < K; ++b) {
      int b1 = b / k, b2 = b % k;
      int eq = (a1 == b1 ? 1 : 0) + (a2 == b2 ? 1 : 0);
      mats[2 - eq](a, b) = 1.0;
    }
  }
  return make_scheme_basis(mats);
}

SchemeBasis toric_scheme(int k, int d) {
  if (k < 1 || d < 1) throw std::invalid_argument("k and d must be >= 1");
  const int side = 2 * k;
  int K = 1;
  for (int j = 0; j < d; ++j) K *= side;

  // Distance-class tuples in {0..k}^d, lexicographic; (0,...,0) is B_0 = I.
  int nclasses = 1;
  for (int j = 0; j < d; ++j) nclasses *= (k + 1);
  if (nclasses > K) throw std::logic_error("distance class count exceeded K");

  auto digits = [&](int a) {
    std::vector<int> out(d);
    for (int j = d - 1; j >= 0; --j) {
      out[j] = a % side;
      a /= side;
    }
    return out;
  };
  auto tuple_index = [&](const std::vector<int>& t) {
    int idx = 0;
    for (int j = 0; j < d; ++j) idx = idx * (k + 1) + t[j];
    return idx;
  };

  std::vector<Eigen::MatrixXd> mats(nclasses, Eigen::MatrixXd::Zero(K, K));
  for (int a = 0; a < K; ++a) {
    auto da = digits(a);
    for (int b = 0; b < K; ++b) {
      auto db = digits(b);
      std::vector<int> t(d);
      for (int j = 0; j < d; ++j) {
        int diff = std::abs(da[j] - db[j]);
        t[j] = std::min(diff, side - diff);
      }
      mats[tuple_index(t)](a, b) = 1.0;
    }
  }
  return make_scheme_basis(mats);
}

Eigen::MatrixXd expand(const SchemeCoeffs& coeffs, const SchemeBasis& basis) {
  if (coeffs.gamma.size() != basis.num_mats()) throw std::invalid_argument("coefficient count mismatch");
  const int K = basis.K();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(K, K);
  for (int c = 0; c < basis.num_mats(); ++c) out += coeffs.gamma(c) * basis.mats[c];
  return out;
}

std::optional<SchemeCoeffs> try_decompose(const Eigen::MatrixXd& M, const SchemeBasis& basis,
                                          double* spread_out, double tol) {
  const int K = basis.K();
  if (M.rows() != K || M.cols() != K) throw std::invalid_argument("matrix size mismatch");
  SchemeCoeffs coeffs;
  coeffs.gamma.resize(basis.num_mats());
  double worst = 0.0;
  for (int c = 0; c < basis.num_mats(); ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int a = 0; a < K; ++a)
      for (int b = 0; b < K; ++b)
        if (basis.mats[c](a, b) != 0.0) {
          lo = std::min(lo, M(a, b));
          hi = std::max(hi, M(a, b));
        }
    coeffs.gamma(c) = M(basis.support_rep[c].first, basis.support_rep[c].second);
    worst = std::max(worst, hi - lo);
  }
  if (spread_out) *spread_out = worst;
  if (worst > tol) return std::nullopt;
  return coeffs;
}

SchemeCoeffs decompose(const Eigen::MatrixXd& M, const SchemeBasis& basis, double tol) {
  double spread = 0.0;
  auto c = try_decompose(M, basis, &spread, tol);
  if (!c) {
    std::ostringstream os;
    os << "matrix not in scheme span (within-support spread " << spread << ")";
    throw std::invalid_argument(os.str());
  }
  return *c;
}

}  // namespace blocksdp
