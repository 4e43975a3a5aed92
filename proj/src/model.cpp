#include "blocksdp/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "blocksdp/rng.hpp"

namespace blocksdp {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

int Labels::num_classes() const {
  int k = 0;
  for (int zi : z) k = std::max(k, zi + 1);
  return k;
}

BlockParams BlockParams::make(const Eigen::MatrixXd& theta, const Eigen::VectorXd& pi) {
  require(theta.rows() == theta.cols(), "theta must be square");
  require(theta.rows() == pi.size(), "theta and pi sizes disagree");
  require(theta.isApprox(theta.transpose(), 0.0) || (theta - theta.transpose()).cwiseAbs().maxCoeff() == 0.0,
          "theta must be symmetric");
  require(theta.minCoeff() >= 0.0 && theta.maxCoeff() <= 1.0, "theta entries must lie in [0,1]");
  require(pi.minCoeff() >= 0.0, "pi entries must be nonnegative");
  require(std::abs(pi.sum() - 1.0) <= 1e-12, "pi must sum to 1");
  return BlockParams{static_cast<int>(pi.size()), theta, pi};
}

EdgeProbMatrix EdgeProbMatrix::make(const Eigen::MatrixXd& P) {
  require(P.rows() == P.cols(), "P must be square");
  require((P - P.transpose()).cwiseAbs().maxCoeff() == 0.0, "P must be symmetric");
  require(P.diagonal().cwiseAbs().maxCoeff() == 0.0, "P must have zero diagonal");
  require(P.minCoeff() >= 0.0 && P.maxCoeff() <= 1.0, "P entries must lie in [0,1]");
  return EdgeProbMatrix{P};
}

Eigen::MatrixXd Adjacency::dense() const {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (auto [i, j] : edges) {
    A(i, j) = 1.0;
    A(j, i) = 1.0;
  }
  return A;
}

bool Adjacency::has_edge(int i, int j) const {
  if (i == j) return false;
  auto e = std::minmax(i, j);
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(e.first, e.second));
}

Adjacency Adjacency::from_dense(const Eigen::MatrixXd& A) {
  require(A.rows() == A.cols(), "adjacency must be square");
  Adjacency out;
  out.n = static_cast<int>(A.rows());
  for (int i = 0; i < out.n; ++i) {
    require(A(i, i) == 0.0, "adjacency must have zero diagonal");
    for (int j = i + 1; j < out.n; ++j) {
      require(A(i, j) == A(j, i), "adjacency must be symmetric");
      require(A(i, j) == 0.0 || A(i, j) == 1.0, "adjacency entries must be binary");
      if (A(i, j) == 1.0) out.edges.emplace_back(i, j);
    }
  }
  return out;
}

LatentConfig LatentConfig::make(double sigma, const Eigen::MatrixXd& coords) {
  require(sigma > 0.0, "sigma must be positive");
  require(coords.size() == 0 || (coords.minCoeff() >= 0.0 && coords.maxCoeff() <= 1.0),
          "latent coordinates must lie in [0,1]^d");
  return LatentConfig{static_cast<int>(coords.cols()), sigma, coords};
}

Labels sample_labels(const Eigen::VectorXd& pi, int n, std::uint64_t seed) {
  require(n > 0, "n must be positive");
  require(pi.size() > 0 && pi.minCoeff() >= 0.0, "pi must be a probability vector");
  require(std::abs(pi.sum() - 1.0) <= 1e-12, "pi must sum to 1");
  const int K = static_cast<int>(pi.size());
  Labels out;
  out.z.resize(n);
  for (int i = 0; i < n; ++i) {
    KeyedRng rng(seed, 0x6c61626c /*labl*/, static_cast<std::uint64_t>(i));
    double u = rng.next_double();
    double acc = 0.0;
    int zi = K - 1;
    for (int a = 0; a < K; ++a) {
      acc += pi(a);
      if (u < acc) {
        zi = a;
        break;
      }
    }
    out.z[i] = zi;
  }
  return out;
}

Eigen::MatrixXd block_lookup_matrix(const Eigen::MatrixXd& theta, const Labels& z) {
  const int n = z.n();
  const int K = static_cast<int>(theta.rows());
  for (int zi : z.z) require(zi >= 0 && zi < K, "label out of range for theta");
  Eigen::MatrixXd P(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) P(i, j) = theta(z.z[i], z.z[j]);
  return P;
}

EdgeProbMatrix block_probability_matrix(const Eigen::MatrixXd& theta, const Labels& z) {
  Eigen::MatrixXd P = block_lookup_matrix(theta, z);
  P.diagonal().setZero();
  return EdgeProbMatrix::make(P);
}

Adjacency sample_adjacency(const EdgeProbMatrix& P, std::uint64_t seed,
                           const std::vector<int>* node_ids) {
  const int n = P.n();
  require(node_ids == nullptr || static_cast<int>(node_ids->size()) == n,
          "node_ids length must equal node count");
  Adjacency out;
  out.n = n;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (P.P(i, j) <= 0.0) continue;
      int a = node_ids ? (*node_ids)[i] : i;
      int b = node_ids ? (*node_ids)[j] : j;
      if (a > b) std::swap(a, b);
      KeyedRng rng(seed, 0x65646765 /*edge*/, static_cast<std::uint64_t>(a),
                   static_cast<std::uint64_t>(b));
      if (rng.next_double() < P.P(i, j)) out.edges.emplace_back(i, j);
    }
  }
  return out;
}

EdgeProbMatrix latent_probability_matrix(const LatentConfig& cfg) {
  require(cfg.sigma > 0.0, "sigma must be positive");
  const int n = static_cast<int>(cfg.coords.rows());
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double dist = (cfg.coords.row(i) - cfg.coords.row(j)).norm();
      double e = std::exp(-dist / cfg.sigma);
      P(i, j) = P(j, i) = e / (1.0 + e);
    }
  }
  return EdgeProbMatrix{P};
}

double empirical_density(const Adjacency& A) {
  require(A.n >= 2, "density needs at least two nodes");
  double num = 2.0 * static_cast<double>(A.edges.size());
  return num / (static_cast<double>(A.n) * (A.n - 1));
}

ValuePartition equal_value_classes(const Eigen::MatrixXd& B) {
  const int K = static_cast<int>(B.rows());
  ValuePartition out;
  out.cell_of = Eigen::MatrixXi::Constant(K, B.cols(), -1);
  std::map<double, int> seen;  // bitwise-exact keys: doubles compare exactly
  for (int a = 0; a < K; ++a) {
    for (int b = 0; b < B.cols(); ++b) {
      double v = B(a, b);
      auto it = seen.find(v);
      int cell;
      if (it == seen.end()) {
        cell = static_cast<int>(out.values.size());
        seen.emplace(v, cell);
        out.values.push_back(v);
        out.cells.emplace_back();
      } else {
        cell = it->second;
      }
      out.cell_of(a, b) = cell;
      out.cells[cell].emplace_back(a, b);
    }
  }
  return out;
}

MisspecReport check_misspecification(const Eigen::MatrixXd& Bhat, const Eigen::MatrixXd& Bstar) {
  require(Bhat.rows() == Bstar.rows() && Bhat.cols() == Bstar.cols(), "size mismatch");
  require(Bhat.minCoeff() > 0.0 && Bstar.minCoeff() > 0.0,
          "misspecification check needs strictly positive entries");
  const int K = static_cast<int>(Bhat.rows());
  MisspecReport rep;

  ValuePartition qhat = equal_value_classes(Bhat);
  ValuePartition qstar = equal_value_classes(Bstar);
  for (int a = 0; a < K && !rep.partition_mismatch; ++a)
    for (int b = 0; b < K && !rep.partition_mismatch; ++b)
      for (int c = 0; c < K && !rep.partition_mismatch; ++c)
        for (int d = 0; d < K; ++d) {
          bool same_hat = qhat.cell_of(a, b) == qhat.cell_of(c, d);
          bool same_star = qstar.cell_of(a, b) == qstar.cell_of(c, d);
          if (same_hat != same_star) {
            rep.partition_mismatch = true;
            break;
          }
        }

  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b)
      for (int c = 0; c < K; ++c)
        for (int d = 0; d < K; ++d) {
          if (qstar.cell_of(c, d) == qstar.cell_of(a, b)) continue;
          double lhs = Bstar(a, b) * std::log(Bhat(a, b) / Bhat(c, d)) - (Bhat(a, b) - Bhat(c, d));
          if (!(lhs > 0.0)) rep.violations.push_back({a, b, c, d});
        }

  rep.pass = !rep.partition_mismatch && rep.violations.empty();
  return rep;
}

Eigen::VectorXd expected_spectrum(const Eigen::MatrixXd& Bstar, const Labels& z, double alpha) {
  const int K = static_cast<int>(Bstar.rows());
  const int n = z.n();
  Eigen::VectorXd freq = Eigen::VectorXd::Zero(K);
  for (int zi : z.z) {
    require(zi >= 0 && zi < K, "label out of range for Bstar");
    freq(zi) += 1.0 / n;
  }
  Eigen::VectorXd root = freq.cwiseSqrt();
  Eigen::MatrixXd M = root.asDiagonal() * Bstar * root.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  Eigen::VectorXd vals = n * alpha * es.eigenvalues();
  std::sort(vals.data(), vals.data() + vals.size());
  return vals;
}

}  // namespace blocksdp
