#include "blocksdp/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "blocksdp/rng.hpp"

namespace blocksdp {

namespace {

void warn(const std::string& msg) { std::cerr << "[blocksdp] warning: " << msg << "\n"; }

// Mode of a value partition under the (symmetrized) block mass; ties go to
// the smallest value.
double block_mode(const Eigen::MatrixXd& block, const ValuePartition& classes) {
  double best_mass = -1.0;
  double best_value = 0.0;
  for (int cell = 0; cell < classes.num_cells(); ++cell) {
    double mass = 0.0;
    for (auto [a, b] : classes.cells[cell]) mass += block(a, b);
    double v = classes.values[cell];
    if (mass > best_mass + 1e-15 || (std::abs(mass - best_mass) <= 1e-15 && v < best_value)) {
      best_mass = std::max(mass, best_mass);
      best_value = v;
    }
  }
  return best_value;
}

Eigen::MatrixXd map_estimate_values(const SdpSolution& sol, const Eigen::MatrixXd& value_matrix) {
  const int n = sol.X.n;
  ValuePartition classes = equal_value_classes(value_matrix);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Eigen::MatrixXd sym = 0.5 * (sol.X.block(i, j) + sol.X.block(j, i));
      out(i, j) = out(j, i) = block_mode(sym, classes);
    }
  return out;
}

Eigen::MatrixXd randomized_estimate_values(const SdpSolution& sol,
                                           const Eigen::MatrixXd& value_matrix,
                                           std::uint64_t seed) {
  const int n = sol.X.n;
  const int K = static_cast<int>(value_matrix.rows());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Eigen::MatrixXd block = sol.X.block(i, j);
      double mass = block.sum();
      if (std::abs(mass - 1.0) > 1e-6) throw std::runtime_error("block mass deviates from 1");
      KeyedRng rng(seed, 0x64726177 /*draw*/, static_cast<std::uint64_t>(i),
                   static_cast<std::uint64_t>(j));
      double u = rng.next_double() * mass;
      double acc = 0.0;
      int pick_a = K - 1, pick_b = K - 1;
      for (int a = 0; a < K && acc <= u; ++a)
        for (int b = 0; b < K; ++b) {
          acc += block(a, b);
          if (acc > u) {
            pick_a = a;
            pick_b = b;
            break;
          }
        }
      out(i, j) = out(j, i) = value_matrix(pick_a, pick_b);
    }
  return out;
}

// Lloyd's algorithm with k-means++ seeding; empty clusters are refilled by
// splitting the largest one at its farthest point.
std::vector<int> kmeans(const Eigen::MatrixXd& points, int K, KeyedRng& rng) {
  const int n = static_cast<int>(points.rows());
  const int dim = static_cast<int>(points.cols());
  const int restarts = 10;
  const int max_iter = 100;

  std::vector<int> best_assign(n, 0);
  double best_inertia = std::numeric_limits<double>::infinity();

  for (int r = 0; r < restarts; ++r) {
    Eigen::MatrixXd centers(K, dim);
    // k-means++: first center uniform, then proportional to squared distance.
    centers.row(0) = points.row(static_cast<int>(rng.next_below(n)));
    Eigen::VectorXd d2 = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < K; ++c) {
      double total = d2.sum();
      int pick = 0;
      if (total > 0.0) {
        double u = rng.next_double() * total;
        double acc = 0.0;
        for (pick = 0; pick < n - 1; ++pick) {
          acc += d2(pick);
          if (acc > u) break;
        }
      } else {
        pick = static_cast<int>(rng.next_below(n));
      }
      centers.row(c) = points.row(pick);
      d2 = d2.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }

    std::vector<int> assign(n, 0);
    for (int it = 0; it < max_iter; ++it) {
      bool changed = false;
      for (int i = 0; i < n; ++i) {
        int arg = 0;
        double best = (points.row(i) - centers.row(0)).squaredNorm();
        for (int c = 1; c < K; ++c) {
          double v = (points.row(i) - centers.row(c)).squaredNorm();
          if (v < best) {
            best = v;
            arg = c;
          }
        }
        if (assign[i] != arg) {
          assign[i] = arg;
          changed = true;
        }
      }

      std::vector<int> count(K, 0);
      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(K, dim);
      for (int i = 0; i < n; ++i) {
        ++count[assign[i]];
        sums.row(assign[i]) += points.row(i);
      }
      for (int c = 0; c < K; ++c) {
        if (count[c] == 0) {
          int big = static_cast<int>(std::max_element(count.begin(), count.end()) - count.begin());
          int far_i = -1;
          double far_d = -1.0;
          for (int i = 0; i < n; ++i)
            if (assign[i] == big) {
              double v = (points.row(i) - centers.row(big)).squaredNorm();
              if (v > far_d) {
                far_d = v;
                far_i = i;
              }
            }
          assign[far_i] = c;
          --count[big];
          ++count[c];
          sums.row(big) -= points.row(far_i);
          sums.row(c) = points.row(far_i);
          changed = true;
        }
      }
      for (int c = 0; c < K; ++c) centers.row(c) = sums.row(c) / std::max(count[c], 1);
      if (!changed && it > 0) break;
    }

    double inertia = 0.0;
    for (int i = 0; i < n; ++i) inertia += (points.row(i) - centers.row(assign[i])).squaredNorm();
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_assign = assign;
    }
  }
  return best_assign;
}

}  // namespace

EdgeProbMatrix map_estimate_P(const SdpSolution& sol, const ThetaHat& th) {
  return EdgeProbMatrix{map_estimate_values(sol, th.theta)};
}

EdgeProbMatrix randomized_estimate_P(const SdpSolution& sol, const ThetaHat& th,
                                     std::uint64_t seed) {
  return EdgeProbMatrix{randomized_estimate_values(sol, th.theta, seed)};
}

Labels spectral_cluster(const Eigen::MatrixXd& M, int K, std::uint64_t seed) {
  const int n = static_cast<int>(M.rows());
  if (K > n) throw std::invalid_argument("K exceeds point count");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));

  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(es.eigenvalues()(a)) > std::abs(es.eigenvalues()(b));
  });

  Eigen::MatrixXd coords(n, K);
  for (int c = 0; c < K; ++c) coords.col(c) = es.eigenvectors().col(idx[c]);

  KeyedRng rng(seed, 0x6b6d6e73 /*kmns*/);
  Labels out;
  out.z = kmeans(coords, K, rng);
  return out;
}

Eigen::MatrixXd estimate_theta(const Adjacency& A, const Labels& zhat, int K) {
  if (zhat.n() != A.n) throw std::invalid_argument("label count mismatch");
  Eigen::MatrixXd num = Eigen::MatrixXd::Zero(K, K);
  Eigen::VectorXd count = Eigen::VectorXd::Zero(K);
  for (int zi : zhat.z) {
    if (zi < 0 || zi >= K) throw std::invalid_argument("label out of range");
    count(zi) += 1.0;
  }
  for (auto [i, j] : A.edges) {
    num(zhat.z[i], zhat.z[j]) += 1.0;
    num(zhat.z[j], zhat.z[i]) += 1.0;
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(K, K);
  bool empty_cell = false;
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b) {
      double denom = count(a) * count(b);  // ordered pairs, i=j included
      if (denom == 0.0)
        empty_cell = true;
      else
        out(a, b) = num(a, b) / denom;
    }
  if (empty_cell) warn("estimate_theta: empty class cell, density set to 0");
  return out;
}

Eigen::MatrixXd threshold_graph(const Eigen::MatrixXd& theta_est, double gamma0, double gamma1) {
  if (!(gamma0 > gamma1)) throw std::invalid_argument("gamma0 must exceed gamma1");
  double cut = 0.5 * (gamma0 + gamma1);
  return (theta_est.array() >= cut).cast<double>().matrix();
}

namespace {

void bron_kerbosch(const std::vector<std::vector<int>>& adj, std::vector<int>& R,
                   std::vector<int> P, std::vector<int> X,
                   std::vector<std::vector<int>>& out) {
  if (P.empty() && X.empty()) {
    out.push_back(R);
    return;
  }
  // Pivot on the vertex with most neighbors in P.
  int pivot = -1, best = -1;
  for (int lst = 0; lst < 2; ++lst)
    for (int v : (lst == 0 ? P : X)) {
      int cnt = 0;
      for (int u : P)
        if (std::binary_search(adj[v].begin(), adj[v].end(), u)) ++cnt;
      if (cnt > best) {
        best = cnt;
        pivot = v;
      }
    }
  std::vector<int> candidates;
  for (int v : P)
    if (!std::binary_search(adj[pivot].begin(), adj[pivot].end(), v)) candidates.push_back(v);
  for (int v : candidates) {
    std::vector<int> Pn, Xn;
    for (int u : P)
      if (std::binary_search(adj[v].begin(), adj[v].end(), u)) Pn.push_back(u);
    for (int u : X)
      if (std::binary_search(adj[v].begin(), adj[v].end(), u)) Xn.push_back(u);
    R.push_back(v);
    bron_kerbosch(adj, R, Pn, Xn, out);
    R.pop_back();
    P.erase(std::find(P.begin(), P.end(), v));
    X.insert(std::lower_bound(X.begin(), X.end(), v), v);
  }
}

}  // namespace

std::vector<std::vector<int>> maximal_cliques(const Eigen::MatrixXd& G) {
  const int K = static_cast<int>(G.rows());
  if (K > 64) throw std::invalid_argument("clique enumeration limited to K <= 64");
  std::vector<std::vector<int>> adj(K);
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b)
      if (a != b && G(a, b) != 0.0) adj[a].push_back(b);

  std::vector<std::vector<int>> out;
  std::vector<int> R, P(K), X;
  for (int v = 0; v < K; ++v) P[v] = v;
  bron_kerbosch(adj, R, P, X, out);
  for (auto& c : out) std::sort(c.begin(), c.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<int>> overlapping_communities(
    const Labels& zhat, const std::vector<std::vector<int>>& cliques) {
  std::vector<std::vector<int>> out;
  out.reserve(cliques.size());
  for (const auto& clique : cliques) {
    std::vector<int> members;
    for (int i = 0; i < zhat.n(); ++i)
      if (std::binary_search(clique.begin(), clique.end(), zhat.z[i])) members.push_back(i);
    out.push_back(std::move(members));
  }
  return out;
}

ToricGrid toric_grid(int k, int d) {
  if (k < 1 || d < 1) throw std::invalid_argument("k and d must be >= 1");
  const int side = 2 * k;
  int K = 1;
  for (int j = 0; j < d; ++j) K *= side;

  ToricGrid grid;
  grid.k = k;
  grid.d = d;
  grid.points.resize(K, d);
  for (int a = 0; a < K; ++a) {
    int rest = a;
    for (int j = d - 1; j >= 0; --j) {
      grid.points(a, j) = static_cast<double>(rest % side) / k;
      rest /= side;
    }
  }
  grid.sqdist = Eigen::MatrixXd::Zero(K, K);
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b) {
      double s = 0.0;
      for (int j = 0; j < d; ++j) {
        double diff = std::abs(grid.points(a, j) - grid.points(b, j));
        double wrap = std::min(diff, 2.0 - diff);
        s += wrap * wrap;
      }
      grid.sqdist(a, b) = s;
    }
  return grid;
}

ThetaHat latent_theta(int k, int d, double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("sigma must be positive");
  ToricGrid grid = toric_grid(k, d);
  SchemeBasis basis = toric_scheme(k, d);
  // One logistic value per distance class keeps theta exactly constant on
  // each scheme support.
  SchemeCoeffs coeffs;
  coeffs.gamma.resize(basis.num_mats());
  for (int c = 0; c < basis.num_mats(); ++c) {
    auto [a, b] = basis.support_rep[c];
    double delta = std::sqrt(grid.sqdist(a, b));
    double e = std::exp(-delta / sigma);
    coeffs.gamma(c) = e / (1.0 + e);
  }
  return ThetaHat::from_scheme(basis, coeffs);
}

Eigen::MatrixXd map_estimate_D(const SdpSolution& sol, const ToricGrid& grid) {
  return map_estimate_values(sol, grid.sqdist);
}

Eigen::MatrixXd randomized_estimate_D(const SdpSolution& sol, const ToricGrid& grid,
                                      std::uint64_t seed) {
  return randomized_estimate_values(sol, grid.sqdist, seed);
}

Eigen::MatrixXd embed_coordinates(const Eigen::MatrixXd& D, int d) {
  const int n = static_cast<int>(D.rows());
  if (D.cols() != n) throw std::invalid_argument("D must be square");
  Eigen::MatrixXd C = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  Eigen::MatrixXd B = -0.5 * C * D * C;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (B + B.transpose()));

  Eigen::MatrixXd coords = Eigen::MatrixXd::Zero(n, d);
  int padded = 0;
  for (int c = 0; c < d; ++c) {
    int col = n - 1 - c;  // eigenvalues ascending
    if (col < 0 || es.eigenvalues()(col) <= 0.0) {
      ++padded;
      continue;
    }
    coords.col(c) = es.eigenvectors().col(col) * std::sqrt(es.eigenvalues()(col));
  }
  if (padded > 0) warn("embed_coordinates: fewer than d nonnegative eigenvalues, zero-padded");
  return coords;
}

}  // namespace blocksdp
