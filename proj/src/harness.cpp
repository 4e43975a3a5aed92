#include "blocksdp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "blocksdp/baselines.hpp"
#include "blocksdp/io.hpp"
#include "blocksdp/metrics.hpp"
#include "blocksdp/rng.hpp"

namespace blocksdp {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string model_name(ModelKind m) {
  switch (m) {
    case ModelKind::community: return "community";
    case ModelKind::overlapping: return "overlapping";
    case ModelKind::latent: return "latent";
  }
  return "?";
}

int model_classes(const ExperimentConfig& cfg) {
  switch (cfg.model) {
    case ModelKind::community: return cfg.K;
    case ModelKind::overlapping: return cfg.k * cfg.k;
    case ModelKind::latent: {
      int K = 1;
      for (int j = 0; j < cfg.d; ++j) K *= 2 * cfg.k;
      return K;
    }
  }
  return 0;
}

// Pattern matrices for degree targeting: ratio on the dense cells, 1 on the
// sparse cells.
Eigen::MatrixXd community_pattern(int K, double ratio) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Ones(K, K);
  B.diagonal().setConstant(ratio);
  return B;
}

Eigen::MatrixXd overlapping_pattern(int k, double ratio) {
  const int K = k * k;
  Eigen::MatrixXd B = Eigen::MatrixXd::Ones(K, K);
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b)
      if (a / k == b / k || a % k == b % k) B(a, b) = ratio;
  return B;
}

Eigen::MatrixXd generative_pattern(const ExperimentConfig& cfg) {
  return cfg.model == ModelKind::overlapping ? overlapping_pattern(cfg.k, cfg.gamma_ratio)
                                             : community_pattern(model_classes(cfg), cfg.gamma_ratio);
}

double pattern_density(const Eigen::MatrixXd& B, const Eigen::VectorXd& pi) {
  return pi.dot(B * pi);
}

Eigen::MatrixXd latent_coords(const ExperimentConfig& cfg, int n, std::uint64_t seed) {
  Eigen::MatrixXd y(n, cfg.d);
  if (cfg.latent_shape == "uniform") {
    for (int i = 0; i < n; ++i) {
      KeyedRng rng(seed, 0x79637264 /*ycrd*/, static_cast<std::uint64_t>(i));
      for (int j = 0; j < cfg.d; ++j) y(i, j) = rng.next_double();
    }
    return y;
  }
  if (cfg.d != 2) throw std::invalid_argument("circle/cross shapes require d=2");
  if (cfg.latent_shape == "circle") {
    for (int i = 0; i < n; ++i) {
      double phi = 2.0 * M_PI * i / n;
      y(i, 0) = 0.5 + 0.35 * std::cos(phi);
      y(i, 1) = 0.5 + 0.35 * std::sin(phi);
    }
    return y;
  }
  if (cfg.latent_shape == "cross") {
    for (int i = 0; i < n; ++i) {
      double t = 0.1 + 0.8 * (i % (n / 2)) / std::max(1, n / 2 - 1);
      if (i < n / 2) {
        y(i, 0) = t;
        y(i, 1) = 0.5;
      } else {
        y(i, 0) = 0.5;
        y(i, 1) = t;
      }
    }
    return y;
  }
  throw std::invalid_argument("unknown latent shape: " + cfg.latent_shape);
}

double latent_density(const Eigen::MatrixXd& coords, double sigma) {
  LatentConfig lc = LatentConfig::make(sigma, coords);
  EdgeProbMatrix P = latent_probability_matrix(lc);
  const int n = P.n();
  return P.P.sum() / (static_cast<double>(n) * (n - 1));
}

// Bandwidth hitting the target density; the density is increasing in sigma
// with supremum 1/2.
double calibrate_sigma(const Eigen::MatrixXd& coords, double target) {
  if (target >= 0.5) return 1e4;
  double lo = 1e-4, hi = 1e4;
  for (int it = 0; it < 100; ++it) {
    double mid = std::sqrt(lo * hi);
    if (latent_density(coords, mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return std::sqrt(lo * hi);
}

std::vector<std::string> default_methods(ModelKind m) {
  switch (m) {
    case ModelKind::community: return {"sdp_map", "spectral_A"};
    case ModelKind::overlapping: return {"sdp_map", "spectral_A"};
    case ModelKind::latent: return {"sdp_map", "usvt"};
  }
  return {};
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

struct Aggregate {
  double sum = 0.0;
  double sumsq = 0.0;
  int count = 0;

  void add(double v) {
    sum += v;
    sumsq += v * v;
    ++count;
  }
  double mean() const { return count ? sum / count : 0.0; }
  double se() const {
    if (count < 2) return 0.0;
    double m = mean();
    double var = (sumsq - count * m * m) / (count - 1);
    return std::sqrt(std::max(0.0, var) / count);
  }
};

const char* kPalette[] = {"#4477aa", "#cc3311", "#228833", "#ee7733", "#aa3377", "#66ccee"};

// Display precision for aggregates; the raw CSV keeps full precision.
std::string short_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::map<std::string, std::map<double, Aggregate>>& series) {
  const double W = 640, H = 440, ml = 70, mr = 160, mt = 50, mb = 55;
  double xmin = 1e300, xmax = -1e300, ymax = 0.0;
  for (const auto& [name, pts] : series)
    for (const auto& [x, agg] : pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymax = std::max(ymax, agg.mean() + agg.se());
    }
  if (series.empty() || xmin > xmax) return;
  if (xmax == xmin) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  if (ymax <= 0.0) ymax = 1.0;
  ymax *= 1.1;

  auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto sy = [&](double y) { return H - mb - y / ymax * (H - mt - mb); };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='15' "
         "font-family='sans-serif'>" << title << "</text>\n";
  out << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr << "' y2='" << H - mb
      << "' stroke='black'/>\n";
  out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << H - mb
      << "' stroke='black'/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    double y = ymax * tick / 4.0;
    out << "<line x1='" << ml - 4 << "' y1='" << sy(y) << "' x2='" << ml << "' y2='" << sy(y)
        << "' stroke='black'/>\n";
    out << "<text x='" << ml - 8 << "' y='" << sy(y) + 4
        << "' text-anchor='end' font-size='11' font-family='sans-serif'>"
        << static_cast<int>(y * 1000) / 1000.0 << "</text>\n";
  }
  std::set<double> xticks;
  for (const auto& [name, pts] : series)
    for (const auto& [x, agg] : pts) xticks.insert(x);
  for (double x : xticks) {
    out << "<line x1='" << sx(x) << "' y1='" << H - mb << "' x2='" << sx(x) << "' y2='"
        << H - mb + 4 << "' stroke='black'/>\n";
    out << "<text x='" << sx(x) << "' y='" << H - mb + 18
        << "' text-anchor='middle' font-size='11' font-family='sans-serif'>" << x << "</text>\n";
  }
  out << "<text x='" << (ml + W - mr) / 2 << "' y='" << H - 12
      << "' text-anchor='middle' font-size='12' font-family='sans-serif'>n</text>\n";

  int color = 0;
  double ly = mt + 10;
  for (const auto& [name, pts] : series) {
    const char* col = kPalette[color % 6];
    std::ostringstream poly;
    for (const auto& [x, agg] : pts) poly << sx(x) << "," << sy(agg.mean()) << " ";
    out << "<polyline points='" << poly.str() << "' fill='none' stroke='" << col
        << "' stroke-width='2'/>\n";
    for (const auto& [x, agg] : pts) {
      double m = agg.mean(), e = agg.se();
      out << "<circle cx='" << sx(x) << "' cy='" << sy(m) << "' r='3' fill='" << col << "'/>\n";
      if (e > 0.0) {
        out << "<line x1='" << sx(x) << "' y1='" << sy(m - e) << "' x2='" << sx(x) << "' y2='"
            << sy(std::min(m + e, ymax)) << "' stroke='" << col << "'/>\n";
      }
    }
    out << "<line x1='" << W - mr + 10 << "' y1='" << ly << "' x2='" << W - mr + 34 << "' y2='"
        << ly << "' stroke='" << col << "' stroke-width='2'/>\n";
    out << "<text x='" << W - mr + 40 << "' y='" << ly + 4
        << "' font-size='11' font-family='sans-serif'>" << name << "</text>\n";
    ly += 18;
    ++color;
  }
  out << "</svg>\n";
}

}  // namespace

Eigen::VectorXd resolve_pi(const ExperimentConfig& cfg, int K) {
  if (cfg.pi_mode == "balanced") return Eigen::VectorXd::Constant(K, 1.0 / K);
  if (cfg.pi_mode == "unbalanced") {
    Eigen::VectorXd w(K);
    for (int a = 0; a < K; ++a) w(a) = static_cast<double>(K - a);
    return w / w.sum();
  }
  if (cfg.pi_mode == "explicit") {
    if (cfg.pi_explicit.size() != K) throw std::invalid_argument("pi length must equal K");
    return cfg.pi_explicit / cfg.pi_explicit.sum();
  }
  throw std::invalid_argument("unknown pi mode: " + cfg.pi_mode);
}

std::uint64_t task_seed(std::uint64_t seed, int n, double degree, int rep) {
  KeyedRng rng(seed, static_cast<std::uint64_t>(n),
               static_cast<std::uint64_t>(std::llround(degree * 1e6)),
               static_cast<std::uint64_t>(rep));
  return rng.next_u64();
}

GeneratedInstance generate_instance(const ExperimentConfig& cfg, int n, double degree,
                                    std::uint64_t seed) {
  GeneratedInstance inst;
  inst.n = n;
  inst.K = model_classes(cfg);

  if (cfg.model == ModelKind::latent) {
    inst.coords = latent_coords(cfg, n, seed);
    double target = degree / n;
    inst.sigma_used = cfg.sigma > 0.0 ? cfg.sigma : calibrate_sigma(inst.coords, target);
    inst.P = latent_probability_matrix(LatentConfig::make(inst.sigma_used, inst.coords));
    inst.A = sample_adjacency(inst.P, seed);
    return inst;
  }

  inst.pi = resolve_pi(cfg, inst.K);
  Eigen::MatrixXd B = generative_pattern(cfg);
  if (cfg.gamma0 > 0.0 && cfg.gamma1 > 0.0) {
    inst.gamma0 = cfg.gamma0;
    inst.gamma1 = cfg.gamma1;
  } else {
    double scale = (degree / n) / pattern_density(B, inst.pi);
    inst.gamma1 = scale;
    inst.gamma0 = std::min(1.0, cfg.gamma_ratio * scale);
  }
  inst.theta = Eigen::MatrixXd::Constant(inst.K, inst.K, inst.gamma1);
  for (int a = 0; a < inst.K; ++a)
    for (int b = 0; b < inst.K; ++b)
      if (B(a, b) != 1.0) inst.theta(a, b) = inst.gamma0;

  inst.z = sample_labels(inst.pi, n, seed);
  inst.P = block_probability_matrix(inst.theta, inst.z);
  inst.A = sample_adjacency(inst.P, seed);
  return inst;
}

ThetaHat solver_theta_hat(const ExperimentConfig& cfg, const GeneratedInstance& inst) {
  if (cfg.model == ModelKind::latent)
    return latent_theta(cfg.k, cfg.d, inst.sigma_used);

  double alpha_hat = empirical_density(inst.A);
  SchemeBasis basis;
  Eigen::MatrixXd Bhat;
  if (cfg.solver_theta == "community") {
    basis = community_scheme(inst.K);
    Bhat = community_pattern(inst.K, cfg.gamma_ratio);
  } else if (cfg.solver_theta == "matched") {
    basis = cfg.model == ModelKind::overlapping ? overlapping_scheme(cfg.k)
                                                : community_scheme(inst.K);
    Bhat = generative_pattern(cfg);
  } else {
    throw std::invalid_argument("unknown solver_theta: " + cfg.solver_theta);
  }
  Eigen::MatrixXd theta_hat = (alpha_hat / pattern_density(Bhat, inst.pi)) * Bhat;
  theta_hat = theta_hat.cwiseMin(1.0 - 1e-9);
  return ThetaHat::from_scheme(basis, decompose(theta_hat.cwiseMax(1e-12), basis));
}

std::vector<std::vector<int>> true_overlapping_communities(const Labels& z, int k) {
  std::vector<std::vector<int>> C(2 * k);
  for (int i = 0; i < z.n(); ++i) {
    int a1 = z.z[i] / k, a2 = z.z[i] % k;
    C[a1].push_back(i);
    C[k + a2].push_back(i);
  }
  return C;
}

namespace {

struct TaskResult {
  std::vector<ResultRow> rows;
};

void run_task(const ExperimentConfig& cfg, int n, double degree, int rep,
              std::vector<ResultRow>& rows) {
  const std::uint64_t seed = task_seed(cfg.seed, n, degree, rep);
  GeneratedInstance inst = generate_instance(cfg, n, degree, seed);
  const std::vector<std::string> methods =
      cfg.methods.empty() ? default_methods(cfg.model) : cfg.methods;

  auto emit = [&](const std::string& method, const std::string& metric, double value,
                  double wall) {
    rows.push_back({model_name(cfg.model), n, inst.K, degree, seed, method, metric, value,
                    cfg.timing ? wall : 0.0});
  };

  bool need_sdp = false;
  for (const auto& m : methods) need_sdp |= m.rfind("sdp", 0) == 0;

  ThetaHat th;
  SdpSolution sol;
  ToricGrid grid;
  double solve_ms = 0.0;
  bool sdp_failed = false;
  if (need_sdp) {
    th = solver_theta_hat(cfg, inst);
    if (cfg.model == ModelKind::latent) grid = toric_grid(cfg.k, cfg.d);
    BlockMatrix F = build_objective(inst.A, th);
    const SchemeBasis* basis = th.scheme ? &th.scheme->basis : nullptr;
    auto t0 = Clock::now();
    try {
      sol = solve(F, cfg.solver, basis);
    } catch (const DivergenceError&) {
      sdp_failed = true;
    }
    solve_ms = ms_since(t0);
  }

  for (const auto& method : methods) {
    auto t0 = Clock::now();
    if (method.rfind("sdp", 0) == 0) {
      if (sdp_failed) {
        emit(method, "failed", 1.0, solve_ms);
        continue;
      }
      if (cfg.model == ModelKind::latent) {
        Eigen::MatrixXd D = method == "sdp_randomized"
                                ? randomized_estimate_D(sol, grid, seed)
                                : map_estimate_D(sol, grid);
        Eigen::MatrixXd yhat = embed_coordinates(D, cfg.d);
        emit(method, "aligned_rms", aligned_rms(yhat, inst.coords), solve_ms + ms_since(t0));
      } else {
        EdgeProbMatrix Pest = method == "sdp_randomized"
                                  ? randomized_estimate_P(sol, th, seed)
                                  : map_estimate_P(sol, th);
        Labels zhat = spectral_cluster(Pest.P, inst.K, seed);
        emit(method, "misclassification", misclassification(zhat, inst.z),
             solve_ms + ms_since(t0));
        if (cfg.model == ModelKind::overlapping) {
          Eigen::MatrixXd theta_est = estimate_theta(inst.A, zhat, inst.K);
          Eigen::MatrixXd G = threshold_graph(theta_est, inst.gamma0, inst.gamma1);
          auto cliques = maximal_cliques(G);
          auto Chat = overlapping_communities(zhat, cliques);
          auto C = true_overlapping_communities(inst.z, cfg.k);
          emit(method, "community_set_error", community_set_error(Chat, C),
               solve_ms + ms_since(t0));
        }
      }
    } else if (method == "spectral_A") {
      if (cfg.model == ModelKind::latent)
        throw std::invalid_argument("spectral_A has no ground truth under the latent model");
      Labels zhat = spectral_cluster_adjacency(inst.A, inst.K, seed);
      emit(method, "misclassification", misclassification(zhat, inst.z), ms_since(t0));
    } else if (method == "usvt") {
      if (cfg.model == ModelKind::latent) {
        Eigen::MatrixXd yhat = usvt_latent(inst.A, inst.sigma_used, cfg.d, cfg.usvt_c);
        emit(method, "aligned_rms", aligned_rms(yhat, inst.coords), ms_since(t0));
      } else {
        EdgeProbMatrix Pest = usvt_estimate(inst.A, cfg.usvt_c);
        Labels zhat = spectral_cluster(Pest.P, inst.K, seed);
        emit(method, "misclassification", misclassification(zhat, inst.z), ms_since(t0));
      }
    } else {
      throw std::invalid_argument("unknown method: " + method);
    }
  }
}

}  // namespace

std::vector<ResultRow> run_experiment_rows(const ExperimentConfig& cfg) {
  if (cfg.n_list.empty() || cfg.degree_list.empty())
    throw std::invalid_argument("n and degree lists must be nonempty");
  if (cfg.replications < 1) throw std::invalid_argument("replications must be >= 1");

  struct Task {
    int n;
    double degree;
    int rep;
  };
  std::vector<Task> tasks;
  for (int n : cfg.n_list)
    for (double degree : cfg.degree_list)
      for (int rep = 0; rep < cfg.replications; ++rep) tasks.push_back({n, degree, rep});

  std::vector<std::vector<ResultRow>> results(tasks.size());
  const int threads = std::max(1, cfg.threads);
  if (threads == 1) {
    for (std::size_t t = 0; t < tasks.size(); ++t)
      run_task(cfg, tasks[t].n, tasks[t].degree, tasks[t].rep, results[t]);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&] {
      for (;;) {
        std::size_t t = next.fetch_add(1);
        if (t >= tasks.size()) return;
        try {
          run_task(cfg, tasks[t].n, tasks[t].degree, tasks[t].rep, results[t]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  std::vector<ResultRow> rows;
  for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
  return rows;
}

void run_experiment(const ExperimentConfig& cfg, const std::string& out_csv) {
  std::vector<ResultRow> rows = run_experiment_rows(cfg);
  std::ofstream out(out_csv);
  if (!out) throw std::runtime_error("cannot write " + out_csv);
  out << "model,n,K,avg_degree,seed,method,metric_name,value,wall_ms\n";
  for (const auto& r : rows) {
    out << r.model << "," << r.n << "," << r.K << "," << format_double(r.avg_degree) << ","
        << r.seed << "," << r.method << "," << r.metric_name << "," << format_double(r.value)
        << "," << format_double(r.wall_ms) << "\n";
  }
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto eq = line.find('=');
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t");
      auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));

    if (key == "model") {
      if (value == "community") cfg.model = ModelKind::community;
      else if (value == "overlapping") cfg.model = ModelKind::overlapping;
      else if (value == "latent") cfg.model = ModelKind::latent;
      else throw std::invalid_argument("unknown model: " + value);
    } else if (key == "n") {
      cfg.n_list.clear();
      for (const auto& v : split_list(value)) cfg.n_list.push_back(std::stoi(v));
    } else if (key == "degree") {
      cfg.degree_list.clear();
      for (const auto& v : split_list(value)) cfg.degree_list.push_back(std::stod(v));
    } else if (key == "K") {
      cfg.K = std::stoi(value);
    } else if (key == "k") {
      cfg.k = std::stoi(value);
    } else if (key == "d") {
      cfg.d = std::stoi(value);
    } else if (key == "sigma") {
      cfg.sigma = std::stod(value);
    } else if (key == "gamma_ratio") {
      cfg.gamma_ratio = std::stod(value);
    } else if (key == "gamma0") {
      cfg.gamma0 = std::stod(value);
    } else if (key == "gamma1") {
      cfg.gamma1 = std::stod(value);
    } else if (key == "pi") {
      if (value == "balanced" || value == "unbalanced") {
        cfg.pi_mode = value;
      } else {
        cfg.pi_mode = "explicit";
        auto parts = split_list(value);
        cfg.pi_explicit.resize(parts.size());
        for (std::size_t i = 0; i < parts.size(); ++i) cfg.pi_explicit(i) = std::stod(parts[i]);
      }
    } else if (key == "replications") {
      cfg.replications = std::stoi(value);
    } else if (key == "seed") {
      cfg.seed = std::stoull(value);
    } else if (key == "methods") {
      cfg.methods = split_list(value);
    } else if (key == "solver_theta") {
      cfg.solver_theta = value;
    } else if (key == "latent_shape") {
      cfg.latent_shape = value;
    } else if (key == "usvt_c") {
      cfg.usvt_c = std::stod(value);
    } else if (key == "timing") {
      cfg.timing = value == "1" || value == "true";
    } else if (key == "threads") {
      cfg.threads = std::stoi(value);
    } else if (key == "solver.max_iter") {
      cfg.solver.max_iter = std::stoi(value);
    } else if (key == "solver.tol_primal") {
      cfg.solver.tol_primal = std::stod(value);
    } else if (key == "solver.tol_dual") {
      cfg.solver.tol_dual = std::stod(value);
    } else if (key == "solver.tol") {
      cfg.solver.tol_primal = cfg.solver.tol_dual = std::stod(value);
    } else if (key == "solver.penalty") {
      cfg.solver.penalty = std::stod(value);
    } else if (key == "solver.mode") {
      if (value == "dense") cfg.solver.mode = SolveMode::dense;
      else if (value == "structured") cfg.solver.mode = SolveMode::structured;
      else if (value == "auto") cfg.solver.mode = SolveMode::auto_detect;
      else throw std::invalid_argument("unknown solver mode: " + value);
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void report(const std::string& csv_path, const std::string& out_dir) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open " + csv_path);
  std::filesystem::create_directories(out_dir);

  std::string line;
  if (!std::getline(in, line) || line.rfind("model,", 0) != 0)
    throw std::runtime_error(csv_path + ": missing ResultRow header");

  // (model, degree, metric) -> method -> n -> aggregate
  std::map<std::tuple<std::string, double, std::string>,
           std::map<std::string, std::map<double, Aggregate>>>
      groups;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != 9) throw std::runtime_error(csv_path + ": malformed row: " + line);
    double n = std::stod(f[1]);
    double degree = std::stod(f[3]);
    groups[{f[0], degree, f[6]}][f[5]][n].add(std::stod(f[7]));
  }

  std::ofstream summary(out_dir + "/summary.csv");
  summary << "model,avg_degree,metric_name,method,n,replications,mean,se\n";
  for (const auto& [key, series] : groups) {
    const auto& [model, degree, metric] = key;
    for (const auto& [method, pts] : series)
      for (const auto& [n, agg] : pts)
        summary << model << "," << short_double(degree) << "," << metric << "," << method << ","
                << n << "," << agg.count << "," << short_double(agg.mean()) << ","
                << short_double(agg.se()) << "\n";

    std::ostringstream name, title;
    name << out_dir << "/" << model << "_deg" << degree << "_" << metric << ".svg";
    title << model << " model, degree " << degree << ": " << metric;
    write_svg_chart(name.str(), title.str(), series);
  }
}

}  // namespace blocksdp
