// Command-line front end: generate instances, solve the SDP, run the
// estimators, batch simulations, and report charts.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "blocksdp/baselines.hpp"
#include "blocksdp/harness.hpp"
#include "blocksdp/io.hpp"
#include "blocksdp/metrics.hpp"

namespace fs = std::filesystem;
using namespace blocksdp;

namespace {

// Scheme spec strings: "community:K", "overlapping:k", "toric:k,d".
SchemeBasis parse_scheme_spec(const std::string& spec) {
  auto colon = spec.find(':');
  std::string kind = spec.substr(0, colon);
  std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "community") return community_scheme(std::stoi(args));
  if (kind == "overlapping") return overlapping_scheme(std::stoi(args));
  if (kind == "toric") {
    auto comma = args.find(',');
    if (comma == std::string::npos) throw CLI::ValidationError("toric spec needs k,d");
    return toric_scheme(std::stoi(args.substr(0, comma)), std::stoi(args.substr(comma + 1)));
  }
  throw CLI::ValidationError("unknown scheme spec: " + spec);
}

void write_trace(const std::string& path, const std::vector<IterationStats>& history) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "iter,objective,primal_residual,dual_residual,wall_ms\n";
  for (std::size_t t = 0; t < history.size(); ++t)
    out << (t + 1) << "," << format_double(history[t].objective) << ","
        << format_double(history[t].primal) << "," << format_double(history[t].dual) << ","
        << format_double(history[t].wall_ms) << "\n";
}

void dump_scheme(const SchemeBasis& basis, const std::string& dir) {
  fs::create_directories(dir);
  for (int c = 0; c < basis.num_mats(); ++c)
    write_matrix_csv(dir + "/b" + std::to_string(c) + ".csv", basis.mats[c]);
  write_matrix_csv(dir + "/eigvecs.csv", basis.eigvecs);
  write_matrix_csv(dir + "/eigtable.csv", basis.eigtable);
}

struct SolveFlags {
  std::string mode = "auto";
  double tol = 1e-5;
  int max_iter = 2000;
  double penalty = 1.0;

  SolverConfig to_config() const {
    SolverConfig cfg;
    cfg.tol_primal = cfg.tol_dual = tol;
    cfg.max_iter = max_iter;
    cfg.penalty = penalty;
    if (mode == "dense") cfg.mode = SolveMode::dense;
    else if (mode == "structured") cfg.mode = SolveMode::structured;
    else cfg.mode = SolveMode::auto_detect;
    return cfg;
  }
};

int run(int argc, char** argv) {
  CLI::App app{"Semidefinite-programming estimation for stochastic blockmodels"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Sample a model instance to disk");
  std::string gen_model = "community", gen_pi = "balanced", gen_shape = "circle";
  int gen_n = 100, gen_K = 2, gen_k = 2, gen_d = 2;
  double gen_degree = 10.0, gen_ratio = 10.0, gen_sigma = 0.0;
  std::uint64_t gen_seed = 1;
  std::string gen_out = ".";
  gen->add_option("--model", gen_model, "community|overlapping|latent");
  gen->add_option("--n", gen_n, "node count");
  gen->add_option("--degree", gen_degree, "target expected average degree");
  gen->add_option("--K", gen_K, "classes (community)");
  gen->add_option("--k", gen_k, "grid parameter (overlapping/latent)");
  gen->add_option("--d", gen_d, "latent dimension");
  gen->add_option("--sigma", gen_sigma, "latent bandwidth (0 = calibrate)");
  gen->add_option("--gamma-ratio", gen_ratio, "gamma0/gamma1 ratio");
  gen->add_option("--pi", gen_pi, "balanced|unbalanced|p1,p2,...");
  gen->add_option("--shape", gen_shape, "latent coordinate shape");
  gen->add_option("--seed", gen_seed, "rng seed");
  gen->add_option("--out", gen_out, "output directory");

  // solve
  auto* slv = app.add_subcommand("solve", "Solve the SDP for an edge list and theta");
  std::string slv_edges, slv_theta, slv_scheme, slv_out = ".";
  SolveFlags slv_flags;
  slv->add_option("--edges", slv_edges, "edge list file")->required();
  slv->add_option("--theta", slv_theta, "theta CSV (K x K)")->required();
  slv->add_option("--scheme", slv_scheme, "community:K | overlapping:k | toric:k,d");
  slv->add_option("--mode", slv_flags.mode, "dense|structured|auto");
  slv->add_option("--tol", slv_flags.tol, "primal/dual tolerance");
  slv->add_option("--max-iter", slv_flags.max_iter, "iteration cap");
  slv->add_option("--penalty", slv_flags.penalty, "ADMM stepsize multiplier");
  slv->add_option("--out", slv_out, "output directory");

  // estimate
  auto* est = app.add_subcommand("estimate", "Recover estimates from a solved X");
  std::string est_x, est_edges, est_theta, est_scheme, est_out = ".";
  double est_g0 = 0.0, est_g1 = 0.0;
  std::string est_latent;
  std::uint64_t est_seed = 1;
  est->add_option("--xhat", est_x, "solution CSV (nK x nK)")->required();
  est->add_option("--edges", est_edges, "edge list file")->required();
  est->add_option("--theta", est_theta, "theta CSV")->required();
  est->add_option("--gamma0", est_g0, "threshold upper value (overlapping)");
  est->add_option("--gamma1", est_g1, "threshold lower value (overlapping)");
  est->add_option("--latent-grid", est_latent, "k,d[,sigma]: emit distance/coordinate estimates");
  est->add_option("--seed", est_seed, "seed for randomized estimates");
  est->add_option("--out", est_out, "output directory");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run an experiment grid from a config file");
  std::string sim_config, sim_out = "results.csv";
  int sim_threads = 0;
  sim->add_option("--config", sim_config, "experiment config file")->required();
  sim->add_option("--out", sim_out, "output CSV path");
  sim->add_option("--threads", sim_threads, "worker threads (overrides config)");

  // report
  auto* rep = app.add_subcommand("report", "Summaries and SVG charts from a results CSV");
  std::string rep_csv, rep_out = "report";
  rep->add_option("--csv", rep_csv, "results CSV")->required();
  rep->add_option("--out", rep_out, "output directory");

  // verify-scheme
  auto* ver = app.add_subcommand("verify-scheme", "Check association scheme axioms");
  std::string ver_scheme, ver_files, ver_dump;
  ver->add_option("--scheme", ver_scheme, "community:K | overlapping:k | toric:k,d");
  ver->add_option("--files", ver_files, "comma-separated CSV files b0,b1,...");
  ver->add_option("--dump", ver_dump, "write the basis as a CSV bundle to this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (gen->parsed()) {
    ExperimentConfig cfg;
    cfg.model = gen_model == "overlapping" ? ModelKind::overlapping
                : gen_model == "latent"    ? ModelKind::latent
                                           : ModelKind::community;
    if (gen_model != "community" && gen_model != "overlapping" && gen_model != "latent")
      throw CLI::ValidationError("unknown model: " + gen_model);
    cfg.K = gen_K;
    cfg.k = gen_k;
    cfg.d = gen_d;
    cfg.sigma = gen_sigma;
    cfg.gamma_ratio = gen_ratio;
    cfg.latent_shape = gen_shape;
    if (gen_pi == "balanced" || gen_pi == "unbalanced") {
      cfg.pi_mode = gen_pi;
    } else {
      cfg.pi_mode = "explicit";
      std::stringstream ss(gen_pi);
      std::string item;
      std::vector<double> vals;
      while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
      cfg.pi_explicit = Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
    }
    GeneratedInstance inst = generate_instance(cfg, gen_n, gen_degree, gen_seed);
    fs::create_directories(gen_out);
    write_edge_list(gen_out + "/edges.txt", inst.A);
    write_matrix_csv(gen_out + "/P.csv", inst.P.P);
    if (cfg.model == ModelKind::latent) {
      write_matrix_csv(gen_out + "/coords.csv", inst.coords);
      std::ofstream meta(gen_out + "/meta.txt");
      meta << "sigma=" << format_double(inst.sigma_used) << "\n";
    } else {
      write_labels(gen_out + "/z.txt", inst.z);
      write_matrix_csv(gen_out + "/theta.csv", inst.theta);
      std::ofstream meta(gen_out + "/meta.txt");
      meta << "gamma0=" << format_double(inst.gamma0) << "\n"
           << "gamma1=" << format_double(inst.gamma1) << "\n";
    }
    return 0;
  }

  if (slv->parsed()) {
    Adjacency A = read_edge_list(slv_edges);
    Eigen::MatrixXd theta = read_matrix_csv(slv_theta);
    ThetaHat th;
    const SchemeBasis* basis = nullptr;
    SchemeBasis parsed_basis;
    if (!slv_scheme.empty()) {
      parsed_basis = parse_scheme_spec(slv_scheme);
      th = ThetaHat::from_scheme(parsed_basis, decompose(theta.cwiseMax(1e-12).cwiseMin(1.0 - 1e-12),
                                                         parsed_basis, 1e-9));
      basis = &th.scheme->basis;
    } else {
      th = ThetaHat::from_matrix(theta);
    }
    BlockMatrix F = build_objective(A, th);
    SdpSolution sol = solve(F, slv_flags.to_config(), basis);
    fs::create_directories(slv_out);
    write_matrix_csv(slv_out + "/xhat.csv", sol.X.data);
    write_trace(slv_out + "/trace.csv", sol.history);
    std::cout << "mode=" << (sol.mode_used == SolveMode::structured ? "structured" : "dense")
              << " iterations=" << sol.iterations << " converged=" << (sol.converged ? 1 : 0)
              << " objective=" << format_double(sol.objective) << "\n";
    return 0;
  }

  if (est->parsed()) {
    Adjacency A = read_edge_list(est_edges);
    Eigen::MatrixXd theta = read_matrix_csv(est_theta);
    ThetaHat th = ThetaHat::from_matrix(theta);
    Eigen::MatrixXd X = read_matrix_csv(est_x);
    const int K = th.K();
    if (X.rows() % K != 0 || X.rows() != X.cols())
      throw std::runtime_error("xhat dimension is not a multiple of K");
    SdpSolution sol;
    sol.X.n = static_cast<int>(X.rows()) / K;
    sol.X.K = K;
    sol.X.data = X;

    fs::create_directories(est_out);
    EdgeProbMatrix Phat = map_estimate_P(sol, th);
    EdgeProbMatrix Ptilde = randomized_estimate_P(sol, th, est_seed);
    Labels zhat = spectral_cluster(Phat.P, K, est_seed);
    Eigen::MatrixXd theta_est = estimate_theta(A, zhat, K);
    write_matrix_csv(est_out + "/phat.csv", Phat.P);
    write_matrix_csv(est_out + "/ptilde.csv", Ptilde.P);
    write_labels(est_out + "/zhat.txt", zhat);
    write_matrix_csv(est_out + "/theta_est.csv", theta_est);
    if (est_g0 > est_g1 && est_g0 > 0.0) {
      Eigen::MatrixXd G = threshold_graph(theta_est, est_g0, est_g1);
      auto Chat = overlapping_communities(zhat, maximal_cliques(G));
      write_node_sets(est_out + "/communities.txt", Chat);
    }
    if (!est_latent.empty()) {
      std::stringstream ss(est_latent);
      std::string item;
      std::vector<double> vals;
      while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
      if (vals.size() < 2) throw CLI::ValidationError("--latent-grid needs k,d");
      ToricGrid grid = toric_grid(static_cast<int>(vals[0]), static_cast<int>(vals[1]));
      Eigen::MatrixXd Dhat = map_estimate_D(sol, grid);
      write_matrix_csv(est_out + "/dhat.csv", Dhat);
      write_matrix_csv(est_out + "/coords.csv",
                       embed_coordinates(Dhat, static_cast<int>(vals[1])));
    }
    return 0;
  }

  if (sim->parsed()) {
    ExperimentConfig cfg = parse_config(sim_config);
    if (sim_threads > 0) cfg.threads = sim_threads;
    run_experiment(cfg, sim_out);
    return 0;
  }

  if (rep->parsed()) {
    report(rep_csv, rep_out);
    return 0;
  }

  if (ver->parsed()) {
    std::vector<Eigen::MatrixXd> mats;
    if (!ver_scheme.empty()) {
      SchemeBasis b = parse_scheme_spec(ver_scheme);
      mats = b.mats;
    } else if (!ver_files.empty()) {
      std::stringstream ss(ver_files);
      std::string f;
      while (std::getline(ss, f, ',')) mats.push_back(read_matrix_csv(f));
    } else {
      throw CLI::ValidationError("verify-scheme needs --scheme or --files");
    }
    SchemeReport rep_out_s = verify_scheme(mats);
    if (!rep_out_s.pass) {
      std::cout << "FAIL axiom " << rep_out_s.violated_axiom << ": " << rep_out_s.detail << "\n";
      return 2;
    }
    SchemeBasis basis = make_scheme_basis(mats);
    double worst = 0.0;
    for (int i = 0; i < basis.num_mats(); ++i) {
      Eigen::MatrixXd rec = Eigen::MatrixXd::Zero(basis.K(), basis.K());
      for (int j = 0; j < basis.num_cells(); ++j)
        rec += basis.eigtable(i, j) * basis.idempotents[j];
      worst = std::max(worst, (rec - basis.mats[i]).cwiseAbs().maxCoeff());
    }
    std::cout << "PASS: " << basis.num_mats() << " matrices, " << basis.num_cells()
              << " eigenspace cells, reconstruction residual " << format_double(worst) << "\n";
    if (!ver_dump.empty()) dump_scheme(basis, ver_dump);
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
