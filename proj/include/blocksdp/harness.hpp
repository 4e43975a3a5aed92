#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "blocksdp/estimators.hpp"
#include "blocksdp/model.hpp"
#include "blocksdp/solver.hpp"

namespace blocksdp {

enum class ModelKind { community, overlapping, latent };

struct ExperimentConfig {
  ModelKind model = ModelKind::community;
  std::vector<int> n_list;
  std::vector<double> degree_list;  // target expected average degrees (n*rho)
  int K = 2;                        // community class count
  int k = 2;                        // overlapping / latent grid parameter
  int d = 2;                        // latent dimension
  double sigma = 0.0;               // latent bandwidth; <= 0 calibrates to degree
  double gamma_ratio = 10.0;        // gamma0 / gamma1 when deriving from degree
  double gamma0 = 0.0;              // explicit values override degree targeting
  double gamma1 = 0.0;
  std::string pi_mode = "balanced";  // balanced | unbalanced | explicit list
  Eigen::VectorXd pi_explicit;
  int replications = 1;
  std::uint64_t seed = 1;
  std::vector<std::string> methods;  // default depends on model
  std::string solver_theta = "matched";  // matched | community
  std::string latent_shape = "circle";   // circle | cross | uniform
  SolverConfig solver;
  double usvt_c = 2.01;
  bool timing = false;  // real wall_ms breaks byte-determinism; off by default
  int threads = 1;
};

struct ResultRow {
  std::string model;
  int n = 0;
  int K = 0;
  double avg_degree = 0.0;
  std::uint64_t seed = 0;
  std::string method;
  std::string metric_name;
  double value = 0.0;
  double wall_ms = 0.0;
};

// One sampled instance plus everything the estimators need about it.
struct GeneratedInstance {
  int n = 0;
  int K = 0;
  Adjacency A;
  EdgeProbMatrix P;
  Labels z;                // community / overlapping truth
  Eigen::MatrixXd theta;   // generative theta (blockmodels)
  double gamma0 = 0.0;
  double gamma1 = 0.0;
  Eigen::VectorXd pi;
  Eigen::MatrixXd coords;  // latent truth
  double sigma_used = 0.0;
};

Eigen::VectorXd resolve_pi(const ExperimentConfig& cfg, int K);

GeneratedInstance generate_instance(const ExperimentConfig& cfg, int n, double degree,
                                    std::uint64_t task_seed);

// theta fed to the solver: alpha_hat * Bhat normalized to unit expected
// density under pi, with Bhat per cfg.solver_theta.
ThetaHat solver_theta_hat(const ExperimentConfig& cfg, const GeneratedInstance& inst);

// True overlapping communities (2k sets) from the digit pairs of z.
std::vector<std::vector<int>> true_overlapping_communities(const Labels& z, int k);

std::uint64_t task_seed(std::uint64_t seed, int n, double degree, int rep);

std::vector<ResultRow> run_experiment_rows(const ExperimentConfig& cfg);

// Rows written as CSV; byte-identical across runs of the same config.
void run_experiment(const ExperimentConfig& cfg, const std::string& out_csv);

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::string& path);

// Per (model, degree, metric): SVG chart of mean vs n per method with
// +/- 1 SE bars, plus a summary.csv of the aggregates.
void report(const std::string& csv_path, const std::string& out_dir);

}  // namespace blocksdp
