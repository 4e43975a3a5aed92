#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "blocksdp/harness.hpp"
#include "blocksdp/io.hpp"

using namespace blocksdp;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig tiny_community_config() {
  return parse_config_text(
      "model = community\n"
      "n = 24\n"
      "degree = 8\n"
      "K = 2\n"
      "replications = 2\n"
      "seed = 5\n"
      "methods = sdp_map, spectral_A\n"
      "solver.max_iter = 300\n"
      "solver.tol = 1e-4\n");
}

}  // namespace

TEST_CASE("config parsing") {
  ExperimentConfig cfg = parse_config_text(
      "model = overlapping\n"
      "n = 100, 200\n"
      "degree = 10, 20.5\n"
      "k = 3\n"
      "pi = 0.5, 0.3, 0.2\n"
      "replications = 7\n"
      "solver.mode = structured\n"
      "# a comment\n"
      "timing = 1\n");
  CHECK(cfg.model == ModelKind::overlapping);
  CHECK(cfg.n_list == std::vector<int>{100, 200});
  CHECK(cfg.degree_list == std::vector<double>{10.0, 20.5});
  CHECK(cfg.k == 3);
  CHECK(cfg.pi_mode == "explicit");
  CHECK(cfg.pi_explicit.size() == 3);
  CHECK(cfg.replications == 7);
  CHECK(cfg.solver.mode == SolveMode::structured);
  CHECK(cfg.timing);

  CHECK_THROWS(parse_config_text("unknown_key = 3\n"));
  CHECK_THROWS(parse_config_text("model = banana\n"));
  CHECK_THROWS(parse_config_text("just some words\n"));
}

TEST_CASE("resolve_pi") {
  ExperimentConfig cfg;
  cfg.pi_mode = "unbalanced";
  Eigen::VectorXd pi = resolve_pi(cfg, 4);
  CHECK(pi(0) == doctest::Approx(0.4));
  CHECK(pi(1) == doctest::Approx(0.3));
  CHECK(pi(2) == doctest::Approx(0.2));
  CHECK(pi(3) == doctest::Approx(0.1));

  cfg.pi_mode = "balanced";
  CHECK(resolve_pi(cfg, 5).minCoeff() == doctest::Approx(0.2));
}

TEST_CASE("generate_instance hits the target degree on average") {
  ExperimentConfig cfg;
  cfg.model = ModelKind::community;
  cfg.K = 2;
  const int n = 200;
  const double degree = 12.0;
  double total = 0.0;
  const int reps = 10;
  for (int rep = 0; rep < reps; ++rep) {
    GeneratedInstance inst = generate_instance(cfg, n, degree, task_seed(1, n, degree, rep));
    total += 2.0 * static_cast<double>(inst.A.edge_count()) / n;
  }
  CHECK(total / reps == doctest::Approx(degree).epsilon(0.15));
}

TEST_CASE("generated latent instances calibrate sigma to the degree") {
  ExperimentConfig cfg;
  cfg.model = ModelKind::latent;
  cfg.k = 2;
  cfg.d = 2;
  const int n = 80;
  GeneratedInstance inst = generate_instance(cfg, n, 10.0, 3);
  double density = inst.P.P.sum() / (static_cast<double>(n) * (n - 1));
  CHECK(density == doctest::Approx(10.0 / n).epsilon(0.01));
}

TEST_CASE("true_overlapping_communities") {
  Labels z{{0, 1, 2, 3}};
  auto C = true_overlapping_communities(z, 2);
  REQUIRE(C.size() == 4);
  CHECK(C[0] == std::vector<int>{0, 1});  // first digit 0
  CHECK(C[1] == std::vector<int>{2, 3});
  CHECK(C[2] == std::vector<int>{0, 2});  // second digit 0
  CHECK(C[3] == std::vector<int>{1, 3});
}

TEST_CASE("run_experiment row schema and determinism") {
  ExperimentConfig cfg = tiny_community_config();
  std::vector<ResultRow> rows = run_experiment_rows(cfg);
  // 2 replications x (sdp_map misclassification + spectral_A misclassification)
  CHECK(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK(r.model == "community");
    CHECK(r.n == 24);
    CHECK(r.wall_ms == 0.0);
  }

  const std::string out1 = "/tmp/blocksdp_test_a.csv";
  const std::string out2 = "/tmp/blocksdp_test_b.csv";
  run_experiment(cfg, out1);
  run_experiment(cfg, out2);
  CHECK(slurp(out1) == slurp(out2));
  std::remove(out1.c_str());
  std::remove(out2.c_str());
}

TEST_CASE("multithreaded rows match single-threaded rows") {
  ExperimentConfig cfg = tiny_community_config();
  cfg.replications = 3;
  std::vector<ResultRow> seq = run_experiment_rows(cfg);
  cfg.threads = 2;
  std::vector<ResultRow> par = run_experiment_rows(cfg);
  REQUIRE(seq.size() == par.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    CHECK(seq[i].method == par[i].method);
    CHECK(seq[i].value == par[i].value);
    CHECK(seq[i].seed == par[i].seed);
  }
}

TEST_CASE("report aggregates a fixture correctly") {
  const std::string csv = "/tmp/blocksdp_fixture.csv";
  {
    std::ofstream out(csv);
    out << "model,n,K,avg_degree,seed,method,metric_name,value,wall_ms\n";
    // three replications for one cell, mean 0.2, sd 0.1
    out << "community,100,2,10,1,sdp_map,misclassification,0.1,0\n";
    out << "community,100,2,10,2,sdp_map,misclassification,0.2,0\n";
    out << "community,100,2,10,3,sdp_map,misclassification,0.3,0\n";
    out << "community,200,2,10,1,sdp_map,misclassification,0.4,0\n";
    out << "community,100,2,10,1,spectral_A,misclassification,0.5,0\n";
  }
  const std::string dir = "/tmp/blocksdp_report_test";
  report(csv, dir);

  std::string summary = slurp(dir + "/summary.csv");
  // mean 0.2, se = sqrt(0.01/3) = 0.0577...
  CHECK(summary.find("community,10,misclassification,sdp_map,100,3,0.2") != std::string::npos);
  CHECK(summary.find("0.057735026919") != std::string::npos);
  CHECK(summary.find("community,10,misclassification,sdp_map,200,1,0.4,0") != std::string::npos);
  CHECK(summary.find("spectral_A") != std::string::npos);

  std::string svg = slurp(dir + "/community_deg10_misclassification.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("sdp_map") != std::string::npos);
  CHECK(svg.find("spectral_A") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);

  std::remove(csv.c_str());
  std::filesystem::remove_all(dir);
}

TEST_CASE("report handles a single-row csv") {
  const std::string csv = "/tmp/blocksdp_single.csv";
  {
    std::ofstream out(csv);
    out << "model,n,K,avg_degree,seed,method,metric_name,value,wall_ms\n";
    out << "latent,100,16,20,1,usvt,aligned_rms,0.25,0\n";
  }
  const std::string dir = "/tmp/blocksdp_report_single";
  report(csv, dir);
  CHECK(slurp(dir + "/summary.csv").find("latent,20,aligned_rms,usvt,100,1,0.25,0") !=
        std::string::npos);
  std::remove(csv.c_str());
  std::filesystem::remove_all(dir);
}

TEST_CASE("report rejects malformed csv") {
  const std::string csv = "/tmp/blocksdp_bad.csv";
  {
    std::ofstream out(csv);
    out << "not,a,result,header\n";
  }
  CHECK_THROWS(report(csv, "/tmp/blocksdp_report_bad"));
  std::remove(csv.c_str());
}
