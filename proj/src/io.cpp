#include "blocksdp/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace blocksdp {

namespace {

std::ifstream open_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::ofstream open_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_edge_list(const std::string& path, const Adjacency& A) {
  auto out = open_write(path);
  out << "n=" << A.n << "\n";
  for (auto [i, j] : A.edges) out << i << " " << j << "\n";
}

Adjacency read_edge_list(const std::string& path) {
  auto in = open_read(path);
  std::string header;
  if (!std::getline(in, header) || header.rfind("n=", 0) != 0)
    throw std::runtime_error(path + ": expected 'n=<int>' header");
  Adjacency A;
  A.n = std::stoi(header.substr(2));
  int i, j;
  while (in >> i >> j) {
    if (i < 0 || j >= A.n || i >= j)
      throw std::runtime_error(path + ": invalid edge, need 0 <= i < j < n");
    A.edges.emplace_back(i, j);
  }
  std::sort(A.edges.begin(), A.edges.end());
  return A;
}

void write_labels(const std::string& path, const Labels& z) {
  auto out = open_write(path);
  for (int zi : z.z) out << (zi + 1) << "\n";
}

Labels read_labels(const std::string& path) {
  auto in = open_read(path);
  Labels z;
  int v;
  while (in >> v) {
    if (v < 1) throw std::runtime_error(path + ": labels are 1-based");
    z.z.push_back(v - 1);
  }
  return z;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& M) {
  auto out = open_write(path);
  for (int i = 0; i < M.rows(); ++i) {
    for (int j = 0; j < M.cols(); ++j) {
      if (j > 0) out << ",";
      out << format_double(M(i, j));
    }
    out << "\n";
  }
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  auto in = open_read(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) row.push_back(std::stod(field));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error(path + ": ragged CSV rows");
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd M(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) M(i, j) = rows[i][j];
  return M;
}

void write_node_sets(const std::string& path, const std::vector<std::vector<int>>& sets) {
  auto out = open_write(path);
  for (const auto& set : sets) {
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (i > 0) out << " ";
      out << set[i];
    }
    out << "\n";
  }
}

std::vector<std::vector<int>> read_node_sets(const std::string& path) {
  auto in = open_read(path);
  std::vector<std::vector<int>> sets;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<int> set;
    std::stringstream ss(line);
    int v;
    while (ss >> v) set.push_back(v);
    sets.push_back(std::move(set));
  }
  return sets;
}

}  // namespace blocksdp
