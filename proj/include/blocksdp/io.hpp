#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "blocksdp/model.hpp"

namespace blocksdp {

// Edge list text format: header "n=<int>", then one "i j" per line with
// 0-based i < j.
void write_edge_list(const std::string& path, const Adjacency& A);
Adjacency read_edge_list(const std::string& path);

// Labels file: one class per line, 1-based.
void write_labels(const std::string& path, const Labels& z);
Labels read_labels(const std::string& path);

// Matrix CSV: one row per line, comma separated, full precision.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& M);
Eigen::MatrixXd read_matrix_csv(const std::string& path);

// Node sets: one set per line, space-separated 0-based node ids.
void write_node_sets(const std::string& path, const std::vector<std::vector<int>>& sets);
std::vector<std::vector<int>> read_node_sets(const std::string& path);

std::string format_double(double v);

}  // namespace blocksdp
