#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace overtaking::detail {

using Adjacency = std::vector<std::vector<std::size_t>>;

/// Edge i -> j whenever m(i, j) > 0.
Adjacency support_graph(const Eigen::MatrixXd& m);

/// Strongly connected components, in reverse topological order (sinks first).
std::vector<std::vector<std::size_t>> strongly_connected_components(const Adjacency& g);

/// Vertices reachable from `roots` (roots included).
std::vector<bool> reachable_from(const Adjacency& g, const std::vector<std::size_t>& roots);

/// Vertices that can reach some vertex in `targets` (targets included).
std::vector<bool> can_reach(const Adjacency& g, const std::vector<std::size_t>& targets);

} // namespace overtaking::detail
