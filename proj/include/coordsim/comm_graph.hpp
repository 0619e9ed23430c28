/*
 Copyright 2026 The coordsim Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef COORDSIM_COMM_GRAPH_HPP
#define COORDSIM_COMM_GRAPH_HPP

#include "coordsim/interaction_potential.hpp"
#include "coordsim/robot_dynamics.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace coordsim {

/// Undirected edge stored with i < j. As an oriented edge, i is the tail and j the head.
struct Edge {
    std::size_t i = 0;
    std::size_t j = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/**
 * @brief The communication graph frozen at t = 0.
 *
 * Immutable after construction. Construction rejects self-loops, duplicate
 * edges, out-of-range indices and disconnected edge sets.
 */
class CommGraph {
public:
    CommGraph(std::size_t n_agents, std::vector<Edge> edges, double r, double eps);

    std::size_t n_agents() const { return n_agents_; }
    const std::vector<Edge>& edges() const { return edges_; }
    double r() const { return r_; }
    double eps() const { return eps_; }

    const std::vector<std::size_t>& neighbors(std::size_t i) const { return neighbors_.at(i); }
    std::size_t degree(std::size_t i) const { return neighbors_.at(i).size(); }

private:
    std::size_t n_agents_;
    std::vector<Edge> edges_;
    double r_;
    double eps_;
    std::vector<std::vector<std::size_t>> neighbors_;
};

/// Edge (i, j) iff ||x_i - x_j|| <= r - eps. Throws DisconnectedInitialGraph.
CommGraph build_initial_graph(std::span<const Vec2> positions, double r, double eps);

bool is_connected(std::size_t n_agents, std::span<const Edge> edges);
/// Reachability over nonzero off-diagonal entries of a symmetric adjacency matrix.
bool is_connected(const Eigen::MatrixXd& adjacency);

/// N x M incidence matrix: column k has -1 at the tail (lower index) and +1 at the head.
Eigen::MatrixXd incidence_matrix(std::size_t n_agents, std::span<const Edge> edges);
Eigen::MatrixXd incidence_matrix(const CommGraph& graph);

/// Laplacian with off-diagonal -w_k on each edge and diagonal row sums.
Eigen::MatrixXd weighted_laplacian(std::size_t n_agents, std::span<const Edge> edges,
                                   std::span<const double> weights);
/// Laplacian weighted by psi_prime(d_ij^2). Throws OutOfDomain on a broken edge.
Eigen::MatrixXd weighted_laplacian(std::span<const Vec2> positions, const CommGraph& graph,
                                   const PotentialSpec& spec);

}  // namespace coordsim

#endif  // COORDSIM_COMM_GRAPH_HPP
