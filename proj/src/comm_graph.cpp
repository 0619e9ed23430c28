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

#include "coordsim/comm_graph.hpp"

#include "coordsim/errors.hpp"

#include <algorithm>
#include <queue>
#include <string>

namespace coordsim {

CommGraph::CommGraph(std::size_t n_agents, std::vector<Edge> edges, double r, double eps)
    : n_agents_(n_agents), edges_(std::move(edges)), r_(r), eps_(eps), neighbors_(n_agents) {
    if (n_agents_ == 0) throw InvalidArgument("graph needs at least one agent");
    if (!(r_ > eps_ && eps_ > 0.0)) throw InvalidArgument("graph requires r > eps > 0");
    for (Edge& e : edges_) {
        if (e.i == e.j) throw InvalidArgument("self-loop on agent " + std::to_string(e.i));
        if (e.i > e.j) std::swap(e.i, e.j);
        if (e.j >= n_agents_) throw InvalidArgument("edge index out of range");
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
        throw InvalidArgument("duplicate edge in edge list");
    }
    if (!is_connected(n_agents_, edges_)) {
        throw DisconnectedInitialGraph("initial communication graph is disconnected");
    }
    for (const Edge& e : edges_) {
        neighbors_[e.i].push_back(e.j);
        neighbors_[e.j].push_back(e.i);
    }
    for (auto& n : neighbors_) std::sort(n.begin(), n.end());
}

CommGraph build_initial_graph(std::span<const Vec2> positions, double r, double eps) {
    if (!(r > eps && eps > 0.0)) throw InvalidArgument("graph requires r > eps > 0");
    std::vector<Edge> edges;
    const double reach = r - eps;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        for (std::size_t j = i + 1; j < positions.size(); ++j) {
            if ((positions[i] - positions[j]).norm() <= reach) edges.push_back({i, j});
        }
    }
    return CommGraph(positions.size(), std::move(edges), r, eps);
}

bool is_connected(std::size_t n_agents, std::span<const Edge> edges) {
    if (n_agents <= 1) return true;
    std::vector<std::vector<std::size_t>> adj(n_agents);
    for (const Edge& e : edges) {
        adj.at(e.i).push_back(e.j);
        adj.at(e.j).push_back(e.i);
    }
    std::vector<bool> seen(n_agents, false);
    std::queue<std::size_t> frontier;
    frontier.push(0);
    seen[0] = true;
    std::size_t reached = 1;
    while (!frontier.empty()) {
        const std::size_t u = frontier.front();
        frontier.pop();
        for (std::size_t v : adj[u]) {
            if (!seen[v]) {
                seen[v] = true;
                ++reached;
                frontier.push(v);
            }
        }
    }
    return reached == n_agents;
}

bool is_connected(const Eigen::MatrixXd& adjacency) {
    std::vector<Edge> edges;
    for (Eigen::Index i = 0; i < adjacency.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < adjacency.cols(); ++j) {
            if (adjacency(i, j) != 0.0 || adjacency(j, i) != 0.0) {
                edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
            }
        }
    }
    return is_connected(static_cast<std::size_t>(adjacency.rows()), edges);
}

Eigen::MatrixXd incidence_matrix(std::size_t n_agents, std::span<const Edge> edges) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_agents),
                                              static_cast<Eigen::Index>(edges.size()));
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const auto tail = static_cast<Eigen::Index>(std::min(edges[k].i, edges[k].j));
        const auto head = static_cast<Eigen::Index>(std::max(edges[k].i, edges[k].j));
        D(tail, static_cast<Eigen::Index>(k)) = -1.0;
        D(head, static_cast<Eigen::Index>(k)) = 1.0;
    }
    return D;
}

Eigen::MatrixXd incidence_matrix(const CommGraph& graph) {
    return incidence_matrix(graph.n_agents(), graph.edges());
}

Eigen::MatrixXd weighted_laplacian(std::size_t n_agents, std::span<const Edge> edges,
                                   std::span<const double> weights) {
    if (weights.size() != edges.size()) throw InvalidArgument("one weight per edge required");
    const auto n = static_cast<Eigen::Index>(n_agents);
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(edges[k].i);
        const auto j = static_cast<Eigen::Index>(edges[k].j);
        L(i, j) -= weights[k];
        L(j, i) -= weights[k];
        L(i, i) += weights[k];
        L(j, j) += weights[k];
    }
    return L;
}

Eigen::MatrixXd weighted_laplacian(std::span<const Vec2> positions, const CommGraph& graph,
                                   const PotentialSpec& spec) {
    if (positions.size() != graph.n_agents()) {
        throw InvalidArgument("position count does not match graph size");
    }
    std::vector<double> w;
    w.reserve(graph.edges().size());
    for (const Edge& e : graph.edges()) {
        w.push_back(psi_prime((positions[e.i] - positions[e.j]).squaredNorm(), spec));
    }
    return weighted_laplacian(graph.n_agents(), graph.edges(), w);
}

}  // namespace coordsim
