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
#include "coordsim/robot_dynamics.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

using namespace coordsim;

namespace {

// Pair list of a graph as (i, j) tuples for readable comparisons.
std::vector<std::pair<std::size_t, std::size_t>> pairs(const CommGraph& g) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const Edge& e : g.edges()) out.emplace_back(e.i, e.j);
    return out;
}

}  // namespace

TEST_CASE("initial graph from two agents") {
    const std::vector<Vec2> near{{0.0, 0.0}, {0.8, 0.0}};
    const CommGraph g = build_initial_graph(near, 1.0, 0.2);
    CHECK(g.edges().size() == 1);
    CHECK(g.edges()[0] == Edge{0, 1});
    CHECK(g.degree(0) == 1);

    const std::vector<Vec2> far{{0.0, 0.0}, {0.9, 0.0}};
    CHECK_THROWS_AS(build_initial_graph(far, 1.0, 0.2), DisconnectedInitialGraph);
    CHECK_THROWS_AS(build_initial_graph(near, 1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(build_initial_graph(near, 0.2, 0.2), InvalidArgument);
}

TEST_CASE("chain of five agents gives a path graph") {
    std::vector<Vec2> x;
    for (int k = 0; k < 5; ++k) x.emplace_back(0.7 * k, 0.0);
    const CommGraph g = build_initial_graph(x, 1.0, 0.25);
    CHECK(pairs(g) == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}, {2, 3}, {3, 4}});
}

TEST_CASE("initial graph of the five-robot configuration") {
    const double pi = std::numbers::pi;
    const std::vector<Vec2> q{{pi / 12, -5 * pi / 12}, {pi / 6, -pi / 3}, {pi / 4, -pi / 4},
                              {pi / 3, -pi / 4},      {5 * pi / 12, -5 * pi / 12}};
    const RobotModel m;
    std::vector<Vec2> x;
    for (const Vec2& qi : q) x.push_back(forward_kinematics(qi, m));
    const CommGraph g = build_initial_graph(x, 1.0, 0.25);
    // Brute-force pairwise enumeration.
    std::vector<std::pair<std::size_t, std::size_t>> expected;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            if ((x[i] - x[j]).norm() <= 0.75) expected.emplace_back(i, j);
        }
    }
    CHECK(pairs(g) == expected);
    CHECK(g.edges().size() == 5);
    CHECK(g.degree(2) == 3);
}

TEST_CASE("graph construction validates its edge list") {
    CHECK_THROWS_AS(CommGraph(2, {{0, 0}}, 1.0, 0.2), InvalidArgument);
    CHECK_THROWS_AS(CommGraph(2, {{0, 1}, {1, 0}}, 1.0, 0.2), InvalidArgument);
    CHECK_THROWS_AS(CommGraph(2, {{0, 2}}, 1.0, 0.2), InvalidArgument);
    CHECK_THROWS_AS(CommGraph(4, {{0, 1}, {2, 3}}, 1.0, 0.2), DisconnectedInitialGraph);
    const CommGraph g(3, {{2, 1}, {1, 0}}, 1.0, 0.2);
    CHECK(g.edges()[0] == Edge{0, 1});
    CHECK(g.edges()[1] == Edge{1, 2});
    CHECK(g.neighbors(1) == std::vector<std::size_t>{0, 2});
}

TEST_CASE("connectivity") {
    const std::vector<Edge> path{{0, 1}, {1, 2}, {2, 3}, {3, 4}};
    CHECK(is_connected(5, path));
    const std::vector<Edge> split{{0, 1}, {2, 3}};
    CHECK_FALSE(is_connected(4, split));
    CHECK(is_connected(1, std::vector<Edge>{}));
    Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(4, 4);
    adj(0, 1) = adj(1, 0) = 0.3;
    adj(2, 3) = adj(3, 2) = 1.0;
    CHECK_FALSE(is_connected(adj));
    adj(1, 2) = adj(2, 1) = 2.0;
    CHECK(is_connected(adj));
}

TEST_CASE("incidence matrix orientation") {
    const std::vector<Edge> one{{0, 1}};
    const Eigen::MatrixXd D = incidence_matrix(2, one);
    CHECK(D(0, 0) == -1.0);
    CHECK(D(1, 0) == 1.0);
    const std::vector<Edge> path{{0, 1}, {1, 2}, {2, 3}};
    const Eigen::MatrixXd Dp = incidence_matrix(4, path);
    CHECK((Eigen::RowVectorXd::Ones(4) * Dp).norm() == 0.0);
}

TEST_CASE("weighted Laplacian equals D W D^T") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> w(0.01, 10.0);
    std::uniform_int_distribution<int> sz(2, 9);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = static_cast<std::size_t>(sz(rng));
        // Random spanning tree plus random extra edges.
        std::vector<Edge> edges;
        for (std::size_t k = 1; k < n; ++k) {
            edges.push_back({std::uniform_int_distribution<std::size_t>(0, k - 1)(rng), k});
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const bool present = std::find(edges.begin(), edges.end(), Edge{i, j}) != edges.end();
                if (!present && std::bernoulli_distribution(0.3)(rng)) edges.push_back({i, j});
            }
        }
        std::vector<double> weights;
        for (std::size_t k = 0; k < edges.size(); ++k) weights.push_back(w(rng));
        const Eigen::MatrixXd D = incidence_matrix(n, edges);
        const Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(weights.data(), weights.size());
        const Eigen::MatrixXd L = weighted_laplacian(n, edges, weights);
        CHECK((L - D * wv.asDiagonal() * D.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((L - L.transpose()).norm() == 0.0);
        CHECK(L.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
        CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(L).eigenvalues().minCoeff() >= -1e-12);
    }
}

TEST_CASE("potential-weighted Laplacian") {
    const PotentialSpec spec{1.0, 0.5};
    std::vector<Vec2> x{{0, 0}, {0.5, 0}, {0.5, 0.6}};
    const CommGraph g = build_initial_graph(x, 1.0, 0.2);
    const Eigen::MatrixXd L = weighted_laplacian(x, g, spec);
    CHECK(L.rowwise().sum().cwiseAbs().maxCoeff() < 1e-15);
    CHECK(L(0, 1) == doctest::Approx(-psi_prime(0.25, spec)));
    CHECK(L(1, 2) == doctest::Approx(-psi_prime(0.36, spec)));

    // Coincident agents give psi'(0) times the combinatorial Laplacian.
    const std::vector<Vec2> same(3, Vec2(0.2, 0.2));
    const Eigen::MatrixXd Ls = weighted_laplacian(same, g, spec);
    std::vector<double> ones(g.edges().size(), 1.0);
    const Eigen::MatrixXd L0 = weighted_laplacian(3, g.edges(), ones);
    CHECK((Ls - psi_prime(0.0, spec) * L0).cwiseAbs().maxCoeff() < 1e-15);

    x[2] = Vec2(0.5, 1.2);
    CHECK_THROWS_AS(weighted_laplacian(x, g, spec), OutOfDomain);
}
