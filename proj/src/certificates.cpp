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

#include "coordsim/certificates.hpp"

#include "coordsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace coordsim {

namespace {

using nlohmann::json;

void finish(Certificate& cert) {
    cert.margin.resize(cert.lhs.size());
    cert.verdict = true;
    for (std::size_t k = 0; k < cert.lhs.size(); ++k) {
        cert.margin[k] = cert.rhs[k] - cert.lhs[k];
        const bool ok = cert.strict ? cert.margin[k] > 0.0 : cert.margin[k] >= 0.0;
        cert.verdict = cert.verdict && ok;
    }
}

template <typename T>
void require_per_agent(std::span<const T> items, const CommGraph& graph, const char* what) {
    if (items.size() != graph.n_agents()) {
        throw InvalidArgument(std::string(what) + ": expected one entry per agent");
    }
}

json vec_json(const Vec2& v) { return json::array({v[0], v[1]}); }

json bounds_json(const DynamicBounds& b) {
    return {{"lambda1_star", b.lambda1_star}, {"lambda2_star", b.lambda2_star}, {"c", b.c},
            {"gamma", vec_json(b.gamma)}};
}

// Sum over edges of psi(d_ij(0)), i.e. half the double sum over neighbour lists.
double initial_link_energy(std::span<const Vec2> x, const CommGraph& graph,
                           const PotentialSpec& spec) {
    double total = 0.0;
    for (const Edge& e : graph.edges()) total += psi((x[e.i] - x[e.j]).squaredNorm(), spec);
    return total;
}

std::vector<Vec2> positions_of(std::span<const JointState> initial,
                               std::span<const RobotModel> models) {
    std::vector<Vec2> x;
    x.reserve(initial.size());
    for (std::size_t i = 0; i < initial.size(); ++i) {
        x.push_back(forward_kinematics(initial[i].q, models[i]));
    }
    return x;
}

double max_eigenvalue(const Mat2& A) {
    return Eigen::SelfAdjointEigenSolver<Mat2>(A).eigenvalues()[1];
}

}  // namespace

std::string_view to_string(ConditionId id) {
    switch (id) {
        case ConditionId::Eq4: return "EQ4";
        case ConditionId::Eq8: return "EQ8";
        case ConditionId::Eq10: return "EQ10";
        case ConditionId::Eq12: return "EQ12";
        case ConditionId::TwoAgent: return "TWO_AGENT";
    }
    return "UNKNOWN";
}

double Certificate::min_margin() const {
    if (margin.empty()) return std::numeric_limits<double>::quiet_NaN();
    return *std::min_element(margin.begin(), margin.end());
}

json to_json(const Certificate& cert) {
    return {{"condition", std::string(to_string(cert.id))},
            {"verdict", cert.verdict},
            {"strict", cert.strict},
            {"lhs", cert.lhs},
            {"rhs", cert.rhs},
            {"margin", cert.margin},
            {"inputs", cert.inputs}};
}

Certificate check_eq4(std::span<const OutputFeedbackGains> gains, const CommGraph& graph,
                      const PotentialSpec& spec, std::span<const DynamicBounds> bounds,
                      std::span<const ActuationLimits> limits) {
    require_per_agent(gains, graph, "gains");
    require_per_agent(bounds, graph, "bounds");
    require_per_agent(limits, graph, "limits");
    Certificate cert;
    cert.id = ConditionId::Eq4;
    cert.strict = false;
    const double sig = sigma(spec);
    const double pr = psi_at_r(spec);
    cert.inputs = {{"r", spec.r}, {"Q", spec.Q}, {"sigma", sig}, {"psi_r", pr}};
    json agents = json::array();
    for (std::size_t i = 0; i < graph.n_agents(); ++i) {
        const auto& g = gains[i];
        const double n_i = static_cast<double>(graph.degree(i));
        const double gradient_budget = 2.0 * n_i * g.rho * sig * spec.r;
        const double damping_budget = std::sqrt(2.0 * g.rho * g.kappa * pr);
        for (int k = 0; k < 2; ++k) {
            cert.lhs.push_back(gradient_budget + damping_budget + bounds[i].gamma[k]);
            cert.rhs.push_back(limits[i].f_bar[k]);
        }
        agents.push_back({{"rho", g.rho}, {"kappa", g.kappa}, {"zeta", g.zeta},
                          {"degree", graph.degree(i)}, {"f_bar", vec_json(limits[i].f_bar)},
                          {"bounds", bounds_json(bounds[i])}});
    }
    cert.inputs["agents"] = std::move(agents);
    finish(cert);
    return cert;
}

Certificate check_eq8(std::span<const JointState> initial, std::span<const RobotModel> models,
                      std::span<const OutputFeedbackGains> gains, const CommGraph& graph,
                      const PotentialSpec& spec) {
    require_per_agent(initial, graph, "initial states");
    require_per_agent(models, graph, "models");
    require_per_agent(gains, graph, "gains");
    Certificate cert;
    cert.id = ConditionId::Eq8;
    cert.strict = true;

    const std::vector<Vec2> x = positions_of(initial, models);
    double kinetic = 0.0;
    json lambda_hat = json::array();
    for (std::size_t i = 0; i < graph.n_agents(); ++i) {
        const double lam = max_eigenvalue(mass_matrix(initial[i].q, models[i]));
        lambda_hat.push_back(lam);
        kinetic += lam / gains[i].rho * initial[i].dq.squaredNorm();
    }
    const double link = initial_link_energy(x, graph, spec);
    cert.lhs.push_back(0.5 * kinetic + link);
    cert.rhs.push_back(psi_at_r(spec));
    cert.inputs = {{"r", spec.r},
                   {"Q", spec.Q},
                   {"lambda_hat_20", lambda_hat},
                   {"kinetic_term", 0.5 * kinetic},
                   {"link_term", link}};
    finish(cert);
    return cert;
}

Certificate check_eq10(std::span<const AdaptiveGains> gains, const CommGraph& graph,
                       const PotentialSpec& spec, std::span<const DynamicBounds> bounds,
                       std::span<const ActuationLimits> limits) {
    require_per_agent(gains, graph, "gains");
    require_per_agent(bounds, graph, "bounds");
    require_per_agent(limits, graph, "limits");
    Certificate cert;
    cert.id = ConditionId::Eq10;
    cert.strict = true;
    const double sig = sigma(spec);
    const double nu_ = nu(spec);
    const double pr = psi_at_r(spec);
    const double r = spec.r;
    cert.inputs = {{"r", r}, {"Q", spec.Q}, {"sigma", sig}, {"nu", nu_}, {"psi_r", pr}};
    json agents = json::array();
    for (std::size_t i = 0; i < graph.n_agents(); ++i) {
        const auto& g = gains[i];
        const auto& b = bounds[i];
        const double n_i = static_cast<double>(graph.degree(i));
        const double s_bound = std::sqrt(2.0 * g.alpha * g.mu * pr / b.lambda1_star);
        const double dx_bound = s_bound + g.alpha * sig * r * n_i;
        const double compensation =
            ((2.0 * nu_ * b.lambda2_star + b.c * r * sig) * g.alpha * n_i + g.mu) * dx_bound;
        for (int k = 0; k < 2; ++k) {
            cert.lhs.push_back(compensation + b.gamma[k] + g.kappa * s_bound);
            cert.rhs.push_back(limits[i].f_bar[k]);
        }
        agents.push_back({{"kappa", g.kappa}, {"mu", g.mu}, {"alpha", g.alpha},
                          {"degree", graph.degree(i)}, {"s_bound", s_bound},
                          {"dx_bound", dx_bound}, {"f_bar", vec_json(limits[i].f_bar)},
                          {"bounds", bounds_json(b)}});
    }
    cert.inputs["agents"] = std::move(agents);
    finish(cert);
    return cert;
}

Certificate check_eq12(std::span<const JointState> initial, std::span<const RobotModel> models,
                       std::span<const AdaptiveGains> gains, const CommGraph& graph,
                       const PotentialSpec& spec) {
    require_per_agent(initial, graph, "initial states");
    require_per_agent(models, graph, "models");
    require_per_agent(gains, graph, "gains");
    Certificate cert;
    cert.id = ConditionId::Eq12;
    cert.strict = true;

    const std::vector<Vec2> x = positions_of(initial, models);
    double energy = 0.0;
    json agents = json::array();
    for (std::size_t i = 0; i < graph.n_agents(); ++i) {
        const auto& g = gains[i];
        const TaskSpaceTerms terms = task_space_terms(initial[i].q, initial[i].dq, models[i]);
        const double lam = max_eigenvalue(terms.M);
        Vec2 e = Vec2::Zero();
        for (std::size_t j : graph.neighbors(i)) e += grad_i(x[i], x[j], spec);
        const Vec2 s = jacobian(initial[i].q, models[i]) * initial[i].dq + g.alpha * e;
        const double dtheta_sq = (g.theta_hi - g.theta_lo).squaredNorm();
        energy += (lam * s.squaredNorm() + dtheta_sq / g.beta) / (g.alpha * g.mu);
        agents.push_back({{"lambda_star_hat_20", lam}, {"s0", vec_json(s)},
                          {"delta_theta_norm", std::sqrt(dtheta_sq)}, {"alpha", g.alpha},
                          {"mu", g.mu}, {"beta", g.beta}});
    }
    const double link = initial_link_energy(x, graph, spec);
    cert.lhs.push_back(0.5 * energy + link);
    cert.rhs.push_back(psi_at_r(spec));
    cert.inputs = {{"r", spec.r}, {"Q", spec.Q}, {"agents", agents}, {"link_term", link}};
    finish(cert);
    return cert;
}

Certificate check_two_agent_feasibility(double v1, double v2, double d0, double r, double f_bar1,
                                        double f_bar2) {
    if (!(r > 0.0) || !(d0 >= 0.0) || d0 > r) {
        throw InvalidGeometry("two-agent check requires 0 <= d0 <= r");
    }
    Certificate cert;
    cert.id = ConditionId::TwoAgent;
    cert.strict = true;
    const double v = std::abs(v1) + std::abs(v2);
    cert.lhs.push_back(v * v);
    cert.rhs.push_back(2.0 * (r - d0) * (f_bar1 + f_bar2));
    cert.inputs = {{"v1", v1}, {"v2", v2}, {"d0", d0}, {"r", r}, {"f_bar1", f_bar1},
                   {"f_bar2", f_bar2}};
    finish(cert);
    return cert;
}

SynthesisResult synthesize_output_feedback_gains(
    std::span<const JointState> initial, std::span<const RobotModel> models,
    const CommGraph& graph, const PotentialSpec& spec,
    std::optional<std::vector<OutputFeedbackGains>> current, const SynthesisSpace& space,
    std::span<const DynamicBounds> bounds, std::span<const ActuationLimits> limits) {
    require_per_agent(initial, graph, "initial states");
    require_per_agent(models, graph, "models");
    require_per_agent(bounds, graph, "bounds");
    require_per_agent(limits, graph, "limits");

    for (std::size_t i = 0; i < graph.n_agents(); ++i) {
        for (int k = 0; k < 2; ++k) {
            if (bounds[i].gamma[k] >= limits[i].f_bar[k]) {
                throw SynthesisNotFound("agent " + std::to_string(i) + " component " +
                                        std::to_string(k) + ": gravity bound " +
                                        std::to_string(bounds[i].gamma[k]) +
                                        " is not below actuation limit " +
                                        std::to_string(limits[i].f_bar[k]));
            }
        }
    }

    if (current) {
        require_per_agent(std::span<const OutputFeedbackGains>(*current), graph, "gains");
        Certificate eq4 = check_eq4(*current, graph, spec, bounds, limits);
        Certificate eq8 = check_eq8(initial, models, *current, graph, spec);
        if (eq4.verdict && eq8.verdict) {
            return {spec, *current, std::move(eq4), std::move(eq8), true};
        }
    }

    auto prepend_unique = [](double first, std::vector<double> rest) {
        std::erase(rest, first);
        rest.insert(rest.begin(), first);
        return rest;
    };
    const std::vector<double> q_list = prepend_unique(spec.Q, space.Q_candidates);
    const std::vector<double> kappa_list =
        current ? prepend_unique(current->front().kappa, space.kappa_candidates)
                : space.kappa_candidates;
    const double zeta = current ? current->front().zeta : space.zeta;

    const std::vector<Vec2> x = positions_of(initial, models);
    double kinetic = 0.0;
    for (std::size_t i = 0; i < graph.n_agents(); ++i) {
        kinetic += 0.5 * max_eigenvalue(mass_matrix(initial[i].q, models[i])) *
                   initial[i].dq.squaredNorm();
    }

    for (double Q : q_list) {
        PotentialSpec trial{spec.r, Q};
        const double pr = psi_at_r(trial);
        const double link = initial_link_energy(x, graph, trial);
        if (link >= pr) continue;
        // kinetic / rho + link < psi(r)
        const double rho_min = kinetic / (pr - link);
        const double sig = sigma(trial);
        for (double kappa : kappa_list) {
            // a rho + b sqrt(rho) <= f_bar - gamma, per agent and component.
            double rho_max = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < graph.n_agents(); ++i) {
                const double a = 2.0 * static_cast<double>(graph.degree(i)) * sig * trial.r;
                const double b = std::sqrt(2.0 * kappa * pr);
                for (int k = 0; k < 2; ++k) {
                    const double room = limits[i].f_bar[k] - bounds[i].gamma[k];
                    const double u = a > 0.0 ? (-b + std::sqrt(b * b + 4.0 * a * room)) / (2.0 * a)
                                             : room / b;
                    rho_max = std::min(rho_max, u * u);
                }
            }
            if (!(rho_max > rho_min)) continue;
            double rho = space.rho_fraction * rho_max;
            if (rho <= rho_min) rho = 0.5 * (rho_min + rho_max);

            std::vector<OutputFeedbackGains> gains(graph.n_agents(), {rho, kappa, zeta});
            Certificate eq4 = check_eq4(gains, graph, trial, bounds, limits);
            Certificate eq8 = check_eq8(initial, models, gains, graph, trial);
            if (eq4.verdict && eq8.verdict) {
                return {trial, std::move(gains), std::move(eq4), std::move(eq8), false};
            }
        }
    }
    throw SynthesisNotFound("no (Q, kappa, rho) candidate satisfies both output feedback checks");
}

}  // namespace coordsim
