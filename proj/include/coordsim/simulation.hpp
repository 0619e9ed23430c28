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

#ifndef COORDSIM_SIMULATION_HPP
#define COORDSIM_SIMULATION_HPP

#include "coordsim/comm_graph.hpp"
#include "coordsim/controllers.hpp"
#include "coordsim/errors.hpp"
#include "coordsim/interaction_potential.hpp"
#include "coordsim/robot_dynamics.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <cmath>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace coordsim {

enum class ControllerKind { OutputFeedback, Adaptive };

struct OutputFeedbackSetup {
    std::vector<OutputFeedbackGains> gains;
};

struct AdaptiveSetup {
    std::vector<AdaptiveGains> gains;
    /// Initial estimates; empty means the box midpoint for every agent.
    std::vector<Vec2> theta_hat0;
};

/// Everything needed to integrate one closed-loop network run.
struct Scenario {
    std::vector<RobotModel> models;
    std::vector<JointState> initial;
    std::variant<OutputFeedbackSetup, AdaptiveSetup> controller;
    PotentialSpec potential;
    double eps = 0.2;
    std::vector<ActuationLimits> limits;
    double dt = 1e-3;
    double t_end = 10.0;
    std::size_t log_stride = 1;
    std::uint64_t seed = 0;
    double converge_tol = 0.05;   ///< coordination error threshold (m)
    double converge_hold = 1.0;   ///< time the threshold must hold (s)

    std::size_t n_agents() const { return models.size(); }
    ControllerKind kind() const;
    void validate() const;
};

/// Joint state plus the controller's internal state: filter xhat or estimate theta_hat.
struct AgentState {
    JointState joint;
    Vec2 aux = Vec2::Zero();
};

struct NetworkState {
    double t = 0.0;
    std::vector<AgentState> agents;
};

/// Raised when an initial edge stretches past the communication radius.
class LinkBroken : public OutOfDomain {
public:
    LinkBroken(Edge edge, double distance);
    Edge edge;
    double distance;
};

/// Raised when an agent's Jacobian becomes singular.
class AgentSingular : public SingularConfiguration {
public:
    AgentSingular(std::size_t agent, double singular_value);
    std::size_t agent;
    double singular_value;
};

/// Control applied to one agent over a step.
struct AgentControl {
    Vec2 wrench = Vec2::Zero();                ///< applied at the step's first stage
    std::array<bool, 2> saturated{false, false};  ///< any stage
    double kappa_eff = 0.0;                     ///< smallest over stages (adaptive)
    bool base_saturated = false;                ///< any stage (adaptive)
    double aux_signal = 0.0;                    ///< ||dxhat|| or ||s|| at the first stage
    double limit_excess = -1.0;                 ///< max_k |f^k| - f_bar^k over stages
};

struct StepResult {
    NetworkState next;
    std::vector<AgentControl> control;
    std::vector<bool> theta_clamped;
};

enum class EventKind { LinkBreak, Singularity, BaseSaturated, ProjectionClamp, Converged };

std::string_view to_string(EventKind kind);

struct SimEvent {
    EventKind kind = EventKind::Converged;
    double t = 0.0;
    std::optional<Edge> edge;
    std::optional<std::size_t> agent;
    double value = 0.0;  ///< distance, singular value or coordination error
};

struct AgentSample {
    Vec2 q, dq, x, dx, wrench, aux;
    std::array<bool, 2> saturated{false, false};
    double kappa_eff = 0.0;
};

struct LogSample {
    double t = 0.0;
    std::vector<AgentSample> agents;
    std::vector<double> edge_distance;
    double V = 0.0;  ///< NaN on the terminal row of a broken run
};

struct RunSummary {
    std::size_t steps = 0;
    double t_final = 0.0;
    double final_coordination_error = 0.0;
    double max_edge_distance = 0.0;
    double max_edge_potential_ratio = 0.0;  ///< max psi(d_ij) / psi(r) over steps
    double V_initial = 0.0;
    double V_max = 0.0;
    std::size_t v_violations = 0;  ///< logged steps with V_{k+1} > V_k + 1e-6
    bool link_broken = false;
    bool singular = false;
    std::optional<double> converged_at;
    std::size_t saturation_count = 0;  ///< (step, agent) pairs with a saturation flag
    std::size_t base_saturation_count = 0;
    double max_limit_excess = -INFINITY;  ///< max |f^k| - f_bar^k over every evaluation
    double min_kappa_ratio = 1.0;         ///< min kappa_eff / kappa (adaptive)
    std::size_t theta_clamps = 0;
    bool theta_in_box = true;
    std::vector<double> max_aux_signal;   ///< per agent, max ||dxhat|| or ||s||
};

struct TrajectoryLog {
    ControllerKind kind = ControllerKind::OutputFeedback;
    std::size_t n_agents = 0;
    std::vector<Edge> edges;
    std::vector<LogSample> samples;
    std::vector<SimEvent> events;
    RunSummary summary;
};

/// Largest pairwise end-effector distance.
double coordination_error(std::span<const Vec2> positions);

/**
 * @brief Fixed-step RK4 integrator for a network of manipulators under one controller.
 *
 * The communication graph is built once from the initial end-effector positions
 * and never changes. Every controller evaluation reads only the agent's own
 * state and that of its initial neighbours.
 */
class Simulator {
public:
    explicit Simulator(Scenario scenario);

    const Scenario& scenario() const { return scenario_; }
    const CommGraph& graph() const { return graph_; }

    NetworkState initial_state() const;
    std::vector<Vec2> positions(const NetworkState& state) const;
    std::vector<double> edge_distances(const NetworkState& state) const;

    /// Lyapunov-like function of the configured controller. Throws OutOfDomain past r.
    double lyapunov_value(const NetworkState& state) const;

    /// One RK4 step. Throws LinkBroken or AgentSingular from any stage.
    StepResult step(const NetworkState& state) const;

    TrajectoryLog run() const;

private:
    struct Rates {
        std::vector<Vec2> dq, ddq, daux;
    };

    Rates evaluate(const NetworkState& state, std::vector<AgentControl>& control,
                   bool first_stage) const;

    Scenario scenario_;
    CommGraph graph_;
};

/// Runs scenarios concurrently, capped by COORD_SIM_THREADS when set.
std::vector<TrajectoryLog> run_batch(std::span<const Scenario> scenarios);

}  // namespace coordsim

#endif  // COORDSIM_SIMULATION_HPP
