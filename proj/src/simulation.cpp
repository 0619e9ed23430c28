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

#include "coordsim/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <thread>

namespace coordsim {

namespace {

constexpr double kMonotonicityTol = 1e-6;

CommGraph make_graph(const Scenario& s) {
    s.validate();
    std::vector<Vec2> x;
    x.reserve(s.n_agents());
    for (std::size_t i = 0; i < s.n_agents(); ++i) {
        x.push_back(forward_kinematics(s.initial[i].q, s.models[i]));
    }
    return build_initial_graph(x, s.potential.r, s.eps);
}

NetworkState advance(const NetworkState& base, const std::vector<Vec2>& dq,
                     const std::vector<Vec2>& ddq, const std::vector<Vec2>& daux, double h) {
    NetworkState out = base;
    out.t = base.t + h;
    for (std::size_t i = 0; i < out.agents.size(); ++i) {
        out.agents[i].joint.q += h * dq[i];
        out.agents[i].joint.dq += h * ddq[i];
        out.agents[i].aux += h * daux[i];
    }
    return out;
}

void merge(AgentControl& acc, const AgentControl& stage) {
    acc.saturated[0] = acc.saturated[0] || stage.saturated[0];
    acc.saturated[1] = acc.saturated[1] || stage.saturated[1];
    acc.kappa_eff = std::min(acc.kappa_eff, stage.kappa_eff);
    acc.base_saturated = acc.base_saturated || stage.base_saturated;
    acc.limit_excess = std::max(acc.limit_excess, stage.limit_excess);
}

}  // namespace

LinkBroken::LinkBroken(Edge e, double d)
    : OutOfDomain("link (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                  ") broke at distance " + std::to_string(d)),
      edge(e),
      distance(d) {}

AgentSingular::AgentSingular(std::size_t a, double sv)
    : SingularConfiguration("agent " + std::to_string(a) + " reached a singular configuration (" +
                            std::to_string(sv) + ")"),
      agent(a),
      singular_value(sv) {}

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::LinkBreak: return "LinkBreak";
        case EventKind::Singularity: return "Singularity";
        case EventKind::BaseSaturated: return "BaseSaturated";
        case EventKind::ProjectionClamp: return "ProjectionClamp";
        case EventKind::Converged: return "Converged";
    }
    return "Unknown";
}

ControllerKind Scenario::kind() const {
    return std::holds_alternative<OutputFeedbackSetup>(controller) ? ControllerKind::OutputFeedback
                                                                   : ControllerKind::Adaptive;
}

void Scenario::validate() const {
    const std::size_t n = models.size();
    if (n == 0) throw InvalidArgument("scenario has no robots");
    if (initial.size() != n || limits.size() != n) {
        throw InvalidArgument("scenario needs one initial state and one limit per robot");
    }
    for (const auto& m : models) m.validate();
    for (const auto& l : limits) l.validate();
    for (const auto& s : initial) {
        if (!s.q.allFinite() || !s.dq.allFinite()) throw InvalidArgument("initial state not finite");
    }
    potential.validate();
    if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
    if (!(t_end >= 0.0)) throw InvalidArgument("t_end must be non-negative");
    if (log_stride == 0) throw InvalidArgument("log_stride must be at least 1");
    if (const auto* of = std::get_if<OutputFeedbackSetup>(&controller)) {
        if (of->gains.size() != n) throw InvalidArgument("one output feedback gain set per robot");
        for (const auto& g : of->gains) g.validate();
    } else {
        const auto& ad = std::get<AdaptiveSetup>(controller);
        if (ad.gains.size() != n) throw InvalidArgument("one adaptive gain set per robot");
        for (const auto& g : ad.gains) g.validate();
        if (!ad.theta_hat0.empty()) {
            if (ad.theta_hat0.size() != n) throw InvalidArgument("one initial estimate per robot");
            for (std::size_t i = 0; i < n; ++i) {
                if (!ad.gains[i].in_box(ad.theta_hat0[i])) {
                    throw InvalidArgument("initial estimate outside the parameter box");
                }
            }
        }
    }
}

double coordination_error(std::span<const Vec2> positions) {
    double worst = 0.0;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        for (std::size_t j = i + 1; j < positions.size(); ++j) {
            worst = std::max(worst, (positions[i] - positions[j]).norm());
        }
    }
    return worst;
}

Simulator::Simulator(Scenario scenario)
    : scenario_(std::move(scenario)), graph_(make_graph(scenario_)) {}

NetworkState Simulator::initial_state() const {
    NetworkState s;
    s.t = 0.0;
    s.agents.resize(scenario_.n_agents());
    for (std::size_t i = 0; i < s.agents.size(); ++i) {
        s.agents[i].joint = scenario_.initial[i];
        if (const auto* of = std::get_if<OutputFeedbackSetup>(&scenario_.controller)) {
            // xhat(0) = x(0) / zeta makes the filter output start at zero.
            s.agents[i].aux = forward_kinematics(scenario_.initial[i].q, scenario_.models[i]) /
                              of->gains[i].zeta;
        } else {
            const auto& ad = std::get<AdaptiveSetup>(scenario_.controller);
            s.agents[i].aux =
                ad.theta_hat0.empty() ? ad.gains[i].box_midpoint() : ad.theta_hat0[i];
        }
    }
    return s;
}

std::vector<Vec2> Simulator::positions(const NetworkState& state) const {
    std::vector<Vec2> x;
    x.reserve(state.agents.size());
    for (std::size_t i = 0; i < state.agents.size(); ++i) {
        x.push_back(forward_kinematics(state.agents[i].joint.q, scenario_.models[i]));
    }
    return x;
}

std::vector<double> Simulator::edge_distances(const NetworkState& state) const {
    const std::vector<Vec2> x = positions(state);
    std::vector<double> d;
    d.reserve(graph_.edges().size());
    for (const Edge& e : graph_.edges()) d.push_back((x[e.i] - x[e.j]).norm());
    return d;
}

double Simulator::lyapunov_value(const NetworkState& state) const {
    const std::vector<Vec2> x = positions(state);
    const PotentialSpec& spec = scenario_.potential;
    double V = 0.0;
    for (const Edge& e : graph_.edges()) V += psi((x[e.i] - x[e.j]).squaredNorm(), spec);

    if (const auto* of = std::get_if<OutputFeedbackSetup>(&scenario_.controller)) {
        for (std::size_t i = 0; i < state.agents.size(); ++i) {
            const auto& g = of->gains[i];
            const auto& a = state.agents[i];
            const Vec2 filter_rate = -g.zeta * a.aux + x[i];
            // dx^T M* dx equals dq^T M dq away from singularities.
            V += (2.0 * kinetic_energy(a.joint, scenario_.models[i]) +
                  g.kappa * filter_rate.squaredNorm()) /
                 (2.0 * g.rho);
        }
        return V;
    }

    const auto& ad = std::get<AdaptiveSetup>(scenario_.controller);
    for (std::size_t i = 0; i < state.agents.size(); ++i) {
        const auto& g = ad.gains[i];
        const auto& a = state.agents[i];
        const RobotModel& model = scenario_.models[i];
        Vec2 e = Vec2::Zero();
        for (std::size_t j : graph_.neighbors(i)) e += grad_i(x[i], x[j], spec);
        const Vec2 s = jacobian(a.joint.q, model) * a.joint.dq + g.alpha * e;
        const Mat2 M_star = task_space_terms(a.joint.q, a.joint.dq, model).M;
        const Vec2 theta_err = model.theta() - a.aux;
        V += (s.dot(M_star * s) + theta_err.squaredNorm() / g.beta) / (2.0 * g.alpha * g.mu);
    }
    return V;
}

Simulator::Rates Simulator::evaluate(const NetworkState& state,
                                     std::vector<AgentControl>& control, bool first_stage) const {
    const std::size_t n = state.agents.size();
    const PotentialSpec& spec = scenario_.potential;

    std::vector<TaskState> task(n);
    std::vector<Mat2> J(n);
    for (std::size_t i = 0; i < n; ++i) {
        const RobotModel& model = scenario_.models[i];
        J[i] = jacobian(state.agents[i].joint.q, model);
        const double sv = min_singular_value(J[i]);
        if (!(sv >= kSingularityTol)) throw AgentSingular(i, sv);
        task[i] = {forward_kinematics(state.agents[i].joint.q, model),
                   J[i] * state.agents[i].joint.dq};
    }
    for (const Edge& e : graph_.edges()) {
        const double d_sq = (task[e.i].x - task[e.j].x).squaredNorm();
        if (!(d_sq <= spec.r * spec.r)) throw LinkBroken(e, std::sqrt(d_sq));
    }

    Rates rates;
    rates.dq.resize(n);
    rates.ddq.resize(n);
    rates.daux.resize(n);
    std::vector<Vec2> nbr_x;
    std::vector<NeighborState> nbr_state;
    for (std::size_t i = 0; i < n; ++i) {
        const RobotModel& model = scenario_.models[i];
        const AgentState& a = state.agents[i];
        const ActuationLimits& lim = scenario_.limits[i];
        AgentControl c;
        Vec2 applied;

        if (const auto* of = std::get_if<OutputFeedbackSetup>(&scenario_.controller)) {
            nbr_x.clear();
            for (std::size_t j : graph_.neighbors(i)) nbr_x.push_back(task[j].x);
            const Vec2 g_star = model.grav == 0.0
                                    ? Vec2::Zero()
                                    : Vec2(J[i].transpose().partialPivLu().solve(
                                          gravity_vector(a.joint.q, model)));
            const OutputFeedbackCommand cmd =
                output_feedback_control(task[i].x, nbr_x, a.aux, of->gains[i], g_star, spec);
            const SaturatedWrench sat = saturate_output_feedback(cmd.wrench, lim);
            applied = sat.wrench;
            c.saturated = sat.saturated;
            c.kappa_eff = of->gains[i].kappa;
            c.aux_signal = cmd.filter_rate.norm();
            rates.daux[i] = cmd.filter_rate;
        } else {
            const auto& ad = std::get<AdaptiveSetup>(scenario_.controller);
            nbr_state.clear();
            for (std::size_t j : graph_.neighbors(i)) nbr_state.push_back({task[j].x, task[j].dx});
            const AdaptiveCommand cmd = adaptive_control(a.joint, task[i], nbr_state, a.aux,
                                                         ad.gains[i], model, spec);
            const AdaptiveSaturation sat =
                saturate_adaptive(cmd.base, cmd.s, ad.gains[i].kappa, lim);
            applied = sat.wrench;
            c.saturated = sat.saturated;
            c.kappa_eff = sat.kappa_eff;
            c.base_saturated = sat.base_saturated;
            c.aux_signal = cmd.s.norm();
            rates.daux[i] = project_theta_dot(a.aux, cmd.omega, ad.gains[i]);
        }

        c.wrench = applied;
        c.limit_excess = std::max(std::abs(applied[0]) - lim.f_bar[0],
                                  std::abs(applied[1]) - lim.f_bar[1]);
        rates.dq[i] = a.joint.dq;
        rates.ddq[i] = forward_dynamics(a.joint, applied, model);

        if (first_stage) {
            control[i] = c;
        } else {
            merge(control[i], c);
        }
    }
    return rates;
}

StepResult Simulator::step(const NetworkState& state) const {
    const double h = scenario_.dt;
    StepResult out;
    out.control.resize(state.agents.size());

    const Rates k1 = evaluate(state, out.control, true);
    const Rates k2 = evaluate(advance(state, k1.dq, k1.ddq, k1.daux, 0.5 * h), out.control, false);
    const Rates k3 = evaluate(advance(state, k2.dq, k2.ddq, k2.daux, 0.5 * h), out.control, false);
    const Rates k4 = evaluate(advance(state, k3.dq, k3.ddq, k3.daux, h), out.control, false);

    out.next = state;
    out.next.t = state.t + h;
    out.theta_clamped.assign(state.agents.size(), false);
    const auto* ad = std::get_if<AdaptiveSetup>(&scenario_.controller);
    for (std::size_t i = 0; i < state.agents.size(); ++i) {
        AgentState& a = out.next.agents[i];
        a.joint.q += h / 6.0 * (k1.dq[i] + 2.0 * k2.dq[i] + 2.0 * k3.dq[i] + k4.dq[i]);
        a.joint.dq += h / 6.0 * (k1.ddq[i] + 2.0 * k2.ddq[i] + 2.0 * k3.ddq[i] + k4.ddq[i]);
        a.aux += h / 6.0 * (k1.daux[i] + 2.0 * k2.daux[i] + 2.0 * k3.daux[i] + k4.daux[i]);
        if (ad) {
            const Vec2 clamped = a.aux.cwiseMax(ad->gains[i].theta_lo).cwiseMin(ad->gains[i].theta_hi);
            if (clamped != a.aux) {
                out.theta_clamped[i] = true;
                a.aux = clamped;
            }
        }
    }
    return out;
}

TrajectoryLog Simulator::run() const {
    const std::size_t n = scenario_.n_agents();
    TrajectoryLog log;
    log.kind = scenario_.kind();
    log.n_agents = n;
    log.edges = graph_.edges();
    RunSummary& sum = log.summary;
    sum.max_aux_signal.assign(n, 0.0);

    NetworkState state = initial_state();
    const double pr = psi_at_r(scenario_.potential);
    sum.final_coordination_error = coordination_error(positions(state));
    for (double d : edge_distances(state)) {
        sum.max_edge_distance = std::max(sum.max_edge_distance, d);
        sum.max_edge_potential_ratio =
            std::max(sum.max_edge_potential_ratio, psi(d * d, scenario_.potential) / pr);
    }
    sum.V_initial = lyapunov_value(state);
    sum.V_max = sum.V_initial;

    const auto n_steps = static_cast<std::size_t>(std::llround(scenario_.t_end / scenario_.dt));
    if (n_steps == 0) return log;

    const auto* ad = std::get_if<AdaptiveSetup>(&scenario_.controller);
    std::vector<bool> base_reported(n, false), clamp_reported(n, false);
    double window_start = std::nan("");  // NaN while outside the tolerance
    std::optional<double> last_logged_V;
    std::vector<AgentControl> last_control;

    auto make_sample = [&](const NetworkState& s, const std::vector<AgentControl>& ctl,
                           double V) {
        LogSample row;
        row.t = s.t;
        row.V = V;
        row.edge_distance = edge_distances(s);
        row.agents.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const AgentState& a = s.agents[i];
            const TaskState ts = task_state(a.joint, scenario_.models[i]);
            AgentSample& out = row.agents[i];
            out.q = a.joint.q;
            out.dq = a.joint.dq;
            out.x = ts.x;
            out.dx = ts.dx;
            out.aux = a.aux;
            out.wrench = ctl[i].wrench;
            out.saturated = ctl[i].saturated;
            out.kappa_eff = ctl[i].kappa_eff;
        }
        return row;
    };

    auto log_row = [&](const NetworkState& s, const std::vector<AgentControl>& ctl) {
        const double V = lyapunov_value(s);
        if (last_logged_V && V > *last_logged_V + kMonotonicityTol) ++sum.v_violations;
        last_logged_V = V;
        sum.V_max = std::max(sum.V_max, V);
        log.samples.push_back(make_sample(s, ctl, V));
    };

    for (std::size_t k = 0; k < n_steps; ++k) {
        StepResult res;
        try {
            res = step(state);
        } catch (const LinkBroken& e) {
            sum.link_broken = true;
            sum.max_edge_distance = std::max(sum.max_edge_distance, e.distance);
            log.events.push_back({EventKind::LinkBreak, state.t + scenario_.dt, e.edge, {}, e.distance});
            break;
        } catch (const AgentSingular& e) {
            sum.singular = true;
            log.events.push_back({EventKind::Singularity, state.t, {}, e.agent, e.singular_value});
            break;
        }

        for (std::size_t i = 0; i < n; ++i) {
            const AgentControl& c = res.control[i];
            if (c.saturated[0] || c.saturated[1]) ++sum.saturation_count;
            sum.max_limit_excess = std::max(sum.max_limit_excess, c.limit_excess);
            sum.max_aux_signal[i] = std::max(sum.max_aux_signal[i], c.aux_signal);
            if (ad) sum.min_kappa_ratio = std::min(sum.min_kappa_ratio, c.kappa_eff / ad->gains[i].kappa);
            if (c.base_saturated) {
                ++sum.base_saturation_count;
                if (!base_reported[i]) {
                    base_reported[i] = true;
                    log.events.push_back({EventKind::BaseSaturated, state.t, {}, i, 0.0});
                }
            }
            if (res.theta_clamped[i]) {
                ++sum.theta_clamps;
                if (!clamp_reported[i]) {
                    clamp_reported[i] = true;
                    log.events.push_back({EventKind::ProjectionClamp, res.next.t, {}, i, 0.0});
                }
            }
        }

        if (k % scenario_.log_stride == 0) log_row(state, res.control);
        last_control = res.control;
        state = std::move(res.next);
        ++sum.steps;
        sum.t_final = state.t;
        if (ad) {
            for (std::size_t i = 0; i < n; ++i) {
                sum.theta_in_box = sum.theta_in_box && ad->gains[i].in_box(state.agents[i].aux);
            }
        }

        const std::vector<double> d = edge_distances(state);
        std::optional<std::size_t> broken;
        for (std::size_t e = 0; e < d.size(); ++e) {
            sum.max_edge_distance = std::max(sum.max_edge_distance, d[e]);
            if (d[e] >= scenario_.potential.r) {
                if (!broken) broken = e;
            } else {
                sum.max_edge_potential_ratio = std::max(
                    sum.max_edge_potential_ratio, psi(d[e] * d[e], scenario_.potential) / pr);
            }
        }
        const double err = coordination_error(positions(state));
        sum.final_coordination_error = err;
        if (broken) {
            sum.link_broken = true;
            log.events.push_back(
                {EventKind::LinkBreak, state.t, graph_.edges()[*broken], {}, d[*broken]});
            log.samples.push_back(make_sample(state, last_control, std::nan("")));
            break;
        }

        if (err < scenario_.converge_tol) {
            if (std::isnan(window_start)) window_start = state.t;
            if (!sum.converged_at && state.t - window_start >= scenario_.converge_hold - 1e-12) {
                sum.converged_at = window_start;
                log.events.push_back({EventKind::Converged, window_start, {}, {}, err});
            }
        } else {
            window_start = std::nan("");
        }

        if (k + 1 == n_steps && (k + 1) % scenario_.log_stride == 0) {
            // Controls at the final state, for the closing row only.
            std::vector<AgentControl> final_ctl(n);
            try {
                evaluate(state, final_ctl, true);
            } catch (const Error&) {
                final_ctl = last_control;
            }
            log_row(state, final_ctl);
        }
    }
    return log;
}

std::vector<TrajectoryLog> run_batch(std::span<const Scenario> scenarios) {
    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("COORD_SIM_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0) workers = std::min(workers, static_cast<std::size_t>(cap));
    }
    workers = std::min(workers, scenarios.size());

    std::vector<TrajectoryLog> logs(scenarios.size());
    std::vector<std::exception_ptr> errors(scenarios.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < scenarios.size(); k = next++) {
            try {
                logs[k] = Simulator(scenarios[k]).run();
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    pool.clear();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return logs;
}

}  // namespace coordsim
