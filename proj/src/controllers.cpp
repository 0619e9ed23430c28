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

#include "coordsim/controllers.hpp"

#include "coordsim/errors.hpp"

#include <algorithm>
#include <cmath>

namespace coordsim {

void OutputFeedbackGains::validate() const {
    if (!(rho > 0.0 && kappa > 0.0 && zeta > 0.0)) {
        throw InvalidArgument("output feedback gains rho, kappa, zeta must be positive");
    }
}

void AdaptiveGains::validate() const {
    if (!(kappa > 0.0 && mu > 0.0 && beta > 0.0 && alpha > 0.0 && delta > 0.0)) {
        throw InvalidArgument("adaptive gains kappa, mu, beta, alpha, delta must be positive");
    }
    for (int k = 0; k < 2; ++k) {
        if (!(theta_lo[k] < theta_hi[k])) throw InvalidArgument("parameter box is empty");
        if (!(delta < 0.5 * (theta_hi[k] - theta_lo[k]))) {
            throw InvalidArgument("projection layer delta must be below half the box width");
        }
    }
}

bool AdaptiveGains::in_box(const Vec2& theta) const {
    return (theta.array() >= theta_lo.array()).all() && (theta.array() <= theta_hi.array()).all();
}

void ActuationLimits::validate() const {
    if (!(f_bar[0] > 0.0 && f_bar[1] > 0.0)) {
        throw InvalidArgument("actuation limits must be positive");
    }
}

OutputFeedbackCommand output_feedback_control(const Vec2& x_i, std::span<const Vec2> neighbor_x,
                                              const Vec2& xhat_i, const OutputFeedbackGains& gains,
                                              const Vec2& g_star, const PotentialSpec& spec) {
    Vec2 grad = Vec2::Zero();
    for (const Vec2& x_j : neighbor_x) grad += grad_i(x_i, x_j, spec);
    OutputFeedbackCommand cmd;
    cmd.filter_rate = -gains.zeta * xhat_i + x_i;
    cmd.wrench = -gains.rho * grad - gains.kappa * cmd.filter_rate + g_star;
    return cmd;
}

AdaptiveCommand adaptive_control(const JointState& joint, const TaskState& task,
                                 std::span<const NeighborState> neighbors, const Vec2& theta_hat,
                                 const AdaptiveGains& gains, const RobotModel& kinematics,
                                 const PotentialSpec& spec) {
    AdaptiveCommand cmd;
    cmd.e = Vec2::Zero();
    cmd.de = Vec2::Zero();
    for (const NeighborState& n : neighbors) {
        cmd.e += grad_i(task.x, n.x, spec);
        cmd.de += hessian(task.x - n.x, spec) * (task.dx - n.dx);
    }
    cmd.s = task.dx + gains.alpha * cmd.e;
    cmd.phi = regressor(joint.q, joint.dq, cmd.e, cmd.de, gains.alpha, kinematics);
    cmd.base = cmd.phi * theta_hat - gains.mu * task.dx;
    cmd.wrench = cmd.base - gains.kappa * cmd.s;
    cmd.omega = -gains.beta * cmd.phi.transpose() * cmd.s;
    return cmd;
}

Vec2 project_theta_dot(const Vec2& theta_hat, const Vec2& omega, const AdaptiveGains& gains) {
    Vec2 rate = omega;
    const double d = gains.delta;
    for (int k = 0; k < 2; ++k) {
        const double lo = gains.theta_lo[k];
        const double hi = gains.theta_hi[k];
        const double th = theta_hat[k];
        if (omega[k] < 0.0 && th <= lo + d) {
            const double v_lb = th <= lo ? 1.0 : std::min(1.0, (lo + d - th) / d);
            rate[k] = (1.0 - v_lb) * omega[k];
        } else if (omega[k] > 0.0 && th >= hi - d) {
            const double v_ub = th >= hi ? 1.0 : std::min(1.0, (th - hi + d) / d);
            rate[k] = (1.0 - v_ub) * omega[k];
        }
    }
    return rate;
}

SaturatedWrench saturate_output_feedback(const Vec2& f_hat, const ActuationLimits& limits) {
    SaturatedWrench out;
    for (int k = 0; k < 2; ++k) {
        out.saturated[k] = std::abs(f_hat[k]) > limits.f_bar[k];
        out.wrench[k] = std::clamp(f_hat[k], -limits.f_bar[k], limits.f_bar[k]);
    }
    return out;
}

AdaptiveSaturation saturate_adaptive(const Vec2& base, const Vec2& s, double kappa,
                                     const ActuationLimits& limits) {
    AdaptiveSaturation out;
    double k_eff = kappa;
    for (int k = 0; k < 2; ++k) {
        const double fb = limits.f_bar[k];
        out.saturated[k] = std::abs(base[k] - kappa * s[k]) > fb;
        if (std::abs(base[k]) > fb) {
            out.base_saturated = true;
            continue;
        }
        // |base - k_eff s| <= fb; only the side that s pushes toward can bind.
        if (s[k] > 0.0) {
            k_eff = std::min(k_eff, (base[k] + fb) / s[k]);
        } else if (s[k] < 0.0) {
            k_eff = std::min(k_eff, (fb - base[k]) / -s[k]);
        }
    }
    out.kappa_eff = std::max(k_eff, 0.0);
    for (int k = 0; k < 2; ++k) {
        out.wrench[k] = std::clamp(base[k] - out.kappa_eff * s[k], -limits.f_bar[k], limits.f_bar[k]);
    }
    return out;
}

}  // namespace coordsim
