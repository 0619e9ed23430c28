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

#ifndef COORDSIM_CONTROLLERS_HPP
#define COORDSIM_CONTROLLERS_HPP

#include "coordsim/interaction_potential.hpp"
#include "coordsim/robot_dynamics.hpp"

#include <array>
#include <span>

namespace coordsim {

struct OutputFeedbackGains {
    double rho = 1.0;    ///< gradient scale
    double kappa = 1.0;  ///< damping scale on the filter output
    double zeta = 1.0;   ///< filter pole

    void validate() const;
};

/**
 * Adaptive law gains. The parameter box [theta_lo, theta_hi] bounds the
 * estimate of [m1, m2]; delta is the width of the projection boundary layer.
 */
struct AdaptiveGains {
    double kappa = 1.0;
    double mu = 1.0;
    double beta = 1.0;
    double alpha = 1.0;
    double delta = 0.01;
    Vec2 theta_lo = Vec2(0.1, 0.1);
    Vec2 theta_hi = Vec2(0.835, 0.835);

    void validate() const;
    Vec2 box_midpoint() const { return 0.5 * (theta_lo + theta_hi); }
    bool in_box(const Vec2& theta) const;
};

struct ActuationLimits {
    Vec2 f_bar = Vec2(20.0, 20.0);

    void validate() const;
};

struct OutputFeedbackCommand {
    Vec2 wrench;       ///< computed (unsaturated) wrench
    Vec2 filter_rate;  ///< -zeta * xhat + x
};

/**
 * @brief Output feedback law for one agent.
 *
 * Reads only positions and the agent's own filter state; no velocities enter.
 * `g_star` is the gravity wrench to compensate.
 */
OutputFeedbackCommand output_feedback_control(const Vec2& x_i, std::span<const Vec2> neighbor_x,
                                              const Vec2& xhat_i, const OutputFeedbackGains& gains,
                                              const Vec2& g_star, const PotentialSpec& spec);

/// Task-space position and velocity received from a 1-hop neighbour.
struct NeighborState {
    Vec2 x;
    Vec2 dx;
};

struct AdaptiveCommand {
    Vec2 wrench;     ///< Phi theta_hat - kappa s - mu dx (unsaturated)
    Vec2 base;       ///< Phi theta_hat - mu dx
    Vec2 omega;      ///< -beta Phi^T s
    Vec2 s;          ///< dx + alpha e
    Vec2 e;          ///< sum of potential gradients
    Vec2 de;         ///< time derivative of e
    Mat2 phi;        ///< regressor
};

/**
 * @brief Adaptive law for one agent.
 *
 * Only kinematic parameters of `kinematics` are read; the mass estimate is theta_hat.
 * Throws SingularConfiguration or OutOfDomain.
 */
AdaptiveCommand adaptive_control(const JointState& joint, const TaskState& task,
                                 std::span<const NeighborState> neighbors, const Vec2& theta_hat,
                                 const AdaptiveGains& gains, const RobotModel& kinematics,
                                 const PotentialSpec& spec);

/// Smooth componentwise projection of the adaptation rate omega.
Vec2 project_theta_dot(const Vec2& theta_hat, const Vec2& omega, const AdaptiveGains& gains);

struct SaturatedWrench {
    Vec2 wrench;
    std::array<bool, 2> saturated{false, false};
};

/// Componentwise clamp to [-f_bar, f_bar].
SaturatedWrench saturate_output_feedback(const Vec2& f_hat, const ActuationLimits& limits);

struct AdaptiveSaturation {
    Vec2 wrench;
    double kappa_eff = 0.0;
    /// Component k could not carry base - kappa s within its limit.
    std::array<bool, 2> saturated{false, false};
    /// base alone exceeded a limit and was hard-clamped.
    bool base_saturated = false;
};

/**
 * @brief Applies base - kappa_eff s with the largest kappa_eff in (0, kappa] that
 * fits every component limit.
 */
AdaptiveSaturation saturate_adaptive(const Vec2& base, const Vec2& s, double kappa,
                                     const ActuationLimits& limits);

}  // namespace coordsim

#endif  // COORDSIM_CONTROLLERS_HPP
