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

#ifndef COORDSIM_ROBOT_DYNAMICS_HPP
#define COORDSIM_ROBOT_DYNAMICS_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <numbers>

namespace coordsim {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Smallest Jacobian singular value accepted before a configuration counts as singular.
inline constexpr double kSingularityTol = 1e-3;

enum class MassModel {
    /// Each link's mass is concentrated at its distal joint (elbow, end effector).
    PointMassAtTip,
};

/**
 * @brief Physical parameters of a planar two-revolute-joint manipulator.
 *
 * The base sits at the task-space origin. Gravity acts along -y of the task plane;
 * set grav = 0 for an arm moving in a horizontal plane.
 */
struct RobotModel {
    double m1 = 0.5;
    double m2 = 0.5;
    double l1 = 1.0;
    double l2 = 1.0;
    double grav = 9.81;
    MassModel mass_model = MassModel::PointMassAtTip;

    /// Throws InvalidArgument unless masses and lengths are strictly positive.
    void validate() const;

    /// Dynamic parameter vector entering the linear parameterization: [m1, m2].
    Vec2 theta() const { return {m1, m2}; }
};

struct JointState {
    Vec2 q = Vec2::Zero();
    Vec2 dq = Vec2::Zero();
};

struct TaskState {
    Vec2 x = Vec2::Zero();
    Vec2 dx = Vec2::Zero();
};

/// Task-space inertia, Coriolis matrix and gravity wrench.
struct TaskSpaceTerms {
    Mat2 M = Mat2::Zero();
    Mat2 C = Mat2::Zero();
    Vec2 g = Vec2::Zero();
};

/// Box of joint configurations over which model bounds are certified.
struct JointRegion {
    double q1_min = -std::numbers::pi;
    double q1_max = std::numbers::pi;
    double q2_min = std::numbers::pi / 12.0;
    double q2_max = 11.0 * std::numbers::pi / 12.0;
    /// Also sample the mirrored elbow configurations q2 -> -q2.
    bool mirror_q2 = true;
};

/**
 * @brief Sampled model bounds with the safety margin already applied.
 *
 * Lower bounds are deflated and upper bounds inflated by `margin`.
 */
struct DynamicBounds {
    double lambda1_star = 0.0;  ///< min eigenvalue of the task-space inertia
    double lambda2_star = 0.0;  ///< max eigenvalue of the task-space inertia
    double c = 0.0;             ///< Coriolis bound, ||C* y|| <= c ||dx|| ||y||
    Vec2 gamma = Vec2::Zero();  ///< per-component bound on |g*|
    double lambda1 = 0.0;       ///< min eigenvalue of the joint-space inertia
    double lambda2 = 0.0;       ///< max eigenvalue of the joint-space inertia
    double manip_floor = 0.0;   ///< smallest Jacobian singular value seen
    double margin = 0.1;
    std::size_t n_samples = 0;  ///< configurations evaluated (mirrors included)
};

Mat2 mass_matrix(const Vec2& q, const RobotModel& model);
Mat2 coriolis_matrix(const Vec2& q, const Vec2& dq, const RobotModel& model);
Vec2 gravity_vector(const Vec2& q, const RobotModel& model);
double potential_energy(const Vec2& q, const RobotModel& model);
double kinetic_energy(const JointState& state, const RobotModel& model);

Vec2 forward_kinematics(const Vec2& q, const RobotModel& model);
Mat2 jacobian(const Vec2& q, const RobotModel& model);
Mat2 jacobian_dot(const Vec2& q, const Vec2& dq, const RobotModel& model);
double min_singular_value(const Mat2& J);
TaskState task_state(const JointState& state, const RobotModel& model);

/// Task-space terms J^-T M J^-1, J^-T (C - M J^-1 Jdot) J^-1 and J^-T g.
/// Throws SingularConfiguration when the smallest singular value of J is below kSingularityTol.
TaskSpaceTerms task_space_terms(const Vec2& q, const Vec2& dq, const RobotModel& model);

/// Joint acceleration M^-1 (J^T f - C dq - g) for a task-space wrench f.
Vec2 forward_dynamics(const JointState& state, const Vec2& f_task, const RobotModel& model);

/**
 * @brief Regressor Phi with Phi * [m1, m2] = M*(-alpha de) + C*(-alpha e) + g*.
 *
 * Only the kinematic parameters (lengths, gravity) of `model` are read.
 */
Mat2 regressor(const Vec2& q, const Vec2& dq, const Vec2& e, const Vec2& de, double alpha,
               const RobotModel& model);

/// Estimates DynamicBounds on `region` from Halton samples with a 10% margin.
/// Throws RegionContainsSingularity when the region reaches a kinematic singularity.
DynamicBounds estimate_bounds(const RobotModel& model, const JointRegion& region,
                              std::size_t n_samples);

}  // namespace coordsim

#endif  // COORDSIM_ROBOT_DYNAMICS_HPP
