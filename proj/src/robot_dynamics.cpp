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

#include "coordsim/robot_dynamics.hpp"

#include "coordsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace coordsim {

namespace {

// Mass-parameterized pieces. The RobotModel passed here may carry zero masses
// (regressor basis models), so none of these validate.
Mat2 inertia(const Vec2& q, const RobotModel& m) {
    const double c2 = std::cos(q[1]);
    const double m12 = m.m2 * (m.l2 * m.l2 + m.l1 * m.l2 * c2);
    Mat2 M;
    M << m.m1 * m.l1 * m.l1 + m.m2 * (m.l1 * m.l1 + m.l2 * m.l2 + 2.0 * m.l1 * m.l2 * c2), m12,
        m12, m.m2 * m.l2 * m.l2;
    return M;
}

Mat2 coriolis(const Vec2& q, const Vec2& dq, const RobotModel& m) {
    const double h = -m.m2 * m.l1 * m.l2 * std::sin(q[1]);
    Mat2 C;
    C << h * dq[1], h * (dq[0] + dq[1]),
        -h * dq[0], 0.0;
    return C;
}

Vec2 gravity(const Vec2& q, const RobotModel& m) {
    const double c1 = std::cos(q[0]);
    const double c12 = std::cos(q[0] + q[1]);
    return {(m.m1 + m.m2) * m.grav * m.l1 * c1 + m.m2 * m.grav * m.l2 * c12,
            m.m2 * m.grav * m.l2 * c12};
}

TaskSpaceTerms task_terms_unchecked(const Vec2& q, const Vec2& dq, const RobotModel& m) {
    const Mat2 J = jacobian(q, m);
    const Mat2 J_inv = J.inverse();
    const Mat2 J_inv_T = J_inv.transpose();
    const Mat2 M = inertia(q, m);
    TaskSpaceTerms out;
    out.M = J_inv_T * M * J_inv;
    out.C = J_inv_T * (coriolis(q, dq, m) - M * J_inv * jacobian_dot(q, dq, m)) * J_inv;
    out.g = J_inv_T * gravity(q, m);
    return out;
}

void require_nonsingular(const Mat2& J) {
    const double sv = min_singular_value(J);
    if (!(sv >= kSingularityTol)) {
        throw SingularConfiguration("Jacobian smallest singular value " + std::to_string(sv) +
                                    " below tolerance");
    }
}

RobotModel basis_model(const RobotModel& model, int k) {
    RobotModel basis = model;
    basis.m1 = (k == 0) ? 1.0 : 0.0;
    basis.m2 = (k == 1) ? 1.0 : 0.0;
    return basis;
}

double halton(std::size_t index, std::size_t base) {
    double f = 1.0;
    double r = 0.0;
    while (index > 0) {
        f /= static_cast<double>(base);
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

double spectral_norm(const Mat2& A) {
    return std::sqrt(std::max(0.0, Eigen::SelfAdjointEigenSolver<Mat2>(A.transpose() * A)
                                       .eigenvalues()[1]));
}

}  // namespace

void RobotModel::validate() const {
    if (!(m1 > 0.0 && m2 > 0.0)) throw InvalidArgument("robot link masses must be positive");
    if (!(l1 > 0.0 && l2 > 0.0)) throw InvalidArgument("robot link lengths must be positive");
    if (!std::isfinite(grav)) throw InvalidArgument("gravity must be finite");
}

Mat2 mass_matrix(const Vec2& q, const RobotModel& model) { return inertia(q, model); }

Mat2 coriolis_matrix(const Vec2& q, const Vec2& dq, const RobotModel& model) {
    return coriolis(q, dq, model);
}

Vec2 gravity_vector(const Vec2& q, const RobotModel& model) { return gravity(q, model); }

double potential_energy(const Vec2& q, const RobotModel& model) {
    const double y1 = model.l1 * std::sin(q[0]);
    const double y2 = y1 + model.l2 * std::sin(q[0] + q[1]);
    return model.grav * (model.m1 * y1 + model.m2 * y2);
}

double kinetic_energy(const JointState& state, const RobotModel& model) {
    return 0.5 * state.dq.dot(inertia(state.q, model) * state.dq);
}

Vec2 forward_kinematics(const Vec2& q, const RobotModel& model) {
    const double q12 = q[0] + q[1];
    return {model.l1 * std::cos(q[0]) + model.l2 * std::cos(q12),
            model.l1 * std::sin(q[0]) + model.l2 * std::sin(q12)};
}

Mat2 jacobian(const Vec2& q, const RobotModel& model) {
    const double s1 = std::sin(q[0]), c1 = std::cos(q[0]);
    const double s12 = std::sin(q[0] + q[1]), c12 = std::cos(q[0] + q[1]);
    Mat2 J;
    J << -model.l1 * s1 - model.l2 * s12, -model.l2 * s12,
        model.l1 * c1 + model.l2 * c12, model.l2 * c12;
    return J;
}

Mat2 jacobian_dot(const Vec2& q, const Vec2& dq, const RobotModel& model) {
    const double s1 = std::sin(q[0]), c1 = std::cos(q[0]);
    const double s12 = std::sin(q[0] + q[1]), c12 = std::cos(q[0] + q[1]);
    const double w12 = dq[0] + dq[1];
    Mat2 Jd;
    Jd << -model.l1 * c1 * dq[0] - model.l2 * c12 * w12, -model.l2 * c12 * w12,
        -model.l1 * s1 * dq[0] - model.l2 * s12 * w12, -model.l2 * s12 * w12;
    return Jd;
}

double min_singular_value(const Mat2& J) {
    return Eigen::JacobiSVD<Mat2>(J).singularValues()[1];
}

TaskState task_state(const JointState& state, const RobotModel& model) {
    return {forward_kinematics(state.q, model), jacobian(state.q, model) * state.dq};
}

TaskSpaceTerms task_space_terms(const Vec2& q, const Vec2& dq, const RobotModel& model) {
    require_nonsingular(jacobian(q, model));
    return task_terms_unchecked(q, dq, model);
}

Vec2 forward_dynamics(const JointState& state, const Vec2& f_task, const RobotModel& model) {
    const Vec2 rhs = jacobian(state.q, model).transpose() * f_task -
                     coriolis(state.q, state.dq, model) * state.dq - gravity(state.q, model);
    return inertia(state.q, model).llt().solve(rhs);
}

Mat2 regressor(const Vec2& q, const Vec2& dq, const Vec2& e, const Vec2& de, double alpha,
               const RobotModel& model) {
    require_nonsingular(jacobian(q, model));
    Mat2 phi;
    for (int k = 0; k < 2; ++k) {
        const TaskSpaceTerms t = task_terms_unchecked(q, dq, basis_model(model, k));
        phi.col(k) = t.M * (-alpha * de) + t.C * (-alpha * e) + t.g;
    }
    return phi;
}

DynamicBounds estimate_bounds(const RobotModel& model, const JointRegion& region,
                              std::size_t n_samples) {
    model.validate();
    if (region.q1_min > region.q1_max || region.q2_min > region.q2_max) {
        throw InvalidArgument("joint region bounds are inverted");
    }
    if (n_samples == 0) throw InvalidArgument("bound estimation needs at least one sample");

    // sin(q2) = 0 is the only singular set of the planar two-link arm.
    const double k_lo = std::ceil(region.q2_min / std::numbers::pi);
    if (k_lo * std::numbers::pi <= region.q2_max) {
        throw RegionContainsSingularity("joint region contains q2 = " +
                                        std::to_string(k_lo * std::numbers::pi));
    }

    std::vector<Vec2> configs;
    configs.reserve(2 * (n_samples + 4));
    auto push = [&](double q1, double q2) {
        configs.emplace_back(q1, q2);
        if (region.mirror_q2) configs.emplace_back(q1, -q2);
    };
    for (double q1 : {region.q1_min, region.q1_max}) {
        for (double q2 : {region.q2_min, region.q2_max}) push(q1, q2);
    }
    for (std::size_t i = 1; i <= n_samples; ++i) {
        push(region.q1_min + halton(i, 2) * (region.q1_max - region.q1_min),
             region.q2_min + halton(i, 3) * (region.q2_max - region.q2_min));
    }

    constexpr int kDirections = 32;
    double lam1s = INFINITY, lam2s = 0.0, lam1 = INFINITY, lam2 = 0.0;
    double c = 0.0, manip = INFINITY;
    Vec2 gamma = Vec2::Zero();
    for (const Vec2& q : configs) {
        const Mat2 J = jacobian(q, model);
        const double sv = min_singular_value(J);
        if (sv < kSingularityTol) {
            throw RegionContainsSingularity("sample q = (" + std::to_string(q[0]) + ", " +
                                            std::to_string(q[1]) + ") is singular");
        }
        manip = std::min(manip, sv);

        const Eigen::Vector2d joint_eigs =
            Eigen::SelfAdjointEigenSolver<Mat2>(inertia(q, model)).eigenvalues();
        lam1 = std::min(lam1, joint_eigs[0]);
        lam2 = std::max(lam2, joint_eigs[1]);

        const TaskSpaceTerms rest = task_terms_unchecked(q, Vec2::Zero(), model);
        const Eigen::Vector2d task_eigs = Eigen::SelfAdjointEigenSolver<Mat2>(rest.M).eigenvalues();
        lam1s = std::min(lam1s, task_eigs[0]);
        lam2s = std::max(lam2s, task_eigs[1]);
        gamma = gamma.cwiseMax(rest.g.cwiseAbs());

        // C* is linear in dx, so unit task velocities over a half circle suffice.
        const Mat2 J_inv = J.inverse();
        for (int d = 0; d < kDirections; ++d) {
            const double phi = std::numbers::pi * d / kDirections;
            const Vec2 dq = J_inv * Vec2(std::cos(phi), std::sin(phi));
            c = std::max(c, spectral_norm(task_terms_unchecked(q, dq, model).C));
        }
    }

    DynamicBounds b;
    b.margin = 0.1;
    b.n_samples = configs.size();
    b.lambda1_star = lam1s * (1.0 - b.margin);
    b.lambda2_star = lam2s * (1.0 + b.margin);
    b.c = c * (1.0 + b.margin);
    b.gamma = gamma * (1.0 + b.margin);
    b.lambda1 = lam1 * (1.0 - b.margin);
    b.lambda2 = lam2 * (1.0 + b.margin);
    b.manip_floor = manip * (1.0 - b.margin);
    return b;
}

}  // namespace coordsim
