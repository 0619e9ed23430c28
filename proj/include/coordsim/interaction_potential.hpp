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

#ifndef COORDSIM_INTERACTION_POTENTIAL_HPP
#define COORDSIM_INTERACTION_POTENTIAL_HPP

#include "coordsim/robot_dynamics.hpp"

namespace coordsim {

/**
 * @brief Bounded link potential psi(d) = d^2 / (r^2 - d^2 + Q).
 *
 * All scalar functions take the squared distance s = d^2. Evaluating beyond
 * s = r^2 throws OutOfDomain: the link is broken at that point.
 */
struct PotentialSpec {
    double r = 1.0;
    double Q = 1.0;

    void validate() const;
};

double psi(double d_sq, const PotentialSpec& spec);
/// d psi / d(s).
double psi_prime(double d_sq, const PotentialSpec& spec);
/// d^2 psi / d(s)^2.
double psi_second(double d_sq, const PotentialSpec& spec);

/// Gradient of psi(||x_i - x_j||) with respect to x_i.
Vec2 grad_i(const Vec2& x_i, const Vec2& x_j, const PotentialSpec& spec);
/// Hessian of psi with respect to x_ij = x_i - x_j.
Mat2 hessian(const Vec2& x_ij, const PotentialSpec& spec);

/// sup of psi_prime on [0, r^2].
double sigma(const PotentialSpec& spec);
/// Upper bound on the Hessian eigenvalues on the closed disc of radius r.
double nu(const PotentialSpec& spec);
double psi_at_r(const PotentialSpec& spec);

}  // namespace coordsim

#endif  // COORDSIM_INTERACTION_POTENTIAL_HPP
