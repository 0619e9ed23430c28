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

#include "coordsim/interaction_potential.hpp"

#include "coordsim/errors.hpp"

#include <cmath>
#include <string>

namespace coordsim {

namespace {

void check_domain(double d_sq, const PotentialSpec& spec) {
    if (!(d_sq >= 0.0) || d_sq > spec.r * spec.r) {
        throw OutOfDomain("squared distance " + std::to_string(d_sq) +
                          " outside [0, r^2] with r = " + std::to_string(spec.r));
    }
}

}  // namespace

void PotentialSpec::validate() const {
    if (!(r > 0.0)) throw InvalidArgument("communication radius r must be positive");
    if (!(Q > 0.0)) throw InvalidArgument("potential shape constant Q must be positive");
}

double psi(double d_sq, const PotentialSpec& spec) {
    check_domain(d_sq, spec);
    return d_sq / (spec.r * spec.r - d_sq + spec.Q);
}

double psi_prime(double d_sq, const PotentialSpec& spec) {
    check_domain(d_sq, spec);
    const double a = spec.r * spec.r + spec.Q;
    const double den = a - d_sq;
    return a / (den * den);
}

double psi_second(double d_sq, const PotentialSpec& spec) {
    check_domain(d_sq, spec);
    const double a = spec.r * spec.r + spec.Q;
    const double den = a - d_sq;
    return 2.0 * a / (den * den * den);
}

Vec2 grad_i(const Vec2& x_i, const Vec2& x_j, const PotentialSpec& spec) {
    const Vec2 x_ij = x_i - x_j;
    return 2.0 * psi_prime(x_ij.squaredNorm(), spec) * x_ij;
}

Mat2 hessian(const Vec2& x_ij, const PotentialSpec& spec) {
    const double s = x_ij.squaredNorm();
    return 2.0 * psi_prime(s, spec) * Mat2::Identity() +
           4.0 * psi_second(s, spec) * x_ij * x_ij.transpose();
}

double sigma(const PotentialSpec& spec) {
    return (spec.r * spec.r + spec.Q) / (spec.Q * spec.Q);
}

double nu(const PotentialSpec& spec) {
    const double a = spec.r * spec.r + spec.Q;
    const double Q = spec.Q;
    return 2.0 * a / (Q * Q) + 8.0 * spec.r * spec.r * a / (Q * Q * Q);
}

double psi_at_r(const PotentialSpec& spec) { return spec.r * spec.r / spec.Q; }

}  // namespace coordsim
