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

#ifndef COORDSIM_CERTIFICATES_HPP
#define COORDSIM_CERTIFICATES_HPP

#include "coordsim/comm_graph.hpp"
#include "coordsim/controllers.hpp"
#include "coordsim/interaction_potential.hpp"
#include "coordsim/robot_dynamics.hpp"

#include "json.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coordsim {

enum class ConditionId {
    Eq4,       ///< output feedback actuation budget
    Eq8,       ///< output feedback initial energy
    Eq10,      ///< adaptive actuation budget
    Eq12,      ///< adaptive initial energy
    TwoAgent,  ///< double-integrator stopping distance
};

std::string_view to_string(ConditionId id);

/**
 * @brief One evaluated sufficient condition.
 *
 * Per-agent conditions store one lhs/rhs pair per (agent, component), agent-major.
 * Network-wide conditions store a single pair. `inputs` records every value the
 * evaluation used so the verdict can be replayed.
 */
struct Certificate {
    ConditionId id = ConditionId::Eq4;
    std::vector<double> lhs;
    std::vector<double> rhs;
    std::vector<double> margin;
    bool strict = true;
    bool verdict = false;
    nlohmann::json inputs;

    double min_margin() const;
};

nlohmann::json to_json(const Certificate& cert);

Certificate check_eq4(std::span<const OutputFeedbackGains> gains, const CommGraph& graph,
                      const PotentialSpec& spec, std::span<const DynamicBounds> bounds,
                      std::span<const ActuationLimits> limits);

Certificate check_eq8(std::span<const JointState> initial, std::span<const RobotModel> models,
                      std::span<const OutputFeedbackGains> gains, const CommGraph& graph,
                      const PotentialSpec& spec);

Certificate check_eq10(std::span<const AdaptiveGains> gains, const CommGraph& graph,
                       const PotentialSpec& spec, std::span<const DynamicBounds> bounds,
                       std::span<const ActuationLimits> limits);

/// Throws SingularConfiguration if an initial configuration is singular.
Certificate check_eq12(std::span<const JointState> initial, std::span<const RobotModel> models,
                       std::span<const AdaptiveGains> gains, const CommGraph& graph,
                       const PotentialSpec& spec);

/// (|v1| + |v2|)^2 < 2 (r - d0)(f1 + f2). Throws InvalidGeometry when d0 > r.
Certificate check_two_agent_feasibility(double v1, double v2, double d0, double r, double f_bar1,
                                        double f_bar2);

struct SynthesisSpace {
    std::vector<double> Q_candidates{0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0};
    std::vector<double> kappa_candidates{1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0};
    double zeta = 20.0;
    /// Chosen rho as a fraction of the largest rho the actuation budget admits.
    double rho_fraction = 0.9;
};

struct SynthesisResult {
    PotentialSpec spec;
    std::vector<OutputFeedbackGains> gains;
    Certificate eq4;
    Certificate eq8;
    /// The supplied gains already passed both checks and were returned as is.
    bool unchanged = false;
};

/**
 * @brief Finds output feedback gains that pass both output feedback certificates.
 *
 * Candidates are tried with the caller's Q, kappa, zeta first. For each (Q, kappa)
 * the admissible rho interval is solved in closed form and a uniform rho is
 * picked inside it. Throws SynthesisNotFound when gravity bounds already exceed
 * the limits or no candidate works.
 */
SynthesisResult synthesize_output_feedback_gains(
    std::span<const JointState> initial, std::span<const RobotModel> models,
    const CommGraph& graph, const PotentialSpec& spec,
    std::optional<std::vector<OutputFeedbackGains>> current, const SynthesisSpace& space,
    std::span<const DynamicBounds> bounds, std::span<const ActuationLimits> limits);

}  // namespace coordsim

#endif  // COORDSIM_CERTIFICATES_HPP
