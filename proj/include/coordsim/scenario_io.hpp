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

#ifndef COORDSIM_SCENARIO_IO_HPP
#define COORDSIM_SCENARIO_IO_HPP

#include "coordsim/robot_dynamics.hpp"
#include "coordsim/simulation.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace coordsim {

/**
 * @brief A parsed scenario file.
 *
 * Besides the runnable Scenario it carries the bound-estimation region and the
 * artifact names. A synthesis template may omit rho; `rho_given` is then false
 * and the scenario cannot be checked or run until gains are synthesized.
 */
struct ScenarioFile {
    Scenario scenario;
    JointRegion region{-std::numbers::pi, std::numbers::pi, std::numbers::pi / 6.0,
                       5.0 * std::numbers::pi / 6.0, true};
    std::size_t bound_samples = 4096;
    bool rho_given = true;
    std::string csv_name = "trajectory.csv";
    std::string events_name = "events.json";
    std::string name = "scenario";
};

/// Evaluates a scalar expression such as "-5pi/12", "0.5*pi" or "1e-3".
double eval_expression(std::string_view text);

/// Parses "[a, b; c, d]" (rows split by ';') or a bare scalar expression.
std::vector<std::vector<double>> parse_matrix(std::string_view text);

/// Throws ParseError with the offending line and field.
ScenarioFile parse_scenario(std::istream& in, std::string name = "scenario");
ScenarioFile load_scenario(const std::filesystem::path& path);

void write_scenario(std::ostream& out, const ScenarioFile& file);

/// Writes `content` to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::vector<std::string> csv_header(const TrajectoryLog& log);
void write_csv(std::ostream& out, const TrajectoryLog& log);
nlohmann::json events_json(const TrajectoryLog& log, std::string_view scenario_name);

nlohmann::json bounds_to_json(const DynamicBounds& b);
DynamicBounds bounds_from_json(const nlohmann::json& j);

}  // namespace coordsim

#endif  // COORDSIM_SCENARIO_IO_HPP
