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

#ifndef COORDSIM_COMMANDS_HPP
#define COORDSIM_COMMANDS_HPP

#include "coordsim/certificates.hpp"
#include "coordsim/scenario_io.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

namespace coordsim {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitError = 1,
    kExitUncertified = 2,
    kExitLinkBreak = 3,
    kExitSynthesisFailed = 4,
};

/// Bounds for every robot of the file; identical models share one estimate.
std::vector<DynamicBounds> scenario_bounds(const ScenarioFile& file);

/// Whether each robot's initial configuration lies in the bound region.
std::vector<bool> initial_in_region(const ScenarioFile& file);

/// Certificates that apply to the configured controller, in report order.
std::vector<Certificate> evaluate_certificates(const ScenarioFile& file,
                                               std::span<const DynamicBounds> bounds);

nlohmann::json bounds_cache_json(const ScenarioFile& file, std::span<const DynamicBounds> bounds);

/// Reads a cache written by cmd_bounds; rejects caches made for other robots or regions.
std::vector<DynamicBounds> load_bounds_cache(const std::filesystem::path& path,
                                             const ScenarioFile& file);

struct CheckOptions {
    std::filesystem::path scenario;
    std::optional<std::filesystem::path> bounds;
    std::optional<std::filesystem::path> json;
};

struct RunOptions {
    std::filesystem::path scenario;
    std::filesystem::path out_dir = ".";
    std::optional<double> dt;
    std::optional<double> t_end;
    std::optional<std::size_t> log_stride;
};

struct BoundsOptions {
    std::filesystem::path scenario;
    std::filesystem::path out_dir = ".";
    std::optional<std::pair<double, double>> region;
    std::optional<std::size_t> samples;
};

struct SynthesizeOptions {
    std::filesystem::path scenario;
    std::filesystem::path out_dir = ".";
    std::optional<std::filesystem::path> bounds;
};

int cmd_check(const CheckOptions& opt, std::ostream& out, std::ostream& err);
int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err);
int cmd_bounds(const BoundsOptions& opt, std::ostream& out, std::ostream& err);
int cmd_synthesize(const SynthesizeOptions& opt, std::ostream& out, std::ostream& err);

/// Parses "q2min,q2max" with the scenario expression syntax.
std::pair<double, double> parse_region(std::string_view text);

}  // namespace coordsim

#endif  // COORDSIM_COMMANDS_HPP
