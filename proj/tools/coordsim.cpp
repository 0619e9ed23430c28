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

// coordsim: certificates and closed-loop runs for networks of planar two-link arms.

#include "coordsim/commands.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
    using namespace coordsim;

    CLI::App app{"Connectivity-preserving coordination of networked two-link manipulators"};
    app.require_subcommand(1);

    CheckOptions check;
    auto* c = app.add_subcommand("check", "Evaluate the sufficient conditions for a scenario");
    c->add_option("--scenario,scenario", check.scenario, "Scenario file")->required();
    c->add_option("--bounds", check.bounds, "Bounds cache written by 'bounds'");
    c->add_option("--json", check.json, "Write the machine-readable report here");

    RunOptions run;
    auto* r = app.add_subcommand("run", "Simulate a scenario and write CSV and events JSON");
    r->add_option("--scenario,scenario", run.scenario, "Scenario file")->required();
    r->add_option("--out", run.out_dir, "Output directory");
    r->add_option("--dt", run.dt, "Step size override (s)")->check(CLI::PositiveNumber);
    r->add_option("--t-end", run.t_end, "Horizon override (s)")->check(CLI::NonNegativeNumber);
    r->add_option("--log-stride", run.log_stride, "Log every N steps")->check(CLI::PositiveNumber);

    BoundsOptions bounds;
    std::string region;
    auto* b = app.add_subcommand("bounds", "Estimate model bounds and cache them to bounds.json");
    b->add_option("--scenario,scenario", bounds.scenario, "Scenario file")->required();
    b->add_option("--out", bounds.out_dir, "Output directory");
    b->add_option("--region", region, "Elbow range \"q2min,q2max\" (rad, expressions allowed)");
    b->add_option("--samples", bounds.samples, "Sample count")->check(CLI::PositiveNumber);

    SynthesizeOptions synth;
    auto* s = app.add_subcommand("synthesize", "Search output feedback gains that pass both checks");
    s->add_option("--scenario,scenario", synth.scenario, "Scenario file")->required();
    s->add_option("--out", synth.out_dir, "Directory for the derived scenario");
    s->add_option("--bounds", synth.bounds, "Bounds cache written by 'bounds'");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    if (*c) return cmd_check(check, std::cout, std::cerr);
    if (*r) return cmd_run(run, std::cout, std::cerr);
    if (*b) {
        if (!region.empty()) {
            try {
                bounds.region = parse_region(region);
            } catch (const std::exception& e) {
                std::cerr << "error: --region: " << e.what() << "\n";
                return kExitError;
            }
        }
        return cmd_bounds(bounds, std::cout, std::cerr);
    }
    return cmd_synthesize(synth, std::cout, std::cerr);
}
