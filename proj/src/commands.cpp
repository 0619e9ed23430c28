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

#include "coordsim/commands.hpp"

#include "coordsim/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace coordsim {

namespace {

using nlohmann::json;

bool same_model(const RobotModel& a, const RobotModel& b) {
    return a.m1 == b.m1 && a.m2 == b.m2 && a.l1 == b.l1 && a.l2 == b.l2 && a.grav == b.grav &&
           a.mass_model == b.mass_model;
}

json model_json(const RobotModel& m) {
    return {{"m1", m.m1}, {"m2", m.m2}, {"l1", m.l1}, {"l2", m.l2}, {"grav", m.grav}};
}

json region_json(const ScenarioFile& f) {
    return {{"q1_min", f.region.q1_min}, {"q1_max", f.region.q1_max},
            {"q2_min", f.region.q2_min}, {"q2_max", f.region.q2_max},
            {"mirror_q2", f.region.mirror_q2}, {"samples", f.bound_samples}};
}

std::string num(double v, int digits = 6) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// Every subcommand maps library failures to exit 1 with a one-line diagnostic.
template <typename F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
    }
    return kExitError;
}

void require_runnable(const ScenarioFile& file) {
    if (!file.rho_given) {
        throw InvalidArgument("controller.rho is missing; run 'coordsim synthesize' first");
    }
}

std::vector<Vec2> initial_positions(const Scenario& sc) {
    std::vector<Vec2> x;
    for (std::size_t i = 0; i < sc.n_agents(); ++i) {
        x.push_back(forward_kinematics(sc.initial[i].q, sc.models[i]));
    }
    return x;
}

CommGraph initial_graph(const Scenario& sc) {
    return build_initial_graph(initial_positions(sc), sc.potential.r, sc.eps);
}

std::vector<DynamicBounds> bounds_for(const ScenarioFile& file,
                                      const std::optional<std::filesystem::path>& cache) {
    return cache ? load_bounds_cache(*cache, file) : scenario_bounds(file);
}

}  // namespace

std::vector<DynamicBounds> scenario_bounds(const ScenarioFile& file) {
    const auto& models = file.scenario.models;
    std::vector<DynamicBounds> out(models.size());
    for (std::size_t i = 0; i < models.size(); ++i) {
        bool reused = false;
        for (std::size_t j = 0; j < i && !reused; ++j) {
            if (same_model(models[i], models[j])) {
                out[i] = out[j];
                reused = true;
            }
        }
        if (!reused) out[i] = estimate_bounds(models[i], file.region, file.bound_samples);
    }
    return out;
}

std::vector<bool> initial_in_region(const ScenarioFile& file) {
    const JointRegion& reg = file.region;
    std::vector<bool> inside;
    for (const auto& s : file.scenario.initial) {
        const double q1 = std::remainder(s.q[0], 2.0 * std::numbers::pi);
        const double q2 = std::remainder(s.q[1], 2.0 * std::numbers::pi);
        const bool q1_ok = q1 >= reg.q1_min && q1 <= reg.q1_max;
        const bool q2_ok = (q2 >= reg.q2_min && q2 <= reg.q2_max) ||
                           (reg.mirror_q2 && -q2 >= reg.q2_min && -q2 <= reg.q2_max);
        inside.push_back(q1_ok && q2_ok);
    }
    return inside;
}

std::vector<Certificate> evaluate_certificates(const ScenarioFile& file,
                                               std::span<const DynamicBounds> bounds) {
    require_runnable(file);
    const Scenario& sc = file.scenario;
    const CommGraph graph = initial_graph(sc);
    if (const auto* of = std::get_if<OutputFeedbackSetup>(&sc.controller)) {
        return {check_eq4(of->gains, graph, sc.potential, bounds, sc.limits),
                check_eq8(sc.initial, sc.models, of->gains, graph, sc.potential)};
    }
    const auto& ad = std::get<AdaptiveSetup>(sc.controller);
    return {check_eq10(ad.gains, graph, sc.potential, bounds, sc.limits),
            check_eq12(sc.initial, sc.models, ad.gains, graph, sc.potential)};
}

json bounds_cache_json(const ScenarioFile& file, std::span<const DynamicBounds> bounds) {
    json robots = json::array();
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        robots.push_back({{"model", model_json(file.scenario.models[i])},
                          {"bounds", bounds_to_json(bounds[i])}});
    }
    return {{"region", region_json(file)}, {"robots", robots}};
}

std::vector<DynamicBounds> load_bounds_cache(const std::filesystem::path& path,
                                             const ScenarioFile& file) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open bounds cache " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw InvalidArgument("bounds cache " + path.string() + " is not JSON: " + ex.what());
    }
    if (!j.contains("region") || !j.contains("robots") || !j["robots"].is_array()) {
        throw InvalidArgument("bounds cache " + path.string() + " lacks region or robots");
    }
    if (j["region"] != region_json(file)) {
        throw InvalidArgument("bounds cache " + path.string() +
                              " was computed for a different region or sample count");
    }
    const auto& models = file.scenario.models;
    if (j["robots"].size() != models.size()) {
        throw InvalidArgument("bounds cache " + path.string() + " has the wrong robot count");
    }
    std::vector<DynamicBounds> out;
    for (std::size_t i = 0; i < models.size(); ++i) {
        const json& r = j["robots"][i];
        if (r.value("model", json()) != model_json(models[i])) {
            throw InvalidArgument("bounds cache " + path.string() + " robot " +
                                  std::to_string(i) + " has different parameters");
        }
        out.push_back(bounds_from_json(r.at("bounds")));
    }
    return out;
}

std::pair<double, double> parse_region(std::string_view text) {
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) throw InvalidArgument("region must be \"q2min,q2max\"");
    const double lo = eval_expression(text.substr(0, comma));
    const double hi = eval_expression(text.substr(comma + 1));
    if (!(lo <= hi)) throw InvalidArgument("region needs q2min <= q2max");
    return {lo, hi};
}

int cmd_check(const CheckOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() -> int {
        const ScenarioFile file = load_scenario(opt.scenario);
        require_runnable(file);
        const auto bounds = bounds_for(file, opt.bounds);
        const auto certs = evaluate_certificates(file, bounds);
        const auto inside = initial_in_region(file);

        bool certified = true;
        out << "scenario " << file.name << " controller="
            << (file.scenario.kind() == ControllerKind::OutputFeedback ? "output_feedback"
                                                                        : "adaptive")
            << " agents=" << file.scenario.n_agents() << "\n";
        out << "bounds q2=[" << num(file.region.q2_min) << ", " << num(file.region.q2_max)
            << "] samples=" << bounds.front().n_samples << " margin=" << bounds.front().margin
            << "\n";
        for (std::size_t i = 0; i < inside.size(); ++i) {
            if (!inside[i]) {
                out << "note robot " << i
                    << " starts outside the bound region; bounds are not certified for it\n";
            }
        }
        json report{{"scenario", file.name}, {"certificates", json::array()}};
        for (const Certificate& c : certs) {
            certified = certified && c.verdict;
            out << to_string(c.id) << " verdict=" << (c.verdict ? "true" : "false")
                << " min_margin=" << num(c.min_margin()) << " max_lhs="
                << num(*std::max_element(c.lhs.begin(), c.lhs.end()))
                << (c.strict ? " strict" : " non-strict") << "\n";
            report["certificates"].push_back(to_json(c));
        }
        out << "result " << (certified ? "CERTIFIED" : "UNCERTIFIED") << "\n";

        json b = json::array();
        for (const auto& x : bounds) b.push_back(bounds_to_json(x));
        report["bounds"] = b;
        report["initial_in_region"] = inside;
        report["certified"] = certified;
        if (opt.json) write_file_atomic(*opt.json, report.dump(2) + "\n");
        return certified ? kExitOk : kExitUncertified;
    });
}

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() -> int {
        ScenarioFile file = load_scenario(opt.scenario);
        require_runnable(file);
        Scenario& sc = file.scenario;
        if (opt.dt) sc.dt = *opt.dt;
        if (opt.t_end) sc.t_end = *opt.t_end;
        if (opt.log_stride) sc.log_stride = *opt.log_stride;
        sc.validate();

        const TrajectoryLog log = Simulator(sc).run();

        std::filesystem::create_directories(opt.out_dir);
        std::ostringstream csv;
        write_csv(csv, log);
        write_file_atomic(opt.out_dir / file.csv_name, csv.str());
        write_file_atomic(opt.out_dir / file.events_name,
                          events_json(log, file.name).dump(2) + "\n");

        const RunSummary& s = log.summary;
        const char* status = s.link_broken ? "link_break"
                             : s.singular  ? "singular"
                             : s.converged_at ? "converged"
                                              : "not_converged";
        out << "summary scenario=" << file.name << " status=" << status
            << " t_final=" << num(s.t_final) << " final_error=" << num(s.final_coordination_error)
            << " converged_at=" << (s.converged_at ? num(*s.converged_at) : std::string("none"))
            << " max_edge=" << num(s.max_edge_distance) << " v_violations=" << s.v_violations
            << " saturations=" << s.saturation_count << " events=" << log.events.size() << "\n";
        for (const SimEvent& ev : log.events) {
            out << "event " << to_string(ev.kind) << " t=" << num(ev.t);
            if (ev.edge) out << " edge=" << ev.edge->i << "-" << ev.edge->j;
            if (ev.agent) out << " agent=" << *ev.agent;
            out << " value=" << num(ev.value) << "\n";
        }
        if (s.link_broken) return kExitLinkBreak;
        if (s.singular) {
            err << "error: run stopped at a singular configuration\n";
            return kExitError;
        }
        return kExitOk;
    });
}

int cmd_bounds(const BoundsOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() -> int {
        ScenarioFile file = load_scenario(opt.scenario);
        if (opt.region) {
            file.region.q2_min = opt.region->first;
            file.region.q2_max = opt.region->second;
        }
        if (opt.samples) file.bound_samples = *opt.samples;
        const auto bounds = scenario_bounds(file);

        out << "region q1=[" << num(file.region.q1_min) << ", " << num(file.region.q1_max)
            << "] q2=[" << num(file.region.q2_min) << ", " << num(file.region.q2_max) << "]"
            << (file.region.mirror_q2 ? " mirrored" : "") << "\n";
        for (std::size_t i = 0; i < bounds.size(); ++i) {
            const DynamicBounds& b = bounds[i];
            out << "robot " << i << " samples=" << b.n_samples << " margin=" << b.margin
                << " lambda1=" << num(b.lambda1) << " lambda2=" << num(b.lambda2)
                << " lambda1_star=" << num(b.lambda1_star)
                << " lambda2_star=" << num(b.lambda2_star) << " c=" << num(b.c)
                << " gamma=[" << num(b.gamma[0]) << ", " << num(b.gamma[1]) << "]"
                << " manip_floor=" << num(b.manip_floor) << "\n";
        }
        std::filesystem::create_directories(opt.out_dir);
        const auto path = opt.out_dir / "bounds.json";
        write_file_atomic(path, bounds_cache_json(file, bounds).dump(2) + "\n");
        out << "wrote " << path.string() << "\n";
        return kExitOk;
    });
}

int cmd_synthesize(const SynthesizeOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() -> int {
        ScenarioFile file = load_scenario(opt.scenario);
        Scenario& sc = file.scenario;
        const auto* of = std::get_if<OutputFeedbackSetup>(&sc.controller);
        if (!of) throw InvalidArgument("synthesis needs an output_feedback controller");
        const auto bounds = bounds_for(file, opt.bounds);
        const CommGraph graph = initial_graph(sc);

        std::optional<std::vector<OutputFeedbackGains>> current;
        if (file.rho_given) current = of->gains;
        SynthesisSpace space;
        // The file's kappa and zeta are tried first even when rho is absent.
        space.zeta = of->gains.front().zeta;
        std::erase(space.kappa_candidates, of->gains.front().kappa);
        space.kappa_candidates.insert(space.kappa_candidates.begin(), of->gains.front().kappa);

        SynthesisResult res;
        try {
            res = synthesize_output_feedback_gains(sc.initial, sc.models, graph, sc.potential,
                                                   current, space, bounds, sc.limits);
        } catch (const SynthesisNotFound& ex) {
            err << "error: no certified gains found: " << ex.what() << "\n";
            return kExitSynthesisFailed;
        }

        sc.potential = res.spec;
        sc.controller = OutputFeedbackSetup{res.gains};
        file.rho_given = true;
        const std::string stem = opt.scenario.stem().string();
        file.name = stem + "_synth";

        std::filesystem::create_directories(opt.out_dir);
        const auto path = opt.out_dir / (file.name + ".ini");
        std::ostringstream text;
        write_scenario(text, file);
        write_file_atomic(path, text.str());

        out << (res.unchanged ? "unchanged" : "synthesized") << " Q=" << num(res.spec.Q, 17)
            << " rho=" << num(res.gains.front().rho, 17)
            << " kappa=" << num(res.gains.front().kappa, 17)
            << " zeta=" << num(res.gains.front().zeta, 17) << "\n";
        out << "EQ4 verdict=" << (res.eq4.verdict ? "true" : "false")
            << " min_margin=" << num(res.eq4.min_margin()) << "\n";
        out << "EQ8 verdict=" << (res.eq8.verdict ? "true" : "false")
            << " min_margin=" << num(res.eq8.min_margin()) << "\n";
        out << "wrote " << path.string() << "\n";
        return kExitOk;
    });
}

}  // namespace coordsim
