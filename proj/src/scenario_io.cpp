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

#include "coordsim/scenario_io.hpp"

#include "coordsim/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

namespace coordsim {

namespace {

// Recursive descent over + - * / ( ) numbers and the constant pi.
// A number directly followed by "pi" or "(" multiplies, so "5pi/12" works.
class ExprParser {
public:
    explicit ExprParser(std::string_view s) : s_(s) {}

    double parse() {
        const double v = sum();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw InvalidArgument("bad expression '" + std::string(s_) + "': " + what);
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    double sum() {
        double v = product();
        for (;;) {
            if (eat('+')) {
                v += product();
            } else if (eat('-')) {
                v -= product();
            } else {
                return v;
            }
        }
    }

    double product() {
        double v = unary();
        for (;;) {
            if (eat('*')) {
                v *= unary();
            } else if (eat('/')) {
                v /= unary();
            } else {
                return v;
            }
        }
    }

    double unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return implicit();
    }

    double implicit() {
        double v = atom();
        for (;;) {
            skip_ws();
            if (s_.substr(pos_, 2) == "pi" || (pos_ < s_.size() && s_[pos_] == '(')) {
                v *= atom();
            } else {
                return v;
            }
        }
    }

    double atom() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end");
        if (eat('(')) {
            const double v = sum();
            if (!eat(')')) fail("missing ')'");
            return v;
        }
        if (s_.substr(pos_, 2) == "pi") {
            pos_ += 2;
            return std::numbers::pi;
        }
        const std::string rest(s_.substr(pos_));
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(rest, &used);
        } catch (const std::exception&) {
            fail("expected a number");
        }
        // stod accepts "inf" and "nan"; physical inputs never need them.
        if (!std::isfinite(v)) fail("non-finite value");
        pos_ += used;
        return v;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t k = 0; k <= s.size(); ++k) {
        if (k == s.size() || s[k] == sep) {
            parts.push_back(s.substr(start, k - start));
            start = k + 1;
        }
    }
    return parts;
}

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

using Section = std::map<std::string, Entry>;

const std::map<std::string, std::set<std::string>> kFields{
    {"robots", {"count", "m1", "m2", "l1", "l2", "grav", "q0", "dq0"}},
    {"network", {"r", "eps"}},
    {"potential", {"Q"}},
    {"controller", {"type", "rho", "kappa", "zeta", "mu", "beta", "alpha", "delta", "theta_lo",
                    "theta_hi", "theta_hat0"}},
    {"limits", {"f_bar"}},
    {"bounds", {"q1_min", "q1_max", "q2_min", "q2_max", "samples"}},
    {"sim", {"dt", "t_end", "log_stride", "converge_tol", "converge_hold", "seed", "csv", "events"}},
};

class Reader {
public:
    Reader(std::map<std::string, Section>& sections, std::map<std::string, int>& header_line)
        : sections_(sections), header_line_(header_line) {}

    bool has(const std::string& sec, const std::string& key) const {
        auto s = sections_.find(sec);
        return s != sections_.end() && s->second.count(key) != 0;
    }

    Entry& entry(const std::string& sec, const std::string& key) {
        auto s = sections_.find(sec);
        if (s == sections_.end()) throw ParseError(0, sec, "missing section [" + sec + "]");
        auto e = s->second.find(key);
        if (e == s->second.end()) {
            throw ParseError(header_line_[sec], sec + "." + key, "missing required field");
        }
        e->second.used = true;
        return e->second;
    }

    template <typename F>
    auto convert(const std::string& sec, const std::string& key, F&& f) {
        Entry& e = entry(sec, key);
        try {
            return f(e.value);
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& ex) {
            throw ParseError(e.line, sec + "." + key, ex.what());
        }
    }

    double scalar(const std::string& sec, const std::string& key) {
        return convert(sec, key, [](const std::string& v) { return eval_expression(v); });
    }

    double scalar_or(const std::string& sec, const std::string& key, double fallback) {
        return has(sec, key) ? scalar(sec, key) : fallback;
    }

    std::string text_or(const std::string& sec, const std::string& key, std::string fallback) {
        if (!has(sec, key)) return fallback;
        return entry(sec, key).value;
    }

    std::size_t count(const std::string& sec, const std::string& key) {
        return convert(sec, key, [](const std::string& v) {
            const double d = eval_expression(v);
            if (d < 1.0 || d != std::floor(d)) throw InvalidArgument("expected a positive integer");
            return static_cast<std::size_t>(d);
        });
    }

    std::vector<double> per_robot(const std::string& sec, const std::string& key, std::size_t n) {
        return convert(sec, key, [n](const std::string& v) {
            const auto m = parse_matrix(v);
            std::vector<double> flat;
            for (const auto& row : m) flat.insert(flat.end(), row.begin(), row.end());
            const bool is_vector = m.size() == 1 || std::all_of(m.begin(), m.end(), [](const auto& r) {
                                       return r.size() == 1;
                                   });
            if (flat.size() == 1) return std::vector<double>(n, flat[0]);
            if (flat.size() == n && is_vector) return flat;
            throw InvalidArgument("expected a scalar or " + std::to_string(n) + " values");
        });
    }

    std::vector<Vec2> per_robot_vec2(const std::string& sec, const std::string& key,
                                     std::size_t n) {
        return convert(sec, key, [n](const std::string& v) {
            const auto m = parse_matrix(v);
            if (m.size() == 1 && m[0].size() == 1) {
                return std::vector<Vec2>(n, Vec2(m[0][0], m[0][0]));
            }
            if (m.size() == 1 && m[0].size() == 2) {
                return std::vector<Vec2>(n, Vec2(m[0][0], m[0][1]));
            }
            if (m.size() == n && std::all_of(m.begin(), m.end(),
                                             [](const auto& r) { return r.size() == 2; })) {
                std::vector<Vec2> out;
                for (const auto& r : m) out.emplace_back(r[0], r[1]);
                return out;
            }
            throw InvalidArgument("expected [a, b] or " + std::to_string(n) +
                                  " rows of two values");
        });
    }

    void reject_unused() const {
        for (const auto& [sec, entries] : sections_) {
            for (const auto& [key, e] : entries) {
                if (!e.used) throw ParseError(e.line, sec + "." + key, "unknown field");
            }
        }
    }

private:
    std::map<std::string, Section>& sections_;
    std::map<std::string, int>& header_line_;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& v) {
    bool same = std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
    if (same) return fmt(v.front());
    std::string s = "[";
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "; " : "") + fmt(v[k]);
    return s + "]";
}

std::string fmt_vec2(const std::vector<Vec2>& v) {
    std::string s = "[";
    for (std::size_t k = 0; k < v.size(); ++k) {
        s += (k ? "; " : "") + fmt(v[k][0]) + ", " + fmt(v[k][1]);
    }
    return s + "]";
}

template <typename T, typename F>
std::vector<double> collect(const std::vector<T>& items, F&& f) {
    std::vector<double> out;
    for (const auto& it : items) out.push_back(f(it));
    return out;
}

}  // namespace

double eval_expression(std::string_view text) {
    text = trim(text);
    if (text.empty()) throw InvalidArgument("empty value");
    return ExprParser(text).parse();
}

std::vector<std::vector<double>> parse_matrix(std::string_view text) {
    text = trim(text);
    if (text.empty()) throw InvalidArgument("empty value");
    if (text.front() != '[') return {{eval_expression(text)}};
    if (text.back() != ']') throw InvalidArgument("missing ']'");
    text = text.substr(1, text.size() - 2);
    std::vector<std::vector<double>> rows;
    for (std::string_view row : split(text, ';')) {
        std::vector<double> vals;
        for (std::string_view cell : split(row, ',')) vals.push_back(eval_expression(cell));
        if (!rows.empty() && vals.size() != rows.front().size()) {
            throw InvalidArgument("rows of unequal length");
        }
        rows.push_back(std::move(vals));
    }
    return rows;
}

ScenarioFile parse_scenario(std::istream& in, std::string name) {
    std::map<std::string, Section> sections;
    std::map<std::string, int> header_line;
    std::string current;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.find('=') == std::string_view::npos) {
            if (line.back() != ']') throw ParseError(line_no, "", "unterminated section header");
            current = std::string(trim(line.substr(1, line.size() - 2)));
            if (!kFields.count(current)) throw ParseError(line_no, current, "unknown section");
            if (sections.count(current)) throw ParseError(line_no, current, "duplicate section");
            sections[current];
            header_line[current] = line_no;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "", "expected key = value");
        if (current.empty()) throw ParseError(line_no, "", "field outside any section");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ParseError(line_no, current, "empty key");
        if (value.empty()) throw ParseError(line_no, current + "." + key, "empty value");
        if (!kFields.at(current).count(key)) {
            throw ParseError(line_no, current + "." + key, "unknown field");
        }
        if (sections[current].count(key)) {
            throw ParseError(line_no, current + "." + key, "duplicate field");
        }
        sections[current][key] = Entry{value, line_no, false};
    }

    Reader rd(sections, header_line);
    ScenarioFile file;
    file.name = std::move(name);
    Scenario& sc = file.scenario;

    const std::size_t n = rd.count("robots", "count");
    const auto m1 = rd.per_robot("robots", "m1", n);
    const auto m2 = rd.per_robot("robots", "m2", n);
    const auto l1 = rd.per_robot("robots", "l1", n);
    const auto l2 = rd.per_robot("robots", "l2", n);
    const auto grav = rd.has("robots", "grav") ? rd.per_robot("robots", "grav", n)
                                               : std::vector<double>(n, 9.81);
    const auto q0 = rd.per_robot_vec2("robots", "q0", n);
    const auto dq0 = rd.has("robots", "dq0") ? rd.per_robot_vec2("robots", "dq0", n)
                                             : std::vector<Vec2>(n, Vec2::Zero());
    for (std::size_t i = 0; i < n; ++i) {
        RobotModel m;
        m.m1 = m1[i];
        m.m2 = m2[i];
        m.l1 = l1[i];
        m.l2 = l2[i];
        m.grav = grav[i];
        sc.models.push_back(m);
        sc.initial.push_back({q0[i], dq0[i]});
    }

    sc.potential.r = rd.scalar("network", "r");
    sc.eps = rd.scalar("network", "eps");
    sc.potential.Q = rd.scalar("potential", "Q");

    const std::string type = rd.entry("controller", "type").value;
    if (type == "output_feedback") {
        OutputFeedbackSetup of;
        file.rho_given = rd.has("controller", "rho");
        const auto rho = file.rho_given ? rd.per_robot("controller", "rho", n)
                                        : std::vector<double>(n, 1.0);
        const auto kappa = rd.per_robot("controller", "kappa", n);
        const auto zeta = rd.per_robot("controller", "zeta", n);
        for (std::size_t i = 0; i < n; ++i) of.gains.push_back({rho[i], kappa[i], zeta[i]});
        sc.controller = of;
    } else if (type == "adaptive") {
        AdaptiveSetup ad;
        const AdaptiveGains defaults;
        const auto kappa = rd.per_robot("controller", "kappa", n);
        const auto mu = rd.per_robot("controller", "mu", n);
        const auto beta = rd.per_robot("controller", "beta", n);
        const auto alpha = rd.per_robot("controller", "alpha", n);
        const auto delta = rd.has("controller", "delta") ? rd.per_robot("controller", "delta", n)
                                                         : std::vector<double>(n, defaults.delta);
        const auto lo = rd.has("controller", "theta_lo")
                            ? rd.per_robot_vec2("controller", "theta_lo", n)
                            : std::vector<Vec2>(n, defaults.theta_lo);
        const auto hi = rd.has("controller", "theta_hi")
                            ? rd.per_robot_vec2("controller", "theta_hi", n)
                            : std::vector<Vec2>(n, defaults.theta_hi);
        for (std::size_t i = 0; i < n; ++i) {
            ad.gains.push_back({kappa[i], mu[i], beta[i], alpha[i], delta[i], lo[i], hi[i]});
        }
        if (rd.has("controller", "theta_hat0")) {
            ad.theta_hat0 = rd.per_robot_vec2("controller", "theta_hat0", n);
        }
        sc.controller = ad;
    } else {
        throw ParseError(rd.entry("controller", "type").line, "controller.type",
                         "expected output_feedback or adaptive, got '" + type + "'");
    }

    for (const Vec2& f : rd.per_robot_vec2("limits", "f_bar", n)) sc.limits.push_back({f});

    file.region.q1_min = rd.scalar_or("bounds", "q1_min", file.region.q1_min);
    file.region.q1_max = rd.scalar_or("bounds", "q1_max", file.region.q1_max);
    file.region.q2_min = rd.scalar_or("bounds", "q2_min", file.region.q2_min);
    file.region.q2_max = rd.scalar_or("bounds", "q2_max", file.region.q2_max);
    if (rd.has("bounds", "samples")) file.bound_samples = rd.count("bounds", "samples");

    sc.dt = rd.scalar_or("sim", "dt", sc.kind() == ControllerKind::Adaptive ? 5e-3 : 1e-3);
    sc.t_end = rd.scalar_or("sim", "t_end", sc.t_end);
    if (rd.has("sim", "log_stride")) sc.log_stride = rd.count("sim", "log_stride");
    sc.converge_tol = rd.scalar_or("sim", "converge_tol", sc.converge_tol);
    sc.converge_hold = rd.scalar_or("sim", "converge_hold", sc.converge_hold);
    sc.seed = static_cast<std::uint64_t>(rd.scalar_or("sim", "seed", 0.0));
    file.csv_name = rd.text_or("sim", "csv", file.csv_name);
    file.events_name = rd.text_or("sim", "events", file.events_name);

    rd.reject_unused();

    // Semantic checks, reported against the field that carries the value.
    auto field_check = [&](const std::string& sec, const std::string& key, auto&& fn) {
        try {
            fn();
        } catch (const Error& ex) {
            const int line = sections[sec].count(key) ? sections[sec][key].line : header_line[sec];
            throw ParseError(line, sec + "." + key, ex.what());
        }
    };
    for (const auto& m : sc.models) field_check("robots", "m1", [&] { m.validate(); });
    field_check("network", "r", [&] {
        if (!(sc.potential.r > 0.0)) throw InvalidArgument("need r > 0");
    });
    field_check("potential", "Q", [&] { sc.potential.validate(); });
    field_check("network", "eps", [&] {
        if (!(sc.eps > 0.0 && sc.eps < sc.potential.r)) {
            throw InvalidArgument("need 0 < eps < r");
        }
    });
    for (const auto& l : sc.limits) field_check("limits", "f_bar", [&] { l.validate(); });
    field_check("controller", "type", [&] { sc.validate(); });
    return file;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open scenario file " + path.string());
    return parse_scenario(in, path.stem().string());
}

void write_scenario(std::ostream& out, const ScenarioFile& file) {
    const Scenario& sc = file.scenario;
    out << "# " << file.name << "\n\n[robots]\n";
    out << "count = " << sc.n_agents() << "\n";
    out << "m1 = " << fmt_list(collect(sc.models, [](const auto& m) { return m.m1; })) << "\n";
    out << "m2 = " << fmt_list(collect(sc.models, [](const auto& m) { return m.m2; })) << "\n";
    out << "l1 = " << fmt_list(collect(sc.models, [](const auto& m) { return m.l1; })) << "\n";
    out << "l2 = " << fmt_list(collect(sc.models, [](const auto& m) { return m.l2; })) << "\n";
    out << "grav = " << fmt_list(collect(sc.models, [](const auto& m) { return m.grav; }))
        << "\n";
    std::vector<Vec2> q0, dq0;
    for (const auto& s : sc.initial) {
        q0.push_back(s.q);
        dq0.push_back(s.dq);
    }
    out << "q0 = " << fmt_vec2(q0) << "\n";
    out << "dq0 = " << fmt_vec2(dq0) << "\n\n";

    out << "[network]\nr = " << fmt(sc.potential.r) << "\neps = " << fmt(sc.eps) << "\n\n";
    out << "[potential]\nQ = " << fmt(sc.potential.Q) << "\n\n[controller]\n";
    if (const auto* of = std::get_if<OutputFeedbackSetup>(&sc.controller)) {
        out << "type = output_feedback\n";
        if (file.rho_given) {
            out << "rho = " << fmt_list(collect(of->gains, [](const auto& g) { return g.rho; }))
                << "\n";
        }
        out << "kappa = " << fmt_list(collect(of->gains, [](const auto& g) { return g.kappa; }))
            << "\n";
        out << "zeta = " << fmt_list(collect(of->gains, [](const auto& g) { return g.zeta; }))
            << "\n";
    } else {
        const auto& ad = std::get<AdaptiveSetup>(sc.controller);
        out << "type = adaptive\n";
        out << "kappa = " << fmt_list(collect(ad.gains, [](const auto& g) { return g.kappa; }))
            << "\n";
        out << "mu = " << fmt_list(collect(ad.gains, [](const auto& g) { return g.mu; })) << "\n";
        out << "beta = " << fmt_list(collect(ad.gains, [](const auto& g) { return g.beta; }))
            << "\n";
        out << "alpha = " << fmt_list(collect(ad.gains, [](const auto& g) { return g.alpha; }))
            << "\n";
        out << "delta = " << fmt_list(collect(ad.gains, [](const auto& g) { return g.delta; }))
            << "\n";
        std::vector<Vec2> lo, hi;
        for (const auto& g : ad.gains) {
            lo.push_back(g.theta_lo);
            hi.push_back(g.theta_hi);
        }
        out << "theta_lo = " << fmt_vec2(lo) << "\n";
        out << "theta_hi = " << fmt_vec2(hi) << "\n";
        if (!ad.theta_hat0.empty()) out << "theta_hat0 = " << fmt_vec2(ad.theta_hat0) << "\n";
    }
    std::vector<Vec2> f_bar;
    for (const auto& l : sc.limits) f_bar.push_back(l.f_bar);
    out << "\n[limits]\nf_bar = " << fmt_vec2(f_bar) << "\n\n";

    out << "[bounds]\nq1_min = " << fmt(file.region.q1_min) << "\nq1_max = "
        << fmt(file.region.q1_max) << "\nq2_min = " << fmt(file.region.q2_min)
        << "\nq2_max = " << fmt(file.region.q2_max) << "\nsamples = " << file.bound_samples
        << "\n\n";

    out << "[sim]\ndt = " << fmt(sc.dt) << "\nt_end = " << fmt(sc.t_end)
        << "\nlog_stride = " << sc.log_stride << "\nconverge_tol = " << fmt(sc.converge_tol)
        << "\nconverge_hold = " << fmt(sc.converge_hold) << "\nseed = " << sc.seed
        << "\ncsv = " << file.csv_name << "\nevents = " << file.events_name << "\n";
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::vector<std::string> csv_header(const TrajectoryLog& log) {
    static const char* const kAgentCols[] = {"q1", "q2", "dq1", "dq2", "x1",
                                             "x2", "f1", "f2", "sat1", "sat2"};
    std::vector<std::string> cols{"t"};
    for (std::size_t i = 0; i < log.n_agents; ++i) {
        for (const char* c : kAgentCols) cols.push_back("r" + std::to_string(i) + "_" + c);
    }
    for (const Edge& e : log.edges) {
        cols.push_back("d_" + std::to_string(e.i) + "_" + std::to_string(e.j));
    }
    cols.push_back("V");
    return cols;
}

void write_csv(std::ostream& out, const TrajectoryLog& log) {
    const auto cols = csv_header(log);
    for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
    out << "\n";
    for (const LogSample& row : log.samples) {
        out << fmt(row.t);
        for (const AgentSample& a : row.agents) {
            out << ',' << fmt(a.q[0]) << ',' << fmt(a.q[1]) << ',' << fmt(a.dq[0]) << ','
                << fmt(a.dq[1]) << ',' << fmt(a.x[0]) << ',' << fmt(a.x[1]) << ','
                << fmt(a.wrench[0]) << ',' << fmt(a.wrench[1]) << ',' << int(a.saturated[0])
                << ',' << int(a.saturated[1]);
        }
        for (double d : row.edge_distance) out << ',' << fmt(d);
        out << ',' << (std::isnan(row.V) ? std::string("nan") : fmt(row.V)) << "\n";
    }
}

nlohmann::json events_json(const TrajectoryLog& log, std::string_view scenario_name) {
    using nlohmann::json;
    json j;
    j["schema_version"] = 1;
    j["scenario"] = std::string(scenario_name);
    j["controller"] = log.kind == ControllerKind::OutputFeedback ? "output_feedback" : "adaptive";
    j["n_agents"] = log.n_agents;
    j["edges"] = json::array();
    for (const Edge& e : log.edges) j["edges"].push_back({e.i, e.j});
    j["events"] = json::array();
    for (const SimEvent& ev : log.events) {
        json e{{"kind", std::string(to_string(ev.kind))}, {"t", ev.t}, {"value", ev.value}};
        if (ev.edge) e["edge"] = {ev.edge->i, ev.edge->j};
        if (ev.agent) e["agent"] = *ev.agent;
        j["events"].push_back(e);
    }
    const RunSummary& s = log.summary;
    json sum{{"steps", s.steps},
             {"t_final", s.t_final},
             {"final_coordination_error", s.final_coordination_error},
             {"max_edge_distance", s.max_edge_distance},
             {"V_initial", s.V_initial},
             {"V_max", s.V_max},
             {"v_violations", s.v_violations},
             {"link_broken", s.link_broken},
             {"singular", s.singular},
             {"saturation_count", s.saturation_count},
             {"base_saturation_count", s.base_saturation_count},
             {"theta_clamps", s.theta_clamps}};
    sum["converged_at"] = s.converged_at ? json(*s.converged_at) : json(nullptr);
    j["summary"] = sum;
    return j;
}

nlohmann::json bounds_to_json(const DynamicBounds& b) {
    return {{"lambda1_star", b.lambda1_star}, {"lambda2_star", b.lambda2_star},
            {"c", b.c},
            {"gamma", {b.gamma[0], b.gamma[1]}},
            {"lambda1", b.lambda1},           {"lambda2", b.lambda2},
            {"manip_floor", b.manip_floor},   {"margin", b.margin},
            {"n_samples", b.n_samples}};
}

DynamicBounds bounds_from_json(const nlohmann::json& j) {
    try {
        DynamicBounds b;
        b.lambda1_star = j.at("lambda1_star").get<double>();
        b.lambda2_star = j.at("lambda2_star").get<double>();
        b.c = j.at("c").get<double>();
        b.gamma = Vec2(j.at("gamma").at(0).get<double>(), j.at("gamma").at(1).get<double>());
        b.lambda1 = j.at("lambda1").get<double>();
        b.lambda2 = j.at("lambda2").get<double>();
        b.manip_floor = j.at("manip_floor").get<double>();
        b.margin = j.at("margin").get<double>();
        b.n_samples = j.at("n_samples").get<std::size_t>();
        return b;
    } catch (const nlohmann::json::exception& ex) {
        throw InvalidArgument(std::string("malformed bounds record: ") + ex.what());
    }
}

}  // namespace coordsim
