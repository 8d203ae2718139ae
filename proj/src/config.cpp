#include "tdgl2d/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tdgl {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

[[noreturn]] void fail_line(int line, const std::string& msg) {
    throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& v, int line, const std::string& key) {
    size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        fail_line(line, "value of '" + key + "' is not a number: '" + v + "'");
    }
    if (pos != v.size()) fail_line(line, "trailing characters in value of '" + key + "': '" + v + "'");
    return x;
}

int parse_int(const std::string& v, int line, const std::string& key) {
    size_t pos = 0;
    int x = 0;
    try {
        x = std::stoi(v, &pos);
    } catch (const std::exception&) {
        fail_line(line, "value of '" + key + "' is not an integer: '" + v + "'");
    }
    if (pos != v.size()) fail_line(line, "trailing characters in value of '" + key + "': '" + v + "'");
    return x;
}

bool parse_bool(const std::string& v, int line, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail_line(line, "value of '" + key + "' is not a boolean: '" + v + "'");
}

std::pair<double, double> parse_pair(const std::string& v, int line, const std::string& key) {
    auto toks = split_ws(v);
    if (toks.size() != 2) fail_line(line, "'" + key + "' needs two numbers, got '" + v + "'");
    return {parse_double(toks[0], line, key), parse_double(toks[1], line, key)};
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

double parse_mesh_size(const std::string& token) {
    const size_t slash = token.find('/');
    try {
        if (slash != std::string::npos) {
            size_t pa = 0, pb = 0;
            const std::string na = token.substr(0, slash), nb = token.substr(slash + 1);
            const double a = std::stod(na, &pa);
            const double b = std::stod(nb, &pb);
            if (pa != na.size() || pb != nb.size() || b == 0.0)
                throw ConfigError("bad mesh size fraction '" + token + "'");
            return a / b;
        }
        size_t pos = 0;
        const double x = std::stod(token, &pos);
        if (pos != token.size()) throw ConfigError("bad mesh size '" + token + "'");
        return x;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("bad mesh size '" + token + "'");
    }
}

void validate_config(const RunConfig& cfg) {
    if (cfg.levels.empty()) throw ConfigError("study.levels: at least one mesh size is required");
    for (size_t i = 0; i < cfg.levels.size(); ++i) {
        if (!(cfg.levels[i] > 0.0))
            throw ConfigError("study.levels: mesh sizes must be positive");
        if (i > 0 && !(cfg.levels[i] < cfg.levels[i - 1]))
            throw ConfigError("study.levels: mesh sizes must be strictly decreasing");
    }
    if (!(cfg.tau_factor > 0.0)) throw ConfigError("study.tau_factor: must be positive");
    if (!(cfg.t_final > 0.0)) throw ConfigError("study.t_final: must be positive");
    if (!(cfg.eta > 0.0)) throw ConfigError("study.eta: must be positive");
    if (!(cfg.kappa > 0.0)) throw ConfigError("study.kappa: must be positive");
    for (double h : cfg.levels) {
        const double tau = cfg.tau_factor * h;
        if (!(tau < cfg.eta))
            throw ConfigError("study.tau_factor: step tau = " + fmt(tau) + " at h = " + fmt(h) +
                              " must stay below study.eta = " + fmt(cfg.eta));
    }
    if (!(cfg.newton_tolerance > 0.0) || cfg.newton_tolerance > 1e-6)
        throw ConfigError("newton.tolerance: must lie in (0, 1e-6]");
    if (cfg.newton_max_iterations < 1 || cfg.newton_max_iterations > 200)
        throw ConfigError("newton.max_iterations: must lie in [1, 200]");
    if (cfg.vtk_stride < 0) throw ConfigError("output.vtk_stride: must be non-negative");
    if (cfg.output_directory.empty()) throw ConfigError("output.directory: must not be empty");
    if (cfg.domain.kind == DomainKind::LShapeWithHole) {
        if (!(cfg.domain.hole_min_x < cfg.domain.hole_max_x))
            throw ConfigError("domain.hole_min/hole_max: hole x-extent is empty");
        if (!(cfg.domain.hole_min_y < cfg.domain.hole_max_y))
            throw ConfigError("domain.hole_min/hole_max: hole y-extent is empty");
    }
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const size_t hash = raw.find_first_of("#;");
        std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail_line(line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section != "domain" && section != "study" && section != "newton" &&
                section != "output")
                fail_line(line, "unknown section '" + section + "'");
            continue;
        }
        const size_t eq = s.find('=');
        if (eq == std::string::npos) fail_line(line, "expected 'key = value'");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (section.empty()) fail_line(line, "key '" + key + "' outside any section");
        if (key.empty()) fail_line(line, "empty key");
        if (val.empty()) fail_line(line, "empty value for '" + key + "'");
        const std::string qual = section + "." + key;

        if (section == "domain") {
            if (key == "kind") {
                if (val == "l_shape_with_hole")
                    cfg.domain.kind = DomainKind::LShapeWithHole;
                else if (val == "l_shape")
                    cfg.domain.kind = DomainKind::LShape;
                else if (val == "square")
                    cfg.domain.kind = DomainKind::Square;
                else
                    fail_line(line, "domain.kind: unknown value '" + val + "'");
            } else if (key == "hole_min") {
                auto [x, y] = parse_pair(val, line, qual);
                cfg.domain.hole_min_x = x;
                cfg.domain.hole_min_y = y;
            } else if (key == "hole_max") {
                auto [x, y] = parse_pair(val, line, qual);
                cfg.domain.hole_max_x = x;
                cfg.domain.hole_max_y = y;
            } else {
                fail_line(line, "unknown key '" + qual + "'");
            }
        } else if (section == "study") {
            if (key == "scheme") {
                if (val == "mixed")
                    cfg.scheme = Scheme::Mixed;
                else if (val == "galerkin")
                    cfg.scheme = Scheme::Galerkin;
                else
                    fail_line(line, "study.scheme: unknown value '" + val + "'");
            } else if (key == "scenario") {
                if (val == "mms")
                    cfg.scenario = ScenarioKind::Mms;
                else if (val == "physical")
                    cfg.scenario = ScenarioKind::Physical;
                else if (val == "homogeneous")
                    cfg.scenario = ScenarioKind::Homogeneous;
                else
                    fail_line(line, "study.scenario: unknown value '" + val + "'");
            } else if (key == "levels") {
                cfg.levels.clear();
                for (const auto& tok : split_ws(val)) {
                    try {
                        cfg.levels.push_back(parse_mesh_size(tok));
                    } catch (const ConfigError& err) {
                        fail_line(line, std::string("study.levels: ") + err.what());
                    }
                }
            } else if (key == "tau_factor") {
                cfg.tau_factor = parse_double(val, line, qual);
            } else if (key == "t_final") {
                cfg.t_final = parse_double(val, line, qual);
            } else if (key == "eta") {
                cfg.eta = parse_double(val, line, qual);
            } else if (key == "kappa") {
                cfg.kappa = parse_double(val, line, qual);
            } else if (key == "applied_field") {
                cfg.applied_field = parse_double(val, line, qual);
            } else {
                fail_line(line, "unknown key '" + qual + "'");
            }
        } else if (section == "newton") {
            if (key == "tolerance") {
                cfg.newton_tolerance = parse_double(val, line, qual);
            } else if (key == "max_iterations") {
                cfg.newton_max_iterations = parse_int(val, line, qual);
            } else {
                fail_line(line, "unknown key '" + qual + "'");
            }
        } else { // output
            if (key == "directory") {
                cfg.output_directory = val;
            } else if (key == "write_energy") {
                cfg.write_energy = parse_bool(val, line, qual);
            } else if (key == "write_errors") {
                cfg.write_errors = parse_bool(val, line, qual);
            } else if (key == "write_vtk") {
                cfg.write_vtk = parse_bool(val, line, qual);
            } else if (key == "vtk_stride") {
                cfg.vtk_stride = parse_int(val, line, qual);
            } else if (key == "deterministic") {
                cfg.deterministic = parse_bool(val, line, qual);
            } else {
                fail_line(line, "unknown key '" + qual + "'");
            }
        }
    }
    validate_config(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "[domain]\n";
    out << "kind = "
        << (cfg.domain.kind == DomainKind::LShapeWithHole ? "l_shape_with_hole"
            : cfg.domain.kind == DomainKind::LShape       ? "l_shape"
                                                          : "square")
        << "\n";
    out << "hole_min = " << fmt(cfg.domain.hole_min_x) << " " << fmt(cfg.domain.hole_min_y) << "\n";
    out << "hole_max = " << fmt(cfg.domain.hole_max_x) << " " << fmt(cfg.domain.hole_max_y) << "\n";
    out << "\n[study]\n";
    out << "scheme = " << (cfg.scheme == Scheme::Mixed ? "mixed" : "galerkin") << "\n";
    out << "scenario = "
        << (cfg.scenario == ScenarioKind::Mms        ? "mms"
            : cfg.scenario == ScenarioKind::Physical ? "physical"
                                                 : "homogeneous")
        << "\n";
    out << "levels =";
    for (double h : cfg.levels) out << " " << fmt(h);
    out << "\n";
    out << "tau_factor = " << fmt(cfg.tau_factor) << "\n";
    out << "t_final = " << fmt(cfg.t_final) << "\n";
    out << "eta = " << fmt(cfg.eta) << "\n";
    out << "kappa = " << fmt(cfg.kappa) << "\n";
    out << "applied_field = " << fmt(cfg.applied_field) << "\n";
    out << "\n[newton]\n";
    out << "tolerance = " << fmt(cfg.newton_tolerance) << "\n";
    out << "max_iterations = " << cfg.newton_max_iterations << "\n";
    out << "\n[output]\n";
    out << "directory = " << cfg.output_directory << "\n";
    out << "write_energy = " << (cfg.write_energy ? "true" : "false") << "\n";
    out << "write_errors = " << (cfg.write_errors ? "true" : "false") << "\n";
    out << "write_vtk = " << (cfg.write_vtk ? "true" : "false") << "\n";
    out << "vtk_stride = " << cfg.vtk_stride << "\n";
    out << "deterministic = " << (cfg.deterministic ? "true" : "false") << "\n";
    return out.str();
}

} // namespace tdgl
