#include "shapegrad/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace shapegrad {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

[[noreturn]] void config_error(const std::string& origin, const std::string& what) {
    throw std::invalid_argument("config error (" + origin + "): " + what);
}

double parse_double(const std::string& origin, const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        config_error(origin, "key '" + key + "': expected a number, got '" + v + "'");
    }
}

long parse_int(const std::string& origin, const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        config_error(origin, "key '" + key + "': expected an integer, got '" + v + "'");
    }
}

const std::set<std::string> kKnownKeys = {
    "mesh.radius", "mesh.center_x", "mesh.center_y", "mesh.box", "mesh.resolution", "mesh.file",
    "metric.kind", "metric.s", "metric.A", "metric.mu_min", "metric.mu_max", "metric.lambda",
    "opt.step", "opt.max_iter", "opt.window", "opt.tol", "opt.update", "opt.geodesic_steps",
    "out.dir", "seed"};

} // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    bool generator_key_seen = false;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            config_error(origin, "line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (kKnownKeys.find(key) == kKnownKeys.end())
            config_error(origin, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (value.empty())
            config_error(origin, "key '" + key + "': empty value");

        if (key == "mesh.radius") { cfg.mesh_radius = parse_double(origin, key, value); generator_key_seen = true; }
        else if (key == "mesh.center_x") { cfg.mesh_center.x = parse_double(origin, key, value); generator_key_seen = true; }
        else if (key == "mesh.center_y") { cfg.mesh_center.y = parse_double(origin, key, value); generator_key_seen = true; }
        else if (key == "mesh.box") { cfg.mesh_box = parse_double(origin, key, value); generator_key_seen = true; }
        else if (key == "mesh.resolution") { cfg.mesh_resolution = static_cast<int>(parse_int(origin, key, value)); generator_key_seen = true; }
        else if (key == "mesh.file") cfg.mesh_file = value;
        else if (key == "metric.kind") {
            const std::string k = lower(value);
            if (k == "sp") cfg.opt.metric.kind = MetricKind::SP;
            else if (k == "hs") cfg.opt.metric.kind = MetricKind::HS;
            else config_error(origin, "key 'metric.kind': expected 'sp' or 'hs', got '" + value + "'");
        }
        else if (key == "metric.s") cfg.opt.metric.s = static_cast<int>(parse_int(origin, key, value));
        else if (key == "metric.A") cfg.opt.metric.A = parse_double(origin, key, value);
        else if (key == "metric.mu_min") cfg.opt.metric.mu_min = parse_double(origin, key, value);
        else if (key == "metric.mu_max") cfg.opt.metric.mu_max = parse_double(origin, key, value);
        else if (key == "metric.lambda") cfg.opt.metric.lambda = parse_double(origin, key, value);
        else if (key == "opt.step") cfg.opt.step_size = parse_double(origin, key, value);
        else if (key == "opt.max_iter") cfg.opt.max_iterations = static_cast<int>(parse_int(origin, key, value));
        else if (key == "opt.window") cfg.opt.stop_window = static_cast<int>(parse_int(origin, key, value));
        else if (key == "opt.tol") cfg.opt.stop_tol = parse_double(origin, key, value);
        else if (key == "opt.update") {
            const std::string k = lower(value);
            if (k == "retraction") cfg.opt.update = UpdateRule::Retraction;
            else if (k == "geodesic") cfg.opt.update = UpdateRule::Geodesic;
            else config_error(origin, "key 'opt.update': expected 'retraction' or 'geodesic', got '" + value + "'");
        }
        else if (key == "opt.geodesic_steps") cfg.opt.geodesic_substeps = static_cast<int>(parse_int(origin, key, value));
        else if (key == "out.dir") cfg.out_dir = value;
        else if (key == "seed") cfg.seed = static_cast<unsigned long>(parse_int(origin, key, value));
    }

    if (cfg.mesh_file && generator_key_seen)
        config_error(origin, "exactly one mesh source: remove either mesh.file or the mesh generator keys");
    if (!cfg.mesh_file) {
        if (!(cfg.mesh_radius > 0.0)) config_error(origin, "key 'mesh.radius': must be positive");
        if (!(cfg.mesh_box > 0.0)) config_error(origin, "key 'mesh.box': must be positive");
        if (cfg.mesh_resolution < 4) config_error(origin, "key 'mesh.resolution': must be >= 4");
    }
    try {
        cfg.opt.check();
    } catch (const std::invalid_argument& e) {
        // map parameter names back onto config keys for the diagnostic
        std::string what = e.what();
        auto rewrite = [&](const char* from, const char* to) {
            const auto pos = what.find(from);
            if (pos != std::string::npos) what.replace(pos, std::string(from).size(), to);
        };
        rewrite("MetricSpec: s", "metric.s");
        rewrite("MetricSpec: A", "metric.A");
        rewrite("MetricSpec: mu_min and mu_max", "metric.mu_min/metric.mu_max");
        rewrite("MetricSpec: mu_min", "metric.mu_min");
        rewrite("OptConfig: step_size", "opt.step");
        rewrite("OptConfig: stop_window", "opt.window");
        rewrite("OptConfig: stop_tol", "opt.tol");
        rewrite("OptConfig: max_iterations", "opt.max_iter");
        rewrite("OptConfig: geodesic_substeps", "opt.geodesic_steps");
        config_error(origin, what);
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("config error: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), path);
}

TriMesh make_mesh(const RunConfig& config) {
    if (config.mesh_file) return load_mesh(*config.mesh_file);
    return generate_circle_in_box(config.mesh_radius, config.mesh_center, config.mesh_box,
                                  config.mesh_resolution);
}

} // namespace shapegrad
