#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shapegrad/config.hpp"
#include "shapegrad/runner.hpp"
#include "shapegrad/verify.hpp"

using namespace shapegrad;

namespace {

std::string label_from_path(const std::string& path) {
    auto base = path;
    if (const auto slash = base.find_last_of("/\\"); slash != std::string::npos)
        base = base.substr(slash + 1);
    if (const auto dot = base.find_last_of('.'); dot != std::string::npos) base = base.substr(0, dot);
    return base;
}

int cmd_run(const std::string& config_path, const std::string& out_override,
            const std::string& label) {
    RunConfig cfg = parse_config_file(config_path);
    if (!out_override.empty()) cfg.out_dir = out_override;
    cfg.label = label.empty() ? label_from_path(config_path) : label;
    run_single(cfg, std::cout);
    return 0;
}

int cmd_compare(const std::vector<std::string>& config_paths, const std::vector<std::string>& labels,
                const std::string& out_dir) {
    if (!labels.empty() && labels.size() != config_paths.size())
        throw std::invalid_argument("compare: --label count must match --config count");
    std::vector<RunConfig> cfgs;
    for (std::size_t i = 0; i < config_paths.size(); ++i) {
        RunConfig c = parse_config_file(config_paths[i]);
        c.label = i < labels.size() ? labels[i] : label_from_path(config_paths[i]);
        cfgs.push_back(std::move(c));
    }
    const std::string dir = out_dir.empty() ? (cfgs.empty() ? "." : cfgs.front().out_dir) : out_dir;
    run_compare(cfgs, dir, std::cout);
    return 0;
}

int cmd_verify(const std::string& config_path, bool corrupt_quadrature) {
    VerifyOptions opt;
    if (!config_path.empty()) {
        const RunConfig cfg = parse_config_file(config_path);
        opt.seed = cfg.seed;
        if (!cfg.mesh_file) opt.resolution = cfg.mesh_resolution;
    }
    opt.corrupt_quadrature = corrupt_quadrature;
    const auto checks = run_verification(opt);
    std::cout << format_checks(checks);
    int failures = 0;
    for (const auto& c : checks)
        if (!c.pass) ++failures;
    std::cout << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed")
              << "\n";
    return failures == 0 ? 0 : 1;
}

int cmd_mesh_gen(const std::string& config_path, const std::string& out_dir) {
    RunConfig cfg = config_path.empty() ? RunConfig{} : parse_config_file(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    const TriMesh mesh = make_mesh(cfg);
    const auto violations = validate_mesh(mesh);
    for (const auto& v : violations) std::cerr << v.format() << "\n";
    if (!violations.empty()) return 1;
    std::filesystem::create_directories(cfg.out_dir);
    const std::string path = cfg.out_dir + "/initial.mesh";
    save_mesh(mesh, path);
    const QualityReport q = mesh_quality(mesh);
    std::cout << path << ": " << mesh.vertex_count() << " vertices, " << mesh.triangle_count()
              << " triangles, min quality " << q.min_quality << "\n";
    return 0;
}

int cmd_mesh_check(const std::string& mesh_path) {
    const TriMesh mesh = load_mesh(mesh_path);
    const auto violations = validate_mesh(mesh);
    for (const auto& v : violations) std::cout << v.format() << "\n";
    const QualityReport q = mesh_quality(mesh);
    std::cout << mesh_path << ": " << mesh.vertex_count() << " vertices, " << mesh.triangle_count()
              << " triangles, " << violations.size() << " violation(s), min quality " << q.min_quality
              << " (triangle " << q.worst_triangle << ")\n";
    return violations.empty() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"PDE-constrained shape optimization on a moving hold-all mesh"};
    app.require_subcommand(1);

    std::string config_path, out_dir, label, mesh_path;
    std::vector<std::string> config_paths, labels;
    bool corrupt_quadrature = false;

    auto* run = app.add_subcommand("run", "run one optimization and write history/mesh/summary");
    run->add_option("--config", config_path, "config file")->required();
    run->add_option("--out", out_dir, "output directory (overrides out.dir)");
    run->add_option("--label", label, "run label for the summary row");

    auto* compare = app.add_subcommand("compare", "run several configs and write a combined summary");
    compare->add_option("--config", config_paths, "config files (repeatable)")->required();
    compare->add_option("--label", labels, "labels, one per config");
    compare->add_option("--out", out_dir, "output directory");

    auto* verify = app.add_subcommand("verify", "run the property suites and report pass/fail");
    verify->add_option("--config", config_path, "config file (seed and mesh resolution)");
    verify->add_flag("--corrupt-quadrature", corrupt_quadrature,
                     "negative control: break the derivative quadrature on purpose");

    auto* mesh_gen = app.add_subcommand("mesh-gen", "generate the initial mesh and write initial.mesh");
    mesh_gen->add_option("--config", config_path, "config file with mesh parameters");
    mesh_gen->add_option("--out", out_dir, "output directory");

    auto* mesh_check = app.add_subcommand("mesh-check", "validate a mesh file and report quality");
    mesh_check->add_option("file", mesh_path, "mesh file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, label);
        if (compare->parsed()) return cmd_compare(config_paths, labels, out_dir);
        if (verify->parsed()) return cmd_verify(config_path, corrupt_quadrature);
        if (mesh_gen->parsed()) return cmd_mesh_gen(config_path, out_dir);
        if (mesh_check->parsed()) return cmd_mesh_check(mesh_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
