#include "shapegrad/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace shapegrad {

namespace {

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << content;
    if (!f) throw std::runtime_error("write failed for " + path.string());
}

} // namespace

std::string history_to_csv(const std::vector<HistoryRecord>& history) {
    std::ostringstream out;
    out << "iter,objective,norm_felas,msh_quality\n";
    for (const auto& r : history)
        out << r.iter << "," << g17(r.objective) << "," << g17(r.norm_felas) << ","
            << g17(r.msh_quality) << "\n";
    return out.str();
}

SummaryRow summarize(const RunConfig& config, const OptResult& result) {
    SummaryRow row;
    row.label = config.label.empty() ? config.opt.metric.label() : config.label;
    row.A = config.opt.metric.kind == MetricKind::HS ? g17(config.opt.metric.A) : std::string("-");
    const auto& last = result.history.back();
    row.iterations = last.iter;
    row.objective = last.objective;
    row.grad_norm = last.norm_felas;
    row.quality = last.msh_quality;
    row.reason = to_string(result.reason);
    return row;
}

std::string summary_table(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    out << "metric A kbar objective grad_norm_l2 msh_quality reason\n";
    for (const auto& r : rows) {
        out << r.label << " " << r.A << " " << r.iterations << " " << g17(r.objective) << " "
            << g17(r.grad_norm) << " " << g17(r.quality) << " ";
        for (char c : r.reason) out << (c == ' ' ? '_' : c);
        out << "\n";
    }
    return out.str();
}

OptResult run_single(const RunConfig& config, std::ostream& log) {
    const std::filesystem::path dir(config.out_dir);
    std::filesystem::create_directories(dir);

    const TriMesh mesh0 = make_mesh(config);
    log << "[" << config.label << "] mesh: " << mesh0.vertex_count() << " vertices, "
        << mesh0.triangle_count() << " triangles\n";

    OptResult result = steepest_descent(mesh0, config.opt);
    const auto& last = result.history.back();
    log << "[" << config.label << "] " << to_string(result.reason) << " at iteration " << last.iter
        << ", J = " << g17(last.objective) << ", |V| = " << g17(last.norm_felas)
        << ", quality = " << g17(last.msh_quality) << "\n";

    write_file(dir / "history.csv", history_to_csv(result.history));
    save_mesh(result.final_mesh, (dir / "final.mesh").string());
    write_file(dir / "summary.txt", summary_table({summarize(config, result)}));
    return result;
}

std::vector<OptResult> run_compare(const std::vector<RunConfig>& configs, const std::string& out_dir,
                                   std::ostream& log) {
    if (configs.empty()) throw std::invalid_argument("compare: empty config list");
    std::set<std::string> labels;
    for (const auto& c : configs)
        if (!labels.insert(c.label.empty() ? c.opt.metric.label() : c.label).second)
            throw std::invalid_argument("compare: duplicate label '" + c.label + "'");

    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);

    std::vector<OptResult> results;
    std::vector<SummaryRow> rows;
    for (const auto& c : configs) {
        const std::string label = c.label.empty() ? c.opt.metric.label() : c.label;
        const TriMesh mesh0 = make_mesh(c);
        log << "[" << label << "] mesh: " << mesh0.vertex_count() << " vertices, "
            << mesh0.triangle_count() << " triangles\n";
        OptResult result = steepest_descent(mesh0, c.opt);
        const auto& last = result.history.back();
        log << "[" << label << "] " << to_string(result.reason) << " at iteration " << last.iter
            << ", J = " << g17(last.objective) << "\n";
        write_file(dir / ("history_" + label + ".csv"), history_to_csv(result.history));
        save_mesh(result.final_mesh, (dir / ("final_" + label + ".mesh")).string());
        rows.push_back(summarize(c, result));
        results.push_back(std::move(result));
    }
    write_file(dir / "summary.txt", summary_table(rows));
    return results;
}

} // namespace shapegrad
