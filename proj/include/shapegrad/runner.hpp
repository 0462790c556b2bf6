#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "shapegrad/config.hpp"
#include "shapegrad/optimizer.hpp"

namespace shapegrad {

/// history.csv payload: exactly the columns iter,objective,norm_felas,
/// msh_quality with '.' decimals, 17 significant digits and LF endings.
std::string history_to_csv(const std::vector<HistoryRecord>& history);

struct SummaryRow {
    std::string label;   // metric label
    std::string A;       // "-" for SP
    int iterations = 0;  // last iterate index k-bar
    double objective = 0.0;
    double grad_norm = 0.0;
    double quality = 0.0;
    std::string reason;
};

SummaryRow summarize(const RunConfig& config, const OptResult& result);
std::string summary_table(const std::vector<SummaryRow>& rows);

/// Executes one configured optimization and writes history.csv, final.mesh
/// and summary.txt into the output directory. Returns the result for
/// further inspection.
OptResult run_single(const RunConfig& config, std::ostream& log);

/// Runs each config, writing history_<label>.csv and final_<label>.mesh per
/// run plus one combined summary.txt. Labels must be distinct and the list
/// nonempty.
std::vector<OptResult> run_compare(const std::vector<RunConfig>& configs, const std::string& out_dir,
                                   std::ostream& log);

} // namespace shapegrad
