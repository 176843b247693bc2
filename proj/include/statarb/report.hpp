#pragma once

#include <string>
#include <vector>

#include "statarb/scenario.hpp"

namespace statarb {

struct ReportFormats {
    bool csv = true;
    bool structured = true;  // metrics.json
    bool plots = true;
};

// Writes the run artifacts into out_dir and returns the paths written.
// Every file is deterministic: same result -> identical bytes. CSV numbers
// print with %.12g; plots are self-contained static SVGs (equity vs baseline,
// monthly returns, per-symbol realized P&L).
std::vector<std::string> emit_report(const RunResult& result, const std::string& out_dir,
                                     const ReportFormats& formats = {});

// One flat CSV row per run (the scenario-3 sweep writes 28 of these), shaped
// for cross-run aggregation.
std::string write_run_table(const std::vector<RunResult>& results, const std::string& out_dir);

}  // namespace statarb
