#pragma once

#include <filesystem>

#include "lcbayes/audit.hpp"
#include "lcbayes/config.hpp"

namespace lcb::runner {

struct RunResult {
  // 0 all pass, 1 audit failure, 2 configuration error, 3 numerical failure
  int exit_code = 0;
  std::vector<audit::AuditReport> reports;
  std::vector<std::string> failures;
};

// Executes every experiment, writes the artifacts and the manifest into
// cfg.out_dir, and returns the aggregate outcome.
RunResult run(const config::RunConfig& cfg);

// Long-format CSV for external plotting; warns and writes nothing when the
// report set is empty.
void emit_plot_data(const std::vector<audit::AuditReport>& reports,
                    const std::filesystem::path& path);

}  // namespace lcb::runner
