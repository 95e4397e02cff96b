#pragma once

#include "figkit/config.hpp"

namespace figkit {

// Subcommand bodies shared by the CLI and the integration tests. Each writes
// its outputs plus the fully-resolved config under config.output_root and
// returns a process exit code (0 ok, 2 setup/IO failure, 1 fatal).
int run_synthesize(const PipelineConfig& config);
int run_render(const PipelineConfig& config);
int run_curate(const PipelineConfig& config);
int run_evaluate(const PipelineConfig& config);
// Re-aggregates a finished evaluate run from its persisted verdicts.
int run_report(const std::string& run_dir, const std::string& out_dir);

// One JSON object per event on stderr.
void log_event(const std::string& event,
               const std::vector<std::pair<std::string, std::string>>& fields = {});

}  // namespace figkit
