#pragma once

#include <filesystem>

#include "hlmpc/orchestrator.hpp"

namespace hlmpc {

/// Writes summary.csv and the per-iteration files for every archived iteration.
/// Output bytes depend only on the run state. Throws std::runtime_error naming the path on I/O failure.
void emit_outputs(const Orchestrator& orch, const std::filesystem::path& out_dir, bool dump_learning);

}  // namespace hlmpc
