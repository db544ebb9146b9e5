#pragma once

#include <set>
#include <vector>

#include "hlmpc/learning.hpp"

namespace hlmpc {

struct HighLevelPlan {
    std::vector<NodeId> path;             ///< path[0] is the current node
    std::vector<Capacity> predicted_caps;  ///< capacity at each path node under theta_hat
    int terminal_entry = -1;              ///< index into LearningStore::high_safe_set
    int objective = 0;
};

/// Thrown when no admissible plan exists.
class PlanningError : public InvariantError {
public:
    using InvariantError::InvariantError;
};

struct PlannerInputs {
    const TaskGraph& graph;
    const LearningStore& store;
    Capacity limits;
};

/// Exact depth-limited search over paths of at most `horizon` edges. Ties go to the
/// lexicographically smallest path, then to the lowest safe-set entry index.
HighLevelPlan solve_high_level(const HighLevelState& state, const std::set<NodeId>& visited, const PlannerInputs& in,
                               int horizon);

NodeId next_node(const HighLevelPlan& plan);

/// Drop the first edge and append the terminal entry's stored successor.
HighLevelPlan fallback_plan(const HighLevelPlan& prev, const Capacity& arrived_caps, const PlannerInputs& in);

/// First `horizon` edges of a stored iteration, terminated at that iteration's own safe-set entry.
HighLevelPlan replay_plan(const IterationRecord& rec, const PlannerInputs& in, int horizon);

/// The binary edge-selection matrix u[i][j] of a plan (1-based, row/col 0 unused).
std::vector<std::vector<int>> plan_matrix(const HighLevelPlan& plan, int node_count);

}  // namespace hlmpc
