#pragma once

#include <cstddef>

#include "blackstart/lp_solver.hpp"
#include "blackstart/milp_model.hpp"

namespace blackstart {

enum class BranchingRule { most_fractional, pseudo_cost };
enum class NodeOrder { best_bound, depth_first_then_best };

struct SolverConfig {
    double int_tol = kDefaultIntTol;
    double feas_tol = kDefaultFeasTol;
    double rel_gap = 1e-6;
    double abs_gap = 1e-9;
    std::size_t node_limit = 1'000'000;
    double time_limit_s = 3600.0;
    BranchingRule branching = BranchingRule::most_fractional;
    NodeOrder node_order = NodeOrder::depth_first_then_best;
    LpOptions lp;

    /// Throws ModelError on a negative gap or non-positive limit.
    void validate() const;
};

/// LP-relaxation branch-and-bound over the binary columns of `model`.
///
/// Sequential and deterministic: nodes are numbered in creation order and
/// every tie (branching variable, node selection) is broken by the lower id.
/// Children are re-solved from the basis left by the previous node. Integral
/// LP solutions are polished by re-solving with the binaries fixed at their
/// rounded values, so incumbents hold exact 0/1 values.
///
/// On a node or time limit the best incumbent (if any) is returned with
/// status iteration_limit.
MilpSolution solve_milp(const MilpModel& model, const SolverConfig& config = {});

}  // namespace blackstart
