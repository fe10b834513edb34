#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "blackstart/freq_dynamics.hpp"
#include "blackstart/milp_solver.hpp"
#include "blackstart/nadir.hpp"
#include "blackstart/network.hpp"

namespace blackstart {

enum class ConstraintMode { none, five_percent, nadir };

const char* to_string(ConstraintMode mode);
/// Accepts "none", "five-percent", "nadir"; throws ModelError otherwise.
ConstraintMode parse_mode(const std::string& text);

struct PlannerConfig {
    std::size_t horizon = 4;
    double omega_lim = -1.0 / 60.0;  // pu
    ConstraintMode mode = ConstraintMode::nadir;
    bool use_ess = true;
    SolverConfig solver;
    std::size_t max_iterations = 400;

    void validate() const;
};

/// Bound coefficients for one future step.
struct StepCoefficients {
    double h_sys = 0.0;
    AggregateCoeffs agg;
    LinearBound bound;
};

/// Linear nadir bound for the phases of one state (ramping units add
/// inertia, online units add PFR).
StepCoefficients coefficients_for_phases(const NetworkModel& net, const std::vector<int>& gen_ramp,
                                         const std::vector<int>& gen_online, double omega_lim);

/// Predicted phases of each generator at step k, assuming no starts beyond
/// those in `committed` (committed[k] is the state of step k).
void predict_phases(const NetworkModel& net, const std::vector<RestorationState>& committed, std::size_t k,
                    std::vector<int>& gen_ramp, std::vector<int>& gen_online);

/// Frozen coefficients for steps committed.size() .. + horizon - 1.
std::vector<StepCoefficients> predict_coefficients(const NetworkModel& net,
                                                   const std::vector<RestorationState>& committed,
                                                   std::size_t horizon, double omega_lim);

struct IterationLog {
    std::size_t iteration = 0;
    std::size_t step = 0;  // committed step
    std::size_t window = 0;
    bool wait = false;
    SolveStatus status = SolveStatus::optimal;
    double objective = 0.0;
    std::size_t nodes = 0;
    std::size_t lp_iterations = 0;
    double seconds = 0.0;
    double g0 = 0.0;
};

struct PlanResult {
    NetworkModel network;  // the network actually planned (without ESS if disabled)
    RestorationPlan plan;
    std::vector<IterationLog> log;
};

/// Rolling-horizon planning: freeze coefficients, solve the window, commit
/// its first step. Infeasible windows are retried with a single step, then
/// as a wait step with all statuses held. Throws PlanningError when even the
/// wait step is infeasible. Stops early, with an incomplete plan, after
/// 2 * horizon + 10 consecutive steps in which nothing switched and no unit
/// was starting.
PlanResult plan(const NetworkModel& net, const PlannerConfig& config);

/// The subproblem the planner solves at its first iteration.
MilpModel first_window_model(const NetworkModel& net, const PlannerConfig& config);

/// Committed ESS and generator setpoint bookkeeping for a new step.
void annotate_step(const NetworkModel& net, RestorationState& state);

/// Largest violation of the frozen bound over the committed steps (<= 0 when
/// every step honours the coefficients it was committed under).
double frozen_bound_slack(const NetworkModel& net, const RestorationPlan& plan);

struct ComparisonRow {
    std::string label;
    std::size_t steps = 0;
    double minutes = 0.0;
    bool complete = false;
    double worst_nadir = 0.0;  // pu
    std::size_t violations = 0;
};

struct LabeledConfig {
    std::string label;
    PlannerConfig config;
};

/// Plans and simulates each configuration; violations are counted against
/// `omega_lim` (pu).
std::vector<ComparisonRow> compare_plans(const NetworkModel& net, const std::vector<LabeledConfig>& configs,
                                         double omega_lim, const SimOptions& sim = {});

}  // namespace blackstart
