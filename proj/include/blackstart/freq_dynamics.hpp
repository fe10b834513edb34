#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "blackstart/network.hpp"

namespace blackstart {

/// H_sys = sum H_i S_g,i / S_sys. Throws ModelError on an empty set.
double system_inertia(const NetworkModel& net, const std::vector<std::size_t>& units);

/// Steady-state PFR share of each unit on its own base:
/// K_i dPe / sum_j K_j alpha_j. Throws ModelError when sum K alpha <= 0.
std::vector<double> pfr_steady_share(const std::vector<double>& droop, const std::vector<double>& alpha,
                                     double delta_p_e);

/// Step disturbance applied at t = 0 to a system at rest.
struct StepScenario {
    double h_sys = 0.0;
    double delta_p_e = 0.0;  // system base
    std::vector<std::size_t> pfr_units;
    std::vector<double> alpha;        // per PFR unit
    std::vector<double> delta_p_ref;  // per PFR unit, machine base
    std::vector<std::size_t> ess_units;
    std::vector<double> ess_ref;  // per ESS unit, system base
    double horizon_s = 60.0;
    double step_s = 0.005;
};

struct FrequencyTrajectory {
    std::vector<double> time;
    std::vector<double> omega;                // pu
    std::vector<std::vector<double>> p_mech;  // [sample][unit], machine base
    std::vector<std::vector<double>> p_ess;   // [sample][unit], system base
    double nadir = 0.0;
    double t_nadir = 0.0;
};

/// RK4 integration of the closed loop: swing equation, IEEEG1 governors
/// (lead-lag, SAT1 rate-limited valve, four turbine stages) and first-order
/// ESS lags. Records every `record_every`-th step. Throws NumericalError on
/// a nonfinite state.
FrequencyTrajectory simulate_step(const NetworkModel& net, const StepScenario& scenario, std::size_t record_every = 1);

struct SimOptions {
    double horizon_s = 60.0;
    double step_s = 0.005;
    std::size_t record_every = 20;
};

/// Scenario for committed step k of a plan. Inertia counts ramping and
/// online units, PFR counts online units only; generator references follow
/// the plan's stored redispatch or, if absent, the steady-state shares.
StepScenario scenario_for_step(const NetworkModel& net, const RestorationPlan& plan, std::size_t k,
                               const SimOptions& opt = {});

struct StepCheck {
    std::size_t step = 0;
    double delta_p_e = 0.0;
    double nadir = 0.0;  // pu
    double t_nadir = 0.0;
    bool violated = false;
};

struct PlanSimulation {
    std::vector<StepCheck> steps;                    // disturbance steps only
    std::vector<FrequencyTrajectory> trajectories;  // parallel to steps
    std::size_t violations = 0;
    double worst_nadir = 0.0;
};

/// Simulates every step with a nonzero disturbance or ESS setpoint change and
/// flags nadirs below omega_lim (pu, negative). Throws ModelError when the
/// plan does not match the network.
PlanSimulation simulate_plan(const NetworkModel& net, const RestorationPlan& plan, double omega_lim,
                             const SimOptions& opt = {});

/// CSV: time, omega in pu and Hz, then mechanical and ESS powers.
std::string trajectory_table(const NetworkModel& net, const StepScenario& scenario, const FrequencyTrajectory& traj);

}  // namespace blackstart
