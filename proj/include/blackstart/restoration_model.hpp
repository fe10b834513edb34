#pragma once

#include <cstddef>
#include <vector>

#include "blackstart/milp_model.hpp"
#include "blackstart/network.hpp"

namespace blackstart {

/// Objective weights per element.
struct ObjectiveWeights {
    std::vector<double> gen, load, line, ess;
};

/// w_g = 1e4 * Pmax / max Pmax, w_d = 1e2 * P_d / max P_d, w_l = w_s = 1.
ObjectiveWeights default_weights(const NetworkModel& net);

/// An optimization window [start, start + length) appended to a committed
/// history. history[j] is the committed state of step j, j = 0..start-1.
struct HorizonSpec {
    std::size_t start = 1;
    std::size_t length = 4;
    std::vector<RestorationState> history;
    ObjectiveWeights weights;

    /// Throws ModelError on an empty window, a history that does not end at
    /// start - 1, negative weights or non-monotone statuses.
    void validate(const NetworkModel& net) const;
};

/// Column ids for one step.
struct StepVars {
    std::vector<int> bus, line, load, gen, ess;
    std::vector<int> gen_crank, gen_ramp, gen_online;
    std::vector<int> p_gen, p_ramp_ref, theta, p_line;
    std::vector<int> p_ess, p_ess_in, p_ess_out, ess_charging, ess_discharging, soc;
    std::vector<int> delta_p_ess_ref;  // empty at the pinned step
};

/// Builds the restoration MILP over one window. The last committed step
/// (start - 1) gets columns pinned to its committed values so that every
/// inter-temporal row has the same shape; older steps enter as constants.
/// Steps before 0 have every NBSU offline and the black-start unit on.
class RestorationModel {
public:
    RestorationModel(const NetworkModel& net, HorizonSpec horizon);

    // Constraint families; build_all() adds the frequency-agnostic ones.
    void build_status_logic();
    void build_power_flow();
    void build_nbsu_phases();
    void build_ess();
    void build_objective();
    void build_all();

    /// Load pickups plus cranking-power changes at step k (a window step).
    LinearExpr step_imbalance_expr(std::size_t k) const;

    /// dPe[k] <= g0[i] + gs[i] . dPs_ref[k] for the i-th window step k.
    /// Throws ModelError unless both sequences have one entry per step.
    void add_nadir_constraints(const std::vector<double>& g0, const std::vector<std::vector<double>>& gs);

    /// dPe[k] <= 0.05 * Pmax . b_go[k] for every window step.
    void add_five_percent_rule();

    /// Fixes every status of window step k to its value at step k - 1.
    void pin_statuses_to_previous(std::size_t k);

    const MilpModel& model() const { return model_; }
    MilpModel& model() { return model_; }
    const HorizonSpec& horizon() const { return horizon_; }
    const NetworkModel& network() const { return net_; }

    std::size_t first_step() const { return horizon_.start; }
    std::size_t last_step() const { return horizon_.start + horizon_.length - 1; }
    const StepVars& step(std::size_t k) const;
    const std::vector<int>& terminal_soc() const { return terminal_soc_; }

    /// Reads the state of window step k out of a solution vector.
    RestorationState extract_state(std::size_t k, const std::vector<double>& values) const;

    /// Maps committed states for every window step (plus the pinned step)
    /// onto a full assignment. states[k] is the state of step k.
    std::vector<double> assignment_from_states(const std::vector<RestorationState>& states) const;

    /// Big-M values used, by family.
    double flow_bound() const { return flow_bound_; }
    double angle_bound() const { return angle_bound_; }

private:
    LinearExpr gen_status(std::size_t gen, long k) const;
    int index(std::size_t k) const;
    void declare_step(std::size_t k);
    void pin_step(std::size_t k, const RestorationState& state);

    const NetworkModel& net_;
    HorizonSpec horizon_;
    IncidenceSet inc_;
    MilpModel model_;
    std::vector<StepVars> steps_;  // steps_[0] is start - 1
    std::vector<int> terminal_soc_;
    double flow_bound_ = 0.0;
    double angle_bound_ = 0.0;
    bool nadir_added_ = false;
};

/// Builds the frequency-agnostic model over the entire plan (window
/// [1, T]) and checks the plan's own values against it.
FeasibilityReport check_plan(const NetworkModel& net, const RestorationPlan& plan, double feas_tol = kDefaultFeasTol);

}  // namespace blackstart
