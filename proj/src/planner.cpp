#include "blackstart/planner.hpp"

#include <algorithm>
#include <chrono>
#include <iterator>
#include <limits>
#include <optional>

#include "blackstart/errors.hpp"
#include "blackstart/restoration_model.hpp"

namespace blackstart {

const char* to_string(ConstraintMode mode) {
    switch (mode) {
        case ConstraintMode::none: return "none";
        case ConstraintMode::five_percent: return "five-percent";
        case ConstraintMode::nadir: return "nadir";
    }
    return "?";
}

ConstraintMode parse_mode(const std::string& text) {
    if (text == "none") return ConstraintMode::none;
    if (text == "five-percent") return ConstraintMode::five_percent;
    if (text == "nadir") return ConstraintMode::nadir;
    throw ModelError("unknown constraint mode '" + text + "' (expected none, five-percent or nadir)");
}

void PlannerConfig::validate() const {
    if (horizon == 0) throw ModelError("planning horizon must be at least one step");
    if (mode == ConstraintMode::nadir && !(omega_lim < 0.0))
        throw ModelError("nadir mode needs a negative frequency limit");
    if (max_iterations == 0) throw ModelError("iteration cap must be positive");
    solver.validate();
}

StepCoefficients coefficients_for_phases(const NetworkModel& net, const std::vector<int>& gen_ramp,
                                         const std::vector<int>& gen_online, double omega_lim) {
    std::vector<std::size_t> synchronized, pfr;
    for (std::size_t i = 0; i < net.num_generators(); ++i) {
        if (gen_ramp[i] == 1 || gen_online[i] == 1) synchronized.push_back(i);
        if (gen_online[i] == 1 && net.generators[i].provides_pfr) pfr.push_back(i);
    }
    std::vector<double> tau;
    for (const auto& e : net.ess) tau.push_back(e.tau);

    StepCoefficients c;
    if (!synchronized.empty()) c.h_sys = system_inertia(net, synchronized);
    if (!pfr.empty()) c.agg = aggregate(net, pfr);
    c.bound = linear_bound(c.agg, c.h_sys, omega_lim, tau);
    return c;
}

void predict_phases(const NetworkModel& net, const std::vector<RestorationState>& committed, std::size_t k,
                    std::vector<int>& gen_ramp, std::vector<int>& gen_online) {
    gen_ramp.assign(net.num_generators(), 0);
    gen_online.assign(net.num_generators(), 0);
    for (std::size_t i = 0; i < net.num_generators(); ++i) {
        const auto& g = net.generators[i];
        if (g.black_start) {
            gen_online[i] = 1;
            continue;
        }
        std::optional<std::size_t> start;
        for (std::size_t j = 0; j < committed.size() && !start; ++j)
            if (committed[j].gen[i] == 1) start = j;
        if (!start || k < *start) continue;
        const std::size_t elapsed = k - *start;
        const auto tc = static_cast<std::size_t>(g.crank_steps), tr = static_cast<std::size_t>(g.ramp_steps);
        if (elapsed < tc) continue;
        if (elapsed < tc + tr)
            gen_ramp[i] = 1;
        else
            gen_online[i] = 1;
    }
}

std::vector<StepCoefficients> predict_coefficients(const NetworkModel& net,
                                                   const std::vector<RestorationState>& committed,
                                                   std::size_t horizon, double omega_lim) {
    std::vector<StepCoefficients> out;
    std::vector<int> ramp, online;
    for (std::size_t i = 0; i < horizon; ++i) {
        predict_phases(net, committed, committed.size() + i, ramp, online);
        out.push_back(coefficients_for_phases(net, ramp, online, omega_lim));
    }
    return out;
}

void annotate_step(const NetworkModel& net, RestorationState& st) {
    st.delta_p_gen_ref.assign(net.num_generators(), 0.0);
    std::vector<std::size_t> units;
    std::vector<double> droop, alpha;
    for (std::size_t i = 0; i < net.num_generators(); ++i)
        if (st.gen_online[i] == 1 && net.generators[i].provides_pfr) {
            units.push_back(i);
            droop.push_back(net.generators[i].droop_gain);
            alpha.push_back(net.base_ratio(i));
        }
    if (units.empty() || st.delta_p_e == 0.0) return;
    const auto share = pfr_steady_share(droop, alpha, st.delta_p_e);
    for (std::size_t j = 0; j < units.size(); ++j) st.delta_p_gen_ref[units[j]] = share[j];
}

double frozen_bound_slack(const NetworkModel& net, const RestorationPlan& plan) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < plan.steps.size() && k < plan.frozen_g0.size(); ++k) {
        const auto& st = plan.steps[k];
        double rhs = plan.frozen_g0[k];
        for (std::size_t s = 0; s < net.num_ess(); ++s) rhs += plan.frozen_gs[k][s] * st.delta_p_ess_ref[s];
        worst = std::max(worst, st.delta_p_e - rhs);
    }
    return worst;
}

namespace {

struct Attempt {
    RestorationState state;
    IterationLog log;
};

struct Tier {
    std::size_t length;
    bool wait;
    bool frequency_rows;
};

RestorationModel window_model(const NetworkModel& net, const PlannerConfig& cfg,
                              const std::vector<RestorationState>& committed,
                              const std::vector<StepCoefficients>& coeffs, const ObjectiveWeights& weights,
                              const Tier& tier) {
    HorizonSpec h;
    h.start = committed.size();
    h.length = tier.length;
    h.history = committed;
    h.weights = weights;
    RestorationModel rm(net, std::move(h));
    rm.build_all();
    if (tier.frequency_rows) {
        if (cfg.mode == ConstraintMode::nadir) {
            std::vector<double> g0;
            std::vector<std::vector<double>> gs;
            for (std::size_t i = 0; i < tier.length; ++i) {
                g0.push_back(coeffs[i].bound.g0);
                gs.push_back(coeffs[i].bound.gs);
            }
            rm.add_nadir_constraints(g0, gs);
        } else if (cfg.mode == ConstraintMode::five_percent) {
            rm.add_five_percent_rule();
        }
    }
    if (tier.wait) rm.pin_statuses_to_previous(rm.first_step());
    return rm;
}

std::optional<Attempt> solve_window(const NetworkModel& net, const PlannerConfig& cfg,
                                    const std::vector<RestorationState>& committed,
                                    const std::vector<StepCoefficients>& coeffs, const ObjectiveWeights& weights,
                                    const Tier& tier) {
    const auto t0 = std::chrono::steady_clock::now();
    RestorationModel rm = window_model(net, cfg, committed, coeffs, weights, tier);
    const MilpSolution sol = solve_milp(rm.model(), cfg.solver);
    if (!sol.has_solution()) return std::nullopt;

    Attempt a;
    a.state = rm.extract_state(rm.first_step(), sol.values);
    annotate_step(net, a.state);
    a.log.step = rm.first_step();
    a.log.window = tier.length;
    a.log.wait = tier.wait;
    a.log.status = sol.status;
    a.log.objective = sol.objective;
    a.log.nodes = sol.nodes;
    a.log.lp_iterations = sol.lp_iterations;
    a.log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    a.log.g0 = coeffs.front().bound.g0;
    return a;
}

}  // namespace

MilpModel first_window_model(const NetworkModel& net, const PlannerConfig& config) {
    config.validate();
    const NetworkModel nw = config.use_ess ? net : net.without_ess();
    nw.validate();
    const std::vector<RestorationState> committed{initial_state(nw)};
    const auto coeffs = predict_coefficients(nw, committed, config.horizon, config.omega_lim);
    const RestorationModel rm =
        window_model(nw, config, committed, coeffs, default_weights(nw), Tier{config.horizon, false, true});
    return rm.model();
}

namespace {

// Nothing switched and no unit is cranking or ramping towards a change.
bool idle_step(const RestorationState& prev, const RestorationState& next) {
    const auto busy = [](int v) { return v != 0; };
    return prev.bus == next.bus && prev.line == next.line && prev.load == next.load && prev.gen == next.gen &&
           prev.ess == next.ess && std::none_of(next.gen_crank.begin(), next.gen_crank.end(), busy) &&
           std::none_of(next.gen_ramp.begin(), next.gen_ramp.end(), busy);
}

}  // namespace

PlanResult plan(const NetworkModel& net, const PlannerConfig& config) {
    config.validate();
    PlanResult r;
    r.network = config.use_ess ? net : net.without_ess();
    const NetworkModel& nw = r.network;
    nw.validate();
    const ObjectiveWeights weights = default_weights(nw);

    auto& steps = r.plan.steps;
    steps.push_back(initial_state(nw));
    const bool frozen = config.mode == ConstraintMode::nadir;
    if (frozen) {
        r.plan.frozen_g0.push_back(0.0);
        r.plan.frozen_gs.emplace_back(nw.num_ess(), 0.0);
    }

    const Tier tiers[] = {{config.horizon, false, true}, {1, false, true}, {1, true, true}, {1, true, false}};
    const std::size_t stall_limit = 2 * config.horizon + 10;
    std::size_t idle = 0;
    for (std::size_t it = 1; it <= config.max_iterations && !fully_restored(nw, steps.back()) && idle < stall_limit;
         ++it) {
        const auto coeffs = predict_coefficients(nw, steps, config.horizon, config.omega_lim);
        std::optional<Attempt> got;
        for (std::size_t t = 0; t < std::size(tiers) && !got; ++t) {
            if (t == 1 && config.horizon == 1) continue;
            got = solve_window(nw, config, steps, coeffs, weights, tiers[t]);
        }
        if (!got)
            throw PlanningError("no admissible action at step " + std::to_string(steps.size()) +
                                ", even holding every status (forced generator output cannot be absorbed)");
        got->log.iteration = it;
        r.log.push_back(got->log);
        idle = idle_step(steps.back(), got->state) ? idle + 1 : 0;
        steps.push_back(std::move(got->state));
        if (frozen) {
            r.plan.frozen_g0.push_back(coeffs.front().bound.g0);
            r.plan.frozen_gs.push_back(coeffs.front().bound.gs);
        }
    }
    r.plan.complete = fully_restored(nw, steps.back());
    return r;
}

std::vector<ComparisonRow> compare_plans(const NetworkModel& net, const std::vector<LabeledConfig>& configs,
                                         double omega_lim, const SimOptions& sim) {
    std::vector<ComparisonRow> rows;
    for (const auto& c : configs) {
        const PlanResult pr = plan(net, c.config);
        const PlanSimulation ps = simulate_plan(pr.network, pr.plan, omega_lim, sim);
        ComparisonRow row;
        row.label = c.label;
        row.steps = pr.plan.last_step();
        row.minutes = static_cast<double>(row.steps) * net.step_minutes;
        row.complete = pr.plan.complete;
        row.worst_nadir = ps.worst_nadir;
        row.violations = ps.violations;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace blackstart
