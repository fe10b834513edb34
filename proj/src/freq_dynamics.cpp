#include "blackstart/freq_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "blackstart/errors.hpp"

namespace blackstart {

double system_inertia(const NetworkModel& net, const std::vector<std::size_t>& units) {
    if (units.empty()) throw ModelError("system inertia needs at least one synchronized machine");
    double h = 0.0;
    for (std::size_t i : units) h += net.generators.at(i).inertia * net.base_ratio(i);
    return h;
}

std::vector<double> pfr_steady_share(const std::vector<double>& droop, const std::vector<double>& alpha,
                                     double delta_p_e) {
    if (droop.size() != alpha.size()) throw ModelError("droop and participation vectors differ in length");
    double denom = 0.0;
    for (std::size_t i = 0; i < droop.size(); ++i) denom += droop[i] * alpha[i];
    if (!(denom > 0.0)) throw ModelError("no primary frequency response available");
    std::vector<double> share;
    for (double k : droop) share.push_back(k * delta_p_e / denom);
    return share;
}

namespace {

constexpr std::size_t kPerUnit = 6;  // lead-lag, valve, four turbine stages

class ClosedLoop {
public:
    ClosedLoop(const NetworkModel& net, const StepScenario& sc) : net_(net), sc_(sc) {}

    std::size_t size() const { return 1 + kPerUnit * sc_.pfr_units.size() + sc_.ess_units.size(); }

    // Mechanical output of PFR unit j for state x; fills derivatives if dx is given.
    double unit(const std::vector<double>& x, std::size_t j, std::vector<double>* dx) const {
        const auto& g = net_.generators[sc_.pfr_units[j]];
        const std::size_t base = 1 + kPerUnit * j;
        const double w = x[0];

        double ll = w;
        if (g.gov_t1 > 0.0) {
            const double z = x[base];
            ll = z + (g.gov_t2 / g.gov_t1) * (w - z);
            if (dx) (*dx)[base] = (w - z) / g.gov_t1;
        } else if (dx) {
            (*dx)[base] = 0.0;
        }
        const double valve = x[base + 1];
        if (dx) {
            const double demand = sc_.delta_p_ref[j] - g.droop_gain * ll;
            (*dx)[base + 1] = std::clamp((demand - valve) / g.gov_t3, -g.valve_rate, g.valve_rate);
        }
        double in = valve, pm = 0.0;
        for (std::size_t s = 0; s < 4; ++s) {
            const std::size_t id = base + 2 + s;
            const double t = g.stage_time[s];
            double out = in;
            if (t > 0.0) {
                out = x[id];
                if (dx) (*dx)[id] = (in - out) / t;
            } else if (dx) {
                (*dx)[id] = 0.0;
            }
            pm += g.stage_gain[s] * out;
            in = out;
        }
        return pm;
    }

    void derivative(const std::vector<double>& x, std::vector<double>& dx) const {
        double mech = 0.0;
        for (std::size_t j = 0; j < sc_.pfr_units.size(); ++j) mech += sc_.alpha[j] * unit(x, j, &dx);
        const std::size_t ess0 = 1 + kPerUnit * sc_.pfr_units.size();
        double ess = 0.0;
        for (std::size_t e = 0; e < sc_.ess_units.size(); ++e) {
            const double tau = net_.ess[sc_.ess_units[e]].tau;
            dx[ess0 + e] = (sc_.ess_ref[e] - x[ess0 + e]) / tau;
            ess += x[ess0 + e];
        }
        dx[0] = (mech - sc_.delta_p_e + ess) / (2.0 * sc_.h_sys);
    }

private:
    const NetworkModel& net_;
    const StepScenario& sc_;
};

void check_scenario(const NetworkModel& net, const StepScenario& sc) {
    if (!(sc.h_sys > 0.0)) throw ModelError("scenario needs positive system inertia");
    if (!(sc.step_s > 0.0) || !(sc.horizon_s > 0.0)) throw ModelError("scenario needs a positive step and horizon");
    if (sc.alpha.size() != sc.pfr_units.size() || sc.delta_p_ref.size() != sc.pfr_units.size())
        throw ModelError("PFR vectors in the scenario differ in length");
    if (sc.ess_ref.size() != sc.ess_units.size()) throw ModelError("ESS vectors in the scenario differ in length");
    for (std::size_t i : sc.pfr_units)
        if (i >= net.num_generators() || !net.generators[i].provides_pfr)
            throw ModelError("scenario PFR unit " + std::to_string(i) + " is not a PFR generator");
    for (std::size_t e : sc.ess_units)
        if (e >= net.num_ess()) throw ModelError("scenario ESS unit " + std::to_string(e) + " does not exist");
}

}  // namespace

FrequencyTrajectory simulate_step(const NetworkModel& net, const StepScenario& sc, std::size_t record_every) {
    check_scenario(net, sc);
    if (record_every == 0) record_every = 1;
    const ClosedLoop loop(net, sc);
    const std::size_t n = loop.size();
    const std::size_t ess0 = 1 + kPerUnit * sc.pfr_units.size();
    const auto steps = static_cast<std::size_t>(std::llround(sc.horizon_s / sc.step_s));
    const double h = sc.step_s;

    std::vector<double> x(n, 0.0), k1(n), k2(n), k3(n), k4(n), tmp(n);
    FrequencyTrajectory tr;
    auto record = [&](double t) {
        tr.time.push_back(t);
        tr.omega.push_back(x[0]);
        std::vector<double> pm;
        for (std::size_t j = 0; j < sc.pfr_units.size(); ++j) pm.push_back(loop.unit(x, j, nullptr));
        tr.p_mech.push_back(std::move(pm));
        tr.p_ess.emplace_back(x.begin() + static_cast<long>(ess0), x.end());
    };
    record(0.0);
    for (std::size_t s = 1; s <= steps; ++s) {
        loop.derivative(x, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        loop.derivative(tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        loop.derivative(tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
        loop.derivative(tmp, k4);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (!std::isfinite(x[i]))
                throw NumericalError("simulation diverged at t = " + std::to_string(s * h) + " s (state " +
                                     std::to_string(i) + ")");
        }
        const double t = static_cast<double>(s) * h;
        if (x[0] < tr.nadir) {
            tr.nadir = x[0];
            tr.t_nadir = t;
        }
        if (s % record_every == 0 || s == steps) record(t);
    }
    return tr;
}

StepScenario scenario_for_step(const NetworkModel& net, const RestorationPlan& plan, std::size_t k,
                               const SimOptions& opt) {
    if (k >= plan.steps.size()) throw ModelError("step " + std::to_string(k) + " is not in the plan");
    const auto& st = plan.steps[k];
    if (st.gen_online.size() != net.num_generators() || st.gen_ramp.size() != net.num_generators() ||
        st.delta_p_ess_ref.size() != net.num_ess())
        throw ModelError("plan step " + std::to_string(k) + " does not match the network");

    StepScenario sc;
    sc.horizon_s = opt.horizon_s;
    sc.step_s = opt.step_s;
    sc.delta_p_e = st.delta_p_e;
    std::vector<std::size_t> synchronized;
    std::vector<double> droop;
    for (std::size_t i = 0; i < net.num_generators(); ++i) {
        const bool online = st.gen_online[i] == 1;
        if (online || st.gen_ramp[i] == 1) synchronized.push_back(i);
        if (online && net.generators[i].provides_pfr) {
            sc.pfr_units.push_back(i);
            sc.alpha.push_back(net.base_ratio(i));
            droop.push_back(net.generators[i].droop_gain);
        }
    }
    sc.h_sys = system_inertia(net, synchronized);
    if (st.delta_p_gen_ref.size() == net.num_generators()) {
        for (std::size_t i : sc.pfr_units) sc.delta_p_ref.push_back(st.delta_p_gen_ref[i]);
    } else if (!sc.pfr_units.empty()) {
        sc.delta_p_ref = pfr_steady_share(droop, sc.alpha, st.delta_p_e);
    }
    for (std::size_t s = 0; s < net.num_ess(); ++s) {
        sc.ess_units.push_back(s);
        sc.ess_ref.push_back(st.delta_p_ess_ref[s]);
    }
    return sc;
}

PlanSimulation simulate_plan(const NetworkModel& net, const RestorationPlan& plan, double omega_lim,
                             const SimOptions& opt) {
    PlanSimulation out;
    for (std::size_t k = 1; k < plan.steps.size(); ++k) {
        const auto& st = plan.steps[k];
        bool active = st.delta_p_e != 0.0;
        for (double d : st.delta_p_ess_ref) active = active || d != 0.0;
        if (!active) continue;
        const StepScenario sc = scenario_for_step(net, plan, k, opt);
        FrequencyTrajectory tr = simulate_step(net, sc, opt.record_every);
        StepCheck c;
        c.step = k;
        c.delta_p_e = st.delta_p_e;
        c.nadir = tr.nadir;
        c.t_nadir = tr.t_nadir;
        c.violated = tr.nadir < omega_lim;
        out.violations += c.violated ? 1 : 0;
        out.worst_nadir = std::min(out.worst_nadir, tr.nadir);
        out.steps.push_back(c);
        out.trajectories.push_back(std::move(tr));
    }
    return out;
}

std::string trajectory_table(const NetworkModel& net, const StepScenario& sc, const FrequencyTrajectory& tr) {
    std::string out = "time_s,omega_pu,omega_hz";
    for (std::size_t i : sc.pfr_units) out += ",pm_" + net.generators[i].name + "_pu";
    for (std::size_t e : sc.ess_units) out += ",ps_" + net.ess[e].name + "_pu";
    out += '\n';
    char buf[64];
    for (std::size_t s = 0; s < tr.time.size(); ++s) {
        std::snprintf(buf, sizeof buf, "%.3f,%.9f,%.6f", tr.time[s], tr.omega[s], net.pu_to_hz(tr.omega[s]));
        out += buf;
        for (double v : tr.p_mech[s]) {
            std::snprintf(buf, sizeof buf, ",%.9f", v);
            out += buf;
        }
        for (double v : tr.p_ess[s]) {
            std::snprintf(buf, sizeof buf, ",%.9f", v);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

}  // namespace blackstart
