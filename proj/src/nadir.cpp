#include "blackstart/nadir.hpp"

#include <cmath>
#include <string>

#include "blackstart/errors.hpp"

namespace blackstart {

Quadratic truncated_product(const Quadratic& a, const Quadratic& b) {
    return {a[0] * b[0], a[0] * b[1] + a[1] * b[0], a[0] * b[2] + a[1] * b[1] + a[2] * b[0]};
}

TurbineCoeffs turbine_poly(const GeneratorSpec& gen) {
    // G_T = L4 (K1 + L5 (K3 + L6 (K5 + K7 L7))), evaluated inside out.
    auto lag = [](double t) { return Quadratic{1.0, -t, t * t}; };
    const auto& k = gen.stage_gain;
    const auto& t = gen.stage_time;
    Quadratic g{k[3], 0.0, 0.0};
    g = truncated_product(g, lag(t[3]));
    g[0] += k[2];
    g = truncated_product(g, lag(t[2]));
    g[0] += k[1];
    g = truncated_product(g, lag(t[1]));
    g[0] += k[0];
    g = truncated_product(g, lag(t[0]));
    return {g[0], -g[1], g[2]};
}

AggregateCoeffs aggregate(const std::vector<PfrContribution>& units) {
    if (units.empty()) throw ModelError("aggregate needs at least one PFR unit");
    AggregateCoeffs a;
    for (const auto& u : units) {
        const double w = u.alpha * u.valve_rate;
        a.c1 += w;
        a.c2 += w * u.turbine.c2;
        a.c3 += w * u.turbine.c3;
    }
    return a;
}

AggregateCoeffs aggregate(const NetworkModel& net, const std::vector<std::size_t>& online) {
    std::vector<PfrContribution> units;
    for (std::size_t i : online) {
        const auto& g = net.generators.at(i);
        if (!g.provides_pfr) continue;
        units.push_back({net.base_ratio(i), g.valve_rate, turbine_poly(g)});
    }
    return aggregate(units);
}

namespace {

void check_inputs(const NadirInputs& in) {
    if (!(in.agg.c1 > 0.0)) throw ModelError("nadir prediction needs C1 > 0 (no PFR online)");
    if (!(in.h_sys > 0.0)) throw ModelError("nadir prediction needs positive system inertia");
    if (in.ess_ref.size() != in.ess_tau.size()) throw ModelError("ESS setpoints and time constants differ in length");
}

double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

double weighted(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

NadirPrediction predict_nadir(const NadirInputs& in, double delta_p_e) {
    check_inputs(in);
    const double p_tot = sum(in.ess_ref);
    const double p_tau = weighted(in.ess_tau, in.ess_ref);
    const double slope = in.agg.c2 + delta_p_e - p_tot;
    NadirPrediction p;
    p.t_nadir = slope / in.agg.c1;
    if (p.t_nadir <= 0.0) {
        p.degenerate = true;
        p.t_nadir = 0.0;
        p.omega_nadir = (in.agg.c3 - p_tau) / (2.0 * in.h_sys);
        return p;
    }
    p.omega_nadir = (in.agg.c3 - p_tau - slope * slope / (2.0 * in.agg.c1)) / (2.0 * in.h_sys);
    return p;
}

double max_disturbance_nonlinear(const NadirInputs& in, double omega_lim) {
    check_inputs(in);
    const double c1 = in.agg.c1;
    const double radicand =
        4.0 * in.h_sys * c1 * std::abs(omega_lim) + 2.0 * c1 * in.agg.c3 - 2.0 * c1 * weighted(in.ess_tau, in.ess_ref);
    if (radicand < 0.0)
        throw ModelError("ESS lag contribution exceeds the frequency headroom (radicand " + std::to_string(radicand) +
                         ")");
    return std::sqrt(radicand) - in.agg.c2 + sum(in.ess_ref);
}

LinearBound linear_bound(const AggregateCoeffs& agg, double h_sys, double omega_lim,
                         const std::vector<double>& ess_tau) {
    LinearBound b;
    if (agg.c1 <= 0.0) {
        b.gs.assign(ess_tau.size(), 0.0);
        return b;
    }
    const double radicand = 4.0 * h_sys * agg.c1 * std::abs(omega_lim) + 2.0 * agg.c1 * agg.c3;
    if (!(radicand > 0.0)) throw ModelError("nonpositive radicand in the nadir bound");
    const double root = std::sqrt(radicand);
    b.g0 = root - agg.c2;
    for (double tau : ess_tau) b.gs.push_back(1.0 - agg.c1 * tau / root);
    return b;
}

RampValidity ramp_validity_check(const NetworkModel& net, const std::vector<std::size_t>& units,
                                 const std::vector<double>& delta_p_ref) {
    if (units.size() != delta_p_ref.size()) throw ModelError("one setpoint change per unit is required");
    RampValidity r;
    for (std::size_t j = 0; j < units.size(); ++j) {
        const auto& g = net.generators.at(units[j]);
        const bool ok = delta_p_ref[j] / g.gov_t3 >= g.valve_rate;
        r.valid.push_back(ok);
        if (!ok) r.violations.push_back(units[j]);
    }
    return r;
}

}  // namespace blackstart
