#include "blackstart/restoration_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "blackstart/errors.hpp"

namespace blackstart {

namespace {

std::string tag(const char* family, std::size_t elem, std::size_t k) {
    return std::string(family) + "_" + std::to_string(elem) + "_k" + std::to_string(k);
}

std::string tag(const char* family, std::size_t k) { return std::string(family) + "_k" + std::to_string(k); }

LinearExpr var(int id, double coef = 1.0) { return LinearExpr::variable(id, coef); }

// Adds lo <= expr <= hi as two rows (or one when a side is absent).
void add_range(MilpModel& m, const LinearExpr& expr, double lo, double hi, const std::string& name) {
    m.add_constraint(expr, RowSense::greater_equal, lo, name + "_lo");
    m.add_constraint(expr, RowSense::less_equal, hi, name + "_hi");
}

bool monotone(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (b[i] < a[i]) return false;
    return true;
}

}  // namespace

ObjectiveWeights default_weights(const NetworkModel& net) {
    ObjectiveWeights w;
    double pmax = 0.0, dmax = 0.0;
    for (const auto& g : net.generators) pmax = std::max(pmax, g.p_max);
    for (const auto& d : net.loads) dmax = std::max(dmax, d.demand);
    for (const auto& g : net.generators) w.gen.push_back(pmax > 0 ? 1e4 * g.p_max / pmax : 1e4);
    for (const auto& d : net.loads) w.load.push_back(dmax > 0 ? 1e2 * d.demand / dmax : 1e2);
    w.line.assign(net.num_lines(), 1.0);
    w.ess.assign(net.num_ess(), 1.0);
    return w;
}

void HorizonSpec::validate(const NetworkModel& net) const {
    if (length == 0) throw ModelError("horizon length must be at least one step");
    if (start == 0 || history.size() != start)
        throw ModelError("horizon history must hold exactly the steps before the window start");
    auto check_weights = [](const std::vector<double>& w, std::size_t n, const char* what) {
        if (w.size() != n) throw ModelError(std::string("objective weights for ") + what + " have the wrong size");
        for (double v : w)
            if (!(v >= 0.0)) throw ModelError(std::string("objective weights for ") + what + " must be non-negative");
    };
    check_weights(weights.gen, net.num_generators(), "generators");
    check_weights(weights.load, net.num_loads(), "loads");
    check_weights(weights.line, net.num_lines(), "lines");
    check_weights(weights.ess, net.num_ess(), "storage units");
    for (std::size_t j = 1; j < history.size(); ++j) {
        const auto& a = history[j - 1];
        const auto& b = history[j];
        if (!monotone(a.bus, b.bus) || !monotone(a.line, b.line) || !monotone(a.load, b.load) ||
            !monotone(a.gen, b.gen) || !monotone(a.ess, b.ess))
            throw ModelError("committed history is not monotone at step " + std::to_string(j));
    }
}

RestorationModel::RestorationModel(const NetworkModel& net, HorizonSpec horizon)
    : net_(net), horizon_(std::move(horizon)), inc_(build_incidence(net)), model_("restore") {
    horizon_.validate(net_);

    double gen_total = 0.0, load_total = 0.0, ess_total = 0.0, x_total = 0.0;
    for (const auto& g : net_.generators) gen_total += g.p_max;
    for (const auto& d : net_.loads) load_total += d.demand;
    for (const auto& s : net_.ess) ess_total += s.p_rated / s.eta_converter;
    for (const auto& l : net_.lines) x_total += l.reactance;
    flow_bound_ = std::max(gen_total, load_total) + ess_total;
    angle_bound_ = flow_bound_ * x_total;
    model_.record_big_m("flow", flow_bound_);
    model_.record_big_m("angle", angle_bound_);
    model_.record_big_m("status", 1.0);

    for (std::size_t k = horizon_.start - 1; k <= last_step(); ++k) declare_step(k);
    for (std::size_t s = 0; s < net_.num_ess(); ++s)
        terminal_soc_.push_back(model_.add_variable(0.0, net_.ess[s].e_max, VarKind::continuous,
                                                    tag("soc", s, last_step() + 1)));
    pin_step(horizon_.start - 1, horizon_.history.back());
}

int RestorationModel::index(std::size_t k) const {
    if (k + 1 < horizon_.start || k > last_step()) throw ModelError("step " + std::to_string(k) + " outside the window");
    return static_cast<int>(k + 1 - horizon_.start);
}

const StepVars& RestorationModel::step(std::size_t k) const { return steps_[static_cast<std::size_t>(index(k))]; }

void RestorationModel::declare_step(std::size_t k) {
    StepVars v;
    const bool window = k >= horizon_.start;
    const std::size_t bsu = net_.black_start_index();
    const int ref_bus = net_.generators[bsu].bus;

    for (std::size_t b = 0; b < net_.num_buses(); ++b) v.bus.push_back(model_.add_binary(tag("bb", b, k)));
    for (std::size_t l = 0; l < net_.num_lines(); ++l) v.line.push_back(model_.add_binary(tag("bl", l, k)));
    for (std::size_t d = 0; d < net_.num_loads(); ++d) v.load.push_back(model_.add_binary(tag("bd", d, k)));
    for (std::size_t g = 0; g < net_.num_generators(); ++g) {
        const auto& gen = net_.generators[g];
        const double lo = gen.black_start ? 1.0 : 0.0;
        v.gen.push_back(model_.add_variable(lo, 1.0, VarKind::binary, tag("bg", g, k)));
        v.gen_crank.push_back(model_.add_variable(0.0, 1.0, VarKind::continuous, tag("bgc", g, k)));
        v.gen_ramp.push_back(model_.add_variable(0.0, 1.0, VarKind::continuous, tag("bgr", g, k)));
        v.gen_online.push_back(model_.add_variable(0.0, 1.0, VarKind::continuous, tag("bgo", g, k)));
        v.p_gen.push_back(model_.add_variable(-gen.crank_power, gen.p_max, VarKind::continuous, tag("pg", g, k)));
        const double pr_hi = std::max(-0.5 * gen.ramp, (gen.ramp_steps - 0.5) * gen.ramp);
        v.p_ramp_ref.push_back(model_.add_variable(-0.5 * gen.ramp, pr_hi, VarKind::continuous, tag("pr", g, k)));
    }
    for (std::size_t b = 0; b < net_.num_buses(); ++b) {
        const double bound = static_cast<int>(b) == ref_bus ? 0.0 : angle_bound_;
        v.theta.push_back(model_.add_variable(-bound, bound, VarKind::continuous, tag("th", b, k)));
    }
    for (std::size_t l = 0; l < net_.num_lines(); ++l)
        v.p_line.push_back(model_.add_variable(-flow_bound_, flow_bound_, VarKind::continuous, tag("pl", l, k)));
    for (std::size_t s = 0; s < net_.num_ess(); ++s) {
        const auto& e = net_.ess[s];
        v.ess.push_back(model_.add_binary(tag("bs", s, k)));
        const double inj_lo = -e.p_rated / e.eta_converter, inj_hi = e.p_rated * e.eta_converter;
        v.p_ess.push_back(model_.add_variable(inj_lo, inj_hi, VarKind::continuous, tag("ps", s, k)));
        v.p_ess_in.push_back(model_.add_variable(0.0, e.p_rated, VarKind::continuous, tag("psin", s, k)));
        v.p_ess_out.push_back(model_.add_variable(0.0, e.p_rated, VarKind::continuous, tag("psout", s, k)));
        v.ess_charging.push_back(model_.add_binary(tag("bsin", s, k)));
        v.ess_discharging.push_back(model_.add_binary(tag("bsout", s, k)));
        v.soc.push_back(model_.add_variable(0.0, e.e_max, VarKind::continuous, tag("soc", s, k)));
        if (window)
            v.delta_p_ess_ref.push_back(
                model_.add_variable(inj_lo - inj_hi, inj_hi - inj_lo, VarKind::continuous, tag("dps", s, k)));
    }
    steps_.push_back(std::move(v));
}

void RestorationModel::pin_step(std::size_t k, const RestorationState& st) {
    const StepVars& v = step(k);
    auto pin = [&](const std::vector<int>& ids, const auto& values, bool round) {
        if (ids.size() != values.size()) throw ModelError("committed state does not match the network at step " +
                                                          std::to_string(k));
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const double x = round ? std::round(static_cast<double>(values[i])) : static_cast<double>(values[i]);
            model_.fix(ids[i], x);
        }
    };
    pin(v.bus, st.bus, true);
    pin(v.line, st.line, true);
    pin(v.load, st.load, true);
    pin(v.gen, st.gen, true);
    pin(v.gen_crank, st.gen_crank, true);
    pin(v.gen_ramp, st.gen_ramp, true);
    pin(v.gen_online, st.gen_online, true);
    pin(v.p_gen, st.p_gen, false);
    pin(v.p_ramp_ref, st.p_ramp_ref, false);
    pin(v.theta, st.theta, false);
    pin(v.p_line, st.p_line, false);
    pin(v.ess, st.ess, true);
    pin(v.p_ess, st.p_ess, false);
    pin(v.p_ess_in, st.p_ess_in, false);
    pin(v.p_ess_out, st.p_ess_out, false);
    pin(v.ess_charging, st.ess_charging, true);
    pin(v.ess_discharging, st.ess_discharging, true);
    pin(v.soc, st.soc, false);
}

LinearExpr RestorationModel::gen_status(std::size_t gen, long k) const {
    if (k < 0) return LinearExpr(net_.generators[gen].black_start ? 1.0 : 0.0);
    const auto uk = static_cast<std::size_t>(k);
    if (uk + 1 < horizon_.start) return LinearExpr(static_cast<double>(horizon_.history[uk].gen[gen]));
    return var(step(uk).gen[gen]);
}

void RestorationModel::build_status_logic() {
    const auto& initial = horizon_.history.front();
    for (std::size_t k = first_step(); k <= last_step(); ++k) {
        const StepVars& now = step(k);
        const StepVars& prev = step(k - 1);

        auto family = [&](const char* name, const std::vector<int>& a, const std::vector<int>& b) {
            LinearExpr added;
            for (std::size_t i = 0; i < a.size(); ++i) {
                model_.add_constraint(var(a[i]) - var(b[i]), RowSense::greater_equal, 0.0, tag(name, i, k) + "_stay");
                added += var(a[i]) - var(b[i]);
            }
            if (!a.empty()) model_.add_constraint(added, RowSense::less_equal, 1.0, tag(name, k) + "_one");
        };
        family("bus", now.bus, prev.bus);
        family("line", now.line, prev.line);
        family("load", now.load, prev.load);
        family("gen", now.gen, prev.gen);
        family("ess", now.ess, prev.ess);

        for (std::size_t l = 0; l < net_.num_lines(); ++l) {
            const auto& line = net_.lines[l];
            const auto from = static_cast<std::size_t>(line.from), to = static_cast<std::size_t>(line.to);
            model_.add_constraint(var(now.line[l]) - var(now.bus[from]), RowSense::less_equal, 0.0,
                                  tag("line_from", l, k));
            model_.add_constraint(var(now.line[l]) - var(now.bus[to]), RowSense::less_equal, 0.0, tag("line_to", l, k));
            model_.add_constraint(var(now.line[l]) - var(prev.bus[from]) - var(prev.bus[to]), RowSense::less_equal,
                                  0.0, tag("line_reach", l, k));
        }
        for (std::size_t b = 0; b < net_.num_buses(); ++b) {
            LinearExpr incident;
            for (std::size_t l = 0; l < net_.num_lines(); ++l)
                if (inc_.a_l(b, l)) incident.add(now.line[l], 1.0);
            incident.add(now.bus[b], -1.0);
            model_.add_constraint(incident, RowSense::greater_equal, -static_cast<double>(initial.bus[b]),
                                  tag("bus_fed", b, k));
        }
        for (std::size_t d = 0; d < net_.num_loads(); ++d)
            model_.add_constraint(var(now.load[d]) - var(now.bus[static_cast<std::size_t>(net_.loads[d].bus)]),
                                  RowSense::less_equal, 0.0, tag("load_bus", d, k));
        for (std::size_t s = 0; s < net_.num_ess(); ++s)
            model_.add_constraint(var(now.ess[s]) - var(now.bus[static_cast<std::size_t>(net_.ess[s].bus)]),
                                  RowSense::less_equal, 0.0, tag("ess_bus", s, k));
        for (std::size_t g = 0; g < net_.num_generators(); ++g)
            model_.add_constraint(var(now.gen[g]) - var(prev.bus[static_cast<std::size_t>(net_.generators[g].bus)]),
                                  RowSense::less_equal, 0.0, tag("gen_bus", g, k));
    }
}

void RestorationModel::build_power_flow() {
    for (std::size_t k = first_step(); k <= last_step(); ++k) {
        const StepVars& v = step(k);
        for (std::size_t b = 0; b < net_.num_buses(); ++b) {
            LinearExpr balance;
            for (std::size_t g = 0; g < net_.num_generators(); ++g)
                if (inc_.a_g(b, g)) balance.add(v.p_gen[g], 1.0);
            for (std::size_t d = 0; d < net_.num_loads(); ++d)
                if (inc_.a_d(b, d)) balance.add(v.load[d], -net_.loads[d].demand);
            for (std::size_t l = 0; l < net_.num_lines(); ++l)
                if (inc_.a(b, l)) balance.add(v.p_line[l], -static_cast<double>(inc_.a(b, l)));
            for (std::size_t s = 0; s < net_.num_ess(); ++s)
                if (inc_.a_s(b, s)) balance.add(v.p_ess[s], 1.0);
            model_.add_constraint(balance, RowSense::equal, 0.0, tag("balance", b, k));
        }
        for (std::size_t l = 0; l < net_.num_lines(); ++l) {
            const auto& line = net_.lines[l];
            const double m = flow_bound_ + 2.0 * angle_bound_ / line.reactance;
            // P_l - (theta_from - theta_to)/x within +-M (1 - b_l)
            LinearExpr dc = var(v.p_line[l]) - var(v.theta[static_cast<std::size_t>(line.from)], 1.0 / line.reactance) +
                            var(v.theta[static_cast<std::size_t>(line.to)], 1.0 / line.reactance);
            model_.add_constraint(dc + var(v.line[l], m), RowSense::less_equal, m, tag("dcpf", l, k) + "_hi");
            model_.add_constraint(dc - var(v.line[l], m), RowSense::greater_equal, -m, tag("dcpf", l, k) + "_lo");
            model_.add_constraint(var(v.p_line[l]) - var(v.line[l], flow_bound_), RowSense::less_equal, 0.0,
                                  tag("flow_off", l, k) + "_hi");
            model_.add_constraint(var(v.p_line[l]) + var(v.line[l], flow_bound_), RowSense::greater_equal, 0.0,
                                  tag("flow_off", l, k) + "_lo");
            model_.record_big_m("dcpf_line_" + std::to_string(l), m);
        }
        for (std::size_t b = 0; b < net_.num_buses(); ++b) {
            model_.add_constraint(var(v.theta[b]) - var(v.bus[b], angle_bound_), RowSense::less_equal, 0.0,
                                  tag("angle_off", b, k) + "_hi");
            model_.add_constraint(var(v.theta[b]) + var(v.bus[b], angle_bound_), RowSense::greater_equal, 0.0,
                                  tag("angle_off", b, k) + "_lo");
        }
    }
}

void RestorationModel::build_nbsu_phases() {
    for (std::size_t k = first_step(); k <= last_step(); ++k) {
        const StepVars& v = step(k);
        const StepVars& p = step(k - 1);
        const auto lk = static_cast<long>(k);
        for (std::size_t g = 0; g < net_.num_generators(); ++g) {
            const auto& gen = net_.generators[g];
            const long tc = gen.crank_steps, tr = gen.ramp_steps;
            const double r = gen.ramp;

            // Phase identities.
            model_.add_constraint(var(v.gen_crank[g]) - var(v.gen[g]) + gen_status(g, lk - tc), RowSense::equal, 0.0,
                                  tag("phase_crank", g, k));
            model_.add_constraint(var(v.gen_ramp[g]) - gen_status(g, lk - tc) + gen_status(g, lk - tc - tr),
                                  RowSense::equal, 0.0, tag("phase_ramp", g, k));
            model_.add_constraint(var(v.gen_online[g]) - var(v.gen[g]) + var(v.gen_crank[g]) + var(v.gen_ramp[g]),
                                  RowSense::equal, 0.0, tag("phase_online", g, k));

            const double m_out = std::max(gen.p_max, (tr + 1) * r) + gen.crank_power;
            // Cranking: P_g = -P_c.
            model_.add_constraint(var(v.p_gen[g]) + var(v.gen_crank[g], m_out), RowSense::less_equal,
                                  m_out - gen.crank_power, tag("crank_out", g, k) + "_hi");
            model_.add_constraint(var(v.p_gen[g]) - var(v.gen_crank[g], m_out), RowSense::greater_equal,
                                  -m_out - gen.crank_power, tag("crank_out", g, k) + "_lo");
            // Ramping: P_g = P_r.
            const double m_tie = gen.p_max + gen.crank_power + (tr + 1) * r;
            model_.add_constraint(var(v.p_gen[g]) - var(v.p_ramp_ref[g]) + var(v.gen_ramp[g], m_tie),
                                  RowSense::less_equal, m_tie, tag("ramp_out", g, k) + "_hi");
            model_.add_constraint(var(v.p_gen[g]) - var(v.p_ramp_ref[g]) - var(v.gen_ramp[g], m_tie),
                                  RowSense::greater_equal, -m_tie, tag("ramp_out", g, k) + "_lo");
            // Online limits, relaxed while cranking or ramping.
            model_.add_constraint(var(v.p_gen[g]) - var(v.gen_online[g], gen.p_min) + var(v.gen_crank[g], m_out) +
                                      var(v.gen_ramp[g], m_out),
                                  RowSense::greater_equal, 0.0, tag("online_out", g, k) + "_lo");
            model_.add_constraint(var(v.p_gen[g]) - var(v.gen_online[g], gen.p_max) - var(v.gen_crank[g], m_out) -
                                      var(v.gen_ramp[g], m_out),
                                  RowSense::less_equal, 0.0, tag("online_out", g, k) + "_hi");
            // Online ramp limit.
            const double m_step = gen.p_max + gen.crank_power;
            const LinearExpr dp = var(v.p_gen[g]) - var(p.p_gen[g]);
            model_.add_constraint(dp + var(v.gen_online[g], m_step), RowSense::less_equal, r + m_step,
                                  tag("online_ramp", g, k) + "_hi");
            model_.add_constraint(dp - var(v.gen_online[g], m_step), RowSense::greater_equal, -r - m_step,
                                  tag("online_ramp", g, k) + "_lo");
            // Ramp reference: -r/2 outside ramping, +r per ramping step.
            const double m_ref = (tr + 1) * r;
            model_.add_constraint(var(v.p_ramp_ref[g]) - var(v.gen_ramp[g], m_ref), RowSense::less_equal, -0.5 * r,
                                  tag("ramp_ref_idle", g, k) + "_hi");
            model_.add_constraint(var(v.p_ramp_ref[g]) + var(v.gen_ramp[g], m_ref), RowSense::greater_equal, -0.5 * r,
                                  tag("ramp_ref_idle", g, k) + "_lo");
            const double m_inc = (tr + 2) * r;
            const LinearExpr dr = var(v.p_ramp_ref[g]) - var(p.p_ramp_ref[g]);
            model_.add_constraint(dr + var(v.gen_ramp[g], m_inc), RowSense::less_equal, r + m_inc,
                                  tag("ramp_ref_step", g, k) + "_hi");
            model_.add_constraint(dr - var(v.gen_ramp[g], m_inc), RowSense::greater_equal, r - m_inc,
                                  tag("ramp_ref_step", g, k) + "_lo");
            model_.record_big_m("gen_output_" + std::to_string(g), m_out);
        }
    }
}

void RestorationModel::build_ess() {
    if (net_.num_ess() == 0) return;
    const double hours = net_.step_minutes / 60.0;
    for (std::size_t k = first_step() - 1; k <= last_step(); ++k) {
        const StepVars& v = step(k);
        for (std::size_t s = 0; s < net_.num_ess(); ++s) {
            const auto& e = net_.ess[s];
            const int next_soc = k == last_step() ? terminal_soc_[s] : step(k + 1).soc[s];
            model_.add_constraint(var(next_soc) - var(v.soc[s]) - var(v.p_ess_in[s], hours * e.eta_storage) +
                                      var(v.p_ess_out[s], hours / e.eta_storage),
                                  RowSense::equal, 0.0, tag("soc_update", s, k));
            if (k < first_step()) continue;

            model_.add_constraint(var(v.p_ess[s]) - var(v.p_ess_out[s], e.eta_converter) +
                                      var(v.p_ess_in[s], 1.0 / e.eta_converter),
                                  RowSense::equal, 0.0, tag("ess_injection", s, k));
            model_.add_constraint(var(v.p_ess_in[s]) - var(v.ess_charging[s], e.p_rated), RowSense::less_equal, 0.0,
                                  tag("ess_charge_cap", s, k));
            model_.add_constraint(var(v.p_ess_out[s]) - var(v.ess_discharging[s], e.p_rated), RowSense::less_equal,
                                  0.0, tag("ess_discharge_cap", s, k));
            model_.add_constraint(var(v.ess_charging[s]) + var(v.ess_discharging[s]) - var(v.ess[s]),
                                  RowSense::less_equal, 0.0, tag("ess_mode", s, k));
            const LinearExpr dps = var(v.p_ess[s]) - var(step(k - 1).p_ess[s]);
            model_.add_constraint(var(v.delta_p_ess_ref[s]) - dps, RowSense::equal, 0.0, tag("ess_setpoint", s, k));
            if (k >= 2) add_range(model_, dps, -e.ramp, e.ramp, tag("ess_ramp", s, k));
        }
    }
}

void RestorationModel::build_objective() {
    LinearExpr obj;
    const auto& w = horizon_.weights;
    for (std::size_t k = first_step(); k <= last_step(); ++k) {
        const StepVars& v = step(k);
        for (std::size_t g = 0; g < v.gen.size(); ++g) obj.add(v.gen[g], w.gen[g]);
        for (std::size_t d = 0; d < v.load.size(); ++d) obj.add(v.load[d], w.load[d]);
        for (std::size_t l = 0; l < v.line.size(); ++l) obj.add(v.line[l], w.line[l]);
        for (std::size_t s = 0; s < v.ess.size(); ++s) obj.add(v.ess[s], w.ess[s]);
    }
    model_.set_objective(ObjectiveSense::maximize, obj);
}

void RestorationModel::build_all() {
    build_status_logic();
    build_power_flow();
    build_nbsu_phases();
    build_ess();
    build_objective();
}

LinearExpr RestorationModel::step_imbalance_expr(std::size_t k) const {
    if (k < first_step() || k > last_step()) throw ModelError("imbalance requested outside the window");
    const StepVars& v = step(k);
    const StepVars& p = step(k - 1);
    LinearExpr e;
    for (std::size_t d = 0; d < net_.num_loads(); ++d) {
        e.add(v.load[d], net_.loads[d].demand);
        e.add(p.load[d], -net_.loads[d].demand);
    }
    for (std::size_t g = 0; g < net_.num_generators(); ++g) {
        e.add(v.gen_crank[g], net_.generators[g].crank_power);
        e.add(p.gen_crank[g], -net_.generators[g].crank_power);
    }
    return e;
}

void RestorationModel::add_nadir_constraints(const std::vector<double>& g0, const std::vector<std::vector<double>>& gs) {
    if (g0.size() != horizon_.length || gs.size() != horizon_.length)
        throw ModelError("nadir coefficients need one entry per window step (" + std::to_string(horizon_.length) + ")");
    for (std::size_t i = 0; i < horizon_.length; ++i) {
        if (gs[i].size() != net_.num_ess()) throw ModelError("nadir ESS coefficients do not match the storage units");
        const std::size_t k = first_step() + i;
        LinearExpr row = step_imbalance_expr(k);
        for (std::size_t s = 0; s < net_.num_ess(); ++s) row.add(step(k).delta_p_ess_ref[s], -gs[i][s]);
        model_.add_constraint(row, RowSense::less_equal, g0[i], tag("nadir", k));
    }
    nadir_added_ = true;
}

void RestorationModel::add_five_percent_rule() {
    for (std::size_t k = first_step(); k <= last_step(); ++k) {
        LinearExpr row = step_imbalance_expr(k);
        for (std::size_t g = 0; g < net_.num_generators(); ++g)
            row.add(step(k).gen_online[g], -0.05 * net_.generators[g].p_max);
        model_.add_constraint(row, RowSense::less_equal, 0.0, tag("five_percent", k));
    }
}

void RestorationModel::pin_statuses_to_previous(std::size_t k) {
    const StepVars& v = step(k);
    const StepVars& p = step(k - 1);
    auto tie = [&](const std::vector<int>& a, const std::vector<int>& b, const char* name) {
        for (std::size_t i = 0; i < a.size(); ++i)
            model_.add_constraint(var(a[i]) - var(b[i]), RowSense::equal, 0.0, tag(name, i, k) + "_wait");
    };
    tie(v.bus, p.bus, "bus");
    tie(v.line, p.line, "line");
    tie(v.load, p.load, "load");
    tie(v.gen, p.gen, "gen");
    tie(v.ess, p.ess, "ess");
}

RestorationState RestorationModel::extract_state(std::size_t k, const std::vector<double>& x) const {
    const StepVars& v = step(k);
    auto ints = [&](const std::vector<int>& ids) {
        std::vector<int> out;
        for (int id : ids) out.push_back(static_cast<int>(std::lround(x.at(static_cast<std::size_t>(id)))));
        return out;
    };
    auto reals = [&](const std::vector<int>& ids) {
        std::vector<double> out;
        for (int id : ids) {
            const double val = x.at(static_cast<std::size_t>(id));
            out.push_back(std::abs(val) < 1e-12 ? 0.0 : val);
        }
        return out;
    };
    RestorationState st;
    st.bus = ints(v.bus);
    st.line = ints(v.line);
    st.load = ints(v.load);
    st.gen = ints(v.gen);
    st.ess = ints(v.ess);
    st.gen_crank = ints(v.gen_crank);
    st.gen_ramp = ints(v.gen_ramp);
    st.gen_online = ints(v.gen_online);
    st.ess_charging = ints(v.ess_charging);
    st.ess_discharging = ints(v.ess_discharging);
    st.p_gen = reals(v.p_gen);
    st.p_ramp_ref = reals(v.p_ramp_ref);
    st.theta = reals(v.theta);
    st.p_line = reals(v.p_line);
    st.p_ess = reals(v.p_ess);
    st.p_ess_in = reals(v.p_ess_in);
    st.p_ess_out = reals(v.p_ess_out);
    st.soc = reals(v.soc);
    if (k >= first_step()) {
        st.delta_p_e = step_imbalance_expr(k).evaluate(x);
        st.delta_p_ess_ref = reals(v.delta_p_ess_ref);
    } else {
        st.delta_p_ess_ref.assign(net_.num_ess(), 0.0);
    }
    return st;
}

std::vector<double> RestorationModel::assignment_from_states(const std::vector<RestorationState>& states) const {
    if (states.size() <= last_step()) throw ModelError("plan is shorter than the model window");
    std::vector<double> x(model_.num_variables(), 0.0);
    auto put = [&](const std::vector<int>& ids, const auto& values) {
        if (ids.size() != values.size()) throw ModelError("plan state does not match the network");
        for (std::size_t i = 0; i < ids.size(); ++i) x[static_cast<std::size_t>(ids[i])] = static_cast<double>(values[i]);
    };
    for (std::size_t k = first_step() - 1; k <= last_step(); ++k) {
        const StepVars& v = step(k);
        const auto& st = states[k];
        put(v.bus, st.bus);
        put(v.line, st.line);
        put(v.load, st.load);
        put(v.gen, st.gen);
        put(v.ess, st.ess);
        put(v.gen_crank, st.gen_crank);
        put(v.gen_ramp, st.gen_ramp);
        put(v.gen_online, st.gen_online);
        put(v.p_gen, st.p_gen);
        put(v.p_ramp_ref, st.p_ramp_ref);
        put(v.theta, st.theta);
        put(v.p_line, st.p_line);
        put(v.p_ess, st.p_ess);
        put(v.p_ess_in, st.p_ess_in);
        put(v.p_ess_out, st.p_ess_out);
        put(v.ess_charging, st.ess_charging);
        put(v.ess_discharging, st.ess_discharging);
        put(v.soc, st.soc);
        if (k >= first_step())
            for (std::size_t s = 0; s < net_.num_ess(); ++s)
                x[static_cast<std::size_t>(v.delta_p_ess_ref[s])] = st.p_ess[s] - states[k - 1].p_ess[s];
    }
    const double hours = net_.step_minutes / 60.0;
    const auto& last = states[last_step()];
    for (std::size_t s = 0; s < net_.num_ess(); ++s) {
        const auto& e = net_.ess[s];
        x[static_cast<std::size_t>(terminal_soc_[s])] =
            last.soc[s] + hours * (e.eta_storage * last.p_ess_in[s] - last.p_ess_out[s] / e.eta_storage);
    }
    return x;
}

FeasibilityReport check_plan(const NetworkModel& net, const RestorationPlan& plan, double feas_tol) {
    if (plan.steps.empty()) throw ModelError("plan has no initial state");
    if (plan.last_step() == 0) return {};
    HorizonSpec h;
    h.start = 1;
    h.length = plan.last_step();
    h.history = {plan.steps.front()};
    h.weights = default_weights(net);
    RestorationModel rm(net, std::move(h));
    rm.build_all();
    return check_feasible(rm.model(), rm.assignment_from_states(plan.steps), feas_tol);
}

}  // namespace blackstart
