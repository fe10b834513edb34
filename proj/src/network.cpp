#include "blackstart/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "blackstart/errors.hpp"

namespace blackstart {

using json = nlohmann::json;

namespace {

template <typename T>
T required(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + ": missing field '" + key + "'");
    try {
        return it->get<T>();
    } catch (const json::exception& e) {
        throw ParseError(where + ": field '" + key + "' has wrong type (" + e.what() + ")");
    }
}

template <typename T>
T optional(const json& obj, const char* key, T fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    return it->get<T>();
}

std::string element_name(const json& obj, const std::string& prefix, std::size_t i) {
    return optional<std::string>(obj, "name", prefix + std::to_string(i + 1));
}

}  // namespace

double to_system_base(double machine_pu, double s_machine, double s_sys) {
    return machine_pu * s_machine / s_sys;
}

double to_machine_base(double system_pu, double s_machine, double s_sys) {
    return system_pu * s_sys / s_machine;
}

std::size_t NetworkModel::black_start_index() const {
    for (std::size_t i = 0; i < generators.size(); ++i)
        if (generators[i].black_start) return i;
    throw ValidationError("network has no black-start unit");
}

int NetworkModel::bus_index(int bus_id) const {
    for (std::size_t i = 0; i < bus_ids.size(); ++i)
        if (bus_ids[i] == bus_id) return static_cast<int>(i);
    throw ValidationError("unknown bus id " + std::to_string(bus_id));
}

NetworkModel NetworkModel::without_ess() const {
    NetworkModel copy = *this;
    copy.ess.clear();
    return copy;
}

void NetworkModel::validate() const {
    auto fail = [](const std::string& what) { throw ValidationError(what); };
    auto check_bus = [&](int bus, const std::string& who) {
        if (bus < 0 || static_cast<std::size_t>(bus) >= bus_ids.size())
            fail(who + " references a nonexistent bus");
    };

    if (!(s_sys > 0.0)) fail("s_sys must be positive");
    if (!(f_base > 0.0)) fail("f_base must be positive");
    if (!(step_minutes > 0.0)) fail("step length t_a must be positive");
    if (bus_ids.empty()) fail("network has no buses");
    std::set<int> seen(bus_ids.begin(), bus_ids.end());
    if (seen.size() != bus_ids.size()) fail("duplicate bus ids");

    for (const auto& l : lines) {
        check_bus(l.from, "line " + l.name);
        check_bus(l.to, "line " + l.name);
        if (l.from == l.to) fail("line " + l.name + " connects a bus to itself");
        if (!(l.reactance > 0.0)) fail("line " + l.name + " must have positive reactance");
    }
    for (const auto& d : loads) {
        check_bus(d.bus, "load " + d.name);
        if (!(d.demand >= 0.0)) fail("load " + d.name + " has negative demand");
    }

    int black_start_units = 0;
    for (const auto& g : generators) {
        const std::string who = "generator " + g.name;
        check_bus(g.bus, who);
        if (g.black_start) {
            ++black_start_units;
            if (g.crank_steps != 0 || g.ramp_steps != 0)
                fail(who + ": black-start unit must have zero cranking and ramping steps");
        }
        if (g.crank_steps < 0 || g.ramp_steps < 0) fail(who + ": negative start-up durations");
        if (!(g.p_min >= 0.0 && g.p_min <= g.p_max)) fail(who + ": requires 0 <= p_min <= p_max");
        if (!(g.crank_power >= 0.0)) fail(who + ": negative cranking power");
        if (!(g.ramp > 0.0)) fail(who + ": ramp rate must be positive");
        if (!(g.inertia > 0.0)) fail(who + ": inertia constant must be positive");
        if (!(g.s_mva > 0.0)) fail(who + ": machine base must be positive");
        const double gain_sum = std::accumulate(g.stage_gain.begin(), g.stage_gain.end(), 0.0);
        if (std::abs(gain_sum - 1.0) > 1e-9) fail(who + ": turbine fractions K1+K3+K5+K7 must equal 1");
        for (double t : g.stage_time)
            if (!(t >= 0.0)) fail(who + ": negative turbine time constant");
        if (!(g.gov_t1 >= 0.0 && g.gov_t2 >= 0.0)) fail(who + ": negative governor time constant");
        if (g.provides_pfr) {
            if (!(g.valve_rate > 0.0)) fail(who + ": PFR units need a positive valve rate limit U_o");
            if (!(g.gov_t3 > 0.0)) fail(who + ": PFR units need a positive T3");
            if (!(g.droop_gain > 0.0)) fail(who + ": PFR units need a positive droop gain");
        }
    }
    if (black_start_units != 1)
        fail("network must have exactly one black-start unit, found " + std::to_string(black_start_units));

    for (const auto& s : ess) {
        const std::string who = "ESS " + s.name;
        check_bus(s.bus, who);
        if (!(s.p_rated > 0.0)) fail(who + ": rated power must be positive");
        if (!(s.e_init >= 0.0 && s.e_init <= s.e_max)) fail(who + ": requires 0 <= E_init <= E_max");
        if (!(s.tau > 0.0)) fail(who + ": time constant must be positive");
        if (!(s.eta_converter > 0.0 && s.eta_converter <= 1.0)) fail(who + ": converter efficiency outside (0,1]");
        if (!(s.eta_storage > 0.0 && s.eta_storage <= 1.0)) fail(who + ": storage efficiency outside (0,1]");
        if (!(s.ramp > 0.0)) fail(who + ": ramp rate must be positive");
    }
}

NetworkModel parse_network(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("network file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("network file must contain a JSON object");

    NetworkModel net;
    net.name = optional<std::string>(doc, "name", "network");
    net.s_sys = required<double>(doc, "s_sys_mva", "network");
    net.f_base = optional<double>(doc, "f_base_hz", 60.0);
    net.step_minutes = required<double>(doc, "step_minutes", "network");
    if (!(net.s_sys > 0.0)) throw ValidationError("s_sys must be positive");
    const double mw = 1.0 / net.s_sys;

    net.bus_ids = required<std::vector<int>>(doc, "buses", "network");
    auto bus = [&](const json& obj, const std::string& who) {
        const int id = required<int>(obj, "bus", who);
        try {
            return net.bus_index(id);
        } catch (const ValidationError&) {
            throw ValidationError(who + " references nonexistent bus " + std::to_string(id));
        }
    };

    const json empty = json::array();
    const json& lines = doc.contains("lines") ? doc["lines"] : empty;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const json& j = lines[i];
        Line l;
        l.name = element_name(j, "L", i);
        const std::string who = "line " + l.name;
        for (auto [key, dst] : {std::pair{"from", &l.from}, std::pair{"to", &l.to}}) {
            const int id = required<int>(j, key, who);
            try {
                *dst = net.bus_index(id);
            } catch (const ValidationError&) {
                throw ValidationError(who + " references nonexistent bus " + std::to_string(id));
            }
        }
        l.reactance = required<double>(j, "x", who);
        net.lines.push_back(l);
    }

    const json& loads = doc.contains("loads") ? doc["loads"] : empty;
    for (std::size_t i = 0; i < loads.size(); ++i) {
        const json& j = loads[i];
        Load d;
        d.name = element_name(j, "D", i);
        const std::string who = "load " + d.name;
        d.bus = bus(j, who);
        d.demand = required<double>(j, "p_mw", who) * mw;
        net.loads.push_back(d);
    }

    const json& gens = doc.contains("generators") ? doc["generators"] : empty;
    for (std::size_t i = 0; i < gens.size(); ++i) {
        const json& j = gens[i];
        GeneratorSpec g;
        g.name = element_name(j, "G", i);
        const std::string who = "generator " + g.name;
        g.bus = bus(j, who);
        g.black_start = optional<bool>(j, "black_start", false);
        g.crank_power = optional<double>(j, "p_crank_mw", 0.0) * mw;
        g.crank_steps = optional<int>(j, "t_crank_steps", 0);
        g.ramp_steps = optional<int>(j, "t_ramp_steps", 0);
        g.ramp = required<double>(j, "ramp_mw_per_step", who) * mw;
        g.p_min = optional<double>(j, "p_min_mw", 0.0) * mw;
        g.p_max = required<double>(j, "p_max_mw", who) * mw;
        g.inertia = required<double>(j, "h_s", who);
        g.s_mva = optional<double>(j, "s_mva", g.p_max * net.s_sys);
        g.provides_pfr = optional<bool>(j, "pfr", true);
        g.droop_gain = optional<double>(j, "droop", 20.0);
        g.gov_t1 = optional<double>(j, "t1", 0.0);
        g.gov_t2 = optional<double>(j, "t2", 0.0);
        g.gov_t3 = optional<double>(j, "t3", 0.1);
        g.stage_time = {optional<double>(j, "t4", 0.0), optional<double>(j, "t5", 0.0),
                        optional<double>(j, "t6", 0.0), optional<double>(j, "t7", 0.0)};
        g.stage_gain = {optional<double>(j, "k1", 1.0), optional<double>(j, "k3", 0.0),
                        optional<double>(j, "k5", 0.0), optional<double>(j, "k7", 0.0)};
        g.valve_rate = optional<double>(j, "uo_pu_per_s", 0.0);
        net.generators.push_back(g);
    }

    const json& ess = doc.contains("ess") ? doc["ess"] : empty;
    for (std::size_t i = 0; i < ess.size(); ++i) {
        const json& j = ess[i];
        EssSpec s;
        s.name = element_name(j, "S", i);
        const std::string who = "ESS " + s.name;
        s.bus = bus(j, who);
        s.p_rated = required<double>(j, "p_rated_mw", who) * mw;
        s.e_max = required<double>(j, "e_max_mwh", who) * mw;
        s.e_init = optional<double>(j, "e_init_mwh", 0.0) * mw;
        s.eta_converter = optional<double>(j, "eta_con", 1.0);
        s.eta_storage = optional<double>(j, "eta_s", 1.0);
        s.ramp = required<double>(j, "ramp_mw_per_step", who) * mw;
        s.tau = required<double>(j, "tau_s", who);
        net.ess.push_back(s);
    }

    net.validate();
    return net;
}

NetworkModel load_network(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open network file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_network(buf.str());
}

std::string serialize_network(const NetworkModel& net) {
    const double s = net.s_sys;
    json doc;
    doc["name"] = net.name;
    doc["s_sys_mva"] = net.s_sys;
    doc["f_base_hz"] = net.f_base;
    doc["step_minutes"] = net.step_minutes;
    doc["buses"] = net.bus_ids;

    doc["lines"] = json::array();
    for (const auto& l : net.lines)
        doc["lines"].push_back({{"name", l.name},
                                {"from", net.bus_ids[l.from]},
                                {"to", net.bus_ids[l.to]},
                                {"x", l.reactance}});
    doc["loads"] = json::array();
    for (const auto& d : net.loads)
        doc["loads"].push_back({{"name", d.name}, {"bus", net.bus_ids[d.bus]}, {"p_mw", d.demand * s}});
    doc["generators"] = json::array();
    for (const auto& g : net.generators) {
        doc["generators"].push_back({
            {"name", g.name},
            {"bus", net.bus_ids[g.bus]},
            {"black_start", g.black_start},
            {"p_crank_mw", g.crank_power * s},
            {"t_crank_steps", g.crank_steps},
            {"t_ramp_steps", g.ramp_steps},
            {"ramp_mw_per_step", g.ramp * s},
            {"p_min_mw", g.p_min * s},
            {"p_max_mw", g.p_max * s},
            {"h_s", g.inertia},
            {"s_mva", g.s_mva},
            {"pfr", g.provides_pfr},
            {"droop", g.droop_gain},
            {"t1", g.gov_t1},
            {"t2", g.gov_t2},
            {"t3", g.gov_t3},
            {"t4", g.stage_time[0]},
            {"t5", g.stage_time[1]},
            {"t6", g.stage_time[2]},
            {"t7", g.stage_time[3]},
            {"k1", g.stage_gain[0]},
            {"k3", g.stage_gain[1]},
            {"k5", g.stage_gain[2]},
            {"k7", g.stage_gain[3]},
            {"uo_pu_per_s", g.valve_rate},
        });
    }
    doc["ess"] = json::array();
    for (const auto& e : net.ess)
        doc["ess"].push_back({{"name", e.name},
                              {"bus", net.bus_ids[e.bus]},
                              {"p_rated_mw", e.p_rated * s},
                              {"e_max_mwh", e.e_max * s},
                              {"e_init_mwh", e.e_init * s},
                              {"eta_con", e.eta_converter},
                              {"eta_s", e.eta_storage},
                              {"ramp_mw_per_step", e.ramp * s},
                              {"tau_s", e.tau}});
    return doc.dump(2) + "\n";
}

IncidenceSet build_incidence(const NetworkModel& net) {
    const std::size_t nb = net.num_buses();
    IncidenceSet inc{DenseMatrix<int>(nb, net.num_lines()), DenseMatrix<int>(nb, net.num_lines()),
                     DenseMatrix<int>(nb, net.num_loads()), DenseMatrix<int>(nb, net.num_generators()),
                     DenseMatrix<int>(nb, net.num_ess())};
    for (std::size_t l = 0; l < net.num_lines(); ++l) {
        inc.a(net.lines[l].from, l) = 1;
        inc.a(net.lines[l].to, l) = -1;
        inc.a_l(net.lines[l].from, l) = 1;
        inc.a_l(net.lines[l].to, l) = 1;
    }
    for (std::size_t d = 0; d < net.num_loads(); ++d) inc.a_d(net.loads[d].bus, d) = 1;
    for (std::size_t g = 0; g < net.num_generators(); ++g) inc.a_g(net.generators[g].bus, g) = 1;
    for (std::size_t s = 0; s < net.num_ess(); ++s) inc.a_s(net.ess[s].bus, s) = 1;
    return inc;
}

std::size_t RestorationState::restored_count() const {
    std::size_t n = 0;
    for (const auto* v : {&bus, &line, &load, &gen, &ess})
        n += static_cast<std::size_t>(std::count(v->begin(), v->end(), 1));
    return n;
}

RestorationState initial_state(const NetworkModel& net) {
    const std::size_t nb = net.num_buses(), nl = net.num_lines(), nd = net.num_loads(),
                      ng = net.num_generators(), ns = net.num_ess();
    RestorationState s;
    s.bus.assign(nb, 0);
    s.line.assign(nl, 0);
    s.load.assign(nd, 0);
    s.gen.assign(ng, 0);
    s.ess.assign(ns, 0);
    s.gen_crank.assign(ng, 0);
    s.gen_ramp.assign(ng, 0);
    s.gen_online.assign(ng, 0);
    s.ess_charging.assign(ns, 0);
    s.ess_discharging.assign(ns, 0);
    s.p_gen.assign(ng, 0.0);
    s.p_ramp_ref.assign(ng, 0.0);
    s.theta.assign(nb, 0.0);
    s.p_line.assign(nl, 0.0);
    s.p_ess.assign(ns, 0.0);
    s.p_ess_in.assign(ns, 0.0);
    s.p_ess_out.assign(ns, 0.0);
    s.soc.assign(ns, 0.0);
    s.delta_p_ess_ref.assign(ns, 0.0);
    s.delta_p_gen_ref.assign(ng, 0.0);

    const std::size_t bsu = net.black_start_index();
    s.gen[bsu] = 1;
    s.gen_online[bsu] = 1;
    s.bus[net.generators[bsu].bus] = 1;
    for (std::size_t g = 0; g < ng; ++g) s.p_ramp_ref[g] = -0.5 * net.generators[g].ramp;
    for (std::size_t i = 0; i < ns; ++i) s.soc[i] = net.ess[i].e_init;
    return s;
}

bool fully_restored(const NetworkModel& net, const RestorationState& state) {
    auto all_on = [](const std::vector<int>& v) {
        return std::all_of(v.begin(), v.end(), [](int b) { return b == 1; });
    };
    return net.num_buses() == state.bus.size() && all_on(state.bus) && all_on(state.line) && all_on(state.load) && all_on(state.gen) &&
           all_on(state.ess) && all_on(state.gen_online);
}

}  // namespace blackstart
