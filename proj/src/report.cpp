#include "blackstart/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "blackstart/errors.hpp"

namespace blackstart {

namespace {

using json = nlohmann::json;

std::string num(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    std::string s = buf;
    // values that round to zero print without a sign
    if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

double mw(const NetworkModel& net, double pu) { return pu * net.s_sys; }

template <typename T>
std::vector<T> read_vec(const json& j, const char* key) {
    if (!j.contains(key)) return {};
    return j.at(key).get<std::vector<T>>();
}

}  // namespace

std::string step_actions(const NetworkModel& net, const RestorationPlan& plan, std::size_t k) {
    if (k == 0 || k >= plan.steps.size()) return "";
    const RestorationState& a = plan.steps[k - 1];
    const RestorationState& b = plan.steps[k];
    std::string out;
    auto add = [&out](const std::string& what) {
        if (!out.empty()) out += '|';
        out += what;
    };
    auto changed = [](const std::vector<int>& x, const std::vector<int>& y, std::size_t i) {
        return i < x.size() && i < y.size() && x[i] == 0 && y[i] == 1;
    };
    for (std::size_t i = 0; i < net.num_buses(); ++i)
        if (changed(a.bus, b.bus, i)) add("bus:" + std::to_string(net.bus_ids[i]));
    for (std::size_t i = 0; i < net.num_lines(); ++i)
        if (changed(a.line, b.line, i)) add("line:" + net.lines[i].name);
    for (std::size_t i = 0; i < net.num_generators(); ++i)
        if (changed(a.gen, b.gen, i)) add("crank:" + net.generators[i].name);
    for (std::size_t i = 0; i < net.num_generators(); ++i)
        if (changed(a.gen_online, b.gen_online, i)) add("sync:" + net.generators[i].name);
    for (std::size_t i = 0; i < net.num_loads(); ++i)
        if (changed(a.load, b.load, i)) add("load:" + net.loads[i].name);
    for (std::size_t i = 0; i < net.num_ess(); ++i)
        if (changed(a.ess, b.ess, i)) add("ess:" + net.ess[i].name);
    return out;
}

std::string plan_table(const NetworkModel& net, const RestorationPlan& plan) {
    std::ostringstream os;
    os << "step,minute,actions,delta_p_e_mw,g0_mw,restored";
    for (const auto& s : net.ess) os << ',' << s.name << "_p_mw," << s.name << "_ref_change_mw," << s.name << "_soc_mwh";
    os << '\n';
    for (std::size_t k = 0; k < plan.steps.size(); ++k) {
        const RestorationState& st = plan.steps[k];
        os << k << ',' << num(static_cast<double>(k) * net.step_minutes, 1) << ',' << step_actions(net, plan, k) << ','
           << num(mw(net, st.delta_p_e), 4) << ',';
        if (k > 0 && k < plan.frozen_g0.size()) os << num(mw(net, plan.frozen_g0[k]), 4);
        os << ',' << st.restored_count();
        for (std::size_t i = 0; i < net.num_ess(); ++i) {
            const double p = i < st.p_ess.size() ? st.p_ess[i] : 0.0;
            const double d = i < st.delta_p_ess_ref.size() ? st.delta_p_ess_ref[i] : 0.0;
            const double e = i < st.soc.size() ? st.soc[i] : 0.0;
            os << ',' << num(mw(net, p), 4) << ',' << num(mw(net, d), 4) << ',' << num(mw(net, e), 4);
        }
        os << '\n';
    }
    return os.str();
}

std::string simulation_summary(const NetworkModel& net, const PlanSimulation& sim) {
    std::ostringstream os;
    os << "step,minute,delta_p_e_mw,nadir_pu,nadir_hz,t_nadir_s,violated\n";
    for (const auto& s : sim.steps) {
        os << s.step << ',' << num(static_cast<double>(s.step) * net.step_minutes, 1) << ','
           << num(mw(net, s.delta_p_e), 4) << ',' << num(s.nadir, 8) << ',' << num(net.pu_to_hz(s.nadir), 6) << ','
           << num(s.t_nadir, 3) << ',' << (s.violated ? 1 : 0) << '\n';
    }
    return os.str();
}

std::string comparison_table(const NetworkModel& net, const std::vector<ComparisonRow>& rows) {
    std::ostringstream os;
    os << "plan,steps,minutes,complete,worst_nadir_pu,worst_nadir_hz,violations\n";
    for (const auto& r : rows) {
        os << r.label << ',' << r.steps << ',' << num(r.minutes, 1) << ',' << (r.complete ? 1 : 0) << ','
           << num(r.worst_nadir, 8) << ',' << num(net.pu_to_hz(r.worst_nadir), 6) << ',' << r.violations << '\n';
    }
    return os.str();
}

std::string iteration_table(const std::vector<IterationLog>& log) {
    std::ostringstream os;
    os << "iteration,step,window,wait,objective,nodes,lp_iterations,g0_pu\n";
    for (const auto& l : log) {
        os << l.iteration << ',' << l.step << ',' << l.window << ',' << (l.wait ? 1 : 0) << ',' << num(l.objective, 6)
           << ',' << l.nodes << ',' << l.lp_iterations << ',' << num(l.g0, 8) << '\n';
    }
    return os.str();
}

std::string plan_to_json(const RestorationPlan& plan) {
    json steps = json::array();
    for (const auto& s : plan.steps) {
        json j;
        j["bus"] = s.bus;
        j["line"] = s.line;
        j["load"] = s.load;
        j["gen"] = s.gen;
        j["ess"] = s.ess;
        j["gen_crank"] = s.gen_crank;
        j["gen_ramp"] = s.gen_ramp;
        j["gen_online"] = s.gen_online;
        j["ess_charging"] = s.ess_charging;
        j["ess_discharging"] = s.ess_discharging;
        j["p_gen"] = s.p_gen;
        j["p_ramp_ref"] = s.p_ramp_ref;
        j["theta"] = s.theta;
        j["p_line"] = s.p_line;
        j["p_ess"] = s.p_ess;
        j["p_ess_in"] = s.p_ess_in;
        j["p_ess_out"] = s.p_ess_out;
        j["soc"] = s.soc;
        j["delta_p_e"] = s.delta_p_e;
        j["delta_p_ess_ref"] = s.delta_p_ess_ref;
        j["delta_p_gen_ref"] = s.delta_p_gen_ref;
        steps.push_back(std::move(j));
    }
    json root;
    root["complete"] = plan.complete;
    root["frozen_g0"] = plan.frozen_g0;
    root["frozen_gs"] = plan.frozen_gs;
    root["steps"] = std::move(steps);
    return root.dump(1) + "\n";
}

RestorationPlan plan_from_json(const std::string& text) {
    RestorationPlan plan;
    try {
        const json root = json::parse(text);
        plan.complete = root.value("complete", false);
        plan.frozen_g0 = read_vec<double>(root, "frozen_g0");
        plan.frozen_gs = read_vec<std::vector<double>>(root, "frozen_gs");
        for (const auto& j : root.at("steps")) {
            RestorationState s;
            s.bus = read_vec<int>(j, "bus");
            s.line = read_vec<int>(j, "line");
            s.load = read_vec<int>(j, "load");
            s.gen = read_vec<int>(j, "gen");
            s.ess = read_vec<int>(j, "ess");
            s.gen_crank = read_vec<int>(j, "gen_crank");
            s.gen_ramp = read_vec<int>(j, "gen_ramp");
            s.gen_online = read_vec<int>(j, "gen_online");
            s.ess_charging = read_vec<int>(j, "ess_charging");
            s.ess_discharging = read_vec<int>(j, "ess_discharging");
            s.p_gen = read_vec<double>(j, "p_gen");
            s.p_ramp_ref = read_vec<double>(j, "p_ramp_ref");
            s.theta = read_vec<double>(j, "theta");
            s.p_line = read_vec<double>(j, "p_line");
            s.p_ess = read_vec<double>(j, "p_ess");
            s.p_ess_in = read_vec<double>(j, "p_ess_in");
            s.p_ess_out = read_vec<double>(j, "p_ess_out");
            s.soc = read_vec<double>(j, "soc");
            s.delta_p_e = j.value("delta_p_e", 0.0);
            s.delta_p_ess_ref = read_vec<double>(j, "delta_p_ess_ref");
            s.delta_p_gen_ref = read_vec<double>(j, "delta_p_gen_ref");
            plan.steps.push_back(std::move(s));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("plan file: ") + e.what());
    }
    return plan;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string RunManifest::to_json() const {
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(input_hash));
    json j;
    j["command"] = command;
    j["network"] = network_path;
    j["config"] = config;
    j["input_hash"] = hash;
    j["output_dir"] = output_dir;
    j["artifacts"] = artifacts;
    return j.dump(1) + "\n";
}

std::string config_text(const PlannerConfig& config, double limit_hz) {
    std::ostringstream os;
    os << "mode=" << to_string(config.mode) << ";limit_hz=" << num(limit_hz, 6) << ";horizon=" << config.horizon
       << ";ess=" << (config.use_ess ? "on" : "off") << ";rel_gap=" << config.solver.rel_gap
       << ";node_limit=" << config.solver.node_limit;
    return os.str();
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("write failed: " + path.string());
}

}  // namespace blackstart
