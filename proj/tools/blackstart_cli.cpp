// Command-line front end: plan, simulate, compare, export-mps.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blackstart/errors.hpp"
#include "blackstart/freq_dynamics.hpp"
#include "blackstart/milp_model.hpp"
#include "blackstart/network.hpp"
#include "blackstart/planner.hpp"
#include "blackstart/report.hpp"

namespace fs = std::filesystem;
using namespace blackstart;

namespace {

struct CommonArgs {
    std::string net;
    std::string mode = "nadir";
    double limit_hz = 1.0;
    std::size_t horizon = 4;
    std::string ess = "on";
    std::string out = "out";
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_mode) {
    cmd->add_option("--net", a.net, "network file (JSON)")->required()->check(CLI::ExistingFile);
    if (with_mode)
        cmd->add_option("--mode", a.mode, "frequency constraint")
            ->check(CLI::IsMember({"none", "five-percent", "nadir"}))
            ->capture_default_str();
    cmd->add_option("--limit-hz", a.limit_hz, "allowed frequency dip in Hz (magnitude)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--horizon", a.horizon, "rolling-horizon window length in steps")
        ->check(CLI::Range(1, 64))
        ->capture_default_str();
    cmd->add_option("--ess", a.ess, "use storage units")->check(CLI::IsMember({"on", "off"}))->capture_default_str();
    cmd->add_option("--out", a.out, "output directory")->capture_default_str();
}

PlannerConfig make_config(const CommonArgs& a, const NetworkModel& net) {
    PlannerConfig c;
    c.mode = parse_mode(a.mode);
    c.horizon = a.horizon;
    c.use_ess = a.ess == "on";
    c.omega_lim = -net.hz_to_pu(a.limit_hz);
    return c;
}

RunManifest manifest(const std::string& command, const CommonArgs& a, const std::string& config) {
    RunManifest m;
    m.command = command;
    m.network_path = a.net;
    m.config = config;
    m.input_hash = fnv1a64(config, fnv1a64(read_file(a.net)));
    m.output_dir = a.out;
    return m;
}

void emit(const fs::path& dir, const std::string& name, const std::string& text, RunManifest& m) {
    write_file(dir / name, text);
    m.artifacts.push_back(name);
}

int cmd_plan(const CommonArgs& a) {
    const NetworkModel net = load_network(a.net);
    const PlannerConfig cfg = make_config(a, net);
    const PlanResult r = plan(net, cfg);

    RunManifest m = manifest("plan", a, config_text(cfg, a.limit_hz));
    const fs::path dir = a.out;
    emit(dir, "plan.csv", plan_table(r.network, r.plan), m);
    emit(dir, "plan.json", plan_to_json(r.plan), m);
    emit(dir, "iterations.csv", iteration_table(r.log), m);
    write_file(dir / "manifest.json", m.to_json());

    std::printf("%s plan: %zu steps (%.0f min), %s\n", to_string(cfg.mode), r.plan.last_step(),
                static_cast<double>(r.plan.last_step()) * net.step_minutes,
                r.plan.complete ? "complete" : "INCOMPLETE");
    return r.plan.complete ? 0 : 1;
}

int cmd_simulate(const CommonArgs& a, const std::string& plan_path) {
    const NetworkModel full = load_network(a.net);
    const RestorationPlan p = plan_from_json(read_file(plan_path));
    // A plan made with --ess off carries no storage columns.
    const bool no_ess = !p.steps.empty() && p.steps.front().ess.empty() && full.num_ess() > 0;
    const NetworkModel net = no_ess ? full.without_ess() : full;
    const double omega_lim = -net.hz_to_pu(a.limit_hz);

    RunManifest m = manifest("simulate", a, "plan=" + plan_path + ";limit_hz=" + std::to_string(a.limit_hz));
    m.input_hash = fnv1a64(read_file(plan_path), m.input_hash);
    const fs::path dir = a.out;

    PlanSimulation sim;
    if (p.steps.size() > 1) {
        const SimOptions opt;
        sim = simulate_plan(net, p, omega_lim, opt);
        for (std::size_t i = 0; i < sim.steps.size(); ++i) {
            const std::size_t k = sim.steps[i].step;
            const StepScenario sc = scenario_for_step(net, p, k, opt);
            char name[64];
            std::snprintf(name, sizeof name, "trajectory_step_%03zu.csv", k);
            emit(dir, name, trajectory_table(net, sc, sim.trajectories[i]), m);
        }
    }
    emit(dir, "simulation.csv", simulation_summary(net, sim), m);
    write_file(dir / "manifest.json", m.to_json());

    std::printf("%zu disturbance steps, worst nadir %.4f Hz, %zu below -%.3g Hz\n", sim.steps.size(),
                net.pu_to_hz(sim.worst_nadir), sim.violations, a.limit_hz);
    return 0;
}

int cmd_compare(const CommonArgs& a, const std::vector<std::string>& modes) {
    const NetworkModel net = load_network(a.net);
    std::vector<LabeledConfig> configs;
    std::string cfgtext;
    for (const auto& mode : modes) {
        CommonArgs b = a;
        b.mode = mode;
        LabeledConfig lc{mode, make_config(b, net)};
        cfgtext += config_text(lc.config, a.limit_hz) + "\n";
        configs.push_back(std::move(lc));
    }
    const double omega_lim = -net.hz_to_pu(a.limit_hz);
    const auto rows = compare_plans(net, configs, omega_lim);

    RunManifest m = manifest("compare", a, cfgtext);
    const std::string table = comparison_table(net, rows);
    emit(a.out, "compare.csv", table, m);
    write_file(fs::path(a.out) / "manifest.json", m.to_json());
    std::cout << table;
    return 0;
}

int cmd_export(const CommonArgs& a, const std::string& mps_path, const std::string& lp_path) {
    const NetworkModel net = load_network(a.net);
    const PlannerConfig cfg = make_config(a, net);
    const MilpModel model = first_window_model(net, cfg);
    write_file(mps_path, export_mps(model));
    if (!lp_path.empty()) write_file(lp_path, dump_model_text(model));
    std::printf("%zu columns, %zu rows -> %s\n", model.num_variables(), model.num_constraints(), mps_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Black-start restoration planning with frequency-nadir constraints"};
    app.require_subcommand(1);

    CommonArgs plan_args, sim_args, cmp_args, mps_args;
    auto* plan_cmd = app.add_subcommand("plan", "plan a restoration sequence");
    add_common(plan_cmd, plan_args, true);

    auto* sim_cmd = app.add_subcommand("simulate", "simulate every step of a plan");
    add_common(sim_cmd, sim_args, false);
    std::string plan_path;
    sim_cmd->add_option("--plan", plan_path, "plan.json written by 'plan'")->required()->check(CLI::ExistingFile);

    auto* cmp_cmd = app.add_subcommand("compare", "plan and simulate several modes");
    add_common(cmp_cmd, cmp_args, false);
    std::vector<std::string> modes{"none", "five-percent", "nadir"};
    cmp_cmd->add_option("--modes", modes, "modes to compare (comma separated)")
        ->delimiter(',')
        ->check(CLI::IsMember({"none", "five-percent", "nadir"}))
        ->capture_default_str();

    auto* mps_cmd = app.add_subcommand("export-mps", "write the first planning subproblem");
    add_common(mps_cmd, mps_args, true);
    std::string mps_path, lp_path;
    mps_cmd->add_option("--mps", mps_path, "MPS output path")->required();
    mps_cmd->add_option("--lp-text", lp_path, "also write a readable dump");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*plan_cmd) return cmd_plan(plan_args);
        if (*sim_cmd) return cmd_simulate(sim_args, plan_path);
        if (*cmp_cmd) return cmd_compare(cmp_args, modes);
        if (*mps_cmd) return cmd_export(mps_args, mps_path, lp_path);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
