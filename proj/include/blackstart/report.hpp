#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "blackstart/freq_dynamics.hpp"
#include "blackstart/network.hpp"
#include "blackstart/planner.hpp"

namespace blackstart {

// Tables are comma-separated with a header row and a fixed column order.
// Powers are written in MW, energies in MWh, frequencies in pu and Hz.

/// One row per committed step: minute, actions, disturbance, frozen g0,
/// ESS setpoints and state of charge.
std::string plan_table(const NetworkModel& net, const RestorationPlan& plan);

/// One row per simulated disturbance step.
std::string simulation_summary(const NetworkModel& net, const PlanSimulation& sim);

std::string comparison_table(const NetworkModel& net, const std::vector<ComparisonRow>& rows);

/// Planner iteration log (timings excluded so the file is reproducible).
std::string iteration_table(const std::vector<IterationLog>& log);

/// Actions taken at step k, e.g. "line:L4-5|load:D1"; empty for a wait.
std::string step_actions(const NetworkModel& net, const RestorationPlan& plan, std::size_t k);

std::string plan_to_json(const RestorationPlan& plan);
/// Throws ParseError on malformed input.
RestorationPlan plan_from_json(const std::string& text);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Inputs and outputs of one CLI run. The hash covers the network file bytes
/// and the canonical config text, so equal hashes mean equal inputs.
struct RunManifest {
    std::string command;
    std::string network_path;
    std::string config;  // canonical "key=value;..." text
    std::uint64_t input_hash = 0;
    std::string output_dir;
    std::vector<std::string> artifacts;

    std::string to_json() const;
};

std::string config_text(const PlannerConfig& config, double limit_hz);

/// Reads a whole file; throws Error when it cannot be opened.
std::string read_file(const std::filesystem::path& path);
/// Writes (creating parent directories); throws Error on failure.
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace blackstart
