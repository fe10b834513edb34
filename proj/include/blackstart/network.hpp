#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace blackstart {

// Static grid description. All powers are per-unit on s_sys, energies in
// pu·h, reactances in pu, frequencies as deviations in pu of f_base.

struct Line {
    std::string name;
    int from = 0;  // bus index (position in NetworkModel::bus_ids)
    int to = 0;
    double reactance = 0.0;
};

struct Load {
    std::string name;
    int bus = 0;
    double demand = 0.0;
};

struct GeneratorSpec {
    std::string name;
    int bus = 0;
    bool black_start = false;

    // start-up sequence
    double crank_power = 0.0;  // consumed while cranking
    int crank_steps = 0;
    int ramp_steps = 0;
    double ramp = 0.0;  // pu per step
    double p_min = 0.0;
    double p_max = 0.0;

    // machine and IEEEG1 turbine-governor data, machine base
    double inertia = 0.0;  // H [s]
    double s_mva = 0.0;
    double droop_gain = 0.0;  // K
    double gov_t1 = 0.0;
    double gov_t2 = 0.0;
    double gov_t3 = 0.0;
    std::array<double, 4> stage_time{};  // T4, T5, T6, T7
    std::array<double, 4> stage_gain{};  // K1, K3, K5, K7
    double valve_rate = 0.0;            // SAT1 limit U_o [pu/s]
    bool provides_pfr = true;
};

struct EssSpec {
    std::string name;
    int bus = 0;
    double p_rated = 0.0;
    double e_max = 0.0;   // pu·h
    double e_init = 0.0;  // pu·h
    double eta_converter = 1.0;
    double eta_storage = 1.0;
    double ramp = 0.0;  // pu per step
    double tau = 0.0;   // response time constant [s]
};

struct NetworkModel {
    std::string name;
    std::vector<int> bus_ids;  // external ids, in file order
    std::vector<Line> lines;
    std::vector<Load> loads;
    std::vector<GeneratorSpec> generators;
    std::vector<EssSpec> ess;
    double s_sys = 100.0;    // MVA
    double f_base = 60.0;    // Hz
    double step_minutes = 2.0;

    std::size_t num_buses() const { return bus_ids.size(); }
    std::size_t num_lines() const { return lines.size(); }
    std::size_t num_loads() const { return loads.size(); }
    std::size_t num_generators() const { return generators.size(); }
    std::size_t num_ess() const { return ess.size(); }

    /// Position of the black-start unit in `generators`.
    std::size_t black_start_index() const;

    /// Bus index for an external id; throws ValidationError if unknown.
    int bus_index(int bus_id) const;

    /// Generator machine base relative to the system base (alpha in the
    /// average-system-frequency model).
    double base_ratio(std::size_t gen) const { return generators[gen].s_mva / s_sys; }

    /// Frequency conversions between Hz deviations and pu of f_base.
    double hz_to_pu(double hz) const { return hz / f_base; }
    double pu_to_hz(double pu) const { return pu * f_base; }

    /// Checks every invariant; throws ValidationError naming the element.
    void validate() const;

    /// Copy without storage units (used to plan the no-ESS case).
    NetworkModel without_ess() const;
};

/// Machine-base quantity expressed on the system base and back.
double to_system_base(double machine_pu, double s_machine, double s_sys);
double to_machine_base(double system_pu, double s_machine, double s_sys);

NetworkModel parse_network(const std::string& text);
NetworkModel load_network(const std::filesystem::path& path);
std::string serialize_network(const NetworkModel& net);

// Element-to-bus matrices. Small and dense; the 9-bus fixture is 9 x 9.
template <typename T>
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::size_t count_nonzero() const {
        std::size_t n = 0;
        for (const auto& v : data_) n += (v != T{}) ? 1 : 0;
        return n;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

struct IncidenceSet {
    DenseMatrix<int> a;    // B x L, +1 at from bus, -1 at to bus
    DenseMatrix<int> a_l;  // B x L, 0/1
    DenseMatrix<int> a_d;  // B x D
    DenseMatrix<int> a_g;  // B x G
    DenseMatrix<int> a_s;  // B x S
};

IncidenceSet build_incidence(const NetworkModel& net);

/// Statuses and dispatch of every element at one restoration step.
struct RestorationState {
    std::vector<int> bus, line, load, gen, ess;
    std::vector<int> gen_crank, gen_ramp, gen_online;
    std::vector<int> ess_charging, ess_discharging;

    std::vector<double> p_gen, p_ramp_ref;
    std::vector<double> theta, p_line;
    std::vector<double> p_ess, p_ess_in, p_ess_out, soc;

    // Disturbance bookkeeping for the step (zero at k = 0).
    double delta_p_e = 0.0;
    std::vector<double> delta_p_ess_ref;
    std::vector<double> delta_p_gen_ref;  // governor setpoint changes, machine base

    std::size_t restored_count() const;
};

/// The committed restoration sequence; steps[0] is the initial state.
struct RestorationPlan {
    std::vector<RestorationState> steps;

    // Frozen nadir coefficients under which each step was committed
    // (entry 0 unused). Empty for modes without a nadir bound.
    std::vector<double> frozen_g0;
    std::vector<std::vector<double>> frozen_gs;

    bool complete = false;

    std::size_t last_step() const { return steps.empty() ? 0 : steps.size() - 1; }
};

/// Initial black-start state: only the black-start unit and its bus are on.
RestorationState initial_state(const NetworkModel& net);

/// True once every element is energized and every generator is online.
bool fully_restored(const NetworkModel& net, const RestorationState& state);

}  // namespace blackstart
