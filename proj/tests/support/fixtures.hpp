#pragma once

// Small networks and analytic references shared by the unit and acceptance
// tests.

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "blackstart/network.hpp"

namespace fixtures {

inline std::string data_path(const std::string& file) { return std::string(BLACKSTART_DATA_DIR) + "/" + file; }

inline blackstart::NetworkModel case9() { return blackstart::load_network(data_path("case9_restoration.json")); }

inline std::string gen_json(const std::string& name, int bus, bool bsu, double pmax, double h = 4.0) {
    std::ostringstream os;
    os << R"({"name": ")" << name << R"(", "bus": )" << bus << R"(, "black_start": )" << (bsu ? "true" : "false")
       << R"(, "ramp_mw_per_step": 20, "p_max_mw": )" << pmax << R"(, "h_s": )" << h
       << R"(, "droop": 20, "t3": 0.1, "t4": 0.3, "uo_pu_per_s": 0.05)";
    if (!bsu) os << R"(, "p_crank_mw": 2, "t_crank_steps": 1, "t_ramp_steps": 1)";
    os << "}";
    return os.str();
}

/// Bus 1 (black-start unit) -- bus 2 (one load of `load_mw`).
inline blackstart::NetworkModel two_bus(double load_mw = 5.0, double x = 0.1) {
    std::ostringstream os;
    os << R"({"s_sys_mva": 100, "step_minutes": 2, "buses": [1, 2],
              "lines": [{"name": "L12", "from": 1, "to": 2, "x": )"
       << x << R"(}],
              "loads": [{"name": "D1", "bus": 2, "p_mw": )"
       << load_mw << R"(}],
              "generators": [)"
       << gen_json("G1", 1, true, 100.0) << "]}";
    return blackstart::parse_network(os.str());
}

/// Random restoration instance small enough for exhaustive enumeration:
/// one or two buses, at most two loads, optional second generator and ESS.
inline blackstart::NetworkModel random_tiny(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_real_distribution<double> mw(2.0, 30.0);
    const int buses = 1 + coin(rng);
    const int loads = 1 + coin(rng);
    const bool second_gen = buses == 2 && coin(rng);
    const bool ess = coin(rng) && !second_gen;

    std::ostringstream os;
    os << R"({"s_sys_mva": 100, "step_minutes": 2, "buses": [)" << (buses == 2 ? "1, 2" : "1") << "],";
    os << R"("lines": [)";
    if (buses == 2) os << R"({"name": "L12", "from": 1, "to": 2, "x": )" << 0.05 + 0.1 * coin(rng) << "}";
    os << R"(], "loads": [)";
    for (int d = 0; d < loads; ++d) {
        if (d) os << ",";
        os << R"({"name": "D)" << d + 1 << R"(", "bus": )" << (d % buses) + 1 << R"(, "p_mw": )" << mw(rng) << "}";
    }
    os << R"(], "generators": [)" << gen_json("G1", 1, true, 20.0 + 40.0 * coin(rng));
    if (second_gen) os << "," << gen_json("G2", 2, false, 40.0);
    os << R"(], "ess": [)";
    if (ess)
        os << R"({"name": "S1", "bus": )" << buses << R"(, "p_rated_mw": 5, "e_max_mwh": 2, "e_init_mwh": 1,
                 "eta_con": 0.95, "eta_s": 0.9, "ramp_mw_per_step": 5, "tau_s": 0.2})";
    os << "]}";
    return blackstart::parse_network(os.str());
}

/// Exact turbine transfer function G_T(s) at a real s:
/// K1 L4 + K3 L4 L5 + K5 L4 L5 L6 + K7 L4 L5 L6 L7 with L_j = 1 / (1 + s T_j).
inline double exact_turbine(const blackstart::GeneratorSpec& g, double s) {
    double chain = 1.0, out = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
        chain /= 1.0 + s * g.stage_time[j];
        out += g.stage_gain[j] * chain;
    }
    return out;
}

/// (G(0), -G'(0), G''(0)/2) by central differences on the exact transfer
/// function; Richardson-extrapolated so the error is far below 1e-6.
inline std::vector<double> turbine_taylor_fd(const blackstart::GeneratorSpec& g) {
    auto d1 = [&](double h) { return (exact_turbine(g, h) - exact_turbine(g, -h)) / (2.0 * h); };
    auto d2 = [&](double h) { return (exact_turbine(g, h) - 2.0 * exact_turbine(g, 0.0) + exact_turbine(g, -h)) / (h * h); };
    const double h = 1e-3;
    const double g1 = (4.0 * d1(h / 2) - d1(h)) / 3.0;
    const double g2 = (4.0 * d2(h / 2) - d2(h)) / 3.0;
    return {exact_turbine(g, 0.0), -g1, g2 / 2.0};
}

inline blackstart::GeneratorSpec random_turbine(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> t(0.0, 0.8), w(0.05, 1.0);
    blackstart::GeneratorSpec g;
    double total = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
        g.stage_time[j] = t(rng);
        g.stage_gain[j] = w(rng);
        total += g.stage_gain[j];
    }
    for (auto& k : g.stage_gain) k /= total;
    return g;
}

}  // namespace fixtures
