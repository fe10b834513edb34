#include <cmath>
#include <random>

#include "blackstart/errors.hpp"
#include "blackstart/milp_solver.hpp"
#include "blackstart/planner.hpp"
#include "blackstart/restoration_model.hpp"
#include "doctest.h"
#include "enumeration_oracle.hpp"
#include "fixtures.hpp"

using namespace blackstart;

namespace {

HorizonSpec window(const NetworkModel& net, std::size_t start, std::size_t length) {
    HorizonSpec h;
    h.start = start;
    h.length = length;
    h.history.assign(start, initial_state(net));
    h.weights = default_weights(net);
    return h;
}

bool solvable(const MilpModel& m) { return solve_milp(m).has_solution(); }

NetworkModel one_bus_with_nbsu() {
    return parse_network(R"({"s_sys_mva": 100, "step_minutes": 2, "buses": [1],
        "generators": [
          {"name": "G1", "bus": 1, "black_start": true, "ramp_mw_per_step": 20, "p_max_mw": 100, "h_s": 4,
           "uo_pu_per_s": 0.05},
          {"name": "G2", "bus": 1, "p_crank_mw": 2, "t_crank_steps": 2, "t_ramp_steps": 3, "ramp_mw_per_step": 5,
           "p_min_mw": 1, "p_max_mw": 60, "h_s": 4, "uo_pu_per_s": 0.05}]})");
}

NetworkModel one_bus_with_ess() {
    return parse_network(R"({"s_sys_mva": 100, "step_minutes": 2, "buses": [1],
        "loads": [{"name": "D1", "bus": 1, "p_mw": 15}],
        "generators": [{"name": "G1", "bus": 1, "black_start": true, "ramp_mw_per_step": 40, "p_max_mw": 100,
                        "h_s": 4, "uo_pu_per_s": 0.05}],
        "ess": [{"name": "S1", "bus": 1, "p_rated_mw": 40, "e_max_mwh": 5, "e_init_mwh": 1, "eta_con": 0.95,
                 "eta_s": 0.9, "ramp_mw_per_step": 40, "tau_s": 0.1}]})");
}

}  // namespace

TEST_CASE("lines energize only from a bus that was already live") {
    SUBCASE("two buses: the line next to the black-start bus may close at k = 1") {
        const auto net = fixtures::two_bus();
        RestorationModel rm(net, window(net, 1, 1));
        rm.build_all();
        rm.model().fix(rm.step(1).line[0], 1.0);
        CHECK(solvable(rm.model()));
    }
    SUBCASE("three buses in a chain: the far line cannot close at k = 1") {
        const auto net = parse_network(R"({"s_sys_mva": 100, "step_minutes": 2, "buses": [1, 2, 3],
            "lines": [{"name": "L12", "from": 1, "to": 2, "x": 0.1}, {"name": "L23", "from": 2, "to": 3, "x": 0.1}],
            "generators": [{"bus": 1, "black_start": true, "ramp_mw_per_step": 5, "p_max_mw": 50, "h_s": 3,
                            "uo_pu_per_s": 0.1}]})");
        RestorationModel rm(net, window(net, 1, 1));
        rm.build_all();
        rm.model().fix(rm.step(1).line[1], 1.0);
        CHECK_FALSE(solvable(rm.model()));
    }
}

TEST_CASE("restored elements stay restored") {
    const auto net = fixtures::two_bus();
    RestorationModel rm(net, window(net, 1, 2));
    rm.build_all();
    rm.model().fix(rm.step(1).line[0], 1.0);
    rm.model().fix(rm.step(2).line[0], 0.0);
    CHECK_FALSE(solvable(rm.model()));
}

TEST_CASE("at most one element of a type per step") {
    auto net = fixtures::two_bus();
    net.loads.push_back(net.loads[0]);
    net.loads[0].bus = net.loads[1].bus = 0;  // both on the black-start bus
    net.loads[1].name = "D2";
    RestorationModel rm(net, window(net, 1, 1));
    rm.build_all();
    rm.model().fix(rm.step(1).load[0], 1.0);
    CHECK(solvable(rm.model()));
    rm.model().fix(rm.step(1).load[1], 1.0);
    CHECK_FALSE(solvable(rm.model()));
}

TEST_CASE("DC flow follows angle differences") {
    auto net = fixtures::two_bus(50.0, 0.1);
    net.generators[0].ramp = 1.0;
    SUBCASE("line on: flow = angle difference / x") {
        RestorationModel rm(net, window(net, 1, 1));
        rm.build_all();
        rm.model().fix(rm.step(1).load[0], 1.0);
        const auto sol = solve_milp(rm.model());
        REQUIRE(sol.has_solution());
        const auto st = rm.extract_state(1, sol.values);
        CHECK(st.p_line[0] == doctest::Approx(0.5));
        CHECK(st.theta[0] - st.theta[1] == doctest::Approx(0.05));
        CHECK(st.theta[1] == doctest::Approx(-0.05));
    }
    SUBCASE("line off: zero flow, and a load on the islanded bus is infeasible") {
        RestorationModel rm(net, window(net, 1, 1));
        rm.build_all();
        rm.model().fix(rm.step(1).line[0], 0.0);
        const auto sol = solve_milp(rm.model());
        REQUIRE(sol.has_solution());
        CHECK(rm.extract_state(1, sol.values).p_line[0] == 0.0);
        rm.model().fix(rm.step(1).load[0], 1.0);
        CHECK_FALSE(solvable(rm.model()));
    }
}

TEST_CASE("start-up phases follow the switch-on step") {
    // the ramping unit's output needs somewhere to go
    auto net = one_bus_with_nbsu();
    net.loads.push_back({"D1", 0, 0.15});
    RestorationModel rm(net, window(net, 4, 7));
    rm.build_all();
    for (std::size_t k = 4; k <= 10; ++k) rm.model().fix(rm.step(k).gen[1], 1.0);
    const auto sol = solve_milp(rm.model());
    REQUIRE(sol.has_solution());
    for (std::size_t k = 4; k <= 10; ++k) {
        const auto st = rm.extract_state(k, sol.values);
        CAPTURE(k);
        CHECK(st.gen_crank[1] == (k <= 5 ? 1 : 0));
        CHECK(st.gen_ramp[1] == (k >= 6 && k <= 8 ? 1 : 0));
        CHECK(st.gen_online[1] == (k >= 9 ? 1 : 0));
        CHECK(st.gen_crank[1] + st.gen_ramp[1] + st.gen_online[1] == st.gen[1]);
        if (k <= 5) CHECK(st.p_gen[1] == doctest::Approx(-0.02));
        // the reference idles at -r/2, so ramping step j outputs (j - 1/2) r
        if (k >= 6 && k <= 8) CHECK(st.p_gen[1] == doctest::Approx(0.05 * (static_cast<double>(k - 5) - 0.5)));
        if (k >= 9) {
            const auto prev = rm.extract_state(k - 1, sol.values);
            CHECK(st.p_gen[1] >= 0.01 - 1e-9);
            CHECK(st.p_gen[1] <= 0.60 + 1e-9);
            CHECK(std::abs(st.p_gen[1] - prev.p_gen[1]) <= 0.05 + 1e-9);
        }
    }
}

TEST_CASE("storage energy, injection and mode exclusivity") {
    const auto net = one_bus_with_ess();
    RestorationModel rm(net, window(net, 1, 2));
    rm.build_all();
    const auto& s1 = rm.step(1);
    SUBCASE("charging 0.3 pu for one 2-minute step stores 0.009 pu h") {
        rm.model().fix(s1.p_ess_in[0], 0.3);
        rm.model().fix(s1.p_ess_out[0], 0.0);
        const auto sol = solve_milp(rm.model());
        REQUIRE(sol.has_solution());
        const double e1 = sol.values[static_cast<std::size_t>(s1.soc[0])];
        const double e2 = sol.values[static_cast<std::size_t>(rm.step(2).soc[0])];
        CHECK(e2 - e1 == doctest::Approx(0.009));
        CHECK(sol.values[static_cast<std::size_t>(s1.p_ess[0])] == doctest::Approx(-0.3 / 0.95));
    }
    SUBCASE("discharging 0.1 pu injects 0.095 pu") {
        rm.model().fix(s1.p_ess_out[0], 0.1);
        const auto sol = solve_milp(rm.model());
        REQUIRE(sol.has_solution());
        CHECK(sol.values[static_cast<std::size_t>(s1.p_ess[0])] == doctest::Approx(0.095));
    }
    SUBCASE("no simultaneous charge and discharge") {
        rm.model().fix(s1.ess_charging[0], 1.0);
        rm.model().fix(s1.ess_discharging[0], 1.0);
        CHECK_FALSE(solvable(rm.model()));
    }
}

TEST_CASE("SoC telescopes over the window") {
    const auto net = one_bus_with_ess();
    RestorationModel rm(net, window(net, 1, 3));
    rm.build_all();
    rm.model().fix(rm.step(1).p_ess_in[0], 0.2);
    rm.model().fix(rm.step(3).p_ess_out[0], 0.1);
    const auto sol = solve_milp(rm.model());
    REQUIRE(sol.has_solution());
    const double hours = 2.0 / 60.0, eta = 0.9;
    double flow = 0.0;
    for (std::size_t k = 1; k <= 3; ++k)
        flow += eta * sol.values[static_cast<std::size_t>(rm.step(k).p_ess_in[0])] -
                sol.values[static_cast<std::size_t>(rm.step(k).p_ess_out[0])] / eta;
    const double e_end = sol.values[static_cast<std::size_t>(rm.terminal_soc()[0])];
    const double e_start = sol.values[static_cast<std::size_t>(rm.step(1).soc[0])];
    CHECK(e_end - e_start == doctest::Approx(hours * flow).epsilon(1e-12));
}

TEST_CASE("objective weights") {
    const auto net = fixtures::case9();
    const auto w = default_weights(net);
    CHECK(w.gen[1] == doctest::Approx(1e4));  // largest unit
    CHECK(*std::max_element(w.load.begin(), w.load.end()) == doctest::Approx(1e2));
    CHECK(w.line[0] == 1.0);
    CHECK(w.ess[0] == 1.0);
    CHECK(*std::min_element(w.gen.begin(), w.gen.end()) > 10.0 * *std::max_element(w.load.begin(), w.load.end()));

    SUBCASE("a single load comes on at the earliest step") {
        const auto tiny = fixtures::two_bus();
        RestorationModel rm(tiny, window(tiny, 1, 3));
        rm.build_all();
        const auto sol = solve_milp(rm.model());
        REQUIRE(sol.has_solution());
        CHECK(rm.extract_state(1, sol.values).load[0] == 1);
    }
    SUBCASE("zero weights make any feasible plan optimal") {
        const auto tiny = fixtures::two_bus();
        HorizonSpec h = window(tiny, 1, 2);
        std::fill(h.weights.gen.begin(), h.weights.gen.end(), 0.0);
        std::fill(h.weights.load.begin(), h.weights.load.end(), 0.0);
        std::fill(h.weights.line.begin(), h.weights.line.end(), 0.0);
        RestorationModel rm(tiny, h);
        rm.build_all();
        const auto sol = solve_milp(rm.model());
        REQUIRE(sol.has_solution());
        CHECK(sol.objective == 0.0);
    }
    SUBCASE("negative weights are rejected") {
        const auto tiny = fixtures::two_bus();
        HorizonSpec h = window(tiny, 1, 1);
        h.weights.load[0] = -1.0;
        CHECK_THROWS_AS(RestorationModel(tiny, h), ModelError);
    }
}

TEST_CASE("step imbalance counts pickups and cranking") {
    const auto net = one_bus_with_nbsu();
    auto with_load = net;
    with_load.loads.push_back({"D1", 0, 0.1});
    RestorationModel rm(with_load, window(with_load, 1, 3));
    rm.build_all();
    std::vector<double> x(rm.model().num_variables(), 0.0);
    const auto& s1 = rm.step(1);
    const auto& s2 = rm.step(2);
    const auto& s3 = rm.step(3);

    x[static_cast<std::size_t>(s1.load[0])] = 1.0;
    CHECK(rm.step_imbalance_expr(1).evaluate(x) == doctest::Approx(0.1));

    x[static_cast<std::size_t>(s2.load[0])] = 1.0;
    x[static_cast<std::size_t>(s2.gen_crank[1])] = 1.0;
    CHECK(rm.step_imbalance_expr(2).evaluate(x) == doctest::Approx(0.02));

    x[static_cast<std::size_t>(s3.load[0])] = 1.0;
    x[static_cast<std::size_t>(s3.gen_crank[1])] = 0.0;
    CHECK(rm.step_imbalance_expr(3).evaluate(x) == doctest::Approx(-0.02));

    x[static_cast<std::size_t>(s1.load[0])] = 0.0;
    x[static_cast<std::size_t>(s1.gen_crank[1])] = 0.0;
    x[static_cast<std::size_t>(s2.gen_crank[1])] = 1.0;
    CHECK(rm.step_imbalance_expr(2).evaluate(x) == doctest::Approx(0.12));
}

TEST_CASE("nadir rows") {
    const auto net = fixtures::two_bus(10.0);
    SUBCASE("pickup above g0 is cut") {
        RestorationModel rm(net, window(net, 1, 1));
        rm.build_all();
        rm.add_nadir_constraints({0.08}, {{}});
        rm.model().fix(rm.step(1).load[0], 1.0);
        CHECK_FALSE(solvable(rm.model()));
    }
    SUBCASE("ESS discharge widens the bound by g_s times the setpoint change") {
        auto with_ess = fixtures::two_bus(12.5);
        with_ess.ess.push_back({"S1", 1, 0.1, 0.5, 0.25, 1.0, 1.0, 0.1, 0.1});
        with_ess.validate();
        HorizonSpec h = window(with_ess, 1, 1);
        RestorationModel rm(with_ess, h);
        rm.build_all();
        rm.add_nadir_constraints({0.08}, {{0.9}});
        rm.model().fix(rm.step(1).load[0], 1.0);
        rm.model().fix(rm.step(1).ess[0], 1.0);
        rm.model().set_bounds(rm.step(1).p_ess[0], 0.0, 0.05);
        CHECK(solvable(rm.model()));  // 0.125 <= 0.08 + 0.9 * 0.05
        rm.model().set_bounds(rm.step(1).p_ess[0], 0.0, 0.049);
        CHECK_FALSE(solvable(rm.model()));
    }
    SUBCASE("wrong sequence length") {
        RestorationModel rm(net, window(net, 1, 2));
        rm.build_all();
        CHECK_THROWS_AS(rm.add_nadir_constraints({0.1}, {{}}), ModelError);
    }
    SUBCASE("dropping the nadir rows never lowers the optimum") {
        const auto n9 = fixtures::case9();
        RestorationModel free_rm(n9, window(n9, 1, 2));
        free_rm.build_all();
        RestorationModel cut_rm(n9, window(n9, 1, 2));
        cut_rm.build_all();
        cut_rm.add_nadir_constraints({0.05, 0.05}, {{0.9}, {0.9}});
        const auto a = solve_milp(free_rm.model());
        const auto b = solve_milp(cut_rm.model());
        REQUIRE(a.status == SolveStatus::optimal);
        REQUIRE(b.status == SolveStatus::optimal);
        CHECK(a.objective >= b.objective - 1e-6);
    }
}

TEST_CASE("five-percent rule") {
    SUBCASE("one 1.0 pu unit allows 0.05 pu") {
        auto ok = fixtures::two_bus(5.0);
        ok.lines[0].reactance = 0.1;
        RestorationModel rm(ok, window(ok, 1, 1));
        rm.build_all();
        rm.add_five_percent_rule();
        rm.model().fix(rm.step(1).load[0], 1.0);
        CHECK(solvable(rm.model()));

        auto big = fixtures::two_bus(5.5);
        RestorationModel rm2(big, window(big, 1, 1));
        rm2.build_all();
        rm2.add_five_percent_rule();
        rm2.model().fix(rm2.step(1).load[0], 1.0);
        CHECK_FALSE(solvable(rm2.model()));
    }
}

TEST_CASE("tiny restoration windows agree with enumeration") {
    std::mt19937_64 rng(17);
    int checked = 0;
    for (int trial = 0; trial < 12; ++trial) {
        const auto net = fixtures::random_tiny(rng);
        const std::size_t per_step =
            net.num_buses() + net.num_lines() + net.num_loads() + net.num_generators() - 1 + 3 * net.num_ess();
        const std::size_t length = std::max<std::size_t>(1, std::min<std::size_t>(3, 12 / per_step));
        RestorationModel rm(net, window(net, 1, length));
        rm.build_all();
        REQUIRE(enumeration::free_binaries(rm.model()) <= 12);
        const auto sol = solve_milp(rm.model());
        const auto ref = enumeration::solve(rm.model());
        REQUIRE(ref.feasible == sol.has_solution());
        if (ref.feasible) {
            CHECK(sol.objective == doctest::Approx(ref.objective).epsilon(1e-9));
            CHECK(check_feasible(rm.model(), sol.values).feasible());
            ++checked;
        }
    }
    CHECK(checked > 6);
}

TEST_CASE("committed history must be monotone") {
    const auto net = fixtures::two_bus();
    HorizonSpec h = window(net, 2, 1);
    h.history[0].line[0] = 1;
    h.history[0].bus[1] = 1;
    CHECK_THROWS_AS(RestorationModel(net, h), ModelError);
}
