#include <cmath>

#include "blackstart/errors.hpp"
#include "blackstart/network.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace blackstart;

TEST_CASE("9-bus fixture loads with the expected element counts") {
    const NetworkModel net = fixtures::case9();
    CHECK(net.num_buses() == 9);
    CHECK(net.num_generators() == 3);
    CHECK(net.num_ess() == 1);
    CHECK(net.num_loads() == 12);
    CHECK(net.black_start_index() == 0);
    CHECK(net.ess[0].bus == net.bus_index(5));
    CHECK(net.ess[0].p_rated == doctest::Approx(0.10));
    CHECK(net.ess[0].e_max == doctest::Approx(0.50));
    for (const auto& d : net.loads) {
        CHECK(d.demand >= 0.03 - 1e-12);
        CHECK(d.demand <= 0.16 + 1e-12);
    }
}

TEST_CASE("single bus with only the black-start unit is valid") {
    const auto net = parse_network(R"({"s_sys_mva": 100, "step_minutes": 2, "buses": [1],
        "generators": [{"bus": 1, "black_start": true, "ramp_mw_per_step": 5, "p_max_mw": 50, "h_s": 3,
                        "uo_pu_per_s": 0.1}]})");
    CHECK(net.num_buses() == 1);
    CHECK(net.num_lines() == 0);
    const RestorationState s = initial_state(net);
    CHECK(s.bus == std::vector<int>{1});
    CHECK(s.gen == std::vector<int>{1});
    CHECK(fully_restored(net, s));
}

TEST_CASE("load on a nonexistent bus is rejected by name") {
    const char* text = R"({"s_sys_mva": 100, "step_minutes": 2, "buses": [1],
        "loads": [{"name": "D7", "bus": 99, "p_mw": 3}],
        "generators": [{"bus": 1, "black_start": true, "ramp_mw_per_step": 5, "p_max_mw": 50, "h_s": 3,
                        "uo_pu_per_s": 0.1}]})";
    try {
        parse_network(text);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("D7") != std::string::npos);
        CHECK(std::string(e.what()).find("99") != std::string::npos);
    }
}

TEST_CASE("malformed files and broken invariants") {
    CHECK_THROWS_AS(parse_network("{not json"), ParseError);
    CHECK_THROWS_AS(parse_network(R"({"step_minutes": 2, "buses": [1]})"), ParseError);

    NetworkModel net = fixtures::two_bus();
    net.validate();
    SUBCASE("zero reactance") {
        net.lines[0].reactance = 0.0;
        CHECK_THROWS_AS(net.validate(), ValidationError);
    }
    SUBCASE("two black-start units") {
        net.generators.push_back(net.generators[0]);
        CHECK_THROWS_AS(net.validate(), ValidationError);
    }
    SUBCASE("turbine fractions must sum to one") {
        net.generators[0].stage_gain = {0.5, 0.4, 0.0, 0.0};
        CHECK_THROWS_AS(net.validate(), ValidationError);
    }
    SUBCASE("PFR unit without a valve rate") {
        net.generators[0].valve_rate = 0.0;
        CHECK_THROWS_AS(net.validate(), ValidationError);
    }
    SUBCASE("nonpositive step length") {
        net.step_minutes = 0.0;
        CHECK_THROWS_AS(net.validate(), ValidationError);
    }
}

TEST_CASE("incidence matrices") {
    SUBCASE("two buses, one line from 1 to 2") {
        const auto inc = build_incidence(fixtures::two_bus());
        CHECK(inc.a(0, 0) == 1);
        CHECK(inc.a(1, 0) == -1);
        CHECK(inc.a_l(0, 0) == 1);
        CHECK(inc.a_l(1, 0) == 1);
    }
    SUBCASE("9-bus: three generator entries, every line column balanced") {
        const auto net = fixtures::case9();
        const auto inc = build_incidence(net);
        CHECK(inc.a_g.count_nonzero() == 3);
        for (std::size_t l = 0; l < net.num_lines(); ++l) {
            int sum = 0, abs_sum = 0;
            for (std::size_t b = 0; b < net.num_buses(); ++b) {
                sum += inc.a(b, l);
                abs_sum += std::abs(inc.a(b, l));
            }
            CHECK(sum == 0);
            CHECK(abs_sum == 2);
        }
    }
    SUBCASE("no loads gives an empty load matrix") {
        NetworkModel net = fixtures::two_bus();
        net.loads.clear();
        const auto inc = build_incidence(net);
        CHECK(inc.a_d.rows() == 2);
        CHECK(inc.a_d.cols() == 0);
    }
}

TEST_CASE("initial state of the 9-bus fixture") {
    const auto net = fixtures::case9();
    const auto s = initial_state(net);
    CHECK(s.gen == std::vector<int>{1, 0, 0});
    int on = 0;
    for (int b : s.bus) on += b;
    CHECK(on == 1);
    CHECK(s.bus[static_cast<std::size_t>(net.bus_index(1))] == 1);
    CHECK(s.ess == std::vector<int>{0});
    CHECK(s.soc[0] == doctest::Approx(net.ess[0].e_init));
    CHECK_FALSE(fully_restored(net, s));
}

TEST_CASE("serialize then parse reproduces the model") {
    const auto net = fixtures::case9();
    const auto back = parse_network(serialize_network(net));
    CHECK(serialize_network(back) == serialize_network(net));
    REQUIRE(back.generators.size() == net.generators.size());
    for (std::size_t i = 0; i < net.generators.size(); ++i) {
        CHECK(back.generators[i].p_max == doctest::Approx(net.generators[i].p_max).epsilon(1e-15));
        CHECK(back.generators[i].stage_time == net.generators[i].stage_time);
    }
    CHECK(back.ess[0].e_init == doctest::Approx(net.ess[0].e_init).epsilon(1e-15));
}

TEST_CASE("machine/system base conversion round trip") {
    for (double v : {0.0, 0.3, -1.7, 12.5}) {
        const double there = to_system_base(v, 250.0, 100.0);
        CHECK(std::abs(to_machine_base(there, 250.0, 100.0) - v) < 1e-12);
    }
    CHECK(to_system_base(0.1, 200.0, 100.0) == doctest::Approx(0.2));
}

TEST_CASE("frequency limits convert between Hz and pu") {
    const auto net = fixtures::case9();
    CHECK(net.hz_to_pu(-1.0) == doctest::Approx(-1.0 / 60.0));
    CHECK(net.pu_to_hz(net.hz_to_pu(0.37)) == doctest::Approx(0.37));
}

TEST_CASE("without_ess drops only the storage units") {
    const auto net = fixtures::case9();
    const auto bare = net.without_ess();
    CHECK(bare.num_ess() == 0);
    CHECK(bare.num_loads() == net.num_loads());
    bare.validate();
}
