#include <cmath>
#include <random>

#include "blackstart/errors.hpp"
#include "blackstart/nadir.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace blackstart;

namespace {

NadirInputs unit_inputs() {
    NadirInputs in;
    in.agg = {1.0, 0.0, 0.0};
    in.h_sys = 0.5;
    return in;
}

}  // namespace

TEST_CASE("turbine polynomial") {
    GeneratorSpec g;
    SUBCASE("no lags") {
        g.stage_gain = {0.3, 0.3, 0.2, 0.2};
        const auto c = turbine_poly(g);
        CHECK(c.c1 == doctest::Approx(1.0));
        CHECK(c.c2 == 0.0);
        CHECK(c.c3 == 0.0);
    }
    SUBCASE("single stage") {
        g.stage_gain = {1.0, 0.0, 0.0, 0.0};
        g.stage_time = {0.4, 0.0, 0.0, 0.0};
        const auto c = turbine_poly(g);
        CHECK(c.c1 == doctest::Approx(1.0));
        CHECK(c.c2 == doctest::Approx(0.4));
        CHECK(c.c3 == doctest::Approx(0.16));
    }
    SUBCASE("random parameters match derivatives of the exact transfer function") {
        std::mt19937_64 rng(5);
        for (int i = 0; i < 20; ++i) {
            const auto gen = fixtures::random_turbine(rng);
            const auto c = turbine_poly(gen);
            const auto fd = fixtures::turbine_taylor_fd(gen);
            CHECK(std::abs(c.c1 - fd[0]) < 1e-6);
            CHECK(std::abs(c.c2 - fd[1]) < 1e-6);
            CHECK(std::abs(c.c3 - fd[2]) < 1e-6);
        }
    }
    SUBCASE("truncated product drops s^3 and higher") {
        const auto p = truncated_product({1.0, 2.0, 3.0}, {4.0, 5.0, 6.0});
        CHECK(p[0] == 4.0);
        CHECK(p[1] == 13.0);
        CHECK(p[2] == 28.0);
    }
}

TEST_CASE("aggregate coefficients") {
    const PfrContribution u{1.0, 0.1, {1.0, 2.0, 1.0}};
    const auto one = aggregate(std::vector<PfrContribution>{u});
    CHECK(one.c1 == doctest::Approx(0.1));
    CHECK(one.c2 == doctest::Approx(0.2));
    CHECK(one.c3 == doctest::Approx(0.1));
    const auto two = aggregate(std::vector<PfrContribution>{u, u});
    CHECK(two.c1 == doctest::Approx(0.2));
    CHECK(two.c2 == doctest::Approx(0.4));
    CHECK(two.c3 == doctest::Approx(0.2));
    CHECK_THROWS_AS(aggregate(std::vector<PfrContribution>{}), ModelError);

    SUBCASE("9-bus online set by hand") {
        const auto net = fixtures::case9();
        const auto agg = aggregate(net, {0, 1});
        double c1 = 0.0, c2 = 0.0;
        for (std::size_t i : {0u, 1u}) {
            const auto& g = net.generators[i];
            const double w = g.s_mva / net.s_sys * g.valve_rate;
            c1 += w;
            c2 += w * turbine_poly(g).c2;
        }
        CHECK(agg.c1 == doctest::Approx(c1));
        CHECK(agg.c2 == doctest::Approx(c2));
    }
}

TEST_CASE("nadir prediction") {
    SUBCASE("unit example") {
        const auto p = predict_nadir(unit_inputs(), 1.0);
        CHECK(p.t_nadir == doctest::Approx(1.0));
        CHECK(p.omega_nadir == doctest::Approx(-0.5));
        CHECK_FALSE(p.degenerate);
    }
    SUBCASE("storage covering the whole step is degenerate") {
        NadirInputs in = unit_inputs();
        in.agg.c3 = 0.2;
        in.ess_ref = {1.0};
        in.ess_tau = {0.0};
        const auto p = predict_nadir(in, 1.0);
        CHECK(p.degenerate);
        CHECK(p.t_nadir == 0.0);
        CHECK(p.omega_nadir == doctest::Approx(0.2));
        CHECK(p.omega_nadir >= 0.0);
    }
    SUBCASE("needs C1 > 0") {
        NadirInputs in = unit_inputs();
        in.agg.c1 = 0.0;
        CHECK_THROWS_AS(predict_nadir(in, 0.1), ModelError);
    }
}

TEST_CASE("maximum disturbance") {
    SUBCASE("unit example") {
        NadirInputs in = unit_inputs();
        CHECK(max_disturbance_nonlinear(in, -0.5) == doctest::Approx(1.0));
        const auto lb = linear_bound(in.agg, in.h_sys, -0.5, {});
        CHECK(lb.g0 == doctest::Approx(1.0));
    }
    SUBCASE("without storage the nonlinear bound is g0") {
        const AggregateCoeffs agg{0.03, 0.01, 0.002};
        NadirInputs in{agg, 6.0, {}, {}};
        CHECK(max_disturbance_nonlinear(in, -1.0 / 60.0) ==
              doctest::Approx(linear_bound(agg, 6.0, -1.0 / 60.0, {}).g0).epsilon(1e-14));
    }
    SUBCASE("inverse consistency on random inputs") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 200; ++i) {
            NadirInputs in;
            in.agg = {0.005 + 0.1 * u(rng), 0.05 * u(rng), 0.02 * u(rng)};
            in.h_sys = 1.0 + 10.0 * u(rng);
            const std::size_t n_ess = static_cast<std::size_t>(3.0 * u(rng));
            for (std::size_t s = 0; s < n_ess; ++s) {
                in.ess_ref.push_back(0.1 * (u(rng) - 0.3));
                in.ess_tau.push_back(0.5 * u(rng));
            }
            const double lim = -(0.2 + 2.0 * u(rng)) / 60.0;
            double pmax;
            try {
                pmax = max_disturbance_nonlinear(in, lim);
            } catch (const ModelError&) {
                continue;
            }
            const auto p = predict_nadir(in, pmax);
            if (p.degenerate) continue;
            CHECK(std::abs(p.omega_nadir - lim) < 1e-10);
        }
    }
    SUBCASE("negative radicand") {
        NadirInputs in = unit_inputs();
        in.ess_ref = {10.0};
        in.ess_tau = {1.0};
        CHECK_THROWS_AS(max_disturbance_nonlinear(in, -0.5), ModelError);
    }
}

TEST_CASE("linear bound") {
    const AggregateCoeffs agg{0.024, 0.008, 0.002};
    SUBCASE("instant storage has unit benefit") {
        CHECK(linear_bound(agg, 4.0, -1.0 / 60.0, {0.0}).gs[0] == doctest::Approx(1.0));
    }
    SUBCASE("no PFR means no pickups") {
        const auto b = linear_bound({0.0, 0.0, 0.0}, 4.0, -1.0 / 60.0, {0.1});
        CHECK(b.g0 == 0.0);
        CHECK(b.gs == std::vector<double>{0.0});
    }
    SUBCASE("monotone in inertia, limit and time constant") {
        double last = -1.0;
        for (double h : {1.0, 2.0, 4.0, 8.0}) {
            const double g0 = linear_bound(agg, h, -1.0 / 60.0, {}).g0;
            CHECK(g0 > last);
            last = g0;
        }
        last = -1.0;
        for (double hz : {0.2, 0.5, 1.0, 2.0}) {
            const double g0 = linear_bound(agg, 4.0, -hz / 60.0, {}).g0;
            CHECK(g0 > last);
            last = g0;
        }
        last = 2.0;
        for (double tau : {0.0, 0.1, 0.5, 1.0}) {
            const double gs = linear_bound(agg, 4.0, -1.0 / 60.0, {tau}).gs[0];
            CHECK(gs < last);
            last = gs;
        }
    }
    SUBCASE("tangent to the nonlinear bound at zero setpoint") {
        const double tau = 0.3, h = 4.0, lim = -1.0 / 60.0;
        const auto lb = linear_bound(agg, h, lim, {tau});
        auto f = [&](double x) { return max_disturbance_nonlinear({agg, h, {x}, {tau}}, lim); };
        const double eps = 1e-6;
        CHECK(f(0.0) == doctest::Approx(lb.g0).epsilon(1e-14));
        CHECK((f(eps) - f(-eps)) / (2 * eps) == doctest::Approx(lb.gs[0]).epsilon(1e-7));
    }
}

TEST_CASE("ramp validity") {
    auto net = fixtures::two_bus();
    net.generators[0].gov_t3 = 1.0;
    net.generators[0].valve_rate = 0.1;
    CHECK(ramp_validity_check(net, {0}, {0.2}).ok());
    const auto bad = ramp_validity_check(net, {0}, {0.05});
    CHECK_FALSE(bad.ok());
    CHECK(bad.violations == std::vector<std::size_t>{0});
}
