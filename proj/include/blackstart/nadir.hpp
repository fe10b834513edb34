#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "blackstart/network.hpp"

namespace blackstart {

/// Degree-2 truncation of the turbine transfer function,
/// G_T(s) ~ c1 - c2 s + c3 s^2.
struct TurbineCoeffs {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
};

/// Polynomial in s truncated after s^2: p[0] + p[1] s + p[2] s^2.
using Quadratic = std::array<double, 3>;

Quadratic truncated_product(const Quadratic& a, const Quadratic& b);

TurbineCoeffs turbine_poly(const GeneratorSpec& gen);

/// One PFR unit as seen by the aggregate: alpha = S_g / S_sys, U_o on the
/// machine base.
struct PfrContribution {
    double alpha = 0.0;
    double valve_rate = 0.0;
    TurbineCoeffs turbine;
};

/// C1 = sum alpha U_o, C2 = sum alpha U_o c2, C3 = sum alpha U_o c3.
struct AggregateCoeffs {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
};

/// Throws ModelError on an empty set.
AggregateCoeffs aggregate(const std::vector<PfrContribution>& units);

/// Aggregate over the PFR-providing members of `online`. Throws ModelError
/// if none of them provides PFR.
AggregateCoeffs aggregate(const NetworkModel& net, const std::vector<std::size_t>& online);

/// Frequency conditions for one disturbance. ESS vectors are parallel.
struct NadirInputs {
    AggregateCoeffs agg;
    double h_sys = 0.0;
    std::vector<double> ess_ref;  // setpoint changes, positive for discharge
    std::vector<double> ess_tau;
};

struct NadirPrediction {
    double t_nadir = 0.0;
    double omega_nadir = 0.0;
    bool degenerate = false;  // minimum of the quadratic lies at t <= 0
};

/// Throws ModelError unless C1 > 0 and H_sys > 0.
NadirPrediction predict_nadir(const NadirInputs& in, double delta_p_e);

/// Largest disturbance whose predicted nadir equals omega_lim (< 0).
/// Throws ModelError on a negative radicand.
double max_disturbance_nonlinear(const NadirInputs& in, double omega_lim);

/// Tangent of the nonlinear bound at zero ESS setpoints:
/// dPe <= g0 + sum gs[i] dPs_ref[i].
struct LinearBound {
    double g0 = 0.0;
    std::vector<double> gs;
};

/// With C1 = 0 (no PFR online) the bound collapses to dPe <= 0. Throws
/// ModelError on a nonpositive radicand.
LinearBound linear_bound(const AggregateCoeffs& agg, double h_sys, double omega_lim,
                         const std::vector<double>& ess_tau);

struct RampValidity {
    std::vector<bool> valid;             // per checked unit
    std::vector<std::size_t> violations;  // generator indices
    bool ok() const { return violations.empty(); }
};

/// The ramp approximation holds while dP_ref / T3 >= U_o for every unit.
RampValidity ramp_validity_check(const NetworkModel& net, const std::vector<std::size_t>& units,
                                 const std::vector<double>& delta_p_ref);

}  // namespace blackstart
