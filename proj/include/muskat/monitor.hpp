#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "muskat/monitor_types.hpp"
#include "muskat/norms.hpp"
#include "muskat/rhs.hpp"
#include "muskat/spectral_ops.hpp"
#include "muskat/timestepper.hpp"

namespace muskat {

// Majorant polynomials. P is the superset X + X^2 + X^3 + X^4: the statements
// drift between X + X^3 and the longer forms across the estimates, and the
// superset dominates them all.
inline double majorant_p(double x) { return x + x * x + x * x * x + x * x * x * x; }
inline double majorant_q(double x) { return x + x * x; }

inline EnergyReport energy_report(const ScalarField& f, const PhysicalParams& p,
                                  const QuadratureSpec& rule) {
    EnergyReport r;
    const double h32 = sobolev(f, 1.5);
    r.e_h32 = 0.5 * h32 * h32;

    const ScalarField rhs = rhs_cp1(f, p, rule);
    r.ddt_e = sobolev_inner(f, rhs, 1.5);

    const ScalarField fx = derivative(f, 1);
    const ScalarField lam3 = frac_laplacian(f, 3.0);
    const ScalarField lam32 = frac_laplacian(f, 1.5);
    double d3 = 0.0, d32 = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double w = std::pow(1.0 + fx[i] * fx[i], -1.5);
        d3 += lam3[i] * lam3[i] * w;
        d32 += lam32[i] * lam32[i] * w;
    }
    const double h = f.grid().spacing();
    r.dissip3 = d3 * h;
    r.dissip32 = d32 * h;

    const double h3 = sobolev(f, 3.0);
    const double b1 = besov(f, 1.0, lp_infinity, 1.0);
    r.bound = h3 * h3 * (majorant_p(h32) + h32 * b1) + majorant_q(h32) * h32;
    const double lhs = r.ddt_e + p.sigma * r.dissip3;
    r.K_required = (r.bound > 0.0) ? std::max(0.0, lhs / r.bound) : 0.0;
    return r;
}

struct InequalityVerdict {
    bool ok = true;
    double worst_time = 0.0;
    double worst_margin = 0.0; // max over report times of LHS - K RHS - E0 (positive = violation)
    double K_needed = 0.0;     // smallest K that would pass at every report time
};

// Integrated inequality along a trajectory:
//   |f(T)|_{H32}^2 + int_0^T |f|_{H2}^2/(1+lip^2)^2 + int_0^T |f|_{H3}^2/(1+lip^2)^{3/2}
//     <= K [ int_0^T |f|_{H3}^2 (P + h32 b1) + int_0^T Q(h32) h32 ] + |f0|_{H32}^2
// Time integrals accumulate by the trapezoid rule over report times. Reports
// carry no |f|_{H2}; it is reconstructed by the spectral interpolation bound
// h2 <= h32^{2/3} h3^{1/3} (exact for single-mode fields).
inline InequalityVerdict check_inequality(const Trajectory& traj, double K) {
    if (traj.reports.empty()) throw std::invalid_argument("check_inequality: trajectory has no reports");
    InequalityVerdict v;
    const double e0 = traj.reports.front().norms.h32 * traj.reports.front().norms.h32;
    double lhs_int = 0.0, rhs_int = 0.0;
    double prev_t = traj.reports.front().time;
    double prev_lhs = 0.0, prev_rhs = 0.0;
    bool first = true;
    v.worst_margin = -std::numeric_limits<double>::infinity();

    auto integrands = [](const ReportRow& row, double& lhs_rate, double& rhs_rate) {
        const double h32 = row.norms.h32, h3 = row.norms.h3, lip = row.norms.lip;
        const double h2 = std::pow(h32, 2.0 / 3.0) * std::pow(h3, 1.0 / 3.0);
        const double wl = 1.0 + lip * lip;
        lhs_rate = h2 * h2 / (wl * wl) + h3 * h3 / std::pow(wl, 1.5);
        rhs_rate = h3 * h3 * (majorant_p(h32) + h32 * row.norms.b1_inf_1) +
                   majorant_q(h32) * h32;
    };

    for (const ReportRow& row : traj.reports) {
        double lhs_rate = 0.0, rhs_rate = 0.0;
        integrands(row, lhs_rate, rhs_rate);
        if (!first) {
            const double dt2 = 0.5 * (row.time - prev_t);
            lhs_int += dt2 * (lhs_rate + prev_lhs);
            rhs_int += dt2 * (rhs_rate + prev_rhs);
        }
        first = false;
        prev_t = row.time;
        prev_lhs = lhs_rate;
        prev_rhs = rhs_rate;

        const double lhs = row.norms.h32 * row.norms.h32 + lhs_int;
        const double margin = lhs - K * rhs_int - e0;
        if (margin > v.worst_margin) {
            v.worst_margin = margin;
            v.worst_time = row.time;
        }
        if (margin > 0.0) v.ok = false;
        if (rhs_int > 0.0) v.K_needed = std::max(v.K_needed, (lhs - e0) / rhs_int);
    }
    return v;
}

struct GateVerdict {
    bool held_throughout = true;
    std::optional<double> first_violation;
};

// Scan the trajectory's smallness functional against 1.
inline GateVerdict smallness_gate(const Trajectory& traj) {
    GateVerdict v;
    for (const ReportRow& row : traj.reports) {
        if (row.norms.smallness >= 1.0) {
            v.held_throughout = false;
            v.first_violation = row.time;
            break;
        }
    }
    return v;
}

// Convenience EnergyFn factory for timestepper::run.
inline EnergyFn make_energy_fn(const PhysicalParams& p, const QuadratureSpec& rule) {
    return [=](const ScalarField& f) { return energy_report(f, p, rule); };
}

} // namespace muskat
