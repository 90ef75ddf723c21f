#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "muskat/grid.hpp"
#include "muskat/monitor_types.hpp"
#include "muskat/norms.hpp"
#include "muskat/quadrature.hpp"
#include "muskat/rhs.hpp"
#include "muskat/spectral_ops.hpp"

namespace muskat {

enum class Formulation { cp0, cp1, nf };

inline const char* to_string(Formulation f) {
    switch (f) {
        case Formulation::cp0: return "cp0";
        case Formulation::cp1: return "cp1";
        case Formulation::nf: return "nf";
    }
    return "?";
}

struct SimConfig {
    PhysicalParams params;
    std::size_t n_points = 256;
    double length = 2.0 * pi;
    QuadratureSpec quad;
    double dt = 1e-4;
    double t_end = 1.0;
    Formulation formulation = Formulation::cp1;
    std::size_t report_every = 50;
    std::uint64_t seed = 0;
    double c_stab = 1.0;       // dt <= c_stab / (sigma k_max^3 + c_g g rho k_max)
    double smallness_C = 12.0;
    std::string init = "0";    // initial-data expression (see config_io)

    double stability_cap() const {
        const double k_max = pi * static_cast<double>(n_points) / length;
        const double denom = params.sigma * k_max * k_max * k_max +
                             params.gravity_symbol_c * params.g_rho * k_max + 1e-30;
        return c_stab / denom;
    }

    // Structural validity; the dt-vs-cap check is enforced where stepping
    // actually happens (step/run), so a config file can still be loaded and
    // inspected with only a warning.
    void validate() const {
        params.validate();
        if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
        if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
        if (report_every == 0) throw std::invalid_argument("report_every must be >= 1");
        PeriodicGrid probe(n_points, length); // validates grid parameters
        (void)probe;
        quad.resolved(probe.spacing(), probe.length());
    }

    void enforce_stability_cap() const {
        if (dt > stability_cap() * (1.0 + 1e-12))
            throw std::invalid_argument(
                "dt = " + std::to_string(dt) + " exceeds the stability cap " +
                std::to_string(stability_cap()) + " (raise c_stab deliberately to override)");
    }
};

struct ReportRow {
    double time = 0.0;
    NormReport norms;
    EnergyReport energy;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<ReportRow> reports;
    ScalarField final_field;
    std::vector<std::pair<double, ScalarField>> snapshots;
    bool halted_early = false;
    std::string halt_reason;
    std::size_t halt_step = 0;
};

struct BlowUpError : std::runtime_error {
    BlowUpError(double t, std::size_t step, Trajectory partial_)
        : std::runtime_error("blow-up detected at t = " + std::to_string(t) +
                             " (step " + std::to_string(step) + ")"),
          time(t), step(step), partial(std::move(partial_)) {}
    double time;
    std::size_t step;
    Trajectory partial;
};

// Linearization symbol: -sigma |k|^3 - c_g g rho |k|.
inline double linear_symbol(const PhysicalParams& p, double k) {
    const double a = std::abs(k);
    return -p.sigma * a * a * a - p.gravity_symbol_c * p.g_rho * a;
}

namespace detail {

inline double phi1(double z) {
    if (std::abs(z) < 1e-2)
        return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z * (1.0 / 120.0 + z / 720.0))));
    return std::expm1(z) / z;
}

inline double phi2(double z) {
    if (std::abs(z) < 1e-2)
        return 0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z * (1.0 / 120.0 + z * (1.0 / 720.0 + z / 5040.0))));
    return (std::expm1(z) - z) / (z * z);
}

// Per-mode exponential-integrator coefficients for a fixed dt.
struct EtdCoeffs {
    std::vector<double> el;       // e^{L dt}
    std::vector<double> dt_phi1;  // dt phi1(L dt)
    std::vector<double> dt_phi2;  // dt phi2(L dt)

    EtdCoeffs(const PeriodicGrid& g, const PhysicalParams& p, double dt) {
        const std::size_t n = g.n_points();
        el.resize(n);
        dt_phi1.resize(n);
        dt_phi2.resize(n);
        for (std::size_t q = 0; q < n; ++q) {
            const double z = linear_symbol(p, g.wavenumber(q)) * dt;
            el[q] = std::exp(z);
            dt_phi1[q] = dt * phi1(z);
            dt_phi2[q] = dt * phi2(z);
        }
    }
};

} // namespace detail

using RhsFn = std::function<ScalarField(const ScalarField&)>;

inline RhsFn make_rhs(const SimConfig& cfg) {
    const QuadratureSpec quad = cfg.quad;
    const PhysicalParams p = cfg.params;
    switch (cfg.formulation) {
        case Formulation::cp0:
            return [=](const ScalarField& f) { return rhs_cp0(f, p, quad); };
        case Formulation::nf:
            if (!(p.sigma > 0.0))
                throw std::invalid_argument("nf formulation requires sigma > 0");
            return [=](const ScalarField& f) { return rhs_nf(f, p.sigma, quad).total; };
        case Formulation::cp1:
        default:
            return [=](const ScalarField& f) { return rhs_cp1(f, p, quad); };
    }
}

// One ETD-RK2 step: the linear symbol is integrated exactly, the remainder
// N(f) = RHS(f) - L f explicitly (Cox-Matthews predictor/corrector).
inline ScalarField etd_step(const ScalarField& f, const detail::EtdCoeffs& co,
                            const PeriodicGrid& g, const PhysicalParams& p, const RhsFn& rhs) {
    const std::size_t n = g.n_points();
    const std::vector<cplx>& fc = f.spectrum();
    const ScalarField r0 = rhs(f);
    const std::vector<cplx>& rc = r0.spectrum();

    std::vector<cplx> n0(n), ac(n);
    for (std::size_t q = 0; q < n; ++q) {
        n0[q] = rc[q] - linear_symbol(p, g.wavenumber(q)) * fc[q];
        ac[q] = co.el[q] * fc[q] + co.dt_phi1[q] * n0[q];
    }
    const ScalarField a = ScalarField::from_spectrum(g, std::move(ac));
    const ScalarField ra = rhs(a);
    const std::vector<cplx>& rac = ra.spectrum();
    const std::vector<cplx>& aco = a.spectrum();
    std::vector<cplx> outc(n);
    for (std::size_t q = 0; q < n; ++q) {
        const cplx na = rac[q] - linear_symbol(p, g.wavenumber(q)) * aco[q];
        outc[q] = aco[q] + co.dt_phi2[q] * (na - n0[q]);
    }
    return ScalarField::from_spectrum(g, std::move(outc));
}

inline ScalarField step(const ScalarField& f, const SimConfig& cfg) {
    cfg.validate();
    cfg.enforce_stability_cap();
    const detail::EtdCoeffs co(f.grid(), cfg.params, cfg.dt);
    try {
        ScalarField out = etd_step(f, co, f.grid(), cfg.params, make_rhs(cfg));
        if (!out.finite()) throw BlowUpError(cfg.dt, 1, Trajectory{});
        return out;
    } catch (const BlowUpError&) {
        throw;
    } catch (const std::exception&) {
        // non-finite values surfacing from field synthesis inside the stages
        throw BlowUpError(cfg.dt, 1, Trajectory{});
    }
}

// EnergyReport builder lives in monitor.hpp; run() takes it as a callback so
// the two headers stay decoupled.
using EnergyFn = std::function<EnergyReport(const ScalarField&)>;

inline Trajectory run(const SimConfig& cfg, const ScalarField& f0, const EnergyFn& energy_fn) {
    cfg.validate();
    cfg.enforce_stability_cap();
    if (cfg.params.sigma == 0.0 && cfg.params.g_rho == 0.0)
        throw std::invalid_argument("run: sigma and g_rho cannot both be zero");
    const PeriodicGrid& g = f0.grid();
    if (g.n_points() != cfg.n_points || g.length() != cfg.length)
        throw std::invalid_argument("run: initial field grid does not match config");

    const RhsFn rhs = make_rhs(cfg);
    const detail::EtdCoeffs co(g, cfg.params, cfg.dt);
    const std::size_t n_steps = static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.dt - 1e-12));

    Trajectory traj;
    ScalarField f = f0;
    double prev_smallness = 0.0;

    // a failing report (non-finite data reaching the RHS) is a blow-up too
    auto report = [&](double t, std::size_t s, const ScalarField& field) {
        try {
            ReportRow row;
            row.time = t;
            row.norms = norm_report(field, t, cfg.smallness_C);
            row.energy = energy_fn(field);
            traj.times.push_back(t);
            traj.reports.push_back(std::move(row));
        } catch (const std::exception&) {
            traj.final_field = field;
            traj.halted_early = true;
            traj.halt_reason = "blow-up";
            traj.halt_step = s;
            throw BlowUpError(t, s, std::move(traj));
        }
    };

    report(0.0, 0, f);
    prev_smallness = traj.reports.front().norms.smallness;

    for (std::size_t s = 1; s <= n_steps; ++s) {
        const double t = static_cast<double>(s) * cfg.dt;
        ScalarField next;
        try {
            next = etd_step(f, co, g, cfg.params, rhs);
            if (!next.finite()) throw std::runtime_error("non-finite field values");
        } catch (const std::exception&) {
            traj.final_field = f; // last valid state
            traj.halted_early = true;
            traj.halt_reason = "blow-up";
            traj.halt_step = s;
            throw BlowUpError(t, s, std::move(traj));
        }
        f = std::move(next);
        if (s % cfg.report_every == 0 || s == n_steps) {
            report(t, s, f);
            const double sm = traj.reports.back().norms.smallness;
            if (prev_smallness <= 1.0 && sm > 1.0) {
                traj.final_field = f;
                traj.halted_early = true;
                traj.halt_reason = "smallness functional crossed 1 at t = " + std::to_string(t);
                traj.halt_step = s;
                return traj;
            }
            prev_smallness = sm;
        }
    }
    traj.final_field = f;
    return traj;
}

} // namespace muskat
