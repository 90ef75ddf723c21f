#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "muskat/difference_ops.hpp"
#include "muskat/grid.hpp"
#include "muskat/parallel.hpp"
#include "muskat/quadrature.hpp"
#include "muskat/spectral_ops.hpp"

namespace muskat {

inline constexpr double lp_infinity = std::numeric_limits<double>::infinity();

// Homogeneous Sobolev semi-norm: (L sum_{k!=0} |k|^{2s} |c_k|^2)^{1/2}, which
// equals (int |Lambda^s f|^2 dx)^{1/2} for trig polynomials. The mean mode is
// always excluded.
inline double sobolev(const ScalarField& f, double s) {
    if (s < 0.0 || s > 4.5) throw std::invalid_argument("sobolev: s must lie in [0, 4.5]");
    const PeriodicGrid& g = f.grid();
    const std::vector<cplx>& c = f.spectrum();
    double acc = 0.0;
    for (std::size_t p = 1; p < g.n_points(); ++p)
        acc += std::pow(std::abs(g.wavenumber(p)), 2.0 * s) * std::norm(c[p]);
    return std::sqrt(acc * g.length());
}

// Trapezoidal L^p norm on the grid; p = infinity -> max |f|.
inline double lp(const ScalarField& f, double p) {
    if (p < 1.0) throw std::invalid_argument("lp: p must be >= 1");
    if (p == lp_infinity) {
        double m = 0.0;
        for (double v : f.values()) m = std::max(m, std::abs(v));
        return m;
    }
    double acc = 0.0;
    for (double v : f.values()) acc += std::pow(std::abs(v), p);
    return std::pow(acc * f.grid().spacing(), 1.0 / p);
}

// alpha-rule used by the Besov estimator: much smaller alpha_min than the RHS
// quadrature (differences are evaluated spectrally, so tiny shifts are exact)
// and alpha_max = L/2 (differences are L-periodic in alpha).
struct BesovRule {
    double alpha_min = 1e-6;
    double alpha_max = 0.0; // 0 -> L/2
    std::size_t n_alpha = 192;
};

inline BesovRule besov_rule_for(const PeriodicGrid& g, const BesovRule& r = {}) {
    BesovRule out = r;
    if (out.alpha_max == 0.0) out.alpha_max = 0.5 * g.length();
    return out;
}

// Homogeneous Besov semi-norm via the difference definition:
//   ( int (||diff_a f||_{L^p} / |a|^s)^q da/|a| )^{1/q},  a over +/-(0, a_max]
// First differences for s in (0,1), second differences (s_a) for s in [1,2).
// q = infinity takes the sup over the alpha nodes.
inline double besov(const ScalarField& f, double s, double p, double q,
                    const BesovRule& rule_in = {}) {
    if (!(s > 0.0) || !(s < 2.0)) throw std::invalid_argument("besov: s must lie in (0, 2)");
    if (p < 1.0 || q < 1.0) throw std::invalid_argument("besov: p, q must be >= 1");
    const BesovRule rule = besov_rule_for(f.grid(), rule_in);
    if (!(rule.alpha_max > 0.0)) throw std::invalid_argument("besov: alpha_max must be positive");
    const DiffOpKind kind = (s < 1.0) ? DiffOpKind::delta : DiffOpKind::s_second;
    const LogGrid nodes(rule.alpha_min, rule.alpha_max, rule.n_alpha);

    std::vector<double> g(nodes.alpha.size());
    parallel_for(nodes.alpha.size(), [&](std::size_t j) {
        const double a = nodes.alpha[j];
        g[j] = lp(apply(kind, f, a), p) / std::pow(a, s);
    });

    if (q == lp_infinity) {
        double m = 0.0;
        for (double v : g) m = std::max(m, v);
        return m;
    }
    // the +/- pair contributes twice the one-sided integral (norms are even in alpha)
    double acc = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j)
        acc += nodes.w[j] * std::pow(g[j], q) / nodes.alpha[j];
    return std::pow(2.0 * acc, 1.0 / q);
}

// The global-existence smallness functional
//   (C |f|_{H32} + C |f|_{H32}^4 + |f|_{H32} |f|_{B1}) (1 + |f_x|_inf^2)^{3/2}
inline double smallness(const ScalarField& f, double C = 12.0, const BesovRule& rule = {}) {
    if (!(C > 0.0)) throw std::invalid_argument("smallness: C must be positive");
    const double h32 = sobolev(f, 1.5);
    const double b1 = besov(f, 1.0, lp_infinity, 1.0, rule);
    const double lip = lp(derivative(f, 1), lp_infinity);
    return (C * h32 + C * h32 * h32 * h32 * h32 + h32 * b1) * std::pow(1.0 + lip * lip, 1.5);
}

struct InterpCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool ok = false;
};

// Hoelder interpolation in the Sobolev scale: |f|_{th s1 + (1-th) s2} <=
// |f|_{s1}^th |f|_{s2}^{1-th}, exact consequence of the spectral sums.
inline InterpCheck interp_check(const ScalarField& f, double s1, double s2, double theta) {
    if (!(s1 < s2)) throw std::invalid_argument("interp_check: requires s1 < s2");
    if (!(theta > 0.0) || !(theta < 1.0))
        throw std::invalid_argument("interp_check: theta must lie in (0, 1)");
    InterpCheck r;
    r.lhs = sobolev(f, theta * s1 + (1.0 - theta) * s2);
    r.rhs = std::pow(sobolev(f, s1), theta) * std::pow(sobolev(f, s2), 1.0 - theta);
    r.ok = r.lhs <= r.rhs * (1.0 + 1e-12);
    return r;
}

// Semi-norm bundle reported along trajectories.
struct NormReport {
    double time = 0.0;
    double l2 = 0.0;
    double h32 = 0.0;
    double h3 = 0.0;
    double h52 = 0.0;
    double h4 = 0.0;
    double b1_inf_1 = 0.0;
    double lip = 0.0;
    double smallness = 0.0;
};

inline NormReport norm_report(const ScalarField& f, double time, double C = 12.0,
                              const BesovRule& rule = {}) {
    NormReport r;
    r.time = time;
    r.l2 = lp(f, 2.0);
    r.h32 = sobolev(f, 1.5);
    r.h3 = sobolev(f, 3.0);
    r.h52 = sobolev(f, 2.5);
    r.h4 = sobolev(f, 4.0);
    r.b1_inf_1 = besov(f, 1.0, lp_infinity, 1.0, rule);
    r.lip = lp(derivative(f, 1), lp_infinity);
    r.smallness = (C * r.h32 + C * r.h32 * r.h32 * r.h32 * r.h32 + r.h32 * r.b1_inf_1) *
                  std::pow(1.0 + r.lip * r.lip, 1.5);
    return r;
}

} // namespace muskat
