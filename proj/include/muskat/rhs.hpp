#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "muskat/difference_ops.hpp"
#include "muskat/grid.hpp"
#include "muskat/norms.hpp"
#include "muskat/parallel.hpp"
#include "muskat/quadrature.hpp"
#include "muskat/spectral_ops.hpp"

namespace muskat {

// Surface tension and gravity-density product (permeability and viscosity are
// scaled to 1). cp0_prefactor reconciles the curvature-form normalization
// with the slope form's sigma/pi convention; gravity_symbol_c is the measured
// constant c_g of the gravity linearization -c_g g rho |k|.
struct PhysicalParams {
    double sigma = 1.0;
    double g_rho = 0.0;
    double cp0_prefactor = 2.0;
    double gravity_symbol_c = 1.0;

    void validate() const {
        if (!(sigma >= 0.0) || !std::isfinite(sigma))
            throw std::invalid_argument("sigma must be finite and >= 0");
        if (!(g_rho >= 0.0) || !std::isfinite(g_rho))
            throw std::invalid_argument("g_rho must be finite and >= 0");
    }
};

enum class TrigKind { cosine, sine };

namespace detail {

// Cached Gauss-Laguerre rule per order.
inline const QuadNodes& laguerre_rule(std::size_t order) {
    static std::map<std::size_t, QuadNodes> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, gauss_laguerre(order)).first;
    return it->second;
}

// Laguerre-quadrature moment sum_i w_i t_i^n (the n-th weighted moment).
inline double laguerre_moment(std::size_t order, int n) {
    const QuadNodes& q = laguerre_rule(order);
    double acc = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) acc += q.w[i] * std::pow(q.x[i], n);
    return acc;
}

} // namespace detail

// int_0^inf gamma^n e^{-gamma} {cos, sin}(a gamma) d gamma.
// Closed forms: (cos,0) 1/(1+a^2); (sin,0) a/(1+a^2); (cos,1) (1-a^2)/(1+a^2)^2;
// (sin,1) 2a/(1+a^2)^2.
// The gauss_laguerre mode evaluates the integral by an order-point Laguerre
// rule along the rotated ray t = (1 - i a) gamma; on the real axis the rule
// cannot resolve the oscillation for |a| beyond ~4 at any practical order.
inline double laplace_moment(TrigKind trig, int n, double a,
                             LaplaceMode mode = LaplaceMode::closed_form,
                             std::size_t laguerre_order = 64) {
    if (n != 0 && n != 1) throw std::invalid_argument("laplace_moment: n must be 0 or 1");
    if (mode == LaplaceMode::closed_form) {
        const double d = 1.0 + a * a;
        if (n == 0) return (trig == TrigKind::cosine) ? 1.0 / d : a / d;
        return (trig == TrigKind::cosine) ? (1.0 - a * a) / (d * d) : 2.0 * a / (d * d);
    }
    const double m = detail::laguerre_moment(laguerre_order, n);
    const cplx z = std::pow(cplx{1.0, -a}, -(n + 1)) * m;
    return (trig == TrigKind::cosine) ? z.real() : z.imag();
}

// Pointwise field version of the moment (argument field = slope values).
inline ScalarField laplace_moment_field(TrigKind trig, int n, const ScalarField& a,
                                        const QuadratureSpec& rule) {
    return map_values(a, [&](double v) {
        return laplace_moment(trig, n, v, rule.laplace_mode, rule.laguerre_order);
    });
}

// Principal-value quadrature: sum_j w_j (I(alpha_j) + I(-alpha_j)) over the
// symmetric log-spaced layout. Node contributions are computed in parallel
// and reduced in fixed order, so the result is worker-count independent.
inline ScalarField pv_integrate(const PeriodicGrid& grid, const QuadratureSpec& rule_in,
                                const std::function<ScalarField(double)>& integrand) {
    const QuadratureSpec rule = rule_in.resolved(grid.spacing(), grid.length());
    const LogGrid nodes(rule.alpha_min, rule.alpha_max, rule.n_alpha);
    const std::size_t n = grid.n_points();
    std::vector<std::vector<double>> pair_sum(nodes.alpha.size());
    parallel_for(nodes.alpha.size(), [&](std::size_t j) {
        try {
            const ScalarField plus = integrand(nodes.alpha[j]);
            const ScalarField minus = integrand(-nodes.alpha[j]);
            std::vector<double> s(n);
            for (std::size_t i = 0; i < n; ++i) s[i] = plus[i] + minus[i];
            pair_sum[j] = std::move(s);
        } catch (const std::exception& e) {
            throw std::runtime_error("pv_integrate: non-finite integrand at alpha = " +
                                     std::to_string(nodes.alpha[j]) + " (" + e.what() + ")");
        }
    });
    std::vector<double> acc(n, 0.0);
    for (std::size_t j = 0; j < nodes.alpha.size(); ++j) {
        for (std::size_t i = 0; i < n; ++i) acc[i] += nodes.w[j] * pair_sum[j][i];
        for (std::size_t i = 0; i < n; ++i)
            if (!std::isfinite(acc[i]))
                throw std::runtime_error("pv_integrate: non-finite integrand at alpha = " +
                                         std::to_string(nodes.alpha[j]));
    }
    return ScalarField::from_values(grid, std::move(acc));
}

// Same layout and reduction as pv_integrate, with the +/- pair evaluated by
// one callback so the caller can share the paired spectral shifts.
inline ScalarField pv_integrate_pairs(const PeriodicGrid& grid, const QuadratureSpec& rule_in,
                                      const std::function<std::vector<double>(double)>& pair_sum_fn) {
    const QuadratureSpec rule = rule_in.resolved(grid.spacing(), grid.length());
    const LogGrid nodes(rule.alpha_min, rule.alpha_max, rule.n_alpha);
    const std::size_t n = grid.n_points();
    std::vector<std::vector<double>> pair_sum(nodes.alpha.size());
    parallel_for(nodes.alpha.size(), [&](std::size_t j) {
        try {
            pair_sum[j] = pair_sum_fn(nodes.alpha[j]);
        } catch (const std::exception& e) {
            throw std::runtime_error("pv_integrate: non-finite integrand at alpha = " +
                                     std::to_string(nodes.alpha[j]) + " (" + e.what() + ")");
        }
    });
    std::vector<double> acc(n, 0.0);
    for (std::size_t j = 0; j < nodes.alpha.size(); ++j) {
        for (std::size_t i = 0; i < n; ++i) acc[i] += nodes.w[j] * pair_sum[j][i];
        for (std::size_t i = 0; i < n; ++i)
            if (!std::isfinite(acc[i]))
                throw std::runtime_error("pv_integrate: non-finite integrand at alpha = " +
                                         std::to_string(nodes.alpha[j]));
    }
    return ScalarField::from_values(grid, std::move(acc));
}

// f_xx / (1 + f_x^2)^{3/2}, the curvature entering the surface-tension term.
inline ScalarField curvature(const ScalarField& f) {
    const ScalarField fx = derivative(f, 1);
    const ScalarField fxx = derivative(f, 2);
    const ScalarField w = map_values(fx, [](double u) { return std::pow(1.0 + u * u, -1.5); });
    return dealiased_product(fxx, w);
}

namespace detail {

struct Cp1Pieces {
    ScalarField fx;
    ScalarField w; // d/dx curvature
};

inline Cp1Pieces cp1_pieces(const ScalarField& f) {
    Cp1Pieces p;
    p.fx = derivative(f, 1);
    p.w = derivative(curvature(f), 1);
    return p;
}

} // namespace detail

// Slope form. The alpha-kernel is split as 1/alpha + O(1/alpha^2): the 1/alpha
// part sums to the (spectral, exact) Hilbert transform, and only the decaying
// remainder goes through the p.v. rule. Gravity is the slope form of the
// curvature-free Muskat kernel, d/dx arctan(Delta_alpha f).
inline ScalarField rhs_cp1(const ScalarField& f, const PhysicalParams& p,
                           const QuadratureSpec& rule_in) {
    p.validate();
    const PeriodicGrid& g = f.grid();
    const QuadratureSpec rule = rule_in.resolved(g.spacing(), g.length());
    const detail::Cp1Pieces pieces = detail::cp1_pieces(f);
    const ScalarField& fx = pieces.fx;
    const ScalarField& w = pieces.w;
    const double sig = p.sigma, grav = p.g_rho;

    // extracted Hilbert parts: sigma H(w) - g rho H(f_x)
    ScalarField out = scale(hilbert(w), sig);
    if (grav != 0.0) out = sub(out, scale(hilbert(fx), grav));

    const std::size_t n = g.n_points();
    const ScalarField remainder = pv_integrate_pairs(g, rule, [&](double a) {
        const std::vector<double>& fv = f.values();
        const auto [tfp, tfm] = shift_pair(f, a);
        const auto [twp, twm] = shift_pair(w, a);
        std::vector<double> r(n, 0.0);
        for (int sgn = 0; sgn < 2; ++sgn) {
            const double aa = (sgn == 0) ? a : -a;
            const ScalarField& tf = (sgn == 0) ? tfp : tfm;
            const ScalarField& tw = (sgn == 0) ? twp : twm;
            for (std::size_t i = 0; i < n; ++i) {
                const double D = (fv[i] - tf[i]) / aa;
                const double kernel_rem = (fx[i] * D - D * D) / (1.0 + D * D);
                r[i] += sig * kernel_rem * tw[i] / aa;
            }
        }
        if (grav != 0.0) {
            const auto [txp, txm] = shift_pair(fx, a);
            for (int sgn = 0; sgn < 2; ++sgn) {
                const double aa = (sgn == 0) ? a : -a;
                const ScalarField& tf = (sgn == 0) ? tfp : tfm;
                const ScalarField& tfx = (sgn == 0) ? txp : txm;
                for (std::size_t i = 0; i < n; ++i) {
                    const double D = (fv[i] - tf[i]) / aa;
                    r[i] -= grav * ((fx[i] - tfx[i]) / aa) * (D * D) / (1.0 + D * D);
                }
            }
        }
        return r;
    });
    return add(out, scale(remainder, 1.0 / pi));
}

// Curvature form, evaluated from its own kernel (y + f_x delta)/(y^2 + delta^2)
// with the same 1/y extraction. cp0_prefactor (default 2) brings the 1/(2 pi)
// display onto the slope form's sigma/pi normalization.
inline ScalarField rhs_cp0(const ScalarField& f, const PhysicalParams& p,
                           const QuadratureSpec& rule_in) {
    p.validate();
    const PeriodicGrid& g = f.grid();
    const QuadratureSpec rule = rule_in.resolved(g.spacing(), g.length());
    const ScalarField fx = derivative(f, 1);
    // v = d/dx (sigma kappa(f) - g rho f), shifted under tau_y
    ScalarField v = scale(derivative(curvature(f), 1), p.sigma);
    if (p.g_rho != 0.0) v = sub(v, scale(fx, p.g_rho));

    const std::size_t n = g.n_points();
    const ScalarField remainder = pv_integrate_pairs(g, rule, [&](double y0) {
        const std::vector<double>& fv = f.values();
        const auto [tfp, tfm] = shift_pair(f, y0);
        const auto [tvp, tvm] = shift_pair(v, y0);
        std::vector<double> r(n, 0.0);
        for (int sgn = 0; sgn < 2; ++sgn) {
            const double y = (sgn == 0) ? y0 : -y0;
            const ScalarField& tf = (sgn == 0) ? tfp : tfm;
            const ScalarField& tv = (sgn == 0) ? tvp : tvm;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = fv[i] - tf[i];
                const double bracket = d * (fx[i] * y - d) / (y * (y * y + d * d));
                r[i] += bracket * tv[i];
            }
        }
        return r;
    });
    ScalarField out = add(scale(hilbert(v), 0.5), scale(remainder, 1.0 / (2.0 * pi)));
    return scale(out, p.cp0_prefactor);
}

// The seven named contributions of the oscillatory-integral form.
struct TermBreakdown {
    ScalarField commutator;
    ScalarField elliptic;
    ScalarField hfxx;
    ScalarField rem_eta_minus;
    ScalarField rem_eta_plus;
    ScalarField rem_S_minus;
    ScalarField rem_S_plus;
    ScalarField total;
};

// Oscillatory-integral form (surface tension only). All gamma- and
// sigma-integrals are reduced through laplace_moment; the x-derivative inside
// the remainder factor is expanded into its three products before the
// sigma-reduction. The eta-remainders carry a + sign: the cancellation
// f_x - Delta_alpha f = -S_alpha f / 2 + (1/(2 alpha)) int_0^alpha s_eta f_x
// fixes it, and the cross-formulation equivalence test pins it numerically.
inline TermBreakdown rhs_nf(const ScalarField& f, double sigma, const QuadratureSpec& rule_in) {
    if (!(sigma > 0.0)) throw std::invalid_argument("rhs_nf: sigma must be positive");
    const PeriodicGrid& g = f.grid();
    const QuadratureSpec rule = rule_in.resolved(g.spacing(), g.length());
    const std::size_t n = g.n_points();

    const ScalarField fx = derivative(f, 1);
    const ScalarField fxx = derivative(f, 2);
    const ScalarField fxxx = derivative(f, 3);
    const ScalarField lam3 = frac_laplacian(f, 3.0);

    // pointwise composite factors of the sigma-moments
    const ScalarField cos_at = map_values(fx, [](double u) { return 1.0 / std::sqrt(1.0 + u * u); });
    const ScalarField lc0 = laplace_moment_field(TrigKind::cosine, 0, fx, rule);
    const ScalarField ls1 = laplace_moment_field(TrigKind::sine, 1, fx, rule);
    std::vector<double> wv(n), gv(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = fx[i];
        wv[i] = cos_at[i] * lc0[i]; // int e^{-s} cos(s u) cos(arctan u) ds
        // d/dx inner factor: cos(arctan u) Lsin1 + sin(arctan u)/(1+u^2) Lcos0
        gv[i] = cos_at[i] * ls1[i] + (u * cos_at[i] / (1.0 + u * u)) * lc0[i];
    }
    const ScalarField W = ScalarField::from_values(g, std::move(wv));
    const ScalarField G2 = ScalarField::from_values(g, std::move(gv));

    TermBreakdown tb;
    tb.commutator = scale(derivative(hilbert_commutator(W, fxx), 1), sigma);
    tb.elliptic = scale(dealiased_product(lam3, W), -sigma);
    const ScalarField wx = scale(dealiased_product(fxx, G2), -1.0); // d/dx of the sigma-average
    tb.hfxx = scale(dealiased_product(hilbert(fxx), wx), sigma);

    // Psi = sigma-reduced d/dx (f_xx cos(s f_x) cos(arctan f_x)) three-product form
    const ScalarField psi = sub(dealiased_product(fxxx, W),
                                dealiased_product(dealiased_product(fxx, fxx), G2));

    const LogGrid nodes(rule.alpha_min, rule.alpha_max, rule.n_alpha);
    const std::size_t m = nodes.alpha.size();
    std::vector<std::array<std::vector<double>, 4>> slot(m);
    parallel_for(m, [&](std::size_t j) {
        const double a = nodes.alpha[j];
        const auto [tfp, tfm] = shift_pair(f, a);
        const auto [tpp, tpm] = shift_pair(psi, a);
        const ScalarField e = eta_integral(fx, a, rule); // even in alpha
        std::array<std::vector<double>, 4> out;
        for (auto& v : out) v.assign(n, 0.0);
        const std::vector<double>& fv = f.values();
        for (int sgn = 0; sgn < 2; ++sgn) {
            const double aa = (sgn == 0) ? a : -a;
            const ScalarField& tf_fwd = (sgn == 0) ? tfp : tfm;
            const ScalarField& tf_bwd = (sgn == 0) ? tfm : tfp;
            const ScalarField& tpsi = (sgn == 0) ? tpp : tpm;
            for (std::size_t i = 0; i < n; ++i) {
                const double D = (fv[i] - tf_fwd[i]) / aa;   // Delta_alpha
                const double Db = (fv[i] - tf_bwd[i]) / aa;  // bar Delta_alpha
                const double msp = laplace_moment(TrigKind::sine, 0, D, rule.laplace_mode,
                                                  rule.laguerre_order);
                const double msm = laplace_moment(TrigKind::sine, 0, Db, rule.laplace_mode,
                                                  rule.laguerre_order);
                const double gm = msp - msm;
                const double gp = msp + msm;
                const double s = D + Db;
                const double phi = tpsi[i] / aa;
                out[0][i] += e[i] * gm * phi;
                out[1][i] += e[i] * gp * phi;
                out[2][i] += s * gm * phi;
                out[3][i] += s * gp * phi;
            }
        }
        slot[j] = std::move(out);
    });

    std::array<std::vector<double>, 4> acc;
    for (auto& v : acc) v.assign(n, 0.0);
    for (std::size_t j = 0; j < m; ++j)
        for (int t = 0; t < 4; ++t)
            for (std::size_t i = 0; i < n; ++i) acc[t][i] += nodes.w[j] * slot[j][t][i];
    const double c = sigma / (4.0 * pi);
    for (std::size_t i = 0; i < n; ++i) {
        acc[0][i] *= c;
        acc[1][i] *= c;
        acc[2][i] *= -c;
        acc[3][i] *= -c;
    }
    tb.rem_eta_minus = ScalarField::from_values(g, std::move(acc[0]));
    tb.rem_eta_plus = ScalarField::from_values(g, std::move(acc[1]));
    tb.rem_S_minus = ScalarField::from_values(g, std::move(acc[2]));
    tb.rem_S_plus = ScalarField::from_values(g, std::move(acc[3]));

    std::vector<double> tot(n);
    for (std::size_t i = 0; i < n; ++i)
        tot[i] = tb.commutator[i] + tb.elliptic[i] + tb.hfxx[i] + tb.rem_eta_minus[i] +
                 tb.rem_eta_plus[i] + tb.rem_S_minus[i] + tb.rem_S_plus[i];
    tb.total = ScalarField::from_values(g, std::move(tot));
    return tb;
}

} // namespace muskat
