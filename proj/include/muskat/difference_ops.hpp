#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "muskat/grid.hpp"
#include "muskat/quadrature.hpp"
#include "muskat/spectral_ops.hpp"

namespace muskat {

// The finite-difference operator family built from spectral shifts:
//   delta_a f     = f(x) - f(x-a)
//   bar_delta_a f = f(x) - f(x+a)
//   slope         = delta_a f / a            (Delta_a)
//   bar_slope     = bar_delta_a f / a        (bar Delta_a)
//   s_second      = 2f(x) - f(x-a) - f(x+a)  (s_a)
//   d_centered    = f(x+a) - f(x-a)          (d_a)
//   S_sym         = slope + bar_slope        (= s_a f / a)
//   D_sym         = slope - bar_slope        (= d_a f / a)
enum class DiffOpKind {
    delta,
    bar_delta,
    slope,
    bar_slope,
    s_second,
    d_centered,
    S_sym,
    D_sym,
};

inline bool is_alpha_normalized(DiffOpKind kind) {
    return kind == DiffOpKind::slope || kind == DiffOpKind::bar_slope ||
           kind == DiffOpKind::S_sym || kind == DiffOpKind::D_sym;
}

inline ScalarField apply(DiffOpKind kind, const ScalarField& f, double alpha) {
    if (alpha == 0.0 && is_alpha_normalized(kind))
        throw std::invalid_argument("difference op: division by zero shift (alpha = 0)");
    switch (kind) {
        case DiffOpKind::delta:
            return sub(f, shift(f, alpha));
        case DiffOpKind::bar_delta:
            return sub(f, shift(f, -alpha));
        case DiffOpKind::slope:
            return scale(sub(f, shift(f, alpha)), 1.0 / alpha);
        case DiffOpKind::bar_slope:
            return scale(sub(f, shift(f, -alpha)), 1.0 / alpha);
        case DiffOpKind::s_second: {
            const auto [fwd, bwd] = shift_pair(f, alpha);
            return sub(scale(f, 2.0), add(fwd, bwd));
        }
        case DiffOpKind::d_centered: {
            const auto [fwd, bwd] = shift_pair(f, alpha);
            return sub(bwd, fwd);
        }
        case DiffOpKind::S_sym: {
            const auto [fwd, bwd] = shift_pair(f, alpha);
            return scale(sub(scale(f, 2.0), add(fwd, bwd)), 1.0 / alpha);
        }
        case DiffOpKind::D_sym: {
            const auto [fwd, bwd] = shift_pair(f, alpha);
            return scale(sub(bwd, fwd), 1.0 / alpha);
        }
    }
    throw std::logic_error("unreachable");
}

// (1/alpha) int_0^alpha s_eta g d eta by single-panel Gauss-Legendre of the
// rule's inner order. s_eta is even in eta, so the value is even in alpha.
inline ScalarField eta_integral(const ScalarField& g, double alpha, const QuadratureSpec& rule) {
    if (alpha == 0.0) throw std::invalid_argument("eta_integral: alpha must be nonzero");
    const QuadNodes gl = gauss_legendre_on(0.0, alpha, rule.inner_order);
    std::vector<double> acc(g.size(), 0.0);
    for (std::size_t i = 0; i < gl.size(); ++i) {
        const ScalarField s = apply(DiffOpKind::s_second, g, gl.x[i]);
        accumulate(acc, gl.w[i], s);
    }
    for (double& v : acc) v /= alpha;
    return ScalarField::from_values(g.grid(), std::move(acc));
}

// Closed form of d/d alpha S_alpha f:
//   bar_slope(f_x) - slope(f_x) - s_alpha f / alpha^2
inline ScalarField dS_dalpha_closed(const ScalarField& f, double alpha) {
    if (alpha == 0.0) throw std::invalid_argument("dS_dalpha_closed: alpha must be nonzero");
    const ScalarField fx = derivative(f, 1);
    ScalarField out = sub(apply(DiffOpKind::bar_slope, fx, alpha), apply(DiffOpKind::slope, fx, alpha));
    out = sub(out, scale(apply(DiffOpKind::s_second, f, alpha), 1.0 / (alpha * alpha)));
    return out;
}

// Closed form of d^2/d alpha^2 S_alpha f:
//   s_alpha f_xx / alpha - (int_0^alpha s_kappa f_xx) / alpha^2
//   + d_alpha f_x / alpha^2 + 2 s_alpha f / alpha^3
// The last coefficient is 2 (differentiating s_alpha f / alpha twice); it is
// pinned by the alpha-differencing oracle.
inline ScalarField d2S_dalpha_closed(const ScalarField& f, double alpha, const QuadratureSpec& rule) {
    if (alpha == 0.0) throw std::invalid_argument("d2S_dalpha_closed: alpha must be nonzero");
    const ScalarField fx = derivative(f, 1);
    const ScalarField fxx = derivative(f, 2);
    ScalarField out = scale(apply(DiffOpKind::s_second, fxx, alpha), 1.0 / alpha);
    out = sub(out, scale(eta_integral(fxx, alpha, rule), 1.0 / alpha)); // eta_integral carries 1/alpha
    out = add(out, scale(apply(DiffOpKind::d_centered, fx, alpha), 1.0 / (alpha * alpha)));
    out = add(out, scale(apply(DiffOpKind::s_second, f, alpha), 2.0 / (alpha * alpha * alpha)));
    return out;
}

// Closed form of d/d alpha D_alpha f:
//   -s_alpha f_x / alpha + (1/alpha^2) int_0^alpha s_kappa f_x d kappa
// The integral term enters with +, as the alpha-differencing oracle confirms
// (d_alpha f = 2 alpha f_x - int_0^alpha s_eta f_x d eta).
inline ScalarField dD_dalpha_closed(const ScalarField& f, double alpha, const QuadratureSpec& rule) {
    if (alpha == 0.0) throw std::invalid_argument("dD_dalpha_closed: alpha must be nonzero");
    const ScalarField fx = derivative(f, 1);
    ScalarField out = scale(apply(DiffOpKind::s_second, fx, alpha), -1.0 / alpha);
    out = add(out, scale(eta_integral(fx, alpha, rule), 1.0 / alpha));
    return out;
}

// Closed form of d^2/d alpha^2 D_alpha f:
//   d_alpha f_xx / alpha + 2 s_alpha f_x / alpha^2 - (2/alpha^3) int_0^alpha s_eta f_x d eta
inline ScalarField d2D_dalpha_closed(const ScalarField& f, double alpha, const QuadratureSpec& rule) {
    if (alpha == 0.0) throw std::invalid_argument("d2D_dalpha_closed: alpha must be nonzero");
    const ScalarField fx = derivative(f, 1);
    const ScalarField fxx = derivative(f, 2);
    ScalarField out = scale(apply(DiffOpKind::d_centered, fxx, alpha), 1.0 / alpha);
    out = add(out, scale(apply(DiffOpKind::s_second, fx, alpha), 2.0 / (alpha * alpha)));
    out = sub(out, scale(eta_integral(fx, alpha, rule), 2.0 / (alpha * alpha)));
    return out;
}

// [H, g] h = H(g h) - g H(h), products dealiased.
inline ScalarField hilbert_commutator(const ScalarField& g, const ScalarField& h) {
    detail::require_same_grid(g, h);
    return sub(hilbert(dealiased_product(g, h)), dealiased_product(g, hilbert(h)));
}

} // namespace muskat
