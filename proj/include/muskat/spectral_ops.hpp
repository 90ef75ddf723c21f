#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "muskat/grid.hpp"

namespace muskat {

// Apply a Fourier multiplier. The symbol must satisfy symbol(-k) = conj(symbol(k))
// so the output stays real; this is checked over the grid's mode pairs.
inline ScalarField multiplier(const ScalarField& f, const std::function<cplx(double)>& symbol) {
    const PeriodicGrid& g = f.grid();
    const std::size_t n = g.n_points();
    const std::vector<cplx>& c = f.spectrum();
    std::vector<cplx> out(n);
    for (std::size_t p = 0; p < n; ++p) {
        const cplx s = symbol(g.wavenumber(p));
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
            throw std::invalid_argument("multiplier: symbol non-finite at k index " + std::to_string(p));
        out[p] = s * c[p];
    }
    // conjugate-symmetry check: pair p <-> n-p carries modes k and -k
    const double tol = 1e-12;
    for (std::size_t p = 1; p < n / 2; ++p) {
        const cplx sp = symbol(g.wavenumber(p));
        const cplx sm = symbol(g.wavenumber(n - p));
        if (std::abs(sm - std::conj(sp)) > tol * (1.0 + std::abs(sp)))
            throw std::invalid_argument("multiplier: symbol is not conjugate-symmetric at mode " +
                                        std::to_string(p));
    }
    if (std::abs(symbol(0.0).imag()) > tol)
        throw std::invalid_argument("multiplier: symbol must be real at k = 0");
    // Nyquist of a real field is real; a complex symbol there cannot produce a
    // real output, so only its real part acts.
    out[n / 2] = c[n / 2] * symbol(g.wavenumber(n / 2)).real();
    return ScalarField::from_spectrum(g, std::move(out));
}

// d^m/dx^m. The Nyquist mode is zeroed for odd m (the symbol (ik)^m is
// imaginary there and has no real-field counterpart).
inline ScalarField derivative(const ScalarField& f, int order = 1) {
    const PeriodicGrid& g = f.grid();
    const std::size_t n = g.n_points();
    const std::vector<cplx>& c = f.spectrum();
    std::vector<cplx> out(n);
    for (std::size_t p = 0; p < n; ++p) {
        cplx s = std::pow(cplx{0.0, g.wavenumber(p)}, order);
        out[p] = s * c[p];
    }
    if (order % 2 != 0) out[n / 2] = cplx{0.0, 0.0};
    else out[n / 2] = c[n / 2] * std::pow(cplx{0.0, g.wavenumber(n / 2)}, order).real();
    return ScalarField::from_spectrum(g, std::move(out));
}

// Hilbert transform, symbol -i sign(k); k = 0 and Nyquist are zeroed.
inline ScalarField hilbert(const ScalarField& f) {
    const PeriodicGrid& g = f.grid();
    const std::size_t n = g.n_points();
    const std::vector<cplx>& c = f.spectrum();
    std::vector<cplx> out(n);
    out[0] = cplx{0.0, 0.0};
    for (std::size_t p = 1; p < n; ++p) {
        const double k = g.wavenumber(p);
        out[p] = cplx{0.0, k > 0 ? -1.0 : 1.0} * c[p];
    }
    out[n / 2] = cplx{0.0, 0.0};
    return ScalarField::from_spectrum(g, std::move(out));
}

// Fractional Laplacian |k|^s; the mean mode stays untouched for s = 0 and is
// annihilated for s > 0 (and rejected for s < 0).
inline ScalarField frac_laplacian(const ScalarField& f, double s) {
    if (s < 0.0) throw std::invalid_argument("frac_laplacian: order must be >= 0");
    const PeriodicGrid& g = f.grid();
    const std::size_t n = g.n_points();
    const std::vector<cplx>& c = f.spectrum();
    std::vector<cplx> out(n);
    out[0] = (s == 0.0) ? c[0] : cplx{0.0, 0.0};
    for (std::size_t p = 1; p < n; ++p)
        out[p] = std::pow(std::abs(g.wavenumber(p)), s) * c[p];
    return ScalarField::from_spectrum(g, std::move(out));
}

namespace detail {

// phase table e^{-i k_m alpha} for modes m = 0 .. n/2, by recurrence with
// periodic renormalization (drift ~ n eps, far below the spectral tolerances)
inline void phase_table(const PeriodicGrid& g, double a, std::vector<cplx>& ph) {
    const std::size_t half = g.n_points() / 2;
    ph.resize(half + 1);
    const double th1 = -2.0 * pi / g.length() * a;
    const cplx w1{std::cos(th1), std::sin(th1)};
    cplx w{1.0, 0.0};
    for (std::size_t m = 0; m <= half; ++m) {
        ph[m] = w;
        w *= w1;
        if ((m & 63u) == 63u) w /= std::abs(w);
    }
}

} // namespace detail

// tau_alpha f(x) = f(x - alpha), spectral phase factor e^{-ik alpha}.
// alpha is reduced mod L; alpha = 0 (mod L) returns the field unchanged.
inline ScalarField shift(const ScalarField& f, double alpha) {
    const PeriodicGrid& g = f.grid();
    const double L = g.length();
    double a = std::fmod(alpha, L);
    if (a < 0.0) a += L;
    if (a == 0.0) return f;
    const std::size_t n = g.n_points();
    const std::vector<cplx>& c = f.spectrum();
    std::vector<cplx> ph;
    detail::phase_table(g, a, ph);
    std::vector<cplx> out(n);
    out[0] = c[0];
    for (std::size_t m = 1; m < n / 2; ++m) {
        out[m] = c[m] * ph[m];
        out[n - m] = c[n - m] * std::conj(ph[m]);
    }
    // cosine only at Nyquist: e^{-ik_N a} would break conjugate symmetry
    out[n / 2] = c[n / 2] * ph[n / 2].real();
    return ScalarField::from_spectrum(g, std::move(out));
}

// tau_{+alpha} f and tau_{-alpha} f together through one complex synthesis:
// z = tau_{+a} f + i tau_{-a} f has spectrum c_k (e^{-ik a} + i e^{+ik a}).
inline std::pair<ScalarField, ScalarField> shift_pair(const ScalarField& f, double alpha) {
    const PeriodicGrid& g = f.grid();
    const double L = g.length();
    double a = std::fmod(alpha, L);
    if (a < 0.0) a += L;
    if (a == 0.0) return {f, f};
    const std::size_t n = g.n_points();
    const std::vector<cplx>& c = f.spectrum();
    std::vector<cplx> ph;
    detail::phase_table(g, a, ph);
    std::vector<cplx> z(n);
    const cplx i_unit{0.0, 1.0};
    z[0] = c[0] * (1.0 + i_unit);
    for (std::size_t m = 1; m < n / 2; ++m) {
        z[m] = c[m] * (ph[m] + i_unit * std::conj(ph[m]));
        z[n - m] = c[n - m] * (std::conj(ph[m]) + i_unit * ph[m]);
    }
    z[n / 2] = c[n / 2] * ph[n / 2].real() * (1.0 + i_unit);
    g.fft().inverse_unscaled(z.data());
    std::vector<double> vp(n), vm(n);
    for (std::size_t j = 0; j < n; ++j) {
        vp[j] = z[j].real();
        vm[j] = z[j].imag();
    }
    return {ScalarField::from_values(g, std::move(vp)),
            ScalarField::from_values(g, std::move(vm))};
}

namespace detail {

inline void require_same_grid(const ScalarField& a, const ScalarField& b) {
    if (a.grid() != b.grid()) throw std::invalid_argument("fields live on different grids");
}

} // namespace detail

inline ScalarField add(const ScalarField& a, const ScalarField& b) {
    detail::require_same_grid(a, b);
    std::vector<double> v(a.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = a[j] + b[j];
    return ScalarField::from_values(a.grid(), std::move(v));
}

inline ScalarField sub(const ScalarField& a, const ScalarField& b) {
    detail::require_same_grid(a, b);
    std::vector<double> v(a.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = a[j] - b[j];
    return ScalarField::from_values(a.grid(), std::move(v));
}

inline ScalarField scale(const ScalarField& a, double c) {
    std::vector<double> v(a.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = c * a[j];
    return ScalarField::from_values(a.grid(), std::move(v));
}

// axpy accumulation into a plain buffer; fields stay immutable, sums live in
// raw vectors until sealed.
inline void accumulate(std::vector<double>& acc, double w, const ScalarField& f) {
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += w * f[j];
}

inline ScalarField map_values(const ScalarField& a, const std::function<double(double)>& fn) {
    std::vector<double> v(a.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = fn(a[j]);
    return ScalarField::from_values(a.grid(), std::move(v));
}

// Pointwise product with 2/3-rule zero padding: both factors are synthesized
// on the padded grid, multiplied there, and the result truncated back to the
// base band. Quadratic products are then alias-free on the retained modes.
inline ScalarField dealiased_product(const ScalarField& a, const ScalarField& b) {
    detail::require_same_grid(a, b);
    const PeriodicGrid& g = a.grid();
    const std::size_t n = g.n_points();
    const std::size_t m = g.padded_size();
    const Fft& big = g.fft_padded();

    auto pad = [&](const std::vector<cplx>& c) {
        std::vector<cplx> p(m, cplx{0.0, 0.0});
        for (std::size_t i = 0; i <= n / 2; ++i) p[i] = c[i];
        for (std::size_t i = n / 2 + 1; i < n; ++i) p[m - (n - i)] = c[i];
        // split the Nyquist coefficient symmetrically so the padded spectrum
        // stays conjugate-symmetric
        const cplx ny = c[n / 2];
        p[n / 2] = 0.5 * ny;
        p[m - n / 2] = 0.5 * std::conj(ny);
        return p;
    };

    std::vector<cplx> pa = pad(a.spectrum());
    std::vector<cplx> pb = pad(b.spectrum());
    big.inverse_unscaled(pa.data()); // synthesis of the (normalized) coefficients
    big.inverse_unscaled(pb.data());
    std::vector<cplx> prod(m);
    for (std::size_t j = 0; j < m; ++j) prod[j] = pa[j] * pb[j];
    big.forward(prod.data());
    const double inv_m = 1.0 / static_cast<double>(m);
    std::vector<cplx> out(n);
    out[0] = prod[0] * inv_m;
    for (std::size_t i = 1; i < n / 2; ++i) {
        out[i] = prod[i] * inv_m;
        out[n - i] = prod[m - i] * inv_m;
    }
    // the n-grid Nyquist slot carries the sampled sum of the +/- n/2 modes
    out[n / 2] = (prod[n / 2] + prod[m - n / 2]) * inv_m;
    return ScalarField::from_spectrum(g, std::move(out));
}

// Trapezoidal (= rectangle, periodic) integral of f over [0, L).
inline double integrate(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s * f.grid().spacing();
}

inline double inner_product(const ScalarField& a, const ScalarField& b) {
    detail::require_same_grid(a, b);
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s * a.grid().spacing();
}

// <Lambda^s a, Lambda^s b> evaluated in the spectral sum (mean mode excluded).
inline double sobolev_inner(const ScalarField& a, const ScalarField& b, double s) {
    detail::require_same_grid(a, b);
    const PeriodicGrid& g = a.grid();
    const std::vector<cplx>& ca = a.spectrum();
    const std::vector<cplx>& cb = b.spectrum();
    double acc = 0.0;
    for (std::size_t p = 1; p < g.n_points(); ++p) {
        const double w = std::pow(std::abs(g.wavenumber(p)), 2.0 * s);
        acc += w * (ca[p].real() * cb[p].real() + ca[p].imag() * cb[p].imag());
    }
    return acc * g.length();
}

inline ScalarField reflect(const ScalarField& f) {
    // x -> -x on the periodic grid: node j -> node (n - j) mod n
    const std::size_t n = f.size();
    std::vector<double> v(n);
    v[0] = f[0];
    for (std::size_t j = 1; j < n; ++j) v[j] = f[n - j];
    return ScalarField::from_values(f.grid(), std::move(v));
}

} // namespace muskat
