#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace muskat {

struct QuadNodes {
    std::vector<double> x;
    std::vector<double> w;
    std::size_t size() const { return x.size(); }
};

// Gauss-Legendre nodes/weights on [-1, 1], Newton on the three-term recurrence.
inline QuadNodes gauss_legendre(std::size_t order) {
    if (order == 0) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    QuadNodes q;
    q.x.resize(order);
    q.w.resize(order);
    const double n = static_cast<double>(order);
    for (std::size_t i = 0; i < (order + 1) / 2; ++i) {
        double z = std::cos(3.14159265358979323846 * (static_cast<double>(i) + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t j = 0; j < order; ++j) {
                const double p2 = p1;
                p1 = p0;
                const double jj = static_cast<double>(j);
                p0 = ((2.0 * jj + 1.0) * z * p1 - jj * p2) / (jj + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        q.x[i] = -z;
        q.x[order - 1 - i] = z;
        q.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        q.w[order - 1 - i] = q.w[i];
    }
    return q;
}

// Gauss-Legendre mapped to [a, b].
inline QuadNodes gauss_legendre_on(double a, double b, std::size_t order) {
    QuadNodes q = gauss_legendre(order);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t i = 0; i < q.size(); ++i) {
        q.x[i] = mid + half * q.x[i];
        q.w[i] *= half;
    }
    return q;
}

// Gauss-Laguerre nodes/weights for weight e^{-x} on [0, inf).
inline QuadNodes gauss_laguerre(std::size_t order) {
    if (order == 0) throw std::invalid_argument("gauss_laguerre: order must be >= 1");
    QuadNodes q;
    q.x.resize(order);
    q.w.resize(order);
    const double n = static_cast<double>(order);
    double z = 0.0;
    for (std::size_t i = 0; i < order; ++i) {
        if (i == 0) {
            z = 3.0 / (1.0 + 2.4 * n);
        } else if (i == 1) {
            z += 15.0 / (1.0 + 2.5 * n);
        } else {
            const double ai = static_cast<double>(i - 1);
            z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - q.x[i - 2]);
        }
        double pp = 0.0;
        for (int it = 0; it < 200; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t j = 0; j < order; ++j) {
                const double p2 = p1;
                p1 = p0;
                const double jj = static_cast<double>(j);
                p0 = ((2.0 * jj + 1.0 - z) * p1 - jj * p2) / (jj + 1.0);
            }
            pp = (n * p0 - n * p1) / z;
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-14 * (1.0 + std::abs(z))) break;
        }
        q.x[i] = z;
        // w_i = -1 / (n * L'_n(x_i) L_{n-1}(x_i)); with the recurrence values:
        double p0 = 1.0, p1 = 0.0;
        for (std::size_t j = 0; j < order; ++j) {
            const double p2 = p1;
            p1 = p0;
            const double jj = static_cast<double>(j);
            p0 = ((2.0 * jj + 1.0 - z) * p1 - jj * p2) / (jj + 1.0);
        }
        pp = (n * p0 - n * p1) / z;
        q.w[i] = -1.0 / (pp * n * p1);
    }
    return q;
}

// Symmetric log-spaced principal-value node layout on +/-[alpha_min, alpha_max].
// Weights are the trapezoid rule in log alpha times the Jacobian alpha, so
// sum_j w_j g(alpha_j) ~ int_{alpha_min}^{alpha_max} g(alpha) d alpha.
struct LogGrid {
    std::vector<double> alpha;
    std::vector<double> w;

    LogGrid(double alpha_min, double alpha_max, std::size_t count) {
        if (!(alpha_min > 0.0) || !(alpha_max > alpha_min))
            throw std::invalid_argument("log grid needs 0 < alpha_min < alpha_max");
        if (count < 2) throw std::invalid_argument("log grid needs at least 2 nodes");
        alpha.resize(count);
        w.resize(count);
        const double u0 = std::log(alpha_min), u1 = std::log(alpha_max);
        const double du = (u1 - u0) / static_cast<double>(count - 1);
        for (std::size_t j = 0; j < count; ++j) {
            alpha[j] = std::exp(u0 + du * static_cast<double>(j));
            w[j] = du * alpha[j];
        }
        w.front() *= 0.5;
        w.back() *= 0.5;
    }
};

enum class LaplaceMode { closed_form, gauss_laguerre };

// alpha-node layout for the principal-value integrals plus the inner eta/kappa
// rule and the gamma/sigma Laplace-moment mode.
struct QuadratureSpec {
    double alpha_min = 0.0;   // 0 -> defaulted from the grid (h/4)
    double alpha_max = 0.0;   // 0 -> defaulted from the grid (4L)
    std::size_t n_alpha = 96; // log-spaced nodes per sign
    std::size_t inner_order = 16;
    LaplaceMode laplace_mode = LaplaceMode::closed_form;
    std::size_t laguerre_order = 64;

    void validate() const {
        if (alpha_min != 0.0 || alpha_max != 0.0) {
            if (!(alpha_min > 0.0)) throw std::invalid_argument("alpha_min must be positive");
            if (!(alpha_max > alpha_min)) throw std::invalid_argument("alpha_max must exceed alpha_min");
        }
        if (n_alpha < 32) throw std::invalid_argument("n_alpha must be >= 32");
        if (inner_order < 2) throw std::invalid_argument("inner_order must be >= 2");
    }

    // Fill grid-dependent defaults: alpha_min = h/4, alpha_max = 4L.
    QuadratureSpec resolved(double spacing, double length) const {
        QuadratureSpec r = *this;
        if (r.alpha_min == 0.0) r.alpha_min = 0.25 * spacing;
        if (r.alpha_max == 0.0) r.alpha_max = 4.0 * length;
        r.validate();
        return r;
    }

    // One refinement level: denser alpha nodes, smaller alpha_min, doubled
    // inner order. alpha_max stays put; the alpha truncation is shared by all
    // formulations, so refining it does not move their mismatch.
    QuadratureSpec refined() const {
        QuadratureSpec r = *this;
        r.n_alpha = (3 * n_alpha) / 2;
        if (r.alpha_min > 0.0) r.alpha_min *= 0.5;
        r.inner_order = 2 * inner_order;
        return r;
    }
};

} // namespace muskat
