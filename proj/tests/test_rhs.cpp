#include "doctest.h"

#include <cmath>
#include <random>

#include "muskat/norms.hpp"
#include "muskat/rhs.hpp"
#include "muskat/spectral_ops.hpp"

using namespace muskat;

namespace {

double rel_l2(const ScalarField& a, const ScalarField& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        num += (a[j] - b[j]) * (a[j] - b[j]);
        den += b[j] * b[j];
    }
    return std::sqrt(num / den);
}

double sup(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

} // namespace

TEST_CASE("curvature basics") {
    const PeriodicGrid g = make_grid(256, 2.0 * pi);
    CHECK(sup(curvature(zero_field(g))) == 0.0);

    // linearization: curvature(eps sin) -> -eps sin + O(eps^3)
    const double eps = 1e-4;
    const ScalarField f = sample(g, [&](double x) { return eps * std::sin(x); });
    const ScalarField k = curvature(f);
    double worst = 0.0;
    for (std::size_t j = 0; j < g.n_points(); ++j)
        worst = std::max(worst, std::abs(k[j] + eps * std::sin(g.node(j))));
    CHECK(worst < 1e-11); // O(eps^3) = 1e-12 plus spectral noise

    // direct substitution at x = pi/2 for f = sin: f_xx/(1+f_x^2)^{3/2} = -1
    const ScalarField s = sample(g, [](double x) { return std::sin(x); });
    const ScalarField ks = curvature(s);
    CHECK(ks[g.n_points() / 4] == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("laplace moments: closed forms and rotated-ray Laguerre") {
    CHECK(laplace_moment(TrigKind::cosine, 0, 0.0) == doctest::Approx(1.0));
    CHECK(laplace_moment(TrigKind::sine, 0, 0.0) == doctest::Approx(0.0));
    CHECK(laplace_moment(TrigKind::sine, 0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));

    // real-axis composite Simpson oracle at moderate arguments
    auto oracle = [](TrigKind t, int n, double a) {
        double acc = 0.0;
        const double T = 60.0;
        const int steps = 600000;
        const double h = T / steps;
        for (int i = 0; i <= steps; ++i) {
            const double x = i * h;
            const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            const double trig = (t == TrigKind::cosine) ? std::cos(a * x) : std::sin(a * x);
            acc += w * std::pow(x, n) * std::exp(-x) * trig;
        }
        return acc * h / 3.0;
    };
    for (double a : {-3.5, -1.0, 0.3, 2.0, 4.0}) {
        for (int n : {0, 1}) {
            CHECK(laplace_moment(TrigKind::cosine, n, a) ==
                  doctest::Approx(oracle(TrigKind::cosine, n, a)).epsilon(1e-10));
            CHECK(laplace_moment(TrigKind::sine, n, a) ==
                  doctest::Approx(oracle(TrigKind::sine, n, a)).epsilon(1e-10));
        }
    }

    // Laguerre mode agrees with closed forms across the full argument range
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 200; ++i) {
        const double a = u(rng);
        for (int n : {0, 1}) {
            const double c = laplace_moment(TrigKind::cosine, n, a);
            const double gl = laplace_moment(TrigKind::cosine, n, a, LaplaceMode::gauss_laguerre, 64);
            CHECK(std::abs(c - gl) < 1e-10);
            const double cs = laplace_moment(TrigKind::sine, n, a);
            const double gls = laplace_moment(TrigKind::sine, n, a, LaplaceMode::gauss_laguerre, 64);
            CHECK(std::abs(cs - gls) < 1e-10);
        }
    }

    CHECK_THROWS_AS(laplace_moment(TrigKind::cosine, 2, 1.0), std::invalid_argument);
}

TEST_CASE("pv_integrate basics") {
    const PeriodicGrid g = make_grid(128, 2.0 * pi);
    QuadratureSpec rule;

    // odd integrand cancels exactly
    const ScalarField c = sample(g, [](double) { return 1.0; });
    const ScalarField odd = pv_integrate(g, rule, [&](double a) { return scale(c, 1.0 / a); });
    CHECK(sup(odd) < 1e-12);

    // Gaussian over the layout's support |a| in [alpha_min, alpha_max]:
    // analytic value sqrt(pi) (erf(amax) - erf(amin))
    const QuadratureSpec res = rule.resolved(g.spacing(), g.length());
    const double want = std::sqrt(pi) * (std::erf(res.alpha_max) - std::erf(res.alpha_min));
    const ScalarField gauss =
        pv_integrate(g, rule, [&](double a) { return scale(c, std::exp(-a * a)); });
    for (double v : gauss.values()) CHECK(v == doctest::Approx(want).epsilon(1e-5));

    // Richardson self-convergence, 2nd order in the node count
    QuadratureSpec coarse = rule;
    coarse.n_alpha = 64;
    QuadratureSpec mid = rule;
    mid.n_alpha = 128;
    QuadratureSpec fine = rule;
    fine.n_alpha = 256;
    auto run = [&](const QuadratureSpec& r) {
        return pv_integrate(g, r, [&](double a) { return scale(c, std::exp(-a * a)); });
    };
    const double d1 = sup(sub(run(coarse), run(mid)));
    const double d2 = sup(sub(run(mid), run(fine)));
    CHECK(d1 / d2 >= 3.5);

    CHECK_THROWS_WITH_AS(
        pv_integrate(g, rule, [&](double a) { return scale(c, 1.0 / (a - a)); }),
        doctest::Contains("non-finite integrand at alpha"), std::runtime_error);
}

TEST_CASE("rhs_cp1 zero field and linear response") {
    const PeriodicGrid g = make_grid(256, 2.0 * pi);
    QuadratureSpec rule;
    PhysicalParams p;
    p.sigma = 1.0;
    p.g_rho = 0.0;

    CHECK(sup(rhs_cp1(zero_field(g), p, rule)) < 1e-14);

    // surface tension: RHS(eps sin kx) ~ -|k|^3 eps sin kx within 1%
    for (int k : {1, 2, 4, 8}) {
        const double eps = 1e-6;
        const ScalarField f =
            sample(g, [&](double x) { return eps * std::sin(static_cast<double>(k) * x); });
        const ScalarField r = rhs_cp1(f, p, rule);
        const double num = inner_product(r, f);
        const double den = inner_product(f, f);
        const double rate = -num / den;
        CHECK(std::abs(rate / std::pow(k, 3.0) - 1.0) < 0.01);
    }

    // gravity only: RHS ~ -c_g |k| f with c_g constant across k
    PhysicalParams pg;
    pg.sigma = 0.0;
    pg.g_rho = 1.0;
    double c1 = 0.0;
    for (int k : {1, 2, 4}) {
        const double eps = 1e-6;
        const ScalarField f =
            sample(g, [&](double x) { return eps * std::sin(static_cast<double>(k) * x); });
        const ScalarField r = rhs_cp1(f, pg, rule);
        const double rate = -inner_product(r, f) / inner_product(f, f) / k;
        if (k == 1) c1 = rate;
        CHECK(std::abs(rate / c1 - 1.0) < 0.01);
    }
    MESSAGE("gravity linearization constant c_g = ", c1);
    CHECK(std::abs(c1 - 1.0) < 0.01);
}

TEST_CASE("rhs_cp0 agrees with rhs_cp1 and is reflection-equivariant") {
    const PeriodicGrid g = make_grid(256, 2.0 * pi);
    QuadratureSpec rule;
    PhysicalParams p;
    p.sigma = 1.0;
    p.g_rho = 0.0;

    CHECK(sup(rhs_cp0(zero_field(g), p, rule)) < 1e-14);

    const ScalarField f = sample(g, [](double x) { return 0.1 * std::sin(x); });
    const ScalarField a = rhs_cp0(f, p, rule);
    const ScalarField b = rhs_cp1(f, p, rule);
    CHECK(rel_l2(a, b) < 1e-3);

    const ScalarField rf = reflect(f);
    const ScalarField lhs = rhs_cp0(rf, p, rule);
    const ScalarField rhs = reflect(rhs_cp0(f, p, rule));
    CHECK(sup(sub(lhs, rhs)) < 1e-10);
}

TEST_CASE("rhs_nf terms and equivalence with rhs_cp1") {
    const PeriodicGrid g = make_grid(256, 2.0 * pi);
    QuadratureSpec rule;

    SUBCASE("zero field gives all-zero breakdown") {
        const TermBreakdown tb = rhs_nf(zero_field(g), 1.0, rule);
        CHECK(sup(tb.commutator) < 1e-14);
        CHECK(sup(tb.elliptic) < 1e-14);
        CHECK(sup(tb.hfxx) < 1e-14);
        CHECK(sup(tb.rem_eta_minus) < 1e-14);
        CHECK(sup(tb.rem_eta_plus) < 1e-14);
        CHECK(sup(tb.rem_S_minus) < 1e-14);
        CHECK(sup(tb.rem_S_plus) < 1e-14);
        CHECK(sup(tb.total) < 1e-14);
    }

    SUBCASE("sigma <= 0 rejected") {
        CHECK_THROWS_AS(rhs_nf(zero_field(g), 0.0, rule), std::invalid_argument);
        CHECK_THROWS_AS(rhs_nf(zero_field(g), -1.0, rule), std::invalid_argument);
    }

    SUBCASE("elliptic term equals the direct composite") {
        const ScalarField f = sample(g, [](double x) { return 1e-3 * std::sin(x); });
        const TermBreakdown tb = rhs_nf(f, 1.0, rule);
        const ScalarField fx = derivative(f, 1);
        const ScalarField w =
            map_values(fx, [](double u) { return std::pow(1.0 + u * u, -1.5); });
        const ScalarField direct = scale(dealiased_product(frac_laplacian(f, 3.0), w), -1.0);
        CHECK(sup(sub(tb.elliptic, direct)) < 1e-10);
    }

    SUBCASE("total is the exact sum of the seven terms") {
        const ScalarField f =
            sample(g, [](double x) { return 0.2 * std::sin(x) + 0.05 * std::sin(3.0 * x); });
        const TermBreakdown tb = rhs_nf(f, 1.0, rule);
        double worst = 0.0;
        for (std::size_t j = 0; j < g.n_points(); ++j) {
            const double s = tb.commutator[j] + tb.elliptic[j] + tb.hfxx[j] + tb.rem_eta_minus[j] +
                             tb.rem_eta_plus[j] + tb.rem_S_minus[j] + tb.rem_S_plus[j];
            worst = std::max(worst, std::abs(tb.total[j] - s));
        }
        CHECK(worst < 1e-12);
    }

    SUBCASE("equivalence with cp1, decreasing under rule refinement") {
        const ScalarField f =
            sample(g, [](double x) { return 0.2 * std::sin(x) + 0.05 * std::sin(3.0 * x); });
        PhysicalParams p;
        p.sigma = 1.0;
        p.g_rho = 0.0;
        QuadratureSpec level = rule;
        level.n_alpha = 64;
        level.inner_order = 12;
        level.alpha_min = g.spacing() / 2.0;
        double prev = 1e9;
        for (int lev = 0; lev < 3; ++lev) {
            const double mis = rel_l2(rhs_nf(f, 1.0, level).total, rhs_cp1(f, p, level));
            CHECK(mis < prev);
            prev = mis;
            level = level.refined();
        }
        CHECK(prev < 1e-3);
    }

    SUBCASE("laplace_mode cross-check at order 64") {
        const ScalarField f =
            sample(g, [](double x) { return 0.2 * std::sin(x) + 0.05 * std::sin(3.0 * x); });
        QuadratureSpec lag = rule;
        lag.laplace_mode = LaplaceMode::gauss_laguerre;
        lag.laguerre_order = 64;
        const TermBreakdown a = rhs_nf(f, 1.0, rule);
        const TermBreakdown b = rhs_nf(f, 1.0, lag);
        CHECK(sup(sub(a.commutator, b.commutator)) < 1e-8);
        CHECK(sup(sub(a.elliptic, b.elliptic)) < 1e-8);
        CHECK(sup(sub(a.hfxx, b.hfxx)) < 1e-8);
        CHECK(sup(sub(a.rem_eta_minus, b.rem_eta_minus)) < 1e-8);
        CHECK(sup(sub(a.rem_eta_plus, b.rem_eta_plus)) < 1e-8);
        CHECK(sup(sub(a.rem_S_minus, b.rem_S_minus)) < 1e-8);
        CHECK(sup(sub(a.rem_S_plus, b.rem_S_plus)) < 1e-8);
    }

    SUBCASE("weighted-dissipation sign of the elliptic pairing") {
        std::mt19937_64 rng(13);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<double> v(g.n_points(), 0.0);
            for (int m = 1; m <= 6; ++m) {
                const double am = 0.1 * u(rng);
                for (std::size_t j = 0; j < v.size(); ++j) v[j] += am * std::sin(m * g.node(j));
            }
            const ScalarField f = ScalarField::from_values(g, std::move(v));
            const TermBreakdown tb = rhs_nf(f, 1.0, rule);
            const ScalarField lam3 = frac_laplacian(f, 3.0);
            CHECK(inner_product(lam3, tb.elliptic) <= 1e-12);
        }
    }
}

TEST_CASE("rhs symmetries") {
    const PeriodicGrid g = make_grid(256, 2.0 * pi);
    QuadratureSpec rule;
    PhysicalParams p;
    p.sigma = 1.0;
    p.g_rho = 0.5;
    const ScalarField f =
        sample(g, [](double x) { return 0.15 * std::sin(x) + 0.04 * std::cos(2.0 * x); });

    SUBCASE("translation equivariance") {
        const double a = 0.8;
        for (int form = 0; form < 3; ++form) {
            auto eval = [&](const ScalarField& q) {
                if (form == 0) return rhs_cp0(q, p, rule);
                if (form == 1) return rhs_cp1(q, p, rule);
                return rhs_nf(q, p.sigma, rule).total;
            };
            const ScalarField lhs = eval(shift(f, a));
            const ScalarField rhs = shift(eval(f), a);
            CHECK(sup(sub(lhs, rhs)) < 1e-9);
        }
    }

    SUBCASE("reflection equivariance") {
        for (int form = 0; form < 3; ++form) {
            auto eval = [&](const ScalarField& q) {
                if (form == 0) return rhs_cp0(q, p, rule);
                if (form == 1) return rhs_cp1(q, p, rule);
                return rhs_nf(q, p.sigma, rule).total;
            };
            const ScalarField lhs = eval(reflect(f));
            const ScalarField rhs = reflect(eval(f));
            CHECK(sup(sub(lhs, rhs)) < 1e-9);
        }
    }

    SUBCASE("parabolic scaling f_lambda(x) = f(lambda x)/lambda, g = 0") {
        PhysicalParams ps;
        ps.sigma = 1.0;
        ps.g_rho = 0.0;
        const double lam = 2.0;
        const PeriodicGrid gh = make_grid(128, pi); // half-length grid
        const ScalarField base = sample(g, [](double x) { return 0.2 * std::sin(x); });
        const ScalarField scaled =
            sample(gh, [&](double x) { return 0.2 * std::sin(lam * x) / lam; });
        const ScalarField r_base = rhs_cp1(base, ps, rule);
        const ScalarField r_scaled = rhs_cp1(scaled, ps, rule);
        // rhs(f_lambda)(x) = lambda^2 rhs(f)(lambda x)
        double worst = 0.0;
        for (std::size_t j = 0; j < gh.n_points(); ++j) {
            const double want = lam * lam * r_base[(2 * j) % g.n_points()];
            worst = std::max(worst, std::abs(r_scaled[j] - want));
        }
        CHECK(worst / sup(r_scaled) < 1e-4); // quadrature-tolerance agreement
    }
}
