// Command-line front end: simulation runs, verification suites, diagnostics.
// Exit codes: 0 success/pass, 1 usage or config error, 2 numerical failure or
// verification FAIL.

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "muskat/config_io.hpp"
#include "muskat/difference_ops.hpp"
#include "muskat/monitor.hpp"
#include "muskat/norms.hpp"
#include "muskat/rhs.hpp"
#include "muskat/timestepper.hpp"

using namespace muskat;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_fail = 2;

double sup_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

double rel_l2(const ScalarField& a, const ScalarField& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        num += (a[j] - b[j]) * (a[j] - b[j]);
        den += b[j] * b[j];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

void print_norm_report(const NormReport& r) {
    std::printf("  t         = %.6g\n", r.time);
    std::printf("  L2        = %.10g\n", r.l2);
    std::printf("  H^{3/2}   = %.10g\n", r.h32);
    std::printf("  H^{5/2}   = %.10g\n", r.h52);
    std::printf("  H^3       = %.10g\n", r.h3);
    std::printf("  H^4       = %.10g\n", r.h4);
    std::printf("  B^1_inf,1 = %.10g\n", r.b1_inf_1);
    std::printf("  |f_x|_inf = %.10g\n", r.lip);
    std::printf("  smallness = %.10g\n", r.smallness);
}

// ---------------------------------------------------------------- run

int cmd_run(const std::string& config_path, const std::string& resume_path,
            const std::string& out_dir) {
    LoadedConfig lc;
    try {
        lc = load_config(config_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_usage;
    }
    for (const std::string& w : lc.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    SimConfig& cfg = lc.config;

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        std::fprintf(stderr, "cannot create output directory '%s'\n", out_dir.c_str());
        return exit_usage;
    }

    try {
        PeriodicGrid grid(cfg.n_points, cfg.length);
        ScalarField f0 = zero_field(grid);
        if (!resume_path.empty()) {
            auto [field, meta] = load_snapshot(resume_path);
            if (field.grid() != grid) {
                std::fprintf(stderr, "snapshot grid does not match config grid\n");
                return exit_usage;
            }
            std::printf("resuming from snapshot (taken at model time %.6g)\n", meta.time);
            f0 = std::move(field);
        } else {
            f0 = parse_initial_data(cfg.init, grid, cfg.seed);
        }

        const NormReport initial = norm_report(f0, 0.0, cfg.smallness_C);
        std::printf("initial norms:\n");
        print_norm_report(initial);

        Trajectory traj;
        bool blew_up = false;
        std::string blow_msg;
        try {
            traj = run(cfg, f0, make_energy_fn(cfg.params, cfg.quad));
        } catch (BlowUpError& e) {
            blew_up = true;
            blow_msg = e.what();
            traj = std::move(e.partial);
        }

        const auto csv = std::filesystem::path(out_dir) / "series.csv";
        const auto json = std::filesystem::path(out_dir) / "series.json";
        write_timeseries(traj, csv.string(), SeriesFormat::csv);
        write_timeseries(traj, json.string(), SeriesFormat::json);
        if (!traj.reports.empty()) {
            SnapshotMeta meta;
            meta.time = traj.reports.back().time;
            meta.sigma = cfg.params.sigma;
            meta.g_rho = cfg.params.g_rho;
            // on blow-up the trajectory carries the last valid state
            const ScalarField& last = traj.final_field.size() != 0 ? traj.final_field : f0;
            const auto snap = std::filesystem::path(out_dir) / "final.snap";
            save_snapshot(last, meta, snap.string());
        }

        if (blew_up) {
            std::printf("RUN FAILED: %s (partial series written to %s)\n", blow_msg.c_str(),
                        out_dir.c_str());
            return exit_fail;
        }

        const NormReport& fin = traj.reports.back().norms;
        std::printf("final norms:\n");
        print_norm_report(fin);
        const GateVerdict gate = smallness_gate(traj);
        double max_k_required = 0.0;
        for (const ReportRow& r : traj.reports)
            max_k_required = std::max(max_k_required, r.energy.K_required);
        std::printf("smallness gate: %s\n",
                    gate.held_throughout ? "held throughout" : "violated");
        if (!gate.held_throughout && gate.first_violation)
            std::printf("  first violation at t = %.6g\n", *gate.first_violation);
        std::printf("realized K_required (max over run): %.6g\n", max_k_required);
        if (traj.halted_early)
            std::printf("run halted early at step %zu: %s\n", traj.halt_step,
                        traj.halt_reason.c_str());
        std::printf("series written to %s\n", out_dir.c_str());
        return exit_ok;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_fail;
    }
}

// ---------------------------------------------------------------- verify-identities

int cmd_verify_identities(std::size_t n, std::vector<double> alphas) {
    if (alphas.empty()) alphas = {0.1, 0.25, 0.5, 1.0};
    const PeriodicGrid g = make_grid(n, 2.0 * pi);
    QuadratureSpec rule;
    rule.inner_order = 16;

    struct Field {
        const char* name;
        ScalarField f;
    };
    std::vector<Field> fields;
    fields.push_back({"sin(x)", sample(g, [](double x) { return std::sin(x); })});
    fields.push_back({"sin(2x)", sample(g, [](double x) { return std::sin(2.0 * x); })});
    fields.push_back({"sin(x)+0.3sin(3x)", sample(g, [](double x) {
                          return std::sin(x) + 0.3 * std::sin(3.0 * x);
                      })});

    bool all_pass = true;
    bool usage_note = false;
    // per-row: error <= 1e-5 at h and h/2. The 2nd-order confirmation uses
    // the suite max: rows where the match already sits at the evaluation
    // noise floor (~1e-8) cannot show a truncation-dominated ratio.
    double max_e1 = 0.0, max_e2 = 0.0;
    std::printf("%-20s %-6s %-6s %12s %12s %8s  %s\n", "field", "id", "alpha", "err(h)",
                "err(h/2)", "ratio", "verdict");

    for (const Field& fd : fields) {
        for (double a : alphas) {
            if (a == 0.0) {
                std::printf("%-20s %-6s %-6s %12s %12s %8s  ERROR: alpha must be nonzero\n",
                            fd.name, "-", "0", "-", "-", "-");
                usage_note = true;
                continue;
            }
            struct Row {
                const char* id;
                ScalarField closed;
                DiffOpKind kind;
                int order;
            };
            std::vector<Row> rows;
            rows.push_back({"dS", dS_dalpha_closed(fd.f, a), DiffOpKind::S_sym, 1});
            rows.push_back({"d2S", d2S_dalpha_closed(fd.f, a, rule), DiffOpKind::S_sym, 2});
            rows.push_back({"dD", dD_dalpha_closed(fd.f, a, rule), DiffOpKind::D_sym, 1});
            rows.push_back({"d2D", d2D_dalpha_closed(fd.f, a, rule), DiffOpKind::D_sym, 2});
            for (const Row& row : rows) {
                const double h = (row.order == 1) ? 1e-3 : 1.5e-3;
                auto fd_approx = [&](double step) {
                    if (row.order == 1)
                        return scale(sub(apply(row.kind, fd.f, a + step),
                                         apply(row.kind, fd.f, a - step)),
                                     1.0 / (2.0 * step));
                    return scale(sub(add(apply(row.kind, fd.f, a + step),
                                         apply(row.kind, fd.f, a - step)),
                                     scale(apply(row.kind, fd.f, a), 2.0)),
                                 1.0 / (step * step));
                };
                const double e1 = sup_diff(row.closed, fd_approx(h));
                const double e2 = sup_diff(row.closed, fd_approx(h / 2.0));
                const double ratio = e1 / e2;
                const bool pass = e1 <= 1e-5 && e2 <= 1e-5;
                all_pass = all_pass && pass;
                max_e1 = std::max(max_e1, e1);
                max_e2 = std::max(max_e2, e2);
                std::printf("%-20s %-6s %-6g %12.3e %12.3e %8.2f  %s\n", fd.name, row.id, a,
                            e1, e2, ratio, pass ? "PASS" : "FAIL");
            }
        }
        // D_alpha f - 2 f_x = -(1/alpha) int_0^alpha s_eta f_x d eta at alpha = 1
        const double a = 1.0;
        const ScalarField fx = derivative(fd.f, 1);
        const ScalarField lhs = eta_integral(fx, a, rule);
        const ScalarField rhs = sub(scale(fx, 2.0), apply(DiffOpKind::D_sym, fd.f, a));
        const double err = sup_diff(lhs, rhs);
        const bool pass = err <= 1e-8;
        all_pass = all_pass && pass;
        std::printf("%-20s %-6s %-6g %12.3e %12s %8s  %s\n", fd.name, "etaD", a, err, "-", "-",
                    pass ? "PASS" : "FAIL");
    }
    if (usage_note)
        std::printf("note: alpha = 0 rows were skipped; normalized operators are undefined there\n");
    const double suite_ratio = max_e2 > 0.0 ? max_e1 / max_e2 : 0.0;
    const bool order_ok = suite_ratio >= 3.5;
    all_pass = all_pass && order_ok;
    std::printf("summary: max err %.3e, suite-max ratio %.2f (2nd-order %s) -> %s\n", max_e1,
                suite_ratio, order_ok ? "confirmed" : "NOT confirmed",
                all_pass ? "PASS" : "FAIL");
    return all_pass ? exit_ok : exit_fail;
}

// ---------------------------------------------------------------- verify-equivalence

int cmd_verify_equivalence(const std::string& field_spec, double sigma, int refinements,
                           double tol, std::size_t n) {
    const PeriodicGrid g = make_grid(n, 2.0 * pi);
    ScalarField f = zero_field(g);
    try {
        f = parse_initial_data(field_spec, g, 0);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "bad --field expression: %s\n", e.what());
        return exit_usage;
    }
    PhysicalParams p;
    p.sigma = sigma;
    p.g_rho = 0.0;

    QuadratureSpec level;
    level.n_alpha = 64;
    level.inner_order = 12;
    level.alpha_min = g.spacing() / 2.0;

    std::printf("field: %s, sigma = %g, |f_x|_inf = %.4g\n", field_spec.c_str(), sigma,
                lp(derivative(f, 1), lp_infinity));
    std::vector<double> mismatches;
    for (int lev = 0; lev < refinements; ++lev) {
        const TermBreakdown tb = rhs_nf(f, sigma, level);
        const ScalarField c1 = rhs_cp1(f, p, level);
        const double mis = rel_l2(tb.total, c1);
        mismatches.push_back(mis);
        std::printf("level %d: n_alpha=%-4zu inner=%-3zu alpha_min=%.2e  mismatch = %.6e\n",
                    lev, level.n_alpha, level.inner_order, level.alpha_min, mis);
        if (lev == refinements - 1) {
            std::printf("term magnitudes (L2) at finest level:\n");
            std::printf("  commutator    %.6e\n", lp(tb.commutator, 2.0));
            std::printf("  elliptic      %.6e\n", lp(tb.elliptic, 2.0));
            std::printf("  hfxx          %.6e\n", lp(tb.hfxx, 2.0));
            std::printf("  rem_eta_minus %.6e\n", lp(tb.rem_eta_minus, 2.0));
            std::printf("  rem_eta_plus  %.6e\n", lp(tb.rem_eta_plus, 2.0));
            std::printf("  rem_S_minus   %.6e\n", lp(tb.rem_S_minus, 2.0));
            std::printf("  rem_S_plus    %.6e\n", lp(tb.rem_S_plus, 2.0));
        }
        level = level.refined();
    }
    // each level must improve on the previous one unless it is already two
    // decades below the requested tolerance, where further change is noise
    const double floor = std::max(1e-8, 1e-2 * tol);
    bool sequence_ok = true;
    for (std::size_t i = 1; i < mismatches.size(); ++i)
        sequence_ok = sequence_ok && (mismatches[i] < mismatches[i - 1] || mismatches[i] <= floor);
    const bool pass = sequence_ok && mismatches.back() <= tol;
    std::printf("sequence: %s, finest mismatch %.3e vs tol %.1e -> %s\n",
                sequence_ok ? "decreasing (or converged)" : "NOT decreasing", mismatches.back(),
                tol, pass ? "PASS" : "FAIL");
    return pass ? exit_ok : exit_fail;
}

// ---------------------------------------------------------------- verify-interpolation

int cmd_verify_interpolation(int samples, std::uint64_t seed) {
    const PeriodicGrid g = make_grid(256, 2.0 * pi);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::vector<std::array<double, 3>> triples = {
        {1.5, 3.0, 0.5}, {1.5, 3.0, 2.0 / 3.0}, {0.0, 1.5, 0.5}};
    int pass_count = 0;
    for (int i = 0; i < samples; ++i) {
        std::vector<double> v(g.n_points(), 0.0);
        for (int m = 1; m <= 20; ++m) {
            const double a = u(rng), b = u(rng);
            for (std::size_t j = 0; j < v.size(); ++j)
                v[j] += a * std::sin(m * g.node(j)) + b * std::cos(m * g.node(j));
        }
        const ScalarField f = ScalarField::from_values(g, std::move(v));
        bool ok = true;
        for (const auto& t : triples) ok = ok && interp_check(f, t[0], t[1], t[2]).ok;
        if (ok) ++pass_count;
    }
    std::printf("%d/%d random fields satisfy the interpolation inequality "
                "(triples (3/2,3,1/2), (3/2,3,2/3), (0,3/2,1/2))\n",
                pass_count, samples);
    // single-mode equality case
    const ScalarField mode = sample(g, [](double x) { return std::sin(4.0 * x); });
    const InterpCheck eq = interp_check(mode, 1.5, 3.0, 0.5);
    const bool eq_ok = std::abs(eq.lhs - eq.rhs) <= 1e-12 * eq.rhs;
    std::printf("single-mode equality case: lhs = %.15g, rhs = %.15g -> %s\n", eq.lhs, eq.rhs,
                eq_ok ? "PASS" : "FAIL");
    const bool pass = (pass_count == samples) && eq_ok;
    std::printf("%s\n", pass ? "PASS" : "FAIL");
    return pass ? exit_ok : exit_fail;
}

// ---------------------------------------------------------------- linear-symbol

int cmd_linear_symbol(int k_max, std::size_t n) {
    const PeriodicGrid g = make_grid(n, 2.0 * pi);
    QuadratureSpec rule;
    bool all_pass = true;

    // rate of the mode-k coefficient over a short ETD run
    auto fitted_rate = [&](const PhysicalParams& p, int k) {
        const double eps = 1e-6;
        const ScalarField f0 =
            sample(g, [&](double x) { return eps * std::sin(static_cast<double>(k) * x); });
        const double lam = std::abs(linear_symbol(p, static_cast<double>(k)));
        const double T = 0.5 / lam;
        const int steps = 16;
        const double dt = T / steps;
        SimConfig cfg;
        cfg.params = p;
        cfg.n_points = n;
        cfg.quad = rule;
        cfg.dt = dt;
        const detail::EtdCoeffs co(g, p, dt);
        const RhsFn rhs = make_rhs(cfg);
        ScalarField f = f0;
        for (int s = 0; s < steps; ++s) f = etd_step(f, co, g, p, rhs);
        const auto amp = [&](const ScalarField& q) {
            double best = 0.0;
            for (std::size_t idx = 0; idx < g.n_points(); ++idx)
                if (g.mode(idx) == k) best = std::abs(q.spectrum()[idx]);
            return best;
        };
        return std::log(amp(f) / amp(f0)) / T;
    };

    std::printf("surface tension: fitted rate vs -sigma k^3\n");
    std::printf("%-8s %-4s %14s %14s %10s  %s\n", "sigma", "k", "fitted", "expected", "rel err",
                "verdict");
    for (double sigma : {0.5, 1.0, 2.0}) {
        PhysicalParams p;
        p.sigma = sigma;
        p.g_rho = 0.0;
        for (int k = 1; k <= k_max; ++k) {
            const double fit = fitted_rate(p, k);
            const double want = -sigma * std::pow(k, 3.0);
            const double rel = std::abs(fit / want - 1.0);
            const bool pass = rel < 0.01;
            all_pass = all_pass && pass;
            std::printf("%-8g %-4d %14.6e %14.6e %10.2e  %s\n", sigma, k, fit, want, rel,
                        pass ? "PASS" : "FAIL");
        }
    }

    std::printf("gravity only: fitted rate / (-k) should be constant (= c_g)\n");
    PhysicalParams pg;
    pg.sigma = 0.0;
    pg.g_rho = 1.0;
    double cg1 = 0.0;
    for (int k = 1; k <= k_max; ++k) {
        const double fit = fitted_rate(pg, k);
        const double cg = -fit / k;
        if (k == 1) cg1 = cg;
        const double rel = std::abs(cg / cg1 - 1.0);
        const bool pass = rel < 0.01;
        all_pass = all_pass && pass;
        std::printf("k=%-3d c_g = %.8f rel-to-k1 %10.2e  %s\n", k, cg, rel, pass ? "PASS" : "FAIL");
    }
    std::printf("c_g(k=1) = %.8f (config key gravity_symbol_c)\n", cg1);
    std::printf("%s\n", all_pass ? "PASS" : "FAIL");
    return all_pass ? exit_ok : exit_fail;
}

// ---------------------------------------------------------------- monitor / norms

int cmd_monitor(const std::string& series_path, double K) {
    try {
        const Trajectory traj = read_timeseries_csv(series_path);
        if (traj.reports.empty()) {
            std::fprintf(stderr, "series has no reports\n");
            return exit_usage;
        }
        const InequalityVerdict v = check_inequality(traj, K);
        const GateVerdict gate = smallness_gate(traj);
        std::printf("reports: %zu, time span [%.6g, %.6g]\n", traj.reports.size(),
                    traj.reports.front().time, traj.reports.back().time);
        std::printf("integrated inequality with K = %g: %s\n", K, v.ok ? "PASS" : "FAIL");
        std::printf("  worst margin %.6e at t = %.6g; smallest passing K = %.6g\n",
                    v.worst_margin, v.worst_time, v.K_needed);
        std::printf("smallness gate: %s\n", gate.held_throughout ? "held" : "violated");
        if (gate.first_violation) std::printf("  first violation at t = %.6g\n", *gate.first_violation);
        // decay surveillance: with the gate held, H^{3/2} should not rise
        // between reports beyond per-step slack
        if (gate.held_throughout) {
            double worst_rise = 0.0, rise_time = 0.0;
            for (std::size_t i = 1; i < traj.reports.size(); ++i) {
                const double rise = traj.reports[i].norms.h32 - traj.reports[i - 1].norms.h32;
                if (rise > worst_rise) {
                    worst_rise = rise;
                    rise_time = traj.reports[i].time;
                }
            }
            if (worst_rise > 1e-8)
                std::printf("finding: H^{3/2} rose by %.3e at t = %.6g although the smallness "
                            "gate held\n",
                            worst_rise, rise_time);
            else
                std::printf("H^{3/2} non-increasing between reports (worst rise %.3e)\n",
                            worst_rise);
        }
        return v.ok ? exit_ok : exit_fail;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_usage;
    }
}

int cmd_norms(const std::string& snapshot_path) {
    try {
        const auto [f, meta] = load_snapshot(snapshot_path);
        std::printf("snapshot: n = %zu, L = %.10g, model time %.6g, sigma = %g, g_rho = %g\n",
                    f.size(), f.grid().length(), meta.time, meta.sigma, meta.g_rho);
        print_norm_report(norm_report(f, meta.time));
        return exit_ok;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_usage;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudospectral Muskat (surface tension) simulator and verification harness"};
    app.require_subcommand(1);

    // run
    auto* run_cmd = app.add_subcommand("run", "run a simulation from a config file");
    std::string config_path, resume_path, out_dir = "out";
    run_cmd->add_option("--config", config_path, "config file path")->required();
    run_cmd->add_option("--resume", resume_path, "snapshot to resume from");
    run_cmd->add_option("--out", out_dir, "output directory (default: out)");

    // verify-identities
    auto* vid = app.add_subcommand("verify-identities",
                                   "closed-form alpha-derivative identities vs differencing");
    std::size_t vid_n = 256;
    std::vector<double> vid_alphas;
    vid->add_option("--n", vid_n, "grid size (default 256)");
    vid->add_option("--alphas", vid_alphas, "alpha values (default 0.1 0.25 0.5 1.0)");

    // verify-equivalence
    auto* veq = app.add_subcommand("verify-equivalence",
                                   "slope form vs oscillatory-integral form");
    std::string veq_field = "0.2*sin(1x)+0.05*sin(3x)";
    double veq_sigma = 1.0, veq_tol = 1e-3;
    int veq_refine = 3;
    std::size_t veq_n = 256;
    veq->add_option("--field", veq_field, "field expression");
    veq->add_option("--sigma", veq_sigma, "surface tension");
    veq->add_option("--refinements", veq_refine, "number of refinement levels (default 3)");
    veq->add_option("--tol", veq_tol, "mismatch tolerance at the finest level (default 1e-3)");
    veq->add_option("--n", veq_n, "grid size (default 256)");

    // verify-interpolation
    auto* vin = app.add_subcommand("verify-interpolation", "Sobolev interpolation inequality");
    int vin_samples = 100;
    std::uint64_t vin_seed = 2024;
    vin->add_option("--samples", vin_samples, "number of random fields (default 100)");
    vin->add_option("--seed", vin_seed, "random seed");

    // linear-symbol
    auto* lsy = app.add_subcommand("linear-symbol", "small-amplitude growth-rate fits");
    int lsy_kmax = 8;
    std::size_t lsy_n = 256;
    lsy->add_option("--k-max", lsy_kmax, "largest mode (default 8)");
    lsy->add_option("--n", lsy_n, "grid size (default 256)");

    // monitor
    auto* mon = app.add_subcommand("monitor", "check the integrated inequality on a saved series");
    std::string mon_series;
    double mon_k = 100.0;
    mon->add_option("--series", mon_series, "series.csv path")->required();
    mon->add_option("--K", mon_k, "inequality constant (default 100)");

    // norms
    auto* nrm = app.add_subcommand("norms", "norm report for a snapshot");
    std::string nrm_snapshot;
    nrm->add_option("--snapshot", nrm_snapshot, "snapshot path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_usage;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(config_path, resume_path, out_dir);
        if (vid->parsed()) return cmd_verify_identities(vid_n, vid_alphas);
        if (veq->parsed())
            return cmd_verify_equivalence(veq_field, veq_sigma, veq_refine, veq_tol, veq_n);
        if (vin->parsed()) return cmd_verify_interpolation(vin_samples, vin_seed);
        if (lsy->parsed()) return cmd_linear_symbol(lsy_kmax, lsy_n);
        if (mon->parsed()) return cmd_monitor(mon_series, mon_k);
        if (nrm->parsed()) return cmd_norms(nrm_snapshot);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_fail;
    }
    return exit_usage;
}
