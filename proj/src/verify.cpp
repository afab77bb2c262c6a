#include "birot/verify.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <random>

#include "birot/diagnostics.hpp"
#include "birot/lorentz.hpp"
#include "birot/scenario.hpp"
#include "birot/tensor.hpp"
#include "birot/velocity.hpp"

namespace birot {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

ScenarioConfig reference_config(const std::string& out_dir) {
    ScenarioConfig cfg;  // gaussian blob (1,1), width 0.25, amplitude 1
    cfg.grid = {4.0, 4.0, 96, 96, Stagger::cell_centered};
    cfg.dt = 0.01;
    cfg.t_end = 1.0;
    cfg.seed_threshold = 1e-4;
    cfg.emit_every = 10;
    cfg.output_dir = out_dir + "/reference";
    return cfg;
}

/// Criteria that share the reference run reuse one result.
struct VerifyContext {
    std::string out_dir;
    std::optional<RunResult> reference;

    const RunResult& reference_run(std::ostream& log) {
        if (!reference) {
            log << "  [running reference scenario: 96x96, dt=0.01, t_end=1]\n";
            reference = run(reference_config(out_dir));
            if (reference->exit_code != exit_ok)
                log << "  [reference run FAILED: " << reference->error << "]\n";
        }
        return *reference;
    }
};

// ---------------------------------------------------------------- kernel --

CriterionResult c1_axis_vanishing() {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(0.05, 2.5);
    const QuadratureSpec quad{};
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double s = u(rng);
        const QuadrantPoint src{u(rng), u(rng)};
        const double on_axis = std::abs(eval_Fr({{0.0, s}, src}, quad));
        const double off_axis = std::abs(eval_Fr({{0.5, s}, src}, quad));
        if (off_axis > 0.0) worst = std::max(worst, on_axis / off_axis);
    }
    return {"C1", "kernel axis vanishing", worst <= 1e-12,
            fmt("max |Fr(0,s)|/|Fr(0.5,s)| = %.3e (gate 1e-12)", worst)};
}

CriterionResult c2_swap_symmetry() {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> u(0.05, 2.5);
    const QuadratureSpec quad{};
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const KernelArgs a{{u(rng), u(rng)}, {u(rng), u(rng)}};
        const double fs = eval_Fs(a, quad);
        const double fr = eval_Fr({{a.target.s, a.target.r}, {a.source.s, a.source.r}}, quad);
        const double scale = std::max({std::abs(fs), std::abs(fr), 1e-300});
        worst = std::max(worst, std::abs(fs - fr) / scale);
    }
    return {"C2", "kernel swap symmetry", worst <= 1e-14,
            fmt("max rel |Fs - Fr(swapped)| = %.3e (gate 1e-14)", worst)};
}

CriterionResult c3_fa_closed_form() {
    const QuadratureSpec quad{};
    double worst_abs = 0.0;
    for (double tau : {0.01, 0.1, 1.0, 10.0, 100.0}) {
        const double exact = kPi / std::sqrt(tau * (tau + 4.0));
        worst_abs = std::max(worst_abs, std::abs(f_a(tau, 1.0, quad) - exact));
    }
    // Envelope-constant stability under quadrature doubling.
    std::vector<double> taus;
    for (int k = 0; k <= 80; ++k) taus.push_back(std::pow(10.0, -4.0 + 0.1 * k));
    QuadratureSpec twice = quad;
    twice.n_theta *= 2;
    double worst_drift = 0.0;
    bool finite = true;
    for (double a : {1.0, 1.5, 2.0}) {
        const double c1 = f_a_bound_check(a, taus, quad);
        const double c2 = f_a_bound_check(a, taus, twice);
        finite = finite && std::isfinite(c1) && std::isfinite(c2);
        worst_drift = std::max(worst_drift, std::abs(c1 - c2) / c2);
    }
    const bool pass = worst_abs <= 1e-8 && finite && worst_drift <= 0.01;
    return {"C3", "f_a closed form and envelope bound", pass,
            fmt("max |f_1 - closed form| = %.3e (gate 1e-8); envelope-constant drift "
                "under doubling = %.3e (gate 1e-2)",
                worst_abs, worst_drift)};
}

CriterionResult c4_scaling_law() {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    const QuadratureSpec quad{};
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        const KernelArgs a{{u(rng), u(rng)}, {u(rng), u(rng)}};
        const double base = eval_Fr(a, quad);
        for (double lam : {0.5, 2.0, 10.0}) {
            const KernelArgs sc{{lam * a.target.r, lam * a.target.s},
                                {lam * a.source.r, lam * a.source.s}};
            const double scaled = lam * eval_Fr(sc, quad);
            worst = std::max(worst, std::abs(scaled - base) /
                                        std::max(std::abs(base), 1e-300));
        }
    }
    return {"C4", "kernel scaling law", worst <= 1e-10,
            fmt("max rel |lambda Fr(lambda.) - Fr| = %.3e (gate 1e-10)", worst)};
}

// ---------------------------------------------------------------- lorentz --

CriterionResult c11_lorentz() {
    std::mt19937_64 rng(1111);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        GridSpec g{2.0, 2.0, 24, 24, Stagger::cell_centered};
        ScalarField f(g);
        for (double& v : f.values()) {
            v = u(rng);
            if (std::abs(v) < 0.08) v = 0.0;  // exercise empty levels
        }
        const double p = 1.5 + (k % 4) * 0.75;  // 1.5, 2.25, 3.0, 3.75
        const double lp = lp_norm(f, p);
        const double lpp = lorentz_norm(f, p, p);
        if (lp > 0.0) worst = std::max(worst, std::abs(lpp - lp) / lp);
    }
    // Single-plateau closed forms for L^{4,1} and L^{4,inf}.
    double worst_plateau = 0.0;
    for (double vol : {0.37, 2.0, 91.5}) {
        RearrangementProfile prof{{{1.0, vol}}};
        const double q1 = lorentz_norm(prof, 4.0, 1.0);
        const double qi = lorentz_norm(prof, 4.0, std::numeric_limits<double>::infinity());
        worst_plateau = std::max(worst_plateau,
                                 std::abs(q1 - 4.0 * std::pow(vol, 0.25)) /
                                     (4.0 * std::pow(vol, 0.25)));
        worst_plateau = std::max(
            worst_plateau, std::abs(qi - std::pow(vol, 0.25)) / std::pow(vol, 0.25));
    }
    const bool pass = worst <= 1e-10 && worst_plateau <= 1e-12;
    return {"C11", "Lorentz L^{p,p} = L^p and plateau closed forms", pass,
            fmt("max rel |L^{p,p} - L^p| = %.3e (gate 1e-10); plateau error = %.3e "
                "(gate 1e-12)",
                worst, worst_plateau)};
}

// ----------------------------------------------------------------- routes --

double ref_zeta(double r, double s) {
    return std::exp(-8.0 * ((r - 1.0) * (r - 1.0) + (s - 1.0) * (s - 1.0)));
}

CriterionResult c5_route_agreement(std::ostream& log) {
    const GridSpec cell{4.0, 4.0, 96, 96, Stagger::cell_centered};
    ScalarField zeta(cell);
    zeta.fill(ref_zeta);
    const ScalarField w = w_from_zeta(zeta);
    const QuadratureSpec quad{QuadRule::gauss_legendre, 16, 16, true, 1.0, 20};

    // Ten probes on a circle of radius 1.45 around the blob, off the bulk
    // support (|w| >= 1e-3 max) by more than two cell diagonals.
    std::vector<QuadrantPoint> probes;
    for (int k = 0; k < 10; ++k) {
        const double ang = (-38.0 + 166.0 * k / 9.0) * kPi / 180.0;
        probes.push_back({1.0 + 1.45 * std::cos(ang), 1.0 + 1.45 * std::sin(ang)});
    }
    const auto bs = biot_savart(w, probes, quad);
    double worst_oracle = 0.0;
    for (std::size_t k = 0; k < probes.size(); ++k) {
        const Velocity4 o =
            brute_force_velocity_4d(w, {probes[k].r, 0.0, probes[k].s, 0.0}, 48);
        const double num = std::hypot(bs[k].u_r - o.u_r, bs[k].u_s - o.u_s);
        const double den = std::max(std::hypot(o.u_r, o.u_s), 1e-300);
        worst_oracle = std::max(worst_oracle, num / den);
    }
    log << fmt("  [C5] kernel vs 4D oracle: max rel err over 10 probes = %.3e\n",
               worst_oracle);

    // Stream-function route on the interior quarter of the node grid.
    const GridSpec node{4.0, 4.0, 96, 96, Stagger::node_centered};
    ScalarField wn(node);
    wn.fill([](double r, double s) { return r * s * ref_zeta(r, s); });
    const StreamField psi = solve_stream(wn);
    const auto [ur, us] = velocity_from_stream(psi);

    std::vector<QuadrantPoint> targets;
    std::vector<double> ref_r, ref_s;
    for (int j = 24; j <= 72; ++j)
        for (int i = 24; i <= 72; ++i) {
            targets.push_back({node.r(i), node.s(j)});
            ref_r.push_back(ur.at(i, j));
            ref_s.push_back(us.at(i, j));
        }
    const auto bs2 = biot_savart(w, targets, quad);
    double num2 = 0.0, den2 = 0.0;
    for (std::size_t k = 0; k < targets.size(); ++k) {
        const double dr = bs2[k].u_r - ref_r[k];
        const double ds = bs2[k].u_s - ref_s[k];
        num2 += dr * dr + ds * ds;
        den2 += ref_r[k] * ref_r[k] + ref_s[k] * ref_s[k];
    }
    const double l2_err = std::sqrt(num2 / std::max(den2, 1e-300));
    const bool pass = worst_oracle <= 0.05 && l2_err <= 0.05;
    return {"C5", "route agreement (kernel vs 4D oracle vs stream)", pass,
            fmt("oracle max rel = %.3e, stream interior-quarter L2 rel = %.3e "
                "(gates 5e-2)",
                worst_oracle, l2_err)};
}

CriterionResult c6_divergence_slope() {
    std::vector<double> residuals;
    for (int n : {48, 96, 192}) {
        const GridSpec node{4.0, 4.0, n, n, Stagger::node_centered};
        ScalarField wn(node);
        wn.fill([](double r, double s) { return r * s * ref_zeta(r, s); });
        const StreamField psi = solve_stream(wn);
        const auto [ur, us] = velocity_from_stream(psi);
        residuals.push_back(divergence_residual(ur, us));
    }
    const double slope = 0.5 * std::log2(residuals[0] / residuals[2]);
    return {"C6", "divergence residual refinement slope", slope >= 1.7,
            fmt("residuals {48,96,192} = {%.3e, %.3e, %.3e}, slope = %.2f (gate 1.7)",
                residuals[0], residuals[1], residuals[2], slope)};
}

// ------------------------------------------------------------ conservation --

CriterionResult c7_conservation(VerifyContext& ctx, std::ostream& log) {
    const RunResult& ref = ctx.reference_run(log);
    if (ref.exit_code != exit_ok)
        return {"C7", "exact Lagrangian conservation", false, "reference run failed"};
    const auto& rows = ref.rows;
    double d_sup = 0.0, d_l1 = 0.0;
    for (const auto& row : rows) {
        d_sup = std::max(d_sup, std::abs(row.zeta_sup - rows.front().zeta_sup));
        d_l1 = std::max(d_l1, std::abs(row.zeta_l1 - rows.front().zeta_l1));
    }
    const bool pass = d_sup == 0.0 && d_l1 == 0.0;
    return {"C7", "exact Lagrangian conservation", pass,
            fmt("max |zeta_sup - init| = %.3e, max |zeta_l1 - init| = %.3e "
                "(both must be exactly 0)",
                d_sup, d_l1)};
}

CriterionResult c8_antisymmetry(VerifyContext& ctx, std::ostream& log) {
    ScenarioConfig cfg;
    cfg.grid = {4.0, 4.0, 96, 96, Stagger::cell_centered};
    cfg.kind = InitialKind::diagonal_antisymmetric_pair;
    cfg.center = {1.4, 0.8};
    cfg.width = 0.2;
    cfg.amplitude = 1.0;
    cfg.dt = 0.01;
    cfg.t_end = 0.5;
    cfg.seed_threshold = 1e-3;
    cfg.emit_every = 10;
    cfg.output_dir = ctx.out_dir + "/antisymmetric";
    log << "  [running diagonal antisymmetric scenario: 96x96, t_end=0.5]\n";
    const RunResult res = run(cfg);
    if (res.exit_code != exit_ok)
        return {"C8", "diagonal antisymmetry preservation", false,
                "scenario failed: " + res.error};

    const ScalarField w = read_snapshot(std::filesystem::path(cfg.output_dir) / "w_final.txt");
    double wmax = 0.0, defect = 0.0;
    for (int j = 0; j < cfg.grid.n_s; ++j)
        for (int i = 0; i < cfg.grid.n_r; ++i) {
            wmax = std::max(wmax, std::abs(w.at(i, j)));
            defect = std::max(defect, std::abs(w.at(i, j) + w.at(j, i)));
        }
    const double rel = defect / std::max(wmax, 1e-300);
    return {"C8", "diagonal antisymmetry preservation", rel <= 1e-6,
            fmt("max |w(r,s) + w(s,r)| / max|w| = %.3e (gate 1e-6)", rel)};
}

// -------------------------------------------------------------- estimates --

struct ScaleRatios {
    double prop;         // sup|u| / ((mom_r + mom_s)^1/2 zeta_sup^1/2)
    double vel_lorentz;  // sup|u| / ||w||_{L^{4,1}}
    double ratio_over_r; // sup|u^r/r| / ||w/r||_{L^{4,1}}, off-axis sites
};

ScaleRatios prop_ratio_for_scale(double lambda, const std::string& out_dir) {
    ScenarioConfig cfg = reference_config(out_dir);
    cfg.grid.r_max = 4.0 / lambda;
    cfg.grid.s_max = 4.0 / lambda;
    cfg.center = {1.0 / lambda, 1.0 / lambda};
    cfg.width = 0.25 / lambda;
    cfg.amplitude = lambda * lambda * lambda;

    const ScalarField zeta0 = build_initial_zeta(cfg);
    ParticleEnsemble ens = seed_particles(zeta0, cfg.seed_threshold);

    double zeta_sup = 0.0, mom_r = 0.0, mom_s = 0.0;
    for (const Particle& p : ens.parts) {
        zeta_sup = std::max(zeta_sup, std::abs(p.zeta));
        mom_r += p.pos.r * p.pos.r * std::abs(p.zeta) * p.weight;
        mom_s += p.pos.s * p.pos.s * std::abs(p.zeta) * p.weight;
    }
    std::vector<QuadrantPoint> targets = ens.positions();
    for (int j = 0; j < 16; ++j)
        for (int i = 0; i < 16; ++i)
            targets.push_back({(i + 0.5) * cfg.grid.r_max / 16.0,
                               (j + 0.5) * cfg.grid.s_max / 16.0});
    const auto vel = ensemble_velocity(ens, targets, cfg.quad);
    double usup = 0.0, ur_over_r = 0.0;
    for (const auto& v : vel) {
        usup = std::max({usup, std::abs(v.u_r), std::abs(v.u_s)});
        // u^r/r by division off-axis; at r = 0 the quotient has the finite
        // limit d_r u^r(0,s), below the interior sup for these profiles.
        if (v.at.r > 0.0) ur_over_r = std::max(ur_over_r, std::abs(v.u_r) / v.at.r);
    }
    const double lor_w = lorentz_norm(w_from_zeta(zeta0), 4.0, 1.0);
    ScalarField w_over_r(cfg.grid);
    for (int j = 0; j < cfg.grid.n_s; ++j)
        for (int i = 0; i < cfg.grid.n_r; ++i)
            w_over_r.at(i, j) = cfg.grid.s(j) * zeta0.at(i, j);
    const double lor_wr = lorentz_norm(w_over_r, 4.0, 1.0);
    return {usup / (std::sqrt(mom_r + mom_s) * std::sqrt(zeta_sup)), usup / lor_w,
            ur_over_r / lor_wr};
}

CriterionResult c9_scale_invariant_ratio(VerifyContext& ctx) {
    const ScaleRatios base = prop_ratio_for_scale(1.0, ctx.out_dir);
    double worst = 0.0, worst_lor = 0.0, worst_over_r = 0.0;
    for (double lam : {0.5, 2.0}) {
        const ScaleRatios sc = prop_ratio_for_scale(lam, ctx.out_dir);
        worst = std::max(worst, std::abs(sc.prop - base.prop) / base.prop);
        worst_lor = std::max(worst_lor,
                             std::abs(sc.vel_lorentz - base.vel_lorentz) / base.vel_lorentz);
        worst_over_r = std::max(
            worst_over_r, std::abs(sc.ratio_over_r - base.ratio_over_r) / base.ratio_over_r);
    }
    const bool pass = worst <= 0.02 && worst_lor <= 0.02 && worst_over_r <= 0.02;
    return {"C9", "scale-invariant velocity-estimate ratios", pass,
            fmt("sup|u|/(moments^1/2 zeta_sup^1/2) = %.6f, sup|u|/||w||_{4,1} = %.6f, "
                "sup|u^r/r|/||w/r||_{4,1} = %.6f; max rel deviations over lambda in "
                "{0.5,2} = %.1e, %.1e, %.1e (gate 2e-2)",
                base.prop, base.vel_lorentz, base.ratio_over_r, worst, worst_lor,
                worst_over_r)};
}

CriterionResult c10_growth_bound(VerifyContext& ctx, std::ostream& log) {
    const RunResult& ref = ctx.reference_run(log);
    if (ref.exit_code != exit_ok)
        return {"C10", "length-function growth bound and BKM integral", false,
                "reference run failed"};
    const auto& rows = ref.rows;
    const double c0 = rows.front().w_sup;  // L(0) = 1
    const double m0 = rows.front().mom_r + rows.front().mom_s;
    double worst_ratio = 0.0, worst_moment = 0.0;
    for (const auto& row : rows) {
        const double l2 = row.length_L * row.length_L;
        worst_ratio = std::max(worst_ratio, row.w_sup / (2.0 * c0 * l2));
        worst_moment = std::max(worst_moment, (row.mom_r + row.mom_s) / (2.0 * m0 * l2));
    }
    const bool growth_ok = worst_ratio <= 1.0 && worst_moment <= 1.0;

    const double bkm = rows.back().bkm_integral;
    const bool finite = std::isfinite(bkm);
    // Slope stability: the criterion integrand must not steepen; compare the
    // mean slope over the two halves of the run.
    const std::size_t mid = rows.size() / 2;
    const double t_mid = rows[mid].time, t_end = rows.back().time;
    const double slope1 = rows[mid].bkm_integral / std::max(t_mid, 1e-300);
    const double slope2 =
        (bkm - rows[mid].bkm_integral) / std::max(t_end - t_mid, 1e-300);
    const bool stable = slope2 <= 1.5 * slope1;
    const bool pass = growth_ok && finite && stable;
    return {"C10", "length-function growth bound and BKM integral", pass,
            fmt("max w_sup / (2 C0 L^2) = %.3f, max moments / (2 M0 L^2) = %.3f "
                "(gates 1); bkm = %.4f, half-run slopes %.4f -> %.4f (gate 1.5x)",
                worst_ratio, worst_moment, bkm, slope1, slope2)};
}

CriterionResult c12_tensor(std::ostream& log) {
    std::mt19937_64 rng(1212);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> wv(-5.0, 5.0);
    double worst_frob = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double w = wv(rng);
        const auto t = assemble_tensor(w, ang(rng), ang(rng));
        const double expect = std::sqrt(2.0) * std::abs(w);
        worst_frob = std::max(worst_frob,
                              std::abs(t.frobenius() - expect) / std::max(1.0, expect));
    }

    // Cyclic-consistency residual under grid refinement.
    std::mt19937_64 rng2(1213);
    std::uniform_real_distribution<double> pos(0.6, 2.2);
    std::vector<Point4> pts;
    for (int k = 0; k < 20; ++k) {
        const double r = pos(rng2), s = pos(rng2);
        const double th = ang(rng2), ph = ang(rng2);
        pts.push_back({r * std::cos(th), r * std::sin(th), s * std::cos(ph),
                       s * std::sin(ph)});
    }
    std::vector<double> res;
    for (int n : {48, 96, 192}) {
        const GridSpec g{4.0, 4.0, n, n, Stagger::cell_centered};
        ScalarField w(g);
        w.fill([](double r, double s) { return r * s * ref_zeta(r, s); });
        res.push_back(consistency_residual(w, pts));
    }
    const double slope = 0.5 * std::log2(res[0] / res[2]);
    log << fmt("  [C12] consistency residuals {48,96,192} = {%.3e, %.3e, %.3e}\n",
               res[0], res[1], res[2]);

    // Axis-regularity estimator on the w = r s g family.
    double worst_axis = 0.0;
    for (int variant = 0; variant < 2; ++variant) {
        const GridSpec g{4.0, 4.0, 96, 96, Stagger::cell_centered};
        auto gfun = [variant](double r, double s) {
            return variant == 0
                       ? 3.0 * std::exp(-((r - 1.0) * (r - 1.0) + (s - 1.2) * (s - 1.2)) /
                                        (2.0 * 0.36))
                       : 3.0 * std::exp(-(r * r + s * s) / (2.0 * 0.49));
        };
        ScalarField w(g), zeta(g);
        w.fill([&](double r, double s) { return r * s * gfun(r, s); });
        zeta.fill(gfun);
        const auto est = axis_regularity_estimate(w);
        const double sup = lp_norm(zeta, std::numeric_limits<double>::infinity());
        worst_axis = std::max(worst_axis, std::abs(est.value - sup) / sup);
    }
    const bool pass = worst_frob <= 1e-14 && slope >= 1.7 && worst_axis <= 0.10;
    return {"C12", "vorticity tensor identities", pass,
            fmt("frobenius err = %.3e (gate 1e-14); consistency slope = %.2f (gate "
                "1.7); axis estimate rel dev = %.3f (gate 0.10)",
                worst_frob, slope, worst_axis)};
}

}  // namespace

std::vector<CriterionResult> verify_suite(const std::string& suite, std::ostream& log,
                                          const std::string& out_dir) {
    VerifyContext ctx{out_dir, std::nullopt};
    std::vector<CriterionResult> results;
    auto want = [&](const char* s) { return suite == s || suite == "all"; };

    if (want("kernel")) {
        results.push_back(c1_axis_vanishing());
        results.push_back(c2_swap_symmetry());
        results.push_back(c3_fa_closed_form());
        results.push_back(c4_scaling_law());
    }
    if (want("lorentz")) results.push_back(c11_lorentz());
    if (want("routes")) {
        results.push_back(c5_route_agreement(log));
        results.push_back(c6_divergence_slope());
    }
    if (want("conservation")) {
        results.push_back(c7_conservation(ctx, log));
        results.push_back(c8_antisymmetry(ctx, log));
    }
    if (want("estimates")) {
        results.push_back(c9_scale_invariant_ratio(ctx));
        results.push_back(c10_growth_bound(ctx, log));
        results.push_back(c12_tensor(log));
    }
    if (results.empty())
        throw std::invalid_argument(
            "unknown suite '" + suite +
            "' (expected kernel|lorentz|routes|conservation|estimates|all)");

    for (const auto& r : results)
        log << (r.pass ? "PASS " : "FAIL ") << r.id << ' ' << r.name << ": " << r.detail
            << '\n';
    return results;
}

int verify_main(const std::string& suite, std::ostream& log, const std::string& out_dir) {
    const auto results = verify_suite(suite, log, out_dir);
    int failed = 0;
    for (const auto& r : results) failed += r.pass ? 0 : 1;
    log << (failed == 0 ? "ALL PASS" : "FAILURES: " + std::to_string(failed)) << " ("
        << results.size() << " criteria)\n";
    return failed == 0 ? 0 : 1;
}

}  // namespace birot
