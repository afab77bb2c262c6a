#include "birot/velocity.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "birot/parallel.hpp"

namespace birot {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::vector<VelocitySample> induced_velocity(std::span<const SourcePoint> sources,
                                             std::span<const QuadrantPoint> targets,
                                             const QuadratureSpec& quad,
                                             double excise_radius) {
    const PairEvaluator pair(quad);
    const double ex2 = excise_radius * excise_radius;
    std::vector<VelocitySample> out(targets.size());

    parallel_for(0, targets.size(), [&](std::size_t t) {
        const QuadrantPoint x = targets[t];
        // Block-pairwise accumulation: fixed order, independent of threading.
        constexpr std::size_t kBlock = 256;
        double block_r[kBlock], block_s[kBlock];
        std::vector<double> sums_r, sums_s;
        std::size_t fill = 0;
        auto flush = [&] {
            if (fill == 0) return;
            sums_r.push_back(pairwise_sum({block_r, fill}));
            sums_s.push_back(pairwise_sum({block_s, fill}));
            fill = 0;
        };
        for (const SourcePoint& src : sources) {
            if (detail::sym_dist2(x.r - src.r, x.s - src.s) <= ex2 ||
                src.strength == 0.0)
                continue;
            const PairKernels k = pair({{x.r, x.s}, {src.r, src.s}});
            // u^r = + sum F^r w, u^s = - sum F^s w; these signs make the
            // kernel route agree with the 4D Green's-function oracle and the
            // stream-function route (see the velocity tests).
            block_r[fill] = k.Fr * src.strength;
            block_s[fill] = -k.Fs * src.strength;
            if (++fill == kBlock) flush();
        }
        flush();
        VelocitySample v;
        v.at = x;
        v.u_r = pairwise_sum(sums_r);
        v.u_s = pairwise_sum(sums_s);
        if (x.r == 0.0) v.u_r = 0.0;  // proved exactly; skip the cancelled quadrature
        if (x.s == 0.0) v.u_s = 0.0;
        out[t] = v;
    });
    return out;
}

std::vector<VelocitySample> biot_savart(const ScalarField& w,
                                        std::span<const QuadrantPoint> targets,
                                        const QuadratureSpec& quad) {
    const GridSpec& g = w.grid();
    if (g.stagger != Stagger::cell_centered)
        throw std::invalid_argument("biot_savart: w must be cell-centered");
    const double hr = g.dr(), hs = g.ds();
    std::vector<SourcePoint> sources;
    sources.reserve(w.values().size());
    for (int j = 0; j < g.n_s; ++j)
        for (int i = 0; i < g.n_r; ++i)
            if (w.at(i, j) != 0.0)
                sources.push_back({g.r(i), g.s(j), w.at(i, j) * hr * hs});
    return induced_velocity(sources, targets, quad, 0.5 * std::min(hr, hs));
}

Velocity4 brute_force_velocity_4d(const ScalarField& w, const std::array<double, 4>& x,
                                  int n_angle) {
    const GridSpec& g = w.grid();
    if (g.stagger != Stagger::cell_centered)
        throw std::invalid_argument("brute_force_velocity_4d: w must be cell-centered");
    if (n_angle < 4 || n_angle > 48)
        throw std::invalid_argument("brute_force_velocity_4d: n_angle in [4, 48]");

    const double rx = std::hypot(x[0], x[1]);
    const double sx = std::hypot(x[2], x[3]);
    const double hr = g.dr(), hs = g.ds();

    double wmax = 0.0;
    for (double v : w.values()) wmax = std::max(wmax, std::abs(v));
    const double support_cut = 1e-3 * wmax;
    const double diag = std::hypot(hr, hs);
    if (wmax > 0.0)
        for (int j = 0; j < g.n_s; ++j)
            for (int i = 0; i < g.n_r; ++i)
                if (std::abs(w.at(i, j)) >= support_cut &&
                    std::hypot(rx - g.r(i), sx - g.s(j)) < 2.0 * diag)
                    throw std::invalid_argument(
                        "brute_force_velocity_4d: target too close to the vorticity "
                        "support; probe off-support");

    std::vector<double> ct(n_angle), st(n_angle);
    for (int k = 0; k < n_angle; ++k) {
        const double a = 2.0 * kPi * (k + 0.5) / n_angle;
        ct[k] = std::cos(a);
        st[k] = std::sin(a);
    }
    const double dang = 2.0 * kPi / n_angle;

    // Deterministic row-partial reduction.
    std::vector<std::array<double, 4>> row(g.n_s, {0.0, 0.0, 0.0, 0.0});
    parallel_for(0, static_cast<std::size_t>(g.n_s), [&](std::size_t j) {
        const double sb = g.s(j);
        std::array<double, 4> acc{};
        for (int i = 0; i < g.n_r; ++i) {
            const double wv = w.at(i, static_cast<int>(j));
            if (wv == 0.0) continue;
            const double rb = g.r(i);
            const double vol = rb * sb * hr * hs * dang * dang;
            for (int kt = 0; kt < n_angle; ++kt) {
                const double y1 = x[0] - rb * ct[kt];
                const double y2 = x[1] - rb * st[kt];
                const double q12 = y1 * y1 + y2 * y2;
                const double wct = wv * ct[kt], wst = wv * st[kt];
                for (int kp = 0; kp < n_angle; ++kp) {
                    const double y3 = x[2] - sb * ct[kp];
                    const double y4 = x[3] - sb * st[kp];
                    const double q = q12 + y3 * y3 + y4 * y4;
                    const double kf = vol / (2.0 * kPi * kPi * q * q);
                    // No-swirl tensor: w^{1,3} = -cos(t)cos(p) w, etc.
                    const double c13 = -wct * ct[kp], c14 = -wct * st[kp];
                    const double c23 = -wst * ct[kp], c24 = -wst * st[kp];
                    acc[0] += kf * (y3 * c13 + y4 * c14);
                    acc[1] += kf * (y3 * c23 + y4 * c24);
                    acc[2] -= kf * (y1 * c13 + y2 * c23);
                    acc[3] -= kf * (y1 * c14 + y2 * c24);
                }
            }
        }
        row[j] = acc;
    });

    Velocity4 res;
    for (int c = 0; c < 4; ++c)
        res.u[c] = pairwise_sum_n(row.size(), [&](std::size_t j) { return row[j][c]; });

    const double cth = rx > 0.0 ? x[0] / rx : 1.0;
    const double sth = rx > 0.0 ? x[1] / rx : 0.0;
    const double cph = sx > 0.0 ? x[2] / sx : 1.0;
    const double sph = sx > 0.0 ? x[3] / sx : 0.0;
    res.u_r = cth * res.u[0] + sth * res.u[1];
    res.u_theta = -sth * res.u[0] + cth * res.u[1];
    res.u_s = cph * res.u[2] + sph * res.u[3];
    res.u_phi = -sph * res.u[2] + cph * res.u[3];
    return res;
}

StreamField solve_stream(const ScalarField& w) {
    const GridSpec& g = w.grid();
    if (g.stagger != Stagger::node_centered)
        throw std::invalid_argument("solve_stream: w must be node-centered");
    const int nr = g.n_r, ns = g.n_s;
    if (nr < 3 || ns < 3) throw std::invalid_argument("solve_stream: grid too small");
    const double hr = g.dr(), hs = g.ds();
    const int ni = nr - 1, nj = ns - 1;  // interior nodes per direction
    const auto unk = [&](int i, int j) { return (j - 1) * ni + (i - 1); };

    // Row (i,j) of the operator, scaled by r_i s_j which makes it symmetric.
    using Trip = Eigen::Triplet<double>;
    std::vector<Trip> trips;
    trips.reserve(static_cast<std::size_t>(5) * ni * nj);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(ni) * nj);
    for (int j = 1; j <= ns - 1; ++j) {
        const double s = g.s(j);
        for (int i = 1; i <= nr - 1; ++i) {
            const double r = g.r(i);
            const double m = r * s;
            const int k = unk(i, j);
            const double c0 =
                -2.0 / (hr * hr) - 2.0 / (hs * hs) - 1.0 / (r * r) - 1.0 / (s * s);
            trips.emplace_back(k, k, -m * c0);
            const double cip = 1.0 / (hr * hr) + 0.5 / (hr * r);
            const double cim = 1.0 / (hr * hr) - 0.5 / (hr * r);
            const double cjp = 1.0 / (hs * hs) + 0.5 / (hs * s);
            const double cjm = 1.0 / (hs * hs) - 0.5 / (hs * s);
            if (i + 1 <= nr - 1) trips.emplace_back(k, unk(i + 1, j), -m * cip);
            if (i - 1 >= 1) trips.emplace_back(k, unk(i - 1, j), -m * cim);
            if (j + 1 <= ns - 1) trips.emplace_back(k, unk(i, j + 1), -m * cjp);
            if (j - 1 >= 1) trips.emplace_back(k, unk(i, j - 1), -m * cjm);
            rhs[k] = -m * w.at(i, j);
        }
    }
    Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(ni) * nj,
                                  static_cast<Eigen::Index>(ni) * nj);
    A.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(A);
    if (solver.info() != Eigen::Success)
        throw StreamSolveError("solve_stream: factorization failed", -1.0);
    Eigen::VectorXd sol = solver.solve(rhs);

    StreamField psi{g, std::vector<double>(static_cast<std::size_t>(nr + 1) * (ns + 1), 0.0)};
    for (int j = 1; j <= ns - 1; ++j)
        for (int i = 1; i <= nr - 1; ++i) psi.at(i, j) = sol[unk(i, j)];

    // Residual of the unscaled operator, with one refinement pass if needed.
    double wmax = 0.0;
    for (double v : w.values()) wmax = std::max(wmax, std::abs(v));
    auto residual = [&](const StreamField& p, Eigen::VectorXd* store) {
        double worst = 0.0;
        for (int j = 1; j <= ns - 1; ++j) {
            const double s = g.s(j);
            for (int i = 1; i <= nr - 1; ++i) {
                const double r = g.r(i);
                const double lap =
                    (p.at(i + 1, j) - 2.0 * p.at(i, j) + p.at(i - 1, j)) / (hr * hr) +
                    (p.at(i + 1, j) - p.at(i - 1, j)) / (2.0 * hr * r) -
                    p.at(i, j) / (r * r) +
                    (p.at(i, j + 1) - 2.0 * p.at(i, j) + p.at(i, j - 1)) / (hs * hs) +
                    (p.at(i, j + 1) - p.at(i, j - 1)) / (2.0 * hs * s) -
                    p.at(i, j) / (s * s);
                const double res = lap - w.at(i, j);
                if (store) (*store)[unk(i, j)] = -r * s * res;
                worst = std::max(worst, std::abs(res));
            }
        }
        return worst;
    };
    double res = residual(psi, nullptr);
    if (res > 1e-10 * wmax) {
        Eigen::VectorXd rvec(static_cast<Eigen::Index>(ni) * nj);
        residual(psi, &rvec);
        Eigen::VectorXd corr = solver.solve(rvec);
        for (int j = 1; j <= ns - 1; ++j)
            for (int i = 1; i <= nr - 1; ++i) psi.at(i, j) += corr[unk(i, j)];
        res = residual(psi, nullptr);
        if (res > 1e-10 * wmax)
            throw StreamSolveError("solve_stream: residual above tolerance", res);
    }
    return psi;
}

namespace {

double extrapolate3(double f1, double f2, double f3) {
    return 3.0 * f1 - 3.0 * f2 + f3;
}

}  // namespace

std::pair<ScalarField, ScalarField> velocity_from_stream(const StreamField& psi) {
    const GridSpec& g = psi.grid;
    const int nr = g.n_r, ns = g.n_s;
    const double hr = g.dr(), hs = g.ds();
    ScalarField u_r(g), u_s(g);

    // psi/s and psi/r with quadratically extrapolated axis rows.
    ScalarField qs(g), qr(g);
    for (int j = 1; j <= ns; ++j)
        for (int i = 0; i <= nr; ++i) qs.at(i, j) = psi.at(i, j) / g.s(j);
    for (int i = 0; i <= nr; ++i)
        qs.at(i, 0) = extrapolate3(qs.at(i, 1), qs.at(i, 2), qs.at(i, 3));
    for (int j = 0; j <= ns; ++j)
        for (int i = 1; i <= nr; ++i) qr.at(i, j) = psi.at(i, j) / g.r(i);
    for (int j = 0; j <= ns; ++j)
        qr.at(0, j) = extrapolate3(qr.at(1, j), qr.at(2, j), qr.at(3, j));

    auto d_s = [&](int i, int j) {
        if (j == 0) return (-3.0 * psi.at(i, 0) + 4.0 * psi.at(i, 1) - psi.at(i, 2)) / (2.0 * hs);
        if (j == ns) return (3.0 * psi.at(i, ns) - 4.0 * psi.at(i, ns - 1) + psi.at(i, ns - 2)) / (2.0 * hs);
        return (psi.at(i, j + 1) - psi.at(i, j - 1)) / (2.0 * hs);
    };
    auto d_r = [&](int i, int j) {
        if (i == 0) return (-3.0 * psi.at(0, j) + 4.0 * psi.at(1, j) - psi.at(2, j)) / (2.0 * hr);
        if (i == nr) return (3.0 * psi.at(nr, j) - 4.0 * psi.at(nr - 1, j) + psi.at(nr - 2, j)) / (2.0 * hr);
        return (psi.at(i + 1, j) - psi.at(i - 1, j)) / (2.0 * hr);
    };

    for (int j = 0; j <= ns; ++j)
        for (int i = 0; i <= nr; ++i) {
            u_r.at(i, j) = -qs.at(i, j) - d_s(i, j);
            u_s.at(i, j) = qr.at(i, j) + d_r(i, j);
        }
    return {std::move(u_r), std::move(u_s)};
}

double divergence_residual(const ScalarField& u_r, const ScalarField& u_s) {
    const GridSpec& g = u_r.grid();
    if (!(g == u_s.grid()))
        throw std::invalid_argument("divergence_residual: fields on different grids");
    if (g.stagger != Stagger::node_centered)
        throw std::invalid_argument("divergence_residual: node-centered fields expected");
    const int nr = g.n_r, ns = g.n_s;
    const double hr = g.dr(), hs = g.ds();
    // Fourth-order stencil: the second-order centered divergence of the
    // stream-route velocities cancels identically (the difference operators
    // commute and the psi/s terms drop out), so it cannot see the field's
    // actual truncation error. An independent higher-order stencil can.
    auto d4 = [](double m2, double m1, double p1, double p2, double h) {
        return (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
    };
    double worst = 0.0, grad = 0.0;
    for (int j = 2; j <= ns - 2; ++j) {
        const double s = g.s(j);
        for (int i = 2; i <= nr - 2; ++i) {
            const double r = g.r(i);
            const double dur_dr = d4(u_r.at(i - 2, j), u_r.at(i - 1, j),
                                     u_r.at(i + 1, j), u_r.at(i + 2, j), hr);
            const double dur_ds = d4(u_r.at(i, j - 2), u_r.at(i, j - 1),
                                     u_r.at(i, j + 1), u_r.at(i, j + 2), hs);
            const double dus_dr = d4(u_s.at(i - 2, j), u_s.at(i - 1, j),
                                     u_s.at(i + 1, j), u_s.at(i + 2, j), hr);
            const double dus_ds = d4(u_s.at(i, j - 2), u_s.at(i, j - 1),
                                     u_s.at(i, j + 1), u_s.at(i, j + 2), hs);
            const double div = dur_dr + u_r.at(i, j) / r + dus_ds + u_s.at(i, j) / s;
            worst = std::max(worst, std::abs(div));
            grad = std::max({grad, std::abs(dur_dr), std::abs(dur_ds), std::abs(dus_dr),
                             std::abs(dus_ds)});
        }
    }
    return worst / std::max(grad, 1e-300);
}

}  // namespace birot
