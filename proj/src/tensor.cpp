#include "birot/tensor.hpp"

#include <cmath>

namespace birot {

double VorticityTensorSample::frobenius() const {
    double acc = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) acc += omega[i][j] * omega[i][j];
    return std::sqrt(acc);
}

VorticityTensorSample assemble_tensor(double w_val, double theta, double phi) {
    const double ct = std::cos(theta), st = std::sin(theta);
    const double cp = std::cos(phi), sp = std::sin(phi);
    VorticityTensorSample t;
    const double o13 = -ct * cp * w_val;
    const double o14 = -ct * sp * w_val;
    const double o23 = -st * cp * w_val;
    const double o24 = -st * sp * w_val;
    t.omega[0][2] = o13;
    t.omega[2][0] = -o13;
    t.omega[0][3] = o14;
    t.omega[3][0] = -o14;
    t.omega[1][2] = o23;
    t.omega[2][1] = -o23;
    t.omega[1][3] = o24;
    t.omega[3][1] = -o24;
    return t;
}

namespace {

VorticityTensorSample omega_at(const std::function<double(double, double)>& w,
                               const Point4& y) {
    const double r = std::hypot(y[0], y[1]);
    const double s = std::hypot(y[2], y[3]);
    const double theta = std::atan2(y[1], y[0]);
    const double phi = std::atan2(y[3], y[2]);
    return assemble_tensor(w(r, s), theta, phi);
}

double residual_fd(const std::function<double(double, double)>& w,
                   std::span<const Point4> pts, double h) {
    static constexpr int triples[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
    double worst = 0.0;
    for (const Point4& x : pts) {
        VorticityTensorSample plus[4], minus[4];
        for (int m = 0; m < 4; ++m) {
            Point4 xp = x, xm = x;
            xp[m] += h;
            xm[m] -= h;
            plus[m] = omega_at(w, xp);
            minus[m] = omega_at(w, xm);
        }
        auto d = [&](int m, int i, int j) {
            return (plus[m].omega[i][j] - minus[m].omega[i][j]) / (2.0 * h);
        };
        for (const auto& t : triples) {
            const int i = t[0], j = t[1], k = t[2];
            const double cyc = d(k, i, j) + d(i, j, k) + d(j, k, i);
            worst = std::max(worst, std::abs(cyc));
        }
    }
    return worst;
}

}  // namespace

double consistency_residual(const ScalarField& w, std::span<const Point4> pts) {
    const double h = std::min(w.grid().dr(), w.grid().ds());
    auto sampler = [&w](double r, double s) { return sample_bicubic(w, r, s); };
    return residual_fd(sampler, pts, h);
}

double consistency_residual(const std::function<double(double, double)>& w,
                            std::span<const Point4> pts, double h) {
    return residual_fd(w, pts, h);
}

double consistency_residual_exact(const std::function<double(double, double)>& w,
                                  const std::function<double(double, double)>& dw_dr,
                                  const std::function<double(double, double)>& dw_ds,
                                  std::span<const Point4> pts) {
    static constexpr int triples[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
    double worst = 0.0;
    for (const Point4& x : pts) {
        const double r = std::hypot(x[0], x[1]);
        const double s = std::hypot(x[2], x[3]);
        const double theta = std::atan2(x[1], x[0]);
        const double phi = std::atan2(x[3], x[2]);
        const double ct = std::cos(theta), st = std::sin(theta);
        const double cp = std::cos(phi), sp = std::sin(phi);
        const double wv = w(r, s), wr = dw_dr(r, s), ws = dw_ds(r, s);

        // Angular coefficients c^{i,j} with omega^{i,j} = c^{i,j} w and their
        // theta/phi derivatives; rows follow the (1,3),(1,4),(2,3),(2,4) order.
        double c[4][4] = {}, cth[4][4] = {}, cph[4][4] = {};
        auto set = [&](int i, int j, double v, double vt, double vp) {
            c[i][j] = v;
            c[j][i] = -v;
            cth[i][j] = vt;
            cth[j][i] = -vt;
            cph[i][j] = vp;
            cph[j][i] = -vp;
        };
        set(0, 2, -ct * cp, st * cp, ct * sp);
        set(0, 3, -ct * sp, st * sp, -ct * cp);
        set(1, 2, -st * cp, -ct * cp, st * sp);
        set(1, 3, -st * sp, -ct * sp, -st * cp);

        auto grad = [&](int m, int i, int j) {
            switch (m) {
                case 0: return ct * c[i][j] * wr - (st / r) * cth[i][j] * wv;
                case 1: return st * c[i][j] * wr + (ct / r) * cth[i][j] * wv;
                case 2: return cp * c[i][j] * ws - (sp / s) * cph[i][j] * wv;
                default: return sp * c[i][j] * ws + (cp / s) * cph[i][j] * wv;
            }
        };
        for (const auto& t : triples) {
            const int i = t[0], j = t[1], k = t[2];
            const double cyc = grad(k, i, j) + grad(i, j, k) + grad(j, k, i);
            worst = std::max(worst, std::abs(cyc));
        }
    }
    return worst;
}

AxisRegularityEstimate axis_regularity_estimate(const ScalarField& w) {
    const GridSpec& g = w.grid();
    AxisRegularityEstimate est;
    est.reliable = g.count_r() >= 8 && g.count_s() >= 8;

    // omega^{1,3}(x1, x2, x3, x4) = -(x1/r)(x3/s) w(r, s); the three other
    // corners of the cross difference vanish exactly on the axes, so the
    // quotient collapses to |w| / (r' s') at the probe.
    const double h = g.stagger == Stagger::cell_centered ? 0.5 * g.dr() : g.dr();
    const double k = g.stagger == Stagger::cell_centered ? 0.5 * g.ds() : g.ds();
    double best = 0.0;
    for (int j = 0; j < g.count_s(); ++j) {
        const double x4 = g.s(j);
        const double sp = std::hypot(k, x4);
        for (int i = 0; i < g.count_r(); ++i) {
            const double x2 = g.r(i);
            const double rp = std::hypot(h, x2);
            const double val = std::abs(sample_bicubic(w, rp, sp)) / (rp * sp);
            best = std::max(best, val);
        }
    }
    est.value = best;
    return est;
}

}  // namespace birot
