#include "birot/fields.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "birot/parallel.hpp"

namespace birot {

double measure_weight(const QuadrantPoint& p, double h_r, double h_s) {
    constexpr double four_pi_sq = 4.0 * std::numbers::pi * std::numbers::pi;
    return four_pi_sq * p.r * p.s * h_r * h_s;
}

ScalarField w_from_zeta(const ScalarField& zeta) {
    const GridSpec& g = zeta.grid();
    ScalarField w(g);
    for (int j = 0; j < g.count_s(); ++j) {
        const double s = g.s(j);
        for (int i = 0; i < g.count_r(); ++i) {
            const double r = g.r(i);
            w.at(i, j) = (r == 0.0 || s == 0.0) ? 0.0 : r * s * zeta.at(i, j);
        }
    }
    return w;
}

namespace {

// Value at offset 0 of the quadratic through samples at offsets 1, 2, 3.
double extrapolate3(double f1, double f2, double f3) {
    return 3.0 * f1 - 3.0 * f2 + f3;
}

}  // namespace

ScalarField zeta_from_w(const ScalarField& w) {
    const GridSpec& g = w.grid();
    double wmax = 0.0;
    for (double x : w.values()) wmax = std::max(wmax, std::abs(x));

    ScalarField zeta(g);
    if (g.stagger == Stagger::node_centered) {
        const double tol = 1e-12 * wmax;
        for (int j = 0; j < g.count_s(); ++j)
            if (std::abs(w.at(0, j)) > tol)
                throw AxisDataError("zeta_from_w: w nonzero on the r = 0 axis");
        for (int i = 0; i < g.count_r(); ++i)
            if (std::abs(w.at(i, 0)) > tol)
                throw AxisDataError("zeta_from_w: w nonzero on the s = 0 axis");
        if (g.n_r < 3 || g.n_s < 3)
            throw std::invalid_argument("zeta_from_w: need at least 3 interior nodes");
    }

    for (int j = 0; j < g.count_s(); ++j) {
        const double s = g.s(j);
        for (int i = 0; i < g.count_r(); ++i) {
            const double r = g.r(i);
            if (r > 0.0 && s > 0.0) zeta.at(i, j) = w.at(i, j) / (r * s);
        }
    }
    if (g.stagger == Stagger::node_centered) {
        // Axis limits of w/(rs) exist for the admissible data class; fill the
        // r = 0 column, then the s = 0 row (the corner uses the filled column).
        for (int j = 1; j < g.count_s(); ++j)
            zeta.at(0, j) = extrapolate3(zeta.at(1, j), zeta.at(2, j), zeta.at(3, j));
        for (int i = 0; i < g.count_r(); ++i)
            zeta.at(i, 0) = extrapolate3(zeta.at(i, 1), zeta.at(i, 2), zeta.at(i, 3));
    }
    return zeta;
}

double lp_norm(const ScalarField& f, double p) {
    if (!(p >= 1.0))
        throw std::invalid_argument("lp_norm: p must be >= 1 or infinity");
    const GridSpec& g = f.grid();
    if (std::isinf(p)) {
        double m = 0.0;
        for (double x : f.values()) m = std::max(m, std::abs(x));
        return m;
    }
    const bool node = g.stagger == Stagger::node_centered;
    const double hr = g.dr(), hs = g.ds();
    const std::size_t n = f.values().size();
    const int nr = g.count_r();
    double acc = pairwise_sum_n(n, [&](std::size_t k) {
        const int i = static_cast<int>(k % nr);
        const int j = static_cast<int>(k / nr);
        double wgt = measure_weight({g.r(i), g.s(j)}, hr, hs);
        if (node) {
            if (i == 0 || i == g.n_r) wgt *= 0.5;
            if (j == 0 || j == g.n_s) wgt *= 0.5;
        }
        return std::pow(std::abs(f.at(i, j)), p) * wgt;
    });
    return std::pow(acc, 1.0 / p);
}

double outer_ring_mass_fraction(const ScalarField& f) {
    const GridSpec& g = f.grid();
    const double hr = g.dr(), hs = g.ds();
    double total = 0.0, outer = 0.0;
    for (int j = 0; j < g.count_s(); ++j) {
        for (int i = 0; i < g.count_r(); ++i) {
            const double m = std::abs(f.at(i, j)) * measure_weight({g.r(i), g.s(j)}, hr, hs);
            total += m;
            if (i >= g.count_r() - 2 || j >= g.count_s() - 2) outer += m;
        }
    }
    return total > 0.0 ? outer / total : 0.0;
}

namespace {

// Cubic-convolution kernel weights (a = -1/2) for a local coordinate
// t in [0, 1) relative to the second of four consecutive samples.
void cubic_weights(double t, double w[4]) {
    const double t2 = t * t, t3 = t2 * t;
    w[0] = 0.5 * (-t3 + 2.0 * t2 - t);
    w[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
    w[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
    w[3] = 0.5 * (t3 - t2);
}

}  // namespace

double sample_bicubic(const ScalarField& f, double r, double s) {
    const GridSpec& g = f.grid();
    const double off = g.stagger == Stagger::cell_centered ? 0.5 : 0.0;
    const double x = r / g.dr() - off;
    const double y = s / g.ds() - off;
    const int nr = g.count_r(), ns = g.count_s();

    const int i0 = static_cast<int>(std::floor(x));
    const int j0 = static_cast<int>(std::floor(y));
    double wx[4], wy[4];
    cubic_weights(x - i0, wx);
    cubic_weights(y - j0, wy);

    double acc = 0.0;
    for (int b = 0; b < 4; ++b) {
        const int j = std::clamp(j0 - 1 + b, 0, ns - 1);
        double row = 0.0;
        for (int a = 0; a < 4; ++a) {
            const int i = std::clamp(i0 - 1 + a, 0, nr - 1);
            row += wx[a] * f.at(i, j);
        }
        acc += wy[b] * row;
    }
    return acc;
}

void write_snapshot(const std::filesystem::path& file, const ScalarField& f) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open " + file.string());
    const GridSpec& g = f.grid();
    out << g.n_r << ' ' << g.n_s << ' ';
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", g.r_max);
    out << buf << ' ';
    std::snprintf(buf, sizeof buf, "%.17g", g.s_max);
    out << buf << ' '
        << (g.stagger == Stagger::cell_centered ? "cell_centered" : "node_centered")
        << '\n';
    const auto& v = f.values();
    for (std::size_t k = 0; k < v.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", v[k]);
        out << buf << ((k + 1) % 8 == 0 ? '\n' : ' ');
    }
    out << '\n';
}

ScalarField read_snapshot(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    GridSpec g;
    std::string stagger;
    if (!(in >> g.n_r >> g.n_s >> g.r_max >> g.s_max >> stagger))
        throw std::runtime_error("malformed snapshot header in " + file.string());
    if (stagger == "cell_centered")
        g.stagger = Stagger::cell_centered;
    else if (stagger == "node_centered")
        g.stagger = Stagger::node_centered;
    else
        throw std::runtime_error("unknown stagger '" + stagger + "'");
    ScalarField f(g);
    for (double& x : f.values())
        if (!(in >> x)) throw std::runtime_error("truncated snapshot " + file.string());
    return f;
}

}  // namespace birot
