#include "birot/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

namespace birot {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxTableLevel = 32;

struct Rule1D {
    std::vector<double> x;  // nodes on [-1, 1]
    std::vector<double> w;
};

Rule1D gauss_legendre_rule(int n) {
    Rule1D rule;
    rule.x.resize(n);
    rule.w.resize(n);
    for (int k = 0; k < (n + 1) / 2; ++k) {
        // Newton iteration from the Chebyshev-like initial guess.
        long double t = std::cos(kPi * (k + 0.75L) / (n + 0.5L));
        long double p0, p1, dp;
        for (int it = 0; it < 100; ++it) {
            p0 = 1.0L;
            p1 = t;
            for (int j = 2; j <= n; ++j) {
                const long double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0L);
            const long double dt = p1 / dp;
            t -= dt;
            if (std::abs(static_cast<double>(dt)) < 1e-17) break;
        }
        const double node = static_cast<double>(t);
        const double wgt = static_cast<double>(2.0L / ((1.0L - t * t) * dp * dp));
        rule.x[k] = -node;
        rule.w[k] = wgt;
        rule.x[n - 1 - k] = node;
        rule.w[n - 1 - k] = wgt;
    }
    return rule;
}

Rule1D clenshaw_curtis_rule(int n) {
    // Closed rule with n nodes, n >= 2.
    Rule1D rule;
    rule.x.resize(n);
    rule.w.resize(n);
    const int m = n - 1;
    for (int k = 0; k <= m; ++k) {
        rule.x[k] = -std::cos(kPi * k / m);
        double wk = 1.0;
        for (int j = 1; j <= m / 2; ++j) {
            const double b = (2 * j == m) ? 1.0 : 2.0;
            wk -= b * std::cos(2.0 * j * kPi * k / m) / (4.0 * j * j - 1.0);
        }
        wk *= 2.0 / m;
        if (k == 0 || k == m) wk *= 0.5;
        rule.w[k] = wk;
    }
    return rule;
}

struct PanelNodes {
    std::vector<double> m;     // 1 - cos(x), computed accurately near 0
    std::vector<double> cosx;  // cos(x)
    std::vector<double> w;     // quadrature weight including panel length
};

PanelNodes map_panel(const Rule1D& rule, double a, double b) {
    PanelNodes p;
    const std::size_t n = rule.x.size();
    p.m.resize(n);
    p.cosx.resize(n);
    p.w.resize(n);
    const long double mid = 0.5L * (static_cast<long double>(a) + b);
    const long double half = 0.5L * (static_cast<long double>(b) - a);
    for (std::size_t k = 0; k < n; ++k) {
        const long double x = mid + half * static_cast<long double>(rule.x[k]);
        const long double sh = std::sin(0.5L * x);
        p.m[k] = static_cast<double>(2.0L * sh * sh);
        p.cosx[k] = static_cast<double>(std::cos(x));
        p.w[k] = static_cast<double>(half * rule.w[k]);
    }
    return p;
}

/// Dyadic panelization of [0, pi]: cores[L] covers [0, pi/2^L] and
/// shells[l] covers [pi/2^(l+1), pi/2^l], so level L integrates over
/// cores[L] plus shells[L-1] .. shells[0]. flat[L] holds that union as one
/// contiguous node list for the hot pair loop.
struct PanelTable {
    std::vector<PanelNodes> cores;   // L = 0 .. kMaxTableLevel
    std::vector<PanelNodes> shells;  // l = 0 .. kMaxTableLevel - 1
    std::vector<PanelNodes> flat;    // L = 0 .. kMaxTableLevel
};

const PanelTable& panel_table(QuadRule rule, int n) {
    static std::mutex mx;
    static std::map<std::pair<int, int>, PanelTable> cache;
    std::lock_guard<std::mutex> lock(mx);
    auto key = std::make_pair(static_cast<int>(rule), n);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    const Rule1D r =
        rule == QuadRule::gauss_legendre ? gauss_legendre_rule(n) : clenshaw_curtis_rule(n);
    PanelTable tab;
    tab.cores.reserve(kMaxTableLevel + 1);
    tab.shells.reserve(kMaxTableLevel);
    for (int L = 0; L <= kMaxTableLevel; ++L)
        tab.cores.push_back(map_panel(r, 0.0, kPi / std::exp2(L)));
    for (int l = 0; l < kMaxTableLevel; ++l)
        tab.shells.push_back(map_panel(r, kPi / std::exp2(l + 1), kPi / std::exp2(l)));
    tab.flat.resize(kMaxTableLevel + 1);
    for (int L = 0; L <= kMaxTableLevel; ++L) {
        PanelNodes& f = tab.flat[L];
        auto append = [&f](const PanelNodes& p) {
            f.m.insert(f.m.end(), p.m.begin(), p.m.end());
            f.cosx.insert(f.cosx.end(), p.cosx.begin(), p.cosx.end());
            f.w.insert(f.w.end(), p.w.begin(), p.w.end());
        };
        append(tab.cores[L]);
        for (int l = L - 1; l >= 0; --l) append(tab.shells[l]);
    }
    return cache.emplace(key, std::move(tab)).first->second;
}

/// Dyadic depth needed to resolve the peak of 1/(d2 + c m(x))^k at x = 0:
/// the core panel should be about the peak half-width sqrt(2 d2 / c).
int peak_level(double d2, double c, const QuadratureSpec& quad, bool gate) {
    if (!quad.near_singular_split || !gate || c <= 0.0 || d2 <= 0.0) return 0;
    const double width = std::sqrt(2.0 * d2 / c);
    if (width >= kPi) return 0;
    const int L = static_cast<int>(std::ceil(std::log2(kPi / width)));
    return std::clamp(L, 0, quad.max_refine_levels);
}

int peak_level_unclamped(double d2, double c) {
    if (c <= 0.0 || d2 <= 0.0) return 0;
    const double width = std::sqrt(2.0 * d2 / c);
    if (width >= kPi) return 0;
    return static_cast<int>(std::ceil(std::log2(kPi / width)));
}

template <class F>
void for_panels(const PanelTable& tab, int level, F&& body) {
    body(tab.cores[level]);
    for (int l = level - 1; l >= 0; --l) body(tab.shells[l]);
}

double tensor_integrate(const KernelArgs& a, const QuadratureSpec& quad, int level) {
    const double r = a.target.r, s = a.target.s;
    const double rb = a.source.r, sb = a.source.s;
    const double d2 = detail::sym_dist2(r - rb, s - sb);
    const double cr = 2.0 * r * rb;
    const double cs = 2.0 * s * sb;

    const PanelTable& tt = panel_table(quad.rule, quad.n_theta);
    const PanelTable& tp = panel_table(quad.rule, quad.n_phi);

    double acc = 0.0;
    for_panels(tt, level, [&](const PanelNodes& pt) {
        for (std::size_t i = 0; i < pt.m.size(); ++i) {
            const double a_theta = d2 + cr * pt.m[i];
            const double ct = pt.cosx[i] * pt.w[i];
            double inner = 0.0;
            for_panels(tp, level, [&](const PanelNodes& pp) {
                for (std::size_t j = 0; j < pp.m.size(); ++j) {
                    const double x = a_theta + cs * pp.m[j];
                    inner += pp.w[j] * (sb - s * pp.cosx[j]) / (x * x);
                }
            });
            acc += ct * inner;
        }
    });
    return (2.0 / (kPi * kPi)) * rb * sb * acc;
}

}  // namespace

double x_minus_minus(const KernelArgs& args, double theta_bar, double phi_bar) {
    const double r = args.target.r, s = args.target.s;
    const double rb = args.source.r, sb = args.source.s;
    const double x = (r - rb) * (r - rb) + (s - sb) * (s - sb) +
                     2.0 * r * rb * (1.0 - std::cos(theta_bar)) +
                     2.0 * s * sb * (1.0 - std::cos(phi_bar));
    if (x == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return x;
}

double f_a(double tau, double a, const QuadratureSpec& quad) {
    if (!(tau > 0.0)) throw std::invalid_argument("f_a: tau must be positive");
    if (!(a > 0.5)) throw std::invalid_argument("f_a: a must be > 1/2");
    quad.validate();
    const PanelTable& tab = panel_table(quad.rule, quad.n_theta);
    const int level = peak_level(tau, 2.0, quad, true);
    double acc = 0.0;
    for_panels(tab, level, [&](const PanelNodes& p) {
        for (std::size_t k = 0; k < p.m.size(); ++k)
            acc += p.w[k] * std::pow(2.0 * p.m[k] + tau, -a);
    });
    return acc;
}

double f_a_bound_check(double a, std::span<const double> tau_grid,
                       const QuadratureSpec& quad) {
    double worst = 0.0;
    for (double tau : tau_grid) {
        const double envelope = std::min(std::pow(tau, 0.5 - a), std::pow(tau, -a));
        worst = std::max(worst, f_a(tau, a, quad) / envelope);
    }
    return worst;
}

double eval_Fr(const KernelArgs& args, const QuadratureSpec& quad) {
    quad.validate();
    const double r = args.target.r, s = args.target.s;
    const double rb = args.source.r, sb = args.source.s;
    if (rb == 0.0 || sb == 0.0) return 0.0;  // zero prefactor
    if (r == 0.0) return 0.0;  // exact: odd cosine against theta-independent X

    const double d2 = detail::sym_dist2(r - rb, s - sb);
    if (d2 == 0.0)
        throw std::invalid_argument("eval_Fr: coincident target and source");

    const bool gate = d2 < quad.split_threshold * (r * rb + s * sb);
    const int want = std::max(peak_level_unclamped(d2, 2.0 * r * rb),
                              peak_level_unclamped(d2, 2.0 * s * sb));
    const int level = std::max(peak_level(d2, 2.0 * r * rb, quad, gate),
                               peak_level(d2, 2.0 * s * sb, quad, gate));
    if (quad.near_singular_split && gate && want > quad.max_refine_levels) {
        const double last = tensor_integrate(args, quad, level);
        const double prev = tensor_integrate(args, quad, level - 1);
        const double scale = std::max({std::abs(last), std::abs(prev), 1e-300});
        if (std::abs(last - prev) > 1e-6 * scale) throw KernelNonConvergence(last, prev);
        return last;
    }
    return tensor_integrate(args, quad, level);
}

double eval_Fs(const KernelArgs& args, const QuadratureSpec& quad) {
    return eval_Fr({{args.target.s, args.target.r}, {args.source.s, args.source.r}}, quad);
}

namespace {

/// Exact reduction over the angle paired with c1 = 2 t1 tb1. With
/// A(x) = d2 + c1 m(x) and D = [A (A + 2 c2)]^(-3/2):
///   F1 = (2/pi)  tb1 tb2^2    int cos(x) (A + 2 t2 (tb2 - t2)) D dx
///   F2 = (4/pi)  t2 tb2^2 tb1 int (tb1 - t1 cos(x)) D dx
/// Applied to (t1,tb1,t2,tb2) = (r,rbar,s,sbar) this yields one reduction of
/// F^r as F1 and one of F^s as F2; the swapped call yields the other two.
struct ReducedPair {
    double F1;
    double F2;
};

// Kept out of line so both argument orders run the exact same instructions;
// inlining would let the two call sites contract FMAs differently and break
// the bitwise swap symmetry of eval_pair.
[[gnu::noinline]] ReducedPair reduced_pairing(double d2, double t1, double tb1,
                                              double t2, double tb2,
                                              const QuadratureSpec& quad,
                                              const PanelTable& tab) {
    const double c1 = 2.0 * t1 * tb1;
    const double c2 = 2.0 * t2 * tb2;
    const double e1 = 2.0 * t2 * (tb2 - t2);
    const bool gate = d2 < quad.split_threshold * 0.5 * (c1 + c2);
    const int level = peak_level(d2, c1, quad, gate);

    const PanelNodes& p = tab.flat[level];
    const std::size_t n = p.m.size();
    const double* __restrict__ mv = p.m.data();
    const double* __restrict__ cv = p.cosx.data();
    const double* __restrict__ wv = p.w.data();
    // Elementwise pass into scratch (vectorizes the sqrt/div), then a fixed
    // left-to-right sum so results do not depend on threading.
    thread_local std::vector<double> buf1, buf2;
    if (buf1.size() < n) {
        buf1.resize(n);
        buf2.resize(n);
    }
    double* __restrict__ b1 = buf1.data();
    double* __restrict__ b2 = buf2.data();
    for (std::size_t k = 0; k < n; ++k) {
        const double A = d2 + c1 * mv[k];
        const double P = A * (A + 2.0 * c2);
        const double D = wv[k] / (P * std::sqrt(P));
        b1[k] = D * cv[k] * (A + e1);
        b2[k] = D * (tb1 - t1 * cv[k]);
    }
    double acc1 = 0.0, acc2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        acc1 += b1[k];
        acc2 += b2[k];
    }
    return {(2.0 / kPi) * tb1 * tb2 * tb2 * acc1,
            (4.0 / kPi) * t2 * tb2 * tb2 * tb1 * acc2};
}

PairKernels eval_pair_tab(const KernelArgs& args, const QuadratureSpec& quad,
                          const PanelTable& tab) {
    const double r = args.target.r, s = args.target.s;
    const double rb = args.source.r, sb = args.source.s;
    const double d2 = detail::sym_dist2(r - rb, s - sb);
    if (d2 == 0.0)
        throw std::invalid_argument("eval_pair: coincident target and source");
    // Each reduction is exact in the angle it integrates away, so one pairing
    // per pair suffices; keep the angle with the smaller coefficient, whose
    // peak is wider and needs fewer panels. The rule is swap-equivariant,
    // which makes eval_pair bitwise symmetric under the diagonal swap; exact
    // ties take the average of both pairings to stay symmetric.
    const double c_rr = 2.0 * r * rb;
    const double c_ss = 2.0 * s * sb;
    if (c_rr < c_ss) {
        const ReducedPair a = reduced_pairing(d2, r, rb, s, sb, quad, tab);
        return {a.F1, a.F2};
    }
    if (c_ss < c_rr) {
        const ReducedPair b = reduced_pairing(d2, s, sb, r, rb, quad, tab);
        return {b.F2, b.F1};
    }
    const ReducedPair a = reduced_pairing(d2, r, rb, s, sb, quad, tab);
    const ReducedPair b = reduced_pairing(d2, s, sb, r, rb, quad, tab);
    return {0.5 * (a.F1 + b.F2), 0.5 * (b.F1 + a.F2)};
}

}  // namespace

PairKernels eval_pair(const KernelArgs& args, const QuadratureSpec& quad) {
    quad.validate();
    return eval_pair_tab(args, quad, panel_table(quad.rule, quad.n_theta));
}

PairEvaluator::PairEvaluator(const QuadratureSpec& quad) : quad_(quad) {
    quad_.validate();
    table_ = &panel_table(quad_.rule, quad_.n_theta);
}

PairKernels PairEvaluator::operator()(const KernelArgs& args) const {
    return eval_pair_tab(args, quad_, *static_cast<const PanelTable*>(table_));
}

}  // namespace birot
