#pragma once

#include <span>
#include <stdexcept>

#include "birot/fields.hpp"

namespace birot {

enum class QuadRule { gauss_legendre, clenshaw_curtis };

/// Angular quadrature policy for the reduced Biot-Savart kernels. The double
/// integral runs over (theta_bar, phi_bar) in [0, pi]^2; when the bi-polar
/// distance between target and source is small against r*rbar + s*sbar the
/// integrand peaks at the angular origin, and the corner is subdivided
/// dyadically down to the peak width.
struct QuadratureSpec {
    QuadRule rule = QuadRule::gauss_legendre;
    int n_theta = 64;
    int n_phi = 64;
    bool near_singular_split = true;
    double split_threshold = 1.0;
    int max_refine_levels = 20;

    void validate() const {
        if (n_theta < 2 || n_phi < 2)
            throw std::invalid_argument("QuadratureSpec: n_theta, n_phi must be >= 2");
        if (max_refine_levels < 1 || max_refine_levels > 20)
            throw std::invalid_argument("QuadratureSpec: max_refine_levels must be in [1, 20]");
        if (!(split_threshold > 0.0))
            throw std::invalid_argument("QuadratureSpec: split_threshold must be positive");
    }
};

struct KernelArgs {
    QuadrantPoint target;  // (r, s)
    QuadrantPoint source;  // (rbar, sbar)
};

namespace detail {
/// dx^2 + dy^2 with the operands ordered by magnitude first, so the result is
/// bitwise invariant under (dx, dy) -> (dy, dx) even when the compiler
/// contracts the expression into an FMA.
inline double sym_dist2(double dx, double dy) {
    double ax = dx < 0 ? -dx : dx;
    double ay = dy < 0 ? -dy : dy;
    if (ax < ay) {
        const double t = ax;
        ax = ay;
        ay = t;
    }
    return ax * ax + ay * ay;
}
}  // namespace detail

struct KernelNonConvergence : std::runtime_error {
    KernelNonConvergence(double last_, double prev_)
        : std::runtime_error("kernel quadrature did not converge within max_refine_levels"),
          last(last_), prev(prev_) {}
    double last;
    double prev;
};

/// X_-- = (r-rbar)^2 + (s-sbar)^2 + 2 r rbar (1-cos theta) + 2 s sbar (1-cos phi).
/// All four summands are nonnegative. Returns NaN when the value underflows to
/// exactly zero (coincident points at theta = phi = 0), where the kernel
/// integrand is undefined.
double x_minus_minus(const KernelArgs& args, double theta_bar, double phi_bar);

/// f_a(tau) = int_0^pi [2(1-cos theta) + tau]^-a dtheta, tau > 0, a > 1/2.
/// For a = 1 the closed form pi / sqrt(tau (tau + 4)) is exact.
double f_a(double tau, double a, const QuadratureSpec& quad = {});

/// Max over the tau grid of f_a(tau) / min(tau^(1/2-a), tau^-a), the constant
/// realized by the envelope bound. Finite and stable under quadrature
/// refinement when f_a is resolved.
double f_a_bound_check(double a, std::span<const double> tau_grid,
                       const QuadratureSpec& quad = {});

/// Reduced Biot-Savart kernel
///   F^r = (2/pi^2) int_0^pi int_0^pi rbar sbar cos(tb) (sbar - s cos(pb))
///                                     / X_--^2  dpb dtb.
/// The velocity uses u^r = + integral of F^r w over the quadrant with the
/// flat measure dr ds (see velocity.hpp for how the sign is pinned).
/// F^r(0, s, .) = 0 exactly: the theta integrand is an odd cosine against a
/// theta-independent denominator.
double eval_Fr(const KernelArgs& args, const QuadratureSpec& quad);

/// F^s(r, s, rbar, sbar) = F^r(s, r, sbar, rbar); u^s = + integral of F^s w.
double eval_Fs(const KernelArgs& args, const QuadratureSpec& quad);

/// Both kernels for one (target, source) pair by exact single-angle
/// reduction: the inner integral of (c0 + c1 cos x) / (C - B cos x)^2 over
/// [0, pi] is elementary, which collapses the double integral to a single
/// angle with no error from the integrated direction. The surviving
/// angle is chosen by a swap-equivariant rule, so eval_pair is exactly
/// symmetric under the diagonal swap (r,s,rbar,sbar) -> (s,r,sbar,rbar).
/// Agrees with eval_Fr / eval_Fs to quadrature tolerance; this is the kernel
/// used by the N-body sums.
struct PairKernels {
    double Fr;
    double Fs;
};
PairKernels eval_pair(const KernelArgs& args, const QuadratureSpec& quad);

/// Reusable handle for eval_pair that resolves the quadrature node tables
/// once; the call operator is pure and safe to use from many threads.
class PairEvaluator {
public:
    explicit PairEvaluator(const QuadratureSpec& quad);
    PairKernels operator()(const KernelArgs& args) const;

private:
    QuadratureSpec quad_;
    const void* table_;
};

}  // namespace birot
