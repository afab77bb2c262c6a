#pragma once

#include <array>
#include <functional>
#include <span>

#include "birot/fields.hpp"

namespace birot {

/// Full 4D vorticity tensor at one bi-polar point in the no-swirl case:
/// antisymmetric, with w^{1,2} = w^{3,4} = 0 and the four mixed entries
/// carrying angular factors of w.
struct VorticityTensorSample {
    std::array<std::array<double, 4>, 4> omega{};
    double frobenius() const;
};

/// omega^{1,3} = -cos t cos p w, omega^{1,4} = -cos t sin p w,
/// omega^{2,3} = -sin t cos p w, omega^{2,4} = -sin t sin p w.
VorticityTensorSample assemble_tensor(double w_val, double theta, double phi);

/// A 4D sample point given in Cartesian coordinates.
using Point4 = std::array<double, 4>;

/// Max over sample points and index triples of the cyclic sum
/// d_k w^{i,j} + d_i w^{j,k} + d_j w^{k,i}, with the Cartesian derivatives
/// taken by centered differences of step h on the assembled tensor field.
/// The field variant samples w by bicubic interpolation with h = the grid
/// spacing; the callable variant takes w(r, s) directly and an explicit h.
double consistency_residual(const ScalarField& w, std::span<const Point4> pts);
double consistency_residual(const std::function<double(double, double)>& w,
                            std::span<const Point4> pts, double h);

/// Same cyclic sum with exact derivatives: the Cartesian gradient of the
/// tensor is expanded through the bi-polar chain rule against the supplied
/// analytic d_r w and d_s w. Vanishes identically for smooth w; serves as
/// the machine-precision reference for the finite-difference variant.
double consistency_residual_exact(const std::function<double(double, double)>& w,
                                  const std::function<double(double, double)>& dw_dr,
                                  const std::function<double(double, double)>& dw_ds,
                                  std::span<const Point4> pts);

struct AxisRegularityEstimate {
    double value = 0.0;
    bool reliable = false;
};

/// Empirical bound for sup |w/(rs)| near the axes via the mixed second
/// difference of omega^{1,3} in (x_1, x_3) at theta = phi = 0, using the two
/// smallest grid offsets; flagged unreliable on under-resolved grids.
AxisRegularityEstimate axis_regularity_estimate(const ScalarField& w);

}  // namespace birot
