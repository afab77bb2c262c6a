#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "birot/fields.hpp"
#include "birot/kernel.hpp"

namespace birot {

struct VelocitySample {
    QuadrantPoint at;
    double u_r = 0.0;  // exactly 0 when at.r == 0
    double u_s = 0.0;  // exactly 0 when at.s == 0
};

/// Stream function on a node-centered grid; psi = 0 on all four boundaries.
struct StreamField {
    GridSpec grid;
    std::vector<double> psi;  // row-major, i fastest, (n_r+1) x (n_s+1)
    double& at(int i, int j) { return psi[static_cast<std::size_t>(j) * (grid.n_r + 1) + i]; }
    double at(int i, int j) const {
        return psi[static_cast<std::size_t>(j) * (grid.n_r + 1) + i];
    }
};

/// One quadrature site of the vorticity: strength = w * (flat dr ds area it
/// carries). The kernels already contain the orbit-volume factors, so the
/// Biot-Savart sums use the flat quadrant measure.
struct SourcePoint {
    double r;
    double s;
    double strength;
};

/// u^r(x) = + sum F^r(x, x_j) strength_j,  u^s(x) = - sum F^s(x, x_j) strength_j,
/// skipping sources within excise_radius of the target (the self-interaction
/// cut; the omitted contribution is O(radius * |w|) and vanishes under
/// refinement). The axis components are set to their exact zeros. The signs
/// are pinned by agreement with the 4D convolution oracle and the
/// stream-function route.
std::vector<VelocitySample> induced_velocity(std::span<const SourcePoint> sources,
                                             std::span<const QuadrantPoint> targets,
                                             const QuadratureSpec& quad,
                                             double excise_radius);

/// Kernel route on a gridded vorticity: one source per cell with strength
/// w_ij h_r h_s, excision radius half a cell. w must be cell-centered.
std::vector<VelocitySample> biot_savart(const ScalarField& w,
                                        std::span<const QuadrantPoint> targets,
                                        const QuadratureSpec& quad);

struct Velocity4 {
    std::array<double, 4> u{};  // Cartesian components
    double u_r = 0.0, u_s = 0.0, u_theta = 0.0, u_phi = 0.0;
};

/// Independent full-dimensional oracle: u^i(x) = sum_j int K_j(x - y) w^{i,j}(y) dy
/// with K_j(y) = y_j / (2 pi^2 |y|^4) and the no-swirl vorticity tensor, via
/// midpoint quadrature in bi-polar coordinates (volume element r s dr ds
/// dtheta dphi). Refuses targets closer than two cell diagonals to the bulk
/// support (cells with |w| >= 1e-3 max|w|).
Velocity4 brute_force_velocity_4d(const ScalarField& w, const std::array<double, 4>& x,
                                  int n_angle = 48);

/// Second-order solve of
///   d_r( (1/r) d_r(r psi) ) + d_s( (1/s) d_s(s psi) ) = w
/// with psi = 0 on the axes and on the outer boundary (data is assumed to
/// decay inside the box). w must be node-centered; only interior values enter.
/// The discrete residual of the returned psi is at most 1e-10 * max|w|.
StreamField solve_stream(const ScalarField& w);

struct StreamSolveError : std::runtime_error {
    StreamSolveError(const std::string& msg, double residual_)
        : std::runtime_error(msg), residual(residual_) {}
    double residual;
};

/// u^r = -psi/s - d_s psi, u^s = psi/r + d_r psi on the nodes. Centered
/// differences inside, one-sided second order on the boundary; psi/r and
/// psi/s on the axes by the same quadratic extrapolation as zeta_from_w.
std::pair<ScalarField, ScalarField> velocity_from_stream(const StreamField& psi);

/// Max over interior nodes of |d_r u^r + u^r/r + d_s u^s + u^s/s| divided by
/// max(||grad u||_inf, eps).
double divergence_residual(const ScalarField& u_r, const ScalarField& u_s);

}  // namespace birot
