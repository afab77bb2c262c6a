#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace birot {

/// A point (r, s) in the quadrant Pi = {r >= 0, s >= 0}. Each point stands
/// for a torus-like orbit in R^4: r and s are the radii in the two rotation
/// planes.
struct QuadrantPoint {
    double r = 0.0;
    double s = 0.0;
};

enum class Stagger { cell_centered, node_centered };

/// Uniform grid on [0, r_max] x [0, s_max]. Cell-centered fields sample at
/// ((i+1/2)h_r, (j+1/2)h_s) with n_r x n_s values; node-centered fields sample
/// at (i h_r, j h_s) with (n_r+1) x (n_s+1) values. h_r = r_max/n_r either way.
struct GridSpec {
    double r_max = 1.0;
    double s_max = 1.0;
    int n_r = 1;
    int n_s = 1;
    Stagger stagger = Stagger::cell_centered;

    double dr() const { return r_max / n_r; }
    double ds() const { return s_max / n_s; }
    int count_r() const { return stagger == Stagger::cell_centered ? n_r : n_r + 1; }
    int count_s() const { return stagger == Stagger::cell_centered ? n_s : n_s + 1; }
    double r(int i) const {
        return stagger == Stagger::cell_centered ? (i + 0.5) * dr() : i * dr();
    }
    double s(int j) const {
        return stagger == Stagger::cell_centered ? (j + 0.5) * ds() : j * ds();
    }
    bool operator==(const GridSpec&) const = default;
};

/// Scalar samples on a grid, stored row-major with i (the r index) fastest.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const GridSpec& g)
        : grid_(g), v_(static_cast<std::size_t>(g.count_r()) * g.count_s(), 0.0) {}

    const GridSpec& grid() const { return grid_; }
    double& at(int i, int j) { return v_[idx(i, j)]; }
    double at(int i, int j) const { return v_[idx(i, j)]; }
    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

    /// Fill from a callable f(r, s).
    void fill(const std::function<double(double, double)>& f) {
        for (int j = 0; j < grid_.count_s(); ++j)
            for (int i = 0; i < grid_.count_r(); ++i)
                at(i, j) = f(grid_.r(i), grid_.s(j));
    }

private:
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(j) * grid_.count_r() + i;
    }
    GridSpec grid_;
    std::vector<double> v_;
};

/// Weight of the R^4 orbit volume attached to a quadrant cell of size
/// h_r x h_s at p: 4 pi^2 r s h_r h_s. Discrete sums against this weight
/// approximate integrals over R^4.
double measure_weight(const QuadrantPoint& p, double h_r, double h_s);

/// w = r s zeta, exact zeros where r or s vanishes.
ScalarField w_from_zeta(const ScalarField& zeta);

/// zeta = w / (r s). On node-centered grids the axis rows/columns are filled
/// by one-sided quadratic extrapolation from the three nearest interior
/// samples; w must vanish on the axes to within 1e-12 * max|w|.
ScalarField zeta_from_w(const ScalarField& w);

/// L^p(R^4) norm of the field under the orbit measure (midpoint rule on cell
/// centers; node-centered fields use trapezoid-style half weights on the
/// boundary). p = infinity gives max|f| with no measure.
double lp_norm(const ScalarField& f, double p);

/// Fraction of the L^1(R^4) mass of |f| carried by the outermost two rings of
/// cells. Runs treat a fraction above 1e-6 as a truncated-domain failure.
double outer_ring_mass_fraction(const ScalarField& f);

/// C^1 cubic-convolution interpolation of a field at (r, s); samples outside
/// the grid are clamped to the boundary values.
double sample_bicubic(const ScalarField& f, double r, double s);

/// Snapshot I/O: header "n_r n_s r_max s_max stagger" followed by the samples
/// in row-major (i fastest) order at 17 significant digits.
void write_snapshot(const std::filesystem::path& file, const ScalarField& f);
ScalarField read_snapshot(const std::filesystem::path& file);

struct AxisDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace birot
