#include "birot/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>

#include "birot/parallel.hpp"

namespace birot {

namespace {
constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;
}

std::vector<SourcePoint> ParticleEnsemble::sources() const {
    std::vector<SourcePoint> out(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i)
        out[i] = {parts[i].pos.r, parts[i].pos.s, parts[i].zeta * parts[i].weight / kFourPiSq};
    return out;
}

std::vector<QuadrantPoint> ParticleEnsemble::positions() const {
    std::vector<QuadrantPoint> out(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) out[i] = parts[i].pos;
    return out;
}

ParticleEnsemble seed_particles(const ScalarField& zeta0, double threshold) {
    const GridSpec& g = zeta0.grid();
    if (g.stagger != Stagger::cell_centered)
        throw std::invalid_argument("seed_particles: zeta0 must be cell-centered");
    double zmax = 0.0;
    for (double z : zeta0.values()) zmax = std::max(zmax, std::abs(z));

    ParticleEnsemble ens;
    ens.seed_grid = g;
    ens.spacing = std::min(g.dr(), g.ds());
    ens.excise_radius = 0.5 * ens.spacing;
    const double cut = threshold * zmax;
    for (int j = 0; j < g.n_s; ++j)
        for (int i = 0; i < g.n_r; ++i) {
            const double z = zeta0.at(i, j);
            if (std::abs(z) > cut) {
                const QuadrantPoint p{g.r(i), g.s(j)};
                ens.parts.push_back({p, z, measure_weight(p, g.dr(), g.ds())});
            }
        }
    if (ens.parts.empty())
        throw EmptyEnsembleError("seed_particles: no cell above threshold");
    return ens;
}

std::vector<VelocitySample> ensemble_velocity(const ParticleEnsemble& ens,
                                              std::span<const QuadrantPoint> targets,
                                              const QuadratureSpec& quad) {
    const auto src = ens.sources();
    return induced_velocity(src, targets, quad, ens.excise_radius);
}

namespace {

std::vector<QuadrantPoint> clipped(const std::vector<QuadrantPoint>& pos) {
    std::vector<QuadrantPoint> out(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i)
        out[i] = {std::max(0.0, pos[i].r), std::max(0.0, pos[i].s)};
    return out;
}

std::vector<VelocitySample> stage_velocity(const ParticleEnsemble& ens,
                                           const std::vector<QuadrantPoint>& stage_pos,
                                           const QuadratureSpec& quad) {
    std::vector<SourcePoint> src(ens.parts.size());
    for (std::size_t i = 0; i < src.size(); ++i)
        src[i] = {stage_pos[i].r, stage_pos[i].s,
                  ens.parts[i].zeta * ens.parts[i].weight / kFourPiSq};
    return induced_velocity(src, stage_pos, quad, ens.excise_radius);
}

}  // namespace

SimState step(const SimState& state, double dt, const QuadratureSpec& quad,
              const StepOptions& opts) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    const ParticleEnsemble& ens = state.particles;
    const std::size_t n = ens.parts.size();

    const std::vector<QuadrantPoint> x0 = ens.positions();
    const auto k1 = stage_velocity(ens, x0, quad);

    double max_speed = 0.0, sup_r = 0.0, sup_s = 0.0;
    for (const auto& v : k1) {
        max_speed = std::max(max_speed, std::hypot(v.u_r, v.u_s));
        sup_r = std::max(sup_r, std::abs(v.u_r));
        sup_s = std::max(sup_s, std::abs(v.u_s));
    }
    if (dt * max_speed > 0.5 * ens.spacing)
        throw CflError(dt, max_speed, ens.spacing);

    if (opts.probe_lattice && opts.probe_n > 0) {
        // Off-particle probes: the particle sup is only a lower bound for the
        // sup over the quadrant.
        std::vector<QuadrantPoint> probes;
        probes.reserve(static_cast<std::size_t>(opts.probe_n) * opts.probe_n);
        const GridSpec& g = ens.seed_grid;
        for (int j = 0; j < opts.probe_n; ++j)
            for (int i = 0; i < opts.probe_n; ++i)
                probes.push_back({(i + 0.5) * g.r_max / opts.probe_n,
                                  (j + 0.5) * g.s_max / opts.probe_n});
        const auto pv = ensemble_velocity(ens, probes, quad);
        for (const auto& v : pv) {
            sup_r = std::max(sup_r, std::abs(v.u_r));
            sup_s = std::max(sup_s, std::abs(v.u_s));
        }
    }

    auto advance = [&](const std::vector<QuadrantPoint>& base,
                       const std::vector<VelocitySample>& vel, double f) {
        std::vector<QuadrantPoint> out(n);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = {base[i].r + f * vel[i].u_r, base[i].s + f * vel[i].u_s};
        return out;
    };

    const auto x2 = clipped(advance(x0, k1, 0.5 * dt));
    const auto k2 = stage_velocity(ens, x2, quad);
    const auto x3 = clipped(advance(x0, k2, 0.5 * dt));
    const auto k3 = stage_velocity(ens, x3, quad);
    const auto x4 = clipped(advance(x0, k3, dt));
    const auto k4 = stage_velocity(ens, x4, quad);

    SimState next = state;
    long clips = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = x0[i].r + dt / 6.0 * (k1[i].u_r + 2.0 * k2[i].u_r + 2.0 * k3[i].u_r + k4[i].u_r);
        double s = x0[i].s + dt / 6.0 * (k1[i].u_s + 2.0 * k2[i].u_s + 2.0 * k3[i].u_s + k4[i].u_s);
        if (r < 0.0 || s < 0.0) {
            ++clips;
            r = std::max(0.0, r);
            s = std::max(0.0, s);
        }
        next.particles.parts[i].pos = {r, s};
    }
    next.time = state.time + dt;
    next.length_L = state.length_L + dt * (sup_r + sup_s);
    next.step_count = state.step_count + 1;
    next.clip_count = state.clip_count + clips;
    next.last_dt = dt;
    return next;
}

std::pair<ScalarField, ScalarField> reconstruct_fields(const ParticleEnsemble& ens,
                                                       const GridSpec& grid) {
    if (grid.stagger != Stagger::cell_centered)
        throw std::invalid_argument("reconstruct_fields: cell-centered grid expected");
    const double hr = grid.dr(), hs = grid.ds();
    ScalarField zeta(grid);

    // Bilinear splat of zeta * weight onto the cell-center lattice; positions
    // are clamped so all mass lands in-grid and the particle total is
    // preserved exactly.
    std::vector<double>& acc = zeta.values();
    for (const Particle& p : ens.parts) {
        const double gx = std::clamp(p.pos.r / hr - 0.5, 0.0, grid.n_r - 1.0);
        const double gy = std::clamp(p.pos.s / hs - 0.5, 0.0, grid.n_s - 1.0);
        const int i0 = std::min(static_cast<int>(gx), grid.n_r - 2);
        const int j0 = std::min(static_cast<int>(gy), grid.n_s - 2);
        const double fx = gx - i0, fy = gy - j0;
        const double m = p.zeta * p.weight;
        acc[static_cast<std::size_t>(j0) * grid.n_r + i0] += m * (1.0 - fx) * (1.0 - fy);
        acc[static_cast<std::size_t>(j0) * grid.n_r + i0 + 1] += m * fx * (1.0 - fy);
        acc[static_cast<std::size_t>(j0 + 1) * grid.n_r + i0] += m * (1.0 - fx) * fy;
        acc[static_cast<std::size_t>(j0 + 1) * grid.n_r + i0 + 1] += m * fx * fy;
    }
    for (int j = 0; j < grid.n_s; ++j)
        for (int i = 0; i < grid.n_r; ++i)
            zeta.at(i, j) /= measure_weight({grid.r(i), grid.s(j)}, hr, hs);
    return {zeta, w_from_zeta(zeta)};
}

void write_checkpoint(const std::filesystem::path& file, const SimState& state) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open " + file.string());
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", state.time);
    out << buf << ' ' << state.particles.parts.size() << ' ';
    std::snprintf(buf, sizeof buf, "%.17g", state.length_L);
    out << buf << '\n';
    for (const Particle& p : state.particles.parts) {
        std::snprintf(buf, sizeof buf, "%.17g", p.pos.r);
        out << buf << ' ';
        std::snprintf(buf, sizeof buf, "%.17g", p.pos.s);
        out << buf << ' ';
        std::snprintf(buf, sizeof buf, "%.17g", p.zeta);
        out << buf << ' ';
        std::snprintf(buf, sizeof buf, "%.17g", p.weight);
        out << buf << '\n';
    }
}

SimState read_checkpoint(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    SimState state;
    std::size_t n = 0;
    if (!(in >> state.time >> n >> state.length_L))
        throw std::runtime_error("malformed checkpoint header in " + file.string());
    state.particles.parts.resize(n);
    double spacing = std::numeric_limits<double>::infinity();
    for (auto& p : state.particles.parts) {
        if (!(in >> p.pos.r >> p.pos.s >> p.zeta >> p.weight))
            throw std::runtime_error("truncated checkpoint " + file.string());
    }
    // Spacing is not stored; recover a usable excision scale from the weights
    // (weight = 4 pi^2 r s h^2 at seeding).
    for (const auto& p : state.particles.parts)
        if (p.pos.r > 0 && p.pos.s > 0 && p.weight > 0)
            spacing = std::min(spacing,
                               std::sqrt(p.weight / (kFourPiSq * p.pos.r * p.pos.s)));
    if (!std::isfinite(spacing)) spacing = 1.0;
    state.particles.spacing = spacing;
    state.particles.excise_radius = 0.5 * spacing;
    double rmax = 0.0, smax = 0.0;
    for (const auto& p : state.particles.parts) {
        rmax = std::max(rmax, p.pos.r);
        smax = std::max(smax, p.pos.s);
    }
    state.particles.seed_grid = {std::max(rmax * 1.5, 1.0), std::max(smax * 1.5, 1.0),
                                 64, 64, Stagger::cell_centered};
    return state;
}

}  // namespace birot
