#pragma once

#include <filesystem>
#include <vector>

#include "birot/fields.hpp"
#include "birot/kernel.hpp"
#include "birot/velocity.hpp"

namespace birot {

/// One Lagrangian sample of the conserved relative vorticity. zeta and weight
/// are written once at seeding and never touched again; the flow conserves
/// both exactly, so every particle-side norm is constant to the bit.
struct Particle {
    QuadrantPoint pos;
    double zeta = 0.0;    // w/(rs), conserved along the trajectory
    double weight = 0.0;  // initial orbit measure 4 pi^2 r s h_r h_s, conserved
};

struct ParticleEnsemble {
    std::vector<Particle> parts;
    GridSpec seed_grid;
    double spacing = 0.0;        // initial inter-particle spacing min(h_r, h_s)
    double excise_radius = 0.0;  // self-interaction cut, half the spacing

    std::vector<SourcePoint> sources() const;
    std::vector<QuadrantPoint> positions() const;
};

struct SimState {
    double time = 0.0;
    ParticleEnsemble particles;
    double length_L = 1.0;  // 1 + int_0^t (sup|u^r| + sup|u^s|) dtau, nondecreasing
    long step_count = 0;
    long clip_count = 0;  // particle-steps clipped back into the quadrant
    double last_dt = 0.0;
};

struct CflError : std::runtime_error {
    CflError(double dt, double speed, double spacing)
        : std::runtime_error("CFL bound violated: dt * max speed > 0.5 * spacing"),
          dt(dt), max_speed(speed), spacing(spacing) {}
    double dt, max_speed, spacing;
};

struct EmptyEnsembleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One particle per cell with |zeta0| > threshold * max|zeta0|, placed at the
/// cell center with the cell's orbit measure.
ParticleEnsemble seed_particles(const ScalarField& zeta0, double threshold);

struct StepOptions {
    bool probe_lattice = true;  // include a probe lattice in the sup-speed sample
    int probe_n = 16;
};

/// Classical RK4 push of all particles through the ensemble-induced velocity
/// (pairwise kernel sums with the self-interaction cut). zeta and weight are
/// untouched; length_L grows by dt * (sup|u^r| + sup|u^s|) sampled at the
/// first stage (left-endpoint rule); final positions are clipped to the
/// closed quadrant with clip events counted. Throws CflError before any
/// mutation when dt * max speed > 0.5 * spacing.
SimState step(const SimState& state, double dt, const QuadratureSpec& quad,
              const StepOptions& opts = {});

/// Velocity samples induced by the ensemble at the given targets.
std::vector<VelocitySample> ensemble_velocity(const ParticleEnsemble& ens,
                                              std::span<const QuadrantPoint> targets,
                                              const QuadratureSpec& quad);

/// Area-weighted bilinear deposit of zeta * weight onto cell centers, divided
/// by the cell measure; returns (zeta, w = rs zeta). Inverts seeding exactly
/// for an unmoved ensemble.
std::pair<ScalarField, ScalarField> reconstruct_fields(const ParticleEnsemble& ens,
                                                       const GridSpec& grid);

/// Checkpoint: "time n_particles length_L" then one "r s zeta weight" line
/// per particle at 17 significant digits.
void write_checkpoint(const std::filesystem::path& file, const SimState& state);
SimState read_checkpoint(const std::filesystem::path& file);

}  // namespace birot
