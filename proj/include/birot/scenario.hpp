#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "birot/diagnostics.hpp"
#include "birot/transport.hpp"

namespace birot {

enum class InitialKind { gaussian_blob, diagonal_antisymmetric_pair, ring_product, from_file };

/// Flat key-value scenario description; see README for the config grammar.
struct ScenarioConfig {
    GridSpec grid{4.0, 4.0, 96, 96, Stagger::cell_centered};
    InitialKind kind = InitialKind::gaussian_blob;
    QuadrantPoint center{1.0, 1.0};
    double width = 0.25;
    double amplitude = 1.0;
    double r0 = 1.0, s0 = 1.0, thickness = 0.25;  // ring_product parameters
    std::string initial_path;                     // from_file parameter
    double dt = 0.01;
    double t_end = 1.0;
    QuadratureSpec quad{QuadRule::gauss_legendre, 16, 16, true, 1.0, 20};
    double seed_threshold = 1e-4;
    std::string output_dir = "out";
    std::vector<QuadrantPoint> probes;
    int emit_every = 10;
    bool hypothesis_override = false;
    bool probe_lattice = true;

    void validate() const;
};

/// Exit codes of `birot run`, also stored in the error record.
enum ExitCode : int {
    exit_ok = 0,
    exit_config_error = 2,
    exit_cfl_violation = 3,
    exit_kernel_nonconvergence = 4,
    exit_truncation_failure = 5,
    exit_hypothesis_failure = 6,
    exit_empty_ensemble = 7,
    exit_io_error = 8,
};

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& file);
std::string serialize_config(const ScenarioConfig& cfg);

/// Analytic initial relative vorticity of the configured scenario.
std::function<double(double, double)> initial_zeta_fn(const ScenarioConfig& cfg);

/// Cell-centered samples of the initial data (reads the snapshot for
/// from_file scenarios).
ScalarField build_initial_zeta(const ScenarioConfig& cfg);

struct RunResult {
    int exit_code = exit_ok;
    std::string error;               // empty on success
    std::vector<DiagnosticsRecord> rows;
    double final_time = 0.0;
    std::size_t n_particles = 0;
    // More than 0.1% of particle-steps clipped at the axes: the axis
    // velocities vanish analytically, so frequent clipping means the run is
    // under-resolved.
    bool unreliable = false;
};

/// Seed, integrate to t_end, and write diagnostics.csv, periodic checkpoints,
/// and final field snapshots under output_dir. On failure writes error.json
/// with a machine-readable record and returns the matching exit code.
RunResult run(const ScenarioConfig& cfg);

}  // namespace birot
