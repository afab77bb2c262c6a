#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "birot/transport.hpp"

namespace birot {

/// One time-stamped row of every monitored quantity. Norms over particles
/// (zeta_sup, zeta_l1, w_sup, mom_r, mom_s) are exact Lagrangian sums; the
/// Lorentz norms are taken on gridded reconstructions because rearrangement
/// needs a measure partition.
struct DiagnosticsRecord {
    double time = 0.0;
    double w_sup = 0.0;      // max r s |zeta| over particles
    double zeta_sup = 0.0;   // max |zeta|, conserved to the bit
    double zeta_l1 = 0.0;    // sum |zeta| weight, conserved to the bit
    double mom_r = 0.0;      // ||r w / s||_L1 = sum r^2 |zeta| weight
    double mom_s = 0.0;      // ||s w / r||_L1 = sum s^2 |zeta| weight
    double lor_w = 0.0;      // ||w||_{L^{4,1}} on the reconstruction
    double lor_wr = 0.0;     // ||w/r||_{L^{4,1}}
    double lor_ws = 0.0;     // ||w/s||_{L^{4,1}}
    double ur_sup = 0.0;     // sup |u^r| over particle sites and probe lattice
    double us_sup = 0.0;
    double length_L = 1.0;
    double bkm_integral = 0.0;  // running int_0^t (lor_wr + lor_ws) dtau
    double ratio_prop_vel = 0.0;
    double ratio_growth = 0.0;
    long clip_count = 0;
};

/// Accumulating recorder: per-call it reconstructs grid fields, computes all
/// norms and velocity sups, and advances the BKM integral by the trapezoid
/// rule. ratio_prop_vel = max(ur_sup, us_sup) / ((mom_r + mom_s)^1/2 *
/// zeta_sup^1/2), 0 when the denominator vanishes; ratio_growth =
/// log(max(w_sup, 1)) / max(t, dt).
class Recorder {
public:
    Recorder(const GridSpec& grid, const QuadratureSpec& quad, int probe_n = 16);
    DiagnosticsRecord record(const SimState& state);
    const std::vector<DiagnosticsRecord>& rows() const { return rows_; }

private:
    GridSpec grid_;
    QuadratureSpec quad_;
    int probe_n_;
    std::vector<DiagnosticsRecord> rows_;
};

/// CSV with one header row naming every field in declaration order, one data
/// row per record, 17 significant digits, '.' decimal point.
void write_csv(const std::filesystem::path& file, std::span<const DiagnosticsRecord> rows);

struct GronwallRow {
    double time = 0.0;
    double c_w = 0.0;   // implied constant in d/dt ||w||_inf <= C (lor_wr + lor_ws) ||w||_inf
    double c_wr = 0.0;  // d/dt lor_wr <= C lor_ws lor_wr
    double c_ws = 0.0;  // d/dt lor_ws <= C lor_wr lor_ws
    bool flagged = false;
};

struct GronwallReport {
    std::vector<GronwallRow> rows;
    double median_c_w = 0.0;
    double median_c_wr = 0.0;
    double median_c_ws = 0.0;
    int flagged_steps = 0;
};

/// Central-difference estimate of each implied constant per interior record;
/// steps where any constant exceeds 5x its run median are flagged (numerical
/// inconsistency, not blow-up). Needs at least 3 records.
GronwallReport gronwall_monitor(std::span<const DiagnosticsRecord> series);

}  // namespace birot
