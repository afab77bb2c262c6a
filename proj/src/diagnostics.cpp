#include "birot/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "birot/lorentz.hpp"
#include "birot/parallel.hpp"

namespace birot {

Recorder::Recorder(const GridSpec& grid, const QuadratureSpec& quad, int probe_n)
    : grid_(grid), quad_(quad), probe_n_(probe_n) {
    if (grid_.stagger != Stagger::cell_centered)
        throw std::invalid_argument("Recorder: cell-centered grid expected");
}

DiagnosticsRecord Recorder::record(const SimState& state) {
    DiagnosticsRecord rec;
    rec.time = state.time;
    rec.length_L = state.length_L;
    rec.clip_count = state.clip_count;

    const auto& parts = state.particles.parts;
    const std::size_t n = parts.size();
    for (const Particle& p : parts) {
        rec.zeta_sup = std::max(rec.zeta_sup, std::abs(p.zeta));
        rec.w_sup = std::max(rec.w_sup, p.pos.r * p.pos.s * std::abs(p.zeta));
    }
    rec.zeta_l1 = pairwise_sum_n(n, [&](std::size_t i) {
        return std::abs(parts[i].zeta) * parts[i].weight;
    });
    rec.mom_r = pairwise_sum_n(n, [&](std::size_t i) {
        return parts[i].pos.r * parts[i].pos.r * std::abs(parts[i].zeta) * parts[i].weight;
    });
    rec.mom_s = pairwise_sum_n(n, [&](std::size_t i) {
        return parts[i].pos.s * parts[i].pos.s * std::abs(parts[i].zeta) * parts[i].weight;
    });

    auto [zeta, w] = reconstruct_fields(state.particles, grid_);
    ScalarField w_over_r(grid_), w_over_s(grid_);
    for (int j = 0; j < grid_.n_s; ++j)
        for (int i = 0; i < grid_.n_r; ++i) {
            w_over_r.at(i, j) = grid_.s(j) * zeta.at(i, j);  // w/r = s zeta
            w_over_s.at(i, j) = grid_.r(i) * zeta.at(i, j);
        }
    rec.lor_w = lorentz_norm(w, 4.0, 1.0);
    rec.lor_wr = lorentz_norm(w_over_r, 4.0, 1.0);
    rec.lor_ws = lorentz_norm(w_over_s, 4.0, 1.0);

    std::vector<QuadrantPoint> targets = state.particles.positions();
    for (int j = 0; j < probe_n_; ++j)
        for (int i = 0; i < probe_n_; ++i)
            targets.push_back({(i + 0.5) * grid_.r_max / probe_n_,
                               (j + 0.5) * grid_.s_max / probe_n_});
    const auto vel = ensemble_velocity(state.particles, targets, quad_);
    for (const auto& v : vel) {
        rec.ur_sup = std::max(rec.ur_sup, std::abs(v.u_r));
        rec.us_sup = std::max(rec.us_sup, std::abs(v.u_s));
    }

    const double denom = std::sqrt(rec.mom_r + rec.mom_s) * std::sqrt(rec.zeta_sup);
    rec.ratio_prop_vel = denom > 0.0 ? std::max(rec.ur_sup, rec.us_sup) / denom : 0.0;
    const double tden = std::max(rec.time, state.last_dt);
    rec.ratio_growth = tden > 0.0 ? std::log(std::max(rec.w_sup, 1.0)) / tden : 0.0;

    if (!rows_.empty()) {
        const DiagnosticsRecord& prev = rows_.back();
        rec.bkm_integral = prev.bkm_integral +
                           0.5 * (rec.time - prev.time) *
                               ((prev.lor_wr + prev.lor_ws) + (rec.lor_wr + rec.lor_ws));
    }
    rows_.push_back(rec);
    return rec;
}

void write_csv(const std::filesystem::path& file, std::span<const DiagnosticsRecord> rows) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open " + file.string());
    out << "time,w_sup,zeta_sup,zeta_l1,mom_r,mom_s,lor_w,lor_wr,lor_ws,"
           "ur_sup,us_sup,length_L,bkm_integral,ratio_prop_vel,ratio_growth,"
           "clip_count\n";
    char buf[32];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf << sep;
    };
    for (const auto& r : rows) {
        put(r.time, ',');
        put(r.w_sup, ',');
        put(r.zeta_sup, ',');
        put(r.zeta_l1, ',');
        put(r.mom_r, ',');
        put(r.mom_s, ',');
        put(r.lor_w, ',');
        put(r.lor_wr, ',');
        put(r.lor_ws, ',');
        put(r.ur_sup, ',');
        put(r.us_sup, ',');
        put(r.length_L, ',');
        put(r.bkm_integral, ',');
        put(r.ratio_prop_vel, ',');
        put(r.ratio_growth, ',');
        out << r.clip_count << '\n';
    }
}

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

GronwallReport gronwall_monitor(std::span<const DiagnosticsRecord> series) {
    if (series.size() < 3)
        throw std::invalid_argument("gronwall_monitor: need at least 3 records");
    GronwallReport rep;
    std::vector<double> cw, cwr, cws;
    for (std::size_t k = 1; k + 1 < series.size(); ++k) {
        const auto& a = series[k - 1];
        const auto& b = series[k];
        const auto& c = series[k + 1];
        const double dt = c.time - a.time;
        if (!(dt > 0.0)) continue;
        GronwallRow row;
        row.time = b.time;
        const double crit = b.lor_wr + b.lor_ws;
        const double dw = (c.w_sup - a.w_sup) / dt;
        const double dwr = (c.lor_wr - a.lor_wr) / dt;
        const double dws = (c.lor_ws - a.lor_ws) / dt;
        row.c_w = crit * b.w_sup > 0.0 ? std::max(dw, 0.0) / (crit * b.w_sup) : 0.0;
        row.c_wr = b.lor_ws * b.lor_wr > 0.0 ? std::max(dwr, 0.0) / (b.lor_ws * b.lor_wr) : 0.0;
        row.c_ws = b.lor_wr * b.lor_ws > 0.0 ? std::max(dws, 0.0) / (b.lor_wr * b.lor_ws) : 0.0;
        cw.push_back(row.c_w);
        cwr.push_back(row.c_wr);
        cws.push_back(row.c_ws);
        rep.rows.push_back(row);
    }
    rep.median_c_w = median(cw);
    rep.median_c_wr = median(cwr);
    rep.median_c_ws = median(cws);
    for (auto& row : rep.rows) {
        row.flagged = (rep.median_c_w > 0.0 && row.c_w > 5.0 * rep.median_c_w) ||
                      (rep.median_c_wr > 0.0 && row.c_wr > 5.0 * rep.median_c_wr) ||
                      (rep.median_c_ws > 0.0 && row.c_ws > 5.0 * rep.median_c_ws);
        if (row.flagged) ++rep.flagged_steps;
    }
    return rep;
}

}  // namespace birot
