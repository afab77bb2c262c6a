#include "birot/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace birot {

void ScenarioConfig::validate() const {
    if (grid.n_r < 4 || grid.n_s < 4 || !(grid.r_max > 0) || !(grid.s_max > 0))
        throw std::invalid_argument("config: bad grid");
    if (!(dt > 0) || !(t_end >= dt)) throw std::invalid_argument("config: need t_end >= dt > 0");
    if (!(seed_threshold >= 0)) throw std::invalid_argument("config: seed_threshold < 0");
    if (emit_every < 1) throw std::invalid_argument("config: emit_every < 1");
    quad.validate();
    if (kind == InitialKind::from_file && initial_path.empty())
        throw std::invalid_argument("config: initial.path required for from_file");
}

namespace {

const char* kind_name(InitialKind k) {
    switch (k) {
        case InitialKind::gaussian_blob: return "gaussian_blob";
        case InitialKind::diagonal_antisymmetric_pair: return "diagonal_antisymmetric_pair";
        case InitialKind::ring_product: return "ring_product";
        default: return "from_file";
    }
}

InitialKind kind_from(const std::string& s) {
    if (s == "gaussian_blob") return InitialKind::gaussian_blob;
    if (s == "diagonal_antisymmetric_pair") return InitialKind::diagonal_antisymmetric_pair;
    if (s == "ring_product") return InitialKind::ring_product;
    if (s == "from_file") return InitialKind::from_file;
    throw std::invalid_argument("config: unknown initial.kind '" + s + "'");
}

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = val;
    }

    ScenarioConfig cfg;
    auto get = [&](const char* key, auto parse, auto& dst) {
        auto it = kv.find(key);
        if (it != kv.end()) dst = parse(it->second);
    };
    auto to_d = [](const std::string& s) { return std::stod(s); };
    auto to_i = [](const std::string& s) { return std::stoi(s); };
    auto to_b = [](const std::string& s) { return s == "true" || s == "1" || s == "yes"; };
    auto to_s = [](const std::string& s) { return s; };

    get("grid.r_max", to_d, cfg.grid.r_max);
    get("grid.s_max", to_d, cfg.grid.s_max);
    get("grid.n_r", to_i, cfg.grid.n_r);
    get("grid.n_s", to_i, cfg.grid.n_s);
    if (auto it = kv.find("initial.kind"); it != kv.end()) cfg.kind = kind_from(it->second);
    get("initial.center_r", to_d, cfg.center.r);
    get("initial.center_s", to_d, cfg.center.s);
    get("initial.width", to_d, cfg.width);
    get("initial.amplitude", to_d, cfg.amplitude);
    get("initial.r0", to_d, cfg.r0);
    get("initial.s0", to_d, cfg.s0);
    get("initial.thickness", to_d, cfg.thickness);
    get("initial.path", to_s, cfg.initial_path);
    get("run.dt", to_d, cfg.dt);
    get("run.t_end", to_d, cfg.t_end);
    get("run.seed_threshold", to_d, cfg.seed_threshold);
    get("run.emit_every", to_i, cfg.emit_every);
    get("run.hypothesis_override", to_b, cfg.hypothesis_override);
    get("run.probe_lattice", to_b, cfg.probe_lattice);
    if (auto it = kv.find("quad.rule"); it != kv.end())
        cfg.quad.rule = it->second == "clenshaw_curtis" ? QuadRule::clenshaw_curtis
                                                        : QuadRule::gauss_legendre;
    get("quad.n_theta", to_i, cfg.quad.n_theta);
    get("quad.n_phi", to_i, cfg.quad.n_phi);
    get("quad.near_singular_split", to_b, cfg.quad.near_singular_split);
    get("quad.split_threshold", to_d, cfg.quad.split_threshold);
    get("quad.max_refine_levels", to_i, cfg.quad.max_refine_levels);
    get("output.dir", to_s, cfg.output_dir);
    if (auto it = kv.find("probes"); it != kv.end()) {
        cfg.probes.clear();
        std::istringstream ps(it->second);
        std::string tok;
        while (std::getline(ps, tok, ';')) {
            std::istringstream pt(tok);
            QuadrantPoint p;
            char comma;
            if (pt >> p.r >> comma >> p.s) cfg.probes.push_back(p);
        }
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open config " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ScenarioConfig& cfg) {
    std::ostringstream out;
    out << "grid.r_max = " << fmt17(cfg.grid.r_max) << '\n'
        << "grid.s_max = " << fmt17(cfg.grid.s_max) << '\n'
        << "grid.n_r = " << cfg.grid.n_r << '\n'
        << "grid.n_s = " << cfg.grid.n_s << '\n'
        << "initial.kind = " << kind_name(cfg.kind) << '\n'
        << "initial.center_r = " << fmt17(cfg.center.r) << '\n'
        << "initial.center_s = " << fmt17(cfg.center.s) << '\n'
        << "initial.width = " << fmt17(cfg.width) << '\n'
        << "initial.amplitude = " << fmt17(cfg.amplitude) << '\n'
        << "initial.r0 = " << fmt17(cfg.r0) << '\n'
        << "initial.s0 = " << fmt17(cfg.s0) << '\n'
        << "initial.thickness = " << fmt17(cfg.thickness) << '\n';
    if (!cfg.initial_path.empty()) out << "initial.path = " << cfg.initial_path << '\n';
    out << "run.dt = " << fmt17(cfg.dt) << '\n'
        << "run.t_end = " << fmt17(cfg.t_end) << '\n'
        << "run.seed_threshold = " << fmt17(cfg.seed_threshold) << '\n'
        << "run.emit_every = " << cfg.emit_every << '\n'
        << "run.hypothesis_override = " << (cfg.hypothesis_override ? "true" : "false") << '\n'
        << "run.probe_lattice = " << (cfg.probe_lattice ? "true" : "false") << '\n'
        << "quad.rule = "
        << (cfg.quad.rule == QuadRule::clenshaw_curtis ? "clenshaw_curtis" : "gauss_legendre")
        << '\n'
        << "quad.n_theta = " << cfg.quad.n_theta << '\n'
        << "quad.n_phi = " << cfg.quad.n_phi << '\n'
        << "quad.near_singular_split = " << (cfg.quad.near_singular_split ? "true" : "false")
        << '\n'
        << "quad.split_threshold = " << fmt17(cfg.quad.split_threshold) << '\n'
        << "quad.max_refine_levels = " << cfg.quad.max_refine_levels << '\n'
        << "output.dir = " << cfg.output_dir << '\n';
    if (!cfg.probes.empty()) {
        out << "probes = ";
        for (std::size_t i = 0; i < cfg.probes.size(); ++i) {
            if (i) out << "; ";
            out << fmt17(cfg.probes[i].r) << ", " << fmt17(cfg.probes[i].s);
        }
        out << '\n';
    }
    return out.str();
}

std::function<double(double, double)> initial_zeta_fn(const ScenarioConfig& cfg) {
    const double amp = cfg.amplitude;
    switch (cfg.kind) {
        case InitialKind::gaussian_blob: {
            const double cr = cfg.center.r, cs = cfg.center.s;
            const double k = 1.0 / (2.0 * cfg.width * cfg.width);
            return [=](double r, double s) {
                return amp * std::exp(-k * detail::sym_dist2(r - cr, s - cs));
            };
        }
        case InitialKind::diagonal_antisymmetric_pair: {
            // sym_dist2 keeps the two lobes bitwise mirror images on square
            // grids, so the pair is exactly antisymmetric across the diagonal.
            const double cr = cfg.center.r, cs = cfg.center.s;
            const double k = 1.0 / (2.0 * cfg.width * cfg.width);
            return [=](double r, double s) {
                const double d2p = detail::sym_dist2(r - cr, s - cs);
                const double d2m = detail::sym_dist2(r - cs, s - cr);
                return amp * (std::exp(-k * d2p) - std::exp(-k * d2m));
            };
        }
        case InitialKind::ring_product: {
            const double r0 = cfg.r0, s0 = cfg.s0;
            const double k = 1.0 / (2.0 * cfg.thickness * cfg.thickness);
            return [=](double r, double s) {
                return amp * std::exp(-k * (r - r0) * (r - r0)) *
                       std::exp(-k * (s - s0) * (s - s0));
            };
        }
        default:
            throw std::invalid_argument("initial_zeta_fn: from_file has no analytic form");
    }
}

ScalarField build_initial_zeta(const ScenarioConfig& cfg) {
    if (cfg.kind == InitialKind::from_file) {
        ScalarField f = read_snapshot(cfg.initial_path);
        if (f.grid().stagger != Stagger::cell_centered)
            throw std::invalid_argument("from_file: cell-centered snapshot expected");
        return f;
    }
    ScalarField zeta(cfg.grid);
    zeta.fill(initial_zeta_fn(cfg));
    return zeta;
}

namespace {

void write_error_record(const ScenarioConfig& cfg, int code, const std::string& name,
                        const std::string& message, double time, long step) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    nlohmann::json rec{{"exit_code", code}, {"error", name},     {"message", message},
                       {"time", time},      {"step", step}};
    std::ofstream out(std::filesystem::path(cfg.output_dir) / "error.json");
    out << rec.dump(2) << '\n';
}

}  // namespace

RunResult run(const ScenarioConfig& cfg) {
    RunResult result;
    double time = 0.0;
    long stepno = 0;
    auto fail = [&](int code, const std::string& name, const std::string& msg) {
        write_error_record(cfg, code, name, msg, time, stepno);
        result.exit_code = code;
        result.error = name + ": " + msg;
        return result;
    };

    try {
        cfg.validate();
    } catch (const std::exception& e) {
        return fail(exit_config_error, "config_error", e.what());
    }

    try {
        std::filesystem::create_directories(cfg.output_dir);
        const ScalarField zeta0 = build_initial_zeta(cfg);

        // Global-regularity hypothesis gate: (1+r+s) zeta0 bounded and
        // (1+r^2+s^2) zeta0 integrable. On a finite grid these can only fail
        // by being non-finite, which catches bad from_file data.
        double h_sup = 0.0;
        for (int j = 0; j < cfg.grid.n_s; ++j)
            for (int i = 0; i < cfg.grid.n_r; ++i)
                h_sup = std::max(h_sup, (1.0 + cfg.grid.r(i) + cfg.grid.s(j)) *
                                            std::abs(zeta0.at(i, j)));
        double h_l1 = 0.0;
        for (int j = 0; j < cfg.grid.n_s; ++j)
            for (int i = 0; i < cfg.grid.n_r; ++i) {
                const double r = cfg.grid.r(i), s = cfg.grid.s(j);
                h_l1 += (1.0 + r * r + s * s) * std::abs(zeta0.at(i, j)) *
                        measure_weight({r, s}, cfg.grid.dr(), cfg.grid.ds());
            }
        if (!cfg.hypothesis_override && (!std::isfinite(h_sup) || !std::isfinite(h_l1)))
            return fail(exit_hypothesis_failure, "hypothesis_failure",
                        "initial data violates the global-regularity hypotheses");

        const double frac0 = outer_ring_mass_fraction(zeta0);
        if (frac0 > 1e-6)
            return fail(exit_truncation_failure, "truncation_failure",
                        "initial data carries " + std::to_string(frac0) +
                            " of its mass in the outer two cell rings");

        double zmax = 0.0;
        for (double z : zeta0.values()) zmax = std::max(zmax, std::abs(z));
        if (zmax == 0.0) {
            // Identically-zero data: nothing to transport, emit the zero row.
            Recorder recorder(cfg.grid, cfg.quad);
            SimState zero;
            zero.particles.seed_grid = cfg.grid;
            zero.particles.spacing = std::min(cfg.grid.dr(), cfg.grid.ds());
            zero.particles.excise_radius = 0.5 * zero.particles.spacing;
            recorder.record(zero);
            write_csv(std::filesystem::path(cfg.output_dir) / "diagnostics.csv",
                      recorder.rows());
            write_snapshot(std::filesystem::path(cfg.output_dir) / "zeta_final.txt", zeta0);
            write_snapshot(std::filesystem::path(cfg.output_dir) / "w_final.txt",
                           w_from_zeta(zeta0));
            result.rows = recorder.rows();
            result.exit_code = exit_ok;
            return result;
        }

        SimState state;
        state.particles = seed_particles(zeta0, cfg.seed_threshold);
        result.n_particles = state.particles.parts.size();

        Recorder recorder(cfg.grid, cfg.quad);
        recorder.record(state);

        write_snapshot(std::filesystem::path(cfg.output_dir) / "zeta_initial.txt", zeta0);
        write_checkpoint(std::filesystem::path(cfg.output_dir) / "checkpoint_initial.txt",
                         state);

        std::ofstream probes_csv;
        if (!cfg.probes.empty()) {
            probes_csv.open(std::filesystem::path(cfg.output_dir) / "probes.csv");
            probes_csv << "time";
            for (std::size_t p = 0; p < cfg.probes.size(); ++p)
                probes_csv << ",u_r_" << p << ",u_s_" << p;
            probes_csv << '\n';
        }
        auto emit_probes = [&](const SimState& st) {
            if (cfg.probes.empty()) return;
            const auto vel = ensemble_velocity(st.particles, cfg.probes, cfg.quad);
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", st.time);
            probes_csv << buf;
            for (const auto& v : vel) {
                std::snprintf(buf, sizeof buf, "%.17g", v.u_r);
                probes_csv << ',' << buf;
                std::snprintf(buf, sizeof buf, "%.17g", v.u_s);
                probes_csv << ',' << buf;
            }
            probes_csv << '\n';
        };
        emit_probes(state);

        const long n_steps = std::lround(cfg.t_end / cfg.dt);
        StepOptions opts;
        opts.probe_lattice = cfg.probe_lattice;
        for (long k = 1; k <= n_steps; ++k) {
            state = step(state, cfg.dt, cfg.quad, opts);
            time = state.time;
            stepno = k;
            if (k % cfg.emit_every == 0 || k == n_steps) {
                recorder.record(state);
                emit_probes(state);
                auto [zeta, w] = reconstruct_fields(state.particles, cfg.grid);
                const double frac = outer_ring_mass_fraction(zeta);
                if (frac > 1e-6) {
                    write_csv(std::filesystem::path(cfg.output_dir) / "diagnostics.csv",
                              recorder.rows());
                    return fail(exit_truncation_failure, "truncation_failure",
                                "vorticity mass reached the outer two cell rings");
                }
                char name[64];
                std::snprintf(name, sizeof name, "checkpoint_%06ld.txt", k);
                write_checkpoint(std::filesystem::path(cfg.output_dir) / name, state);
            }
        }

        write_csv(std::filesystem::path(cfg.output_dir) / "diagnostics.csv", recorder.rows());
        auto [zeta, w] = reconstruct_fields(state.particles, cfg.grid);
        write_snapshot(std::filesystem::path(cfg.output_dir) / "zeta_final.txt", zeta);
        write_snapshot(std::filesystem::path(cfg.output_dir) / "w_final.txt", w);

        // Final velocity snapshots on the node grid, kernel route.
        const GridSpec node{cfg.grid.r_max, cfg.grid.s_max, cfg.grid.n_r, cfg.grid.n_s,
                            Stagger::node_centered};
        std::vector<QuadrantPoint> nodes;
        nodes.reserve(static_cast<std::size_t>(node.count_r()) * node.count_s());
        for (int j = 0; j < node.count_s(); ++j)
            for (int i = 0; i < node.count_r(); ++i) nodes.push_back({node.r(i), node.s(j)});
        const auto nv = ensemble_velocity(state.particles, nodes, cfg.quad);
        ScalarField u_r(node), u_s(node);
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            u_r.values()[k] = nv[k].u_r;
            u_s.values()[k] = nv[k].u_s;
        }
        write_snapshot(std::filesystem::path(cfg.output_dir) / "u_r_final.txt", u_r);
        write_snapshot(std::filesystem::path(cfg.output_dir) / "u_s_final.txt", u_s);
        write_checkpoint(std::filesystem::path(cfg.output_dir) / "checkpoint_final.txt",
                         state);
        result.rows = recorder.rows();
        result.final_time = state.time;
        result.n_particles = state.particles.parts.size();
        const double steps_total =
            static_cast<double>(state.particles.parts.size()) * n_steps;
        result.unreliable = steps_total > 0 && state.clip_count > 1e-3 * steps_total;
        result.exit_code = exit_ok;
        return result;
    } catch (const CflError& e) {
        return fail(exit_cfl_violation, "cfl_violation", e.what());
    } catch (const KernelNonConvergence& e) {
        return fail(exit_kernel_nonconvergence, "kernel_nonconvergence", e.what());
    } catch (const EmptyEnsembleError& e) {
        return fail(exit_empty_ensemble, "empty_ensemble", e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(exit_io_error, "io_error", e.what());
    } catch (const std::exception& e) {
        return fail(exit_config_error, "config_error", e.what());
    }
}

}  // namespace birot
