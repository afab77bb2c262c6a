#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>
#include <filesystem>
#include <map>

#include "birot/transport.hpp"
#include "doctest.h"

using namespace birot;

namespace {

const QuadratureSpec kFast{QuadRule::gauss_legendre, 12, 12, true, 1.0, 20};

ScalarField small_blob(const GridSpec& g, double cr = 0.9, double cs = 0.9,
                       double width = 0.18) {
    ScalarField zeta(g);
    const double k = 1.0 / (2.0 * width * width);
    zeta.fill([=](double r, double s) {
        return std::exp(-k * ((r - cr) * (r - cr) + (s - cs) * (s - cs)));
    });
    return zeta;
}

}  // namespace

TEST_CASE("seeding") {
    const GridSpec g{2.0, 2.0, 24, 24, Stagger::cell_centered};

    SUBCASE("zero data cannot seed") {
        CHECK_THROWS_AS(seed_particles(ScalarField(g), 0.0), EmptyEnsembleError);
    }
    SUBCASE("indicator blob seeds one particle per cell with the blob measure") {
        ScalarField zeta(g);
        double measure = 0.0;
        int cells = 0;
        for (int j = 6; j < 12; ++j)
            for (int i = 4; i < 9; ++i) {
                zeta.at(i, j) = 1.0;
                measure += measure_weight({g.r(i), g.s(j)}, g.dr(), g.ds());
                ++cells;
            }
        const ParticleEnsemble ens = seed_particles(zeta, 0.0);
        CHECK(static_cast<int>(ens.parts.size()) == cells);
        double total = 0.0;
        for (const auto& p : ens.parts) total += p.weight;
        CHECK(total == doctest::Approx(measure).epsilon(1e-14));
    }
    SUBCASE("threshold count matches the direct count") {
        const ScalarField zeta = small_blob(g);
        double zmax = 0.0;
        for (double v : zeta.values()) zmax = std::max(zmax, std::abs(v));
        int expect = 0;
        for (double v : zeta.values())
            if (std::abs(v) > 1e-4 * zmax) ++expect;
        CHECK(static_cast<int>(seed_particles(zeta, 1e-4).parts.size()) == expect);
    }
}

TEST_CASE("zero-circulation ensemble does not move") {
    ParticleEnsemble ens;
    ens.seed_grid = {2.0, 2.0, 16, 16, Stagger::cell_centered};
    ens.spacing = 0.125;
    ens.excise_radius = 0.0625;
    for (int k = 0; k < 5; ++k)
        ens.parts.push_back({{0.3 + 0.2 * k, 0.8}, 0.0, 1.0});
    SimState state;
    state.particles = ens;
    const SimState next = step(state, 0.05, kFast);
    for (std::size_t k = 0; k < ens.parts.size(); ++k) {
        CHECK(next.particles.parts[k].pos.r == ens.parts[k].pos.r);
        CHECK(next.particles.parts[k].pos.s == ens.parts[k].pos.s);
    }
    CHECK(next.length_L == 1.0);
    CHECK(next.step_count == 1);
}

TEST_CASE("CFL violation throws before mutation") {
    const GridSpec g{2.0, 2.0, 24, 24, Stagger::cell_centered};
    SimState state;
    state.particles = seed_particles(small_blob(g), 1e-3);
    CHECK_THROWS_AS(step(state, 50.0, kFast), CflError);
}

TEST_CASE("conserved quantities are bit-identical across steps") {
    const GridSpec g{2.0, 2.0, 24, 24, Stagger::cell_centered};
    SimState state;
    state.particles = seed_particles(small_blob(g), 1e-3);
    const std::vector<Particle> before = state.particles.parts;
    for (int k = 0; k < 3; ++k) state = step(state, 0.02, kFast);
    REQUIRE(state.particles.parts.size() == before.size());
    for (std::size_t k = 0; k < before.size(); ++k) {
        CHECK(std::memcmp(&state.particles.parts[k].zeta, &before[k].zeta,
                          sizeof(double)) == 0);
        CHECK(std::memcmp(&state.particles.parts[k].weight, &before[k].weight,
                          sizeof(double)) == 0);
    }
    CHECK(state.length_L >= 1.0);
    CHECK(state.clip_count == 0);
}

TEST_CASE("mirror runs with swapped axes stay swapped") {
    // The axis swap is the R^4 rotation (x1,x2,x3,x4) -> (x3,x4,x1,x2); it
    // carries w to -w(s,r), so the mirrored run needs the negated data.
    const GridSpec g{2.0, 2.0, 24, 24, Stagger::cell_centered};
    const ScalarField zeta_a = small_blob(g, 1.1, 0.7);
    ScalarField zeta_b = small_blob(g, 0.7, 1.1);
    for (double& v : zeta_b.values()) v = -v;

    SimState a, b;
    a.particles = seed_particles(zeta_a, 1e-3);
    b.particles = seed_particles(zeta_b, 1e-3);
    REQUIRE(a.particles.parts.size() == b.particles.parts.size());
    for (int k = 0; k < 4; ++k) {
        a = step(a, 0.02, kFast);
        b = step(b, 0.02, kFast);
    }
    // Match b's particles to a's through the swap map (r,s) -> (s,r) of the
    // seeding lattice.
    std::map<std::pair<long, long>, QuadrantPoint> b_by_seed;
    const ParticleEnsemble bseed = seed_particles(zeta_b, 1e-3);
    for (std::size_t k = 0; k < bseed.parts.size(); ++k) {
        const auto key = std::make_pair(std::lround(bseed.parts[k].pos.r / g.dr() - 0.5),
                                        std::lround(bseed.parts[k].pos.s / g.ds() - 0.5));
        b_by_seed[key] = b.particles.parts[k].pos;
    }
    const ParticleEnsemble aseed = seed_particles(zeta_a, 1e-3);
    for (std::size_t k = 0; k < aseed.parts.size(); ++k) {
        const auto key = std::make_pair(std::lround(aseed.parts[k].pos.s / g.ds() - 0.5),
                                        std::lround(aseed.parts[k].pos.r / g.dr() - 0.5));
        REQUIRE(b_by_seed.count(key) == 1);
        const QuadrantPoint swapped = b_by_seed[key];
        CHECK(a.particles.parts[k].pos.r == doctest::Approx(swapped.s).epsilon(1e-10));
        CHECK(a.particles.parts[k].pos.s == doctest::Approx(swapped.r).epsilon(1e-10));
    }
}

TEST_CASE("antisymmetric pair stays antisymmetric for one step") {
    const GridSpec g{3.0, 3.0, 32, 32, Stagger::cell_centered};
    ScalarField zeta(g);
    const double k = 1.0 / (2.0 * 0.2 * 0.2);
    zeta.fill([&](double r, double s) {
        return std::exp(-k * ((r - 1.3) * (r - 1.3) + (s - 0.8) * (s - 0.8))) -
               std::exp(-k * ((r - 0.8) * (r - 0.8) + (s - 1.3) * (s - 1.3)));
    });
    SimState state;
    state.particles = seed_particles(zeta, 1e-3);
    state = step(state, 0.02, kFast);

    std::map<std::pair<long, long>, std::pair<QuadrantPoint, double>> by_seed;
    const ParticleEnsemble seed0 = seed_particles(zeta, 1e-3);
    for (std::size_t i = 0; i < seed0.parts.size(); ++i) {
        const auto key = std::make_pair(std::lround(seed0.parts[i].pos.r / g.dr() - 0.5),
                                        std::lround(seed0.parts[i].pos.s / g.ds() - 0.5));
        by_seed[key] = {state.particles.parts[i].pos, state.particles.parts[i].zeta};
    }
    for (const auto& [key, val] : by_seed) {
        const auto mirror = by_seed.find({key.second, key.first});
        REQUIRE(mirror != by_seed.end());
        CHECK(val.first.r == doctest::Approx(mirror->second.first.s).epsilon(1e-12));
        CHECK(val.second == doctest::Approx(-mirror->second.second).epsilon(1e-15));
    }
}

TEST_CASE("time reversal returns at fourth order") {
    const GridSpec g{2.0, 2.0, 16, 16, Stagger::cell_centered};
    auto run_roundtrip = [&](double dt, int steps) {
        SimState state;
        state.particles = seed_particles(small_blob(g, 0.9, 0.9, 0.25), 1e-2);
        const auto initial = state.particles.positions();
        for (int k = 0; k < steps; ++k) state = step(state, dt, kFast);
        for (auto& p : state.particles.parts) p.zeta = -p.zeta;  // reverse the flow
        for (int k = 0; k < steps; ++k) state = step(state, dt, kFast);
        double err = 0.0;
        for (std::size_t k = 0; k < initial.size(); ++k)
            err = std::max(err, std::hypot(state.particles.parts[k].pos.r - initial[k].r,
                                           state.particles.parts[k].pos.s - initial[k].s));
        return err;
    };
    const double e1 = run_roundtrip(0.08, 4);
    const double e2 = run_roundtrip(0.04, 8);
    INFO("roundtrip errors ", e1, " -> ", e2);
    CHECK(e2 <= e1 / 8.0);
}

TEST_CASE("reconstruction inverts seeding and conserves the deposit") {
    const GridSpec g{2.0, 2.0, 24, 24, Stagger::cell_centered};
    const ScalarField zeta = small_blob(g);
    const ParticleEnsemble ens = seed_particles(zeta, 1e-3);
    const auto [zr, wr] = reconstruct_fields(ens, g);

    double zmax = 0.0;
    for (double v : zeta.values()) zmax = std::max(zmax, std::abs(v));
    for (int j = 0; j < g.n_s; ++j)
        for (int i = 0; i < g.n_r; ++i) {
            if (std::abs(zeta.at(i, j)) > 1e-3 * zmax)
                CHECK(zr.at(i, j) == doctest::Approx(zeta.at(i, j)).epsilon(1e-12));
            CHECK(wr.at(i, j) == g.r(i) * g.s(j) * zr.at(i, j));
        }

    double particle_total = 0.0;
    for (const auto& p : ens.parts) particle_total += p.zeta * p.weight;
    double grid_total = 0.0;
    for (int j = 0; j < g.n_s; ++j)
        for (int i = 0; i < g.n_r; ++i)
            grid_total += zr.at(i, j) * measure_weight({g.r(i), g.s(j)}, g.dr(), g.ds());
    CHECK(grid_total == doctest::Approx(particle_total).epsilon(1e-13));
}

TEST_CASE("checkpoint io round trip") {
    const GridSpec g{2.0, 2.0, 16, 16, Stagger::cell_centered};
    SimState state;
    state.particles = seed_particles(small_blob(g), 1e-2);
    state = step(state, 0.02, kFast);
    const auto path = std::filesystem::temp_directory_path() / "birot_checkpoint_test.txt";
    write_checkpoint(path, state);
    const SimState back = read_checkpoint(path);
    CHECK(back.time == state.time);
    CHECK(back.length_L == state.length_L);
    REQUIRE(back.particles.parts.size() == state.particles.parts.size());
    for (std::size_t k = 0; k < back.particles.parts.size(); ++k) {
        CHECK(back.particles.parts[k].pos.r == state.particles.parts[k].pos.r);
        CHECK(back.particles.parts[k].pos.s == state.particles.parts[k].pos.s);
        CHECK(back.particles.parts[k].zeta == state.particles.parts[k].zeta);
        CHECK(back.particles.parts[k].weight == state.particles.parts[k].weight);
    }
    std::filesystem::remove(path);
}
