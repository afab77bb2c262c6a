#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "birot/fields.hpp"
#include "doctest.h"

using namespace birot;

namespace {
constexpr double kPiSq = std::numbers::pi * std::numbers::pi;

ScalarField random_field(const GridSpec& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ScalarField f(g);
    for (double& v : f.values()) v = u(rng);
    return f;
}
}  // namespace

TEST_CASE("measure weight") {
    CHECK(measure_weight({0.0, 1.0}, 0.1, 0.1) == 0.0);
    CHECK(measure_weight({1.0, 1.0}, 1.0, 1.0) == doctest::Approx(4.0 * kPiSq).epsilon(1e-15));
    CHECK(measure_weight({2.0, 0.0}, 0.5, 0.5) == 0.0);

    // Midpoint quadrature of the constant 1 over [0,1]^2 against the orbit
    // measure has the closed form pi^2 (exact for the bilinear weight).
    const GridSpec g{1.0, 1.0, 16, 16, Stagger::cell_centered};
    double total = 0.0;
    for (int j = 0; j < 16; ++j)
        for (int i = 0; i < 16; ++i)
            total += measure_weight({g.r(i), g.s(j)}, g.dr(), g.ds());
    CHECK(total == doctest::Approx(kPiSq).epsilon(1e-14));
}

TEST_CASE("w_from_zeta") {
    const GridSpec g{2.0, 2.0, 12, 12, Stagger::node_centered};
    ScalarField zeta(g);

    SUBCASE("zero maps to zero") {
        const ScalarField w = w_from_zeta(zeta);
        for (double v : w.values()) CHECK(v == 0.0);
    }
    SUBCASE("unit zeta gives rs with exact axis zeros") {
        zeta.fill([](double, double) { return 1.0; });
        const ScalarField w = w_from_zeta(zeta);
        for (int j = 0; j < g.count_s(); ++j)
            for (int i = 0; i < g.count_r(); ++i)
                CHECK(w.at(i, j) == g.r(i) * g.s(j));
        for (int i = 0; i < g.count_r(); ++i) CHECK(w.at(i, 0) == 0.0);
        for (int j = 0; j < g.count_s(); ++j) CHECK(w.at(0, j) == 0.0);
    }
    SUBCASE("gaussian is scaled pointwise") {
        auto gau = [](double r, double s) {
            return std::exp(-(r - 1.0) * (r - 1.0) - (s - 1.0) * (s - 1.0));
        };
        zeta.fill(gau);
        const ScalarField w = w_from_zeta(zeta);
        for (int j = 0; j < g.count_s(); ++j)
            for (int i = 0; i < g.count_r(); ++i)
                CHECK(w.at(i, j) ==
                      doctest::Approx(g.r(i) * g.s(j) * gau(g.r(i), g.s(j))).epsilon(1e-15));
    }
}

TEST_CASE("zeta_from_w recovers the analytic quotient including the axis limit") {
    const GridSpec g{3.0, 3.0, 96, 96, Stagger::node_centered};
    auto gau = [](double r, double s) {
        return std::exp(-(r - 1.0) * (r - 1.0) - (s - 1.0) * (s - 1.0));
    };
    ScalarField w(g);
    w.fill([&](double r, double s) { return r * s * gau(r, s); });
    const ScalarField zeta = zeta_from_w(w);
    for (int j = 0; j < g.count_s(); ++j)
        for (int i = 0; i < g.count_r(); ++i)
            CHECK(zeta.at(i, j) == doctest::Approx(gau(g.r(i), g.s(j))).epsilon(5e-4));
    // Interior values are the exact quotient.
    CHECK(zeta.at(32, 48) == w.at(32, 48) / (g.r(32) * g.s(48)));
}

TEST_CASE("zeta_from_w rejects data that does not vanish on the axis") {
    const GridSpec g{1.0, 1.0, 8, 8, Stagger::node_centered};
    ScalarField w(g);
    w.at(0, 4) = 0.5;
    CHECK_THROWS_AS(zeta_from_w(w), AxisDataError);
}

TEST_CASE("round trip w -> zeta -> w is the identity off-axis") {
    const GridSpec g{2.0, 2.0, 20, 20, Stagger::cell_centered};
    const ScalarField zeta = random_field(g, 7);
    const ScalarField w = w_from_zeta(zeta);
    const ScalarField back = zeta_from_w(w);
    for (int j = 0; j < g.n_s; ++j)
        for (int i = 0; i < g.n_r; ++i)
            CHECK(back.at(i, j) == doctest::Approx(zeta.at(i, j)).epsilon(1e-13));
}

TEST_CASE("lp norms") {
    const GridSpec g{2.0, 2.0, 32, 32, Stagger::cell_centered};

    SUBCASE("zero field") {
        CHECK(lp_norm(ScalarField(g), 1.0) == 0.0);
        CHECK(lp_norm(ScalarField(g), std::numeric_limits<double>::infinity()) == 0.0);
    }
    SUBCASE("indicator of [0,1]^2 in L1 has mass pi^2") {
        ScalarField f(g);
        f.fill([](double r, double s) { return (r < 1.0 && s < 1.0) ? 1.0 : 0.0; });
        CHECK(lp_norm(f, 1.0) == doctest::Approx(kPiSq).epsilon(1e-13));
    }
    SUBCASE("constant field sup norm") {
        ScalarField f(g);
        f.fill([](double, double) { return -3.25; });
        CHECK(lp_norm(f, std::numeric_limits<double>::infinity()) == 3.25);
    }
    SUBCASE("absolute homogeneity") {
        const ScalarField f = random_field(g, 11);
        ScalarField cf = f;
        for (double& v : cf.values()) v *= -2.7;
        for (double p : {1.0, 2.0, 4.0})
            CHECK(lp_norm(cf, p) == doctest::Approx(2.7 * lp_norm(f, p)).epsilon(1e-13));
    }
    SUBCASE("L1 of r s g equals the direct weighted sum") {
        const ScalarField gfield = random_field(g, 13);
        ScalarField f(g);
        double direct = 0.0;
        for (int j = 0; j < g.n_s; ++j)
            for (int i = 0; i < g.n_r; ++i) {
                f.at(i, j) = g.r(i) * g.s(j) * gfield.at(i, j);
                direct += std::abs(f.at(i, j)) *
                          measure_weight({g.r(i), g.s(j)}, g.dr(), g.ds());
            }
        CHECK(lp_norm(f, 1.0) == doctest::Approx(direct).epsilon(1e-13));
    }
}

TEST_CASE("outer ring mass fraction") {
    const GridSpec g{2.0, 2.0, 16, 16, Stagger::cell_centered};
    ScalarField interior(g);
    interior.at(8, 8) = 1.0;
    CHECK(outer_ring_mass_fraction(interior) == 0.0);
    ScalarField edge(g);
    edge.at(15, 8) = 1.0;
    CHECK(outer_ring_mass_fraction(edge) == 1.0);
}

TEST_CASE("bicubic sampling reproduces quadratics in the interior") {
    const GridSpec g{2.0, 2.0, 40, 40, Stagger::cell_centered};
    auto quad = [](double r, double s) {
        return 1.0 + 2.0 * r - s + 0.5 * r * r - 0.25 * r * s + s * s;
    };
    ScalarField f(g);
    f.fill(quad);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.3, 1.7);
    for (int k = 0; k < 50; ++k) {
        const double r = u(rng), s = u(rng);
        CHECK(sample_bicubic(f, r, s) == doctest::Approx(quad(r, s)).epsilon(1e-12));
    }
}

TEST_CASE("snapshot io round trip preserves every sample") {
    const GridSpec g{1.5, 2.5, 9, 7, Stagger::node_centered};
    const ScalarField f = random_field(g, 23);
    const auto path = std::filesystem::temp_directory_path() / "birot_snapshot_test.txt";
    write_snapshot(path, f);
    const ScalarField back = read_snapshot(path);
    REQUIRE(back.grid() == f.grid());
    for (std::size_t k = 0; k < f.values().size(); ++k)
        CHECK(back.values()[k] == f.values()[k]);
    std::filesystem::remove(path);
}
