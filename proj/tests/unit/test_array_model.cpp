// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sparsewb Authors

#include "sparsewb/array_model.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace sparsewb;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("build_grid places positions uniformly from zero to the aperture")
{
    const auto g = build_grid(10.0, 100);
    CHECK(g.size() == 100);
    CHECK(g[0] == 0.0);
    CHECK(g[1] == doctest::Approx(10.0 / 99.0).epsilon(1e-15));
    CHECK(g[99] == 10.0);

    const auto pair = build_grid(1.0, 2);
    CHECK(pair[0] == 0.0);
    CHECK(pair[1] == 1.0);

    const auto ga = build_grid(6.16, 12);
    CHECK(ga[11] == 6.16);

    for (Index m = 1; m < g.size(); ++m) {
        CHECK(std::abs(g[m] - g[m - 1] - g.spacing()) <= 1e-12 * g.aperture());
    }
}

TEST_CASE("build_grid rejects degenerate input")
{
    CHECK_THROWS_AS(build_grid(1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(-1.0, 10), std::invalid_argument);
}

TEST_CASE("mu converts wavelengths to sample delays")
{
    CHECK(mu(0.5) == 1.0);
    CHECK(mu(0.0) == 0.0);
    CHECK(mu(1.0) == 2.0);
}

TEST_CASE("steering_vector examples")
{
    const auto g = build_grid(3.0, 7);
    const TdlConfig tdl{4};

    SUBCASE("broadside removes the position dependence")
    {
        const double omega = 0.7 * kPi;
        const auto s = steering_vector(g, tdl, omega, 90.0);
        for (Index m = 0; m < g.size(); ++m) {
            for (Index j = 0; j < tdl.taps; ++j) {
                const Complex expected = std::polar(1.0, -omega * static_cast<double>(j));
                CHECK(std::abs(s[m * tdl.taps + j] - expected) <= 1e-15);
            }
        }
    }
    SUBCASE("vanishing frequency drives every entry to one")
    {
        const auto s = steering_vector(g, tdl, 1e-12, 30.0);
        CHECK((s - ComplexVector::Ones(s.size())).cwiseAbs().maxCoeff() <= 1e-10);
    }
    SUBCASE("half-wavelength sensor at endfire and omega = pi")
    {
        const std::vector<double> pos{0.5};
        const auto s = steering_vector(pos, TdlConfig{1}, kPi, 0.0);
        CHECK(std::abs(s[0] - Complex(-1.0, 0.0)) <= 1e-15);
    }
    SUBCASE("out-of-range arguments")
    {
        CHECK_THROWS_AS(steering_vector(g, tdl, 0.0, 90.0), std::invalid_argument);
        CHECK_THROWS_AS(steering_vector(g, tdl, 3.5, 90.0), std::invalid_argument);
        CHECK_THROWS_AS(steering_vector(g, tdl, 1.0, -1.0), std::invalid_argument);
        CHECK_THROWS_AS(steering_vector(g, tdl, 1.0, 181.0), std::invalid_argument);
        CHECK_THROWS_AS(steering_vector(g, TdlConfig{0}, 1.0, 90.0), std::invalid_argument);
    }
}

TEST_CASE("augmented_steering_vector inserts a zero per sensor")
{
    const auto g = build_grid(2.0, 5);
    const TdlConfig tdl{3};
    const auto s = steering_vector(g, tdl, 2.0, 40.0);
    const auto a = augmented_steering_vector(g, tdl, 2.0, 40.0);
    REQUIRE(a.size() == g.size() * (tdl.taps + 1));
    for (Index m = 0; m < g.size(); ++m) {
        CHECK(a[AugmentedWeight::t_slot(m, tdl.taps)] == Complex(0.0, 0.0));
        for (Index j = 0; j < tdl.taps; ++j) {
            CHECK(a[AugmentedWeight::w_slot(m, j, tdl.taps)] == s[m * tdl.taps + j]);
        }
    }

    const std::vector<double> one{0.0};
    const auto single = augmented_steering_vector(one, TdlConfig{1}, kPi, 90.0);
    REQUIRE(single.size() == 2);
    CHECK(single[0] == Complex(0.0, 0.0));
    CHECK(std::abs(single[1] - Complex(1.0, 0.0)) <= 1e-15);

    CHECK(augmented_steering_vector(build_grid(10.0, 100), TdlConfig{25}, kPi, 90.0).size() == 2600);
}

TEST_CASE("build_steering_matrix on the broadside sampling")
{
    const auto g = build_grid(2.0, 6);
    const TdlConfig tdl{3};
    const auto spec = broadside_sampling();
    const auto s = build_steering_matrix(g, tdl, spec, false);
    const auto sa = build_steering_matrix(g, tdl, spec, true);

    CHECK(s.frequencies.size() == 11);
    Index sidelobe = 0;
    for (const auto& a : s.angles) {
        sidelobe += a.mainlobe ? 0 : 1;
    }
    CHECK(sidelobe == 162);
    CHECK(s.angles.size() == 163);
    CHECK(s.entries.cols() == 11 * 163);
    CHECK((s.entries.cwiseAbs().array() - 1.0).abs().maxCoeff() <= 1e-12);

    Index row = 0;
    for (Index m = 0; m < g.size(); ++m) {
        CHECK(sa.entries.row(AugmentedWeight::t_slot(m, tdl.taps)).cwiseAbs().maxCoeff() == 0.0);
        for (Index j = 0; j < tdl.taps; ++j) {
            CHECK(sa.entries.row(AugmentedWeight::w_slot(m, j, tdl.taps)) == s.entries.row(row));
            ++row;
        }
    }

    const Index col = s.column(4, 17);
    const auto direct = steering_vector(g, tdl, s.frequencies[4], s.angles[17].deg);
    CHECK(s.entries.col(col) == direct);
}

TEST_CASE("build_steering_matrix rejects an empty sampling")
{
    auto spec = broadside_sampling();
    spec.sidelobe_regions.clear();
    spec.mainlobe_deg = 90.0;
    spec.angle_step_deg = 1.0;
    CHECK_NOTHROW(build_steering_matrix(build_grid(1.0, 2), TdlConfig{1}, spec, false));
    spec.omega_step = 0.0;
    CHECK_THROWS_AS(build_steering_matrix(build_grid(1.0, 2), TdlConfig{1}, spec, false), std::invalid_argument);
}

TEST_CASE("SamplingSpec validation")
{
    auto spec = broadside_sampling();
    CHECK_NOTHROW(spec.validate());
    CHECK(spec.frequencies().size() == 11);

    SUBCASE("overlapping regions")
    {
        spec.sidelobe_regions = {{0.0, 85.0}, {80.0, 88.0}};
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
    SUBCASE("mainlobe inside a region")
    {
        spec.sidelobe_regions = {{0.0, 95.0}};
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
    SUBCASE("reference outside the band")
    {
        spec.omega_ref = 0.2;
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
    SUBCASE("band beyond pi")
    {
        spec.omega_hi = 4.0;
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
}

TEST_CASE("response evaluates w^H s")
{
    const auto g = build_grid(3.0, 4);
    const TdlConfig tdl{2};
    const auto s = steering_vector(g, tdl, 1.3, 60.0);
    CHECK(response(RealVector(RealVector::Zero(s.size())), s) == Complex(0.0, 0.0));

    const std::vector<double> one{0.0};
    const auto s1 = steering_vector(one, TdlConfig{1}, 2.2, 17.0);
    CHECK(response(RealVector(RealVector::Ones(1)), s1) == s1[0]);

    const auto s0 = steering_vector(g, tdl, 1e-12, 60.0);
    const RealVector uniform = RealVector::Constant(s0.size(), 1.0 / static_cast<double>(s0.size()));
    CHECK(std::abs(response(uniform, s0) - Complex(1.0, 0.0)) <= 1e-10);

    const ComplexVector wc = ComplexVector::Constant(s.size(), Complex(0.0, 1.0));
    CHECK(std::abs(response(wc, s) - Complex(0.0, -1.0) * s.sum()) <= 1e-12);

    CHECK_THROWS_AS(response(RealVector(RealVector::Zero(3)), s), std::invalid_argument);
}

TEST_CASE("AugmentedWeight layout")
{
    WeightVector w(3, 2);
    w.flat() << 1, 2, 3, 4, 5, 6;
    RealVector t(3);
    t << 7, 8, 9;
    const auto a = AugmentedWeight::from_parts(w, t);
    RealVector expected(9);
    expected << 7, 1, 2, 8, 3, 4, 9, 5, 6;
    CHECK(a.flat() == expected);
    CHECK(a.weights().flat() == w.flat());
    CHECK(a.t_values() == t);
    CHECK(a.t(1) == 8.0);
    CHECK(w.group_norms()[0] == doctest::Approx(std::sqrt(5.0)));
}
