#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aoiris/channel.hpp"

#include "oracles.hpp"

#include <cmath>
#include <cstring>

using namespace aoiris;

TEST_CASE("amplitude gain closed forms") {
    PathLossParams pl;  // a0 = 1e-3 at 1 m
    CHECK(amplitude_gain(pl, 1.0, 2.2) == doctest::Approx(std::pow(10.0, -1.5)).epsilon(1e-12));

    // long-double evaluation as the reference
    const long double want = sqrtl(1e-3L * powl(3.0L, -2.2L));
    CHECK(std::abs(amplitude_gain(pl, 3.0, 2.2) - static_cast<double>(want)) < 1e-12);

    const double g1 = amplitude_gain(pl, 5.0, 2.0);
    const double g2 = amplitude_gain(pl, 10.0, 2.0);
    CHECK((g2 * g2) / (g1 * g1) == doctest::Approx(0.25).epsilon(1e-12));

    CHECK_THROWS_AS(amplitude_gain(pl, 0.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(amplitude_gain(pl, -1.0, 2.0), std::invalid_argument);
}

TEST_CASE("amplitude gain is strictly decreasing in distance and exponent beyond 1 m") {
    PathLossParams pl;
    RngStream rng(5, 0);
    for (int k = 0; k < 50; ++k) {
        const double d = 1.0 + 50.0 * rng.uniform();
        const double n = 2.0 + 2.0 * rng.uniform();
        CHECK(amplitude_gain(pl, d + 0.5, n) < amplitude_gain(pl, d, n));
        CHECK(amplitude_gain(pl, d, n + 0.2) < amplitude_gain(pl, d, n));
    }
}

TEST_CASE("drawn channels carry the configured large-scale power") {
    PathLossParams pl;
    NetworkSizes sizes{4, 8, 1, 1};
    RngStream rng(17, 0);
    double power = 0.0;
    const int draws = 10000;
    for (int k = 0; k < draws; ++k) {
        const ChannelRealization r = draw_channels(pl, sizes, rng);
        power += r.ap_iu[0].squaredNorm() / sizes.n_tx;
    }
    power /= draws;
    const double want = 1e-3 * std::pow(31.0, -2.2);
    CHECK(power == doctest::Approx(want).epsilon(0.03));
}

TEST_CASE("same seed reproduces the realization; default G shape is 40 x 4") {
    PathLossParams pl;
    NetworkSizes sizes;  // defaults
    RngStream r1(23, 4), r2(23, 4);
    const ChannelRealization a = draw_channels(pl, sizes, r1);
    const ChannelRealization b = draw_channels(pl, sizes, r2);
    CHECK(a.ap_ris.rows() == 40);
    CHECK(a.ap_ris.cols() == 4);
    CHECK(std::memcmp(a.ap_ris.data(), b.ap_ris.data(),
                      sizeof(cxd) * static_cast<size_t>(a.ap_ris.size())) == 0);
    CHECK((a.ap_iu[0] - b.ap_iu[0]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("composite factor reproduces the direct expansion") {
    PathLossParams pl;
    NetworkSizes sizes{3, 2, 1, 1};
    RngStream rng(29, 0);
    const ChannelRealization r = draw_channels(pl, sizes, rng);

    SUBCASE("all-ones reflection") {
        const ComplexVec rho = ComplexVec::Ones(2);
        const CompositeFactor f = composite_factor_iu(r, 0);
        const ComplexVec composite = f.composite(rho);
        // rho^H U + h_b^H with unit phases collapses to h_r^H G + h_b^H
        const Eigen::RowVectorXcd direct =
            r.ris_iu[0].adjoint() * r.ap_ris + r.ap_iu[0].adjoint();
        CHECK((composite.adjoint() - direct).cwiseAbs().maxCoeff() < 1e-12);
    }

    SUBCASE("element-wise expansion at random phases") {
        const ComplexVec rho = oracles::random_unit_rho(2, rng);
        const CompositeFactor f = composite_factor_iu(r, 0);
        // scalar loop over diag(h_r^H) G
        for (int c = 0; c < 3; ++c) {
            cxd want(0, 0);
            for (int n = 0; n < 2; ++n) {
                want += std::conj(rho[n]) * std::conj(r.ris_iu[0][n]) * r.ap_ris(n, c);
            }
            want += std::conj(r.ap_iu[0][c]);
            CHECK(std::abs(std::conj(f.composite(rho)[c]) - want) < 1e-12);
        }
    }

    SUBCASE("blocked reflect path reduces to the direct link") {
        ChannelRealization blocked = r;
        blocked.ris_iu[0].setZero();
        const CompositeFactor f = composite_factor_iu(blocked, 0);
        CHECK(f.reflect.cwiseAbs().maxCoeff() == 0.0);
        const ComplexVec rho = oracles::random_unit_rho(2, rng);
        CHECK((f.composite(rho) - blocked.ap_iu[0]).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("energy-user factor mirrors the information-user factor") {
        const ComplexVec ones = ComplexVec::Ones(2);
        const CompositeFactor f = composite_factor_eu(r, 0);
        const Eigen::RowVectorXcd direct =
            r.ris_eu[0].adjoint() * r.ap_ris + r.ap_eu[0].adjoint();
        CHECK((f.composite(ones).adjoint() - direct).cwiseAbs().maxCoeff() < 1e-12);

        ChannelRealization no_g = r;
        no_g.ap_ris.setZero();
        const CompositeFactor f2 = composite_factor_eu(no_g, 0);
        const ComplexVec rho = oracles::random_unit_rho(2, rng);
        CHECK((f2.composite(rho) - no_g.ap_eu[0]).cwiseAbs().maxCoeff() == 0.0);
    }

    CHECK_THROWS_AS(composite_factor_iu(r, 1), std::out_of_range);
    CHECK_THROWS_AS(composite_factor_eu(r, -1), std::out_of_range);
}

TEST_CASE("composite factorization against the materialized reflection matrix") {
    PathLossParams pl;
    NetworkSizes sizes{4, 6, 2, 1};
    RngStream rng(31, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const ChannelRealization r = draw_channels(pl, sizes, rng);
        const ComplexVec rho = oracles::random_unit_rho(6, rng);
        const ComplexVec w = sample_cn(4, 1, rng).col(0);
        // reflection matrix consistent with the rho^H row convention
        ComplexMat phi = ComplexMat::Zero(6, 6);
        for (int n = 0; n < 6; ++n) phi(n, n) = std::conj(rho[n]);
        for (int i = 0; i < 2; ++i) {
            const CompositeFactor f = composite_factor_iu(r, i);
            const cxd via_factor = hermitian_product(f.composite(rho), w);
            const cxd via_phi =
                (r.ris_iu[static_cast<size_t>(i)].adjoint() * phi * r.ap_ris * w).value() +
                hermitian_product(r.ap_iu[static_cast<size_t>(i)], w);
            CHECK(std::abs(via_factor - via_phi) <= 1e-10 * w.norm());
        }
    }
}

TEST_CASE("derived reflector-user distances follow the collinear layout with a floor") {
    PathLossParams pl;  // AP-IU 31 m, AP-EU 3 m, AP-RIS 3 m
    CHECK(pl.ris_iu_distance() == doctest::Approx(28.0));
    CHECK(pl.ris_eu_distance() == doctest::Approx(0.5));  // floor kicks in
    pl.d_ris_eu = 1.25;
    CHECK(pl.ris_eu_distance() == doctest::Approx(1.25));
}
