#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aoiris/numerics.hpp"

#include <complex>
#include <cstring>

using namespace aoiris;

TEST_CASE("hermitian product basics") {
    ComplexVec a(2), b(2);
    a << cxd(1, 0), cxd(0, 1);
    b = a;
    CHECK(hermitian_product(a, b) == cxd(2, 0));

    ComplexVec e1(2), e2(2);
    e1 << cxd(1, 0), cxd(0, 0);
    e2 << cxd(0, 0), cxd(1, 0);
    CHECK(hermitian_product(e1, e2) == cxd(0, 0));

    ComplexVec bad(3);
    CHECK_THROWS_AS(hermitian_product(a, bad), std::invalid_argument);
}

TEST_CASE("hermitian product matches the scalar loop and is conjugate-symmetric") {
    RngStream rng(1, 0);
    const ComplexVec a = sample_cn(8, 1, rng).col(0);
    const ComplexVec b = sample_cn(8, 1, rng).col(0);
    cxd manual(0, 0);
    for (int k = 0; k < 8; ++k) manual += std::conj(a[k]) * b[k];
    CHECK(std::abs(hermitian_product(a, b) - manual) < 1e-12);
    CHECK(std::abs(hermitian_product(a, b) - std::conj(hermitian_product(b, a))) < 1e-14);
}

TEST_CASE("real embedding on the imaginary unit and the identity") {
    ComplexMat m(1, 1);
    m << cxd(0, 1);
    RealMat e = complex_to_real_embedding(m);
    RealMat want(2, 2);
    want << 0, -1, 1, 0;
    CHECK((e - want).cwiseAbs().maxCoeff() == 0.0);

    CHECK((complex_to_real_embedding(ComplexMat::Identity(2, 2)) - RealMat::Identity(4, 4))
              .cwiseAbs()
              .maxCoeff() == 0.0);
}

TEST_CASE("real embedding is a ring homomorphism") {
    RngStream rng(2, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMat a = sample_cn(3, 3, rng);
        const ComplexMat b = sample_cn(3, 3, rng);
        const RealMat lhs = complex_to_real_embedding(a * b);
        const RealMat rhs = complex_to_real_embedding(a) * complex_to_real_embedding(b);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("adjoint is an exact involution") {
    RngStream rng(3, 0);
    const ComplexMat a = sample_cn(4, 2, rng);
    const ComplexMat back = a.adjoint().adjoint();
    CHECK((back - a).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stacking convention is [Re; Im]") {
    ComplexVec z(2);
    z << cxd(1.5, -2.5), cxd(0.25, 4.0);
    const RealVec x = stack_complex(z);
    CHECK(x[0] == 1.5);
    CHECK(x[1] == 0.25);
    CHECK(x[2] == -2.5);
    CHECK(x[3] == 4.0);
    CHECK((unstack_complex(x) - z).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("circular gaussian moments") {
    RngStream rng(7, 1);
    const int n = 100000;
    double power = 0.0, re_mean = 0.0, im_mean = 0.0, cross = 0.0, re_sq = 0.0, im_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const cxd x = rng.cn();
        power += std::norm(x);
        re_mean += x.real();
        im_mean += x.imag();
        cross += x.real() * x.imag();
        re_sq += x.real() * x.real();
        im_sq += x.imag() * x.imag();
    }
    power /= n;
    re_mean /= n;
    im_mean /= n;
    CHECK(power == doctest::Approx(1.0).epsilon(0.02));
    const double corr = (cross / n - re_mean * im_mean) /
                        std::sqrt((re_sq / n - re_mean * re_mean) * (im_sq / n - im_mean * im_mean));
    CHECK(std::abs(corr) < 0.02);
}

TEST_CASE("sample_cn determinism is byte-identical") {
    RngStream r1(42, 5), r2(42, 5);
    const ComplexMat a = sample_cn(6, 3, r1);
    const ComplexMat b = sample_cn(6, 3, r2);
    CHECK(std::memcmp(a.data(), b.data(), sizeof(cxd) * 18) == 0);
}

TEST_CASE("distinct stream ids give distinct sequences, substreams replay") {
    RngStream a(9, 0), b(9, 1);
    bool differs = false;
    for (int i = 0; i < 16; ++i) differs = differs || (a.next_u64() != b.next_u64());
    CHECK(differs);

    RngStream base(11, 2);
    RngStream s1 = base.substream(4);
    RngStream s2 = RngStream(11, 2).substream(4);
    for (int i = 0; i < 16; ++i) CHECK(s1.next_u64() == s2.next_u64());
}
