#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "sfmkl/error.hpp"
#include "sfmkl/kernels.hpp"
#include "test_support.hpp"

using namespace sfmkl;

namespace {

    const double kK900 = 2.0 * kPi * 900.0 / 340.0;

}  // namespace

TEST_CASE("vMF normaliser") {
    CHECK(VmfNormalizer(0.0) == 1.0);
    CHECK(VmfNormalizer(1e-9) == doctest::Approx(1.0).epsilon(1e-15));
    for (double b : {0.5, 1.0, 5.0, 9.0}) { CHECK(VmfNormalizer(b) == doctest::Approx(std::sinh(b) / b).epsilon(1e-14)); }
    // large beta stays finite
    CHECK(std::isfinite(VmfNormalizer(600.0)));
    CHECK(std::isinf(VmfNormalizer(800.0)));
}

TEST_CASE("complex j0 against its series") {
    test::Rng rng(3);
    for (int t = 0; t < 200; ++t) {
        const Complex z(test::Uniform(rng, -4, 4), test::Uniform(rng, -4, 4));
        CHECK(std::abs(SphericalJ0(z) - test::J0Series(z)) < 1e-12 * std::max(1.0, std::abs(test::J0Series(z))));
    }
    CHECK(SphericalJ0(Complex(0, 0)) == Complex(1, 0));
    CHECK(std::abs(SphericalJ0(Complex(1e-9, 0)) - 1.0) < 1e-15);
    // j0(j beta) = sinh(beta) / beta
    for (double b : {1.0, 5.0, 9.0}) { CHECK(std::abs(SphericalJ0(Complex(0, b)) - std::sinh(b) / b) < 1e-12 * std::sinh(b) / b); }
}

TEST_CASE("j0 from the square is branch independent") {
    test::Rng rng(4);
    for (int t = 0; t < 100; ++t) {
        const Complex z(test::Uniform(rng, -20, 20), test::Uniform(rng, -9, 9));
        CHECK(std::abs(SphericalJ0(z) - SphericalJ0(-z)) <= 1e-12 * std::abs(SphericalJ0(z)) + 1e-15);
        CHECK(std::abs(SphericalJ0FromSquare(z * z) - SphericalJ0(z)) <= 1e-12 * std::max(1.0, std::abs(SphericalJ0(z))));
    }
}

TEST_CASE("kernel has unit diagonal") {
    test::Rng rng(5);
    for (int t = 0; t < 100; ++t) {
        const Position3 r = test::RandomInBall(rng, 0.5);
        const Position3 eta = test::RandomUnit(rng);
        for (int b = 0; b <= 9; ++b) {
            CHECK(std::abs(KappaDirectional(r, r, {eta, double(b)}, kK900) - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("beta = 0 reduces to j0(k d)") {
    test::Rng rng(6);
    for (int t = 0; t < 200; ++t) {
        const Position3 r1 = test::RandomInBall(rng, 0.5);
        const Position3 r2 = test::RandomInBall(rng, 0.5);
        const double kd = kK900 * (r1 - r2).norm();
        const Complex got = KappaDirectional(r1, r2, {test::RandomUnit(rng), 0.0}, kK900);
        CHECK(std::abs(got - std::sin(kd) / kd) < 1e-12);
    }
}

TEST_CASE("isotropic kernel at 900 Hz and 0.1 m") {
    const Complex v = KappaDirectional(Position3::Zero(), Position3(0.1, 0, 0), {Position3::UnitZ(), 0.0}, kK900);
    CHECK(std::abs(v - test::J0Series(kK900 * 0.1)) < 1e-14);
    CHECK(v.real() == doctest::Approx(0.598687172170923433).epsilon(1e-13));
    CHECK(std::abs(v.imag()) < 1e-15);
    CHECK(std::abs(v.real() - 0.5985) < 5e-4);
}

TEST_CASE("beta -> 0 continuity") {
    test::Rng rng(8);
    for (int t = 0; t < 100; ++t) {
        const Position3 r1 = test::RandomInBall(rng, 0.5);
        const Position3 r2 = test::RandomInBall(rng, 0.5);
        const Position3 eta = test::RandomUnit(rng);
        CHECK(std::abs(KappaDirectional(r1, r2, {eta, 1e-8}, kK900) - KappaDirectional(r1, r2, {eta, 0.0}, kK900)) < 1e-6);
    }
}

TEST_CASE("kernel is Hermitian in its arguments") {
    test::Rng rng(9);
    for (int t = 0; t < 300; ++t) {
        const Position3 r1 = test::RandomInBall(rng, 0.5);
        const Position3 r2 = test::RandomInBall(rng, 0.5);
        const SubKernelParam p{test::RandomUnit(rng), test::Uniform(rng, 0, 9)};
        CHECK(std::abs(KappaDirectional(r1, r2, p, kK900) - std::conj(KappaDirectional(r2, r1, p, kK900))) < 1e-12);
    }
}

TEST_CASE("quadrature oracle: trivial cases") {
    const Position3 r(0.1, 0.2, -0.1);
    CHECK(std::abs(KappaQuadratureOracle(r, r, {Position3::UnitX(), 0.0}, kK900, 8) - 1.0) < 1e-8);
    CHECK(std::abs(KappaQuadratureOracle(r, r, {Position3::UnitY(), 5.0}, kK900, 24) - 1.0) < 1e-8);
}

TEST_CASE("quadrature oracle matches the closed form") {
    test::Rng rng(10);
    for (int t = 0; t < 40; ++t) {
        const Position3 r1 = test::RandomInBall(rng, 0.6);
        const Position3 r2 = test::RandomInBall(rng, 0.6);
        const double k = test::Uniform(rng, 1.0, 18.0);
        const SubKernelParam p{test::RandomUnit(rng), test::Uniform(rng, 0, 9)};
        const int order = RecommendedQuadratureOrder(k * (r1 - r2).norm(), p.beta);
        const Complex quad = KappaQuadratureOracle(r1, r2, p, k, order);
        CHECK(std::abs(quad - KappaDirectional(r1, r2, p, k)) < 1e-6);
    }
}

TEST_CASE("quadrature oracle flags an under-resolved rule") {
    const SubKernelParam p{Position3::UnitX(), 9.0};
    CHECK_THROWS_AS((void)KappaQuadratureOracle(Position3::Zero(), Position3(1.0, 0.5, 0), p, 18.0, 3), NumericalError);
}

TEST_CASE("sub-kernel parameters") {
    const auto p = SubKernelParam::FromAngles(kPi / 2, kPi / 2, 3.0);
    CHECK((p.eta - Position3::UnitY()).norm() < 1e-15);
    CHECK(p.azimuth() == doctest::Approx(kPi / 2));
    CHECK(p.zenith() == doctest::Approx(kPi / 2));
    CHECK_THROWS_AS((SubKernelParam{Position3(1, 1, 0), 1.0}.validate()), InvalidInput);
    CHECK_THROWS_AS((SubKernelParam{Position3::UnitX(), -1.0}.validate()), InvalidInput);
    CHECK_THROWS_AS(KernelBank({{Position3::UnitX(), 1.0}, {Position3::UnitX(), 1.0}}, 1.0), InvalidInput);
    CHECK_THROWS_AS(KernelBank({}, 1.0), InvalidInput);
    CHECK_THROWS_AS(KernelBank({{Position3::UnitX(), 1.0}}, 0.0), InvalidInput);
}

TEST_CASE("default bank layout") {
    const KernelBank bank = DefaultBank(10, 10, kK900);
    REQUIRE(bank.size() == 100);
    for (int a = 0; a < 10; ++a) {
        for (int b = 0; b < 10; ++b) {
            const auto &p = bank[a * 10 + b];
            CHECK(p.beta == double(b));
            CHECK(p.zenith() == doctest::Approx(kPi / 2));
            CHECK(std::abs(p.eta.z()) < 1e-15);
        }
    }
    // neighbouring azimuths are pi/5 apart
    for (int a = 0; a + 1 < 10; ++a) {
        const double dot = bank[a * 10].eta.dot(bank[(a + 1) * 10].eta);
        CHECK(std::acos(std::clamp(dot, -1.0, 1.0)) == doctest::Approx(kPi / 5).epsilon(1e-12));
    }

    const KernelBank one = DefaultBank(1, 1, kK900);
    REQUIRE(one.size() == 1);
    CHECK(one[0].beta == 0.0);

    const KernelBank four = DefaultBank(4, 1, kK900);
    const double expect[4] = {-kPi, -kPi / 2, 0.0, kPi / 2};
    for (int a = 0; a < 4; ++a) {
        const Position3 e(std::cos(expect[a]), std::sin(expect[a]), 0.0);
        CHECK((four[a].eta - e).norm() < 1e-15);
    }
}

TEST_CASE("gram set: single mic") {
    const MicArray one({Position3(0.1, 0, 0)});
    const GramSet g = BuildGramSet(one, DefaultBank(3, 3, kK900));
    REQUIRE(g.size() == 9);
    for (std::size_t d = 0; d < g.size(); ++d) {
        REQUIRE(g[d].rows() == 1);
        CHECK(std::abs(g[d](0, 0) - 1.0) < 1e-12);
    }
}

TEST_CASE("gram set entries match the kernel and are Hermitian") {
    test::Rng rng(11);
    const MicArray mics = test::RandomMics(rng, 9, 0.4);
    const KernelBank bank = test::RandomBank(rng, 6, 12.0);
    const GramSet g = BuildGramSet(mics, bank);
    for (std::size_t d = 0; d < g.size(); ++d) {
        for (std::size_t i = 0; i < mics.size(); ++i) {
            for (std::size_t j = 0; j < mics.size(); ++j) {
                CHECK(std::abs(g[d](i, j) - std::conj(g[d](j, i))) < 1e-12);
                CHECK(std::abs(g[d](i, j) - KappaDirectional(mics[i], mics[j], bank[d], 12.0)) < 1e-12);
            }
        }
    }
}

TEST_CASE("gram matrices of the two-layer array are PSD") {
    const MicArray mics = SphericalLayerLayout(25, 0.40, PointSet::kTDesign).concat(SphericalLayerLayout(25, 0.45, PointSet::kTDesign));
    for (double f : {100.0, 900.0}) {
        const GramSet g = BuildGramSet(mics, DefaultBank(10, 10, 2 * kPi * f / 340.0));
        REQUIRE(g.size() == 100);
        for (std::size_t d = 0; d < g.size(); ++d) {
            const ComplexMatrix &k = g[d];
            CHECK((k - k.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
            CHECK((k.diagonal().array() - 1.0).abs().maxCoeff() < 1e-10);
            Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(k, Eigen::EigenvaluesOnly);
            CHECK(es.eigenvalues().minCoeff() >= -1e-8 * 50);
        }
    }
}

TEST_CASE("mixing gram matrices") {
    test::Rng rng(12);
    const MicArray mics = test::RandomMics(rng, 7, 0.4);
    const GramSet g = BuildGramSet(mics, test::RandomBank(rng, 5, 10.0));
    std::vector<ComplexMatrix> raw;
    for (std::size_t d = 0; d < g.size(); ++d) { raw.push_back(g[d]); }

    for (Eigen::Index d = 0; d < 5; ++d) {
        KernelWeights e = KernelWeights::Zero(5);
        e(d) = 1.0;
        CHECK(MixGram(g, e) == g[d]);
    }
    const KernelWeights uni = KernelWeights::Constant(5, 0.2);
    CHECK((MixGram(g, uni) - test::NaiveMix(raw, uni)).cwiseAbs().maxCoeff() < 1e-14);

    for (int t = 0; t < 20; ++t) {
        KernelWeights w(5);
        for (int d = 0; d < 5; ++d) { w(d) = test::Uniform(rng, 0, 1); }
        w /= w.sum();
        const ComplexMatrix k = MixGram(g, w);
        CHECK((k.diagonal().array() - 1.0).abs().maxCoeff() < 1e-12);
        CHECK((k - test::NaiveMix(raw, w)).cwiseAbs().maxCoeff() < 1e-13);
    }
    CHECK_THROWS_AS((void)MixGram(g, KernelWeights::Constant(4, 0.25)), InvalidInput);
    KernelWeights neg = uni;
    neg(0) = -0.1;
    CHECK_THROWS_AS((void)MixGram(g, neg), InvalidInput);
}

TEST_CASE("gram subset keeps the requested order") {
    test::Rng rng(13);
    const GramSet g = BuildGramSet(test::RandomMics(rng, 4, 0.4), test::RandomBank(rng, 4, 10.0));
    const std::vector<std::size_t> idx{3, 1};
    const GramSet s = g.subset(idx);
    REQUIRE(s.size() == 2);
    CHECK(s[0] == g[3]);
    CHECK(s[1] == g[1]);
}
