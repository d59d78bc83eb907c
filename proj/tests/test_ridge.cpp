#include <doctest.h>

#include <cmath>

#include "sfmkl/error.hpp"
#include "sfmkl/ridge.hpp"
#include "test_support.hpp"

using namespace sfmkl;

namespace {

    ComplexMatrix
    RandomHpd(test::Rng &rng, Eigen::Index m) {
        ComplexMatrix a(m, m);
        for (Eigen::Index j = 0; j < m; ++j) { a.col(j) = test::RandomComplex(rng, m); }
        return a * a.adjoint() + 0.5 * ComplexMatrix::Identity(m, m);
    }

}  // namespace

TEST_CASE("solve alpha: identity and zero Gram") {
    test::Rng rng(1);
    const ComplexVector s = test::RandomComplex(rng, 5);
    CHECK((SolveAlpha(ComplexMatrix::Identity(5, 5), s, 1.0) - s / 2.0).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((SolveAlpha(ComplexMatrix::Zero(5, 5), s, 0.25) - s / 0.25).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("solve alpha against an elimination inverse") {
    test::Rng rng(2);
    for (int t = 0; t < 20; ++t) {
        const ComplexMatrix k = RandomHpd(rng, 6);
        const ComplexVector s = test::RandomComplex(rng, 6);
        const double lambda = test::Uniform(rng, 1e-3, 1.0);
        const ComplexVector expect = test::EliminationInverse(k + lambda * ComplexMatrix::Identity(6, 6)) * s;
        CHECK((SolveAlpha(k, s, lambda) - expect).norm() < 1e-9 * expect.norm());
    }
}

TEST_CASE("solve alpha residual on kernel Gram matrices") {
    test::Rng rng(3);
    for (int t = 0; t < 20; ++t) {
        const MicArray mics = test::RandomMics(rng, 12, 0.4);
        const GramSet g = BuildGramSet(mics, test::RandomBank(rng, 3, test::Uniform(rng, 2.0, 18.0)));
        const ComplexMatrix k = MixGram(g, KernelWeights::Constant(3, 1.0 / 3));
        const ComplexVector s = test::RandomComplex(rng, 12);
        const double lambda = std::pow(10.0, test::Uniform(rng, -3, 0));
        const ComplexVector a = SolveAlpha(k, s, lambda);
        CHECK(((k + lambda * ComplexMatrix::Identity(12, 12)) * a - s).norm() / s.norm() < 1e-10);
    }
}

TEST_CASE("solve alpha rejects bad input") {
    test::Rng rng(4);
    ComplexMatrix k = RandomHpd(rng, 4);
    const ComplexVector s = test::RandomComplex(rng, 4);
    CHECK_THROWS_AS((void)SolveAlpha(k, s, 0.0), InvalidInput);
    CHECK_THROWS_AS((void)SolveAlpha(k, test::RandomComplex(rng, 3), 0.1), InvalidInput);
    k(0, 1) += Complex(0.0, 1e-3);
    CHECK_THROWS_AS((void)SolveAlpha(k, s, 0.1), NumericalError);
    // indefinite beyond the shift
    const ComplexMatrix neg = -ComplexMatrix::Identity(4, 4);
    CHECK_THROWS_AS((void)SolveAlpha(neg, s, 0.5), NumericalError);
}

TEST_CASE("objective J for zero data") {
    test::Rng rng(5);
    const GramSet g = BuildGramSet(test::RandomMics(rng, 5, 0.4), test::RandomBank(rng, 2, 8.0));
    const ComplexVector zero = ComplexVector::Zero(5);
    CHECK(ObjectiveJ(g, KernelWeights::Constant(2, 0.5), zero, 0.1) == 0.0);
    const RidgeFit fit = FitRidge(MixGram(g, KernelWeights::Constant(2, 0.5)), zero, 0.1);
    CHECK(fit.alpha.isZero(0.0));
}

TEST_CASE("objective J equals the direct minimum on small problems") {
    test::Rng rng(6);
    for (int t = 0; t < 20; ++t) {
        const MicArray mics = test::RandomMics(rng, 3, 0.4);
        const GramSet g = BuildGramSet(mics, test::RandomBank(rng, 3, test::Uniform(rng, 3.0, 15.0)));
        KernelWeights w(3);
        for (int d = 0; d < 3; ++d) { w(d) = test::Uniform(rng, 0.1, 1.0); }
        w /= w.sum();
        const ComplexVector s = test::RandomComplex(rng, 3);
        const double lambda = test::Uniform(rng, 0.05, 1.0);
        const ComplexMatrix k = MixGram(g, w);
        const double j = ObjectiveJ(g, w, s, lambda);
        CHECK(std::abs(j - test::NormalEquationObjective(k, s, lambda)) < 1e-9 * std::max(1.0, j));
        CHECK(std::abs(j - test::RidgeObjectiveByInverse(k, s, lambda)) < 1e-9 * std::max(1.0, j));
    }
}

TEST_CASE("objective J grows with lambda and stays continuous") {
    test::Rng rng(7);
    const MicArray mics = test::RandomMics(rng, 8, 0.4);
    const GramSet g = BuildGramSet(mics, test::RandomBank(rng, 2, 10.0));
    const KernelWeights w = KernelWeights::Constant(2, 0.5);
    const ComplexVector s = test::RandomComplex(rng, 8);
    double prev = 0.0;
    double prev_lambda = 0.0;
    for (int e = -40; e <= 10; ++e) {
        const double lambda = std::pow(10.0, e / 10.0);
        const double j = ObjectiveJ(g, w, s, lambda);
        CHECK(std::isfinite(j));
        CHECK(j >= prev);
        if (prev_lambda > 0.0) {
            // J(lambda) = lambda s^H (K + lambda)^-1 s is concave with slope at most ||s||^2 / lambda
            CHECK((j - prev) / (lambda - prev_lambda) <= s.squaredNorm() / prev_lambda * (1 + 1e-9));
        }
        prev = j;
        prev_lambda = lambda;
    }
}

TEST_CASE("quadratic form is real for Hermitian Gram") {
    test::Rng rng(8);
    const MicArray mics = test::RandomMics(rng, 10, 0.4);
    const GramSet g = BuildGramSet(mics, test::RandomBank(rng, 4, 14.0));
    for (int t = 0; t < 10; ++t) {
        const ComplexVector a = test::RandomComplex(rng, 10);
        for (std::size_t d = 0; d < g.size(); ++d) {
            const Complex q = (a.adjoint() * g[d] * a)(0, 0);
            CHECK(std::abs(q.imag()) <= 1e-10 * std::abs(q));
        }
    }
}

TEST_CASE("estimate field: zero coefficients") {
    test::Rng rng(9);
    const MicArray mics = test::RandomMics(rng, 6, 0.4);
    const KernelBank bank = test::RandomBank(rng, 3, 9.0);
    const EstimatorState st(ComplexVector::Zero(6), mics, bank, KernelWeights::Constant(3, 1.0 / 3));
    for (int t = 0; t < 10; ++t) { CHECK(EstimateField(st, test::RandomInBall(rng, 0.4)) == Complex(0, 0)); }
}

TEST_CASE("estimate field: single mic, one-hot weights") {
    const MicArray mic({Position3(0.1, -0.2, 0.05)});
    const KernelBank bank({{Position3::UnitX(), 0.0}, {Position3::UnitY(), 4.0}}, 11.0);
    const EstimatorState st(ComplexVector::Ones(1), mic, bank, KernelWeights::Unit(2, 1));
    test::Rng rng(10);
    for (int t = 0; t < 10; ++t) {
        const Position3 r = test::RandomInBall(rng, 0.4);
        CHECK(std::abs(EstimateField(st, r) - KappaDirectional(r, mic[0], bank[1], 11.0)) < 1e-15);
    }
}

TEST_CASE("estimate field at the microphones equals K alpha") {
    test::Rng rng(11);
    const MicArray mics = test::RandomMics(rng, 10, 0.4);
    const KernelBank bank = test::RandomBank(rng, 4, 12.0);
    KernelWeights w(4);
    w << 0.1, 0.0, 0.6, 0.3;
    const ComplexVector a = test::RandomComplex(rng, 10);
    const ComplexVector ka = MixGram(BuildGramSet(mics, bank), w) * a;
    const EstimatorState st(a, mics, bank, w);
    const ComplexVector batch = EstimateField(st, mics.positions());
    for (std::size_t i = 0; i < mics.size(); ++i) {
        CHECK(std::abs(EstimateField(st, mics[i]) - ka(i)) < 1e-10);
        CHECK(std::abs(batch(i) - ka(i)) < 1e-10);
    }
}

TEST_CASE("near interpolation with tiny lambda") {
    const MicArray mics = SphericalLayerLayout(6, 0.4, PointSet::kFibonacci);
    const double k = 2 * kPi * 500.0 / 340.0;
    const KernelBank bank({{Position3::UnitX(), 0.0}}, k);
    const Scene scene({{Position3(2.5, 0, 0), 20.0}}, 340.0, Sphere{Position3::Zero(), 0.4});
    const ComplexVector s = Observe(scene, mics, 500.0).values;
    const GramSet g = BuildGramSet(mics, bank);
    const KernelWeights w = KernelWeights::Ones(1);
    const ComplexVector alpha = SolveAlpha(MixGram(g, w), s, 1e-10);
    const EstimatorState st(alpha, mics, bank, w);
    for (std::size_t i = 0; i < mics.size(); ++i) { CHECK(std::abs(EstimateField(st, mics[i]) - s(i)) <= 1e-3 * std::abs(s(i))); }
}
