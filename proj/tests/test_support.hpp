#pragma once

// Random instance generators and brute-force oracles shared by the unit tests. Nothing here
// calls the solver code under test.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <utility>
#include <vector>

#include "sfmkl/kernels.hpp"

namespace sfmkl::test {

    using Rng = std::mt19937_64;

    inline double
    Uniform(Rng &rng, double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }

    inline Position3
    RandomUnit(Rng &rng) {
        std::normal_distribution<double> n(0.0, 1.0);
        Position3 v(n(rng), n(rng), n(rng));
        return v / v.norm();
    }

    inline Position3
    RandomInBall(Rng &rng, double radius) {
        return RandomUnit(rng) * radius * std::cbrt(Uniform(rng, 0.0, 1.0));
    }

    inline ComplexVector
    RandomComplex(Rng &rng, Eigen::Index n) {
        std::normal_distribution<double> g(0.0, 1.0);
        ComplexVector v(n);
        for (Eigen::Index i = 0; i < n; ++i) { v(i) = Complex(g(rng), g(rng)); }
        return v;
    }

    inline MicArray
    RandomMics(Rng &rng, std::size_t m, double radius) {
        std::vector<Position3> pos;
        for (std::size_t i = 0; i < m; ++i) { pos.push_back(RandomInBall(rng, radius)); }
        return MicArray(pos);
    }

    inline KernelBank
    RandomBank(Rng &rng, std::size_t d, double k, double beta_max = 9.0) {
        std::vector<SubKernelParam> params;
        for (std::size_t i = 0; i < d; ++i) { params.push_back({RandomUnit(rng), Uniform(rng, 0.0, beta_max)}); }
        return KernelBank(params, k);
    }

    /// sin(z)/z by its Taylor series, summed until the terms vanish. Only for moderate |z|.
    inline Complex
    J0Series(Complex z) {
        const Complex z2 = z * z;
        Complex term = 1.0;
        Complex sum = 1.0;
        for (int n = 1; n < 200; ++n) {
            term *= -z2 / (double((2 * n) * (2 * n + 1)));
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) { break; }
        }
        return sum;
    }

    /// Gauss-Jordan inverse with partial pivoting on plain nested vectors.
    inline ComplexMatrix
    EliminationInverse(const ComplexMatrix &a) {
        const std::size_t n = static_cast<std::size_t>(a.rows());
        std::vector<std::vector<Complex>> w(n, std::vector<Complex>(2 * n, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) { w[i][j] = a(i, j); }
            w[i][n + i] = 1.0;
        }
        for (std::size_t c = 0; c < n; ++c) {
            std::size_t piv = c;
            for (std::size_t r = c + 1; r < n; ++r) {
                if (std::abs(w[r][c]) > std::abs(w[piv][c])) { piv = r; }
            }
            std::swap(w[c], w[piv]);
            const Complex p = w[c][c];
            for (auto &x : w[c]) { x /= p; }
            for (std::size_t r = 0; r < n; ++r) {
                if (r == c) { continue; }
                const Complex f = w[r][c];
                for (std::size_t j = 0; j < 2 * n; ++j) { w[r][j] -= f * w[c][j]; }
            }
        }
        ComplexMatrix inv(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) { inv(i, j) = w[i][n + j]; }
        }
        return inv;
    }

    /// Sum of gamma_d K^(d) written out entry by entry.
    inline ComplexMatrix
    NaiveMix(const std::vector<ComplexMatrix> &k, const Eigen::VectorXd &gamma) {
        ComplexMatrix out = ComplexMatrix::Zero(k[0].rows(), k[0].cols());
        for (std::size_t d = 0; d < k.size(); ++d) {
            for (Eigen::Index i = 0; i < out.rows(); ++i) {
                for (Eigen::Index j = 0; j < out.cols(); ++j) { out(i, j) += gamma(d) * k[d](i, j); }
            }
        }
        return out;
    }

    /// min over alpha of ||K a - s||^2 + lambda a^H K a through the normal equations
    /// (K^H K + lambda K) a = K^H s, solved by elimination.
    inline double
    NormalEquationObjective(const ComplexMatrix &k, const ComplexVector &s, double lambda) {
        const ComplexMatrix lhs = k.adjoint() * k + lambda * k;
        const ComplexVector a = EliminationInverse(lhs) * (k.adjoint() * s);
        const ComplexVector r = k * a - s;
        return r.squaredNorm() + lambda * (a.adjoint() * k * a)(0, 0).real();
    }

    /// Same minimum with the closed-form ridge solution written independently.
    inline double
    RidgeObjectiveByInverse(const ComplexMatrix &k, const ComplexVector &s, double lambda) {
        const Eigen::Index m = k.rows();
        const ComplexMatrix shifted = k + lambda * ComplexMatrix::Identity(m, m);
        const ComplexVector a = EliminationInverse(shifted) * s;
        const ComplexVector r = k * a - s;
        return r.squaredNorm() + lambda * (a.adjoint() * k * a)(0, 0).real();
    }

    /// Number of integer triples with i^2 + j^2 + k^2 <= n^2.
    inline std::size_t
    LatticeCount(int n) {
        std::size_t count = 0;
        for (int i = -n; i <= n; ++i) {
            for (int j = -n; j <= n; ++j) {
                for (int k = -n; k <= n; ++k) {
                    if (i * i + j * j + k * k <= n * n) { ++count; }
                }
            }
        }
        return count;
    }

    /// Brute-force minimum of f over the 3-simplex: a grid at 1/n, then a 1/(100 n) grid in the
    /// neighbourhood of the best coarse point. Returns {coarse minimum, refined minimum}.
    template<typename F>
    std::pair<double, double>
    SimplexGridSearch(F &&f, int n) {
        auto at = [&](int i, int j, int den) {
            Eigen::VectorXd w(3);
            w << double(i) / den, double(j) / den, double(den - i - j) / den;
            return f(w);
        };
        double coarse = 1e300;
        int bi = 0;
        int bj = 0;
        for (int i = 0; i <= n; ++i) {
            for (int j = 0; i + j <= n; ++j) {
                const double v = at(i, j, n);
                if (v < coarse) {
                    coarse = v;
                    bi = i;
                    bj = j;
                }
            }
        }
        double fine = coarse;
        const int m = 100 * n;
        for (int i = 100 * bi - 100; i <= 100 * bi + 100; ++i) {
            for (int j = 100 * bj - 100; j <= 100 * bj + 100; ++j) {
                if (i < 0 || j < 0 || i + j > m) { continue; }
                fine = std::min(fine, at(i, j, m));
            }
        }
        return {coarse, fine};
    }

}  // namespace sfmkl::test
