#pragma once

#include <vector>

#include "sfmkl/geometry.hpp"

namespace sfmkl {

    /// Combination weights over a sub-kernel bank, one entry per sub-kernel.
    using KernelWeights = Eigen::VectorXd;

    /// One directional sub-kernel: prior arrival direction eta (unit vector) and von Mises-Fisher
    /// concentration beta >= 0.
    struct SubKernelParam {
        Position3 eta = Position3::UnitX();
        double beta = 0.0;

        /// eta from azimuth phi and zenith theta (radians).
        [[nodiscard]] static SubKernelParam FromAngles(double azimuth, double zenith, double beta);

        [[nodiscard]] double azimuth() const;
        [[nodiscard]] double zenith() const;

        /// Throws InvalidInput unless |eta| = 1 (tol 1e-12) and beta is finite and non-negative.
        void validate() const;

        bool operator==(const SubKernelParam &other) const = default;
    };

    /// Normalising constant C(beta) = sinh(beta) / beta with C(0) = 1.
    [[nodiscard]] double VmfNormalizer(double beta);

    /// j0(sqrt(z_squared)) for complex argument; j0(z) = sin(z)/z is even, so no branch choice matters.
    [[nodiscard]] Complex SphericalJ0FromSquare(Complex z_squared);

    /// j0(z) = sin(z) / z with j0(0) = 1.
    [[nodiscard]] Complex SphericalJ0(Complex z);

    /// Closed-form directionally weighted kernel
    ///
    ///   kappa(r1, r2) = j0( sqrt( sum_i (j beta eta_i - k (r1 - r2)_i)^2 ) ) / C(beta).
    ///
    /// Equals 1 on the diagonal and j0(k |r1 - r2|) for beta = 0.
    [[nodiscard]] Complex KappaDirectional(
        const Position3 &r1,
        const Position3 &r2,
        const SubKernelParam &param,
        double wavenumber);

    /// Product-rule quadrature (Gauss-Legendre in cos(zenith) x uniform azimuth, 2*order azimuth
    /// nodes) of the plane-wave integral
    ///
    ///   int_{S2} w(x) exp(j k x.(r1 - r2)) dx,   w(x) = exp(beta eta.x) / (4 pi C(beta)).
    [[nodiscard]] Complex KappaQuadratureRule(
        const Position3 &r1,
        const Position3 &r2,
        const SubKernelParam &param,
        double wavenumber,
        int order);

    /// Order heuristic: grows with k|r1 - r2| + beta.
    [[nodiscard]] int RecommendedQuadratureOrder(double k_distance, double beta);

    /// Quadrature oracle for KappaDirectional. Evaluates the rule at `order` and 2*order and throws
    /// NumericalError when the two differ by more than `tolerance`.
    [[nodiscard]] Complex KappaQuadratureOracle(
        const Position3 &r1,
        const Position3 &r2,
        const SubKernelParam &param,
        double wavenumber,
        int order,
        double tolerance = 1e-9);

    /// Discretised family of sub-kernels sharing one wavenumber.
    class KernelBank {
    public:
        KernelBank(std::vector<SubKernelParam> params, double wavenumber);

        [[nodiscard]] std::size_t size() const { return params_.size(); }
        [[nodiscard]] const SubKernelParam &operator[](std::size_t d) const { return params_[d]; }
        [[nodiscard]] std::span<const SubKernelParam> params() const { return params_; }
        [[nodiscard]] double wavenumber() const { return wavenumber_; }

    private:
        std::vector<SubKernelParam> params_;
        double wavenumber_;
    };

    /// Layout of a bank grid. Index order is azimuth-major, then zenith, then beta.
    struct BankGrid {
        int azimuth_count = 10;
        std::vector<double> zeniths{kPi / 2.0};
        std::vector<double> betas{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    };

    /// Azimuths split [-pi, pi) evenly; zenith pi/2; betas 0, step, 2 step, ...
    [[nodiscard]] KernelBank DefaultBank(int d_eta, int d_beta, double wavenumber, double beta_step = 1.0);
    [[nodiscard]] KernelBank MakeBank(const BankGrid &grid, double wavenumber);

    /// Per-sub-kernel Gram matrices over one microphone array.
    class GramSet {
    public:
        GramSet(std::vector<ComplexMatrix> matrices, std::size_t mic_count);

        [[nodiscard]] std::size_t size() const { return matrices_.size(); }
        [[nodiscard]] Eigen::Index dim() const { return static_cast<Eigen::Index>(mic_count_); }
        [[nodiscard]] const ComplexMatrix &operator[](std::size_t d) const { return matrices_[d]; }

        /// Gram set restricted to the given sub-kernel indices, in that order.
        [[nodiscard]] GramSet subset(std::span<const std::size_t> indices) const;

    private:
        std::vector<ComplexMatrix> matrices_;
        std::size_t mic_count_;
    };

    /// K^(d)[i][j] = kappa_d(r_i, r_j). The upper triangle is evaluated and mirrored as conjugates.
    [[nodiscard]] GramSet BuildGramSet(const MicArray &mic_array, const KernelBank &bank);

    /// sum_d gamma_d K^(d). Throws InvalidInput on size mismatch or negative weights.
    [[nodiscard]] ComplexMatrix MixGram(const GramSet &grams, const KernelWeights &gamma);

}  // namespace sfmkl
