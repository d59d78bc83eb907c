#pragma once

#include <span>
#include <vector>

#include "sfmkl/kernels.hpp"

namespace sfmkl {

    struct RidgeConfig {
        /// Regularisation weight on the squared RKHS norm. The Gram matrices have unit diagonal,
        /// so this is relative to trace(K) / M.
        double lambda = 0.1;

        void validate() const;
    };

    /// Coefficients of the representer solution and the attained ridge objective.
    struct RidgeFit {
        ComplexVector alpha;
        double objective = 0.0;
    };

    /// alpha = (K + lambda I)^{-1} s through a Cholesky factorisation of the Hermitian positive definite
    /// system. Throws NumericalError when K is not Hermitian or K + lambda I cannot be factorised, and
    /// when the relative residual stays above 1e-10.
    [[nodiscard]] ComplexVector SolveAlpha(const ComplexMatrix &k, const ComplexVector &s, double lambda);

    /// ||K alpha - s||^2 + lambda Re(alpha^H K alpha) at the ridge solution alpha.
    [[nodiscard]] RidgeFit FitRidge(const ComplexMatrix &k, const ComplexVector &s, double lambda);

    /// Ridge objective J(gamma) for the mixed Gram matrix sum_d gamma_d K^(d).
    [[nodiscard]] double ObjectiveJ(const GramSet &grams, const KernelWeights &gamma, const ComplexVector &s, double lambda);

    /// Everything needed to evaluate the reconstructed field anywhere in the region.
    class EstimatorState {
    public:
        EstimatorState(ComplexVector alpha, MicArray mic_array, KernelBank bank, KernelWeights gamma);

        [[nodiscard]] const ComplexVector &alpha() const { return alpha_; }
        [[nodiscard]] const MicArray &mic_array() const { return mic_array_; }
        [[nodiscard]] const KernelBank &bank() const { return bank_; }
        [[nodiscard]] const KernelWeights &gamma() const { return gamma_; }

    private:
        ComplexVector alpha_;
        MicArray mic_array_;
        KernelBank bank_;
        KernelWeights gamma_;
    };

    /// u(r) = sum_m alpha_m sum_d gamma_d kappa_d(r, r_m). No check that r lies inside the region.
    [[nodiscard]] Complex EstimateField(const EstimatorState &state, const Position3 &r);

    /// EstimateField over many points; sub-kernels with zero weight are skipped.
    [[nodiscard]] ComplexVector EstimateField(const EstimatorState &state, std::span<const Position3> points);

}  // namespace sfmkl
