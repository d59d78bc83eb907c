#pragma once

#include <functional>
#include <vector>

#include "sfmkl/ridge.hpp"

namespace sfmkl {

    /// Options for the simplex-constrained (L1) reduced-gradient learner.
    struct L1Options {
        int max_outer_iters = 200;
        double j_rel_tol = 1e-6;  ///< stop when |J_old - J_new| / J_old falls below this
        double gamma_tol = 1e-9;  ///< stop when ||gamma_new - gamma_old||_1 falls below this
        int line_search_iters = 20;  ///< golden-section iterations on [0, rho_max]

        /// Called with every accepted gamma, including boundary points of the inner walk.
        std::function<void(const KernelWeights &)> on_iterate;

        void validate() const;
    };

    /// Options for the ball-constrained (L2) alternating learner.
    struct L2Options {
        int max_iters = 500;
        double sigma = 0.5;  ///< alpha <- sigma alpha + (1 - sigma) (K + lambda I)^{-1} s
        double gamma_rel_tol = 1e-6;

        std::function<void(const KernelWeights &)> on_iterate;

        void validate() const;
    };

    struct MklResult {
        KernelWeights gamma;
        /// Ridge coefficients for the returned gamma.
        ComplexVector alpha;
        /// Ridge objective at the initial weights and after every outer iteration.
        std::vector<double> j_history;
        int iterations = 0;
        bool converged = false;
        /// Set by the L2 learner when the data carry no energy (v = 0).
        bool degenerate = false;
    };

    /// Weights below this count as zero in sparsity statistics.
    inline constexpr double kGammaZero = 1e-8;

    /// Fraction of entries of gamma below kGammaZero.
    [[nodiscard]] double SparsityFraction(const KernelWeights &gamma);

    /// dJ/dgamma_d = -lambda Re(alpha^H K^(d) alpha), valid when alpha solves the ridge problem
    /// for the current mixed Gram matrix.
    [[nodiscard]] Eigen::VectorXd GradJ(const GramSet &grams, const ComplexVector &alpha, double lambda);

    /// Reduced-gradient descent direction on the simplex.
    ///
    /// For d != d_max the direction is the negative reduced gradient -(g_d - g_dmax), except that
    /// coordinates at zero with a positive reduced gradient stay fixed. The d_max entry balances the
    /// rest so that the direction sums to zero.
    [[nodiscard]] Eigen::VectorXd DescentDirection(const KernelWeights &gamma, const Eigen::VectorXd &grad, Eigen::Index d_max);

    /// Index of the largest weight, lowest index on ties.
    [[nodiscard]] Eigen::Index ArgMax(const KernelWeights &gamma);

    /// Minimise J(gamma) over the probability simplex by reduced-gradient descent with boundary
    /// steps and a golden-section line search, starting from uniform weights.
    [[nodiscard]] MklResult SolveL1(const GramSet &grams, const ComplexVector &s, double lambda, const L1Options &opts = {});

    /// Alternating updates gamma = v / ||v||_2 with v_d = Re(alpha^H K^(d) alpha) and damped
    /// ridge updates of alpha, starting from uniform weights.
    [[nodiscard]] MklResult SolveL2(const GramSet &grams, const ComplexVector &s, double lambda, const L2Options &opts = {});

}  // namespace sfmkl
