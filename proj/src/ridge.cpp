#include "sfmkl/ridge.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "sfmkl/error.hpp"

namespace sfmkl {

    namespace {
        constexpr double kResidualTol = 1e-10;
        constexpr double kHermitianTol = 1e-10;

        double
        RelativeResidual(const ComplexMatrix &a, const ComplexVector &x, const ComplexVector &s) {
            const double s_norm = s.norm();
            const double r = (a * x - s).norm();
            return s_norm > 0.0 ? r / s_norm : r;
        }
    }  // namespace

    void
    RidgeConfig::validate() const {
        if (!(lambda > 0.0) || !std::isfinite(lambda)) { throw InvalidInput("RidgeConfig: lambda must be > 0 and finite"); }
    }

    ComplexVector
    SolveAlpha(const ComplexMatrix &k, const ComplexVector &s, double lambda) {
        if (!(lambda > 0.0) || !std::isfinite(lambda)) { throw InvalidInput("SolveAlpha: lambda must be > 0"); }
        if (k.rows() != k.cols() || k.rows() != s.size()) { throw InvalidInput("SolveAlpha: dimension mismatch"); }
        const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
        if ((k - k.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol * scale) {
            throw NumericalError("SolveAlpha: Gram matrix is not Hermitian");
        }

        ComplexMatrix a = k;
        a.diagonal().array() += lambda;
        const Eigen::LLT<ComplexMatrix> llt(a);
        if (llt.info() != Eigen::Success) {
            throw NumericalError("SolveAlpha: K + lambda I is not positive definite (indefinite Gram matrix?)");
        }
        ComplexVector x = llt.solve(s);
        if (RelativeResidual(a, x, s) >= kResidualTol) {
            // one step of iterative refinement
            x += llt.solve(s - a * x);
            if (const double res = RelativeResidual(a, x, s); !(res < kResidualTol)) {
                throw NumericalError("SolveAlpha: relative residual " + std::to_string(res) + " above tolerance");
            }
        }
        return x;
    }

    RidgeFit
    FitRidge(const ComplexMatrix &k, const ComplexVector &s, double lambda) {
        RidgeFit fit;
        fit.alpha = SolveAlpha(k, s, lambda);
        const ComplexVector k_alpha = k * fit.alpha;
        fit.objective = (k_alpha - s).squaredNorm() + lambda * fit.alpha.dot(k_alpha).real();
        return fit;
    }

    double
    ObjectiveJ(const GramSet &grams, const KernelWeights &gamma, const ComplexVector &s, double lambda) {
        return FitRidge(MixGram(grams, gamma), s, lambda).objective;
    }

    EstimatorState::EstimatorState(ComplexVector alpha, MicArray mic_array, KernelBank bank, KernelWeights gamma)
        : alpha_(std::move(alpha)),
          mic_array_(std::move(mic_array)),
          bank_(std::move(bank)),
          gamma_(std::move(gamma)) {
        if (static_cast<std::size_t>(alpha_.size()) != mic_array_.size()) {
            throw InvalidInput("EstimatorState: alpha length differs from the number of microphones");
        }
        if (static_cast<std::size_t>(gamma_.size()) != bank_.size()) {
            throw InvalidInput("EstimatorState: gamma length differs from the bank size");
        }
        if (!gamma_.allFinite() || (gamma_.array() < 0.0).any()) {
            throw InvalidInput("EstimatorState: gamma must be finite and >= 0");
        }
    }

    Complex
    EstimateField(const EstimatorState &state, const Position3 &r) {
        return EstimateField(state, std::span<const Position3>(&r, 1))[0];
    }

    ComplexVector
    EstimateField(const EstimatorState &state, std::span<const Position3> points) {
        const auto &mics = state.mic_array();
        const auto &bank = state.bank();
        const auto &gamma = state.gamma();
        const auto &alpha = state.alpha();
        ComplexVector u = ComplexVector::Zero(static_cast<Eigen::Index>(points.size()));
        for (std::size_t p = 0; p < points.size(); ++p) {
            Complex acc{0.0, 0.0};
            for (std::size_t d = 0; d < bank.size(); ++d) {
                const double g = gamma[static_cast<Eigen::Index>(d)];
                if (g == 0.0) { continue; }
                Complex row{0.0, 0.0};
                for (std::size_t m = 0; m < mics.size(); ++m) {
                    row += alpha[static_cast<Eigen::Index>(m)] * KappaDirectional(points[p], mics[m], bank[d], bank.wavenumber());
                }
                acc += g * row;
            }
            u[static_cast<Eigen::Index>(p)] = acc;
        }
        return u;
    }

}  // namespace sfmkl
