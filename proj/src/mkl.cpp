#include "sfmkl/mkl.hpp"

#include <cmath>
#include <limits>

#include "sfmkl/error.hpp"

namespace sfmkl {

    namespace {
        // Clamps round-off negatives and restores sum(gamma) = 1.
        void
        ProjectToSimplex(KernelWeights &gamma) {
            gamma = gamma.cwiseMax(0.0);
            const double total = gamma.sum();
            if (!(total > 0.0)) { throw NumericalError("MKL: weights left the simplex"); }
            gamma /= total;
        }

        struct Evaluation {
            double j = 0.0;
            ComplexVector alpha;
        };

        Evaluation
        Evaluate(const GramSet &grams, const KernelWeights &gamma, const ComplexVector &s, double lambda) {
            RidgeFit fit = FitRidge(MixGram(grams, gamma), s, lambda);
            if (!std::isfinite(fit.objective)) { throw NumericalError("MKL: objective is not finite"); }
            return {fit.objective, std::move(fit.alpha)};
        }

        void
        Notify(const std::function<void(const KernelWeights &)> &cb, const KernelWeights &gamma) {
            if (cb) { cb(gamma); }
        }

        // Largest step along delta that keeps gamma >= 0, and the coordinate that hits zero first.
        std::pair<double, Eigen::Index>
        MaxStep(const KernelWeights &gamma, const Eigen::VectorXd &delta) {
            double rho_max = std::numeric_limits<double>::infinity();
            Eigen::Index nu = -1;
            for (Eigen::Index d = 0; d < delta.size(); ++d) {
                if (delta[d] < 0.0) {
                    const double rho = -gamma[d] / delta[d];
                    if (rho < rho_max) {
                        rho_max = rho;
                        nu = d;
                    }
                }
            }
            return {rho_max, nu};
        }

        // Golden-section search for the minimiser of f on [lo, hi].
        template<typename F>
        double
        GoldenSection(F &&f, double lo, double hi, int iters) {
            const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
            double a = lo;
            double b = hi;
            double c = b - ratio * (b - a);
            double d = a + ratio * (b - a);
            double fc = f(c);
            double fd = f(d);
            for (int i = 0; i < iters; ++i) {
                if (fc < fd) {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - ratio * (b - a);
                    fc = f(c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + ratio * (b - a);
                    fd = f(d);
                }
            }
            return fc < fd ? c : d;
        }
    }  // namespace

    void
    L1Options::validate() const {
        if (max_outer_iters < 1 || !(j_rel_tol > 0.0) || !(gamma_tol > 0.0) || line_search_iters < 1) {
            throw InvalidInput("L1Options: all options must be positive");
        }
    }

    void
    L2Options::validate() const {
        if (max_iters < 1 || !(gamma_rel_tol > 0.0)) { throw InvalidInput("L2Options: all options must be positive"); }
        if (!(sigma > 0.0 && sigma < 1.0)) { throw InvalidInput("L2Options: sigma must lie in (0, 1)"); }
    }

    double
    SparsityFraction(const KernelWeights &gamma) {
        if (gamma.size() == 0) { return 0.0; }
        return static_cast<double>((gamma.array() < kGammaZero).count()) / static_cast<double>(gamma.size());
    }

    Eigen::VectorXd
    GradJ(const GramSet &grams, const ComplexVector &alpha, double lambda) {
        Eigen::VectorXd grad(static_cast<Eigen::Index>(grams.size()));
        for (std::size_t d = 0; d < grams.size(); ++d) {
            grad[static_cast<Eigen::Index>(d)] = -lambda * alpha.dot(grams[d] * alpha).real();
        }
        return grad;
    }

    Eigen::Index
    ArgMax(const KernelWeights &gamma) {
        Eigen::Index best = 0;
        for (Eigen::Index d = 1; d < gamma.size(); ++d) {
            if (gamma[d] > gamma[best]) { best = d; }
        }
        return best;
    }

    Eigen::VectorXd
    DescentDirection(const KernelWeights &gamma, const Eigen::VectorXd &grad, Eigen::Index d_max) {
        if (gamma.size() != grad.size() || d_max < 0 || d_max >= gamma.size()) {
            throw InvalidInput("DescentDirection: dimension mismatch");
        }
        Eigen::VectorXd delta = Eigen::VectorXd::Zero(gamma.size());
        double balance = 0.0;
        for (Eigen::Index d = 0; d < gamma.size(); ++d) {
            if (d == d_max) { continue; }
            const double reduced = grad[d] - grad[d_max];
            if (gamma[d] <= 0.0 && reduced > 0.0) { continue; }
            delta[d] = -reduced;
            balance += reduced;
        }
        delta[d_max] = balance;
        return delta;
    }

    MklResult
    SolveL1(const GramSet &grams, const ComplexVector &s, double lambda, const L1Options &opts) {
        opts.validate();
        const auto n_kernels = static_cast<Eigen::Index>(grams.size());
        if (n_kernels < 1) { throw InvalidInput("SolveL1: empty kernel bank"); }

        MklResult result;
        KernelWeights gamma = KernelWeights::Constant(n_kernels, 1.0 / static_cast<double>(n_kernels));
        Evaluation current = Evaluate(grams, gamma, s, lambda);
        result.j_history.push_back(current.j);
        Notify(opts.on_iterate, gamma);

        auto j_at = [&](const KernelWeights &g) { return Evaluate(grams, g, s, lambda).j; };

        for (int iter = 0; iter < opts.max_outer_iters; ++iter) {
            result.iterations = iter + 1;
            const double j_start = current.j;
            const KernelWeights gamma_start = gamma;

            const Eigen::VectorXd grad = GradJ(grams, current.alpha, lambda);
            Eigen::VectorXd delta = DescentDirection(gamma, grad, ArgMax(gamma));
            if (delta.cwiseAbs().maxCoeff() == 0.0) {
                result.converged = true;
                break;
            }

            // Walk to the boundary of the simplex while that keeps lowering J; every boundary hit
            // zeroes one coordinate and hands its share of the direction to the largest weight.
            KernelWeights gamma_bar = gamma;
            Eigen::VectorXd delta_bar = delta;
            double j_bar = -std::numeric_limits<double>::infinity();
            double j_cur = current.j;
            bool first = true;
            for (Eigen::Index guard = 0; guard <= n_kernels; ++guard) {
                if (!first) {
                    if (!(j_bar < j_cur)) { break; }
                    j_cur = j_bar;
                    Notify(opts.on_iterate, gamma_bar);
                }
                first = false;
                gamma = gamma_bar;
                delta = delta_bar;

                const auto [rho_max, nu] = MaxStep(gamma, delta);
                if (nu < 0) { break; }
                gamma_bar = gamma + rho_max * delta;
                gamma_bar[nu] = 0.0;
                ProjectToSimplex(gamma_bar);
                const Eigen::Index d_max = ArgMax(gamma_bar);
                // d_max absorbs delta[nu]; written as the exact balance so a walk that ends on a
                // vertex stops instead of chasing round-off
                delta_bar = delta;
                delta_bar[nu] = 0.0;
                delta_bar[d_max] = 0.0;
                delta_bar[d_max] = -delta_bar.sum();
                j_bar = j_at(gamma_bar);
            }

            // Line search on the last segment.
            const auto [rho_max, nu] = MaxStep(gamma, delta);
            KernelWeights gamma_new = gamma;
            if (nu >= 0 && rho_max > 0.0) {
                auto along = [&](double rho) {
                    KernelWeights g = gamma + rho * delta;
                    ProjectToSimplex(g);
                    return g;
                };
                const double rho =
                    GoldenSection([&](double r) { return j_at(along(r)); }, 0.0, rho_max, opts.line_search_iters);
                gamma_new = along(rho);
            }
            Evaluation next = Evaluate(grams, gamma_new, s, lambda);
            if (!(next.j <= j_cur)) {
                gamma_new = gamma;
                next = Evaluate(grams, gamma_new, s, lambda);
            }

            gamma = std::move(gamma_new);
            current = std::move(next);
            result.j_history.push_back(current.j);
            Notify(opts.on_iterate, gamma);

            const double j_change = std::abs(j_start - current.j);
            const double j_scale = std::abs(j_start);
            if ((j_scale > 0.0 ? j_change / j_scale : j_change) < opts.j_rel_tol ||
                (gamma - gamma_start).lpNorm<1>() < opts.gamma_tol) {
                result.converged = true;
                break;
            }
        }

        result.gamma = std::move(gamma);
        result.alpha = std::move(current.alpha);
        return result;
    }

    MklResult
    SolveL2(const GramSet &grams, const ComplexVector &s, double lambda, const L2Options &opts) {
        opts.validate();
        const auto n_kernels = static_cast<Eigen::Index>(grams.size());
        if (n_kernels < 1) { throw InvalidInput("SolveL2: empty kernel bank"); }

        MklResult result;
        KernelWeights gamma = KernelWeights::Constant(n_kernels, 1.0 / static_cast<double>(n_kernels));
        ComplexMatrix k = MixGram(grams, gamma);
        ComplexVector alpha = SolveAlpha(k, s, lambda);
        result.j_history.push_back(FitRidge(k, s, lambda).objective);

        for (int iter = 0; iter < opts.max_iters; ++iter) {
            result.iterations = iter + 1;
            Eigen::VectorXd v(n_kernels);
            for (Eigen::Index d = 0; d < n_kernels; ++d) {
                v[d] = std::max(0.0, alpha.dot(grams[static_cast<std::size_t>(d)] * alpha).real());
            }
            const double v_norm = v.norm();
            if (!(v_norm > 0.0)) {
                result.degenerate = true;
                gamma = KernelWeights::Constant(n_kernels, 1.0 / std::sqrt(static_cast<double>(n_kernels)));
                break;
            }

            KernelWeights gamma_new = v / v_norm;
            k = MixGram(grams, gamma_new);
            alpha = opts.sigma * alpha + (1.0 - opts.sigma) * SolveAlpha(k, s, lambda);

            const double change = (gamma_new - gamma).norm() / gamma_new.norm();
            gamma = std::move(gamma_new);
            Notify(opts.on_iterate, gamma);
            const double j = FitRidge(k, s, lambda).objective;
            if (!std::isfinite(j)) { throw NumericalError("SolveL2: objective is not finite"); }
            result.j_history.push_back(j);
            if (change < opts.gamma_rel_tol) {
                result.converged = true;
                break;
            }
        }

        result.alpha = SolveAlpha(MixGram(grams, gamma), s, lambda);
        result.gamma = std::move(gamma);
        return result;
    }

}  // namespace sfmkl
