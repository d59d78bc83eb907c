#include "sfmkl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "sfmkl/error.hpp"

namespace sfmkl {

    namespace {
        constexpr Complex kJ{0.0, 1.0};

        // Above this concentration sin(w) and C(beta) are combined in scaled form.
        constexpr double kScaledBeta = 20.0;

        struct GaussLegendre {
            std::vector<double> nodes;
            std::vector<double> weights;
        };

        // P_n(x) and P_n'(x) by the three-term recurrence.
        std::pair<double, double>
        Legendre(int n, double x) {
            double p0 = 1.0;
            double p1 = x;
            for (int l = 2; l <= n; ++l) {
                const double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
                p0 = p1;
                p1 = p2;
            }
            return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
        }

        GaussLegendre
        MakeGaussLegendre(int n) {
            GaussLegendre rule;
            rule.nodes.resize(n);
            rule.weights.resize(n);
            for (int i = 0; i < (n + 1) / 2; ++i) {
                double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
                for (int iter = 0; iter < 100; ++iter) {
                    const auto [p, dp] = Legendre(n, x);
                    const double dx = p / dp;
                    x -= dx;
                    if (std::abs(dx) < 1e-16) { break; }
                }
                const double dp = Legendre(n, x).second;
                rule.nodes[i] = -x;
                rule.nodes[n - 1 - i] = x;
                rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
            }
            return rule;
        }
    }  // namespace

    SubKernelParam
    SubKernelParam::FromAngles(double azimuth, double zenith, double beta) {
        return {Position3(std::sin(zenith) * std::cos(azimuth), std::sin(zenith) * std::sin(azimuth), std::cos(zenith)),
                beta};
    }

    double
    SubKernelParam::azimuth() const {
        return std::atan2(eta.y(), eta.x());
    }

    double
    SubKernelParam::zenith() const {
        return std::acos(std::clamp(eta.z(), -1.0, 1.0));
    }

    void
    SubKernelParam::validate() const {
        if (!eta.allFinite() || std::abs(eta.norm() - 1.0) > 1e-12) {
            throw InvalidInput("SubKernelParam: eta must be a unit vector");
        }
        if (!std::isfinite(beta) || beta < 0.0) { throw InvalidInput("SubKernelParam: beta must be finite and >= 0"); }
    }

    double
    VmfNormalizer(double beta) {
        if (beta < 1e-6) { return 1.0 + beta * beta / 6.0; }
        // e^b (1 - e^{-2b}) / (2b) stays finite until e^b itself overflows
        return std::exp(beta) * (-std::expm1(-2.0 * beta)) / (2.0 * beta);
    }

    Complex
    SphericalJ0FromSquare(Complex z_squared) {
        if (std::abs(z_squared) < 1e-8) {
            const Complex z2 = z_squared;
            return 1.0 - z2 / 6.0 + z2 * z2 / 120.0 - z2 * z2 * z2 / 5040.0;
        }
        const Complex w = std::sqrt(z_squared);
        return std::sin(w) / w;
    }

    Complex
    SphericalJ0(Complex z) {
        return SphericalJ0FromSquare(z * z);
    }

    Complex
    KappaDirectional(const Position3 &r1, const Position3 &r2, const SubKernelParam &param, double wavenumber) {
        const Position3 r12 = r1 - r2;
        Complex z_squared{0.0, 0.0};
        for (int i = 0; i < 3; ++i) {
            const Complex v = kJ * (param.beta * param.eta[i]) - wavenumber * r12[i];
            z_squared += v * v;
        }

        if (param.beta <= kScaledBeta || std::abs(z_squared) < 1e-8) {
            return SphericalJ0FromSquare(z_squared) / VmfNormalizer(param.beta);
        }

        Complex w = std::sqrt(z_squared);
        if (w.imag() < 0.0) { w = -w; }
        const double b = param.beta;
        const Complex scaled_sin = (std::exp(kJ * w - b) - std::exp(-kJ * w - b)) / (2.0 * kJ);
        return scaled_sin / w * (2.0 * b / (-std::expm1(-2.0 * b)));
    }

    Complex
    KappaQuadratureRule(
        const Position3 &r1,
        const Position3 &r2,
        const SubKernelParam &param,
        double wavenumber,
        int order) {
        if (order < 1) { throw InvalidInput("KappaQuadratureRule: order must be >= 1"); }
        const GaussLegendre gl = MakeGaussLegendre(order);
        const int n_azimuth = 2 * order;
        const Position3 r12 = r1 - r2;
        const double b = param.beta;
        // exp(b eta.x) / C(b) = exp(b (eta.x - 1)) * e^b / C(b), finite for any b
        const double scale = b < 1e-6 ? 1.0 / VmfNormalizer(b) : 2.0 * b / (-std::expm1(-2.0 * b));

        Complex sum{0.0, 0.0};
        for (int i = 0; i < order; ++i) {
            const double cos_t = gl.nodes[i];
            const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
            Complex ring{0.0, 0.0};
            for (int j = 0; j < n_azimuth; ++j) {
                const double phi = 2.0 * kPi * j / n_azimuth;
                const Position3 x(sin_t * std::cos(phi), sin_t * std::sin(phi), cos_t);
                const double weight = b < 1e-6 ? std::exp(b * param.eta.dot(x)) : std::exp(b * (param.eta.dot(x) - 1.0));
                ring += weight * std::polar(1.0, wavenumber * x.dot(r12));
            }
            sum += gl.weights[i] * ring;
        }
        // dx = d(cos) d(phi); the vMF density carries 1/(4 pi)
        return sum * (2.0 * kPi / n_azimuth) * scale / (4.0 * kPi);
    }

    int
    RecommendedQuadratureOrder(double k_distance, double beta) {
        return static_cast<int>(std::ceil(std::abs(k_distance) + beta)) + 16;
    }

    Complex
    KappaQuadratureOracle(
        const Position3 &r1,
        const Position3 &r2,
        const SubKernelParam &param,
        double wavenumber,
        int order,
        double tolerance) {
        const Complex coarse = KappaQuadratureRule(r1, r2, param, wavenumber, order);
        const Complex fine = KappaQuadratureRule(r1, r2, param, wavenumber, 2 * order);
        if (std::abs(fine - coarse) > tolerance) {
            throw NumericalError(
                "KappaQuadratureOracle: order " + std::to_string(order) + " not converged (|diff| = " +
                std::to_string(std::abs(fine - coarse)) + ")");
        }
        return fine;
    }

    KernelBank::KernelBank(std::vector<SubKernelParam> params, double wavenumber)
        : params_(std::move(params)),
          wavenumber_(wavenumber) {
        if (params_.empty()) { throw InvalidInput("KernelBank: at least one sub-kernel is required"); }
        if (!(wavenumber_ > 0.0) || !std::isfinite(wavenumber_)) {
            throw InvalidInput("KernelBank: wavenumber must be positive");
        }
        for (std::size_t d = 0; d < params_.size(); ++d) {
            params_[d].validate();
            for (std::size_t e = 0; e < d; ++e) {
                if ((params_[d].eta - params_[e].eta).norm() < 1e-12 && params_[d].beta == params_[e].beta) {
                    throw InvalidInput(
                        "KernelBank: sub-kernels " + std::to_string(e) + " and " + std::to_string(d) + " coincide");
                }
            }
        }
    }

    KernelBank
    MakeBank(const BankGrid &grid, double wavenumber) {
        if (grid.azimuth_count < 1 || grid.zeniths.empty() || grid.betas.empty()) {
            throw InvalidInput("MakeBank: the bank grid needs at least one azimuth, zenith and beta");
        }
        std::vector<SubKernelParam> params;
        params.reserve(grid.azimuth_count * grid.zeniths.size() * grid.betas.size());
        for (int a = 0; a < grid.azimuth_count; ++a) {
            const double azimuth = -kPi + 2.0 * kPi * a / grid.azimuth_count;
            for (double zenith : grid.zeniths) {
                for (double beta : grid.betas) { params.push_back(SubKernelParam::FromAngles(azimuth, zenith, beta)); }
            }
        }
        return KernelBank(std::move(params), wavenumber);
    }

    KernelBank
    DefaultBank(int d_eta, int d_beta, double wavenumber, double beta_step) {
        if (d_eta < 1 || d_beta < 1) { throw InvalidInput("DefaultBank: D_eta and D_beta must be >= 1"); }
        BankGrid grid;
        grid.azimuth_count = d_eta;
        grid.betas.resize(d_beta);
        for (int i = 0; i < d_beta; ++i) { grid.betas[i] = i * beta_step; }
        return MakeBank(grid, wavenumber);
    }

    GramSet::GramSet(std::vector<ComplexMatrix> matrices, std::size_t mic_count)
        : matrices_(std::move(matrices)),
          mic_count_(mic_count) {
        const auto m = static_cast<Eigen::Index>(mic_count_);
        for (const auto &k : matrices_) {
            if (k.rows() != m || k.cols() != m) { throw InvalidInput("GramSet: matrix size does not match mic count"); }
        }
    }

    GramSet
    GramSet::subset(std::span<const std::size_t> indices) const {
        std::vector<ComplexMatrix> picked;
        picked.reserve(indices.size());
        for (std::size_t d : indices) {
            if (d >= matrices_.size()) { throw InvalidInput("GramSet::subset: index out of range"); }
            picked.push_back(matrices_[d]);
        }
        return GramSet(std::move(picked), mic_count_);
    }

    GramSet
    BuildGramSet(const MicArray &mic_array, const KernelBank &bank) {
        const auto m = static_cast<Eigen::Index>(mic_array.size());
        std::vector<ComplexMatrix> matrices;
        matrices.reserve(bank.size());
        for (const auto &param : bank.params()) {
            ComplexMatrix k(m, m);
            for (Eigen::Index i = 0; i < m; ++i) {
                k(i, i) = KappaDirectional(mic_array[i], mic_array[i], param, bank.wavenumber());
                for (Eigen::Index j = i + 1; j < m; ++j) {
                    k(i, j) = KappaDirectional(mic_array[i], mic_array[j], param, bank.wavenumber());
                    k(j, i) = std::conj(k(i, j));
                }
            }
            matrices.push_back(std::move(k));
        }
        return GramSet(std::move(matrices), mic_array.size());
    }

    ComplexMatrix
    MixGram(const GramSet &grams, const KernelWeights &gamma) {
        if (static_cast<std::size_t>(gamma.size()) != grams.size()) {
            throw InvalidInput(
                "MixGram: " + std::to_string(gamma.size()) + " weights for " + std::to_string(grams.size()) +
                " sub-kernels");
        }
        ComplexMatrix k = ComplexMatrix::Zero(grams.dim(), grams.dim());
        for (std::size_t d = 0; d < grams.size(); ++d) {
            const double g = gamma[static_cast<Eigen::Index>(d)];
            if (!(g >= 0.0) || !std::isfinite(g)) { throw InvalidInput("MixGram: weights must be finite and >= 0"); }
            if (g != 0.0) { k.noalias() += g * grams[d]; }
        }
        return k;
    }

}  // namespace sfmkl
