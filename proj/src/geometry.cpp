#include "sfmkl/geometry.hpp"

#include <cmath>
#include <iostream>
#include <random>

#include "sfmkl/error.hpp"

namespace sfmkl {

    MicArray::MicArray(std::vector<Position3> positions)
        : positions_(std::move(positions)) {
        if (positions_.empty()) { throw InvalidInput("MicArray: at least one microphone is required"); }
        for (std::size_t i = 0; i < positions_.size(); ++i) {
            if (!positions_[i].allFinite()) {
                throw InvalidInput("MicArray: position " + std::to_string(i) + " is not finite");
            }
            for (std::size_t j = 0; j < i; ++j) {
                if ((positions_[i] - positions_[j]).norm() <= 0.0) {
                    throw InvalidInput(
                        "MicArray: positions " + std::to_string(j) + " and " + std::to_string(i) + " coincide");
                }
            }
        }
    }

    MicArray
    MicArray::concat(const MicArray &other) const {
        std::vector<Position3> all = positions_;
        all.insert(all.end(), other.positions_.begin(), other.positions_.end());
        return MicArray(std::move(all));
    }

    Scene::Scene(std::vector<PointSource> sources, double speed_of_sound, Sphere target_region)
        : sources_(std::move(sources)),
          speed_of_sound_(speed_of_sound),
          region_(std::move(target_region)) {
        if (!(speed_of_sound_ > 0.0) || !std::isfinite(speed_of_sound_)) {
            throw InvalidInput("Scene: speed of sound must be positive and finite");
        }
        if (!(region_.radius > 0.0) || !region_.center.allFinite()) {
            throw InvalidInput("Scene: target region needs a finite center and a positive radius");
        }
        for (std::size_t i = 0; i < sources_.size(); ++i) {
            const auto &src = sources_[i];
            if (!src.position.allFinite() || !std::isfinite(src.amplitude.real()) ||
                !std::isfinite(src.amplitude.imag())) {
                throw InvalidInput("Scene: source " + std::to_string(i) + " is not finite");
            }
            if ((src.position - region_.center).norm() <= region_.radius) {
                throw InvalidInput("Scene: source " + std::to_string(i) + " lies inside the target region");
            }
        }
    }

    double
    Scene::wavenumber(double frequency_hz) const {
        return 2.0 * kPi * frequency_hz / speed_of_sound_;
    }

    PointSet
    ParsePointSet(std::string_view name) {
        if (name == "t-design" || name == "tdesign") { return PointSet::kTDesign; }
        if (name == "fibonacci") { return PointSet::kFibonacci; }
        if (name == "auto") { return PointSet::kAuto; }
        throw InvalidInput("unknown point set '" + std::string(name) + "'");
    }

    std::string_view
    ToString(PointSet set) {
        switch (set) {
            case PointSet::kTDesign:
                return "t-design";
            case PointSet::kFibonacci:
                return "fibonacci";
            case PointSet::kAuto:
                return "auto";
        }
        return "unknown";
    }

    std::vector<Position3>
    FibonacciSphere(std::size_t n_points) {
        std::vector<Position3> pts;
        pts.reserve(n_points);
        const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
        for (std::size_t i = 0; i < n_points; ++i) {
            const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(n_points);
            const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden_angle * static_cast<double>(i);
            pts.emplace_back(rho * std::cos(phi), rho * std::sin(phi), z);
        }
        return pts;
    }

    MicArray
    SphericalLayerLayout(std::size_t n_points, double radius, PointSet point_set) {
        if (n_points < 1) { throw InvalidInput("SphericalLayerLayout: n_points must be >= 1"); }
        if (!(radius > 0.0) || !std::isfinite(radius)) {
            throw InvalidInput("SphericalLayerLayout: radius must be positive");
        }

        std::vector<Position3> unit;
        const auto design = TDesign25();
        switch (point_set) {
            case PointSet::kTDesign:
                if (n_points != design.size()) {
                    throw InvalidInput(
                        "SphericalLayerLayout: no embedded t-design with " + std::to_string(n_points) + " points");
                }
                unit.assign(design.begin(), design.end());
                break;
            case PointSet::kAuto:
                if (n_points == design.size()) {
                    unit.assign(design.begin(), design.end());
                } else {
                    std::cerr << "warning: no embedded t-design with " << n_points
                              << " points, using a Fibonacci sphere\n";
                    unit = FibonacciSphere(n_points);
                }
                break;
            case PointSet::kFibonacci:
                unit = FibonacciSphere(n_points);
                break;
        }

        for (auto &p : unit) { p = radius * p.normalized(); }
        return MicArray(std::move(unit));
    }

    Complex
    GreensField(const Scene &scene, const Position3 &r, double frequency_hz) {
        if (!(frequency_hz > 0.0)) { throw InvalidInput("GreensField: frequency must be positive"); }
        const double k = scene.wavenumber(frequency_hz);
        Complex u{0.0, 0.0};
        for (const auto &src : scene.sources()) {
            const double d = (r - src.position).norm();
            if (d <= 0.0) { throw InvalidInput("GreensField: evaluation point coincides with a source"); }
            u += src.amplitude * std::polar(1.0 / (4.0 * kPi * d), k * d);
        }
        return u;
    }

    Observation
    Observe(
        const Scene &scene,
        const MicArray &mic_array,
        double frequency_hz,
        std::optional<double> snr_db,
        std::optional<std::uint64_t> seed) {
        const auto m = static_cast<Eigen::Index>(mic_array.size());
        ComplexVector values(m);
        for (Eigen::Index i = 0; i < m; ++i) { values[i] = GreensField(scene, mic_array[i], frequency_hz); }

        if (snr_db) {
            if (!std::isfinite(*snr_db)) { throw InvalidInput("Observe: snr_db must be finite"); }
            std::mt19937_64 rng(seed.value_or(0));
            std::normal_distribution<double> normal(0.0, 1.0);
            ComplexVector noise(m);
            for (Eigen::Index i = 0; i < m; ++i) {
                const double re = normal(rng);
                const double im = normal(rng);
                noise[i] = {re, im};
            }
            const double signal_power = values.squaredNorm() / static_cast<double>(m);
            const double noise_power = noise.squaredNorm() / static_cast<double>(m);
            const double target = signal_power / std::pow(10.0, *snr_db / 10.0);
            if (noise_power > 0.0) { values += std::sqrt(target / noise_power) * noise; }
        }

        return Observation{mic_array, std::move(values), frequency_hz, snr_db, seed};
    }

    double
    EmpiricalSnrDb(const ComplexVector &clean, const ComplexVector &noisy) {
        return 10.0 * std::log10(clean.squaredNorm() / (noisy - clean).squaredNorm());
    }

}  // namespace sfmkl
