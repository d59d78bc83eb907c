#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace sfmkl {

    using Complex = std::complex<double>;
    using Position3 = Eigen::Vector3d;
    using ComplexVector = Eigen::VectorXcd;
    using ComplexMatrix = Eigen::MatrixXcd;

    inline constexpr double kPi = 3.14159265358979323846;

    /// Ordered, validated set of omnidirectional microphone positions.
    class MicArray {
    public:
        /// Throws InvalidInput when empty, non-finite or with coincident positions.
        explicit MicArray(std::vector<Position3> positions);

        [[nodiscard]] std::size_t size() const { return positions_.size(); }
        [[nodiscard]] const Position3 &operator[](std::size_t i) const { return positions_[i]; }
        [[nodiscard]] std::span<const Position3> positions() const { return positions_; }

        /// Concatenates two arrays; the result must still have distinct positions.
        [[nodiscard]] MicArray concat(const MicArray &other) const;

    private:
        std::vector<Position3> positions_;
    };

    struct Sphere {
        Position3 center = Position3::Zero();
        double radius = 1.0;

        [[nodiscard]] bool contains(const Position3 &p) const { return (p - center).norm() <= radius; }
    };

    struct PointSource {
        Position3 position = Position3::Zero();
        Complex amplitude{1.0, 0.0};
    };

    /// Free-field scene: monopole sources outside a spherical, source-free target region.
    class Scene {
    public:
        Scene(std::vector<PointSource> sources, double speed_of_sound, Sphere target_region);

        [[nodiscard]] std::span<const PointSource> sources() const { return sources_; }
        [[nodiscard]] double speed_of_sound() const { return speed_of_sound_; }
        [[nodiscard]] const Sphere &target_region() const { return region_; }
        [[nodiscard]] double wavenumber(double frequency_hz) const;

    private:
        std::vector<PointSource> sources_;
        double speed_of_sound_;
        Sphere region_;
    };

    struct Observation {
        MicArray mic_array;
        ComplexVector values;
        double frequency = 0.0;
        std::optional<double> snr_db;
        std::optional<std::uint64_t> noise_seed;
    };

    enum class PointSet {
        kTDesign,    ///< embedded spherical design table (25 points only)
        kFibonacci,  ///< deterministic Fibonacci lattice, any size
        kAuto,       ///< t-design when available, otherwise Fibonacci with a warning
    };

    /// Accepts "t-design", "fibonacci" and "auto".
    [[nodiscard]] PointSet ParsePointSet(std::string_view name);
    [[nodiscard]] std::string_view ToString(PointSet set);

    /// Unit vectors of the embedded 25-point spherical 5-design.
    [[nodiscard]] std::span<const Position3> TDesign25();

    /// Strength of the embedded design: equal-weight averages are exact up to this degree.
    inline constexpr int kTDesign25Strength = 5;

    [[nodiscard]] std::vector<Position3> FibonacciSphere(std::size_t n_points);

    /// n_points microphones on a sphere of the given radius centred at the origin.
    [[nodiscard]] MicArray SphericalLayerLayout(std::size_t n_points, double radius, PointSet point_set);

    /// Sum of A * exp(+j k d) / (4 pi d) over the scene's sources, d = |r - r_s|.
    [[nodiscard]] Complex GreensField(const Scene &scene, const Position3 &r, double frequency_hz);

    /// Clean field at every microphone plus optional circular white Gaussian noise.
    ///
    /// The realised noise vector is rescaled so that the ratio of mean signal power to mean noise
    /// power over the array is exactly snr_db. Without a seed the generator starts from seed 0.
    [[nodiscard]] Observation Observe(
        const Scene &scene,
        const MicArray &mic_array,
        double frequency_hz,
        std::optional<double> snr_db = std::nullopt,
        std::optional<std::uint64_t> seed = std::nullopt);

    /// 10 log10(mean |clean|^2 / mean |noisy - clean|^2).
    [[nodiscard]] double EmpiricalSnrDb(const ComplexVector &clean, const ComplexVector &noisy);

}  // namespace sfmkl
