#pragma once

#include <iosfwd>
#include <string_view>
#include <vector>

#include "sfmkl/ridge.hpp"

namespace sfmkl {

    /// Lattice points inside the target region.
    struct EvalGrid {
        std::vector<Position3> points;
        double spacing = 0.0;
    };

    /// Axis-aligned lattice with the given spacing through the region center, keeping points with
    /// |p - center| <= radius. Throws InvalidInput for spacing outside (0, 2 radius].
    [[nodiscard]] EvalGrid MakeGrid(const Sphere &region, double spacing);

    /// NMSE floor returned for an exact reconstruction.
    inline constexpr double kNmseFloorDb = -300.0;

    /// 10 log10( sum |u_true - u_est|^2 / sum |u_true|^2 ), clamped below at kNmseFloorDb.
    /// Throws InvalidInput on length mismatch, empty input or an all-zero true field.
    [[nodiscard]] double NmseDb(const ComplexVector &true_values, const ComplexVector &est_values);

    /// True field of the scene at every point.
    [[nodiscard]] ComplexVector TrueField(const Scene &scene, std::span<const Position3> points, double frequency_hz);

    /// Axis-normal plane, e.g. z = 0.
    struct Plane {
        int axis = 2;  ///< 0 = x, 1 = y, 2 = z
        double offset = 0.0;
    };

    /// Parses "x=0.1", "y=0", "z=-0.2".
    [[nodiscard]] Plane ParsePlane(std::string_view spec);

    /// Planar grid, row-major (second in-plane axis outer), of true and estimated values with normalised errors.
    ///
    /// normalized_error[i] = |u_true_i - u_est_i|^2 / mean_j |u_true_j|^2, so the slice mean equals
    /// the linear NMSE over the slice.
    struct FieldSlice {
        Plane plane;
        std::vector<Position3> points;
        ComplexVector true_values;
        ComplexVector est_values;
        Eigen::VectorXd normalized_error;

        [[nodiscard]] double MeanNormalizedErrorDb() const;
    };

    /// Square lattice in the plane through the projection of the region center, keeping the points
    /// inside the region. Throws InvalidInput when the plane misses the region.
    [[nodiscard]] FieldSlice ErrorSlice(
        const EstimatorState &state,
        const Scene &scene,
        double frequency_hz,
        const Plane &plane,
        double spacing);

    /// CSV: x,y,z,true_re,true_im,est_re,est_im,abs_error.
    void WritePointsCsv(
        std::ostream &os,
        std::span<const Position3> points,
        const ComplexVector &true_values,
        const ComplexVector &est_values);

    /// CSV: x,y,z,true_re,true_im,est_re,est_im,normalized_error for each slice point, row-major.
    void WriteSliceCsv(std::ostream &os, const FieldSlice &slice);

}  // namespace sfmkl
