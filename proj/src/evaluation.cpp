#include "sfmkl/evaluation.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "sfmkl/error.hpp"
#include "sfmkl/format.hpp"

namespace sfmkl {

    EvalGrid
    MakeGrid(const Sphere &region, double spacing) {
        if (!(spacing > 0.0) || spacing > 2.0 * region.radius) {
            throw InvalidInput("MakeGrid: spacing must lie in (0, 2 * radius]");
        }
        const int n = static_cast<int>(std::floor(region.radius / spacing + 1e-9));
        EvalGrid grid;
        grid.spacing = spacing;
        for (int i = -n; i <= n; ++i) {
            for (int j = -n; j <= n; ++j) {
                for (int k = -n; k <= n; ++k) {
                    const Position3 p = region.center + spacing * Position3(i, j, k);
                    if (region.contains(p)) { grid.points.push_back(p); }
                }
            }
        }
        if (grid.points.empty()) { throw InvalidInput("MakeGrid: no lattice point inside the region"); }
        return grid;
    }

    double
    NmseDb(const ComplexVector &true_values, const ComplexVector &est_values) {
        if (true_values.size() != est_values.size() || true_values.size() == 0) {
            throw InvalidInput("NmseDb: inputs must have the same non-zero length");
        }
        const double denom = true_values.squaredNorm();
        if (!(denom > 0.0)) { throw InvalidInput("NmseDb: true field is identically zero"); }
        const double num = (true_values - est_values).squaredNorm();
        if (num == 0.0) { return kNmseFloorDb; }
        return std::max(kNmseFloorDb, 10.0 * std::log10(num / denom));
    }

    ComplexVector
    TrueField(const Scene &scene, std::span<const Position3> points, double frequency_hz) {
        ComplexVector u(static_cast<Eigen::Index>(points.size()));
        for (std::size_t i = 0; i < points.size(); ++i) {
            u[static_cast<Eigen::Index>(i)] = GreensField(scene, points[i], frequency_hz);
        }
        return u;
    }

    Plane
    ParsePlane(std::string_view spec) {
        const auto eq = spec.find('=');
        if (eq != 1 || spec.size() < 3) { throw InvalidInput("ParsePlane: expected <axis>=<offset>, got '" + std::string(spec) + "'"); }
        Plane plane;
        switch (spec[0]) {
            case 'x':
                plane.axis = 0;
                break;
            case 'y':
                plane.axis = 1;
                break;
            case 'z':
                plane.axis = 2;
                break;
            default:
                throw InvalidInput("ParsePlane: axis must be x, y or z");
        }
        try {
            std::size_t used = 0;
            const std::string offset(spec.substr(2));
            plane.offset = std::stod(offset, &used);
            if (used != offset.size()) { throw InvalidInput("trailing characters"); }
        } catch (const std::exception &) {
            throw InvalidInput("ParsePlane: bad offset in '" + std::string(spec) + "'");
        }
        return plane;
    }

    double
    FieldSlice::MeanNormalizedErrorDb() const {
        return 10.0 * std::log10(normalized_error.mean());
    }

    FieldSlice
    ErrorSlice(const EstimatorState &state, const Scene &scene, double frequency_hz, const Plane &plane, double spacing) {
        const Sphere &region = scene.target_region();
        if (plane.axis < 0 || plane.axis > 2) { throw InvalidInput("ErrorSlice: bad plane axis"); }
        if (std::abs(plane.offset - region.center[plane.axis]) > region.radius) {
            throw InvalidInput("ErrorSlice: plane does not intersect the region");
        }
        if (!(spacing > 0.0)) { throw InvalidInput("ErrorSlice: spacing must be positive"); }

        const int u_axis = plane.axis == 0 ? 1 : 0;
        const int v_axis = plane.axis == 2 ? 1 : 2;
        const int n = static_cast<int>(std::floor(region.radius / spacing + 1e-9));

        FieldSlice slice;
        slice.plane = plane;
        for (int row = -n; row <= n; ++row) {
            for (int col = -n; col <= n; ++col) {
                Position3 p = region.center;
                p[plane.axis] = plane.offset;
                p[u_axis] += col * spacing;
                p[v_axis] += row * spacing;
                if (region.contains(p)) { slice.points.push_back(p); }
            }
        }
        if (slice.points.empty()) { throw InvalidInput("ErrorSlice: no lattice point of the plane lies inside the region"); }

        slice.true_values = TrueField(scene, slice.points, frequency_hz);
        slice.est_values = EstimateField(state, slice.points);
        const double mean_power = slice.true_values.squaredNorm() / static_cast<double>(slice.points.size());
        if (!(mean_power > 0.0)) { throw InvalidInput("ErrorSlice: true field vanishes on the slice"); }
        slice.normalized_error = (slice.true_values - slice.est_values).cwiseAbs2() / mean_power;
        return slice;
    }

    void
    WritePointsCsv(
        std::ostream &os,
        std::span<const Position3> points,
        const ComplexVector &true_values,
        const ComplexVector &est_values) {
        if (static_cast<Eigen::Index>(points.size()) != true_values.size() || true_values.size() != est_values.size()) {
            throw InvalidInput("WritePointsCsv: length mismatch");
        }
        os << "x,y,z,true_re,true_im,est_re,est_im,abs_error\n";
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto idx = static_cast<Eigen::Index>(i);
            const auto &p = points[i];
            os << FormatDouble(p.x()) << ',' << FormatDouble(p.y()) << ',' << FormatDouble(p.z()) << ','
               << FormatDouble(true_values[idx].real()) << ',' << FormatDouble(true_values[idx].imag()) << ','
               << FormatDouble(est_values[idx].real()) << ',' << FormatDouble(est_values[idx].imag()) << ','
               << FormatDouble(std::abs(true_values[idx] - est_values[idx])) << '\n';
        }
    }

    void
    WriteSliceCsv(std::ostream &os, const FieldSlice &slice) {
        os << "x,y,z,true_re,true_im,est_re,est_im,normalized_error\n";
        for (std::size_t i = 0; i < slice.points.size(); ++i) {
            const auto idx = static_cast<Eigen::Index>(i);
            const auto &p = slice.points[i];
            os << FormatDouble(p.x()) << ',' << FormatDouble(p.y()) << ',' << FormatDouble(p.z()) << ','
               << FormatDouble(slice.true_values[idx].real()) << ',' << FormatDouble(slice.true_values[idx].imag()) << ','
               << FormatDouble(slice.est_values[idx].real()) << ',' << FormatDouble(slice.est_values[idx].imag()) << ','
               << FormatDouble(slice.normalized_error[idx]) << '\n';
        }
    }

}  // namespace sfmkl
