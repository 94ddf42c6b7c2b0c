#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "xtune/common.hpp"

namespace xtune {

/// One sample of the arc-length parameterized center-line tuple.
/// Heading is stored unwrapped (continuous along the point sequence);
/// consumers renormalize when forming poses.
struct PathPoint {
    double s = 0.0;        ///< arc length [m]
    double X_c = 0.0;      ///< center-line X [m]
    double Y_c = 0.0;      ///< center-line Y [m]
    double psi_c = 0.0;    ///< center-line heading, unwrapped [rad]
    double kappa_c = 0.0;  ///< curvature [1/m]
    double w_l = 0.0;      ///< left track half-width [m]
    double w_r = 0.0;      ///< right track half-width [m]
};

struct CartesianPose {
    double X = 0.0;
    double Y = 0.0;
    double psi = 0.0;  ///< normalized to (-pi, pi]
};

/// Path-attached coordinates: progress, lateral deviation (positive left of
/// the center-line), heading deviation (positive counter-clockwise).
struct CurvilinearPose {
    double s = 0.0;
    double w = 0.0;
    double theta = 0.0;
};

/// ISO 3888-1 style double-lane-change geometry. Defaults follow the
/// published standard: five sections of 15/30/25/25/15 m and a 3.5 m
/// offset between lane centers.
struct DlcGeometry {
    std::array<double, 5> section_lengths{15.0, 30.0, 25.0, 25.0, 15.0};
    double lane_offset = 3.5;             ///< lateral offset of the side lane [m]
    double entry_speed = kph_to_mps(80);  ///< [m/s]
    int repeats = 4;                      ///< successive maneuvers

    double section_sum() const {
        double t = 0.0;
        for (double l : section_lengths) t += l;
        return t;
    }
};

/// Caller-owned warm start for path projection. Pass the s returned by the
/// previous projection to get an O(1) local search instead of a global scan.
struct ProjectionHint {
    double s = 0.0;
    bool valid = false;
};

/// Immutable sampled reference path with a piecewise-linear speed profile.
/// Safe to share across concurrent readers after construction.
class ReferencePath {
public:
    /// Validates and takes ownership of the samples. v_ref is aligned with
    /// points (one reference speed per sample).
    ReferencePath(std::vector<PathPoint> points, std::vector<double> v_ref);

    const std::vector<PathPoint>& points() const { return points_; }
    double total_length() const { return points_.back().s; }

    /// Interpolated tuple at arc length s in [0, total_length]. Position,
    /// curvature and widths interpolate linearly; heading interpolates on
    /// the unwrapped profile and is renormalized to (-pi, pi].
    PathPoint query(double s) const;

    /// Reference speed at arc length s.
    double v_ref(double s) const;

    /// Center-line pose at arc length s.
    CartesianPose pose_at(double s) const;

    /// Projects a Cartesian pose onto the path. Without a hint the scan is
    /// global; with a valid hint the search starts near hint.s and expands
    /// only as needed. Throws OutOfCorridorError if |w| exceeds `corridor`
    /// or the global projection is ambiguous.
    CurvilinearPose to_curvilinear(const CartesianPose& pose,
                                   const ProjectionHint& hint = {},
                                   double corridor = 10.0) const;

    /// Inverse map. Throws InvalidInputError if curv.s is out of range.
    CartesianPose to_cartesian(const CurvilinearPose& curv) const;

    void save_csv(std::ostream& os) const;
    void save_csv(const std::string& filename) const;
    static ReferencePath load_csv(std::istream& is);
    static ReferencePath load_csv(const std::string& filename);

private:
    // Index of the segment containing s (clamped to valid range).
    std::size_t segment_index(double s) const;
    CurvilinearPose frame_at(const CartesianPose& pose, std::size_t seg, double t) const;

    std::vector<PathPoint> points_;
    std::vector<double> v_ref_;
};

/// Headings and signed curvatures for a waypoint polyline: tangent heading
/// per sample and d(psi)/ds via central differences (one-sided at the ends).
struct WaypointGeometry {
    std::vector<double> psi;    ///< unwrapped tangent headings [rad]
    std::vector<double> kappa;  ///< signed curvature [1/m]
};
WaypointGeometry curvature_from_waypoints(const std::vector<Eigen::Vector2d>& xy);

/// Builds the double-lane-change reference path. The lane change follows a
/// sine-interpolation lateral profile, which keeps curvature continuous
/// (zero at the junctions with the straights). `runout` appends a straight
/// tail after the last maneuver so a receding horizon can look past the
/// scenario end; it is not part of the maneuver geometry.
ReferencePath build_dlc_path(const DlcGeometry& geom, double sample_spacing,
                             double runout = 0.0, double track_half_width = 5.0);

}  // namespace xtune
