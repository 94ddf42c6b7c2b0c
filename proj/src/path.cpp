#include "xtune/path.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace xtune {

namespace {

double lerp(double a, double b, double t) { return a + t * (b - a); }

// Lateral lane-change profile on u in [0,1]: smooth ramp 0 -> 1 with zero
// slope and zero second derivative at both ends.
double sine_step(double u) { return u - std::sin(2.0 * kPi * u) / (2.0 * kPi); }
double sine_step_d1(double u) { return 1.0 - std::cos(2.0 * kPi * u); }
double sine_step_d2(double u) { return 2.0 * kPi * std::sin(2.0 * kPi * u); }

}  // namespace

ReferencePath::ReferencePath(std::vector<PathPoint> points, std::vector<double> v_ref)
    : points_(std::move(points)), v_ref_(std::move(v_ref)) {
    if (points_.size() < 2) throw InvalidInputError("path needs at least two samples");
    if (v_ref_.size() != points_.size())
        throw InvalidInputError("v_ref profile size mismatch");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const PathPoint& p = points_[i];
        if (!(p.w_l > 0.0) || !(p.w_r > 0.0))
            throw InvalidInputError("track half-widths must be positive");
        if (!(v_ref_[i] > 0.0)) throw InvalidInputError("v_ref must be positive");
        if (i > 0) {
            if (!(p.s > points_[i - 1].s))
                throw InvalidInputError("arc length must be strictly increasing");
            if (std::abs(p.psi_c - points_[i - 1].psi_c) > kPi)
                throw InvalidInputError("heading jump > pi between samples");
        }
    }
    if (points_.front().s != 0.0) throw InvalidInputError("path must start at s = 0");
}

std::size_t ReferencePath::segment_index(double s) const {
    auto it = std::upper_bound(points_.begin(), points_.end(), s,
                               [](double v, const PathPoint& p) { return v < p.s; });
    std::size_t i = static_cast<std::size_t>(std::distance(points_.begin(), it));
    if (i == 0) return 0;
    if (i >= points_.size()) return points_.size() - 2;
    return i - 1;
}

PathPoint ReferencePath::query(double s) const {
    if (s < 0.0 || s > total_length())
        throw InvalidInputError("query: s out of range");
    std::size_t i = segment_index(s);
    const PathPoint& a = points_[i];
    const PathPoint& b = points_[i + 1];
    double t = (s - a.s) / (b.s - a.s);
    PathPoint out;
    out.s = s;
    out.X_c = lerp(a.X_c, b.X_c, t);
    out.Y_c = lerp(a.Y_c, b.Y_c, t);
    out.psi_c = wrap_angle(lerp(a.psi_c, b.psi_c, t));
    out.kappa_c = lerp(a.kappa_c, b.kappa_c, t);
    out.w_l = lerp(a.w_l, b.w_l, t);
    out.w_r = lerp(a.w_r, b.w_r, t);
    return out;
}

double ReferencePath::v_ref(double s) const {
    if (s < 0.0 || s > total_length())
        throw InvalidInputError("v_ref: s out of range");
    std::size_t i = segment_index(s);
    double t = (s - points_[i].s) / (points_[i + 1].s - points_[i].s);
    return lerp(v_ref_[i], v_ref_[i + 1], t);
}

CartesianPose ReferencePath::pose_at(double s) const {
    PathPoint p = query(s);
    return CartesianPose{p.X_c, p.Y_c, p.psi_c};
}

CurvilinearPose ReferencePath::frame_at(const CartesianPose& pose, std::size_t seg,
                                        double t) const {
    const PathPoint& a = points_[seg];
    const PathPoint& b = points_[seg + 1];
    double s = lerp(a.s, b.s, t);
    double xc = lerp(a.X_c, b.X_c, t);
    double yc = lerp(a.Y_c, b.Y_c, t);
    double psi_c = lerp(a.psi_c, b.psi_c, t);  // unwrapped
    CurvilinearPose out;
    out.s = s;
    out.w = (pose.Y - yc) * std::cos(psi_c) - (pose.X - xc) * std::sin(psi_c);
    out.theta = wrap_angle(pose.psi - psi_c);
    return out;
}

namespace {

// Squared distance from p to segment [a,b]; writes the clamped parameter.
double segment_dist2(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                     const Eigen::Vector2d& b, double& t) {
    Eigen::Vector2d d = b - a;
    double len2 = d.squaredNorm();
    t = len2 > 0.0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
    return (p - (a + t * d)).squaredNorm();
}

}  // namespace

CurvilinearPose ReferencePath::to_curvilinear(const CartesianPose& pose,
                                              const ProjectionHint& hint,
                                              double corridor) const {
    const Eigen::Vector2d p(pose.X, pose.Y);
    const std::size_t nseg = points_.size() - 1;

    auto scan = [&](std::size_t lo, std::size_t hi, std::size_t& best_seg,
                    double& best_t) {
        double best_d2 = std::numeric_limits<double>::infinity();
        for (std::size_t i = lo; i <= hi; ++i) {
            double t;
            double d2 = segment_dist2(p, {points_[i].X_c, points_[i].Y_c},
                                      {points_[i + 1].X_c, points_[i + 1].Y_c}, t);
            if (d2 < best_d2) {
                best_d2 = d2;
                best_seg = i;
                best_t = t;
            }
        }
        return best_d2;
    };

    std::size_t best_seg = 0;
    double best_t = 0.0;
    if (hint.valid) {
        // Expanding local search around the hint segment.
        std::size_t center = segment_index(std::clamp(hint.s, 0.0, total_length()));
        std::size_t radius = 8;
        for (;;) {
            std::size_t lo = center > radius ? center - radius : 0;
            std::size_t hi = std::min(center + radius, nseg - 1);
            scan(lo, hi, best_seg, best_t);
            bool at_lo = best_seg == lo && lo > 0;
            bool at_hi = best_seg == hi && hi < nseg - 1;
            if (!at_lo && !at_hi) break;
            if (lo == 0 && hi == nseg - 1) break;
            radius *= 4;
        }
    } else {
        double best_d2 = scan(0, nseg - 1, best_seg, best_t);
        // Ambiguity guard: a non-adjacent segment at the same distance means
        // the projection is not well-defined.
        for (std::size_t i = 0; i < nseg; ++i) {
            if (i + 1 >= best_seg && i <= best_seg + 1) continue;
            double t;
            double d2 = segment_dist2(p, {points_[i].X_c, points_[i].Y_c},
                                      {points_[i + 1].X_c, points_[i + 1].Y_c}, t);
            if (std::abs(d2 - best_d2) < 1e-9 * (1.0 + best_d2))
                throw OutOfCorridorError("ambiguous projection onto path");
        }
    }

    CurvilinearPose curv = frame_at(pose, best_seg, best_t);
    if (std::abs(curv.w) > corridor)
        throw OutOfCorridorError("pose outside path corridor");
    return curv;
}

CartesianPose ReferencePath::to_cartesian(const CurvilinearPose& curv) const {
    if (curv.s < 0.0 || curv.s > total_length())
        throw InvalidInputError("to_cartesian: s out of range");
    std::size_t i = segment_index(curv.s);
    const PathPoint& a = points_[i];
    const PathPoint& b = points_[i + 1];
    double t = (curv.s - a.s) / (b.s - a.s);
    double xc = lerp(a.X_c, b.X_c, t);
    double yc = lerp(a.Y_c, b.Y_c, t);
    double psi_c = lerp(a.psi_c, b.psi_c, t);
    CartesianPose out;
    out.X = xc - curv.w * std::sin(psi_c);
    out.Y = yc + curv.w * std::cos(psi_c);
    out.psi = wrap_angle(psi_c + curv.theta);
    return out;
}

void ReferencePath::save_csv(std::ostream& os) const {
    os << "s,X_c,Y_c,psi_c,kappa_c,w_l,w_r,v_ref\n";
    os.precision(17);
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const PathPoint& p = points_[i];
        os << p.s << ',' << p.X_c << ',' << p.Y_c << ',' << p.psi_c << ','
           << p.kappa_c << ',' << p.w_l << ',' << p.w_r << ',' << v_ref_[i] << '\n';
    }
}

void ReferencePath::save_csv(const std::string& filename) const {
    std::ofstream f(filename);
    if (!f) throw InvalidInputError("cannot open " + filename + " for writing");
    save_csv(f);
}

ReferencePath ReferencePath::load_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line))
        throw InvalidInputError("path csv: empty file");
    if (line != "s,X_c,Y_c,psi_c,kappa_c,w_l,w_r,v_ref")
        throw InvalidInputError("path csv: unexpected header");
    std::vector<PathPoint> pts;
    std::vector<double> vref;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        PathPoint p;
        double v;
        char comma;
        row >> p.s >> comma >> p.X_c >> comma >> p.Y_c >> comma >> p.psi_c >> comma >>
            p.kappa_c >> comma >> p.w_l >> comma >> p.w_r >> comma >> v;
        if (!row) throw InvalidInputError("path csv: malformed row: " + line);
        pts.push_back(p);
        vref.push_back(v);
    }
    return ReferencePath(std::move(pts), std::move(vref));
}

ReferencePath ReferencePath::load_csv(const std::string& filename) {
    std::ifstream f(filename);
    if (!f) throw InvalidInputError("cannot open " + filename);
    return load_csv(f);
}

WaypointGeometry curvature_from_waypoints(const std::vector<Eigen::Vector2d>& xy) {
    const std::size_t n = xy.size();
    if (n < 3) throw InvalidInputError("need at least 3 waypoints");
    std::vector<double> s(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        double d = (xy[i] - xy[i - 1]).norm();
        if (d < 1e-12) throw InvalidInputError("duplicate consecutive waypoints");
        s[i] = s[i - 1] + d;
    }

    WaypointGeometry out;
    out.psi.resize(n);
    out.kappa.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::Vector2d d = (i == 0)       ? xy[1] - xy[0]
                            : (i == n - 1) ? xy[n - 1] - xy[n - 2]
                                           : xy[i + 1] - xy[i - 1];
        out.psi[i] = std::atan2(d.y(), d.x());
    }
    // Unwrap before differentiating.
    for (std::size_t i = 1; i < n; ++i)
        out.psi[i] = out.psi[i - 1] + wrap_angle(out.psi[i] - out.psi[i - 1]);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t lo = i == 0 ? 0 : i - 1;
        std::size_t hi = i == n - 1 ? n - 1 : i + 1;
        out.kappa[i] = (out.psi[hi] - out.psi[lo]) / (s[hi] - s[lo]);
    }
    return out;
}

ReferencePath build_dlc_path(const DlcGeometry& geom, double sample_spacing,
                             double runout, double track_half_width) {
    for (double l : geom.section_lengths)
        if (!(l > 0.0)) throw InvalidInputError("dlc: section lengths must be positive");
    if (geom.repeats < 1) throw InvalidInputError("dlc: repeats must be >= 1");
    if (!(geom.entry_speed > 0.0)) throw InvalidInputError("dlc: entry speed must be positive");
    if (!(sample_spacing > 0.0)) throw InvalidInputError("dlc: sample spacing must be positive");
    if (!std::isfinite(geom.lane_offset)) throw InvalidInputError("dlc: lane offset not finite");
    if (runout < 0.0) throw InvalidInputError("dlc: runout must be >= 0");
    double min_section = *std::min_element(geom.section_lengths.begin(),
                                           geom.section_lengths.end());
    if (sample_spacing > 0.5 * min_section)
        throw InvalidInputError("dlc: sample spacing too coarse for section lengths");

    const double period = geom.section_sum();
    const double x_total = geom.repeats * period + runout;
    const auto& L = geom.section_lengths;
    const double x1 = L[0], x2 = x1 + L[1], x3 = x2 + L[2], x4 = x3 + L[3];

    // Lateral profile and its first two derivatives at longitudinal position x.
    auto lateral = [&](double x, double& y, double& dy, double& ddy) {
        y = dy = ddy = 0.0;
        if (x >= geom.repeats * period) return;  // runout
        double xm = std::fmod(x, period);
        if (xm < x1) {
            // entry lane
        } else if (xm < x2) {
            double u = (xm - x1) / L[1];
            y = geom.lane_offset * sine_step(u);
            dy = geom.lane_offset * sine_step_d1(u) / L[1];
            ddy = geom.lane_offset * sine_step_d2(u) / (L[1] * L[1]);
        } else if (xm < x3) {
            y = geom.lane_offset;
        } else if (xm < x4) {
            double u = (xm - x3) / L[3];
            y = geom.lane_offset * (1.0 - sine_step(u));
            dy = -geom.lane_offset * sine_step_d1(u) / L[3];
            ddy = -geom.lane_offset * sine_step_d2(u) / (L[3] * L[3]);
        } else {
            // exit lane
        }
    };

    std::vector<PathPoint> pts;
    std::vector<double> vref;
    const std::size_t n = static_cast<std::size_t>(std::ceil(x_total / sample_spacing));
    pts.reserve(n + 2);
    double s_acc = 0.0;
    double prev_x = 0.0, prev_y = 0.0;
    for (std::size_t i = 0;; ++i) {
        double x = std::min(static_cast<double>(i) * sample_spacing, x_total);
        double y, dy, ddy;
        lateral(x, y, dy, ddy);
        if (i > 0) s_acc += std::hypot(x - prev_x, y - prev_y);
        PathPoint p;
        p.s = s_acc;
        p.X_c = x;
        p.Y_c = y;
        p.psi_c = std::atan(dy);
        p.kappa_c = ddy / std::pow(1.0 + dy * dy, 1.5);
        p.w_l = track_half_width;
        p.w_r = track_half_width;
        pts.push_back(p);
        vref.push_back(geom.entry_speed);
        prev_x = x;
        prev_y = y;
        if (x >= x_total) break;
    }
    return ReferencePath(std::move(pts), std::move(vref));
}

}  // namespace xtune
