#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "buspath/geometry.hpp"
#include "buspath/spline.hpp"

namespace buspath {

/// Arclength-uniform discretization of a reference curve. Stations are
/// s_i = i * delta_s; headings and curvatures are sampled analytically from
/// the generating spline at build time.
struct ReferencePath {
    double delta_s = 0.0;
    std::vector<double> stations;
    std::vector<CartesianPoint> points;
    std::vector<double> headings;
    std::vector<double> curvatures;

    std::size_t size() const { return stations.size(); }
    double length() const { return stations.empty() ? 0.0 : stations.back(); }

    bool contains(double s, double tol = 1e-9) const {
        return s >= -tol && s <= length() + tol;
    }
};

namespace detail {

struct HermiteSegment {
    CartesianPoint p0, p1;
    Eigen::Vector2d m0, m1;  // endpoint tangents scaled by segment length

    CartesianPoint eval(double a) const {
        const double a2 = a * a, a3 = a2 * a;
        return (2 * a3 - 3 * a2 + 1) * p0 + (a3 - 2 * a2 + a) * m0 +
               (-2 * a3 + 3 * a2) * p1 + (a3 - a2) * m1;
    }
    Eigen::Vector2d deriv(double a) const {
        const double a2 = a * a;
        return (6 * a2 - 6 * a) * p0 + (3 * a2 - 4 * a + 1) * m0 +
               (-6 * a2 + 6 * a) * p1 + (3 * a2 - 2 * a) * m1;
    }
    Eigen::Vector2d deriv2(double a) const {
        return (12 * a - 6) * p0 + (6 * a - 4) * m0 + (-12 * a + 6) * p1 +
               (6 * a - 2) * m1;
    }
};

inline HermiteSegment segment_of(const ReferencePath& path, std::size_t i) {
    return {path.points[i], path.points[i + 1],
            path.delta_s * tangent_of(path.headings[i]),
            path.delta_s * tangent_of(path.headings[i + 1])};
}

inline std::size_t segment_index(const ReferencePath& path, double s) {
    const double u = s / path.delta_s;
    const auto last = static_cast<long>(path.size()) - 2;
    return static_cast<std::size_t>(std::clamp(static_cast<long>(std::floor(u)), 0L, last));
}

}  // namespace detail

/// Resample a cubic spline through the waypoints at uniform arclength spacing.
/// Curvature comes from the spline analytically, not finite differences.
inline ReferencePath build_reference_path(const std::vector<CartesianPoint>& waypoints,
                                          double delta_s, double kappa_max = 0.2) {
    if (delta_s <= 0.0) {
        throw std::invalid_argument("build_reference_path: delta_s must be positive");
    }
    PlanarSpline spline(waypoints);
    const double total = spline.total_arclength();
    if (delta_s > total) {
        throw std::invalid_argument("build_reference_path: delta_s exceeds curve length");
    }
    const auto n = static_cast<std::size_t>(std::floor(total / delta_s + 1e-9));

    ReferencePath path;
    path.delta_s = delta_s;
    path.stations.reserve(n + 1);
    path.points.reserve(n + 1);
    path.headings.reserve(n + 1);
    path.curvatures.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double s = static_cast<double>(i) * delta_s;
        const double t = spline.param_at_arclength(s);
        const double kappa = spline.curvature(t);
        if (std::abs(kappa) > kappa_max) {
            throw std::invalid_argument(
                "build_reference_path: curvature " + std::to_string(kappa) +
                " at station " + std::to_string(i) + " exceeds kappa_max");
        }
        path.stations.push_back(s);
        path.points.push_back(spline.position(t));
        path.headings.push_back(spline.heading(t));
        path.curvatures.push_back(kappa);
    }
    return path;
}

/// Interpolated curve position at arclength s (cubic Hermite between stations).
inline CartesianPoint position_at(const ReferencePath& path, double s) {
    if (!path.contains(s)) {
        throw PathDomainError("position_at: s outside path domain");
    }
    const std::size_t i = detail::segment_index(path, s);
    return detail::segment_of(path, i).eval(s / path.delta_s - static_cast<double>(i));
}

inline double heading_at(const ReferencePath& path, double s) {
    if (!path.contains(s)) {
        throw PathDomainError("heading_at: s outside path domain");
    }
    const std::size_t i = detail::segment_index(path, s);
    const auto d = detail::segment_of(path, i).deriv(s / path.delta_s - static_cast<double>(i));
    return std::atan2(d.y(), d.x());
}

/// Linear interpolation of the per-station curvature samples.
inline double curvature_at(const ReferencePath& path, double s) {
    if (!path.contains(s)) {
        throw PathDomainError("curvature_at: s outside path domain");
    }
    const std::size_t i = detail::segment_index(path, s);
    const double a = s / path.delta_s - static_cast<double>(i);
    return (1.0 - a) * path.curvatures[i] + a * path.curvatures[i + 1];
}

/// Inverse of the road-aligned transform: gamma(s) + e_y * n(s), n the left
/// unit normal.
inline CartesianPoint to_cartesian(const ReferencePath& path, const FrenetCoord& c) {
    if (!path.contains(c.s)) {
        throw PathDomainError("to_cartesian: s outside path domain");
    }
    return position_at(path, c.s) + c.e_y * left_normal(heading_at(path, c.s));
}

namespace detail {

struct ProjectionCandidate {
    double s = 0.0;
    double dist2 = std::numeric_limits<double>::infinity();
    CartesianPoint foot{0.0, 0.0};
    Eigen::Vector2d tangent{1.0, 0.0};
    bool interior = false;
};

/// Solve the orthogonality condition (p - h(a)) . h'(a) = 0 on one segment.
inline ProjectionCandidate project_on_segment(const ReferencePath& path, std::size_t i,
                                              const CartesianPoint& p) {
    const HermiteSegment seg = segment_of(path, i);
    const auto g = [&](double a) { return (p - seg.eval(a)).dot(seg.deriv(a)); };

    double lo = 0.0, hi = 1.0;
    double g_lo = g(lo), g_hi = g(hi);
    ProjectionCandidate cand;
    if (g_lo <= 0.0 && g_hi <= 0.0) {
        // Foot precedes this segment.
        cand.s = path.stations[i];
        cand.foot = seg.eval(0.0);
        cand.tangent = seg.deriv(0.0);
        cand.dist2 = (p - cand.foot).squaredNorm();
        return cand;
    }
    if (g_lo >= 0.0 && g_hi >= 0.0) {
        cand.s = path.stations[i + 1];
        cand.foot = seg.eval(1.0);
        cand.tangent = seg.deriv(1.0);
        cand.dist2 = (p - cand.foot).squaredNorm();
        return cand;
    }

    double a = 0.5 * (lo + hi);
    for (int iter = 0; iter < 100; ++iter) {
        const double ga = g(a);
        if (ga > 0.0) lo = a; else hi = a;
        const auto d1 = seg.deriv(a);
        const double slope = -d1.squaredNorm() + (p - seg.eval(a)).dot(seg.deriv2(a));
        double next = (std::abs(slope) > 1e-300) ? a - ga / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - a) < 1e-14) {
            a = next;
            break;
        }
        a = next;
    }
    cand.s = path.stations[i] + a * path.delta_s;
    cand.foot = seg.eval(a);
    cand.tangent = seg.deriv(a);
    cand.dist2 = (p - cand.foot).squaredNorm();
    cand.interior = true;
    return cand;
}

}  // namespace detail

/// Road-aligned transform: project p onto the path along the normal.
/// Coarse nearest-station scan, then orthogonality refinement on the adjacent
/// interpolated segments. Equidistant candidates resolve to the smallest s.
inline FrenetCoord to_frenet(const ReferencePath& path, const CartesianPoint& p) {
    const std::size_t n = path.size();
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d2 = (p - path.points[i]).squaredNorm();
        if (d2 < best - 1e-18 || (d2 <= best + 1e-18 && i < best_i)) {
            best = d2;
            best_i = i;
        }
    }

    detail::ProjectionCandidate chosen;
    const std::size_t seg_lo = (best_i == 0) ? 0 : best_i - 1;
    const std::size_t seg_hi = std::min(best_i, n - 2);
    for (std::size_t i = seg_lo; i <= seg_hi; ++i) {
        const auto cand = detail::project_on_segment(path, i, p);
        const bool closer = cand.dist2 < chosen.dist2 - 1e-12;
        const bool tie = std::abs(cand.dist2 - chosen.dist2) <= 1e-12 && cand.s < chosen.s;
        if (closer || tie) chosen = cand;
    }

    // Endpoint clamps mean the point has no interior normal foot.
    if (!chosen.interior) {
        const double tol = 1e-9;
        if (chosen.s <= path.stations.front() + tol || chosen.s >= path.length() - tol) {
            throw PathDomainError("to_frenet: point projects beyond path endpoints");
        }
        chosen.interior = true;  // interior station hit exactly
    }

    const Eigen::Vector2d normal =
        Eigen::Vector2d(-chosen.tangent.y(), chosen.tangent.x()).normalized();
    const double e_y = (p - chosen.foot).dot(normal);

    const double kappa = curvature_at(path, chosen.s);
    if (std::abs(kappa) > 1e-12 && std::abs(e_y) >= 1.0 / std::abs(kappa)) {
        throw PathDomainError("to_frenet: point at or beyond center of curvature");
    }
    return {chosen.s, e_y};
}

}  // namespace buspath
