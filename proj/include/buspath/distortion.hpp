#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "buspath/geometry.hpp"
#include "buspath/reference_path.hpp"
#include "buspath/vehicle_model.hpp"

namespace buspath {

/// Below this curvature magnitude the arc-circle construction degenerates
/// (the radius 1/kappa diverges) and the straight-body limit takes over.
inline constexpr double kKappaMin = 1e-3;

/// Circle in the (s, e_y) plane approximating one distorted body edge.
struct ArcCircle {
    double c_s = 0.0;
    double c_ey = 0.0;
    double radius = 0.0;
};

enum class BoundSense { lower, upper };

/// One linearized positional constraint on a body point: the edge lateral
/// offset is approximated as P z + p around the linearization reference, and
/// compared against `bound` with the given sense.
struct ConstraintRow {
    Eigen::RowVector2d P{0.0, 0.0};
    double p = 0.0;
    double bound = 0.0;
    BoundSense sense = BoundSense::upper;
};

/// Inputs held fixed while evaluating one body point within an SQP iteration:
/// the point's projected station s_hat, the path curvature at the axle
/// station, and the axle station itself.
struct EdgeEvalContext {
    double station_hat = 0.0;
    BodyPointSpec body_point;
    double kappa = 0.0;
    double axle_station = 0.0;
};

/// Center of the arc-circle, located perpendicularly to the rear axle:
///   c_s  = s + kappa^-1 sin(e_psi)
///   c_ey = e_y - kappa^-1 cos(e_psi)
/// The signed radius 1/kappa places the center on the correct side for both
/// turn directions.
inline std::pair<double, double> arc_center(const VehicleStateZ& z, double kappa, double s) {
    if (std::abs(kappa) < kKappaMin) {
        throw std::domain_error("arc_center: |kappa| below straight-line fallback threshold");
    }
    const double radius = 1.0 / kappa;
    return {s + radius * std::sin(z.e_psi), z.e_y - radius * std::cos(z.e_psi)};
}

namespace detail {

inline double fallback_edge_lateral(const EdgeEvalContext& ctx, const VehicleStateZ& z) {
    const double l = ctx.body_point.longitudinal_offset;
    const double d = ctx.body_point.lateral_offset;
    return z.e_y + l * std::sin(z.e_psi) + d * std::cos(z.e_psi);
}

inline Eigen::RowVector2d fallback_edge_partials(const EdgeEvalContext& ctx,
                                                 const VehicleStateZ& z) {
    const double l = ctx.body_point.longitudinal_offset;
    const double d = ctx.body_point.lateral_offset;
    return {1.0, l * std::cos(z.e_psi) - d * std::sin(z.e_psi)};
}

/// Discriminant r^2 - (s_hat - c_s)^2 of the arc evaluated at s_hat.
inline double arc_discriminant(const EdgeEvalContext& ctx, const VehicleStateZ& z,
                               double& c_s, double& c_ey, double& rho) {
    std::tie(c_s, c_ey) = arc_center(z, ctx.kappa, ctx.axle_station);
    const double signed_radius = 1.0 / ctx.kappa;
    // A body line at lateral offset d sits at distance |1/kappa + d| from the
    // arc center; for a left turn the left edge (d = +w/2) is the far one.
    rho = std::abs(signed_radius + ctx.body_point.lateral_offset);
    const double ds = ctx.station_hat - c_s;
    return rho * rho - ds * ds;
}

}  // namespace detail

/// Lateral offset of the body edge at the fixed station s_hat (arc-circle
/// model): e_y_hat = c_ey + sign(kappa) sqrt(r^2 - (s_hat - c_s)^2).
/// Falls back to the straight-body expression for |kappa| < kKappaMin.
inline double edge_lateral(const EdgeEvalContext& ctx, const VehicleStateZ& z,
                           const VehicleGeometry& geom) {
    if (std::abs(ctx.body_point.lateral_offset) > geom.width / 2.0 + 1e-9) {
        throw std::invalid_argument("edge_lateral: lateral offset outside body");
    }
    if (std::abs(ctx.kappa) < kKappaMin) {
        return detail::fallback_edge_lateral(ctx, z);
    }
    double c_s, c_ey, rho;
    const double disc = detail::arc_discriminant(ctx, z, c_s, c_ey, rho);
    if (disc <= 0.0) {
        throw std::domain_error("edge_lateral: station s_hat outside the arc's reach");
    }
    const double sign = (ctx.kappa > 0.0) ? 1.0 : -1.0;
    return c_ey + sign * std::sqrt(disc);
}

/// Analytic partial derivatives of edge_lateral with respect to (e_y, e_psi):
///   d/de_y   = 1
///   d/de_psi = kappa^-1 sin(e_psi)
///              + (s_hat - c_s) kappa^-1 cos(e_psi) / sqrt(r^2 - (s_hat - c_s)^2)
/// (branch sign folded in for right turns).
inline Eigen::RowVector2d edge_partials(const EdgeEvalContext& ctx, const VehicleStateZ& z,
                                        const VehicleGeometry& geom) {
    if (std::abs(ctx.body_point.lateral_offset) > geom.width / 2.0 + 1e-9) {
        throw std::invalid_argument("edge_partials: lateral offset outside body");
    }
    if (std::abs(ctx.kappa) < kKappaMin) {
        return detail::fallback_edge_partials(ctx, z);
    }
    double c_s, c_ey, rho;
    const double disc = detail::arc_discriminant(ctx, z, c_s, c_ey, rho);
    if (disc <= 0.0) {
        throw std::domain_error("edge_partials: station s_hat outside the arc's reach");
    }
    const double radius = 1.0 / ctx.kappa;
    const double sign = (ctx.kappa > 0.0) ? 1.0 : -1.0;
    const double d_epsi = radius * std::sin(z.e_psi) +
                          sign * (ctx.station_hat - c_s) * radius * std::cos(z.e_psi) /
                              std::sqrt(disc);
    return {1.0, d_epsi};
}

/// Cartesian position of a body point given the axle state on the path.
inline CartesianPoint body_point_cartesian(const ReferencePath& path, double axle_s,
                                           const VehicleStateZ& z, const BodyPointSpec& bp) {
    const CartesianPoint axle = to_cartesian(path, {axle_s, z.e_y});
    const double heading = heading_at(path, axle_s) + z.e_psi;
    return axle + bp.longitudinal_offset * tangent_of(heading) +
           bp.lateral_offset * left_normal(heading);
}

/// Road-aligned coordinates of a body point via the geometric transform.
inline FrenetCoord body_point_frenet(const ReferencePath& path, double axle_s,
                                     const VehicleStateZ& z, const BodyPointSpec& bp) {
    return to_frenet(path, body_point_cartesian(path, axle_s, z, bp));
}

/// Projected station s_hat of a body point; held fixed within one SQP
/// iteration.
inline double station_of_body_point(const ReferencePath& path, double axle_s,
                                    const VehicleStateZ& z, const BodyPointSpec& bp) {
    return body_point_frenet(path, axle_s, z, bp).s;
}

/// First-order Taylor row around z_ref: P from the arc-circle partials, the
/// constant term anchored to the exact geometric lateral offset so the row
/// reproduces exact_ey at the reference.
inline ConstraintRow taylor_constraint_row(const EdgeEvalContext& ctx,
                                           const VehicleStateZ& z_ref,
                                           const VehicleGeometry& geom, double exact_ey,
                                           double bound, BoundSense sense) {
    ConstraintRow row;
    row.P = edge_partials(ctx, z_ref, geom);
    row.p = exact_ey - row.P * Eigen::Vector2d(z_ref.e_y, z_ref.e_psi);
    row.bound = bound;
    row.sense = sense;
    return row;
}

}  // namespace buspath
