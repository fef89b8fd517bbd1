#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "buspath/geometry.hpp"
#include "buspath/reference_path.hpp"

namespace buspath {

/// Rigid body dimensions. Longitudinal offsets are measured from the rear
/// axle, positive toward the front.
struct VehicleGeometry {
    double wheelbase = 6.0;
    double width = 2.55;
    double front_overhang = 2.7;
    double rear_overhang = 3.3;

    double total_length() const { return wheelbase + front_overhang + rear_overhang; }
    double front_offset() const { return wheelbase + front_overhang; }
    double rear_offset() const { return -rear_overhang; }

    void validate() const {
        if (wheelbase <= 0 || width <= 0 || front_overhang <= 0 || rear_overhang <= 0) {
            throw std::invalid_argument("VehicleGeometry: all dimensions must be positive");
        }
    }
};

/// Road-aligned state z = [e_y, e_psi]: lateral offset and heading error.
struct VehicleStateZ {
    double e_y = 0.0;
    double e_psi = 0.0;
};

/// Curvature magnitude and per-station rate limits of the steering actuator.
struct ActuatorLimits {
    double u_max = 1.0 / 12.0;
    double u_rate_max = 0.01;

    void validate() const {
        if (u_max <= 0 || u_rate_max <= 0) {
            throw std::invalid_argument("ActuatorLimits: limits must be positive");
        }
    }
};

/// One-step affine model z_{i+1} = A z_i + B u_i + G.
struct LinearizedDynamics {
    Eigen::Matrix2d A;
    Eigen::Vector2d B;
    Eigen::Vector2d G;
};

enum class BodyPointTag { edge_left, edge_right, wheelbase_left, wheelbase_right, corner };

/// A sample point on the vehicle outline, in the body frame of the rear axle.
struct BodyPointSpec {
    double longitudinal_offset = 0.0;
    double lateral_offset = 0.0;
    BodyPointTag tag = BodyPointTag::corner;
};

inline double steering_to_curvature(double phi, double wheelbase) {
    return std::tan(phi) / wheelbase;
}

inline double curvature_to_steering(double u, double wheelbase) {
    return std::atan(u * wheelbase);
}

namespace detail {

inline void check_model_domain(const VehicleStateZ& z, double kappa, const char* where) {
    if (std::abs(z.e_psi) >= M_PI / 2.0) {
        throw std::domain_error(std::string(where) + ": |e_psi| >= pi/2 (model singularity)");
    }
    if (1.0 - kappa * z.e_y <= 0.0) {
        throw std::domain_error(std::string(where) +
                                ": 1 - kappa*e_y <= 0 (beyond center of curvature)");
    }
}

}  // namespace detail

/// Space-based road-aligned kinematics:
///   e_y'   = (1 - kappa e_y) tan e_psi
///   e_psi' = u (1 - kappa e_y) / cos e_psi - kappa
/// Derivatives are with respect to arclength s along the reference path.
inline Eigen::Vector2d dynamics_rhs(const VehicleStateZ& z, double u, double kappa) {
    detail::check_model_domain(z, kappa, "dynamics_rhs");
    const double margin = 1.0 - kappa * z.e_y;
    return {margin * std::tan(z.e_psi), u * margin / std::cos(z.e_psi) - kappa};
}

/// Analytic Jacobians of dynamics_rhs with respect to z and u.
inline void dynamics_jacobians(const VehicleStateZ& z, double u, double kappa,
                               Eigen::Matrix2d& df_dz, Eigen::Vector2d& df_du) {
    detail::check_model_domain(z, kappa, "dynamics_jacobians");
    const double margin = 1.0 - kappa * z.e_y;
    const double c = std::cos(z.e_psi);
    const double t = std::tan(z.e_psi);
    df_dz(0, 0) = -kappa * t;
    df_dz(0, 1) = margin / (c * c);
    df_dz(1, 0) = -u * kappa / c;
    df_dz(1, 1) = u * margin * t / c;
    df_du = {0.0, margin / c};
}

/// Explicit Euler discretization in s around a reference (z_ref, u_ref):
/// A = I + ds df/dz, B = ds df/du, G collects the affine remainder so that
/// A z_ref + B u_ref + G reproduces the nonlinear one-step propagation.
inline LinearizedDynamics linearize(const VehicleStateZ& z_ref, double u_ref, double kappa,
                                    double delta_s) {
    Eigen::Matrix2d df_dz;
    Eigen::Vector2d df_du;
    dynamics_jacobians(z_ref, u_ref, kappa, df_dz, df_du);
    const Eigen::Vector2d f = dynamics_rhs(z_ref, u_ref, kappa);
    const Eigen::Vector2d z(z_ref.e_y, z_ref.e_psi);

    LinearizedDynamics lin;
    lin.A = Eigen::Matrix2d::Identity() + delta_s * df_dz;
    lin.B = delta_s * df_du;
    lin.G = delta_s * (f - df_dz * z - df_du * u_ref);
    return lin;
}

/// Nonlinear forward simulation, one Euler step per station.
inline std::vector<VehicleStateZ> rollout(const ReferencePath& path, const VehicleStateZ& z0,
                                          const std::vector<double>& controls) {
    if (controls.size() + 1 > path.size()) {
        throw std::invalid_argument("rollout: more controls than path segments");
    }
    std::vector<VehicleStateZ> states;
    states.reserve(controls.size() + 1);
    states.push_back(z0);
    for (std::size_t i = 0; i < controls.size(); ++i) {
        try {
            const Eigen::Vector2d f = dynamics_rhs(states.back(), controls[i], path.curvatures[i]);
            states.push_back({states.back().e_y + path.delta_s * f(0),
                              states.back().e_psi + path.delta_s * f(1)});
        } catch (const std::domain_error&) {
            throw std::domain_error("rollout: model singularity at station " + std::to_string(i));
        }
    }
    return states;
}

/// Outline samples used by the collision constraints: K equispaced points per
/// full-body edge, M per wheelbase edge, both sides, plus the 4 body corners.
/// Endpoints are always included; corner order is front-left, front-right,
/// rear-left, rear-right.
inline std::vector<BodyPointSpec> body_sample_points(const VehicleGeometry& geom, int K, int M) {
    if (K < 2 || M < 2) {
        throw std::invalid_argument("body_sample_points: K and M must be >= 2");
    }
    geom.validate();
    const double half_w = geom.width / 2.0;
    const double rear = geom.rear_offset();
    const double front = geom.front_offset();

    std::vector<BodyPointSpec> pts;
    pts.reserve(2 * (K + M) + 4);
    for (int side = 0; side < 2; ++side) {
        const double lat = (side == 0) ? half_w : -half_w;
        const auto tag = (side == 0) ? BodyPointTag::edge_left : BodyPointTag::edge_right;
        for (int k = 0; k < K; ++k) {
            const double l = rear + (front - rear) * k / (K - 1);
            pts.push_back({l, lat, tag});
        }
    }
    for (int side = 0; side < 2; ++side) {
        const double lat = (side == 0) ? half_w : -half_w;
        const auto tag = (side == 0) ? BodyPointTag::wheelbase_left : BodyPointTag::wheelbase_right;
        for (int m = 0; m < M; ++m) {
            const double l = geom.wheelbase * m / (M - 1);
            pts.push_back({l, lat, tag});
        }
    }
    pts.push_back({front, half_w, BodyPointTag::corner});
    pts.push_back({front, -half_w, BodyPointTag::corner});
    pts.push_back({rear, half_w, BodyPointTag::corner});
    pts.push_back({rear, -half_w, BodyPointTag::corner});
    return pts;
}

}  // namespace buspath
