#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace buspath {

using CartesianPoint = Eigen::Vector2d;

/// Position plus heading in the global frame. Heading is normalized to (-pi, pi].
struct CartesianPose {
    CartesianPoint position{0.0, 0.0};
    double heading = 0.0;
};

/// Road-aligned coordinates: arclength s along the reference path and signed
/// lateral offset e_y along the path normal (positive to the path's left).
struct FrenetCoord {
    double s = 0.0;
    double e_y = 0.0;
};

/// Thrown when a query point or station falls outside the reference path's
/// domain (beyond either endpoint, or beyond the local center of curvature).
class PathDomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Wrap an angle into (-pi, pi].
inline double normalize_angle(double a) {
    a = std::fmod(a, 2.0 * M_PI);
    if (a <= -M_PI) a += 2.0 * M_PI;
    if (a > M_PI) a -= 2.0 * M_PI;
    return a;
}

/// Left unit normal of a heading direction.
inline Eigen::Vector2d left_normal(double heading) {
    return {-std::sin(heading), std::cos(heading)};
}

inline Eigen::Vector2d tangent_of(double heading) {
    return {std::cos(heading), std::sin(heading)};
}

}  // namespace buspath
