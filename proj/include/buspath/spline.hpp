#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "buspath/geometry.hpp"

namespace buspath {

/// Natural cubic spline through (t_i, y_i) with strictly increasing knots.
class CubicSpline1D {
public:
    CubicSpline1D() = default;

    CubicSpline1D(std::vector<double> knots, std::vector<double> values)
        : t_(std::move(knots)), y_(std::move(values)) {
        const std::size_t n = t_.size();
        if (n < 2 || y_.size() != n) {
            throw std::invalid_argument("CubicSpline1D: need >= 2 knots and matching values");
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (!(t_[i + 1] > t_[i])) {
                throw std::invalid_argument("CubicSpline1D: knots must be strictly increasing");
            }
        }
        m_.assign(n, 0.0);
        if (n == 2) return;  // linear segment, second derivatives stay zero

        // Tridiagonal system for interior second derivatives, natural ends.
        std::vector<double> diag(n, 2.0), rhs(n, 0.0), sub(n, 0.0), sup(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = t_[i] - t_[i - 1];
            const double h1 = t_[i + 1] - t_[i];
            sub[i] = h0 / (h0 + h1);
            sup[i] = h1 / (h0 + h1);
            rhs[i] = 6.0 / (h0 + h1) *
                     ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
        }
        // Thomas algorithm over indices 1..n-2.
        for (std::size_t i = 2; i + 1 < n; ++i) {
            const double w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        for (std::size_t i = n - 2; i >= 1; --i) {
            const double upper = (i + 2 < n) ? sup[i] * m_[i + 1] : 0.0;
            m_[i] = (rhs[i] - upper) / diag[i];
            if (i == 1) break;
        }
    }

    double eval(double t) const {
        const auto [i, h, a] = locate(t);
        const double b = 1.0 - a;
        return b * y_[i] + a * y_[i + 1] +
               h * h / 6.0 * ((b * b * b - b) * m_[i] + (a * a * a - a) * m_[i + 1]);
    }

    double deriv(double t) const {
        const auto [i, h, a] = locate(t);
        const double b = 1.0 - a;
        return (y_[i + 1] - y_[i]) / h +
               h / 6.0 * ((3.0 * a * a - 1.0) * m_[i + 1] - (3.0 * b * b - 1.0) * m_[i]);
    }

    double deriv2(double t) const {
        const auto [i, h, a] = locate(t);
        return (1.0 - a) * m_[i] + a * m_[i + 1];
    }

    double t_min() const { return t_.front(); }
    double t_max() const { return t_.back(); }

private:
    struct Segment {
        std::size_t i;
        double h;
        double a;  // normalized offset in [0, 1]
    };

    Segment locate(double t) const {
        // Clamped evaluation: queries slightly outside the knot range use the
        // boundary segment's polynomial.
        const auto it = std::upper_bound(t_.begin(), t_.end(), t);
        std::size_t i = (it == t_.begin()) ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
        i = std::min(i, t_.size() - 2);
        const double h = t_[i + 1] - t_[i];
        return {i, h, (t - t_[i]) / h};
    }

    std::vector<double> t_;
    std::vector<double> y_;
    std::vector<double> m_;  // second derivatives at knots
};

/// Planar curve t -> (x(t), y(t)) built from two cubic splines over a chordal
/// parameter. Provides analytic curvature and arclength inversion.
class PlanarSpline {
public:
    explicit PlanarSpline(const std::vector<CartesianPoint>& waypoints) {
        if (waypoints.size() < 2) {
            throw std::invalid_argument("PlanarSpline: need at least 2 waypoints");
        }
        std::vector<double> t(waypoints.size(), 0.0);
        std::vector<double> xs(waypoints.size()), ys(waypoints.size());
        xs[0] = waypoints[0].x();
        ys[0] = waypoints[0].y();
        for (std::size_t i = 1; i < waypoints.size(); ++i) {
            const double chord = (waypoints[i] - waypoints[i - 1]).norm();
            if (chord < 1e-12) {
                throw std::invalid_argument("PlanarSpline: duplicate consecutive waypoints");
            }
            t[i] = t[i - 1] + chord;
            xs[i] = waypoints[i].x();
            ys[i] = waypoints[i].y();
        }
        knots_ = t;
        sx_ = CubicSpline1D(t, std::move(xs));
        sy_ = CubicSpline1D(t, std::move(ys));
        build_arclength_table();
    }

    CartesianPoint position(double t) const { return {sx_.eval(t), sy_.eval(t)}; }

    Eigen::Vector2d derivative(double t) const { return {sx_.deriv(t), sy_.deriv(t)}; }

    double heading(double t) const {
        const auto d = derivative(t);
        return std::atan2(d.y(), d.x());
    }

    /// Signed curvature, positive when the curve bends left.
    double curvature(double t) const {
        const double x1 = sx_.deriv(t), y1 = sy_.deriv(t);
        const double x2 = sx_.deriv2(t), y2 = sy_.deriv2(t);
        const double speed2 = x1 * x1 + y1 * y1;
        return (x1 * y2 - y1 * x2) / (speed2 * std::sqrt(speed2));
    }

    double total_arclength() const { return cum_length_.back(); }

    /// Invert s -> t by Newton iteration seeded from the per-knot table.
    double param_at_arclength(double s) const {
        s = std::clamp(s, 0.0, total_arclength());
        const auto it = std::upper_bound(cum_length_.begin(), cum_length_.end(), s);
        std::size_t i = (it == cum_length_.begin())
                            ? 0
                            : static_cast<std::size_t>(it - cum_length_.begin()) - 1;
        i = std::min(i, knots_.size() - 2);
        double lo = knots_[i], hi = knots_[i + 1];
        double t = lo + (hi - lo) * (s - cum_length_[i]) /
                            std::max(cum_length_[i + 1] - cum_length_[i], 1e-300);
        for (int iter = 0; iter < 60; ++iter) {
            const double f = cum_length_[i] + segment_length(knots_[i], t) - s;
            if (std::abs(f) < 1e-12) break;
            if (f > 0.0) hi = t; else lo = t;
            const double speed = derivative(t).norm();
            double step = t - f / std::max(speed, 1e-12);
            t = (step > lo && step < hi) ? step : 0.5 * (lo + hi);
        }
        return t;
    }

    double t_min() const { return knots_.front(); }
    double t_max() const { return knots_.back(); }

private:
    // 8-point Gauss-Legendre on [-1, 1].
    static constexpr double kGlNodes[8] = {
        -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
        -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
        0.7966664774136267,  0.9602898564975363};
    static constexpr double kGlWeights[8] = {
        0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
        0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
        0.2223810344533745, 0.1012285362903763};

    double segment_length(double a, double b) const {
        const double c = 0.5 * (a + b), half = 0.5 * (b - a);
        double acc = 0.0;
        for (int k = 0; k < 8; ++k) {
            acc += kGlWeights[k] * derivative(c + half * kGlNodes[k]).norm();
        }
        return acc * half;
    }

    void build_arclength_table() {
        cum_length_.assign(knots_.size(), 0.0);
        for (std::size_t i = 1; i < knots_.size(); ++i) {
            // Subdivide each knot interval so the quadrature stays accurate on
            // strongly curved segments.
            const double a = knots_[i - 1], b = knots_[i];
            double len = 0.0;
            const int pieces = 4;
            for (int p = 0; p < pieces; ++p) {
                len += segment_length(a + (b - a) * p / pieces,
                                      a + (b - a) * (p + 1) / pieces);
            }
            cum_length_[i] = cum_length_[i - 1] + len;
        }
    }

    std::vector<double> knots_;
    std::vector<double> cum_length_;
    CubicSpline1D sx_, sy_;
};

}  // namespace buspath
