#include "buspath/vehicle_model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_paths.hpp"

using namespace buspath;
using buspath::testing::circle_path;
using buspath::testing::straight_path;

TEST(DynamicsRhs, RestAndTrackingIdentities) {
    const auto at_rest = dynamics_rhs({0.0, 0.0}, 0.0, 0.0);
    EXPECT_DOUBLE_EQ(at_rest(0), 0.0);
    EXPECT_DOUBLE_EQ(at_rest(1), 0.0);

    // Perfect curvature tracking keeps the frame error at zero.
    const auto tracking = dynamics_rhs({0.0, 0.0}, 0.05, 0.05);
    EXPECT_DOUBLE_EQ(tracking(0), 0.0);
    EXPECT_DOUBLE_EQ(tracking(1), 0.0);
}

TEST(DynamicsRhs, HeadingErrorDrivesLateralRate) {
    const auto f = dynamics_rhs({0.0, 0.1}, 0.0, 0.0);
    EXPECT_NEAR(f(0), std::tan(0.1), 1e-12);
    EXPECT_NEAR(f(0), 0.100335, 1e-6);
    EXPECT_NEAR(f(1), 0.0, 1e-12);
}

TEST(DynamicsRhs, SingularityGuards) {
    EXPECT_THROW(dynamics_rhs({0.0, M_PI / 2.0}, 0.0, 0.0), std::domain_error);
    EXPECT_THROW(dynamics_rhs({20.0, 0.0}, 0.0, 0.05), std::domain_error);
}

TEST(Linearize, DoubleIntegratorLimit) {
    const auto lin = linearize({0.0, 0.0}, 0.0, 0.0, 0.5);
    EXPECT_NEAR(lin.A(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(lin.A(0, 1), 0.5, 1e-15);
    EXPECT_NEAR(lin.A(1, 0), 0.0, 1e-15);
    EXPECT_NEAR(lin.A(1, 1), 1.0, 1e-15);
    EXPECT_NEAR(lin.B(0), 0.0, 1e-15);
    EXPECT_NEAR(lin.B(1), 0.5, 1e-15);
    EXPECT_NEAR(lin.G.norm(), 0.0, 1e-15);
}

TEST(Linearize, CurvatureOffsetEntersAffineTerm) {
    const auto lin = linearize({0.0, 0.0}, 0.0, 0.05, 0.5);
    EXPECT_NEAR(lin.A(0, 1), 0.5, 1e-15);
    EXPECT_NEAR(lin.B(1), 0.5, 1e-15);
    EXPECT_NEAR(lin.G(0), 0.0, 1e-15);
    EXPECT_NEAR(lin.G(1), -0.025, 1e-15);
}

TEST(Linearize, JacobiansMatchFiniteDifferences) {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> epsi(-1.0, 1.0);
    std::uniform_real_distribution<double> key(-0.5, 0.5);
    std::uniform_real_distribution<double> kappa_d(-0.1, 0.1);
    std::uniform_real_distribution<double> u_d(-0.08, 0.08);

    const double h = 1e-6;
    for (int trial = 0; trial < 500; ++trial) {
        const double kappa = kappa_d(rng);
        const double e_y = (std::abs(kappa) > 1e-6) ? key(rng) / std::abs(kappa) * 1.0 : key(rng);
        const VehicleStateZ z{e_y, epsi(rng)};
        const double u = u_d(rng);

        Eigen::Matrix2d dz;
        Eigen::Vector2d du;
        dynamics_jacobians(z, u, kappa, dz, du);

        const auto fd_z = [&](int col) {
            VehicleStateZ lo = z, hi = z;
            if (col == 0) { lo.e_y -= h; hi.e_y += h; } else { lo.e_psi -= h; hi.e_psi += h; }
            return ((dynamics_rhs(hi, u, kappa) - dynamics_rhs(lo, u, kappa)) / (2 * h)).eval();
        };
        const Eigen::Vector2d fd_u =
            (dynamics_rhs(z, u + h, kappa) - dynamics_rhs(z, u - h, kappa)) / (2 * h);

        for (int col = 0; col < 2; ++col) {
            const Eigen::Vector2d fd = fd_z(col);
            for (int row = 0; row < 2; ++row) {
                const double scale = std::max(1.0, std::abs(fd(row)));
                EXPECT_NEAR(dz(row, col), fd(row), 1e-6 * scale);
            }
        }
        for (int row = 0; row < 2; ++row) {
            const double scale = std::max(1.0, std::abs(fd_u(row)));
            EXPECT_NEAR(du(row), fd_u(row), 1e-6 * scale);
        }
    }
}

TEST(Linearize, ExactAtReference) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-0.3, 0.3);
    for (int trial = 0; trial < 200; ++trial) {
        const VehicleStateZ z{dist(rng), dist(rng)};
        const double u = 0.2 * dist(rng);
        const double kappa = 0.3 * dist(rng);
        const double ds = 0.5;
        const auto lin = linearize(z, u, kappa, ds);
        const Eigen::Vector2d zvec(z.e_y, z.e_psi);
        const Eigen::Vector2d linear_step = lin.A * zvec + lin.B * u + lin.G;
        const Eigen::Vector2d euler_step = zvec + ds * dynamics_rhs(z, u, kappa);
        EXPECT_NEAR((linear_step - euler_step).cwiseAbs().maxCoeff(), 0.0, 1e-12);
    }
}

TEST(Rollout, StraightAndTrackingIdentities) {
    const auto straight = straight_path(20.0, 0.5);
    const std::vector<double> zeros(straight.size() - 1, 0.0);
    for (const auto& z : rollout(straight, {0.0, 0.0}, zeros)) {
        EXPECT_DOUBLE_EQ(z.e_y, 0.0);
        EXPECT_DOUBLE_EQ(z.e_psi, 0.0);
    }

    const auto circ = circle_path(20.0, 0.5, 90.0);
    std::vector<double> feedforward(circ.curvatures.begin(), circ.curvatures.end() - 1);
    for (const auto& z : rollout(circ, {0.0, 0.0}, feedforward)) {
        EXPECT_LE(std::abs(z.e_y), 1e-9);
        EXPECT_LE(std::abs(z.e_psi), 1e-9);
    }
}

TEST(Rollout, NamesStationOnSingularity) {
    const auto circ = circle_path(10.0, 0.5, 90.0);
    std::vector<double> hard_left(circ.size() - 1, 0.0);
    // Steer hard away until e_psi blows past the singularity.
    for (auto& u : hard_left) u = 2.0;
    try {
        rollout(circ, {0.0, 0.0}, hard_left);
        FAIL() << "expected singularity";
    } catch (const std::domain_error& e) {
        EXPECT_NE(std::string(e.what()).find("station"), std::string::npos);
    }
}

TEST(Rollout, LinearizationErrorIsSecondOrder) {
    const auto circ = circle_path(20.0, 0.5, 90.0);
    const std::size_t n = circ.size() - 1;
    std::vector<double> u_ref(circ.curvatures.begin(), circ.curvatures.end() - 1);
    const auto z_ref = rollout(circ, {0.0, 0.0}, u_ref);

    const auto linearized_error = [&](double delta) {
        std::vector<double> u = u_ref;
        for (std::size_t i = 0; i < n; ++i) u[i] += delta * std::sin(0.3 * i);
        const auto nonlinear = rollout(circ, {0.0, 0.0}, u);
        // Propagate the same controls through the linearization around the
        // reference trajectory.
        Eigen::Vector2d z(0.0, 0.0);
        double max_err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto lin = linearize(z_ref[i], u_ref[i], circ.curvatures[i], circ.delta_s);
            z = lin.A * z + lin.B * u[i] + lin.G;
            max_err = std::max({max_err, std::abs(z(0) - nonlinear[i + 1].e_y),
                                std::abs(z(1) - nonlinear[i + 1].e_psi)});
        }
        return max_err;
    };

    const double e1 = linearized_error(0.004);
    const double e2 = linearized_error(0.002);
    EXPECT_GT(e1 / e2, 3.0);
    EXPECT_LT(e1 / e2, 5.0);
}

TEST(BodySamplePoints, EndpointsOnlyWhenKIsTwo) {
    const VehicleGeometry geom;
    const auto pts = body_sample_points(geom, 2, 2);
    int edge_count = 0;
    for (const auto& p : pts) {
        if (p.tag == BodyPointTag::edge_left || p.tag == BodyPointTag::edge_right) {
            ++edge_count;
            EXPECT_TRUE(std::abs(p.longitudinal_offset - geom.front_offset()) < 1e-12 ||
                        std::abs(p.longitudinal_offset - geom.rear_offset()) < 1e-12);
        }
    }
    EXPECT_EQ(edge_count, 4);
}

TEST(BodySamplePoints, EquispacedEdgeStations) {
    const VehicleGeometry geom{6.0, 2.55, 2.7, 3.3};
    const auto pts = body_sample_points(geom, 3, 2);
    std::vector<double> left_edges;
    for (const auto& p : pts) {
        if (p.tag == BodyPointTag::edge_left) left_edges.push_back(p.longitudinal_offset);
    }
    ASSERT_EQ(left_edges.size(), 3u);
    EXPECT_NEAR(left_edges[0], -3.3, 1e-12);
    EXPECT_NEAR(left_edges[1], 2.7, 1e-12);  // midpoint of (-3.3, 8.7)
    EXPECT_NEAR(left_edges[2], 8.7, 1e-12);
}

TEST(BodySamplePoints, ExactlyFourCorners) {
    const VehicleGeometry geom;
    const auto pts = body_sample_points(geom, 8, 4);
    int corners = 0;
    for (const auto& p : pts) {
        if (p.tag == BodyPointTag::corner) {
            ++corners;
            EXPECT_TRUE(std::abs(p.longitudinal_offset - geom.front_offset()) < 1e-12 ||
                        std::abs(p.longitudinal_offset - geom.rear_offset()) < 1e-12);
            EXPECT_NEAR(std::abs(p.lateral_offset), geom.width / 2.0, 1e-12);
        }
    }
    EXPECT_EQ(corners, 4);
    EXPECT_EQ(pts.size(), 2u * 8 + 2u * 4 + 4);
}

TEST(SteeringConversion, RoundTrip) {
    const double wheelbase = 6.0;
    const double u_max = 1.0 / 12.0;
    for (double u = -u_max; u <= u_max; u += u_max / 16.0) {
        EXPECT_NEAR(steering_to_curvature(curvature_to_steering(u, wheelbase), wheelbase), u,
                    1e-12);
    }
}
