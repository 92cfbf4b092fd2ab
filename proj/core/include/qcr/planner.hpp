// Recovery planning: target selection and single-segment minimum-snap
// trajectories solved as an equality-constrained QP.
#pragma once

#include <array>

#include <Eigen/Dense>

#include "qcr/controller.hpp"
#include "qcr/math.hpp"
#include "qcr/sensing.hpp"

namespace qcr {

inline constexpr int kPolyCoeffs = 10;
inline constexpr int kEndpointRows = 5;

using Coeffs = Eigen::Matrix<double, kPolyCoeffs, 1>;
using SnapMatrix = Eigen::Matrix<double, kPolyCoeffs, kPolyCoeffs>;
using ConstraintMatrix = Eigen::Matrix<double, kEndpointRows, kPolyCoeffs>;
using ConstraintVector = Eigen::Matrix<double, kEndpointRows, 1>;

/// Cost matrix Q with p^T Q p = c4 * integral_0^T (P''''(t))^2 dt for the
/// monomial basis 1, t, ..., t^9.
struct SnapCost {
    SnapMatrix Q;
    double weight = 1.0;
};

/// Q_ij = c4 k(i) k(j) T^(i+j-7) / (i+j-7) for i, j >= 4, with
/// k(n) = n (n-1) (n-2) (n-3); zero elsewhere.
SnapCost snap_hessian(double duration, double weight = 1.0);

/// Start position and velocity, end position. End velocity and acceleration
/// are zero; start acceleration is left free.
struct AxisConstraints {
    double x0 = 0.0;
    double v0 = 0.0;
    double xd = 0.0;
};

struct EndpointConstraints {
    Vec3 x0 = Vec3::Zero();
    Vec3 v0 = Vec3::Zero();
    Vec3 xd = Vec3::Zero();

    AxisConstraints axis(int i) const { return {x0[i], v0[i], xd[i]}; }
};

/// A p = b for rows x(0), x'(0), x(T), x'(T), x''(T) in the t basis.
struct ConstraintSystem {
    ConstraintMatrix A;
    ConstraintVector b;
};
ConstraintSystem constraint_system(const AxisConstraints& c, double duration);

struct AxisSolution {
    Coeffs normalized;  // coefficients in tau = t / T
    Coeffs p;           // coefficients in t
    ConstraintVector multipliers;  // KKT multipliers in normalized units
    double cost = 0.0;  // p^T Q p in t units
};

inline constexpr double kMaxKktCondition = 1e12;

/// Solves min p^T Q p s.t. A p = b through the KKT system, in normalized time
/// for conditioning. Throws IllConditioned.
AxisSolution solve_min_snap_axis(const AxisConstraints& c, double duration, double weight = 1.0);

class PolySegment {
public:
    PolySegment() = default;
    PolySegment(std::array<Coeffs, 3> normalized, double duration, double start_time, double yaw,
                Vec3 target);

    double duration() const { return duration_; }
    double start_time() const { return start_time_; }
    double end_time() const { return start_time_ + duration_; }
    double yaw() const { return yaw_; }
    const Vec3& target() const { return target_; }

    /// Coefficients of axis i in the t basis.
    Coeffs coefficients(int axis) const;
    const Coeffs& normalized_coefficients(int axis) const { return normalized_[static_cast<std::size_t>(axis)]; }

private:
    std::array<Coeffs, 3> normalized_{Coeffs::Zero(), Coeffs::Zero(), Coeffs::Zero()};
    double duration_ = 1.0;
    double start_time_ = 0.0;
    double yaw_ = 0.0;
    Vec3 target_ = Vec3::Zero();
};

PolySegment solve_min_snap(const EndpointConstraints& c, double duration, double yaw = 0.0,
                           double start_time = 0.0);

/// Point opposite to the collision, k_dist * C_B away from x0 and at the same
/// height: x0 + R rot_z(Psi_B) (-k_dist C_B, 0, 0) with z reset to x0.z.
Vec3 recovery_target(const Vec3& x0, const Rotation& attitude, const DetectionEvent& event,
                     double k_dist);

inline constexpr double kMinSegmentDuration = 0.5;

/// max(1.5 d / v_max, 2 sqrt(d / a_max), t_min) with d = |xd - x0|.
double time_allocation(const Vec3& x0, const Vec3& xd, double v_max, double a_max,
                       double t_min = kMinSegmentDuration);

/// Reference at local time t in [0, T]; past T it holds the target at rest,
/// before 0 it returns the start. Yaw is the segment's fixed yaw.
FlatReference eval(const PolySegment& seg, double t);

}  // namespace qcr
