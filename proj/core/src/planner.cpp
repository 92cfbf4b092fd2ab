#include "qcr/planner.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "qcr/errors.hpp"

namespace qcr {

namespace {

double falling(int n, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= static_cast<double>(n - i);
    return r;
}

// Row of d^order/dt^order [1, t, ..., t^9] evaluated at t.
Eigen::Matrix<double, 1, kPolyCoeffs> basis_row(double t, int order) {
    Eigen::Matrix<double, 1, kPolyCoeffs> row = Eigen::Matrix<double, 1, kPolyCoeffs>::Zero();
    for (int k = order; k < kPolyCoeffs; ++k) {
        row(k) = falling(k, order) * std::pow(t, k - order);
    }
    return row;
}

double horner(const Coeffs& c, double x, int order) {
    double acc = 0.0;
    for (int k = kPolyCoeffs - 1; k >= order; --k) acc = acc * x + falling(k, order) * c(k);
    return acc;
}

}  // namespace

SnapCost snap_hessian(double duration, double weight) {
    if (!(duration > 0.0)) throw Error("snap_hessian: duration must be > 0");
    SnapCost cost;
    cost.weight = weight;
    cost.Q.setZero();
    for (int i = 4; i < kPolyCoeffs; ++i) {
        for (int j = 4; j < kPolyCoeffs; ++j) {
            const int e = i + j - 7;
            cost.Q(i, j) = weight * falling(i, 4) * falling(j, 4) * std::pow(duration, e) / e;
        }
    }
    return cost;
}

ConstraintSystem constraint_system(const AxisConstraints& c, double duration) {
    ConstraintSystem s;
    s.A.row(0) = basis_row(0.0, 0);
    s.A.row(1) = basis_row(0.0, 1);
    s.A.row(2) = basis_row(duration, 0);
    s.A.row(3) = basis_row(duration, 1);
    s.A.row(4) = basis_row(duration, 2);
    s.b << c.x0, c.v0, c.xd, 0.0, 0.0;
    return s;
}

AxisSolution solve_min_snap_axis(const AxisConstraints& c, double duration, double weight) {
    if (!(duration > 0.0)) throw Error("solve_min_snap: duration must be > 0");
    if (!std::isfinite(c.x0) || !std::isfinite(c.v0) || !std::isfinite(c.xd)) {
        throw Error("solve_min_snap: non-finite endpoint constraints");
    }

    // tau = t / T: velocity constraints scale by T, cost by T^-7.
    const AxisConstraints scaled{c.x0, c.v0 * duration, c.xd};
    const ConstraintSystem cs = constraint_system(scaled, 1.0);
    const SnapMatrix q = snap_hessian(1.0, weight).Q;

    constexpr int n = kPolyCoeffs + kEndpointRows;
    Eigen::Matrix<double, n, n> kkt = Eigen::Matrix<double, n, n>::Zero();
    kkt.topLeftCorner<kPolyCoeffs, kPolyCoeffs>() = 2.0 * q;
    kkt.topRightCorner<kPolyCoeffs, kEndpointRows>() = cs.A.transpose();
    kkt.bottomLeftCorner<kEndpointRows, kPolyCoeffs>() = cs.A;
    Eigen::Matrix<double, n, 1> rhs = Eigen::Matrix<double, n, 1>::Zero();
    rhs.tail<kEndpointRows>() = cs.b;

    const Eigen::FullPivLU<Eigen::Matrix<double, n, n>> lu(kkt);
    if (!lu.isInvertible() || 1.0 / lu.rcond() > kMaxKktCondition) {
        throw IllConditioned("solve_min_snap: KKT system is ill-conditioned");
    }
    const Eigen::Matrix<double, n, 1> sol = lu.solve(rhs);

    AxisSolution out;
    out.normalized = sol.head<kPolyCoeffs>();
    out.multipliers = sol.tail<kEndpointRows>();
    double scale = 1.0;
    for (int k = 0; k < kPolyCoeffs; ++k) {
        out.p(k) = out.normalized(k) / scale;
        scale *= duration;
    }
    out.cost = out.normalized.dot(q * out.normalized) / std::pow(duration, 7);
    return out;
}

PolySegment::PolySegment(std::array<Coeffs, 3> normalized, double duration, double start_time,
                         double yaw, Vec3 target)
    : normalized_(std::move(normalized)),
      duration_(duration),
      start_time_(start_time),
      yaw_(yaw),
      target_(std::move(target)) {
    if (!(duration_ > 0.0)) throw Error("PolySegment: duration must be > 0");
}

Coeffs PolySegment::coefficients(int axis) const {
    Coeffs p;
    double scale = 1.0;
    for (int k = 0; k < kPolyCoeffs; ++k) {
        p(k) = normalized_coefficients(axis)(k) / scale;
        scale *= duration_;
    }
    return p;
}

PolySegment solve_min_snap(const EndpointConstraints& c, double duration, double yaw,
                           double start_time) {
    std::array<Coeffs, 3> coeffs;
    for (int i = 0; i < 3; ++i) {
        coeffs[static_cast<std::size_t>(i)] = solve_min_snap_axis(c.axis(i), duration).normalized;
    }
    return PolySegment(coeffs, duration, start_time, yaw, c.xd);
}

Vec3 recovery_target(const Vec3& x0, const Rotation& attitude, const DetectionEvent& event,
                     double k_dist) {
    const Vec3 offset_body = rot_z(event.orientation) * Vec3(-k_dist * event.intensity, 0.0, 0.0);
    Vec3 target = x0 + attitude * offset_body;
    target.z() = x0.z();
    return target;
}

double time_allocation(const Vec3& x0, const Vec3& xd, double v_max, double a_max, double t_min) {
    if (!(v_max > 0.0 && a_max > 0.0)) throw Error("time_allocation: limits must be > 0");
    const double d = (xd - x0).norm();
    return std::max({1.5 * d / v_max, 2.0 * std::sqrt(d / a_max), t_min});
}

FlatReference eval(const PolySegment& seg, double t) {
    FlatReference ref;
    ref.yaw = seg.yaw();
    if (t >= seg.duration()) {
        ref.position = seg.target();
        return ref;
    }
    const double duration = seg.duration();
    const double tau = std::max(t, 0.0) / duration;
    for (int i = 0; i < 3; ++i) {
        const Coeffs& c = seg.normalized_coefficients(i);
        ref.position[i] = horner(c, tau, 0);
        ref.velocity[i] = horner(c, tau, 1) / duration;
        ref.acceleration[i] = horner(c, tau, 2) / (duration * duration);
    }
    return ref;
}

}  // namespace qcr
