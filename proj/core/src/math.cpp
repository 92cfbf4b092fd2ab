#include "qcr/math.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/SVD>

#include "qcr/errors.hpp"

namespace qcr {

Mat3 hat(const Vec3& v) {
    Mat3 m;
    m << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
         -v.y(), v.x(), 0.0;
    return m;
}

Vec3 vee(const Mat3& m, double tolerance) {
    const double asym = (m + m.transpose()).cwiseAbs().maxCoeff();
    if (!(asym <= tolerance)) {
        throw NonSkewInput("vee: matrix is not skew-symmetric (|M+M^T|max = " +
                           std::to_string(asym) + ")");
    }
    return {m(2, 1), m(0, 2), m(1, 0)};
}

double orthogonality_error(const Mat3& r) {
    return (r.transpose() * r - Mat3::Identity()).norm();
}

Rotation::Rotation(const Mat3& m) : m_(m) {
    if (!all_finite(m) || orthogonality_error(m) > kSO3Tolerance ||
        std::abs(m.determinant() - 1.0) > kSO3Tolerance) {
        throw Error("Rotation: matrix is not a member of SO(3)");
    }
}

Rotation Rotation::project(const Mat3& m) {
    if (!all_finite(m)) {
        throw NonFiniteState("Rotation::project: non-finite matrix");
    }
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 u = svd.matrixU();
    const Mat3& v = svd.matrixV();
    if ((u * v.transpose()).determinant() < 0.0) {
        u.col(2) = -u.col(2);
    }
    return Rotation(u * v.transpose(), Unchecked{});
}

Rotation Rotation::transpose() const { return Rotation(m_.transpose(), Unchecked{}); }

Rotation Rotation::operator*(const Rotation& other) const {
    return Rotation(m_ * other.m_, Unchecked{});
}

double Rotation::yaw() const { return std::atan2(m_(1, 0), m_(0, 0)); }

Rotation rot_z(double psi) {
    const double c = std::cos(psi);
    const double s = std::sin(psi);
    Mat3 m;
    m << c, -s, 0.0,
         s, c, 0.0,
         0.0, 0.0, 1.0;
    return Rotation(m);
}

double wrap_angle(double a) {
    constexpr double pi = std::numbers::pi;
    a = std::remainder(a, 2.0 * pi);
    if (a <= -pi) a += 2.0 * pi;
    return a;
}

bool all_finite(const Vec3& v) { return v.allFinite(); }
bool all_finite(const Mat3& m) { return m.allFinite(); }

}  // namespace qcr
