// Linear-algebra primitives: hat/vee maps and rotation matrices.
//
// Sign conventions used throughout the library:
//   hat(v) * w == v.cross(w)
//   vee(hat(v)) == v
//   rotations map body-frame vectors into the world frame.
#pragma once

#include <Eigen/Dense>

namespace qcr {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kSkewTolerance = 1e-9;
inline constexpr double kSO3Tolerance = 1e-9;

/// Skew-symmetric matrix such that hat(v) * w == v x w.
///
///          [  0  -z   y ]
/// hat(v) = [  z   0  -x ]
///          [ -y   x   0 ]
Mat3 hat(const Vec3& v);

/// Inverse of hat(). Throws NonSkewInput when |M + M^T| exceeds the tolerance
/// in any entry.
Vec3 vee(const Mat3& m, double tolerance = kSkewTolerance);

/// Frobenius norm of R^T R - I.
double orthogonality_error(const Mat3& r);

/// Element of SO(3). Construction validates orthonormality and det = +1.
class Rotation {
public:
    Rotation() : m_(Mat3::Identity()) {}
    explicit Rotation(const Mat3& m);

    static Rotation identity() { return Rotation(); }

    /// Nearest rotation in the Frobenius sense (polar decomposition). Used to
    /// remove integration drift.
    static Rotation project(const Mat3& m);

    const Mat3& matrix() const { return m_; }
    Rotation transpose() const;

    Vec3 operator*(const Vec3& v) const { return m_ * v; }
    Rotation operator*(const Rotation& other) const;

    /// Heading of the body x axis projected onto the world xy plane.
    double yaw() const;

private:
    struct Unchecked {};
    Rotation(const Mat3& m, Unchecked) : m_(m) {}

    Mat3 m_;
};

/// Rotation about the z axis by psi radians (counter-clockwise).
Rotation rot_z(double psi);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

bool all_finite(const Vec3& v);
bool all_finite(const Mat3& m);

}  // namespace qcr
