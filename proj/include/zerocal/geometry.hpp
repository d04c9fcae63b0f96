#ifndef ZEROCAL_GEOMETRY_HPP
#define ZEROCAL_GEOMETRY_HPP

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "zerocal/errors.hpp"

namespace zerocal {

using Eigen::Matrix3d;
using Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    if (a > kPi) a -= 2.0 * kPi;
    return a;
}

// Rigid transform / Cartesian pose: x_out = rotation * x_in + translation.
// Translations are millimeters throughout.
struct Pose {
    Matrix3d rotation = Matrix3d::Identity();
    Vector3d translation = Vector3d::Zero();

    static Pose identity() { return {}; }

    Vector3d apply(const Vector3d& p) const { return rotation * p + translation; }

    Pose compose(const Pose& rhs) const {
        return {rotation * rhs.rotation, rotation * rhs.translation + translation};
    }

    Pose inverse() const {
        Matrix3d rt = rotation.transpose();
        return {rt, -(rt * translation)};
    }

    Eigen::Matrix4d matrix() const {
        Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
        m.topLeftCorner<3, 3>() = rotation;
        m.topRightCorner<3, 1>() = translation;
        return m;
    }

    double orthonormality_error() const {
        const double ortho = (rotation.transpose() * rotation - Matrix3d::Identity()).norm();
        const double det = std::abs(rotation.determinant() - 1.0);
        return std::max(ortho, det);
    }

    bool is_orthonormal(double tol = 1e-9) const { return orthonormality_error() <= tol; }
};

// A registration result has the same representation as a pose; keep the
// domain name used by the calibration model.
using RigidTransform = Pose;

inline Matrix3d rot_x(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Matrix3d m;
    m << 1, 0, 0, 0, c, -s, 0, s, c;
    return m;
}

inline Matrix3d rot_y(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Matrix3d m;
    m << c, 0, s, 0, 1, 0, -s, 0, c;
    return m;
}

inline Matrix3d rot_z(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Matrix3d m;
    m << c, -s, 0, s, c, 0, 0, 0, 1;
    return m;
}

// Rotation of `angle` about a unit axis.
inline Matrix3d rot_axis(const Vector3d& axis, double angle) {
    return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

// ZYX Euler angles: R = Rz(gamma) * Ry(theta) * Rx(phi).
inline Matrix3d euler_zyx_to_rotation(double gamma, double theta, double phi) {
    return rot_z(gamma) * rot_y(theta) * rot_x(phi);
}

struct EulerZyx {
    double gamma;  // about Z
    double theta;  // about Y, in [-pi/2, pi/2]
    double phi;    // about X
};

// Inverse of euler_zyx_to_rotation. At gimbal lock (|theta| = pi/2) gamma is
// fixed to 0 and the remaining freedom folds into phi.
inline EulerZyx rotation_to_euler_zyx(const Matrix3d& r) {
    if (Pose{r, Vector3d::Zero()}.orthonormality_error() > 1e-9) {
        throw NonOrthonormalError("rotation_to_euler_zyx: input is not a rotation matrix");
    }
    const double s_theta = -r(2, 0);
    if (std::abs(s_theta) >= 1.0 - 1e-12) {
        if (s_theta > 0.0) {
            return {0.0, kPi / 2.0, std::atan2(r(0, 1), r(1, 1))};
        }
        return {0.0, -kPi / 2.0, std::atan2(-r(0, 1), r(1, 1))};
    }
    return {std::atan2(r(1, 0), r(0, 0)), std::asin(s_theta), std::atan2(r(2, 1), r(2, 2))};
}

// Uniform random rotation (for tests and sampling utilities): normalized
// quaternion from four standard normals.
template <typename Rng>
Matrix3d random_rotation(Rng& rng) {
    Eigen::Vector4d q;
    for (int i = 0; i < 4; ++i) q[i] = rng.normal();
    q.normalize();
    return Eigen::Quaterniond(q[0], q[1], q[2], q[3]).toRotationMatrix();
}

}  // namespace zerocal

#endif  // ZEROCAL_GEOMETRY_HPP
