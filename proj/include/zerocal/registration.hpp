#ifndef ZEROCAL_REGISTRATION_HPP
#define ZEROCAL_REGISTRATION_HPP

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "zerocal/errors.hpp"
#include "zerocal/geometry.hpp"

namespace zerocal {

// 6-DoF correction applied on top of an initial registration: translation in
// mm plus ZYX Euler offsets (alpha about Z, beta about Y, gamma about X).
struct RegistrationCorrection {
    double x_mm = 0.0;
    double y_mm = 0.0;
    double z_mm = 0.0;
    double alpha_rad = 0.0;
    double beta_rad = 0.0;
    double gamma_rad = 0.0;

    RigidTransform to_transform() const {
        return {euler_zyx_to_rotation(alpha_rad, beta_rad, gamma_rad),
                Vector3d(x_mm, y_mm, z_mm)};
    }

    static RegistrationCorrection from_transform(const RigidTransform& t) {
        const EulerZyx e = rotation_to_euler_zyx(t.rotation);
        return {t.translation.x(), t.translation.y(), t.translation.z(), e.gamma, e.theta, e.phi};
    }

    void validate() const {
        for (double v : {x_mm, y_mm, z_mm, alpha_rad, beta_rad, gamma_rad})
            if (!std::isfinite(v)) throw ConfigError("RegistrationCorrection: non-finite entry");
    }
};

namespace detail {

// Orthonormal frame from three non-collinear points: origin at the first,
// X along second-first, Z along the plane normal, Y completing.
inline RigidTransform frame_from_triple(const std::vector<Vector3d>& p) {
    const Vector3d v1 = p[1] - p[0];
    const Vector3d v2 = p[2] - p[0];
    const Vector3d normal = v1.cross(v2);
    if (0.5 * normal.norm() <= 1e-6)
        throw CollinearPointsError("registration points are collinear (triangle area <= 1e-6)");
    const Vector3d x = v1.normalized();
    const Vector3d z = normal.normalized();
    const Vector3d y = z.cross(x);
    Matrix3d r;
    r.col(0) = x;
    r.col(1) = y;
    r.col(2) = z;
    return {r, p[0]};
}

}  // namespace detail

// Rigid transform mapping R-frame coordinates into N, from one point triple
// expressed in both frames. Exact when the correspondence is truly rigid.
inline RigidTransform register_three_points(const std::vector<Vector3d>& points_n,
                                            const std::vector<Vector3d>& points_r) {
    if (points_n.size() != 3 || points_r.size() != 3)
        throw DimensionError("register_three_points expects exactly 3 points per frame");
    const RigidTransform frame_n = detail::frame_from_triple(points_n);
    const RigidTransform frame_r = detail::frame_from_triple(points_r);
    return frame_n.compose(frame_r.inverse());
}

// T*(theta1) * initial: the correction left-multiplies the registration.
inline RigidTransform corrected_transform(const RigidTransform& initial,
                                          const RegistrationCorrection& theta1) {
    return theta1.to_transform().compose(initial);
}

// Robot-frame point mapped into the reference frame through the corrected
// registration.
inline Vector3d map_robot_point(const RigidTransform& initial,
                                const RegistrationCorrection& theta1,
                                const Vector3d& p_robot_in_r) {
    return corrected_transform(initial, theta1).apply(p_robot_in_r);
}

}  // namespace zerocal

#endif  // ZEROCAL_REGISTRATION_HPP
