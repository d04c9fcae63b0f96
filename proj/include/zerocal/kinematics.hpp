#ifndef ZEROCAL_KINEMATICS_HPP
#define ZEROCAL_KINEMATICS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "zerocal/errors.hpp"
#include "zerocal/geometry.hpp"

namespace zerocal {

enum class JointKind { revolute };

// One revolute joint in the standard (distal) DH convention:
//   A_i = Rz(theta) Tz(d) Tx(a) Rx(alpha),  theta = q + zero_offset + theta_home.
struct DHJoint {
    double a_mm = 0.0;
    double alpha_rad = 0.0;
    double d_mm = 0.0;
    double theta_home_rad = 0.0;
    JointKind kind = JointKind::revolute;

    void validate() const {
        if (kind != JointKind::revolute)
            throw ConfigError("DHJoint: only revolute joints are supported");
        if (!std::isfinite(a_mm) || !std::isfinite(d_mm))
            throw ConfigError("DHJoint: a/d must be finite");
        if (!(alpha_rad > -kPi - 1e-12 && alpha_rad <= kPi + 1e-12) || !std::isfinite(alpha_rad))
            throw ConfigError("DHJoint: alpha outside (-pi, pi]");
        if (!(theta_home_rad > -kPi - 1e-12 && theta_home_rad <= kPi + 1e-12) ||
            !std::isfinite(theta_home_rad))
            throw ConfigError("DHJoint: theta_home outside (-pi, pi]");
    }
};

struct JointLimits {
    double min_rad = -kPi;
    double max_rad = kPi;
};

// Joint angles commanded to a chain, radians.
struct JointConfig {
    Eigen::VectorXd angles;

    JointConfig() = default;
    explicit JointConfig(Eigen::VectorXd a) : angles(std::move(a)) {}
    int size() const { return static_cast<int>(angles.size()); }
    double operator[](int i) const { return angles[i]; }
};

// Serial chain with additive joint zero-offsets. Immutable in use; all
// operations on it are pure.
struct DHChain {
    std::string name;
    std::vector<DHJoint> joints;
    Eigen::VectorXd zero_offsets_rad;  // delta-theta per joint
    std::vector<JointLimits> joint_limits;
    std::map<std::string, Vector3d> tool_points_mm;  // named points in the flange frame

    int dof() const { return static_cast<int>(joints.size()); }

    void validate() const {
        const int k = dof();
        if (zero_offsets_rad.size() != k)
            throw DimensionError("DHChain: zero_offsets length != joint count");
        if (static_cast<int>(joint_limits.size()) != k)
            throw DimensionError("DHChain: joint_limits length != joint count");
        for (const auto& j : joints) j.validate();
        for (const auto& l : joint_limits)
            if (!(l.min_rad < l.max_rad)) throw ConfigError("DHChain: joint limit min >= max");
        for (const auto& [name_, p] : tool_points_mm)
            if (!p.allFinite()) throw ConfigError("DHChain: tool point '" + name_ + "' not finite");
    }

    bool within_limits(const JointConfig& q) const {
        for (int i = 0; i < dof(); ++i)
            if (q[i] < joint_limits[i].min_rad || q[i] > joint_limits[i].max_rad) return false;
        return true;
    }

    void check_config(const JointConfig& q) const {
        if (q.size() != dof()) throw DimensionError("joint configuration length != chain dof");
        for (int i = 0; i < dof(); ++i)
            if (q[i] < joint_limits[i].min_rad || q[i] > joint_limits[i].max_rad)
                throw JointLimitError("joint " + std::to_string(i + 1) + " out of limits");
    }

    DHChain with_offsets(const Eigen::VectorXd& offsets_rad) const {
        if (offsets_rad.size() != dof())
            throw DimensionError("zero-offset vector length != chain dof");
        DHChain c = *this;
        c.zero_offsets_rad = offsets_rad;
        return c;
    }
};

// Rotation block of one DH transform, Rz(theta)*Rx(alpha).
inline Matrix3d dh_rotation(double theta, double alpha) {
    const double ct = std::cos(theta), st = std::sin(theta);
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    Matrix3d r;
    r << ct, -st * ca, st * sa,
         st, ct * ca, -ct * sa,
         0.0, sa, ca;
    return r;
}

// Flange pose in the base frame: composition of the k DH transforms with the
// zero-offsets added to the commanded angles.
inline Pose forward_kinematics(const DHChain& chain, const JointConfig& q) {
    chain.check_config(q);
    Matrix3d r = Matrix3d::Identity();
    Vector3d p = Vector3d::Zero();
    for (int i = 0; i < chain.dof(); ++i) {
        const DHJoint& j = chain.joints[i];
        const double theta = q[i] + chain.zero_offsets_rad[i] + j.theta_home_rad;
        const double ct = std::cos(theta), st = std::sin(theta);
        // translation of A_i expressed in frame i-1: (a ct, a st, d)
        p += r * Vector3d(j.a_mm * ct, j.a_mm * st, j.d_mm);
        r *= dh_rotation(theta, j.alpha_rad);
    }
    return {r, p};
}

// Position of a named flange-frame point in the base frame.
inline Vector3d tool_point(const DHChain& chain, const JointConfig& q,
                           const std::string& point_name) {
    const auto it = chain.tool_points_mm.find(point_name);
    if (it == chain.tool_points_mm.end())
        throw UnknownToolPointError("unknown tool point '" + point_name + "'");
    const Pose flange = forward_kinematics(chain, q);
    return flange.apply(it->second);
}

// Built-in 7-DoF S-R-S reference arm: spherical shoulder at (0,0,d1),
// elbow joint 4, spherical wrist at distance d3+d5 max from the shoulder,
// flange d7 beyond the wrist along the last axis. Two markers sit 100 mm
// either side of the flange center so the last joint stays observable.
inline DHChain reference_chain() {
    DHChain c;
    c.name = "srs7_reference";
    const double half_pi = kPi / 2.0;
    const double d[7] = {340.0, 0.0, 400.0, 0.0, 400.0, 0.0, 126.0};
    const double alpha[7] = {-half_pi, half_pi, -half_pi, half_pi, -half_pi, half_pi, 0.0};
    const double lim_deg[7] = {170.0, 120.0, 170.0, 120.0, 170.0, 120.0, 175.0};
    for (int i = 0; i < 7; ++i) {
        c.joints.push_back({0.0, alpha[i], d[i], 0.0});
        c.joint_limits.push_back({-deg2rad(lim_deg[i]), deg2rad(lim_deg[i])});
    }
    c.zero_offsets_rad = Eigen::VectorXd::Zero(7);
    c.tool_points_mm["flange"] = Vector3d(0, 0, 0);
    c.tool_points_mm["marker_a"] = Vector3d(100.0, 0.0, 0.0);
    c.tool_points_mm["marker_b"] = Vector3d(-100.0, 0.0, 0.0);
    c.validate();
    return c;
}

}  // namespace zerocal

#endif  // ZEROCAL_KINEMATICS_HPP
