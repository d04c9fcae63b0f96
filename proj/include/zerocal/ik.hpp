#ifndef ZEROCAL_IK_HPP
#define ZEROCAL_IK_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "zerocal/errors.hpp"
#include "zerocal/geometry.hpp"
#include "zerocal/kinematics.hpp"

namespace zerocal {

// Analytical inverse kinematics for the 7-DoF S-R-S topology of
// reference_chain(): spherical shoulder (joints 1-3 meeting at (0,0,d1)),
// elbow joint 4, spherical wrist (joints 5-7), flange d7 past the wrist.
//
// With the chain's alternating alpha = -/+ pi/2 pattern, the shoulder and
// wrist rotation triples both reduce to ZYZ Euler decompositions:
//   Rz(t1) Rx(-pi/2) Rz(t2) Rx(+pi/2) Rz(t3) = Rz(t1) Ry(t2) Rz(t3)
// which gives two discrete branches each; the elbow angle follows from the
// law of cosines (two branches); the remaining self-motion is parameterized
// by an arm angle rotating the t3=0 reference solution about the
// shoulder-wrist axis. Up to 2*2*2 = 8 solutions per arm angle.

struct IKRequest {
    Pose target;                    // flange pose in the base frame
    std::vector<double> arm_angles; // redundancy angles, each in (-pi, pi]

    void validate() const {
        if (arm_angles.empty()) throw ConfigError("IKRequest: arm_angles empty");
        for (double a : arm_angles)
            if (!(a > -kPi - 1e-12 && a <= kPi + 1e-12))
                throw ConfigError("IKRequest: arm angle outside (-pi, pi]");
    }
};

// (shoulder, elbow, wrist) branch signs.
struct BranchLabel {
    int shoulder = +1;
    int elbow = +1;
    int wrist = +1;

    int index() const { return (shoulder < 0 ? 4 : 0) + (elbow < 0 ? 2 : 0) + (wrist < 0 ? 1 : 0); }
    std::string str() const {
        std::string s;
        s += shoulder > 0 ? '+' : '-';
        s += elbow > 0 ? '+' : '-';
        s += wrist > 0 ? '+' : '-';
        return s;
    }
};

struct IKDiagnostics {
    int out_of_limits = 0;
    int duplicates = 0;
    int singular_collapsed = 0;  // branch pairs merged at a singularity
    int fk_mismatch = 0;

    IKDiagnostics& operator+=(const IKDiagnostics& o) {
        out_of_limits += o.out_of_limits;
        duplicates += o.duplicates;
        singular_collapsed += o.singular_collapsed;
        fk_mismatch += o.fk_mismatch;
        return *this;
    }
};

struct IKSolution {
    JointConfig config;
    BranchLabel label;
    double arm_angle = 0.0;
    int arm_index = 0;  // position of arm_angle in the request list
};

struct IKSolutionSet {
    std::vector<IKSolution> solutions;
    IKDiagnostics diagnostics;
};

namespace detail {

struct SrsGeometry {
    double d1, d3, d5, d7;
};

inline SrsGeometry check_srs_topology(const DHChain& chain) {
    if (chain.dof() != 7) throw TopologyError("S-R-S IK requires a 7-joint chain");
    const double half_pi = kPi / 2.0;
    const double expected_alpha[7] = {-half_pi, half_pi, -half_pi, half_pi, -half_pi, half_pi, 0.0};
    for (int i = 0; i < 7; ++i) {
        const DHJoint& j = chain.joints[i];
        if (std::abs(j.a_mm) > 1e-9)
            throw TopologyError("S-R-S IK requires a=0 for every joint");
        if (std::abs(j.alpha_rad - expected_alpha[i]) > 1e-9)
            throw TopologyError("S-R-S IK requires alternating alpha = -/+ pi/2, alpha7 = 0");
    }
    if (std::abs(chain.joints[1].d_mm) > 1e-9 || std::abs(chain.joints[3].d_mm) > 1e-9 ||
        std::abs(chain.joints[5].d_mm) > 1e-9)
        throw TopologyError("S-R-S IK requires d2 = d4 = d6 = 0");
    SrsGeometry g{chain.joints[0].d_mm, chain.joints[2].d_mm, chain.joints[4].d_mm,
                  chain.joints[6].d_mm};
    if (g.d3 <= 0.0 || g.d5 <= 0.0)
        throw TopologyError("S-R-S IK requires positive upper/forearm lengths d3, d5");
    return g;
}

struct ZyzTriple {
    double a, b, c;
};

// Both decompositions of M = Rz(a) Ry(b) Rz(c). At the b = 0 or pi
// singularity the free angle a is fixed to 0 and a single triple is
// returned (collapsed = true).
inline int zyz_decompose(const Matrix3d& m, ZyzTriple out[2], bool& collapsed) {
    const double sb = std::hypot(m(0, 2), m(1, 2));
    if (sb < 1e-9) {
        collapsed = true;
        if (m(2, 2) > 0.0) {
            out[0] = {0.0, 0.0, std::atan2(m(1, 0), m(0, 0))};
        } else {
            out[0] = {0.0, kPi, std::atan2(m(1, 0), m(1, 1))};
        }
        return 1;
    }
    collapsed = false;
    const double b = std::atan2(sb, m(2, 2));
    const double a = std::atan2(m(1, 2), m(0, 2));
    const double c = std::atan2(m(2, 1), -m(2, 0));
    out[0] = {a, b, c};
    out[1] = {wrap_angle(a + kPi), -b, wrap_angle(c + kPi)};
    return 2;
}

// Reference shoulder solution (t3 = 0) carrying the wrist center to u, and
// the frame-3 rotation it induces. phi is the in-plane elbow offset angle.
inline Matrix3d reference_r03(const Vector3d& u, double t4, const SrsGeometry& g) {
    const double phi = std::atan2(g.d5 * std::sin(t4), g.d3 + g.d5 * std::cos(t4));
    const double rho = std::hypot(u.x(), u.y());
    double t1r, t2r;
    if (rho < 1e-12) {
        t1r = 0.0;
        t2r = (u.z() > 0.0 ? 0.0 : kPi) - phi;
    } else {
        t1r = std::atan2(u.y(), u.x());
        t2r = std::atan2(rho, u.z()) - phi;
    }
    return rot_z(t1r) * rot_y(t2r) * rot_x(-kPi / 2.0);
}

}  // namespace detail

// All discrete joint solutions reaching `target` at the requested arm
// angles. Out-of-limit, duplicate, and FK-inconsistent branches are dropped
// and tallied in the returned diagnostics.
inline IKSolutionSet solve_ik(const DHChain& chain, const IKRequest& request) {
    using namespace detail;
    request.validate();
    const SrsGeometry g = check_srs_topology(chain);

    IKSolutionSet result;
    const Vector3d shoulder(0.0, 0.0, g.d1);
    const Vector3d wrist = request.target.translation -
                           g.d7 * request.target.rotation.col(2);
    const Vector3d x_sw = wrist - shoulder;
    const double reach = x_sw.norm();
    if (reach > g.d3 + g.d5 + 1e-9)
        throw UnreachableError("wrist center beyond maximum reach");
    if (reach < std::abs(g.d3 - g.d5) - 1e-9 || reach < 1e-9)
        throw UnreachableError("wrist center inside minimum-reach shell");
    const Vector3d u = x_sw / reach;

    const double c4 =
        std::clamp((reach * reach - g.d3 * g.d3 - g.d5 * g.d5) / (2.0 * g.d3 * g.d5), -1.0, 1.0);
    const double elbow_mag = std::acos(c4);
    double elbow_angles[2] = {elbow_mag, -elbow_mag};
    int n_elbow = 2;
    if (elbow_mag < 1e-9 || kPi - elbow_mag < 1e-9) {
        n_elbow = 1;  // straight or folded arm: single elbow branch
        elbow_angles[0] = elbow_mag < 1e-9 ? 0.0 : kPi;
        result.diagnostics.singular_collapsed += 1;
    }

    std::vector<IKSolution> batch;
    for (int ai = 0; ai < static_cast<int>(request.arm_angles.size()); ++ai) {
        const double psi = request.arm_angles[ai];
        batch.clear();
        for (int ei = 0; ei < n_elbow; ++ei) {
            const double t4 = elbow_angles[ei];
            const Matrix3d r03 = rot_axis(u, psi) * reference_r03(u, t4, g);

            ZyzTriple shoulder_t[2];
            bool collapsed_s = false;
            const int ns = zyz_decompose(r03 * rot_x(kPi / 2.0), shoulder_t, collapsed_s);
            if (collapsed_s) result.diagnostics.singular_collapsed += 1;

            for (int si = 0; si < ns; ++si) {
                const Matrix3d r04 = r03 * rot_z(t4) * rot_x(kPi / 2.0);
                ZyzTriple wrist_t[2];
                bool collapsed_w = false;
                const int nw = zyz_decompose(r04.transpose() * request.target.rotation, wrist_t,
                                             collapsed_w);
                if (collapsed_w) result.diagnostics.singular_collapsed += 1;

                for (int wi = 0; wi < nw; ++wi) {
                    const double t[7] = {shoulder_t[si].a, shoulder_t[si].b, shoulder_t[si].c,
                                         t4,               wrist_t[wi].a,    wrist_t[wi].b,
                                         wrist_t[wi].c};
                    Eigen::VectorXd q(7);
                    for (int i = 0; i < 7; ++i)
                        q[i] = wrap_angle(t[i] - chain.zero_offsets_rad[i] -
                                          chain.joints[i].theta_home_rad);
                    JointConfig cfg(q);
                    if (!chain.within_limits(cfg)) {
                        result.diagnostics.out_of_limits += 1;
                        continue;
                    }
                    const Pose fk = forward_kinematics(chain, cfg);
                    if ((fk.translation - request.target.translation).norm() > 1e-6 ||
                        (fk.rotation - request.target.rotation).norm() > 1e-9) {
                        result.diagnostics.fk_mismatch += 1;
                        continue;
                    }
                    BranchLabel label{std::sin(t[1]) >= 0.0 ? +1 : -1, t4 >= 0.0 ? +1 : -1,
                                      std::sin(t[5]) >= 0.0 ? +1 : -1};
                    batch.push_back({std::move(cfg), label, psi, ai});
                }
            }
        }
        std::stable_sort(batch.begin(), batch.end(), [](const IKSolution& a, const IKSolution& b) {
            return a.label.index() < b.label.index();
        });
        for (auto& sol : batch) {
            bool dup = false;
            for (const auto& kept : result.solutions) {
                double max_diff = 0.0;
                for (int i = 0; i < 7; ++i)
                    max_diff = std::max(
                        max_diff, std::abs(wrap_angle(sol.config[i] - kept.config[i])));
                if (max_diff < 1e-9) {
                    dup = true;
                    break;
                }
            }
            if (dup)
                result.diagnostics.duplicates += 1;
            else
                result.solutions.push_back(std::move(sol));
        }
    }
    return result;
}

// Arm angle of an existing configuration: the rotation about the
// shoulder-wrist axis separating it from the t3 = 0 reference solution.
// solve_ik at this angle reproduces the configuration.
inline double arm_angle_of(const DHChain& chain, const JointConfig& q) {
    using namespace detail;
    const SrsGeometry g = check_srs_topology(chain);
    if (q.size() != 7) throw DimensionError("arm_angle_of: configuration length != 7");

    double t[7];
    for (int i = 0; i < 7; ++i)
        t[i] = q[i] + chain.zero_offsets_rad[i] + chain.joints[i].theta_home_rad;

    const Matrix3d r02 = rot_z(t[0]) * rot_x(-kPi / 2.0) * rot_z(t[1]) * rot_x(kPi / 2.0);
    const Matrix3d r03 = r02 * rot_z(t[2]) * rot_x(-kPi / 2.0);
    const Matrix3d r04 = r03 * rot_z(t[3]) * rot_x(kPi / 2.0);
    const Vector3d shoulder(0.0, 0.0, g.d1);
    const Vector3d wrist = shoulder + g.d3 * r02.col(2) + g.d5 * r04.col(2);
    const Vector3d x_sw = wrist - shoulder;
    const double reach = x_sw.norm();
    if (reach < 1e-9) throw UnreachableError("arm_angle_of: wrist center at the shoulder");
    const Vector3d u = x_sw / reach;

    const Matrix3d rel = r03 * reference_r03(u, t[3], g).transpose();
    const Vector3d vee(0.5 * (rel(2, 1) - rel(1, 2)), 0.5 * (rel(0, 2) - rel(2, 0)),
                       0.5 * (rel(1, 0) - rel(0, 1)));
    return std::atan2(u.dot(vee), 0.5 * (rel.trace() - 1.0));
}

// Evenly spaced redundancy angles avoiding the +/-pi seam.
inline std::vector<double> default_arm_angles(int n = 4) {
    std::vector<double> a(n);
    for (int j = 0; j < n; ++j) a[j] = -kPi + (2.0 * j + 1.0) * kPi / n;
    return a;
}

struct ConfigEntry {
    int pose_index = 0;
    JointConfig config;
    BranchLabel label;
    double arm_angle = 0.0;
};

struct EnumerationResult {
    std::vector<ConfigEntry> entries;
    std::vector<std::string> pose_diagnostics;  // one note per skipped pose
    IKDiagnostics totals;
    int skipped_poses = 0;
};

// Batch IK over a pose list, producing the flat configuration list used by
// calibration. Order: pose, then branch label, then arm angle. Per-pose IK
// failures are recorded and skipped, never fatal.
inline EnumerationResult enumerate_configurations(const DHChain& chain,
                                                  const std::vector<Pose>& targets,
                                                  const std::vector<double>& arm_angles) {
    EnumerationResult result;
    for (int pi = 0; pi < static_cast<int>(targets.size()); ++pi) {
        try {
            IKSolutionSet set = solve_ik(chain, {targets[pi], arm_angles});
            result.totals += set.diagnostics;
            std::stable_sort(set.solutions.begin(), set.solutions.end(),
                             [](const IKSolution& a, const IKSolution& b) {
                                 if (a.label.index() != b.label.index())
                                     return a.label.index() < b.label.index();
                                 return a.arm_index < b.arm_index;
                             });
            for (auto& sol : set.solutions)
                result.entries.push_back({pi, std::move(sol.config), sol.label, sol.arm_angle});
        } catch (const Error& e) {
            result.pose_diagnostics.push_back("pose " + std::to_string(pi) + ": " + e.what());
            result.skipped_poses += 1;
        }
    }
    return result;
}

}  // namespace zerocal

#endif  // ZEROCAL_IK_HPP
