#ifndef ZEROCAL_TESTS_FK_ORACLE_HPP
#define ZEROCAL_TESTS_FK_ORACLE_HPP

// Independent forward-kinematics oracle: builds every DH transform as an
// explicit 4x4 matrix and multiplies the chain out with plain loops. Shares
// no code with the production kinematics path.

#include <array>
#include <cmath>

#include "zerocal/kinematics.hpp"

namespace oracle {

using Mat4 = std::array<std::array<double, 4>, 4>;

inline Mat4 identity4() {
    Mat4 m{};
    for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
    return m;
}

inline Mat4 dh_matrix(double a, double alpha, double d, double theta) {
    const double ct = std::cos(theta), st = std::sin(theta);
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    Mat4 m{};
    m[0] = {ct, -st * ca, st * sa, a * ct};
    m[1] = {st, ct * ca, -ct * sa, a * st};
    m[2] = {0.0, sa, ca, d};
    m[3] = {0.0, 0.0, 0.0, 1.0};
    return m;
}

inline Mat4 mul(const Mat4& a, const Mat4& b) {
    Mat4 out{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += a[i][k] * b[k][j];
            out[i][j] = s;
        }
    return out;
}

inline Mat4 fk(const zerocal::DHChain& chain, const zerocal::JointConfig& q) {
    Mat4 t = identity4();
    for (int i = 0; i < chain.dof(); ++i) {
        const auto& j = chain.joints[i];
        const double theta = q[i] + chain.zero_offsets_rad[i] + j.theta_home_rad;
        t = mul(t, dh_matrix(j.a_mm, j.alpha_rad, j.d_mm, theta));
    }
    return t;
}

inline std::array<double, 3> apply(const Mat4& m, const std::array<double, 3>& p) {
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i)
        out[i] = m[i][0] * p[0] + m[i][1] * p[1] + m[i][2] * p[2] + m[i][3];
    return out;
}

}  // namespace oracle

#endif  // ZEROCAL_TESTS_FK_ORACLE_HPP
