#ifndef ZEROCAL_POSE_SAMPLER_HPP
#define ZEROCAL_POSE_SAMPLER_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "zerocal/errors.hpp"
#include "zerocal/geometry.hpp"
#include "zerocal/ik.hpp"
#include "zerocal/kinematics.hpp"
#include "zerocal/rng.hpp"

namespace zerocal {

struct Range {
    double lo = 0.0;
    double hi = 1.0;

    double scale(double u01) const { return lo + (hi - lo) * u01; }
    void validate(const std::string& what) const {
        if (!(lo < hi)) throw ConfigError("range " + what + ": min must be < max");
    }
};

// Candidate Cartesian poses are drawn in the 4-D space
// {theta_z_base, r, z, theta_z_tool}: a polar position around the base plus a
// roll of the tool frame about its facing axis.
struct SamplerConfig {
    int n_poses = 60;
    Range r_range_mm{200.0, 500.0};
    Range z_range_mm{400.0, 800.0};
    Range theta_z_base_range_rad{0.0, 2.0 * kPi};
    Range theta_z_tool_range_rad{0.0, 2.0 * kPi};
    Vector3d sensor_origin_mm = Vector3d(2500.0, 500.0, 1000.0);  // in the robot base frame
    std::uint64_t seed = 1;

    void validate() const {
        if (n_poses < 1) throw ConfigError("SamplerConfig: n_poses must be >= 1");
        r_range_mm.validate("r_range_mm");
        z_range_mm.validate("z_range_mm");
        theta_z_base_range_rad.validate("theta_z_base_range_rad");
        theta_z_tool_range_rad.validate("theta_z_tool_range_rad");
        if (!sensor_origin_mm.allFinite()) throw ConfigError("SamplerConfig: sensor origin");
    }
};

struct CandidatePose {
    Pose pose;
    Eigen::Vector4d lhs_coords;  // scaled {theta_z_base, r, z, theta_z_tool}
};

// n x dims Latin hypercube in [0,1): each column holds exactly one sample per
// stratum [i/n, (i+1)/n). Deterministic in the seed.
inline Eigen::MatrixXd latin_hypercube(int n, int dims, std::uint64_t seed) {
    if (n < 1) throw ConfigError("latin_hypercube: n must be >= 1");
    if (dims < 1) throw ConfigError("latin_hypercube: dims must be >= 1");
    Eigen::MatrixXd m(n, dims);
    for (int d = 0; d < dims; ++d) {
        rng::Sequence perm_seq(seed, "lhs-perm-" + std::to_string(d));
        std::vector<int> strata(n);
        for (int i = 0; i < n; ++i) strata[i] = i;
        for (int i = n - 1; i > 0; --i)
            std::swap(strata[i], strata[static_cast<int>(perm_seq.below(i + 1))]);
        rng::Sequence cell_seq(seed, "lhs-cell-" + std::to_string(d));
        for (int i = 0; i < n; ++i) m(i, d) = (strata[i] + cell_seq.uniform01()) / n;
    }
    return m;
}

// Build the sensor-facing pose for one scaled sample row: the tool Z axis
// points from the pose position to the sensor origin, X comes from the
// (normalized) cross product with the base Z, Y completes the frame, and the
// tool roll is applied last about the facing axis.
inline CandidatePose build_pose(const Eigen::Vector4d& scaled_row, const Vector3d& sensor_origin) {
    const double theta_base = scaled_row[0];
    const double radius = scaled_row[1];
    const double z = scaled_row[2];
    const double theta_tool = scaled_row[3];

    const Vector3d translation(radius * std::cos(theta_base), radius * std::sin(theta_base), z);
    const Vector3d to_sensor = sensor_origin - translation;
    const double dist = to_sensor.norm();
    if (dist < 1e-9) throw DegeneratePoseError("pose position coincides with the sensor origin");
    const Vector3d z_axis = to_sensor / dist;
    if (std::abs(z_axis.z()) >= 1.0 - 1e-9)
        throw DegeneratePoseError("facing axis parallel to base Z");

    const Vector3d x_axis = z_axis.cross(Vector3d::UnitZ()).normalized();
    const Vector3d y_axis = z_axis.cross(x_axis);
    Matrix3d rot;
    rot.col(0) = x_axis;
    rot.col(1) = y_axis;
    rot.col(2) = z_axis;
    rot = rot * rot_z(theta_tool);  // roll about the facing axis
    return {{rot, translation}, scaled_row};
}

struct CandidateSet {
    std::vector<CandidatePose> candidates;
    int n_discarded = 0;
    std::vector<std::string> notes;
};

// Sample n_poses candidates. Degenerate rows are redrawn within the same
// hypercube cell up to 10 times, then discarded with a note.
inline CandidateSet generate_candidates(const SamplerConfig& config) {
    config.validate();
    const Eigen::MatrixXd lhs = latin_hypercube(config.n_poses, 4, config.seed);
    const Range ranges[4] = {config.theta_z_base_range_rad, config.r_range_mm, config.z_range_mm,
                             config.theta_z_tool_range_rad};
    // lhs columns are ordered {theta_z_base, r, z, theta_z_tool} already
    CandidateSet out;
    const auto resample_key = rng::sub_seed(config.seed, "lhs-resample");
    for (int i = 0; i < config.n_poses; ++i) {
        Eigen::Vector4d unit = lhs.row(i);
        bool built = false;
        for (int attempt = 0; attempt <= 10 && !built; ++attempt) {
            Eigen::Vector4d scaled;
            for (int d = 0; d < 4; ++d) scaled[d] = ranges[d].scale(unit[d]);
            try {
                out.candidates.push_back(build_pose(scaled, config.sensor_origin_mm));
                built = true;
            } catch (const DegeneratePoseError&) {
                for (int d = 0; d < 4; ++d) {
                    const double cell = std::floor(unit[d] * config.n_poses);
                    const double frac = rng::uniform01(
                        resample_key, (static_cast<std::uint64_t>(i) * 16 + attempt) * 4 + d);
                    unit[d] = (cell + frac) / config.n_poses;
                }
            }
        }
        if (!built) {
            out.n_discarded += 1;
            out.notes.push_back("row " + std::to_string(i) + ": degenerate after 10 resamples");
        }
    }
    return out;
}

struct FeasibleSet {
    std::vector<CandidatePose> poses;
    std::vector<std::string> discard_notes;
};

// Keep candidates the chain can actually reach with at least one in-limit
// joint solution; order preserved.
inline FeasibleSet filter_feasible(const std::vector<CandidatePose>& candidates,
                                   const DHChain& chain, const std::vector<double>& arm_angles) {
    FeasibleSet out;
    for (size_t i = 0; i < candidates.size(); ++i) {
        std::string reason;
        try {
            const IKSolutionSet set = solve_ik(chain, {candidates[i].pose, arm_angles});
            if (!set.solutions.empty()) {
                out.poses.push_back(candidates[i]);
                continue;
            }
            reason = "no in-limit IK solution";
        } catch (const Error& e) {
            reason = e.what();
        }
        out.discard_notes.push_back("candidate " + std::to_string(i) + ": " + reason);
    }
    return out;
}

}  // namespace zerocal

#endif  // ZEROCAL_POSE_SAMPLER_HPP
