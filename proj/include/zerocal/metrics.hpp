#ifndef ZEROCAL_METRICS_HPP
#define ZEROCAL_METRICS_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "zerocal/calibration.hpp"
#include "zerocal/errors.hpp"
#include "zerocal/kinematics.hpp"
#include "zerocal/rng.hpp"

namespace zerocal {

enum class MetricKind { relative, post_registration, theoretical_full, theoretical_offsets_only };

inline std::string to_string(MetricKind k) {
    switch (k) {
        case MetricKind::relative: return "relative";
        case MetricKind::post_registration: return "post_registration";
        case MetricKind::theoretical_full: return "theoretical_full";
        case MetricKind::theoretical_offsets_only: return "theoretical_offsets_only";
    }
    return "?";
}

struct AccuracySummary {
    double mean_mm = 0.0;
    double p2_5_mm = 0.0;   // 95% interval bounds: empirical percentiles
    double p97_5_mm = 0.0;
    int n = 0;
    MetricKind kind = MetricKind::relative;
};

// Empirical percentile with linear interpolation between order statistics.
inline double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw EmptyMetricError("percentile of an empty sample");
    std::sort(values.begin(), values.end());
    const double h = (values.size() - 1) * p / 100.0;
    const auto lo = static_cast<size_t>(std::floor(h));
    if (lo + 1 >= values.size()) return values.back();
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

inline AccuracySummary summarize_distances(const std::vector<double>& values, MetricKind kind) {
    if (values.empty()) throw EmptyMetricError("accuracy metric over an empty sample");
    detail::KahanSum acc;
    for (double v : values) acc.add(v);
    AccuracySummary s;
    s.mean_mm = acc.sum / static_cast<double>(values.size());
    s.p2_5_mm = percentile(values, 2.5);
    s.p97_5_mm = percentile(values, 97.5);
    s.n = static_cast<int>(values.size());
    s.kind = kind;
    return s;
}

// One marker observation paired with the robot's own account of it. The two
// sides may live in different frames; the relative metric only compares
// distances, which are frame-invariant.
struct PairedPoint {
    Vector3d ref;    // reference-sensor frame
    Vector3d robot;  // robot base frame
};
using PoseCluster = std::vector<PairedPoint>;

// Per-pose clusters for the relative metric: all configurations that should
// have reached the same Cartesian pose, with the robot side recomputed under
// the given zero-offsets.
inline std::vector<PoseCluster> make_clusters(const CalibrationDataset& dataset,
                                              const DHChain& chain,
                                              const Eigen::VectorXd& offsets_rad) {
    dataset.validate_against(chain);
    if (offsets_rad.size() != chain.dof())
        throw DimensionError("make_clusters: offsets length != chain dof");
    const Vector3d marker = chain.tool_points_mm.at(dataset.marker_name);
    int max_pose = -1;
    for (const auto& r : dataset.records) max_pose = std::max(max_pose, r.pose_index);
    std::vector<PoseCluster> clusters(max_pose + 1);
    for (const auto& r : dataset.records)
        clusters[r.pose_index].push_back(
            {r.p_ref_mm, detail::marker_position(chain, offsets_rad, r.q, marker)});
    return clusters;
}

// Relative Cartesian accuracy: |ref pair distance - robot pair distance|
// pooled over all same-cluster pairs. Singleton clusters contribute nothing;
// having no pairs anywhere is an error.
inline AccuracySummary relative_accuracy(const std::vector<PoseCluster>& clusters) {
    std::vector<double> d;
    for (const auto& cluster : clusters) {
        for (size_t i = 0; i + 1 < cluster.size(); ++i) {
            for (size_t j = i + 1; j < cluster.size(); ++j) {
                const double ref_dist = (cluster[i].ref - cluster[j].ref).norm();
                const double robot_dist = (cluster[i].robot - cluster[j].robot).norm();
                d.push_back(std::abs(ref_dist - robot_dist));
            }
        }
    }
    if (d.empty()) throw EmptyMetricError("relative_accuracy: no same-pose pairs");
    return summarize_distances(d, MetricKind::relative);
}

// Post-registration absolute accuracy: distribution of per-row residual
// norms of the error matrix.
inline AccuracySummary post_registration_accuracy(const Eigen::MatrixXd& residuals) {
    if (residuals.rows() == 0) throw EmptyMetricError("post_registration_accuracy: empty input");
    std::vector<double> norms(residuals.rows());
    for (int i = 0; i < residuals.rows(); ++i) norms[i] = residuals.row(i).norm();
    return summarize_distances(norms, MetricKind::post_registration);
}

enum class TheoreticalBaseline { mle, vernier_offsets };

// Theoretical accuracy from posterior uncertainty: at every configuration,
// the distance between the baseline marker position and positions produced
// by zero-offsets drawn from the posterior, optionally with the identified
// isotropic sensor noise added directly to the point (legitimate because the
// noise model is isotropic). Draws use whole posterior rows, preserving
// inter-joint correlation; per_joint_draws switches to independent per-joint
// resampling.
inline AccuracySummary theoretical_accuracy(const DHChain& chain, const CalibrationResult& result,
                                            const std::vector<JointConfig>& configs,
                                            const std::string& point_name, int n_draws,
                                            bool include_isotropic_noise,
                                            TheoreticalBaseline baseline, std::uint64_t seed,
                                            bool per_joint_draws = false) {
    if (result.post_burn_in.rows() == 0)
        throw EmptyMetricError("theoretical_accuracy: empty posterior trace");
    if (configs.empty()) throw EmptyMetricError("theoretical_accuracy: no configurations");
    if (n_draws < 1) throw ConfigError("theoretical_accuracy: n_draws must be >= 1");
    const auto marker_it = chain.tool_points_mm.find(point_name);
    if (marker_it == chain.tool_points_mm.end())
        throw UnknownToolPointError("theoretical_accuracy: unknown point '" + point_name + "'");
    const Vector3d marker = marker_it->second;
    for (const auto& q : configs) chain.check_config(q);

    const int k = chain.dof();
    const int rows = static_cast<int>(result.post_burn_in.rows());

    // offset vectors for each draw, sampled with replacement from the
    // retained posterior rows
    rng::Sequence draw_seq(seed, "posterior-draws");
    std::vector<Eigen::VectorXd> draw_offsets(n_draws, Eigen::VectorXd(k));
    for (int d = 0; d < n_draws; ++d) {
        if (per_joint_draws) {
            for (int j = 0; j < k; ++j) {
                const int row = static_cast<int>(draw_seq.below(rows));
                draw_offsets[d][j] = deg2rad(result.post_burn_in(row, 6 + j));
            }
        } else {
            const int row = static_cast<int>(draw_seq.below(rows));
            for (int j = 0; j < k; ++j)
                draw_offsets[d][j] = deg2rad(result.post_burn_in(row, 6 + j));
        }
    }

    const Eigen::VectorXd base_offsets = baseline == TheoreticalBaseline::mle
                                             ? result.mle.theta2_rad
                                             : chain.zero_offsets_rad;
    const double sigma = result.mle.sigma_mm;
    const auto noise_key = rng::sub_seed(seed, "tcp-noise");

    std::vector<double> distances;
    distances.reserve(static_cast<size_t>(configs.size()) * n_draws);
    for (size_t ci = 0; ci < configs.size(); ++ci) {
        const Vector3d base = detail::marker_position(chain, base_offsets, configs[ci], marker);
        for (int d = 0; d < n_draws; ++d) {
            Vector3d p = detail::marker_position(chain, draw_offsets[d], configs[ci], marker);
            if (include_isotropic_noise) {
                const std::uint64_t idx = (ci * static_cast<std::uint64_t>(n_draws) + d) * 3;
                p += sigma * Vector3d(rng::normal(noise_key, idx), rng::normal(noise_key, idx + 1),
                                      rng::normal(noise_key, idx + 2));
            }
            distances.push_back((p - base).norm());
        }
    }
    AccuracySummary s = summarize_distances(
        distances, include_isotropic_noise ? MetricKind::theoretical_full
                                           : MetricKind::theoretical_offsets_only);
    return s;
}

// Uniformly random in-limit configurations.
inline std::vector<JointConfig> random_configs(const DHChain& chain, int n, std::uint64_t seed) {
    if (n < 1) throw ConfigError("random_configs: n must be >= 1");
    rng::Sequence seq(seed, "random-configs");
    std::vector<JointConfig> configs;
    configs.reserve(n);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd q(chain.dof());
        for (int j = 0; j < chain.dof(); ++j)
            q[j] = seq.uniform(chain.joint_limits[j].min_rad, chain.joint_limits[j].max_rad);
        configs.emplace_back(q);
    }
    return configs;
}

}  // namespace zerocal

#endif  // ZEROCAL_METRICS_HPP
