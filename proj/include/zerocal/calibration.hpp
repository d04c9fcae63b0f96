#ifndef ZEROCAL_CALIBRATION_HPP
#define ZEROCAL_CALIBRATION_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "zerocal/errors.hpp"
#include "zerocal/geometry.hpp"
#include "zerocal/kinematics.hpp"
#include "zerocal/registration.hpp"
#include "zerocal/rng.hpp"

namespace zerocal {

// Paired observations: a joint configuration commanded to the robot and the
// marker position the reference sensor reported for it.
struct CalibrationDataset {
    struct Record {
        JointConfig q;
        Vector3d p_ref_mm;  // measured in the reference frame N
        int pose_index = 0;
    };

    std::string chain_name;
    std::string marker_name;
    std::vector<Record> records;

    int size() const { return static_cast<int>(records.size()); }

    void validate() const {
        if (records.empty()) throw ConfigError("CalibrationDataset: no records");
        const int k = records.front().q.size();
        for (const auto& r : records) {
            if (r.q.size() != k)
                throw DimensionError("CalibrationDataset: inconsistent joint count");
            if (!r.q.angles.allFinite() || !r.p_ref_mm.allFinite())
                throw ConfigError("CalibrationDataset: non-finite record");
        }
    }

    void validate_against(const DHChain& chain) const {
        validate();
        for (const auto& r : records) chain.check_config(r.q);
        if (chain.tool_points_mm.find(marker_name) == chain.tool_points_mm.end())
            throw UnknownToolPointError("dataset marker '" + marker_name +
                                        "' not on the chain");
    }
};

// Full sampling state: registration correction, zero-offsets, and the
// isotropic noise scale. The sampler works on the packed form, which uses
// degrees for every angle and millimeters for lengths and sigma; the single
// proposal width is only meaningful in those units.
struct ParameterVector {
    RegistrationCorrection theta1;
    Eigen::VectorXd theta2_rad;
    double sigma_mm = 1.0;

    int packed_size() const { return 7 + static_cast<int>(theta2_rad.size()); }

    Eigen::VectorXd pack() const {
        Eigen::VectorXd v(packed_size());
        v[0] = theta1.x_mm;
        v[1] = theta1.y_mm;
        v[2] = theta1.z_mm;
        v[3] = rad2deg(theta1.alpha_rad);
        v[4] = rad2deg(theta1.beta_rad);
        v[5] = rad2deg(theta1.gamma_rad);
        for (int i = 0; i < theta2_rad.size(); ++i) v[6 + i] = rad2deg(theta2_rad[i]);
        v[packed_size() - 1] = sigma_mm;
        return v;
    }

    static ParameterVector unpack(const Eigen::VectorXd& v, int k) {
        if (v.size() != 7 + k) throw DimensionError("ParameterVector: bad packed size");
        ParameterVector p;
        p.theta1 = {v[0], v[1], v[2], deg2rad(v[3]), deg2rad(v[4]), deg2rad(v[5])};
        p.theta2_rad.resize(k);
        for (int i = 0; i < k; ++i) p.theta2_rad[i] = deg2rad(v[6 + i]);
        p.sigma_mm = v[6 + k];
        return p;
    }

    static ParameterVector initial(int k) {
        ParameterVector p;
        p.theta2_rad = Eigen::VectorXd::Zero(k);
        p.sigma_mm = 1.0;
        return p;
    }

    void validate() const {
        theta1.validate();
        if (!(sigma_mm > 0.0)) throw ConfigError("ParameterVector: sigma must be > 0");
    }
};

// Packed column labels, in file/report order.
inline std::vector<std::string> parameter_labels(int k) {
    std::vector<std::string> labels = {"x_mm",      "y_mm",     "z_mm",
                                       "alpha_deg", "beta_deg", "gamma_deg"};
    for (int i = 0; i < k; ++i) labels.push_back("dtheta" + std::to_string(i + 1) + "_deg");
    labels.push_back("sigma_mm");
    return labels;
}

namespace detail {

// Marker position under explicit zero-offsets without copying the chain;
// limits are assumed pre-checked.
inline Vector3d marker_position(const DHChain& chain, const Eigen::VectorXd& offsets_rad,
                                const JointConfig& q, const Vector3d& marker_mm) {
    Matrix3d r = Matrix3d::Identity();
    Vector3d p = Vector3d::Zero();
    for (int i = 0; i < chain.dof(); ++i) {
        const DHJoint& j = chain.joints[i];
        const double theta = q[i] + offsets_rad[i] + j.theta_home_rad;
        const double ct = std::cos(theta), st = std::sin(theta);
        p += r * Vector3d(j.a_mm * ct, j.a_mm * st, j.d_mm);
        r *= dh_rotation(theta, j.alpha_rad);
    }
    return r * marker_mm + p;
}

// Kahan-compensated accumulator; keeps the cost deterministic and summation
// order documented (sequential over rows).
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

}  // namespace detail

// Residual rows p_ref - predicted marker position, through the corrected
// registration and the offset kinematic model.
inline Eigen::MatrixXd residual_matrix(const CalibrationDataset& dataset, const DHChain& chain,
                                       const RigidTransform& initial_transform,
                                       const ParameterVector& params) {
    dataset.validate_against(chain);
    if (params.theta2_rad.size() != chain.dof())
        throw DimensionError("residual_matrix: theta2 length != chain dof");
    const Vector3d marker = chain.tool_points_mm.at(dataset.marker_name);
    const RigidTransform map = corrected_transform(initial_transform, params.theta1);
    Eigen::MatrixXd e(dataset.size(), 3);
    for (int i = 0; i < dataset.size(); ++i) {
        const Vector3d predicted =
            map.apply(detail::marker_position(chain, params.theta2_rad, dataset.records[i].q,
                                              marker));
        e.row(i) = (dataset.records[i].p_ref_mm - predicted).transpose();
    }
    return e;
}

// Sum of squared residual row norms, mm^2. Sequential compensated summation.
inline double cost(const Eigen::MatrixXd& e) {
    if (!e.allFinite()) throw ConfigError("cost: non-finite residual matrix");
    detail::KahanSum acc;
    for (int i = 0; i < e.rows(); ++i) acc.add(e.row(i).squaredNorm());
    return acc.sum;
}

// Unnormalized log posterior: (-3n-2) ln(sigma) - cost / (2 sigma^2).
// The direct density underflows at realistic n; every consumer works in logs.
inline double log_posterior(const CalibrationDataset& dataset, const DHChain& chain,
                            const RigidTransform& initial_transform,
                            const ParameterVector& params) {
    if (!(params.sigma_mm > 0.0)) throw ConfigError("log_posterior: sigma must be > 0");
    const double e = cost(residual_matrix(dataset, chain, initial_transform, params));
    const double n = static_cast<double>(dataset.size());
    return (-3.0 * n - 2.0) * std::log(params.sigma_mm) -
           e / (2.0 * params.sigma_mm * params.sigma_mm);
}

struct McmcConfig {
    int n_steps = 20000;
    int burn_in = 15000;
    double proposal_width = 0.0125;  // per parameter, in that parameter's packed unit
    std::uint64_t seed = 1;

    void validate() const {
        if (n_steps <= 0) throw ConfigError("McmcConfig: n_steps must be > 0");
        if (burn_in < 0 || burn_in >= n_steps)
            throw ConfigError("McmcConfig: need 0 <= burn_in < n_steps");
        if (!(proposal_width > 0.0)) throw ConfigError("McmcConfig: proposal width must be > 0");
    }
};

// Raw Metropolis trace over a packed state vector.
struct PosteriorTrace {
    Eigen::MatrixXd samples;             // n_steps x dim, packed units
    std::vector<std::uint8_t> accepted;  // per step
    Eigen::VectorXd log_posteriors;      // per step
    double acceptance_rate = 0.0;
    int n_steps = 0;
    int burn_in = 0;
    double proposal_width = 0.0;
    std::uint64_t seed = 0;
    int offset_count = 0;  // k; dim = 7 + k for calibration traces
};

// Plain Metropolis with a joint additive uniform proposal on all coordinates
// and a single acceptance ratio per step, computed in log space. Draws are
// addressed by (step, slot) so the chain is reproducible by construction.
// `valid` vetoes proposals outside the admissible region (counted as
// rejections).
inline PosteriorTrace run_metropolis(const std::function<double(const Eigen::VectorXd&)>& log_target,
                                     const std::function<bool(const Eigen::VectorXd&)>& valid,
                                     const Eigen::VectorXd& init, const McmcConfig& config) {
    config.validate();
    const int dim = static_cast<int>(init.size());
    const auto key = rng::sub_seed(config.seed, "metropolis");
    const std::uint64_t stride = static_cast<std::uint64_t>(dim) + 1;

    PosteriorTrace trace;
    trace.samples.resize(config.n_steps, dim);
    trace.accepted.resize(config.n_steps);
    trace.log_posteriors.resize(config.n_steps);
    trace.n_steps = config.n_steps;
    trace.burn_in = config.burn_in;
    trace.proposal_width = config.proposal_width;
    trace.seed = config.seed;

    Eigen::VectorXd current = init;
    if (valid && !valid(current)) throw ConfigError("metropolis: invalid initial state");
    double current_lp = log_target(current);
    Eigen::VectorXd proposal(dim);

    int n_accepted = 0;
    for (int step = 0; step < config.n_steps; ++step) {
        const std::uint64_t base = static_cast<std::uint64_t>(step) * stride;
        for (int d = 0; d < dim; ++d)
            proposal[d] = current[d] + config.proposal_width *
                                           (2.0 * rng::uniform01(key, base + d) - 1.0);
        bool accept = false;
        if (!valid || valid(proposal)) {
            const double proposal_lp = log_target(proposal);
            const double log_u = std::log(rng::uniform01_pos(key, base + dim));
            accept = log_u < proposal_lp - current_lp;
            if (accept) {
                current = proposal;
                current_lp = proposal_lp;
            }
        }
        n_accepted += accept ? 1 : 0;
        trace.samples.row(step) = current.transpose();
        trace.accepted[step] = accept ? 1 : 0;
        trace.log_posteriors[step] = current_lp;
    }
    trace.acceptance_rate = static_cast<double>(n_accepted) / config.n_steps;
    return trace;
}

// Sample the calibration posterior. All 7+k+... parameters move jointly;
// proposals with sigma <= 0 are auto-rejected, which preserves proposal
// symmetry on the admissible region.
inline PosteriorTrace metropolis_sample(const CalibrationDataset& dataset, const DHChain& chain,
                                        const RigidTransform& initial_transform,
                                        const McmcConfig& config,
                                        const ParameterVector* init = nullptr) {
    dataset.validate_against(chain);
    const int k = chain.dof();
    const ParameterVector start = init ? *init : ParameterVector::initial(k);
    if (start.theta2_rad.size() != k)
        throw DimensionError("metropolis_sample: init theta2 length != chain dof");
    start.validate();

    const Vector3d marker = chain.tool_points_mm.at(dataset.marker_name);
    const double n = static_cast<double>(dataset.size());
    const int sigma_idx = 6 + k;

    const auto log_target = [&dataset, &chain, &initial_transform, &marker, n,
                             k](const Eigen::VectorXd& v) {
        const ParameterVector p = ParameterVector::unpack(v, k);
        const RigidTransform map = corrected_transform(initial_transform, p.theta1);
        detail::KahanSum acc;
        for (const auto& record : dataset.records) {
            const Vector3d predicted =
                map.apply(detail::marker_position(chain, p.theta2_rad, record.q, marker));
            acc.add((record.p_ref_mm - predicted).squaredNorm());
        }
        return (-3.0 * n - 2.0) * std::log(p.sigma_mm) -
               acc.sum / (2.0 * p.sigma_mm * p.sigma_mm);
    };
    const auto valid = [sigma_idx](const Eigen::VectorXd& v) { return v[sigma_idx] > 0.0; };

    PosteriorTrace trace = run_metropolis(log_target, valid, start.pack(), config);
    trace.offset_count = k;
    return trace;
}

// Post-burn-in summary: per-parameter sample means (the point estimate) and
// standard deviations, plus the retained draws for uncertainty propagation.
struct CalibrationResult {
    ParameterVector mle;
    Eigen::VectorXd std_packed;        // packed units
    Eigen::VectorXd mean_packed;       // packed units
    Eigen::MatrixXd post_burn_in;      // retained draws, packed units
    double acceptance_rate = 0.0;
    int offset_count = 0;
};

inline CalibrationResult summarize(const PosteriorTrace& trace, int burn_in) {
    if (burn_in < 0 || burn_in >= trace.n_steps)
        throw ConfigError("summarize: need 0 <= burn_in < n_steps");
    const int n = trace.n_steps - burn_in;
    const int dim = static_cast<int>(trace.samples.cols());

    CalibrationResult result;
    result.post_burn_in = trace.samples.bottomRows(n);
    result.mean_packed = result.post_burn_in.colwise().mean();
    result.std_packed.resize(dim);
    for (int d = 0; d < dim; ++d) {
        const double mean = result.mean_packed[d];
        double ss = 0.0;
        for (int i = 0; i < n; ++i) {
            const double diff = result.post_burn_in(i, d) - mean;
            ss += diff * diff;
        }
        result.std_packed[d] = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
    }
    result.acceptance_rate = trace.acceptance_rate;
    result.offset_count = trace.offset_count;
    if (trace.offset_count > 0 && dim == 7 + trace.offset_count)
        result.mle = ParameterVector::unpack(result.mean_packed, trace.offset_count);
    return result;
}

}  // namespace zerocal

#endif  // ZEROCAL_CALIBRATION_HPP
