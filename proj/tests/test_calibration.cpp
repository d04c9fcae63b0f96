#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "zerocal/calibration.hpp"
#include "zerocal/harness.hpp"
#include "zerocal/rng.hpp"

using namespace zerocal;

namespace {

// Minimal single-joint scene for closed-form checks.
DHChain tiny_chain() {
    DHChain c;
    c.name = "tiny";
    c.joints.push_back({0.0, 0.0, 100.0, 0.0});
    c.joint_limits.push_back({-kPi, kPi});
    c.zero_offsets_rad = Eigen::VectorXd::Zero(1);
    c.tool_points_mm["flange"] = Vector3d(0, 0, 0);
    return c;
}

CalibrationDataset dataset_with_residual_rows(const DHChain& chain,
                                              const std::vector<Vector3d>& row_offsets) {
    CalibrationDataset ds;
    ds.chain_name = chain.name;
    ds.marker_name = "flange";
    for (size_t i = 0; i < row_offsets.size(); ++i) {
        const JointConfig q(Eigen::VectorXd::Constant(1, 0.1 * static_cast<double>(i)));
        const Vector3d predicted = tool_point(chain, q, "flange");
        ds.records.push_back({q, predicted + row_offsets[i], static_cast<int>(i)});
    }
    return ds;
}

ParameterVector params_with_sigma(int k, double sigma) {
    ParameterVector p = ParameterVector::initial(k);
    p.sigma_mm = sigma;
    return p;
}

// Direct density-ratio form of the acceptance probability, safe only for
// small n; serves as the oracle for the log-space path.
double direct_acceptance_ratio(double sigma_p, double cost_p, double sigma, double cost_1,
                               int n) {
    return std::pow(sigma_p / sigma, -3.0 * n - 2.0) *
           std::exp(-cost_p / (2.0 * sigma_p * sigma_p) + cost_1 / (2.0 * sigma * sigma));
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    size_t ia = 0, ib = 0;
    double d = 0.0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia] <= b[ib])
            ++ia;
        else
            ++ib;
        const double fa = static_cast<double>(ia) / a.size();
        const double fb = static_cast<double>(ib) / b.size();
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

}  // namespace

TEST_CASE("residuals vanish at the injected ground truth on a noiseless scene") {
    SceneConfig scene = default_scene();
    scene.sensor_noise_sigma_mm = 0.0;
    const DHChain& chain = scene.chain_nominal;

    // a handful of in-limit configurations
    rng::Sequence seq(3, "closed-loop");
    std::vector<ConfigEntry> entries;
    for (int i = 0; i < 20; ++i) {
        Eigen::VectorXd q(7);
        for (int j = 0; j < 7; ++j)
            q[j] = seq.uniform(0.7 * chain.joint_limits[j].min_rad,
                               0.7 * chain.joint_limits[j].max_rad);
        entries.push_back({i, JointConfig(q), {}, 0.0});
    }
    const CalibrationDataset ds = build_dataset(scene, entries);
    const auto reg = initial_registration(ds, chain);

    ParameterVector truth;
    truth.theta1 = RegistrationCorrection::from_transform(
        scene.true_sensor_pose.compose(reg.initial.inverse()));
    truth.theta2_rad = scene.true_offsets_deg * kPi / 180.0;
    truth.sigma_mm = 0.1;

    const Eigen::MatrixXd e = residual_matrix(ds, chain, reg.initial, truth);
    REQUIRE(e.cwiseAbs().maxCoeff() < 1e-9);

    // a wrongly remastered model leaves millimeter-scale residuals that the
    // oracle FK reproduces row by row
    ParameterVector vernier = truth;
    vernier.theta2_rad = Eigen::VectorXd::Zero(7);
    const Eigen::MatrixXd e2 = residual_matrix(ds, chain, reg.initial, vernier);
    REQUIRE(e2.rowwise().norm().minCoeff() > 0.1);
    REQUIRE(e2.rowwise().norm().maxCoeff() > 1.0);
    const RigidTransform map = corrected_transform(reg.initial, vernier.theta1);
    for (int i = 0; i < 3; ++i) {
        const Vector3d expected =
            ds.records[i].p_ref_mm - map.apply(tool_point(chain, ds.records[i].q, ds.marker_name));
        REQUIRE((e2.row(i).transpose() - expected).norm() < 1e-9);
    }
}

TEST_CASE("cost closed forms") {
    REQUIRE(cost(Eigen::MatrixXd::Zero(4, 3)) == 0.0);

    Eigen::MatrixXd one_row(1, 3);
    one_row << 3.0, 4.0, 0.0;
    REQUIRE(cost(one_row) == 25.0);

    rng::Sequence seq(17, "cost-oracle");
    Eigen::MatrixXd e(37, 3);
    for (int i = 0; i < e.rows(); ++i)
        for (int j = 0; j < 3; ++j) e(i, j) = seq.uniform(-5, 5);
    double naive = 0.0;
    for (int i = 0; i < e.rows(); ++i)
        for (int j = 0; j < 3; ++j) naive += e(i, j) * e(i, j);
    REQUIRE(cost(e) == Catch::Approx(naive).epsilon(1e-13));

    // non-negative, zero only for a perfect fit
    REQUIRE(cost(e) > 0.0);
    Eigen::MatrixXd tiny = Eigen::MatrixXd::Zero(3, 3);
    tiny(2, 1) = 1e-9;
    REQUIRE(cost(tiny) > 0.0);
}

TEST_CASE("log posterior closed forms") {
    const DHChain chain = tiny_chain();
    // n=1, zero residual, sigma=1 -> 0
    const CalibrationDataset ds1 = dataset_with_residual_rows(chain, {Vector3d::Zero()});
    REQUIRE(log_posterior(ds1, chain, RigidTransform{}, params_with_sigma(1, 1.0)) ==
            Catch::Approx(0.0).margin(1e-12));

    // n=2, cost=8, sigma=2 -> -8 ln 2 - 1
    const CalibrationDataset ds2 =
        dataset_with_residual_rows(chain, {Vector3d(2, 0, 0), Vector3d(0, 2, 0)});
    REQUIRE(log_posterior(ds2, chain, RigidTransform{}, params_with_sigma(1, 2.0)) ==
            Catch::Approx(-8.0 * std::log(2.0) - 1.0).epsilon(1e-12));

    REQUIRE_THROWS_AS(log_posterior(ds1, chain, RigidTransform{}, params_with_sigma(1, -1.0)),
                      ConfigError);
}

TEST_CASE("log-space acceptance matches the direct ratio where it is finite") {
    const DHChain chain = tiny_chain();
    rng::Sequence seq(23, "ratio-oracle");
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(seq.below(3));
        std::vector<Vector3d> rows(n);
        for (auto& r : rows)
            r = Vector3d(seq.uniform(-2, 2), seq.uniform(-2, 2), seq.uniform(-2, 2));
        const CalibrationDataset ds = dataset_with_residual_rows(chain, rows);

        const ParameterVector a = params_with_sigma(1, seq.uniform(0.5, 2.0));
        const ParameterVector b = params_with_sigma(1, seq.uniform(0.5, 2.0));
        const double lp_a = log_posterior(ds, chain, RigidTransform{}, a);
        const double lp_b = log_posterior(ds, chain, RigidTransform{}, b);
        const double log_space = std::exp(lp_a - lp_b);

        const double cost_a = cost(residual_matrix(ds, chain, RigidTransform{}, a));
        const double cost_b = cost(residual_matrix(ds, chain, RigidTransform{}, b));
        const double direct = direct_acceptance_ratio(a.sigma_mm, cost_a, b.sigma_mm, cost_b, n);
        worst = std::max(worst, std::abs(log_space - direct) / direct);
    }
    REQUIRE(worst < 1e-10);
}

TEST_CASE("the direct density form is useless at realistic n") {
    // sigma^(-3n-2) overflows/underflows in double precision at n = 170
    const int n = 170;
    REQUIRE(!std::isfinite(std::pow(0.1, -3.0 * n - 2.0)));
    REQUIRE(std::pow(5.0, -3.0 * n - 2.0) == 0.0);
}

TEST_CASE("flat target accepts everything") {
    const auto flat = [](const Eigen::VectorXd&) { return 0.0; };
    McmcConfig cfg;
    cfg.n_steps = 2000;
    cfg.burn_in = 100;
    cfg.seed = 5;
    const PosteriorTrace trace = run_metropolis(flat, nullptr, Eigen::VectorXd::Zero(14), cfg);
    REQUIRE(trace.acceptance_rate == 1.0);
}

TEST_CASE("sigma <= 0 proposals are auto-rejected") {
    const auto flat = [](const Eigen::VectorXd&) { return 0.0; };
    const auto valid = [](const Eigen::VectorXd& v) { return v[0] > 0.0; };
    McmcConfig cfg;
    cfg.n_steps = 5000;
    cfg.burn_in = 100;
    cfg.seed = 6;
    Eigen::VectorXd init(1);
    init << 0.004;  // proposals straddle zero immediately
    const PosteriorTrace trace = run_metropolis(flat, valid, init, cfg);
    REQUIRE(trace.acceptance_rate < 1.0);
    REQUIRE(trace.acceptance_rate > 0.0);
    for (int i = 0; i < trace.n_steps; ++i) REQUIRE(trace.samples(i, 0) > 0.0);
}

TEST_CASE("same seed replays the identical trace") {
    const DHChain chain = tiny_chain();
    const CalibrationDataset ds = dataset_with_residual_rows(
        chain, {Vector3d(0.1, 0, 0), Vector3d(0, -0.2, 0), Vector3d(0, 0, 0.05)});
    McmcConfig cfg;
    cfg.n_steps = 1500;
    cfg.burn_in = 500;
    cfg.seed = 99;
    const PosteriorTrace a = metropolis_sample(ds, chain, RigidTransform{}, cfg);
    const PosteriorTrace b = metropolis_sample(ds, chain, RigidTransform{}, cfg);
    REQUIRE(a.samples == b.samples);
    REQUIRE(a.log_posteriors == b.log_posteriors);
    REQUIRE(a.accepted == b.accepted);
    REQUIRE(a.acceptance_rate > 0.0);
    REQUIRE(a.acceptance_rate < 1.0);
}

TEST_CASE("summarize of a constant trace is the constant with zero spread") {
    PosteriorTrace trace;
    trace.n_steps = 50;
    trace.burn_in = 10;
    trace.offset_count = 1;
    trace.samples = Eigen::MatrixXd::Zero(50, 8);
    trace.samples.col(0).setConstant(3.25);
    trace.samples.col(7).setConstant(0.5);  // sigma column
    trace.log_posteriors = Eigen::VectorXd::Zero(50);
    trace.accepted.assign(50, 1);
    const CalibrationResult r = summarize(trace, 10);
    REQUIRE(r.mean_packed[0] == 3.25);
    REQUIRE(r.std_packed.maxCoeff() == 0.0);
    REQUIRE(r.mle.theta1.x_mm == 3.25);
    REQUIRE(r.mle.sigma_mm == 0.5);
}

TEST_CASE("summarize recovers the moments of an iid gaussian stub") {
    PosteriorTrace trace;
    trace.n_steps = 20000;
    trace.burn_in = 0;
    trace.offset_count = 1;
    trace.samples.resize(20000, 8);
    rng::Sequence seq(31, "stub");
    for (int i = 0; i < trace.samples.rows(); ++i)
        for (int j = 0; j < 8; ++j) trace.samples(i, j) = 2.0 + 0.5 * seq.normal();
    trace.log_posteriors = Eigen::VectorXd::Zero(trace.n_steps);
    trace.accepted.assign(trace.n_steps, 1);
    const CalibrationResult r = summarize(trace, 0);
    for (int j = 0; j < 8; ++j) {
        REQUIRE(std::abs(r.mean_packed[j] - 2.0) < 0.02);
        REQUIRE(std::abs(r.std_packed[j] - 0.5) < 0.02);
    }
}

TEST_CASE("1-D quadratic toy posterior passes a KS test against direct draws") {
    const double mu = 3.0, s = 0.7;
    const auto log_target = [mu, s](const Eigen::VectorXd& x) {
        const double d = x[0] - mu;
        return -d * d / (2.0 * s * s);
    };
    McmcConfig cfg;
    cfg.n_steps = 45000;
    cfg.burn_in = 5000;
    cfg.proposal_width = 0.7;
    cfg.seed = 12;
    const PosteriorTrace trace =
        run_metropolis(log_target, nullptr, Eigen::VectorXd::Zero(1), cfg);

    std::vector<double> chain_draws;
    for (int i = cfg.burn_in; i < cfg.n_steps; i += 20)  // thin to tame autocorrelation
        chain_draws.push_back(trace.samples(i, 0));
    std::vector<double> direct(chain_draws.size());
    rng::Sequence seq(13, "direct-draws");
    for (auto& v : direct) v = mu + s * seq.normal();

    const double d = ks_statistic(chain_draws, direct);
    const double n = static_cast<double>(chain_draws.size());
    const double critical = 1.628 * std::sqrt(2.0 / n);  // alpha = 0.01
    REQUIRE(d < critical);
}

TEST_CASE("posterior std of every offset shrinks (or holds) as data grows") {
    SceneConfig scene = default_scene();
    const DHChain& chain = scene.chain_nominal;
    SamplerConfig sampler;
    ExperimentOptions opts = ExperimentOptions::ci_profile();
    const auto build = detail::build_pose_set(scene, sampler, opts, "optimization", 36);
    CalibrationDataset full = build_dataset(scene, build.entries, "optimization");
    REQUIRE(full.size() >= 170);

    CalibrationDataset small = full;
    small.records.resize(50);
    CalibrationDataset large = full;
    large.records.resize(170);

    const auto reg = initial_registration(scene, large);
    McmcConfig cfg;
    cfg.n_steps = 9000;
    cfg.burn_in = 3000;
    cfg.proposal_width = 0.001;
    cfg.seed = 2718;
    // start both chains at the scene truth so the windows measure converged
    // posterior spread rather than burn-in transients
    ParameterVector init;
    init.theta1 = RegistrationCorrection::from_transform(
        scene.true_sensor_pose.compose(reg.initial.inverse()));
    init.theta2_rad = scene.true_offsets_deg * kPi / 180.0;
    init.sigma_mm = scene.sensor_noise_sigma_mm;
    const CalibrationResult r_small =
        summarize(metropolis_sample(small, chain, reg.initial, cfg, &init), cfg.burn_in);
    const CalibrationResult r_large =
        summarize(metropolis_sample(large, chain, reg.initial, cfg, &init), cfg.burn_in);
    for (int j = 0; j < 7; ++j)
        REQUIRE(r_large.std_packed[6 + j] <= 1.1 * r_small.std_packed[6 + j]);
}

TEST_CASE("bad mcmc configs are rejected") {
    McmcConfig cfg;
    cfg.n_steps = 100;
    cfg.burn_in = 100;
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
    cfg.burn_in = -1;
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
    cfg.n_steps = 0;
    cfg.burn_in = 0;
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("parameter packing round trips and orders degrees for angles") {
    ParameterVector p;
    p.theta1 = {1.0, 2.0, 3.0, deg2rad(0.5), deg2rad(-0.25), deg2rad(0.125)};
    p.theta2_rad = Eigen::VectorXd::LinSpaced(7, -0.01, 0.01);
    p.sigma_mm = 0.42;
    const Eigen::VectorXd v = p.pack();
    REQUIRE(v.size() == 14);
    REQUIRE(v[3] == Catch::Approx(0.5));
    REQUIRE(v[13] == 0.42);
    const ParameterVector back = ParameterVector::unpack(v, 7);
    REQUIRE(std::abs(back.theta1.alpha_rad - p.theta1.alpha_rad) < 1e-15);
    REQUIRE((back.theta2_rad - p.theta2_rad).cwiseAbs().maxCoeff() < 1e-15);
}
