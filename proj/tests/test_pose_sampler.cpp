#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "zerocal/pose_sampler.hpp"

using namespace zerocal;

TEST_CASE("latin hypercube with n=1 is a single row in [0,1)") {
    const Eigen::MatrixXd m = latin_hypercube(1, 4, 7);
    REQUIRE(m.rows() == 1);
    REQUIRE(m.cols() == 4);
    for (int d = 0; d < 4; ++d) {
        REQUIRE(m(0, d) >= 0.0);
        REQUIRE(m(0, d) < 1.0);
    }
}

TEST_CASE("latin hypercube columns are stratified one sample per cell") {
    for (const std::uint64_t seed : {11ull, 12ull}) {
        const int n = 100;
        const Eigen::MatrixXd m = latin_hypercube(n, 4, seed);
        for (int d = 0; d < 4; ++d) {
            std::vector<int> counts(n, 0);
            for (int i = 0; i < n; ++i) {
                const int cell = static_cast<int>(std::floor(m(i, d) * n));
                REQUIRE(cell >= 0);
                REQUIRE(cell < n);
                counts[cell] += 1;
            }
            for (int c : counts) REQUIRE(c == 1);
        }
    }
}

TEST_CASE("latin hypercube n=10 sorted columns land one per decile") {
    const int n = 10;
    const Eigen::MatrixXd m = latin_hypercube(n, 4, 3);
    for (int d = 0; d < 4; ++d) {
        std::vector<double> col(n);
        for (int i = 0; i < n; ++i) col[i] = m(i, d);
        std::sort(col.begin(), col.end());
        for (int i = 0; i < n; ++i) {
            REQUIRE(col[i] >= i / 10.0);
            REQUIRE(col[i] < (i + 1) / 10.0);
        }
    }
}

TEST_CASE("different seeds give different hypercubes") {
    REQUIRE(latin_hypercube(100, 4, 1) != latin_hypercube(100, 4, 2));
}

TEST_CASE("build_pose constructs the documented facing frame") {
    // position (300,0,600), sensor (1500,0,600): z points +x
    const CandidatePose cp = build_pose({0.0, 300.0, 600.0, 0.0}, Vector3d(1500, 0, 600));
    REQUIRE((cp.pose.translation - Vector3d(300, 0, 600)).norm() < 1e-12);
    REQUIRE((cp.pose.rotation.col(2) - Vector3d(1, 0, 0)).norm() < 1e-12);
    REQUIRE((cp.pose.rotation.col(0) - Vector3d(0, -1, 0)).norm() < 1e-12);
    REQUIRE((cp.pose.rotation.col(1) - Vector3d(0, 0, -1)).norm() < 1e-12);
}

TEST_CASE("build_pose rejects a facing axis parallel to base Z") {
    // position (0,300,600), sensor directly below at (0,300,0)
    REQUIRE_THROWS_AS(build_pose({kPi / 2.0, 300.0, 600.0, 0.0}, Vector3d(0, 300, 0)),
                      DegeneratePoseError);
}

TEST_CASE("a full-turn tool roll changes nothing") {
    const Vector3d sensor(2500, 500, 1000);
    const CandidatePose a = build_pose({0.7, 350.0, 550.0, 0.0}, sensor);
    const CandidatePose b = build_pose({0.7, 350.0, 550.0, 2.0 * kPi}, sensor);
    REQUIRE((a.pose.rotation - b.pose.rotation).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sampled poses are orthonormal and face the sensor regardless of roll") {
    SamplerConfig cfg;
    cfg.n_poses = 50;
    cfg.seed = 42;
    const CandidateSet set = generate_candidates(cfg);
    REQUIRE(set.candidates.size() == 50);
    for (const auto& cp : set.candidates) {
        REQUIRE(cp.pose.orthonormality_error() < 1e-12);
        const Vector3d dir = (cfg.sensor_origin_mm - cp.pose.translation).normalized();
        REQUIRE(cp.pose.rotation.col(2).dot(dir) > 1.0 - 1e-12);
    }
}

TEST_CASE("sampling is deterministic in the seed") {
    SamplerConfig cfg;
    cfg.n_poses = 20;
    cfg.seed = 9;
    const CandidateSet a = generate_candidates(cfg);
    const CandidateSet b = generate_candidates(cfg);
    REQUIRE(a.candidates.size() == b.candidates.size());
    for (size_t i = 0; i < a.candidates.size(); ++i) {
        REQUIRE(a.candidates[i].pose.translation == b.candidates[i].pose.translation);
        REQUIRE(a.candidates[i].pose.rotation == b.candidates[i].pose.rotation);
    }
}

TEST_CASE("rows that stay degenerate are discarded with a note") {
    SamplerConfig cfg;
    cfg.n_poses = 5;
    cfg.r_range_mm = {1e-13, 1e-12};  // directly under a sensor on the base axis
    cfg.z_range_mm = {400, 800};
    cfg.sensor_origin_mm = Vector3d(0, 0, 5000);
    cfg.seed = 4;
    const CandidateSet set = generate_candidates(cfg);
    REQUIRE(set.candidates.empty());
    REQUIRE(set.n_discarded == 5);
    REQUIRE(set.notes.size() == 5);
}

TEST_CASE("filter_feasible keeps reachable poses in order and reports discards") {
    const DHChain chain = reference_chain();
    SamplerConfig cfg;
    cfg.n_poses = 30;
    cfg.seed = 77;
    CandidateSet set = generate_candidates(cfg);
    // splice in one hopeless pose
    CandidatePose far = build_pose({0.0, 2200.0, 600.0, 0.0}, cfg.sensor_origin_mm);
    set.candidates.insert(set.candidates.begin() + 3, far);

    const FeasibleSet kept = filter_feasible(set.candidates, chain, default_arm_angles(4));
    REQUIRE(!kept.poses.empty());
    REQUIRE(!kept.discard_notes.empty());
    for (const auto& cp : kept.poses)
        REQUIRE((cp.pose.translation - far.pose.translation).norm() > 1e-9);
    // order preserved: kept translations appear in the same relative order
    size_t cursor = 0;
    for (const auto& cp : kept.poses) {
        while (cursor < set.candidates.size() &&
               (set.candidates[cursor].pose.translation - cp.pose.translation).norm() > 1e-12)
            ++cursor;
        REQUIRE(cursor < set.candidates.size());
    }
}

TEST_CASE("filter_feasible of an empty list is empty") {
    const FeasibleSet kept = filter_feasible({}, reference_chain(), default_arm_angles(2));
    REQUIRE(kept.poses.empty());
}

TEST_CASE("invalid sampler configs are rejected") {
    SamplerConfig cfg;
    cfg.n_poses = 0;
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
    SamplerConfig cfg2;
    cfg2.r_range_mm = {500.0, 200.0};
    REQUIRE_THROWS_AS(cfg2.validate(), ConfigError);
}
