#ifndef ZEROCAL_IO_HPP
#define ZEROCAL_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "zerocal/calibration.hpp"
#include "zerocal/errors.hpp"
#include "zerocal/harness.hpp"
#include "zerocal/ik.hpp"
#include "zerocal/kinematics.hpp"
#include "zerocal/metrics.hpp"
#include "zerocal/pose_sampler.hpp"

namespace zerocal::io {

using nlohmann::json;

// All numeric text output uses fixed 15-decimal notation. Reparsing a value
// printed this way and printing it again reproduces the same bytes, which is
// what makes dataset round trips byte-identical.
inline std::string fixed15(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15f", v);
    return buf;
}

inline std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw IoError("write failed: " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (ss >> tok) tokens.push_back(tok);
    return tokens;
}

inline double parse_double(const std::string& s, const std::string& context) {
    try {
        size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError("bad number '" + s + "' in " + context);
    }
}

inline std::string header_value(const std::string& line, const std::string& key,
                                const std::string& context) {
    const std::string prefix = "# " + key + ": ";
    if (line.rfind(prefix, 0) != 0)
        throw IoError("expected '" + prefix + "...' in " + context + ", got '" + line + "'");
    return line.substr(prefix.size());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// chain config

inline json chain_to_json(const DHChain& chain) {
    json j;
    j["name"] = chain.name;
    j["joints"] = json::array();
    for (int i = 0; i < chain.dof(); ++i) {
        const auto& joint = chain.joints[i];
        j["joints"].push_back({{"a_mm", joint.a_mm},
                               {"alpha_rad", joint.alpha_rad},
                               {"d_mm", joint.d_mm},
                               {"theta_home_rad", joint.theta_home_rad},
                               {"limits_rad",
                                {chain.joint_limits[i].min_rad, chain.joint_limits[i].max_rad}}});
    }
    j["zero_offsets_deg"] = json::array();
    for (int i = 0; i < chain.dof(); ++i)
        j["zero_offsets_deg"].push_back(rad2deg(chain.zero_offsets_rad[i]));
    j["tool_points_mm"] = json::object();
    for (const auto& [name, p] : chain.tool_points_mm)
        j["tool_points_mm"][name] = {p.x(), p.y(), p.z()};
    return j;
}

inline DHChain chain_from_json(const json& j) {
    try {
        DHChain chain;
        chain.name = j.at("name").get<std::string>();
        for (const auto& joint : j.at("joints")) {
            chain.joints.push_back({joint.at("a_mm").get<double>(),
                                    joint.at("alpha_rad").get<double>(),
                                    joint.at("d_mm").get<double>(),
                                    joint.at("theta_home_rad").get<double>()});
            const auto& lim = joint.at("limits_rad");
            chain.joint_limits.push_back({lim.at(0).get<double>(), lim.at(1).get<double>()});
        }
        const auto& offsets = j.at("zero_offsets_deg");
        chain.zero_offsets_rad.resize(static_cast<int>(offsets.size()));
        for (int i = 0; i < chain.zero_offsets_rad.size(); ++i)
            chain.zero_offsets_rad[i] = deg2rad(offsets.at(i).get<double>());
        for (const auto& [name, p] : j.at("tool_points_mm").items())
            chain.tool_points_mm[name] =
                Vector3d(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>());
        chain.validate();
        return chain;
    } catch (const json::exception& e) {
        throw IoError(std::string("bad chain config: ") + e.what());
    }
}

// Accepts a built-in chain name or a path to a chain config file.
inline DHChain resolve_chain(const std::string& name_or_path) {
    if (name_or_path == "srs7_reference") return reference_chain();
    if (!std::filesystem::exists(name_or_path))
        throw IoError("unknown chain '" + name_or_path +
                      "' (not a built-in name or an existing file)");
    return chain_from_json(json::parse(read_text_file(name_or_path)));
}

// ---------------------------------------------------------------------------
// scene and sampler configs

inline json transform_to_json(const RigidTransform& t) {
    json j;
    j["rotation"] = json::array();
    for (int i = 0; i < 3; ++i)
        j["rotation"].push_back({t.rotation(i, 0), t.rotation(i, 1), t.rotation(i, 2)});
    j["translation_mm"] = {t.translation.x(), t.translation.y(), t.translation.z()};
    return j;
}

inline RigidTransform transform_from_json(const json& j) {
    RigidTransform t;
    for (int i = 0; i < 3; ++i)
        for (int c = 0; c < 3; ++c) t.rotation(i, c) = j.at("rotation").at(i).at(c).get<double>();
    for (int i = 0; i < 3; ++i) t.translation[i] = j.at("translation_mm").at(i).get<double>();
    return t;
}

inline json scene_to_json(const SceneConfig& scene) {
    json j;
    j["name"] = scene.name;
    j["chain"] = chain_to_json(scene.chain_nominal);
    j["marker"] = scene.marker;
    j["true_offsets_deg"] = json::array();
    for (int i = 0; i < scene.true_offsets_deg.size(); ++i)
        j["true_offsets_deg"].push_back(scene.true_offsets_deg[i]);
    j["true_sensor_pose"] = transform_to_json(scene.true_sensor_pose);
    j["sensor_noise_sigma_mm"] = scene.sensor_noise_sigma_mm;
    j["registration_noise_sigma_mm"] = scene.registration_noise_sigma_mm;
    j["registration_from_nominal_fk"] = scene.registration_from_nominal_fk;
    j["seed"] = scene.seed;
    return j;
}

// The sensor pose may be given numerically ("true_sensor_pose") or
// declaratively as a mounting position plus look-at point.
inline SceneConfig scene_from_json(const json& j) {
    try {
        SceneConfig scene;
        scene.name = j.at("name").get<std::string>();
        if (j.at("chain").is_string())
            scene.chain_nominal = resolve_chain(j.at("chain").get<std::string>());
        else
            scene.chain_nominal = chain_from_json(j.at("chain"));
        scene.marker = j.at("marker").get<std::string>();
        const auto& offsets = j.at("true_offsets_deg");
        scene.true_offsets_deg.resize(static_cast<int>(offsets.size()));
        for (int i = 0; i < scene.true_offsets_deg.size(); ++i)
            scene.true_offsets_deg[i] = offsets.at(i).get<double>();
        if (j.contains("true_sensor_pose")) {
            scene.true_sensor_pose = transform_from_json(j.at("true_sensor_pose"));
        } else {
            const auto& pos = j.at("sensor_position_mm");
            Vector3d origin(pos.at(0).get<double>(), pos.at(1).get<double>(),
                            pos.at(2).get<double>());
            Vector3d look_at(0, 0, 600);
            if (j.contains("sensor_look_at_mm")) {
                const auto& la = j.at("sensor_look_at_mm");
                look_at =
                    Vector3d(la.at(0).get<double>(), la.at(1).get<double>(), la.at(2).get<double>());
            }
            scene.true_sensor_pose = make_sensor_pose(origin, look_at);
        }
        scene.sensor_noise_sigma_mm = j.value("sensor_noise_sigma_mm", 0.1);
        scene.registration_noise_sigma_mm = j.value("registration_noise_sigma_mm", 0.0);
        scene.registration_from_nominal_fk = j.value("registration_from_nominal_fk", false);
        scene.seed = j.value("seed", std::uint64_t{1});
        scene.validate();
        return scene;
    } catch (const json::exception& e) {
        throw IoError(std::string("bad scene config: ") + e.what());
    }
}

inline json sampler_to_json(const SamplerConfig& cfg) {
    json j;
    j["n_poses"] = cfg.n_poses;
    j["r_range_mm"] = {cfg.r_range_mm.lo, cfg.r_range_mm.hi};
    j["z_range_mm"] = {cfg.z_range_mm.lo, cfg.z_range_mm.hi};
    j["theta_z_base_range_rad"] = {cfg.theta_z_base_range_rad.lo, cfg.theta_z_base_range_rad.hi};
    j["theta_z_tool_range_rad"] = {cfg.theta_z_tool_range_rad.lo, cfg.theta_z_tool_range_rad.hi};
    j["sensor_origin_mm"] = {cfg.sensor_origin_mm.x(), cfg.sensor_origin_mm.y(),
                             cfg.sensor_origin_mm.z()};
    j["seed"] = cfg.seed;
    return j;
}

inline SamplerConfig sampler_from_json(const json& j) {
    try {
        SamplerConfig cfg;
        cfg.n_poses = j.value("n_poses", cfg.n_poses);
        const auto range = [&j](const char* key, Range fallback) {
            if (!j.contains(key)) return fallback;
            return Range{j.at(key).at(0).get<double>(), j.at(key).at(1).get<double>()};
        };
        cfg.r_range_mm = range("r_range_mm", cfg.r_range_mm);
        cfg.z_range_mm = range("z_range_mm", cfg.z_range_mm);
        cfg.theta_z_base_range_rad = range("theta_z_base_range_rad", cfg.theta_z_base_range_rad);
        cfg.theta_z_tool_range_rad = range("theta_z_tool_range_rad", cfg.theta_z_tool_range_rad);
        if (j.contains("sensor_origin_mm")) {
            const auto& o = j.at("sensor_origin_mm");
            cfg.sensor_origin_mm =
                Vector3d(o.at(0).get<double>(), o.at(1).get<double>(), o.at(2).get<double>());
        }
        cfg.seed = j.value("seed", cfg.seed);
        cfg.validate();
        return cfg;
    } catch (const json::exception& e) {
        throw IoError(std::string("bad sampler config: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// dataset file: bit-exact round trip, one record per line

inline std::string dataset_to_text(const CalibrationDataset& ds) {
    ds.validate();
    const int k = ds.records.front().q.size();
    std::ostringstream out;
    out << "# zerocal dataset v1\n";
    out << "# chain: " << ds.chain_name << "\n";
    out << "# marker: " << ds.marker_name << "\n";
    out << "# frames: ref=N robot=R\n";
    out << "# columns: pose_index q1.." << "q" << k << "_rad p_ref_x_mm p_ref_y_mm p_ref_z_mm\n";
    for (const auto& r : ds.records) {
        out << r.pose_index;
        for (int i = 0; i < k; ++i) out << ' ' << fixed15(r.q[i]);
        for (int i = 0; i < 3; ++i) out << ' ' << fixed15(r.p_ref_mm[i]);
        out << '\n';
    }
    return out.str();
}

inline CalibrationDataset dataset_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    const auto next_line = [&](const char* what) {
        if (!std::getline(in, line)) throw IoError(std::string("dataset truncated before ") + what);
        return line;
    };
    if (next_line("version") != "# zerocal dataset v1")
        throw IoError("not a zerocal dataset file");
    CalibrationDataset ds;
    ds.chain_name = detail::header_value(next_line("chain"), "chain", "dataset");
    ds.marker_name = detail::header_value(next_line("marker"), "marker", "dataset");
    next_line("frames");
    next_line("columns");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto tokens = detail::split_ws(line);
        if (tokens.size() < 5) throw IoError("short dataset record: '" + line + "'");
        const int k = static_cast<int>(tokens.size()) - 4;
        CalibrationDataset::Record rec;
        rec.pose_index = static_cast<int>(detail::parse_double(tokens[0], "dataset pose_index"));
        Eigen::VectorXd q(k);
        for (int i = 0; i < k; ++i) q[i] = detail::parse_double(tokens[1 + i], "dataset angles");
        rec.q = JointConfig(q);
        for (int i = 0; i < 3; ++i)
            rec.p_ref_mm[i] = detail::parse_double(tokens[1 + k + i], "dataset point");
        ds.records.push_back(std::move(rec));
    }
    ds.validate();
    return ds;
}

inline void save_dataset(const std::filesystem::path& path, const CalibrationDataset& ds) {
    write_text_file(path, dataset_to_text(ds));
}

inline CalibrationDataset load_dataset(const std::filesystem::path& path) {
    return dataset_from_text(read_text_file(path));
}

// ---------------------------------------------------------------------------
// pose and configuration files

inline std::string poses_to_text(const std::vector<CandidatePose>& poses) {
    std::ostringstream out;
    out << "# zerocal poses v1\n";
    out << "# columns: pose_index x_mm y_mm z_mm gamma_rad theta_rad phi_rad"
           " lhs_theta_base lhs_r lhs_z lhs_theta_tool\n";
    for (size_t i = 0; i < poses.size(); ++i) {
        const auto& cp = poses[i];
        const EulerZyx e = rotation_to_euler_zyx(cp.pose.rotation);
        out << i;
        for (int c = 0; c < 3; ++c) out << ' ' << fixed15(cp.pose.translation[c]);
        out << ' ' << fixed15(e.gamma) << ' ' << fixed15(e.theta) << ' ' << fixed15(e.phi);
        for (int c = 0; c < 4; ++c) out << ' ' << fixed15(cp.lhs_coords[c]);
        out << '\n';
    }
    return out.str();
}

inline std::vector<CandidatePose> poses_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "# zerocal poses v1")
        throw IoError("not a zerocal poses file");
    std::getline(in, line);  // columns
    std::vector<CandidatePose> poses;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto tokens = detail::split_ws(line);
        if (tokens.size() != 11) throw IoError("bad pose record: '" + line + "'");
        CandidatePose cp;
        for (int c = 0; c < 3; ++c)
            cp.pose.translation[c] = detail::parse_double(tokens[1 + c], "pose translation");
        cp.pose.rotation = euler_zyx_to_rotation(detail::parse_double(tokens[4], "pose euler"),
                                                 detail::parse_double(tokens[5], "pose euler"),
                                                 detail::parse_double(tokens[6], "pose euler"));
        for (int c = 0; c < 4; ++c)
            cp.lhs_coords[c] = detail::parse_double(tokens[7 + c], "pose lhs");
        poses.push_back(cp);
    }
    return poses;
}

inline std::string configs_to_text(const std::vector<ConfigEntry>& entries,
                                   const std::string& chain_name) {
    std::ostringstream out;
    out << "# zerocal configs v1\n";
    out << "# chain: " << chain_name << "\n";
    out << "# columns: pose_index q_rad... arm_angle_rad branch\n";
    for (const auto& e : entries) {
        out << e.pose_index;
        for (int i = 0; i < e.config.size(); ++i) out << ' ' << fixed15(e.config[i]);
        out << ' ' << fixed15(e.arm_angle) << ' ' << e.label.str() << '\n';
    }
    return out.str();
}

inline std::vector<ConfigEntry> configs_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "# zerocal configs v1")
        throw IoError("not a zerocal configs file");
    std::getline(in, line);  // chain
    std::getline(in, line);  // columns
    std::vector<ConfigEntry> entries;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto tokens = detail::split_ws(line);
        if (tokens.size() < 4) throw IoError("bad config record: '" + line + "'");
        const int k = static_cast<int>(tokens.size()) - 3;
        ConfigEntry e;
        e.pose_index = static_cast<int>(detail::parse_double(tokens[0], "config pose_index"));
        Eigen::VectorXd q(k);
        for (int i = 0; i < k; ++i) q[i] = detail::parse_double(tokens[1 + i], "config angles");
        e.config = JointConfig(q);
        e.arm_angle = detail::parse_double(tokens[1 + k], "config arm angle");
        const std::string& label = tokens[2 + k];
        if (label.size() == 3) {
            e.label.shoulder = label[0] == '+' ? +1 : -1;
            e.label.elbow = label[1] == '+' ? +1 : -1;
            e.label.wrist = label[2] == '+' ? +1 : -1;
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

// ---------------------------------------------------------------------------
// posterior trace

inline std::string trace_to_text(const PosteriorTrace& trace) {
    const int dim = static_cast<int>(trace.samples.cols());
    std::ostringstream out;
    out << "# zerocal trace v1\n";
    out << "# seed: " << trace.seed << "\n";
    out << "# steps: " << trace.n_steps << "\n";
    out << "# burn_in: " << trace.burn_in << "\n";
    out << "# proposal_width: " << fixed15(trace.proposal_width) << "\n";
    out << "# offset_count: " << trace.offset_count << "\n";
    out << "# columns: step accepted";
    if (trace.offset_count > 0 && dim == 7 + trace.offset_count)
        for (const auto& label : parameter_labels(trace.offset_count)) out << ' ' << label;
    else
        for (int d = 0; d < dim; ++d) out << " p" << d;
    out << " log_posterior\n";
    char buf[48];
    for (int s = 0; s < trace.n_steps; ++s) {
        out << s << ' ' << static_cast<int>(trace.accepted[s]);
        for (int d = 0; d < dim; ++d) {
            std::snprintf(buf, sizeof(buf), " %.12f", trace.samples(s, d));
            out << buf;
        }
        std::snprintf(buf, sizeof(buf), " %.6f", trace.log_posteriors[s]);
        out << buf << '\n';
    }
    return out.str();
}

inline PosteriorTrace trace_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    const auto next_line = [&](const char* what) {
        if (!std::getline(in, line)) throw IoError(std::string("trace truncated before ") + what);
        return line;
    };
    if (next_line("version") != "# zerocal trace v1") throw IoError("not a zerocal trace file");
    PosteriorTrace trace;
    trace.seed = std::stoull(detail::header_value(next_line("seed"), "seed", "trace"));
    trace.n_steps = std::stoi(detail::header_value(next_line("steps"), "steps", "trace"));
    trace.burn_in = std::stoi(detail::header_value(next_line("burn_in"), "burn_in", "trace"));
    trace.proposal_width = detail::parse_double(
        detail::header_value(next_line("proposal_width"), "proposal_width", "trace"), "trace");
    trace.offset_count =
        std::stoi(detail::header_value(next_line("offset_count"), "offset_count", "trace"));
    const auto columns = detail::split_ws(next_line("columns"));
    // layout: "#" "columns:" step accepted <dim labels> log_posterior
    const int dim = static_cast<int>(columns.size()) - 5;
    if (dim < 1) throw IoError("trace has no parameter columns");
    trace.samples.resize(trace.n_steps, dim);
    trace.accepted.resize(trace.n_steps);
    trace.log_posteriors.resize(trace.n_steps);
    int n_accepted = 0;
    for (int s = 0; s < trace.n_steps; ++s) {
        const auto tokens = detail::split_ws(next_line("trace row"));
        if (static_cast<int>(tokens.size()) != dim + 3)
            throw IoError("bad trace row: '" + line + "'");
        trace.accepted[s] = tokens[1] == "1" ? 1 : 0;
        n_accepted += trace.accepted[s];
        for (int d = 0; d < dim; ++d)
            trace.samples(s, d) = detail::parse_double(tokens[2 + d], "trace row");
        trace.log_posteriors[s] = detail::parse_double(tokens[2 + dim], "trace row");
    }
    trace.acceptance_rate = static_cast<double>(n_accepted) / trace.n_steps;
    return trace;
}

// ---------------------------------------------------------------------------
// registration file

inline json registration_to_json(const RegistrationSetup& setup) {
    json j = transform_to_json(setup.initial);
    j["triple_indices"] = {setup.triple[0], setup.triple[1], setup.triple[2]};
    return j;
}

inline RegistrationSetup registration_from_json(const json& j) {
    RegistrationSetup setup;
    setup.initial = transform_from_json(j);
    if (j.contains("triple_indices"))
        for (int i = 0; i < 3; ++i) setup.triple[i] = j.at("triple_indices").at(i).get<int>();
    return setup;
}

// ---------------------------------------------------------------------------
// report rendering

inline json summary_to_json(const AccuracySummary& s) {
    return {{"metric", to_string(s.kind)},
            {"mean_mm", s.mean_mm},
            {"interval_95_mm", {s.p2_5_mm, s.p97_5_mm}},
            {"n", s.n}};
}

inline std::string calibration_report_text(const CalibrationResult& result) {
    const int k = result.offset_count;
    std::ostringstream out;
    out << "Zero-offset estimates\n";
    out << "joint        mle_deg      std_deg\n";
    for (int i = 0; i < k; ++i)
        out << "dtheta" << i + 1 << "      " << fixed6(result.mean_packed[6 + i]) << "    "
            << fixed6(result.std_packed[6 + i]) << "\n";
    out << "\nRegistration correction and noise model\n";
    out << "param        mle          std\n";
    const auto labels = parameter_labels(k);
    for (int i = 0; i < 6; ++i)
        out << labels[i] << (labels[i].size() < 6 ? "\t\t" : "\t") << " "
            << fixed6(result.mean_packed[i]) << "    " << fixed6(result.std_packed[i]) << "\n";
    out << "sigma_mm\t " << fixed6(result.mean_packed[6 + k]) << "    "
        << fixed6(result.std_packed[6 + k]) << "\n";
    out << "\nacceptance_rate " << fixed6(result.acceptance_rate) << "\n";
    return out.str();
}

inline json calibration_to_json(const CalibrationResult& result) {
    const int k = result.offset_count;
    const auto labels = parameter_labels(k);
    json params = json::array();
    for (size_t i = 0; i < labels.size(); ++i)
        params.push_back({{"name", labels[i]},
                          {"mle", result.mean_packed[static_cast<int>(i)]},
                          {"std", result.std_packed[static_cast<int>(i)]}});
    return {{"parameters", params},
            {"acceptance_rate", result.acceptance_rate},
            {"offset_count", k},
            {"post_burn_in_samples", result.post_burn_in.rows()}};
}

inline std::string metric_row(const std::string& metric, const std::string& dataset,
                              const std::string& model, const AccuracySummary& s) {
    std::ostringstream out;
    out << metric;
    out << std::string(metric.size() < 26 ? 26 - metric.size() : 1, ' ');
    out << dataset << std::string(dataset.size() < 14 ? 14 - dataset.size() : 1, ' ');
    out << model << std::string(model.size() < 11 ? 11 - model.size() : 1, ' ');
    out << fixed6(s.mean_mm) << "   [" << fixed6(s.p2_5_mm) << ", " << fixed6(s.p97_5_mm) << "]   "
        << s.n << "\n";
    return out.str();
}

inline std::string metrics_report_text(const ExperimentReport& r) {
    std::ostringstream out;
    out << "Accuracy metrics (mm)\n";
    out << "metric                    dataset       model      mean       95% interval"
           "            n\n";
    const auto pair_rows = [&](const std::string& metric, const std::string& dataset,
                               const MetricPair& pair) {
        out << metric_row(metric, dataset, "nominal", pair.before);
        out << metric_row(metric, dataset, "calibrated", pair.after);
    };
    pair_rows("relative", "optimization", r.opt_relative);
    pair_rows("relative", "validation", r.val_relative);
    pair_rows("post_registration", "optimization", r.opt_postreg);
    pair_rows("post_registration", "validation", r.val_postreg);
    pair_rows("theoretical_full", "optimization", r.opt_theoretical_full);
    pair_rows("theoretical_offsets_only", "optimization", r.opt_theoretical_offsets);
    pair_rows("theoretical_full", "workspace", r.ws_theoretical_full);
    pair_rows("theoretical_offsets_only", "workspace", r.ws_theoretical_offsets);
    return out.str();
}

inline std::string recovery_report_text(const ExperimentReport& r) {
    std::ostringstream out;
    out << "Zero-offset recovery against injected scene truth (deg)\n";
    out << "joint        injected     recovered    |error|      posterior_std\n";
    for (int i = 0; i < r.injected_offsets_deg.size(); ++i)
        out << "dtheta" << i + 1 << "      " << fixed6(r.injected_offsets_deg[i]) << "    "
            << fixed6(r.recovered_offsets_deg[i]) << "    " << fixed6(r.recovery_errors_deg[i])
            << "    " << fixed6(r.posterior_std_deg[i]) << "\n";
    return out.str();
}

inline json report_to_json(const ExperimentReport& r) {
    json j;
    j["scene"] = r.scene_name;
    j["seed"] = r.seed;
    j["mcmc"] = {{"steps", r.mcmc_steps},
                 {"burn_in", r.mcmc_burn_in},
                 {"proposal_width", r.proposal_width}};
    j["counts"] = {{"optimization",
                    {{"candidates", r.n_opt_candidates},
                     {"poses", r.n_opt_poses},
                     {"configurations", r.n_opt_configs}}},
                   {"validation",
                    {{"candidates", r.n_val_candidates},
                     {"poses", r.n_val_poses},
                     {"configurations", r.n_val_configs}}}};
    j["calibration"] = calibration_to_json(r.calibration);
    json recovery = json::array();
    for (int i = 0; i < r.injected_offsets_deg.size(); ++i)
        recovery.push_back({{"joint", i + 1},
                            {"injected_deg", r.injected_offsets_deg[i]},
                            {"recovered_deg", r.recovered_offsets_deg[i]},
                            {"error_deg", r.recovery_errors_deg[i]},
                            {"posterior_std_deg", r.posterior_std_deg[i]}});
    j["recovery"] = recovery;
    j["registration"] = registration_to_json(r.registration);
    j["metrics"] = {
        {"optimization",
         {{"relative",
           {{"nominal", summary_to_json(r.opt_relative.before)},
            {"calibrated", summary_to_json(r.opt_relative.after)}}},
          {"post_registration",
           {{"nominal", summary_to_json(r.opt_postreg.before)},
            {"calibrated", summary_to_json(r.opt_postreg.after)}}},
          {"theoretical_full",
           {{"nominal", summary_to_json(r.opt_theoretical_full.before)},
            {"calibrated", summary_to_json(r.opt_theoretical_full.after)}}},
          {"theoretical_offsets_only",
           {{"nominal", summary_to_json(r.opt_theoretical_offsets.before)},
            {"calibrated", summary_to_json(r.opt_theoretical_offsets.after)}}}}},
        {"validation",
         {{"relative",
           {{"nominal", summary_to_json(r.val_relative.before)},
            {"calibrated", summary_to_json(r.val_relative.after)}}},
          {"post_registration",
           {{"nominal", summary_to_json(r.val_postreg.before)},
            {"calibrated", summary_to_json(r.val_postreg.after)}}}}},
        {"workspace",
         {{"theoretical_full",
           {{"nominal", summary_to_json(r.ws_theoretical_full.before)},
            {"calibrated", summary_to_json(r.ws_theoretical_full.after)}}},
          {"theoretical_offsets_only",
           {{"nominal", summary_to_json(r.ws_theoretical_offsets.before)},
            {"calibrated", summary_to_json(r.ws_theoretical_offsets.after)}}}}}};
    return j;
}

}  // namespace zerocal::io

#endif  // ZEROCAL_IO_HPP
