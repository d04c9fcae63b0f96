// zerocal command-line driver: pose generation, measurement simulation,
// Metropolis calibration, accuracy evaluation, and the end-to-end synthetic
// experiment.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "zerocal/zerocal.hpp"

namespace fs = std::filesystem;
using namespace zerocal;

namespace {

struct McmcFlags {
    std::string profile = "ci";
    int steps = -1;
    int burn_in = -1;
    double width = -1.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--profile", profile, "mcmc profile: ci or paper")
            ->check(CLI::IsMember({"ci", "paper"}));
        cmd->add_option("--steps", steps, "override mcmc step count");
        cmd->add_option("--burn-in", burn_in, "override burn-in step count");
        cmd->add_option("--proposal-width", width, "override per-parameter proposal width");
    }

    ExperimentOptions options() const {
        ExperimentOptions o = profile == "paper" ? ExperimentOptions::paper_profile()
                                                 : ExperimentOptions::ci_profile();
        if (steps > 0) o.mcmc.n_steps = steps;
        if (burn_in >= 0) o.mcmc.burn_in = burn_in;
        if (width > 0) o.mcmc.proposal_width = width;
        return o;
    }
};

SceneConfig load_scene(const std::string& path) {
    if (path.empty()) return default_scene();
    return io::scene_from_json(nlohmann::json::parse(io::read_text_file(path)));
}

RegistrationSetup registration_for(const std::string& reg_path, const CalibrationDataset& dataset,
                                   const DHChain& chain) {
    if (!reg_path.empty())
        return io::registration_from_json(nlohmann::json::parse(io::read_text_file(reg_path)));
    return initial_registration(dataset, chain);
}

CalibrationResult result_from_trace(const PosteriorTrace& trace) {
    if (trace.offset_count <= 0) throw ConfigError("trace does not carry a calibration layout");
    return summarize(trace, trace.burn_in);
}

int cmd_generate_poses(const std::string& chain_arg, const std::string& sampler_path,
                       std::uint64_t seed, bool seed_set, int count, int arm_angles, int cap,
                       const std::string& out_poses, const std::string& out_configs) {
    const DHChain chain = io::resolve_chain(chain_arg);
    SamplerConfig sampler;
    if (!sampler_path.empty())
        sampler = io::sampler_from_json(nlohmann::json::parse(io::read_text_file(sampler_path)));
    if (seed_set) sampler.seed = seed;

    const CandidateSet candidates = generate_candidates(sampler);
    const auto angles = default_arm_angles(arm_angles);
    const FeasibleSet feasible = filter_feasible(candidates.candidates, chain, angles);
    std::vector<CandidatePose> kept;
    std::vector<Pose> poses;
    for (const auto& cp : feasible.poses) {
        if (static_cast<int>(kept.size()) >= count) break;
        kept.push_back(cp);
        poses.push_back(cp.pose);
    }
    EnumerationResult enumeration = enumerate_configurations(chain, poses, angles);
    std::vector<ConfigEntry> entries = enumeration.entries;
    if (cap > 0) entries = detail::cap_per_pose(entries, cap);

    io::write_text_file(out_poses, io::poses_to_text(kept));
    io::write_text_file(out_configs, io::configs_to_text(entries, chain.name));
    std::printf("candidates %zu, feasible %zu, kept poses %zu, configurations %zu\n",
                candidates.candidates.size(), feasible.poses.size(), kept.size(), entries.size());
    std::printf("wrote %s and %s\n", out_poses.c_str(), out_configs.c_str());
    return 0;
}

int cmd_simulate(const std::string& scene_path, const std::string& configs_path,
                 const std::string& out, const std::string& stream) {
    const SceneConfig scene = load_scene(scene_path);
    const auto entries = io::configs_from_text(io::read_text_file(configs_path));
    const CalibrationDataset ds = build_dataset(scene, entries, stream);
    io::save_dataset(out, ds);
    std::printf("simulated %d measurements of marker '%s' -> %s\n", ds.size(),
                ds.marker_name.c_str(), out.c_str());
    return 0;
}

int cmd_calibrate(const std::string& chain_arg, const std::string& dataset_path,
                  const std::string& reg_path, const McmcFlags& flags, std::uint64_t seed,
                  bool seed_set, const std::string& out_dir) {
    const DHChain chain = io::resolve_chain(chain_arg);
    const CalibrationDataset ds = io::load_dataset(dataset_path);
    const RegistrationSetup reg = registration_for(reg_path, ds, chain);

    McmcConfig mcmc = flags.options().mcmc;
    if (seed_set) mcmc.seed = seed;
    const PosteriorTrace trace = metropolis_sample(ds, chain, reg.initial, mcmc);
    const CalibrationResult result = summarize(trace, mcmc.burn_in);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    io::write_text_file(dir / "trace.txt", io::trace_to_text(trace));
    io::write_text_file(dir / "calibration.txt", io::calibration_report_text(result));
    io::write_text_file(dir / "calibration.json", io::calibration_to_json(result).dump(2) + "\n");
    io::write_text_file(dir / "registration.json", io::registration_to_json(reg).dump(2) + "\n");
    std::printf("%d records, %d steps, acceptance %.3f\n", ds.size(), mcmc.n_steps,
                trace.acceptance_rate);
    std::printf("%s", io::calibration_report_text(result).c_str());
    std::printf("wrote trace and reports to %s\n", out_dir.c_str());
    return 0;
}

int cmd_evaluate(const std::string& chain_arg, const std::string& dataset_path,
                 const std::string& trace_path, const std::string& reg_path, int n_draws,
                 int n_random_configs, bool skip_theoretical, const std::string& out_dir,
                 const char* file_stem) {
    const DHChain chain = io::resolve_chain(chain_arg);
    const CalibrationDataset ds = io::load_dataset(dataset_path);
    const PosteriorTrace trace = io::trace_from_text(io::read_text_file(trace_path));
    const RegistrationSetup reg = registration_for(reg_path, ds, chain);
    const CalibrationResult result = result_from_trace(trace);

    ParameterVector nominal;
    nominal.theta1 = {};
    nominal.theta2_rad = chain.zero_offsets_rad;
    nominal.sigma_mm = 1.0;

    std::string table = "Accuracy metrics (mm)\n";
    table +=
        "metric                    dataset       model      mean       95% interval            n\n";
    nlohmann::json jmetrics;
    const auto add = [&](const std::string& metric, const std::string& dataset,
                         const std::string& model, const AccuracySummary& s) {
        table += io::metric_row(metric, dataset, model, s);
        jmetrics[metric][dataset][model] = io::summary_to_json(s);
    };
    const std::string ds_label = skip_theoretical ? "validation" : "evaluation";
    add("relative", ds_label, "nominal",
        relative_accuracy(make_clusters(ds, chain, nominal.theta2_rad)));
    add("relative", ds_label, "calibrated",
        relative_accuracy(make_clusters(ds, chain, result.mle.theta2_rad)));
    add("post_registration", ds_label, "nominal",
        post_registration_accuracy(residual_matrix(ds, chain, reg.initial, nominal)));
    add("post_registration", ds_label, "calibrated",
        post_registration_accuracy(residual_matrix(ds, chain, reg.initial, result.mle)));

    if (!skip_theoretical) {
        std::vector<JointConfig> configs;
        for (const auto& r : ds.records) configs.push_back(r.q);
        const std::vector<JointConfig> ws = random_configs(
            chain, n_random_configs, rng::sub_seed(trace.seed, "evaluate-workspace"));
        const auto theo = [&](const std::vector<JointConfig>& cfgs, bool noise,
                              TheoreticalBaseline base, const std::string& label) {
            return theoretical_accuracy(chain, result, cfgs, ds.marker_name, n_draws, noise, base,
                                        rng::sub_seed(trace.seed, "evaluate-" + label));
        };
        add("theoretical_full", ds_label, "nominal",
            theo(configs, true, TheoreticalBaseline::vernier_offsets, "full-before"));
        add("theoretical_full", ds_label, "calibrated",
            theo(configs, true, TheoreticalBaseline::mle, "full-after"));
        add("theoretical_offsets_only", ds_label, "nominal",
            theo(configs, false, TheoreticalBaseline::vernier_offsets, "off-before"));
        add("theoretical_offsets_only", ds_label, "calibrated",
            theo(configs, false, TheoreticalBaseline::mle, "off-after"));
        add("theoretical_full", "workspace", "nominal",
            theo(ws, true, TheoreticalBaseline::vernier_offsets, "ws-full-before"));
        add("theoretical_full", "workspace", "calibrated",
            theo(ws, true, TheoreticalBaseline::mle, "ws-full-after"));
        add("theoretical_offsets_only", "workspace", "nominal",
            theo(ws, false, TheoreticalBaseline::vernier_offsets, "ws-off-before"));
        add("theoretical_offsets_only", "workspace", "calibrated",
            theo(ws, false, TheoreticalBaseline::mle, "ws-off-after"));
    }

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    io::write_text_file(dir / (std::string(file_stem) + ".txt"), table);
    io::write_text_file(dir / (std::string(file_stem) + ".json"), jmetrics.dump(2) + "\n");
    std::printf("%s", table.c_str());
    std::printf("wrote %s.{txt,json} to %s\n", file_stem, out_dir.c_str());
    return 0;
}

int cmd_run_all(const std::string& scene_path, const McmcFlags& flags, std::uint64_t seed,
                bool seed_set, int opt_poses, int val_poses, int candidates, int arm_angles,
                int cap, int draws, int rand_configs, const std::string& out_dir) {
    SceneConfig scene = load_scene(scene_path);
    if (seed_set) scene.seed = seed;
    SamplerConfig sampler;

    ExperimentOptions opts = flags.options();
    opts.n_opt_poses = opt_poses;
    opts.n_val_poses = val_poses;
    opts.n_candidates = candidates;
    opts.n_arm_angles = arm_angles;
    opts.per_pose_cap = cap;
    opts.n_draws = draws;
    opts.n_random_configs = rand_configs;

    ExperimentArtifacts artifacts;
    const ExperimentReport report = run_experiment(scene, sampler, opts, &artifacts);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    io::write_text_file(dir / "poses_optimization.txt", io::poses_to_text(artifacts.opt_poses));
    io::write_text_file(dir / "poses_validation.txt", io::poses_to_text(artifacts.val_poses));
    io::write_text_file(dir / "configs_optimization.txt",
                        io::configs_to_text(artifacts.opt_entries, scene.chain_nominal.name));
    io::write_text_file(dir / "configs_validation.txt",
                        io::configs_to_text(artifacts.val_entries, scene.chain_nominal.name));
    io::save_dataset(dir / "dataset_optimization.txt", artifacts.opt_dataset);
    io::save_dataset(dir / "dataset_validation.txt", artifacts.val_dataset);
    io::write_text_file(dir / "trace.txt", io::trace_to_text(artifacts.trace));
    io::write_text_file(dir / "registration.json",
                        io::registration_to_json(report.registration).dump(2) + "\n");
    io::write_text_file(dir / "calibration.txt",
                        io::calibration_report_text(report.calibration));
    io::write_text_file(dir / "calibration.json",
                        io::calibration_to_json(report.calibration).dump(2) + "\n");
    io::write_text_file(dir / "metrics.txt", io::metrics_report_text(report));
    io::write_text_file(dir / "recovery.txt", io::recovery_report_text(report));
    io::write_text_file(dir / "report.json", io::report_to_json(report).dump(2) + "\n");

    std::printf("scene '%s' seed %llu: %d/%d poses, %d/%d configurations (opt/val)\n",
                report.scene_name.c_str(), static_cast<unsigned long long>(report.seed),
                report.n_opt_poses, report.n_val_poses, report.n_opt_configs,
                report.n_val_configs);
    std::printf("%s", io::recovery_report_text(report).c_str());
    std::printf("%s", io::metrics_report_text(report).c_str());
    std::printf("wrote full report set to %s\n", out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zerocal: Bayesian zero-offset calibration toolkit for serial robots"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("generate-poses",
                                   "sample sensor-facing candidate poses and enumerate "
                                   "reachable joint configurations");
    std::string gen_chain = "srs7_reference", gen_sampler, gen_out_poses = "poses.txt",
                gen_out_configs = "configs.txt";
    std::uint64_t gen_seed = 0;
    int gen_count = 36, gen_arm = 4, gen_cap = 5;
    gen->add_option("--chain", gen_chain, "built-in chain name or chain config file");
    gen->add_option("--sampler", gen_sampler, "sampler config file (defaults built in)");
    auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "sampler seed override");
    gen->add_option("--count", gen_count, "feasible poses to keep");
    gen->add_option("--arm-angles", gen_arm, "number of redundancy angles");
    gen->add_option("--cap", gen_cap, "max configurations per pose (0 = unlimited)");
    gen->add_option("--out-poses", gen_out_poses, "output pose file");
    gen->add_option("--out-configs", gen_out_configs, "output configuration file");

    auto* sim = app.add_subcommand("simulate",
                                   "simulate reference-sensor measurements for a "
                                   "configuration list");
    std::string sim_scene, sim_configs, sim_out = "dataset.txt", sim_stream = "default";
    sim->add_option("--scene", sim_scene, "scene config file (defaults to the built-in scene)");
    sim->add_option("--configs", sim_configs, "configuration file from generate-poses")
        ->required();
    sim->add_option("--out", sim_out, "output dataset file");
    sim->add_option("--stream", sim_stream, "noise stream label");

    auto* cal = app.add_subcommand("calibrate",
                                   "sample the zero-offset posterior for a dataset");
    std::string cal_chain = "srs7_reference", cal_dataset, cal_reg, cal_out = "out";
    std::uint64_t cal_seed = 0;
    McmcFlags cal_flags;
    cal->add_option("--chain", cal_chain, "built-in chain name or chain config file");
    cal->add_option("--dataset", cal_dataset, "dataset file")->required();
    cal->add_option("--registration", cal_reg,
                    "registration json (defaults to 3-point registration from the dataset)");
    cal_flags.attach(cal);
    auto* cal_seed_opt = cal->add_option("--seed", cal_seed, "mcmc seed override");
    cal->add_option("--out-dir", cal_out, "output directory");

    auto* eval = app.add_subcommand("evaluate",
                                    "compute accuracy metrics for a dataset given a trace");
    std::string eval_chain = "srs7_reference", eval_dataset, eval_trace, eval_reg,
                eval_out = "out";
    int eval_draws = 2000, eval_rand = 1000;
    bool eval_skip_theo = false;
    eval->add_option("--chain", eval_chain, "built-in chain name or chain config file");
    eval->add_option("--dataset", eval_dataset, "dataset file")->required();
    eval->add_option("--trace", eval_trace, "posterior trace file")->required();
    eval->add_option("--registration", eval_reg, "registration json");
    eval->add_option("--draws", eval_draws, "posterior draws for theoretical accuracy");
    eval->add_option("--random-configs", eval_rand, "workspace configurations");
    eval->add_flag("--skip-theoretical", eval_skip_theo, "skip theoretical accuracy");
    eval->add_option("--out-dir", eval_out, "output directory");

    auto* val = app.add_subcommand("validate",
                                   "relative and post-registration metrics on a validation "
                                   "dataset");
    std::string val_chain = "srs7_reference", val_dataset, val_trace, val_reg, val_out = "out";
    val->add_option("--chain", val_chain, "built-in chain name or chain config file");
    val->add_option("--dataset", val_dataset, "validation dataset file")->required();
    val->add_option("--trace", val_trace, "posterior trace file")->required();
    val->add_option("--registration", val_reg, "registration json");
    val->add_option("--out-dir", val_out, "output directory");

    auto* all = app.add_subcommand("run-all",
                                   "full synthetic experiment: poses, simulation, "
                                   "registration, calibration, metrics");
    std::string all_scene, all_out = "out";
    std::uint64_t all_seed = 0;
    int all_opt = 36, all_val = 32, all_cand = 60, all_arm = 4, all_cap = 5, all_draws = 2000,
        all_rand = 1000;
    McmcFlags all_flags;
    all->add_option("--scene", all_scene, "scene config file (defaults to the built-in scene)");
    all_flags.attach(all);
    auto* all_seed_opt = all->add_option("--seed", all_seed, "scene seed override");
    all->add_option("--opt-poses", all_opt, "optimization poses to keep");
    all->add_option("--val-poses", all_val, "validation poses to keep");
    all->add_option("--candidates", all_cand, "candidate poses per set");
    all->add_option("--arm-angles", all_arm, "number of redundancy angles");
    all->add_option("--cap", all_cap, "max configurations per pose");
    all->add_option("--draws", all_draws, "posterior draws for theoretical accuracy");
    all->add_option("--random-configs", all_rand, "workspace configurations");
    all->add_option("--out-dir", all_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_generate_poses(gen_chain, gen_sampler, gen_seed, gen_seed_opt->count() > 0,
                                      gen_count, gen_arm, gen_cap, gen_out_poses,
                                      gen_out_configs);
        if (sim->parsed()) return cmd_simulate(sim_scene, sim_configs, sim_out, sim_stream);
        if (cal->parsed())
            return cmd_calibrate(cal_chain, cal_dataset, cal_reg, cal_flags, cal_seed,
                                 cal_seed_opt->count() > 0, cal_out);
        if (eval->parsed())
            return cmd_evaluate(eval_chain, eval_dataset, eval_trace, eval_reg, eval_draws,
                                eval_rand, eval_skip_theo, eval_out, "metrics");
        if (val->parsed())
            return cmd_evaluate(val_chain, val_dataset, val_trace, val_reg, 0, 0, true, val_out,
                                "validation_metrics");
        if (all->parsed())
            return cmd_run_all(all_scene, all_flags, all_seed, all_seed_opt->count() > 0, all_opt,
                               all_val, all_cand, all_arm, all_cap, all_draws, all_rand, all_out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
