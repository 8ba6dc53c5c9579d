// wheelodom: encoder-log tooling around the wheelodom library.
//
// Subcommands: simulate, integrate, calibrate, decode, parse.
// Exit codes: 0 success, 1 usage, 2 input parse error, 3 validation error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wheelodom/wheelodom.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;

struct ParamFlags {
    std::optional<double> wheel_base;
    std::optional<double> wheel_radius;
    std::optional<std::int64_t> counts_per_rev;
    std::optional<double> max_step;
    std::string config_path;

    void attach(CLI::App* cmd) {
        cmd->add_option("--wheel-base", wheel_base, "Wheel baseline L in meters (default 0.64)");
        cmd->add_option("--wheel-radius", wheel_radius, "Wheel radius R in meters (default 0.164)");
        cmd->add_option("--counts-per-rev", counts_per_rev,
                        "Decoded counts per wheel revolution (default 4096)");
        cmd->add_option("--max-step", max_step,
                        "Per-step wheel travel sanity bound in meters (default 1.0)");
        cmd->add_option("--config", config_path, "Key-value config file; flags override it");
    }

    std::map<std::string, double> config() const {
        if (config_path.empty()) return {};
        return wheelodom::read_config_kv(config_path);
    }

    wheelodom::WheelParams resolve_params(const std::map<std::string, double>& cfg) const {
        wheelodom::WheelParams params;
        if (cfg.count("wheel_base_m")) params.wheel_base_m = cfg.at("wheel_base_m");
        if (cfg.count("wheel_radius_m")) params.wheel_radius_m = cfg.at("wheel_radius_m");
        if (cfg.count("counts_per_rev"))
            params.counts_per_rev = static_cast<std::int32_t>(cfg.at("counts_per_rev"));
        if (wheel_base) params.wheel_base_m = *wheel_base;
        if (wheel_radius) params.wheel_radius_m = *wheel_radius;
        if (counts_per_rev) params.counts_per_rev = static_cast<std::int32_t>(*counts_per_rev);
        return params;
    }

    double resolve_max_step(const std::map<std::string, double>& cfg) const {
        if (max_step) return *max_step;
        if (cfg.count("max_step_m")) return cfg.at("max_step_m");
        return wheelodom::kDefaultMaxStepM;
    }
};

void write_ticklog(const wheelodom::TickLog& log, const std::filesystem::path& path) {
    if (path.extension() == ".ticks")
        wheelodom::write_ticks_file(log, path);
    else
        wheelodom::write_ticklog_csv(log, path);
}

int run_simulate(const std::string& profile_path, double rate_hz, const ParamFlags& flags,
                 const std::string& out_ticks, const std::string& out_gt,
                 const std::string& quad_prefix) {
    const auto cfg = flags.config();
    const wheelodom::WheelParams params = flags.resolve_params(cfg);
    const wheelodom::CommandProfile profile = wheelodom::read_profile_csv(profile_path, rate_hz);
    const wheelodom::SimulationResult sim =
        wheelodom::simulate(profile, params, {}, 0, flags.resolve_max_step(cfg));
    write_ticklog(sim.ticks, out_ticks);
    if (!out_gt.empty()) wheelodom::write_trajectory_csv(sim.ground_truth.trajectory, out_gt);
    if (!quad_prefix.empty()) {
        const auto [left, right] = wheelodom::emit_quadrature(sim.ground_truth, params);
        wheelodom::write_quadrature_csv(left, quad_prefix + "_left.csv");
        wheelodom::write_quadrature_csv(right, quad_prefix + "_right.csv");
    }
    const wheelodom::Pose2D final = sim.ground_truth.trajectory.back().pose;
    std::printf("samples=%zu final_x=%.6f final_y=%.6f final_theta=%.6f path_length_m=%.6f\n",
                sim.ticks.size(), final.x, final.y, final.theta,
                wheelodom::path_length(sim.ground_truth.trajectory));
    return kExitOk;
}

int run_integrate(const std::string& log_path, const ParamFlags& flags, const std::string& out,
                  bool to_ugv, bool circle) {
    const auto cfg = flags.config();
    const wheelodom::WheelParams params = flags.resolve_params(cfg);
    const wheelodom::TickLog log = wheelodom::read_ticklog_any(log_path);
    const wheelodom::Trajectory traj =
        wheelodom::integrate_log(log, params, {}, flags.resolve_max_step(cfg));
    if (to_ugv) {
        const wheelodom::RigidTransform3D t = wheelodom::transform_from_config(cfg);
        const wheelodom::Trajectory3D moved = wheelodom::transform_trajectory(traj, t);
        if (!moved.has_heading)
            std::cerr << "warning: rotation is not about z; headings omitted from output\n";
        wheelodom::write_trajectory3d_csv(moved, out);
    } else {
        wheelodom::write_trajectory_csv(traj, out);
    }
    std::printf("path_length_m=%.6f", wheelodom::path_length(traj));
    if (circle) std::printf(" circle_diameter_m=%.6f", wheelodom::circle_diameter(traj));
    std::printf("\n");
    return kExitOk;
}

int run_calibrate(const std::string& manifest_path, wheelodom::GridSpec grid,
                  const ParamFlags& flags, unsigned threads, bool refine, const std::string& out,
                  const std::string& dump_grid, const std::string& format) {
    const auto cfg = flags.config();
    const std::vector<wheelodom::ExperimentRecord> experiments =
        wheelodom::load_experiments(manifest_path);

    wheelodom::GridSearchOptions options;
    options.threads = threads;
    options.refine = refine;
    options.keep_full_grid = !dump_grid.empty();
    options.max_step_m = flags.resolve_max_step(cfg);
    options.counts_per_rev = flags.resolve_params(cfg).counts_per_rev;
    const wheelodom::CalibrationResult result =
        wheelodom::grid_search(experiments, grid, options);

    for (const std::string& warning : result.warnings)
        std::cerr << "warning: " << warning << "\n";

    std::uint64_t hash = wheelodom::fnv1a64(wheelodom::detail::read_file_bytes(manifest_path));
    for (const wheelodom::ManifestEntry& entry : wheelodom::read_manifest_csv(manifest_path)) {
        const std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();
        const auto log_path = entry.log_path.is_absolute() ? entry.log_path : base / entry.log_path;
        hash = wheelodom::fnv1a64(wheelodom::detail::read_file_bytes(log_path), hash);
    }

    if (format == "csv") {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s", result.best_params.wheel_base_m,
                      result.best_params.wheel_radius_m,
                      wheelodom::render_percent(result.objective_value).c_str());
        std::printf("L,R,mean_error\n%s\n", buf);
    } else {
        std::fputs(wheelodom::render_report_text(result).c_str(), stdout);
    }
    if (!out.empty()) wheelodom::write_report_csv(result, out, hash);
    if (!dump_grid.empty()) wheelodom::write_grid_surface_csv(result, dump_grid);
    return kExitOk;
}

int run_decode(const std::string& left_path, const std::string& right_path,
               const std::string& policy, const std::string& out) {
    const wheelodom::IllegalTransitionPolicy p =
        policy == "fail" ? wheelodom::IllegalTransitionPolicy::kFail
                         : wheelodom::IllegalTransitionPolicy::kSkipAndCount;
    const wheelodom::DecodeResult left =
        wheelodom::decode_stream(wheelodom::read_quadrature_csv(left_path), p);
    const wheelodom::DecodeResult right =
        wheelodom::decode_stream(wheelodom::read_quadrature_csv(right_path), p);
    if (left.illegal_transitions + right.illegal_transitions > 0)
        std::cerr << "illegal transitions: left=" << left.illegal_transitions
                  << " right=" << right.illegal_transitions << "\n";
    wheelodom::write_ticklog_csv(wheelodom::merge_decoded_counts(left.counts, right.counts), out);
    return kExitOk;
}

int run_parse(const std::string& in_path, const std::string& out) {
    const wheelodom::TicksFileResult result = wheelodom::read_ticks_file(in_path);
    const wheelodom::ParseDiagnostics& d = result.parse_diagnostics;
    if (d.bad_crc + d.bad_version + d.resyncs + d.trailing_partial + result.dropped_nonmonotonic > 0)
        std::cerr << "diagnostics: bad_crc=" << d.bad_crc << " bad_version=" << d.bad_version
                  << " resyncs=" << d.resyncs << " trailing_partial=" << d.trailing_partial
                  << " dropped_nonmonotonic=" << result.dropped_nonmonotonic << "\n";
    wheelodom::write_ticklog_csv(result.log, out);
    std::printf("frames=%zu\n", result.log.size());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wheel odometry toolkit: simulate, decode, integrate, calibrate"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Generate ground truth and tick logs");
    std::string profile_path, sim_out_ticks, sim_out_gt, sim_quad_prefix;
    double rate_hz = 100.0;
    ParamFlags sim_flags;
    simulate->add_option("profile", profile_path, "Command profile CSV (v,omega,duration_s)")
        ->required();
    simulate->add_option("--rate-hz", rate_hz, "Sample rate in Hz (default 100)");
    simulate->add_option("--out-ticks", sim_out_ticks, "Output tick log (.csv or .ticks)")
        ->required();
    simulate->add_option("--out-gt", sim_out_gt, "Output ground-truth trajectory CSV");
    simulate->add_option("--emit-quadrature", sim_quad_prefix,
                         "Also write <prefix>_left.csv / <prefix>_right.csv A/B streams");
    sim_flags.attach(simulate);

    // integrate
    auto* integrate = app.add_subcommand("integrate", "Dead-reckon a tick log into a trajectory");
    std::string int_log_path, int_out;
    bool to_ugv = false, with_circle = false;
    ParamFlags int_flags;
    integrate->add_option("ticklog", int_log_path, "Tick log (.csv or .ticks)")->required();
    integrate->add_option("--out", int_out, "Output trajectory CSV")->required();
    integrate->add_flag("--to-ugv", to_ugv, "Transform output into the UGV frame");
    integrate->add_flag("--circle", with_circle, "Also report the fitted circle diameter");
    int_flags.attach(integrate);

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate", "Grid-search L and R against experiments");
    std::string manifest_path, cal_out, cal_dump_grid, cal_format = "text";
    wheelodom::GridSpec grid;
    unsigned threads = 1;
    bool refine = false;
    ParamFlags cal_flags;
    calibrate->add_option("manifest", manifest_path, "Experiment manifest CSV")->required();
    calibrate->add_option("--l-min", grid.l_min, "Grid minimum for L (default 0.6)");
    calibrate->add_option("--l-max", grid.l_max, "Grid maximum for L (default 0.8)");
    calibrate->add_option("--r-min", grid.r_min, "Grid minimum for R (default 0.15)");
    calibrate->add_option("--r-max", grid.r_max, "Grid maximum for R (default 0.17)");
    calibrate->add_option("--n", grid.n_per_axis, "Grid values per axis (default 50)");
    calibrate->add_option("--threads", threads, "Worker threads (default 1)");
    calibrate->add_flag("--refine", refine, "Re-centered second grid pass");
    calibrate->add_option("--out", cal_out, "Write machine-readable report CSV here");
    calibrate->add_option("--dump-grid", cal_dump_grid, "Write the full L,R,objective surface CSV");
    calibrate->add_option("--format", cal_format, "Stdout format: text or csv")
        ->check(CLI::IsMember({"text", "csv"}));
    cal_flags.attach(calibrate);

    // decode
    auto* decode = app.add_subcommand("decode", "Decode per-wheel quadrature CSVs to a tick log");
    std::string left_path, right_path, dec_out, policy = "skip";
    decode->add_option("left", left_path, "Left wheel quadrature CSV")->required();
    decode->add_option("right", right_path, "Right wheel quadrature CSV")->required();
    decode->add_option("--out", dec_out, "Output tick log CSV")->required();
    decode->add_option("--policy", policy, "Illegal transition policy: fail or skip")
        ->check(CLI::IsMember({"fail", "skip"}));

    // parse
    auto* parse = app.add_subcommand("parse", "Parse a binary .ticks frame stream to CSV");
    std::string parse_in, parse_out;
    parse->add_option("stream", parse_in, "Binary frame stream (.ticks)")->required();
    parse->add_option("--out", parse_out, "Output tick log CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (simulate->parsed())
            return run_simulate(profile_path, rate_hz, sim_flags, sim_out_ticks, sim_out_gt,
                                sim_quad_prefix);
        if (integrate->parsed())
            return run_integrate(int_log_path, int_flags, int_out, to_ugv, with_circle);
        if (calibrate->parsed())
            return run_calibrate(manifest_path, grid, cal_flags, threads, refine, cal_out,
                                 cal_dump_grid, cal_format);
        if (decode->parsed()) return run_decode(left_path, right_path, policy, dec_out);
        if (parse->parsed()) return run_parse(parse_in, parse_out);
    } catch (const wheelodom::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const wheelodom::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const wheelodom::EmptyInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const wheelodom::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitUsage;
}
