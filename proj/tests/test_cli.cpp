#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "wheelodom/io.hpp"
#include "wheelodom/simulator.hpp"

#ifndef WHEELODOM_CLI_PATH
#error "WHEELODOM_CLI_PATH must point at the built wheelodom binary"
#endif

using namespace wheelodom;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

RunResult run_cli(const testutil::TempDir& dir, const std::string& args) {
    const auto out_path = dir.path() / "stdout.txt";
    const auto err_path = dir.path() / "stderr.txt";
    const std::string cmd = std::string(WHEELODOM_CLI_PATH) + " " + args + " >" +
                            out_path.string() + " 2>" + err_path.string();
    const int status = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_path);
    result.err = slurp(err_path);
    return result;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

}  // namespace

TEST(CliSimulate, StraightTenMeters) {
    testutil::TempDir dir("cli_sim");
    write_text(dir.path() / "profile.csv", "v,omega,duration_s\n1.0,0,10\n");
    const RunResult result = run_cli(
        dir, "simulate " + (dir.path() / "profile.csv").string() + " --rate-hz 100 --out-ticks " +
                 (dir.path() / "run.csv").string() + " --out-gt " + (dir.path() / "gt.csv").string());
    ASSERT_EQ(result.exit_code, 0) << result.err;
    const Trajectory gt = read_trajectory_csv(dir.path() / "gt.csv");
    ASSERT_EQ(gt.size(), 1001u);
    EXPECT_NEAR(gt.back().pose.x, 10.0, 1e-6);
    const TickLog ticks = read_ticklog_csv(dir.path() / "run.csv");
    EXPECT_EQ(ticks.size(), 1001u);
    EXPECT_NE(result.out.find("path_length_m=10.0"), std::string::npos) << result.out;
}

TEST(CliSimulate, EmptyProfileExitsTwoNamingFile) {
    testutil::TempDir dir("cli_sim_empty");
    write_text(dir.path() / "profile.csv", "v,omega,duration_s\n");
    const RunResult result =
        run_cli(dir, "simulate " + (dir.path() / "profile.csv").string() + " --out-ticks " +
                         (dir.path() / "run.csv").string());
    EXPECT_EQ(result.exit_code, 2);
    EXPECT_NE(result.err.find("profile.csv"), std::string::npos) << result.err;
}

TEST(CliSimulate, ZeroRateExitsThree) {
    testutil::TempDir dir("cli_sim_rate");
    write_text(dir.path() / "profile.csv", "v,omega,duration_s\n1.0,0,10\n");
    const RunResult result =
        run_cli(dir, "simulate " + (dir.path() / "profile.csv").string() + " --rate-hz 0 " +
                         "--out-ticks " + (dir.path() / "run.csv").string());
    EXPECT_EQ(result.exit_code, 3);
}

TEST(CliSimulate, BinaryTicksAndQuadratureOutputs) {
    testutil::TempDir dir("cli_sim_bin");
    write_text(dir.path() / "profile.csv", "v,omega,duration_s\n0.5,0,2\n");
    const RunResult result = run_cli(
        dir, "simulate " + (dir.path() / "profile.csv").string() + " --out-ticks " +
                 (dir.path() / "run.ticks").string() + " --emit-quadrature " +
                 (dir.path() / "quad").string());
    ASSERT_EQ(result.exit_code, 0) << result.err;
    EXPECT_FALSE(read_ticks_file(dir.path() / "run.ticks").log.empty());
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "quad_left.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "quad_right.csv"));
}

TEST(CliIntegrate, OneRevolutionSummary) {
    testutil::TempDir dir("cli_int");
    TickLog log;
    for (std::int64_t k = 0; k <= 4; ++k) log.push_back({static_cast<std::uint64_t>(k) * 100000, k * 1024, k * 1024});
    write_ticklog_csv(log, dir.path() / "rev.csv");
    const RunResult result =
        run_cli(dir, "integrate " + (dir.path() / "rev.csv").string() + " --out " +
                         (dir.path() / "traj.csv").string());
    ASSERT_EQ(result.exit_code, 0) << result.err;
    EXPECT_NE(result.out.find("path_length_m=1.0304"), std::string::npos) << result.out;
}

TEST(CliIntegrate, ToUgvShiftsFirstRow) {
    testutil::TempDir dir("cli_ugv");
    const TickLog log{{0, 0, 0}, {1000, 100, 100}};
    write_ticklog_csv(log, dir.path() / "log.csv");
    const RunResult result =
        run_cli(dir, "integrate " + (dir.path() / "log.csv").string() + " --to-ugv --out " +
                         (dir.path() / "traj.csv").string());
    ASSERT_EQ(result.exit_code, 0) << result.err;
    const std::string csv = slurp(dir.path() / "traj.csv");
    EXPECT_NE(csv.find("timestamp_us,x,y,z,theta"), std::string::npos);
    EXPECT_NE(csv.find("0,0.000000000,-1.210000000,-0.590000000,"), std::string::npos) << csv;
}

TEST(CliIntegrate, MissingFileExitsTwo) {
    testutil::TempDir dir("cli_int_missing");
    const RunResult result = run_cli(dir, "integrate " + (dir.path() / "nope.csv").string() +
                                              " --out " + (dir.path() / "traj.csv").string());
    EXPECT_EQ(result.exit_code, 2);
}

TEST(CliIntegrate, CircleFlagReportsDiameter) {
    testutil::TempDir dir("cli_int_circle");
    const WheelParams params{0.64, 0.164, 4096};
    const double omega = kTwoPi / 20.0;
    const SimulationResult sim = simulate({{{1.0 * omega, omega, 20.0}}, 200.0}, params);
    write_ticklog_csv(sim.ticks, dir.path() / "circle.csv");
    const RunResult result =
        run_cli(dir, "integrate " + (dir.path() / "circle.csv").string() + " --circle --out " +
                         (dir.path() / "traj.csv").string());
    ASSERT_EQ(result.exit_code, 0) << result.err;
    EXPECT_NE(result.out.find("circle_diameter_m=2.0"), std::string::npos) << result.out;
}

TEST(CliCalibrate, RecoversSyntheticParams) {
    testutil::TempDir dir("cli_cal");
    // Truth sits exactly on an 11-point grid: L = 0.64, R = 0.164.
    const WheelParams truth{grid_value(0.6, 0.8, 11, 2), grid_value(0.15, 0.17, 11, 7), 4096};
    const SimulationResult fwd = simulate({{{1.0, 0.0, 6.0}}, 100.0}, truth);
    write_ticklog_csv(fwd.ticks, dir.path() / "fwd.csv");
    const double omega = kTwoPi / 20.0;
    const SimulationResult circ = simulate({{{1.315 * omega, omega, 20.0}}, 200.0}, truth);
    write_ticklog_csv(circ.ticks, dir.path() / "circle.csv");
    write_text(dir.path() / "manifest.csv",
               "kind,gt_value_m,log_path\nforward,6.0,fwd.csv\ncircle,2.63,circle.csv\n");
    const RunResult result = run_cli(
        dir, "calibrate " + (dir.path() / "manifest.csv").string() +
                 " --n 11 --out " + (dir.path() / "report.csv").string() + " --dump-grid " +
                 (dir.path() / "grid.csv").string());
    ASSERT_EQ(result.exit_code, 0) << result.err;
    const std::string report = slurp(dir.path() / "report.csv");
    char expected[128];
    std::snprintf(expected, sizeof expected, "# best_wheel_base_m=%.17g", truth.wheel_base_m);
    EXPECT_NE(report.find(expected), std::string::npos) << report;
    std::snprintf(expected, sizeof expected, "# best_wheel_radius_m=%.17g", truth.wheel_radius_m);
    EXPECT_NE(report.find(expected), std::string::npos) << report;
    // Grid dump holds one header plus 11 x 11 rows.
    const std::string grid_csv = slurp(dir.path() / "grid.csv");
    EXPECT_EQ(static_cast<int>(std::count(grid_csv.begin(), grid_csv.end(), '\n')), 1 + 11 * 11);
}

TEST(CliCalibrate, StraightOnlyWarnsButSucceeds) {
    testutil::TempDir dir("cli_cal_warn");
    const WheelParams truth{0.64, 0.164, 4096};
    const SimulationResult fwd = simulate({{{1.0, 0.0, 5.0}}, 100.0}, truth);
    write_ticklog_csv(fwd.ticks, dir.path() / "fwd.csv");
    write_text(dir.path() / "manifest.csv", "kind,gt_value_m,log_path\nforward,5.0,fwd.csv\n");
    const RunResult result =
        run_cli(dir, "calibrate " + (dir.path() / "manifest.csv").string() + " --n 5");
    EXPECT_EQ(result.exit_code, 0) << result.err;
    EXPECT_NE(result.err.find("warning"), std::string::npos) << result.err;
    EXPECT_NE(result.err.find("wheel base"), std::string::npos) << result.err;
}

TEST(CliCalibrate, SingleCellGridExitsThree) {
    testutil::TempDir dir("cli_cal_n1");
    write_text(dir.path() / "manifest.csv", "kind,gt_value_m,log_path\n");
    const RunResult result =
        run_cli(dir, "calibrate " + (dir.path() / "manifest.csv").string() + " --n 1");
    EXPECT_EQ(result.exit_code, 3);
}

TEST(CliCalibrate, EmptyManifestExitsThree) {
    testutil::TempDir dir("cli_cal_empty");
    write_text(dir.path() / "manifest.csv", "kind,gt_value_m,log_path\n");
    const RunResult result = run_cli(dir, "calibrate " + (dir.path() / "manifest.csv").string());
    EXPECT_EQ(result.exit_code, 3);
}

TEST(CliDecode, RoundTripsSimulatedQuadrature) {
    testutil::TempDir dir("cli_dec");
    const WheelParams params{0.64, 0.164, 4096};
    const SimulationResult sim = simulate({{{0.4, 0.3, 2.0}}, 100.0}, params);
    const auto [left, right] = emit_quadrature(sim.ground_truth, params);
    write_quadrature_csv(left, dir.path() / "left.csv");
    write_quadrature_csv(right, dir.path() / "right.csv");
    const RunResult result = run_cli(
        dir, "decode " + (dir.path() / "left.csv").string() + " " +
                 (dir.path() / "right.csv").string() + " --out " + (dir.path() / "out.csv").string());
    ASSERT_EQ(result.exit_code, 0) << result.err;
    const TickLog decoded = read_ticklog_csv(dir.path() / "out.csv");
    ASSERT_FALSE(decoded.empty());
    EXPECT_EQ(decoded.back().left_ticks, sim.ticks.back().left_ticks);
    EXPECT_EQ(decoded.back().right_ticks, sim.ticks.back().right_ticks);
}

TEST(CliDecode, FailPolicyExitsThreeWithIndex) {
    testutil::TempDir dir("cli_dec_fail");
    write_text(dir.path() / "left.csv", "timestamp_us,a,b\n0,0,0\n1,1,1\n");  // double flip
    write_text(dir.path() / "right.csv", "timestamp_us,a,b\n0,0,0\n1,0,1\n");
    const RunResult result = run_cli(
        dir, "decode " + (dir.path() / "left.csv").string() + " " +
                 (dir.path() / "right.csv").string() + " --policy fail --out " +
                 (dir.path() / "out.csv").string());
    EXPECT_EQ(result.exit_code, 3);
    EXPECT_NE(result.err.find("sample 1"), std::string::npos) << result.err;
}

TEST(CliParse, CleanStreamMatchesSource) {
    testutil::TempDir dir("cli_parse");
    const TickLog log{{0, 0, 0}, {1000, 10, -10}, {2000, 25, -19}};
    write_ticks_file(log, dir.path() / "run.ticks");
    write_ticklog_csv(log, dir.path() / "expected.csv");
    const RunResult result = run_cli(dir, "parse " + (dir.path() / "run.ticks").string() +
                                              " --out " + (dir.path() / "out.csv").string());
    ASSERT_EQ(result.exit_code, 0) << result.err;
    EXPECT_EQ(slurp(dir.path() / "out.csv"), slurp(dir.path() / "expected.csv"));
    EXPECT_TRUE(result.err.empty()) << result.err;
}

TEST(CliParse, CorruptedStreamReportsDiagnostics) {
    testutil::TempDir dir("cli_parse_bad");
    const TickLog log{{0, 0, 0}, {1000, 10, -10}, {2000, 25, -19}};
    write_ticks_file(log, dir.path() / "run.ticks");
    {
        std::fstream file(dir.path() / "run.ticks",
                          std::ios::in | std::ios::out | std::ios::binary);
        file.seekp(26);
        file.put('\x7f');
    }
    const RunResult result = run_cli(dir, "parse " + (dir.path() / "run.ticks").string() +
                                              " --out " + (dir.path() / "out.csv").string());
    ASSERT_EQ(result.exit_code, 0) << result.err;
    EXPECT_NE(result.err.find("bad_crc=1"), std::string::npos) << result.err;
    const TickLog recovered = read_ticklog_csv(dir.path() / "out.csv");
    EXPECT_EQ(recovered.size(), 2u);
}

TEST(CliParse, UnreadableInputExitsTwo) {
    testutil::TempDir dir("cli_parse_missing");
    const RunResult result = run_cli(dir, "parse " + (dir.path() / "nope.ticks").string() +
                                              " --out " + (dir.path() / "out.csv").string());
    EXPECT_EQ(result.exit_code, 2);
}

TEST(CliUsage, UnknownSubcommandExitsOne) {
    testutil::TempDir dir("cli_usage");
    const RunResult result = run_cli(dir, "frobnicate");
    EXPECT_EQ(result.exit_code, 1);
}

TEST(CliConfig, FileValuesAreOverriddenByFlags) {
    testutil::TempDir dir("cli_config");
    write_text(dir.path() / "params.cfg", "wheel_radius_m = 0.328\n");  // doubled radius
    TickLog log;
    for (std::int64_t k = 0; k <= 4; ++k) log.push_back({static_cast<std::uint64_t>(k) * 100000, k * 1024, k * 1024});
    write_ticklog_csv(log, dir.path() / "rev.csv");
    // Config alone: doubled radius doubles the path length.
    RunResult result = run_cli(dir, "integrate " + (dir.path() / "rev.csv").string() +
                                        " --config " + (dir.path() / "params.cfg").string() +
                                        " --out " + (dir.path() / "t.csv").string());
    ASSERT_EQ(result.exit_code, 0) << result.err;
    EXPECT_NE(result.out.find("path_length_m=2.0608"), std::string::npos) << result.out;
    // Flag overrides config.
    result = run_cli(dir, "integrate " + (dir.path() / "rev.csv").string() + " --config " +
                              (dir.path() / "params.cfg").string() +
                              " --wheel-radius 0.164 --out " + (dir.path() / "t.csv").string());
    ASSERT_EQ(result.exit_code, 0) << result.err;
    EXPECT_NE(result.out.find("path_length_m=1.0304"), std::string::npos) << result.out;
}
