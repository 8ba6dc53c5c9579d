#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "wheelodom/calibration.hpp"
#include "wheelodom/errors.hpp"
#include "wheelodom/protocol.hpp"
#include "wheelodom/quadrature.hpp"
#include "wheelodom/simulator.hpp"
#include "wheelodom/transform.hpp"
#include "wheelodom/types.hpp"

// File formats. All CSV formats are strict: exact header line, exact column
// count, no padding tolerated in numeric fields. Parse errors carry 1-based
// line numbers (the header is line 1).
//
//   tick log CSV     timestamp_us,left_ticks,right_ticks
//   trajectory CSV   timestamp_us,x,y,theta
//   UGV trajectory   timestamp_us,x,y,z[,theta]
//   quadrature CSV   timestamp_us,a,b          (one file per wheel)
//   profile CSV      v,omega,duration_s        (sample rate passed separately)
//   manifest CSV     kind,gt_value_m,log_path  (kind: forward|backward|circle)
//   grid surface CSV L,R,objective
//   .ticks binary    concatenated 21-byte frames (see protocol.hpp)
//   config           `key = value` lines, '#' comments

namespace wheelodom {

namespace detail {

inline std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

template <typename Int>
Int parse_int(std::string_view field, std::size_t line_no, const char* what) {
    Int value{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError(std::string("expected integer ") + what + ", got '" + std::string(field) + "'",
                         line_no);
    return value;
}

inline double parse_double(std::string_view field, std::size_t line_no, const char* what) {
    double value{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError(std::string("expected number ") + what + ", got '" + std::string(field) + "'",
                         line_no);
    return value;
}

// Iterates non-empty lines (tolerating a trailing newline and CRLF), calling
// on_line(line, line_no). Returns the total number of lines seen.
template <typename Fn>
std::size_t for_each_line(const std::string& content, Fn&& on_line) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < content.size()) {
        std::size_t end = content.find('\n', pos);
        if (end == std::string::npos) end = content.size();
        std::string_view line(content.data() + pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        on_line(line, line_no);
        pos = end + 1;
    }
    return line_no;
}

inline void require_header(std::string_view line, std::string_view expected,
                           const std::filesystem::path& path) {
    if (line != expected)
        throw ParseError(path.string() + ": expected header '" + std::string(expected) + "', got '" +
                             std::string(line) + "'",
                         1);
}

inline std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9f", v);
    return buf;
}

}  // namespace detail

// ---- tick log CSV ----------------------------------------------------------

inline constexpr std::string_view kTickLogHeader = "timestamp_us,left_ticks,right_ticks";

inline TickLog read_ticklog_csv(const std::filesystem::path& path) {
    const std::string content = detail::read_file_bytes(path);
    TickLog log;
    bool saw_header = false;
    detail::for_each_line(content, [&](std::string_view line, std::size_t line_no) {
        if (line_no == 1) {
            detail::require_header(line, kTickLogHeader, path);
            saw_header = true;
            return;
        }
        const auto fields = detail::split_fields(line);
        if (fields.size() != 3)
            throw ParseError(path.string() + ": expected 3 columns, got " +
                                 std::to_string(fields.size()),
                             line_no);
        TickSample sample;
        sample.timestamp_us = detail::parse_int<std::uint64_t>(fields[0], line_no, "timestamp_us");
        sample.left_ticks = detail::parse_int<std::int64_t>(fields[1], line_no, "left_ticks");
        sample.right_ticks = detail::parse_int<std::int64_t>(fields[2], line_no, "right_ticks");
        if (!log.empty() && sample.timestamp_us <= log.back().timestamp_us)
            throw ParseError(path.string() + ": timestamps must be strictly increasing", line_no);
        log.push_back(sample);
    });
    if (!saw_header) throw ParseError(path.string() + ": empty file, expected header", 1);
    return log;
}

inline void write_ticklog_csv(const TickLog& log, const std::filesystem::path& path) {
    std::ofstream out = detail::open_out(path);
    out << kTickLogHeader << '\n';
    for (const TickSample& s : log)
        out << s.timestamp_us << ',' << s.left_ticks << ',' << s.right_ticks << '\n';
}

// ---- trajectory CSV --------------------------------------------------------

inline constexpr std::string_view kTrajectoryHeader = "timestamp_us,x,y,theta";

inline void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
    std::ofstream out = detail::open_out(path);
    out << kTrajectoryHeader << '\n';
    for (const TimedPose& tp : traj)
        out << tp.timestamp_us << ',' << detail::format_double(tp.pose.x) << ','
            << detail::format_double(tp.pose.y) << ',' << detail::format_double(tp.pose.theta)
            << '\n';
}

inline Trajectory read_trajectory_csv(const std::filesystem::path& path) {
    const std::string content = detail::read_file_bytes(path);
    Trajectory traj;
    bool saw_header = false;
    detail::for_each_line(content, [&](std::string_view line, std::size_t line_no) {
        if (line_no == 1) {
            detail::require_header(line, kTrajectoryHeader, path);
            saw_header = true;
            return;
        }
        const auto fields = detail::split_fields(line);
        if (fields.size() != 4)
            throw ParseError(path.string() + ": expected 4 columns", line_no);
        TimedPose tp;
        tp.timestamp_us = detail::parse_int<std::uint64_t>(fields[0], line_no, "timestamp_us");
        tp.pose.x = detail::parse_double(fields[1], line_no, "x");
        tp.pose.y = detail::parse_double(fields[2], line_no, "y");
        tp.pose.theta = detail::parse_double(fields[3], line_no, "theta");
        traj.push_back(tp);
    });
    if (!saw_header) throw ParseError(path.string() + ": empty file, expected header", 1);
    return traj;
}

inline void write_trajectory3d_csv(const Trajectory3D& traj, const std::filesystem::path& path) {
    std::ofstream out = detail::open_out(path);
    if (traj.has_heading) {
        out << "timestamp_us,x,y,z,theta\n";
        for (const TimedPoint3D& p : traj.points)
            out << p.timestamp_us << ',' << detail::format_double(p.position.x) << ','
                << detail::format_double(p.position.y) << ',' << detail::format_double(p.position.z)
                << ',' << detail::format_double(p.heading) << '\n';
    } else {
        out << "timestamp_us,x,y,z\n";
        for (const TimedPoint3D& p : traj.points)
            out << p.timestamp_us << ',' << detail::format_double(p.position.x) << ','
                << detail::format_double(p.position.y) << ',' << detail::format_double(p.position.z)
                << '\n';
    }
}

// ---- quadrature CSV --------------------------------------------------------

inline constexpr std::string_view kQuadratureHeader = "timestamp_us,a,b";

inline QuadSampleStream read_quadrature_csv(const std::filesystem::path& path) {
    const std::string content = detail::read_file_bytes(path);
    QuadSampleStream stream;
    bool saw_header = false;
    detail::for_each_line(content, [&](std::string_view line, std::size_t line_no) {
        if (line_no == 1) {
            detail::require_header(line, kQuadratureHeader, path);
            saw_header = true;
            return;
        }
        const auto fields = detail::split_fields(line);
        if (fields.size() != 3)
            throw ParseError(path.string() + ": expected 3 columns", line_no);
        QuadSample sample;
        sample.timestamp_us = detail::parse_int<std::uint64_t>(fields[0], line_no, "timestamp_us");
        const int a = detail::parse_int<int>(fields[1], line_no, "a");
        const int b = detail::parse_int<int>(fields[2], line_no, "b");
        if ((a != 0 && a != 1) || (b != 0 && b != 1))
            throw ParseError(path.string() + ": channel levels must be 0 or 1", line_no);
        sample.state = {a == 1, b == 1};
        if (!stream.empty() && sample.timestamp_us < stream.back().timestamp_us)
            throw ParseError(path.string() + ": timestamps must be non-decreasing", line_no);
        stream.push_back(sample);
    });
    if (!saw_header) throw ParseError(path.string() + ": empty file, expected header", 1);
    return stream;
}

inline void write_quadrature_csv(const QuadSampleStream& stream,
                                 const std::filesystem::path& path) {
    std::ofstream out = detail::open_out(path);
    out << kQuadratureHeader << '\n';
    for (const QuadSample& s : stream)
        out << s.timestamp_us << ',' << (s.state.a ? 1 : 0) << ',' << (s.state.b ? 1 : 0) << '\n';
}

// ---- command profile CSV ---------------------------------------------------

inline constexpr std::string_view kProfileHeader = "v,omega,duration_s";

// Parses profile segments; the sample rate is supplied by the caller. A file
// with no data rows is rejected: an empty profile cannot be simulated.
inline CommandProfile read_profile_csv(const std::filesystem::path& path, double sample_rate_hz) {
    const std::string content = detail::read_file_bytes(path);
    CommandProfile profile;
    profile.sample_rate_hz = sample_rate_hz;
    bool saw_header = false;
    detail::for_each_line(content, [&](std::string_view line, std::size_t line_no) {
        if (line_no == 1) {
            detail::require_header(line, kProfileHeader, path);
            saw_header = true;
            return;
        }
        const auto fields = detail::split_fields(line);
        if (fields.size() != 3)
            throw ParseError(path.string() + ": expected 3 columns", line_no);
        ProfileSegment seg;
        seg.v_mps = detail::parse_double(fields[0], line_no, "v");
        seg.omega_radps = detail::parse_double(fields[1], line_no, "omega");
        seg.duration_s = detail::parse_double(fields[2], line_no, "duration_s");
        profile.segments.push_back(seg);
    });
    if (!saw_header) throw ParseError(path.string() + ": empty file, expected header", 1);
    if (profile.segments.empty())
        throw ParseError(path.string() + ": profile has no segments", 1);
    return profile;
}

// ---- experiment manifest CSV -----------------------------------------------

inline constexpr std::string_view kManifestHeader = "kind,gt_value_m,log_path";

struct ManifestEntry {
    ExperimentKind kind = ExperimentKind::kForward;
    double gt_value_m = 0.0;
    std::filesystem::path log_path;
};

inline std::vector<ManifestEntry> read_manifest_csv(const std::filesystem::path& path) {
    const std::string content = detail::read_file_bytes(path);
    std::vector<ManifestEntry> entries;
    bool saw_header = false;
    detail::for_each_line(content, [&](std::string_view line, std::size_t line_no) {
        if (line_no == 1) {
            detail::require_header(line, kManifestHeader, path);
            saw_header = true;
            return;
        }
        const auto fields = detail::split_fields(line);
        if (fields.size() != 3)
            throw ParseError(path.string() + ": expected 3 columns", line_no);
        ManifestEntry entry;
        if (fields[0] == "forward") entry.kind = ExperimentKind::kForward;
        else if (fields[0] == "backward") entry.kind = ExperimentKind::kBackward;
        else if (fields[0] == "circle") entry.kind = ExperimentKind::kCircle;
        else
            throw ParseError(path.string() + ": kind must be forward, backward or circle, got '" +
                                 std::string(fields[0]) + "'",
                             line_no);
        entry.gt_value_m = detail::parse_double(fields[1], line_no, "gt_value_m");
        if (!(entry.gt_value_m > 0.0))
            throw ParseError(path.string() + ": gt_value_m must be positive", line_no);
        if (fields[2].empty()) throw ParseError(path.string() + ": log_path is empty", line_no);
        entry.log_path = std::filesystem::path(std::string(fields[2]));
        entries.push_back(entry);
    });
    if (!saw_header) throw ParseError(path.string() + ": empty file, expected header", 1);
    return entries;
}

// Loads the experiments a manifest names. Relative log paths resolve against
// the manifest's directory. Logs may be CSV or .ticks binary.
inline std::vector<ExperimentRecord> load_experiments(const std::filesystem::path& manifest_path);

// ---- binary .ticks file ----------------------------------------------------

inline void write_ticks_file(const TickLog& log, const std::filesystem::path& path) {
    std::ofstream out = detail::open_out(path, true);
    const std::vector<std::uint8_t> bytes = ticklog_to_bytes(log);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

struct TicksFileResult {
    TickLog log;
    ParseDiagnostics parse_diagnostics;
    std::uint64_t dropped_nonmonotonic = 0;
};

inline TicksFileResult read_ticks_file(const std::filesystem::path& path) {
    const std::string content = detail::read_file_bytes(path);
    const ParseResult parsed =
        parse_stream({reinterpret_cast<const std::uint8_t*>(content.data()), content.size()});
    TicksFileResult result;
    result.parse_diagnostics = parsed.diagnostics;
    if (parsed.frames.empty()) throw EmptyInputError(path.string() + ": no valid frames");
    TickLogResult ordered = frames_to_ticklog(parsed.frames);
    result.log = std::move(ordered.log);
    result.dropped_nonmonotonic = ordered.dropped_nonmonotonic;
    return result;
}

// Dispatches on extension: ".ticks" is the binary framed format, anything
// else is tick-log CSV.
inline TickLog read_ticklog_any(const std::filesystem::path& path) {
    if (path.extension() == ".ticks") return read_ticks_file(path).log;
    return read_ticklog_csv(path);
}

inline std::vector<ExperimentRecord> load_experiments(const std::filesystem::path& manifest_path) {
    const std::vector<ManifestEntry> entries = read_manifest_csv(manifest_path);
    std::vector<ExperimentRecord> experiments;
    experiments.reserve(entries.size());
    const std::filesystem::path base = manifest_path.parent_path();
    for (const ManifestEntry& entry : entries) {
        ExperimentRecord exp;
        exp.kind = entry.kind;
        exp.gt_value_m = entry.gt_value_m;
        const std::filesystem::path log_path =
            entry.log_path.is_absolute() ? entry.log_path : base / entry.log_path;
        exp.log = read_ticklog_any(log_path);
        experiments.push_back(std::move(exp));
    }
    return experiments;
}

// ---- key-value config ------------------------------------------------------

// `key = value` per line; '#' starts a comment. Recognized keys:
//   wheel_base_m, wheel_radius_m, counts_per_rev, max_step_m,
//   l0, h0, r00..r22, tx, ty, tz
inline std::map<std::string, double> read_config_kv(const std::filesystem::path& path) {
    static const char* kKnown[] = {"wheel_base_m", "wheel_radius_m", "counts_per_rev",
                                   "max_step_m",   "l0",             "h0",
                                   "r00",          "r01",            "r02",
                                   "r10",          "r11",            "r12",
                                   "r20",          "r21",            "r22",
                                   "tx",           "ty",             "tz"};
    const std::string content = detail::read_file_bytes(path);
    std::map<std::string, double> values;
    detail::for_each_line(content, [&](std::string_view line, std::size_t line_no) {
        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        auto trim = [](std::string_view s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
            while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
            return s;
        };
        line = trim(line);
        if (line.empty()) return;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(path.string() + ": expected 'key = value'", line_no);
        const std::string key(trim(line.substr(0, eq)));
        bool known = false;
        for (const char* k : kKnown) known = known || key == k;
        if (!known) throw ParseError(path.string() + ": unknown key '" + key + "'", line_no);
        values[key] = detail::parse_double(trim(line.substr(eq + 1)), line_no, key.c_str());
    });
    return values;
}

// Builds the vehicle->UGV transform from config values: a full rotation
// matrix (r00..r22, with optional tx/ty/tz) when present, otherwise identity
// rotation with translation (0, -l0, -h0).
inline RigidTransform3D transform_from_config(const std::map<std::string, double>& config) {
    const bool has_matrix = config.count("r00") != 0;
    if (has_matrix) {
        RigidTransform3D t;
        const char* names[3][3] = {{"r00", "r01", "r02"}, {"r10", "r11", "r12"}, {"r20", "r21", "r22"}};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const auto it = config.find(names[i][j]);
                if (it == config.end())
                    throw ValidationError("transform config: incomplete rotation matrix");
                t.rotation.m[i][j] = it->second;
            }
        t.translation.x = config.count("tx") ? config.at("tx") : 0.0;
        t.translation.y = config.count("ty") ? config.at("ty") : 0.0;
        t.translation.z = config.count("tz") ? config.at("tz") : 0.0;
        require_rigid(t);
        return t;
    }
    VehicleToUgvOffsets offsets;
    if (config.count("l0")) offsets.l0_m = config.at("l0");
    if (config.count("h0")) offsets.h0_m = config.at("h0");
    return vehicle_to_ugv(offsets);
}

// ---- calibration report ----------------------------------------------------

// Renders a fraction as a percentage with two decimals, half-up.
inline std::string render_percent(double fraction) {
    const long long cents = std::llround(fraction * 10000.0);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld.%02lld%%", cents / 100, cents % 100);
    return buf;
}

// FNV-1a 64-bit, used to stamp reports with a digest of their inputs so
// reruns on identical data are byte-identical.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 14695981039346656037ull) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace detail {

inline void render_outcome_rows(std::ostringstream& out,
                                const std::vector<ExperimentOutcome>& rows) {
    char line[160];
    out << "kind      |    GT (m) | predicted (m) |    err\n";
    out << "----------+-----------+---------------+-------\n";
    for (const ExperimentOutcome& e : rows) {
        std::snprintf(line, sizeof line, "%-9s | %9.3f | %13.4f | %6s\n", to_string(e.kind),
                      e.gt_value_m, e.predicted_m, render_percent(e.rel_error).c_str());
        out << line;
    }
}

}  // namespace detail

inline std::string render_report_text(const CalibrationResult& result) {
    std::ostringstream out;
    char line[160];
    out << "calibration over " << result.per_experiment.size() << " experiment(s)\n";
    std::snprintf(line, sizeof line, "best: L = %.6f m, R = %.6f m  (mean relative error %s)\n",
                  result.best_params.wheel_base_m, result.best_params.wheel_radius_m,
                  render_percent(result.objective_value).c_str());
    out << line;
    detail::render_outcome_rows(out, result.per_experiment);
    return std::move(out).str();
}

inline std::string render_report_text(const ErrorReport& report) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "L = %.6f m, R = %.6f m  (mean relative error %s)\n",
                  report.params.wheel_base_m, report.params.wheel_radius_m,
                  render_percent(report.mean_rel_error).c_str());
    out << line;
    detail::render_outcome_rows(out, report.rows);
    return std::move(out).str();
}

inline void write_report_csv(const CalibrationResult& result, const std::filesystem::path& path,
                             std::uint64_t input_hash) {
    std::ofstream out = detail::open_out(path);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(input_hash));
    out << "# input_hash=" << buf << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", result.best_params.wheel_base_m);
    out << "# best_wheel_base_m=" << buf << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", result.best_params.wheel_radius_m);
    out << "# best_wheel_radius_m=" << buf << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", result.objective_value);
    out << "# objective_mean_rel_error=" << buf << '\n';
    out << "kind,gt_m,predicted_m,relative_error_pct\n";
    for (const ExperimentOutcome& e : result.per_experiment) {
        const std::string pct = render_percent(e.rel_error);
        std::snprintf(buf, sizeof buf, "%.17g", e.predicted_m);
        out << to_string(e.kind) << ',' << detail::format_double(e.gt_value_m) << ',' << buf << ','
            << pct.substr(0, pct.size() - 1) << '\n';
    }
}

inline void write_grid_surface_csv(const CalibrationResult& result,
                                   const std::filesystem::path& path) {
    if (!result.full_grid)
        throw ValidationError("grid surface was not kept; enable keep_full_grid");
    std::ofstream out = detail::open_out(path);
    out << "L,R,objective\n";
    const int n = result.grid.n_per_axis;
    char buf[64];
    for (int li = 0; li < n; ++li)
        for (int ri = 0; ri < n; ++ri) {
            std::snprintf(buf, sizeof buf, "%.17g", grid_value(result.grid.l_min, result.grid.l_max, n, li));
            out << buf << ',';
            std::snprintf(buf, sizeof buf, "%.17g", grid_value(result.grid.r_min, result.grid.r_max, n, ri));
            out << buf << ',';
            std::snprintf(buf, sizeof buf, "%.17g",
                          (*result.full_grid)[static_cast<std::size_t>(li) * static_cast<std::size_t>(n) +
                                              static_cast<std::size_t>(ri)]);
            out << buf << '\n';
        }
}

}  // namespace wheelodom
