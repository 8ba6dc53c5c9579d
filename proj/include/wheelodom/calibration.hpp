#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "wheelodom/circle_fit.hpp"
#include "wheelodom/errors.hpp"
#include "wheelodom/odometry.hpp"
#include "wheelodom/types.hpp"

namespace wheelodom {

// Cartesian search grid over wheel base L and wheel radius R. Each axis holds
// n_per_axis uniform values inclusive of both endpoints, step = range/(n-1).
struct GridSpec {
    double l_min = 0.6;
    double l_max = 0.8;
    double r_min = 0.15;
    double r_max = 0.17;
    int n_per_axis = 50;
};

inline void require_valid(const GridSpec& grid) {
    if (!(grid.l_min < grid.l_max) || !(grid.r_min < grid.r_max))
        throw ValidationError("grid ranges must satisfy min < max");
    if (grid.n_per_axis < 2) throw ValidationError("grid needs at least 2 values per axis");
}

inline double grid_value(double min, double max, int n, int i) {
    return i == n - 1 ? max : min + (max - min) * static_cast<double>(i) / static_cast<double>(n - 1);
}

inline std::vector<double> grid_axis(double min, double max, int n) {
    std::vector<double> values(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = grid_value(min, max, n, i);
    return values;
}

struct ExperimentOutcome {
    ExperimentKind kind = ExperimentKind::kForward;
    double gt_value_m = 0.0;
    double predicted_m = 0.0;
    double rel_error = 0.0;
};

struct CalibrationResult {
    WheelParams best_params;
    double objective_value = 0.0;  // mean relative error over experiments
    std::vector<ExperimentOutcome> per_experiment;
    GridSpec grid;
    std::optional<std::vector<double>> full_grid;  // row-major [l_index][r_index]
    std::vector<std::string> warnings;
};

namespace detail {

struct PreparedExperiment {
    ExperimentKind kind;
    double gt_value_m;
    std::vector<std::pair<std::int64_t, std::int64_t>> tick_deltas;
};

inline PreparedExperiment prepare(const ExperimentRecord& exp) {
    if (exp.log.empty()) throw EmptyInputError("experiment log is empty");
    if (!(exp.gt_value_m > 0.0)) throw ValidationError("experiment ground truth must be positive");
    PreparedExperiment prepared{exp.kind, exp.gt_value_m, {}};
    prepared.tick_deltas.reserve(exp.log.size() - 1);
    for (std::size_t k = 1; k < exp.log.size(); ++k)
        prepared.tick_deltas.emplace_back(exp.log[k].left_ticks - exp.log[k - 1].left_ticks,
                                          exp.log[k].right_ticks - exp.log[k - 1].right_ticks);
    return prepared;
}

// Same arithmetic, in the same order, as integrate_log followed by
// path_length / circle_diameter, without materializing a Trajectory for the
// straight kinds. Keeping the operation sequence identical makes the grid
// objective reproduce exactly what predict_experiment reports.
inline double predict_prepared(const WheelParams& params, const PreparedExperiment& exp,
                               std::vector<double>& scratch_x, std::vector<double>& scratch_y,
                               double max_step_m) {
    const bool need_positions = exp.kind == ExperimentKind::kCircle;
    if (need_positions) {
        scratch_x.clear();
        scratch_y.clear();
        scratch_x.reserve(exp.tick_deltas.size() + 1);
        scratch_y.reserve(exp.tick_deltas.size() + 1);
        scratch_x.push_back(0.0);
        scratch_y.push_back(0.0);
    }
    Pose2D pose;
    double length = 0.0;
    std::size_t step_index = 1;
    for (const auto& [dl_ticks, dr_ticks] : exp.tick_deltas) {
        WheelDelta delta;
        delta.d_left_m = ticks_to_travel(dl_ticks, params);
        delta.d_right_m = ticks_to_travel(dr_ticks, params);
        const Pose2D next = integrate_step(pose, delta, params, max_step_m, step_index++);
        const double dx = next.x - pose.x;
        const double dy = next.y - pose.y;
        length += std::sqrt(dx * dx + dy * dy);
        pose = next;
        if (need_positions) {
            scratch_x.push_back(pose.x);
            scratch_y.push_back(pose.y);
        }
    }
    if (need_positions) return 2.0 * fit_circle_kasa(scratch_x, scratch_y).radius;
    return length;
}

}  // namespace detail

// Odometry estimate of one experiment's measured quantity: integrated path
// length for forward/backward runs, fitted circle diameter for circle runs.
// Integration starts from the origin; both metrics are start-pose invariant.
inline double predict_experiment(const WheelParams& params, const ExperimentRecord& exp,
                                 double max_step_m = kDefaultMaxStepM) {
    require_valid(params);
    const detail::PreparedExperiment prepared = detail::prepare(exp);
    std::vector<double> sx, sy;
    return detail::predict_prepared(params, prepared, sx, sy, max_step_m);
}

struct ErrorReport {
    WheelParams params;
    double mean_rel_error = 0.0;
    std::vector<ExperimentOutcome> rows;
};

// Evaluates fixed wheel parameters against the experiments: one row per
// experiment (kind, ground truth, prediction, relative error) plus the mean.
inline ErrorReport error_report(const WheelParams& params,
                                const std::vector<ExperimentRecord>& experiments,
                                double max_step_m = kDefaultMaxStepM) {
    require_valid(params);
    if (experiments.empty()) throw ValidationError("error report needs at least one experiment");
    ErrorReport report;
    report.params = params;
    std::vector<double> sx, sy;
    double sum = 0.0;
    for (const ExperimentRecord& exp : experiments) {
        ExperimentOutcome outcome;
        outcome.kind = exp.kind;
        outcome.gt_value_m = exp.gt_value_m;
        outcome.predicted_m =
            detail::predict_prepared(params, detail::prepare(exp), sx, sy, max_step_m);
        outcome.rel_error = relative_error(outcome.predicted_m, exp.gt_value_m);
        sum += outcome.rel_error;
        report.rows.push_back(outcome);
    }
    report.mean_rel_error = sum / static_cast<double>(experiments.size());
    return report;
}

struct GridSearchOptions {
    unsigned threads = 1;       // grid rows are independent; reduction is deterministic
    bool keep_full_grid = false;
    bool refine = false;        // optional second pass re-centered on the optimum
    std::int32_t counts_per_rev = 4096;
    double max_step_m = kDefaultMaxStepM;
};

// Exhaustive search over the (L, R) grid minimizing the mean relative error
// across experiments. Ties break deterministically toward the smallest L,
// then the smallest R, independent of thread count.
inline CalibrationResult grid_search(const std::vector<ExperimentRecord>& experiments,
                                     const GridSpec& grid, const GridSearchOptions& options = {}) {
    require_valid(grid);
    if (experiments.empty()) throw ValidationError("grid search needs at least one experiment");
    if (options.counts_per_rev <= 0) throw ValidationError("counts_per_rev must be positive");

    std::vector<detail::PreparedExperiment> prepared;
    prepared.reserve(experiments.size());
    for (const ExperimentRecord& exp : experiments) prepared.push_back(detail::prepare(exp));

    const int n = grid.n_per_axis;
    const std::vector<double> l_values = grid_axis(grid.l_min, grid.l_max, n);
    const std::vector<double> r_values = grid_axis(grid.r_min, grid.r_max, n);

    std::vector<double> surface(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    auto evaluate_row = [&](int li, std::vector<double>& sx, std::vector<double>& sy) {
        for (int ri = 0; ri < n; ++ri) {
            WheelParams params{l_values[static_cast<std::size_t>(li)],
                               r_values[static_cast<std::size_t>(ri)], options.counts_per_rev};
            double sum = 0.0;
            for (const detail::PreparedExperiment& exp : prepared)
                sum += relative_error(
                    detail::predict_prepared(params, exp, sx, sy, options.max_step_m),
                    exp.gt_value_m);
            surface[static_cast<std::size_t>(li) * static_cast<std::size_t>(n) +
                    static_cast<std::size_t>(ri)] = sum / static_cast<double>(prepared.size());
        }
    };

    const unsigned workers = std::max(1u, std::min(options.threads, static_cast<unsigned>(n)));
    if (workers == 1) {
        std::vector<double> sx, sy;
        for (int li = 0; li < n; ++li) evaluate_row(li, sx, sy);
    } else {
        std::atomic<int> next_row{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                std::vector<double> sx, sy;
                for (int li = next_row.fetch_add(1); li < n; li = next_row.fetch_add(1))
                    evaluate_row(li, sx, sy);
            });
        for (std::thread& t : pool) t.join();
    }

    // Row-major scan with strict less-than: first minimum found is the
    // smallest L, then the smallest R.
    std::size_t best = 0;
    for (std::size_t idx = 1; idx < surface.size(); ++idx)
        if (surface[idx] < surface[best]) best = idx;
    const int best_li = static_cast<int>(best) / n;
    const int best_ri = static_cast<int>(best) % n;

    CalibrationResult result;
    result.grid = grid;
    result.best_params = {l_values[static_cast<std::size_t>(best_li)],
                          r_values[static_cast<std::size_t>(best_ri)], options.counts_per_rev};
    result.objective_value = surface[best];
    if (options.keep_full_grid) result.full_grid = std::move(surface);

    result.per_experiment = error_report(result.best_params, experiments, options.max_step_m).rows;

    bool has_turn = false;
    for (const ExperimentRecord& exp : experiments)
        if (exp.kind == ExperimentKind::kCircle) has_turn = true;
    if (!has_turn)
        result.warnings.push_back(
            "no circle experiment: straight runs cannot constrain the wheel base L");

    if (options.refine) {
        const double l_step = (grid.l_max - grid.l_min) / static_cast<double>(n - 1);
        const double r_step = (grid.r_max - grid.r_min) / static_cast<double>(n - 1);
        GridSpec fine = grid;
        fine.l_min = std::max(grid.l_min, result.best_params.wheel_base_m - l_step);
        fine.l_max = std::min(grid.l_max, result.best_params.wheel_base_m + l_step);
        fine.r_min = std::max(grid.r_min, result.best_params.wheel_radius_m - r_step);
        fine.r_max = std::min(grid.r_max, result.best_params.wheel_radius_m + r_step);
        GridSearchOptions second = options;
        second.refine = false;
        CalibrationResult refined = grid_search(experiments, fine, second);
        if (refined.objective_value < result.objective_value) {
            refined.warnings = result.warnings;
            return refined;
        }
    }
    return result;
}

}  // namespace wheelodom
