// SPDX-License-Identifier: Apache-2.0
//
// ceprecode: constant-envelope precoding with constructive interference
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "ceprecode/cli.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <ostream>

namespace cep {

namespace fs = std::filesystem;

namespace {

constexpr int kSchemaVersion = 1;

// Accumulates a CSV in memory; written in one go at the end of a run.
class CsvTable {
public:
    CsvTable(std::string schema, std::vector<std::string> columns)
        : schema_(std::move(schema)), columns_(std::move(columns))
    {
    }

    template <class... Ts>
    void row(const Ts&... values)
    {
        std::string line;
        ((line += cell(values), line += ','), ...);
        line.pop_back();
        rows_.push_back(std::move(line));
    }

    void write(const fs::path& path) const
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write '" + path.string() + "'");
        }
        out << "# schema: " << schema_ << " v" << kSchemaVersion << '\n';
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            out << (i > 0 ? "," : "") << columns_[i];
        }
        out << '\n';
        for (const auto& r : rows_) {
            out << r << '\n';
        }
        if (!out) {
            throw IoError("write failed for '" + path.string() + "'");
        }
    }

private:
    static std::string cell(double v) { return fmt::format("{}", v); }
    static std::string cell(bool v) { return v ? "1" : "0"; }
    static std::string cell(std::string_view v) { return std::string(v); }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(const char* v) { return v; }
    template <class T, class = std::enable_if_t<std::is_integral_v<T>>>
    static std::string cell(T v)
    {
        return std::to_string(v);
    }

    std::string schema_;
    std::vector<std::string> columns_;
    std::vector<std::string> rows_;
};

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    out << text;
    if (!out) {
        throw IoError("write failed for '" + path.string() + "'");
    }
}

void require_finite(double v, std::string_view what)
{
    if (!std::isfinite(v)) {
        throw NumericalFailure("non-finite value in " + std::string(what));
    }
}

void log_line(const RunOptions& opt, const std::string& text)
{
    if (opt.log != nullptr) {
        *opt.log << text << '\n';
    }
}

std::string cell_tag(std::string_view kind, Eigen::Index n, Eigen::Index m)
{
    return fmt::format("{}/N{}/M{}", kind, n, m);
}

void run_ser(const ExperimentSpec& spec, const RunOptions& opt, const fs::path& dir, RunSummary& summary)
{
    const std::string name(to_string(spec.experiment));
    CsvTable main(name, {"solver", "N", "M", "snr_db", "n_symbols", "user_symbols", "errors", "ser",
                         "ci_feasible_fraction", "mean_iters", "stalled_slots", "degenerate_detections",
                         "max_ce_deviation"});
    CsvTable clock(name + ".wallclock", {"solver", "N", "M", "snr_db", "mean_time_s"});

    for (const auto n : spec.n_antennas) {
        for (const auto m : spec.n_users) {
            SerSweepConfig cfg;
            cfg.n_antennas = n;
            cfg.n_users = m;
            cfg.order = spec.order;
            cfg.amplitude = spec.amplitude;
            cfg.power_budget = spec.power_budget;
            cfg.snr_db = spec.snr_db;
            cfg.n_symbols = spec.n_symbols;
            cfg.coherence = spec.coherence;
            cfg.master_seed = derive_seed(spec.master_seed, cell_tag("ser", n, m));
            cfg.threads = spec.threads;
            cfg.suite = spec.suite;
            log_line(opt, fmt::format("{}: N={} M={} ({} slots, {} SNR points, {} solvers)", name, n, m,
                                      spec.n_symbols, spec.snr_db.size(), spec.solvers.size()));
            for (const auto& r : run_ser_sweep(cfg, spec.solvers)) {
                require_finite(r.max_envelope_deviation, "precoder output");
                main.row(to_string(r.solver), r.n_antennas, r.n_users, r.snr_db, r.n_symbols, r.symbols_sent,
                         r.symbol_errors, r.ser(), r.ci_feasible_fraction(), r.mean_iterations, r.stalled_slots,
                         r.degenerate_detections, r.max_envelope_deviation);
                clock.row(to_string(r.solver), r.n_antennas, r.n_users, r.snr_db, r.mean_time_s);
                log_line(opt, fmt::format("  {:<7} snr={:>5} dB  ser={:.3e}  ({} errors)", to_string(r.solver),
                                          r.snr_db, r.ser(), r.symbol_errors));
            }
        }
    }
    const fs::path main_path = dir / (name + ".csv");
    const fs::path clock_path = dir / (name + ".wallclock.csv");
    main.write(main_path);
    clock.write(clock_path);
    summary.files.push_back(main_path);
    summary.files.push_back(clock_path);
}

void run_timing_experiment(const ExperimentSpec& spec, const RunOptions& opt, const fs::path& dir,
                           RunSummary& summary)
{
    TimingConfig cfg;
    cfg.n_antennas = spec.n_antennas;
    cfg.n_users = spec.n_users;
    cfg.order = spec.order;
    cfg.amplitude = spec.amplitude;
    cfg.power_budget = spec.power_budget;
    cfg.trials = spec.trials;
    cfg.master_seed = spec.master_seed;
    cfg.suite = spec.suite;
    log_line(opt, fmt::format("timing: {} trials per cell", spec.trials));

    CsvTable main("timing", {"solver", "N", "M", "trials", "mean_iters", "mean_flops", "max_ce_deviation"});
    CsvTable clock("timing.wallclock",
                   {"solver", "N", "M", "trials", "mean_time_s", "stddev_time_s", "mean_time_per_iter_s"});
    for (const auto& r : run_timing(cfg, spec.solvers)) {
        require_finite(r.max_envelope_deviation, "precoder output");
        main.row(to_string(r.solver), r.n_antennas, r.n_users, r.trials, r.mean_iterations, r.mean_flops,
                 r.max_envelope_deviation);
        clock.row(to_string(r.solver), r.n_antennas, r.n_users, r.trials, r.mean_time_s, r.stddev_time_s,
                  r.time_per_iteration_s());
        log_line(opt, fmt::format("  {:<7} N={} M={}  mean {:.4f} s", to_string(r.solver), r.n_antennas, r.n_users,
                                  r.mean_time_s));
    }
    const fs::path main_path = dir / "timing.csv";
    const fs::path clock_path = dir / "timing.wallclock.csv";
    main.write(main_path);
    clock.write(clock_path);
    summary.files.push_back(main_path);
    summary.files.push_back(clock_path);
}

void run_single(const ExperimentSpec& spec, const RunOptions& opt, const fs::path& dir, RunSummary& summary)
{
    CsvTable main("single_solve", {"solver", "N", "M", "iterations", "converged", "stalled", "final_objective",
                                   "ci_cost", "ci_feasible", "ir_objective", "max_ce_deviation", "flops"});
    CsvTable clock("single_solve.wallclock", {"solver", "N", "M", "wall_time_s"});

    for (const auto n : spec.n_antennas) {
        for (const auto m : spec.n_users) {
            const std::string tag = cell_tag("single", n, m);
            const ChannelMatrix h = generate_channel(n, m, derive_seed(spec.master_seed, tag + "/channel"));
            const SymbolVector s =
                draw_symbols(m, spec.order, spec.amplitude, derive_seed(spec.master_seed, tag + "/symbols"));
            for (const SolverTag solver : spec.solvers) {
                const SolveReport report = solve_with(solver, h, s, spec.power_budget, spec.suite,
                                                      derive_seed(spec.master_seed, tag + "/" +
                                                                                        std::string(to_string(solver))));
                const double cost = ci_cost(report.x, h, s);
                const double ir = ir_objective(report.x, h, s.symbols());
                const double dev = envelope_deviation(report.x, spec.power_budget);
                require_finite(cost, "CI cost");
                require_finite(ir, "IR objective");
                main.row(to_string(solver), n, m, report.iterations, report.converged, report.stalled,
                         report.final_exact(), cost, cost <= 0.0, ir, dev, report.flops_estimate);
                clock.row(to_string(solver), n, m, report.wall_time_s);

                CsvTable trace("objective_trace", {"iteration", "exact", "smoothed", "grad_norm"});
                for (std::size_t k = 0; k < report.objective_trace.size(); ++k) {
                    const std::string grad =
                        k < report.grad_norm_trace.size() ? fmt::format("{}", report.grad_norm_trace[k]) : "";
                    trace.row(k, report.objective_trace[k].exact, report.objective_trace[k].smoothed, grad);
                }
                const fs::path trace_path = dir / fmt::format("trace_{}_N{}_M{}.csv", to_string(solver), n, m);
                trace.write(trace_path);
                summary.files.push_back(trace_path);
                log_line(opt, fmt::format("  {:<7} N={} M={}  objective {:.6g}  ci_cost {:.6g}  ({} iterations)",
                                          to_string(solver), n, m, report.final_exact(), cost, report.iterations));
            }
        }
    }
    const fs::path main_path = dir / "single_solve.csv";
    const fs::path clock_path = dir / "single_solve.wallclock.csv";
    main.write(main_path);
    clock.write(clock_path);
    summary.files.push_back(main_path);
    summary.files.push_back(clock_path);
}

} // namespace

RunSummary run_experiment(const ExperimentSpec& spec, const RunOptions& options)
{
    spec.validate();
    RunSummary summary;
    summary.out_dir = options.out_dir.value_or(fs::path(spec.output_path));
    std::error_code ec;
    fs::create_directories(summary.out_dir, ec);
    if (ec || !fs::is_directory(summary.out_dir)) {
        throw IoError("cannot create output directory '" + summary.out_dir.string() + "'");
    }

    // Written first so an unwritable directory fails before any compute.
    const fs::path manifest = summary.out_dir / "manifest.txt";
    write_text(manifest, fmt::format("# ceprecode run manifest\n# library_version = {}\n# schema = {} v{}\n{}",
                                     kLibraryVersion, to_string(spec.experiment), kSchemaVersion, render(spec)));
    summary.files.push_back(manifest);

    switch (spec.experiment) {
    case ExperimentKind::ser_vs_snr:
    case ExperimentKind::ser_vs_users:
        run_ser(spec, options, summary.out_dir, summary);
        break;
    case ExperimentKind::timing:
        run_timing_experiment(spec, options, summary.out_dir, summary);
        break;
    case ExperimentKind::single_solve:
        run_single(spec, options, summary.out_dir, summary);
        break;
    }
    return summary;
}

} // namespace cep
