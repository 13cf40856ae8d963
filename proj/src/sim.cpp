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

#include "ceprecode/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

namespace cep {

namespace {

constexpr double kTieTolerance = 1e-12;

ComplexMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed)
{
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    ComplexMatrix out(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) {
            const double re = normal(rng);
            const double im = normal(rng);
            out(r, c) = Complex(re, im);
        }
    }
    return out;
}

// Per-slot, per-solver record; aggregated in slot order afterwards.
struct SlotRecord {
    std::vector<long> errors; // [snr][user]
    long degenerate = 0;
    bool feasible = false;
    bool stalled = false;
    long iterations = 0;
    double time_s = 0.0;
    double envelope = 0.0;
};

template <class Work>
void parallel_for(long count, int threads, Work&& work)
{
    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(std::min<long>(count, 1024))));
    if (workers == 1) {
        for (long i = 0; i < count; ++i) {
            work(i);
        }
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&]() {
            for (long i = next++; i < count; i = next++) {
                try {
                    work(i);
                } catch (...) {
                    std::lock_guard<std::mutex> guard(failure_lock);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                    next = count;
                }
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace

// ---------------------------------------------------------------------------

NoiseModel NoiseModel::from_snr_db(double snr_db, double power_budget)
{
    if (!std::isfinite(snr_db) || !(power_budget > 0.0)) {
        throw std::invalid_argument("NoiseModel: SNR must be finite and the power budget positive");
    }
    NoiseModel out;
    out.n0 = power_budget / std::pow(10.0, snr_db / 10.0);
    return out;
}

NoiseModel NoiseModel::noiseless()
{
    NoiseModel out;
    out.disabled = true;
    return out;
}

double NoiseModel::snr_db(double power_budget) const
{
    return 10.0 * std::log10(power_budget / n0);
}

ChannelMatrix generate_channel(Eigen::Index n_antennas, Eigen::Index n_users, std::uint64_t seed)
{
    if (n_antennas < 1 || n_users < 1) {
        throw DimensionError("generate_channel: N and M must be at least 1");
    }
    return ChannelMatrix(gaussian_matrix(n_antennas, n_users, seed));
}

SymbolVector draw_symbols(Eigen::Index n_users, int order, double amplitude, std::uint64_t seed)
{
    if (order < 2) {
        throw std::invalid_argument("draw_symbols: constellation order must be at least 2");
    }
    if (n_users < 1) {
        throw DimensionError("draw_symbols: M must be at least 1");
    }
    Rng rng(seed);
    std::uniform_int_distribution<int> pick(0, order - 1);
    std::vector<int> indices(static_cast<std::size_t>(n_users));
    for (auto& k : indices) {
        k = pick(rng);
    }
    return SymbolVector(std::move(indices), order, amplitude);
}

ComplexVector unit_noise(Eigen::Index n_users, std::uint64_t seed)
{
    return gaussian_matrix(n_users, 1, seed).col(0);
}

ComplexVector transmit(const ChannelMatrix& h, const ComplexVector& x, const NoiseModel& noise, std::uint64_t seed)
{
    return transmit(h, x, noise, unit_noise(h.n_users(), seed));
}

ComplexVector transmit(const ChannelMatrix& h, const ComplexVector& x, const NoiseModel& noise,
                       const ComplexVector& w_unit)
{
    if (x.size() != h.n_antennas() || w_unit.size() != h.n_users()) {
        throw DimensionError("transmit: dimension mismatch");
    }
    ComplexVector y = h.data().transpose() * x;
    if (!noise.disabled) {
        if (!(noise.n0 > 0.0)) {
            throw std::invalid_argument("transmit: noise power must be positive");
        }
        y += std::sqrt(noise.n0) * w_unit;
    }
    return y;
}

Detection detect_psk(Complex y, int order)
{
    if (order < 2) {
        throw std::invalid_argument("detect_psk: constellation order must be at least 2");
    }
    Detection out;
    if (y == Complex(0.0, 0.0)) {
        out.degenerate = true;
        return out;
    }
    const double angle = std::arg(y);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < order; ++k) {
        const double dist = std::abs(std::remainder(angle - 2.0 * M_PI * k / order, 2.0 * M_PI));
        if (dist < best - kTieTolerance) {
            best = dist;
            out.index = k;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(SolverTag tag) noexcept
{
    switch (tag) {
    case SolverTag::rcg_ci:
        return "rcg-ci";
    case SolverTag::cvx_ci:
        return "cvx-ci";
    case SolverTag::ceo_ci:
        return "ceo-ci";
    case SolverTag::rcg_ir:
        return "rcg-ir";
    case SolverTag::gd_ir:
        return "gd-ir";
    case SolverTag::ceo_ir:
        return "ceo-ir";
    }
    return "unknown";
}

std::string_view display_name(SolverTag tag) noexcept
{
    switch (tag) {
    case SolverTag::rcg_ci:
        return "RCG-CI";
    case SolverTag::cvx_ci:
        return "relaxed-CI (surrogate)";
    case SolverTag::ceo_ci:
        return "CEO-CI";
    case SolverTag::rcg_ir:
        return "RCG-IR";
    case SolverTag::gd_ir:
        return "GD-IR";
    case SolverTag::ceo_ir:
        return "CEO-IR";
    }
    return "unknown";
}

SolverTag parse_solver_tag(std::string_view text)
{
    for (const SolverTag tag : kAllSolvers) {
        if (text == to_string(tag)) {
            return tag;
        }
    }
    throw std::invalid_argument("unknown solver tag '" + std::string(text) + "'");
}

bool is_ci(SolverTag tag) noexcept
{
    return tag == SolverTag::rcg_ci || tag == SolverTag::cvx_ci || tag == SolverTag::ceo_ci;
}

void SolverSuite::validate() const
{
    rcg.validate();
    gd.validate();
    ceo.validate();
    relaxed.validate();
}

SolveReport solve_with(SolverTag tag, const ChannelMatrix& h, const SymbolVector& s, double power_budget,
                       const SolverSuite& suite, std::uint64_t seed)
{
    switch (tag) {
    case SolverTag::rcg_ci: {
        SolverConfig cfg = suite.rcg;
        cfg.seed = seed;
        return rcg_solve(h, s, power_budget, cfg);
    }
    case SolverTag::cvx_ci: {
        SolverConfig cfg = suite.rcg;
        cfg.seed = seed;
        return relaxed_ci_solve(h, s, power_budget, cfg, suite.relaxed);
    }
    case SolverTag::ceo_ci:
    case SolverTag::ceo_ir: {
        CeoConfig cfg = suite.ceo;
        cfg.seed = seed;
        return ceo_solve(h, s, power_budget, tag == SolverTag::ceo_ci ? CeoObjective::ci : CeoObjective::ir, cfg);
    }
    case SolverTag::rcg_ir: {
        SolverConfig cfg = suite.rcg;
        cfg.seed = seed;
        return rcg_ir_solve(h, s, power_budget, cfg);
    }
    case SolverTag::gd_ir: {
        GdConfig cfg = suite.gd;
        cfg.seed = seed;
        return gd_ir_solve(h, s, power_budget, cfg);
    }
    }
    throw std::invalid_argument("solve_with: unknown solver tag");
}

// ---------------------------------------------------------------------------

void SerSweepConfig::validate() const
{
    if (n_antennas < 1 || n_users < 1) {
        throw DimensionError("SerSweepConfig: N and M must be at least 1");
    }
    if (order < 2 || !(amplitude > 0.0) || !(power_budget > 0.0)) {
        throw std::invalid_argument("SerSweepConfig: need L >= 2, u > 0 and P_T > 0");
    }
    if (snr_db.empty()) {
        throw std::invalid_argument("SerSweepConfig: SNR list is empty");
    }
    if (n_symbols < 1 || coherence < 1 || threads < 1) {
        throw std::invalid_argument("SerSweepConfig: n_symbols, coherence and threads must be at least 1");
    }
    suite.validate();
}

double TrialResult::ser() const
{
    return symbols_sent > 0 ? static_cast<double>(symbol_errors) / static_cast<double>(symbols_sent) : 0.0;
}

double TrialResult::ci_feasible_fraction() const
{
    return n_symbols > 0 ? static_cast<double>(ci_feasible_slots) / static_cast<double>(n_symbols) : 0.0;
}

std::vector<TrialResult> run_ser_sweep(const SerSweepConfig& cfg, const std::vector<SolverTag>& solvers)
{
    cfg.validate();
    if (solvers.empty()) {
        throw std::invalid_argument("run_ser_sweep: no solvers given");
    }
    const std::size_t n_solvers = solvers.size();
    const std::size_t n_snr = cfg.snr_db.size();
    const auto n_users = static_cast<std::size_t>(cfg.n_users);

    std::vector<NoiseModel> noise;
    noise.reserve(n_snr);
    for (const double snr : cfg.snr_db) {
        noise.push_back(NoiseModel::from_snr_db(snr, cfg.power_budget));
    }

    std::vector<SlotRecord> records(static_cast<std::size_t>(cfg.n_symbols) * n_solvers);

    parallel_for(cfg.n_symbols, cfg.threads, [&](long slot) {
        const auto slot_u = static_cast<std::uint64_t>(slot);
        const ChannelMatrix h = generate_channel(
            cfg.n_antennas, cfg.n_users,
            derive_seed(cfg.master_seed, slot_u / static_cast<std::uint64_t>(cfg.coherence), "channel"));
        const SymbolVector s =
            draw_symbols(cfg.n_users, cfg.order, cfg.amplitude, derive_seed(cfg.master_seed, slot_u, "symbols"));
        const ComplexVector w = unit_noise(cfg.n_users, derive_seed(cfg.master_seed, slot_u, "noise"));

        for (std::size_t i = 0; i < n_solvers; ++i) {
            const SolverTag tag = solvers[i];
            const SolveReport report =
                solve_with(tag, h, s, cfg.power_budget, cfg.suite, derive_seed(cfg.master_seed, slot_u, to_string(tag)));

            SlotRecord& rec = records[static_cast<std::size_t>(slot) * n_solvers + i];
            rec.errors.assign(n_snr * n_users, 0);
            rec.feasible = ci_cost(report.x, h, s) <= 0.0;
            rec.stalled = report.stalled;
            rec.iterations = report.iterations;
            rec.time_s = report.wall_time_s;
            rec.envelope = envelope_deviation(report.x, cfg.power_budget);

            for (std::size_t j = 0; j < n_snr; ++j) {
                const ComplexVector y = transmit(h, report.x, noise[j], w);
                for (std::size_t m = 0; m < n_users; ++m) {
                    const Detection d = detect_psk(y[static_cast<Eigen::Index>(m)], cfg.order);
                    rec.degenerate += d.degenerate ? 1 : 0;
                    if (d.index != s.indices()[m]) {
                        rec.errors[j * n_users + m] = 1;
                    }
                }
            }
        }
    });

    std::vector<TrialResult> out;
    out.reserve(n_solvers * n_snr);
    for (std::size_t i = 0; i < n_solvers; ++i) {
        for (std::size_t j = 0; j < n_snr; ++j) {
            TrialResult r;
            r.solver = solvers[i];
            r.snr_db = cfg.snr_db[j];
            r.n_antennas = cfg.n_antennas;
            r.n_users = cfg.n_users;
            r.n_symbols = cfg.n_symbols;
            r.symbols_sent = cfg.n_symbols * cfg.n_users;
            r.per_user_errors.assign(n_users, 0);
            long iterations = 0;
            double time_s = 0.0;
            for (long slot = 0; slot < cfg.n_symbols; ++slot) {
                const SlotRecord& rec = records[static_cast<std::size_t>(slot) * n_solvers + i];
                for (std::size_t m = 0; m < n_users; ++m) {
                    r.per_user_errors[m] += rec.errors[j * n_users + m];
                }
                r.degenerate_detections += rec.degenerate;
                r.ci_feasible_slots += rec.feasible ? 1 : 0;
                r.stalled_slots += rec.stalled ? 1 : 0;
                iterations += rec.iterations;
                time_s += rec.time_s;
                r.max_envelope_deviation = std::max(r.max_envelope_deviation, rec.envelope);
            }
            for (const long e : r.per_user_errors) {
                r.symbol_errors += e;
            }
            r.mean_iterations = static_cast<double>(iterations) / static_cast<double>(cfg.n_symbols);
            r.mean_time_s = time_s / static_cast<double>(cfg.n_symbols);
            out.push_back(std::move(r));
        }
    }
    return out;
}

TrialResult run_ser(SolverTag solver, Eigen::Index n_antennas, Eigen::Index n_users, int order, double power_budget,
                    double snr_db, long n_symbols, std::uint64_t seed, const SolverSuite& suite)
{
    SerSweepConfig cfg;
    cfg.n_antennas = n_antennas;
    cfg.n_users = n_users;
    cfg.order = order;
    cfg.power_budget = power_budget;
    cfg.snr_db = {snr_db};
    cfg.n_symbols = n_symbols;
    cfg.master_seed = seed;
    cfg.suite = suite;
    return run_ser_sweep(cfg, {solver}).front();
}

// ---------------------------------------------------------------------------

void TimingConfig::validate() const
{
    if (n_antennas.empty() || n_users.empty()) {
        throw std::invalid_argument("TimingConfig: N and M lists must be non-empty");
    }
    for (const auto n : n_antennas) {
        if (n < 1) {
            throw DimensionError("TimingConfig: N must be at least 1");
        }
    }
    for (const auto m : n_users) {
        if (m < 1) {
            throw DimensionError("TimingConfig: M must be at least 1");
        }
    }
    if (order < 2 || !(amplitude > 0.0) || !(power_budget > 0.0)) {
        throw std::invalid_argument("TimingConfig: need L >= 2, u > 0 and P_T > 0");
    }
    if (trials < 1) {
        throw std::invalid_argument("TimingConfig: trials must be at least 1");
    }
    suite.validate();
}

double TimingRow::time_per_iteration_s() const
{
    return mean_iterations > 0.0 ? mean_time_s / mean_iterations : mean_time_s;
}

std::vector<TimingRow> run_timing(const TimingConfig& cfg, const std::vector<SolverTag>& solvers)
{
    cfg.validate();
    if (solvers.empty()) {
        throw std::invalid_argument("run_timing: no solvers given");
    }
    const std::size_t n_cells = cfg.n_antennas.size() * cfg.n_users.size();
    std::vector<TimingRow> rows(solvers.size() * n_cells);
    std::vector<std::vector<double>> times(rows.size());

    std::size_t cell = 0;
    for (const auto n : cfg.n_antennas) {
        for (const auto m : cfg.n_users) {
            const std::string tag = "timing/" + std::to_string(n) + "/" + std::to_string(m);
            for (int t = 0; t < cfg.trials; ++t) {
                const auto trial = static_cast<std::uint64_t>(t);
                const ChannelMatrix h = generate_channel(n, m, derive_seed(cfg.master_seed, trial, tag + "/channel"));
                const SymbolVector s =
                    draw_symbols(m, cfg.order, cfg.amplitude, derive_seed(cfg.master_seed, trial, tag + "/symbols"));
                for (std::size_t i = 0; i < solvers.size(); ++i) {
                    const SolverTag solver = solvers[i];
                    const SolveReport report =
                        solve_with(solver, h, s, cfg.power_budget, cfg.suite,
                                   derive_seed(cfg.master_seed, trial, tag + "/" + std::string(to_string(solver))));
                    TimingRow& row = rows[i * n_cells + cell];
                    row.solver = solver;
                    row.n_antennas = n;
                    row.n_users = m;
                    row.trials += 1;
                    row.mean_iterations += report.iterations;
                    row.mean_flops += static_cast<double>(report.flops_estimate);
                    row.max_envelope_deviation =
                        std::max(row.max_envelope_deviation, envelope_deviation(report.x, cfg.power_budget));
                    times[i * n_cells + cell].push_back(report.wall_time_s);
                }
            }
            ++cell;
        }
    }

    for (std::size_t r = 0; r < rows.size(); ++r) {
        TimingRow& row = rows[r];
        const auto count = static_cast<double>(row.trials);
        row.mean_iterations /= count;
        row.mean_flops /= count;
        double sum = 0.0;
        for (const double v : times[r]) {
            sum += v;
        }
        row.mean_time_s = sum / count;
        double sq = 0.0;
        for (const double v : times[r]) {
            sq += (v - row.mean_time_s) * (v - row.mean_time_s);
        }
        row.stddev_time_s = row.trials > 1 ? std::sqrt(sq / (count - 1.0)) : 0.0;
    }
    return rows;
}

} // namespace cep
