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

#ifndef CEPRECODE_SIM_HPP
#define CEPRECODE_SIM_HPP

#include "ceprecode/baselines.hpp"

#include <array>
#include <string_view>
#include <vector>

namespace cep {

/// Complex AWGN with per-user variance n0; `disabled` gives y = H^T x exactly.
struct NoiseModel {
    double n0 = 1.0;
    bool disabled = false;

    // SNR = P_T / N0.
    static NoiseModel from_snr_db(double snr_db, double power_budget = 1.0);
    static NoiseModel noiseless();

    double snr_db(double power_budget = 1.0) const;
};

/// i.i.d. CN(0,1) entries. Throws DimensionError for N or M < 1.
ChannelMatrix generate_channel(Eigen::Index n_antennas, Eigen::Index n_users, std::uint64_t seed);

/// Uniform L-PSK indices with amplitude u.
SymbolVector draw_symbols(Eigen::Index n_users, int order, double amplitude, std::uint64_t seed);

/// M i.i.d. CN(0,1) samples; scaled by sqrt(N0) inside transmit().
ComplexVector unit_noise(Eigen::Index n_users, std::uint64_t seed);

/// y = H^T x + w, w ~ CN(0, N0 I) drawn from `seed`.
ComplexVector transmit(const ChannelMatrix& h, const ComplexVector& x, const NoiseModel& noise, std::uint64_t seed);

/// y = H^T x + sqrt(N0) * w_unit, for common random numbers across SNR points.
ComplexVector transmit(const ChannelMatrix& h, const ComplexVector& x, const NoiseModel& noise,
                       const ComplexVector& w_unit);

struct Detection {
    int index = 0;
    bool degenerate = false; // y == 0
};

/// Minimum circular angular distance to 2 pi k / L; ties go to the smaller k.
Detection detect_psk(Complex y, int order);

enum class SolverTag { rcg_ci, cvx_ci, ceo_ci, rcg_ir, gd_ir, ceo_ir };

inline constexpr std::array<SolverTag, 6> kAllSolvers = {SolverTag::rcg_ci, SolverTag::cvx_ci, SolverTag::ceo_ci,
                                                         SolverTag::rcg_ir, SolverTag::gd_ir,  SolverTag::ceo_ir};

std::string_view to_string(SolverTag tag) noexcept;
// Human-readable label; the relaxed solver is marked as a surrogate.
std::string_view display_name(SolverTag tag) noexcept;
// Throws std::invalid_argument naming the unknown tag.
SolverTag parse_solver_tag(std::string_view text);
bool is_ci(SolverTag tag) noexcept;

/// Per-solver settings; the seed fields are overwritten per solve.
struct SolverSuite {
    SolverConfig rcg;
    GdConfig gd;
    CeoConfig ceo;
    RelaxedCiConfig relaxed;

    void validate() const;
    bool operator==(const SolverSuite&) const = default;
};

SolveReport solve_with(SolverTag tag, const ChannelMatrix& h, const SymbolVector& s, double power_budget,
                       const SolverSuite& suite, std::uint64_t seed);

/// One Monte-Carlo sweep: every slot is solved once per solver and the
/// precoder is reused at every SNR point.
struct SerSweepConfig {
    Eigen::Index n_antennas = 64;
    Eigen::Index n_users = 20;
    int order = 4;
    double amplitude = 1.0;
    double power_budget = 1.0;
    std::vector<double> snr_db{8.0};
    long n_symbols = 1000; // slots; each slot carries M user-symbols
    int coherence = 1;     // slots per channel draw
    std::uint64_t master_seed = 1;
    int threads = 1;
    SolverSuite suite;

    void validate() const;
};

/// Aggregate for one (solver, SNR) point.
struct TrialResult {
    SolverTag solver = SolverTag::rcg_ci;
    double snr_db = 0.0;
    Eigen::Index n_antennas = 0;
    Eigen::Index n_users = 0;
    long n_symbols = 0; // slots
    long symbols_sent = 0;
    long symbol_errors = 0;
    std::vector<long> per_user_errors;
    long degenerate_detections = 0;
    long ci_feasible_slots = 0;
    long stalled_slots = 0;
    double mean_iterations = 0.0;
    double mean_time_s = 0.0;
    double max_envelope_deviation = 0.0;

    double ser() const;
    double ci_feasible_fraction() const;
};

/// Results ordered by solver (in the given order) then SNR.
std::vector<TrialResult> run_ser_sweep(const SerSweepConfig& cfg, const std::vector<SolverTag>& solvers);

/// Single solver, single SNR.
TrialResult run_ser(SolverTag solver, Eigen::Index n_antennas, Eigen::Index n_users, int order,
                    double power_budget, double snr_db, long n_symbols, std::uint64_t seed,
                    const SolverSuite& suite = {});

struct TimingConfig {
    std::vector<Eigen::Index> n_antennas{64};
    std::vector<Eigen::Index> n_users{12, 16, 20, 24};
    int order = 4;
    double amplitude = 1.0;
    double power_budget = 1.0;
    int trials = 10;
    std::uint64_t master_seed = 1;
    SolverSuite suite;

    void validate() const;
};

struct TimingRow {
    SolverTag solver = SolverTag::rcg_ci;
    Eigen::Index n_antennas = 0;
    Eigen::Index n_users = 0;
    int trials = 0;
    double mean_time_s = 0.0;
    double stddev_time_s = 0.0;
    double mean_iterations = 0.0;
    double mean_flops = 0.0;
    double max_envelope_deviation = 0.0;

    double time_per_iteration_s() const;
};

/// Sequential on purpose: wall times are measured one solve at a time.
std::vector<TimingRow> run_timing(const TimingConfig& cfg, const std::vector<SolverTag>& solvers);

} // namespace cep

#endif // CEPRECODE_SIM_HPP
