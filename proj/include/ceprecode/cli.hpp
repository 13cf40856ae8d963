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

#ifndef CEPRECODE_CLI_HPP
#define CEPRECODE_CLI_HPP

#include "ceprecode/sim.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cep {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitNumerical = 3;

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, int line, std::string key);
    int line() const noexcept { return line_; } // 0 when not tied to a line
    const std::string& key() const noexcept { return key_; }

private:
    int line_;
    std::string key_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite solver output or a numerical breakdown during a run.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { timing, ser_vs_snr, ser_vs_users, single_solve };

std::string_view to_string(ExperimentKind kind) noexcept;
ExperimentKind parse_experiment_kind(std::string_view text);

struct ExperimentSpec {
    ExperimentKind experiment = ExperimentKind::ser_vs_snr;
    std::vector<SolverTag> solvers{kAllSolvers.begin(), kAllSolvers.end()};
    std::vector<Eigen::Index> n_antennas{64};
    std::vector<Eigen::Index> n_users{20};
    int order = 4;
    double amplitude = 1.0;
    double power_budget = 1.0;
    std::vector<double> snr_db{0, 2, 4, 6, 8, 10, 12};
    long n_symbols = 1000;
    int coherence = 1;
    int trials = 10;
    std::uint64_t master_seed = 1;
    int threads = 1;
    SolverSuite suite;
    std::string output_path = "results";

    // Throws std::invalid_argument.
    void validate() const;
    bool operator==(const ExperimentSpec&) const = default;
};

/**
 * Parses the key-value format: one `key = value` per line, `#` starts a
 * comment, lists are comma-separated and `a:step:b` expands to an inclusive
 * range. Absent keys take the defaults of the chosen experiment. Throws
 * ConfigError naming the line and key.
 */
ExperimentSpec parse_config(std::string_view text);

/// Reads and parses a file; IoError if it cannot be read.
ExperimentSpec load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(render(spec)) == spec.
std::string render(const ExperimentSpec& spec);

struct RunOptions {
    std::optional<std::filesystem::path> out_dir; // overrides spec.output_path
    std::ostream* log = nullptr;                  // progress lines; null for quiet
};

struct RunSummary {
    std::filesystem::path out_dir;
    std::vector<std::filesystem::path> files;
};

/**
 * Runs one experiment and writes `<experiment>.csv`, the wall-clock sidecar
 * `<experiment>.wallclock.csv` and `manifest.txt`; single_solve also writes
 * one objective-trace CSV per solver. The main CSV depends only on the
 * manifest; wall-clock figures live in the sidecar. Throws IoError when the
 * output cannot be written and NumericalFailure on non-finite results.
 */
RunSummary run_experiment(const ExperimentSpec& spec, const RunOptions& options = {});

enum class PlotKind { ser, time };

PlotKind parse_plot_kind(std::string_view text);

/// Writes `<stem>.dat` (one gnuplot data block per solver) and `<stem>.gp`
/// next to the CSV and returns their paths. Throws SchemaError when required
/// columns are missing and IoError when files cannot be read or written.
std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& csv_path, PlotKind kind);

/// Quick invariant suite; prints one line per check and returns kExitOk or kExitNumerical.
int run_selftest(std::ostream& out);

} // namespace cep

#endif // CEPRECODE_CLI_HPP
