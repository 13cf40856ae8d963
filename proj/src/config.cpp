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

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace cep {

namespace {

// Thrown by value parsers; rewrapped with line and key by the caller.
struct BadValue {
    std::string message;
};

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

double to_double(std::string_view s)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw BadValue{"'" + std::string(s) + "' is not a finite number"};
    }
    return v;
}

long to_long(std::string_view s)
{
    long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw BadValue{"'" + std::string(s) + "' is not an integer"};
    }
    return v;
}

std::uint64_t to_u64(std::string_view s)
{
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw BadValue{"'" + std::string(s) + "' is not an unsigned 64-bit integer"};
    }
    return v;
}

int to_int(std::string_view s)
{
    const long v = to_long(s);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        throw BadValue{"'" + std::string(s) + "' is out of range"};
    }
    return static_cast<int>(v);
}

bool to_bool(std::string_view s)
{
    if (s == "true" || s == "yes" || s == "on" || s == "1") {
        return true;
    }
    if (s == "false" || s == "no" || s == "off" || s == "0") {
        return false;
    }
    throw BadValue{"'" + std::string(s) + "' is not a boolean"};
}

std::vector<double> to_double_list(std::string_view s)
{
    std::vector<double> out;
    for (const auto item : split(s, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() == 1) {
            out.push_back(to_double(item));
            continue;
        }
        if (parts.size() != 3) {
            throw BadValue{"range '" + std::string(item) + "' must have the form start:step:stop"};
        }
        const double a = to_double(parts[0]);
        const double step = to_double(parts[1]);
        const double b = to_double(parts[2]);
        if (!(step > 0.0) || b < a) {
            throw BadValue{"inconsistent range '" + std::string(item) + "'"};
        }
        const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
        for (long k = 0; k < count; ++k) {
            out.push_back(a + static_cast<double>(k) * step);
        }
    }
    return out;
}

std::vector<Eigen::Index> to_index_list(std::string_view s)
{
    std::vector<Eigen::Index> out;
    for (const auto item : split(s, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() == 1) {
            out.push_back(to_long(item));
            continue;
        }
        if (parts.size() != 3) {
            throw BadValue{"range '" + std::string(item) + "' must have the form start:step:stop"};
        }
        const long a = to_long(parts[0]);
        const long step = to_long(parts[1]);
        const long b = to_long(parts[2]);
        if (step < 1 || b < a) {
            throw BadValue{"inconsistent range '" + std::string(item) + "'"};
        }
        for (long v = a; v <= b; v += step) {
            out.push_back(v);
        }
    }
    return out;
}

std::vector<SolverTag> to_solver_list(std::string_view s)
{
    std::vector<SolverTag> out;
    for (const auto item : split(s, ',')) {
        try {
            out.push_back(parse_solver_tag(item));
        } catch (const std::invalid_argument&) {
            throw BadValue{"unknown solver '" + std::string(item) + "'"};
        }
    }
    return out;
}

std::string fmt_double(double v)
{
    return fmt::format("{}", v);
}

template <class T, class F>
std::string join(const std::vector<T>& values, F&& show)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += show(values[i]);
    }
    return out;
}

struct KeyDef {
    std::string name;
    std::vector<std::string> aliases;
    std::function<void(ExperimentSpec&, std::string_view)> set;
    std::function<std::optional<std::string>(const ExperimentSpec&)> show;
};

const std::vector<KeyDef>& key_table()
{
    using S = ExperimentSpec;
    using V = std::string_view;
    using Out = std::optional<std::string>;
    static const std::vector<KeyDef> table = {
        {"experiment", {}, [](S& s, V v) {
             try {
                 s.experiment = parse_experiment_kind(v);
             } catch (const std::invalid_argument& e) {
                 throw BadValue{e.what()};
             }
         },
         [](const S& s) -> Out { return std::string(to_string(s.experiment)); }},
        {"solvers", {}, [](S& s, V v) { s.solvers = to_solver_list(v); },
         [](const S& s) -> Out { return join(s.solvers, [](SolverTag t) { return std::string(to_string(t)); }); }},
        {"N", {"N_range"}, [](S& s, V v) { s.n_antennas = to_index_list(v); },
         [](const S& s) -> Out { return join(s.n_antennas, [](Eigen::Index n) { return std::to_string(n); }); }},
        {"M", {"M_range"}, [](S& s, V v) { s.n_users = to_index_list(v); },
         [](const S& s) -> Out { return join(s.n_users, [](Eigen::Index n) { return std::to_string(n); }); }},
        {"L", {}, [](S& s, V v) { s.order = to_int(v); }, [](const S& s) -> Out { return std::to_string(s.order); }},
        {"u", {}, [](S& s, V v) { s.amplitude = to_double(v); },
         [](const S& s) -> Out { return fmt_double(s.amplitude); }},
        {"P_T", {}, [](S& s, V v) { s.power_budget = to_double(v); },
         [](const S& s) -> Out { return fmt_double(s.power_budget); }},
        {"snr_db", {"snr_range"}, [](S& s, V v) { s.snr_db = to_double_list(v); },
         [](const S& s) -> Out { return join(s.snr_db, fmt_double); }},
        {"n_symbols", {}, [](S& s, V v) { s.n_symbols = to_long(v); },
         [](const S& s) -> Out { return std::to_string(s.n_symbols); }},
        {"coherence", {}, [](S& s, V v) { s.coherence = to_int(v); },
         [](const S& s) -> Out { return std::to_string(s.coherence); }},
        {"trials", {}, [](S& s, V v) { s.trials = to_int(v); },
         [](const S& s) -> Out { return std::to_string(s.trials); }},
        {"seed", {"master_seed"}, [](S& s, V v) { s.master_seed = to_u64(v); },
         [](const S& s) -> Out { return std::to_string(s.master_seed); }},
        {"threads", {}, [](S& s, V v) { s.threads = to_int(v); },
         [](const S& s) -> Out { return std::to_string(s.threads); }},
        {"output", {"output_path"}, [](S& s, V v) { s.output_path = std::string(v); },
         [](const S& s) -> Out { return s.output_path; }},

        {"rcg.max_iters", {}, [](S& s, V v) { s.suite.rcg.max_iters = to_int(v); },
         [](const S& s) -> Out { return std::to_string(s.suite.rcg.max_iters); }},
        {"rcg.grad_tol", {}, [](S& s, V v) { s.suite.rcg.grad_tol = to_double(v); },
         [](const S& s) -> Out {
             return s.suite.rcg.grad_tol ? Out(fmt_double(*s.suite.rcg.grad_tol)) : std::nullopt;
         }},
        {"rcg.epsilon", {}, [](S& s, V v) { s.suite.rcg.epsilon = to_double(v); },
         [](const S& s) -> Out {
             return s.suite.rcg.epsilon ? Out(fmt_double(*s.suite.rcg.epsilon)) : std::nullopt;
         }},
        {"rcg.armijo_initial", {}, [](S& s, V v) { s.suite.rcg.armijo_initial = to_double(v); },
         [](const S& s) -> Out { return fmt_double(s.suite.rcg.armijo_initial); }},
        {"rcg.armijo_contraction", {}, [](S& s, V v) { s.suite.rcg.armijo_contraction = to_double(v); },
         [](const S& s) -> Out { return fmt_double(s.suite.rcg.armijo_contraction); }},
        {"rcg.armijo_slope", {}, [](S& s, V v) { s.suite.rcg.armijo_slope = to_double(v); },
         [](const S& s) -> Out { return fmt_double(s.suite.rcg.armijo_slope); }},
        {"rcg.max_backtracks", {}, [](S& s, V v) { s.suite.rcg.max_backtracks = to_int(v); },
         [](const S& s) -> Out { return std::to_string(s.suite.rcg.max_backtracks); }},
        {"rcg.restart", {}, [](S& s, V v) { s.suite.rcg.restart_on_nondescent = to_bool(v); },
         [](const S& s) -> Out { return s.suite.rcg.restart_on_nondescent ? "true" : "false"; }},
        {"rcg.pr_plus", {}, [](S& s, V v) { s.suite.rcg.pr_plus = to_bool(v); },
         [](const S& s) -> Out { return s.suite.rcg.pr_plus ? "true" : "false"; }},
        {"rcg.continuation", {}, [](S& s, V v) { s.suite.rcg.continuation = to_bool(v); },
         [](const S& s) -> Out { return s.suite.rcg.continuation ? "true" : "false"; }},
        {"rcg.kernel", {}, [](S& s, V v) {
             try {
                 s.suite.rcg.kernel = parse_projection_kernel(v);
             } catch (const std::invalid_argument& e) {
                 throw BadValue{e.what()};
             }
         },
         [](const S& s) -> Out { return std::string(to_string(s.suite.rcg.kernel)); }},

        {"gd.iterations", {}, [](S& s, V v) { s.suite.gd.iterations = to_int(v); },
         [](const S& s) -> Out { return std::to_string(s.suite.gd.iterations); }},
        {"gd.initial_step", {}, [](S& s, V v) { s.suite.gd.initial_step = to_double(v); },
         [](const S& s) -> Out { return fmt_double(s.suite.gd.initial_step); }},
        {"gd.contraction", {}, [](S& s, V v) { s.suite.gd.contraction = to_double(v); },
         [](const S& s) -> Out { return fmt_double(s.suite.gd.contraction); }},
        {"gd.slope", {}, [](S& s, V v) { s.suite.gd.slope = to_double(v); },
         [](const S& s) -> Out { return fmt_double(s.suite.gd.slope); }},
        {"gd.max_backtracks", {}, [](S& s, V v) { s.suite.gd.max_backtracks = to_int(v); },
         [](const S& s) -> Out { return std::to_string(s.suite.gd.max_backtracks); }},
        {"gd.sequential", {}, [](S& s, V v) { s.suite.gd.coordinate_sequential = to_bool(v); },
         [](const S& s) -> Out { return s.suite.gd.coordinate_sequential ? "true" : "false"; }},

        {"ceo.iterations", {}, [](S& s, V v) { s.suite.ceo.iterations = to_int(v); },
         [](const S& s) -> Out { return std::to_string(s.suite.ceo.iterations); }},
        {"ceo.samples", {}, [](S& s, V v) { s.suite.ceo.samples = to_int(v); },
         [](const S& s) -> Out { return std::to_string(s.suite.ceo.samples); }},
        {"ceo.quantile", {}, [](S& s, V v) { s.suite.ceo.quantile = to_double(v); },
         [](const S& s) -> Out { return fmt_double(s.suite.ceo.quantile); }},
        {"ceo.smoothing", {}, [](S& s, V v) { s.suite.ceo.smoothing = to_double(v); },
         [](const S& s) -> Out { return fmt_double(s.suite.ceo.smoothing); }},

        {"cvx.iterations", {}, [](S& s, V v) { s.suite.relaxed.iterations = to_int(v); },
         [](const S& s) -> Out { return std::to_string(s.suite.relaxed.iterations); }},
        {"cvx.initial_step", {}, [](S& s, V v) { s.suite.relaxed.initial_step = to_double(v); },
         [](const S& s) -> Out { return fmt_double(s.suite.relaxed.initial_step); }},
    };
    return table;
}

const KeyDef* find_key(std::string_view name)
{
    for (const auto& def : key_table()) {
        if (def.name == name) {
            return &def;
        }
        for (const auto& alias : def.aliases) {
            if (alias == name) {
                return &def;
            }
        }
    }
    return nullptr;
}

void apply_experiment_defaults(ExperimentSpec& spec)
{
    switch (spec.experiment) {
    case ExperimentKind::ser_vs_snr:
        spec.n_users = {20};
        spec.snr_db = {0, 2, 4, 6, 8, 10, 12};
        break;
    case ExperimentKind::ser_vs_users:
        spec.n_users = {12, 14, 16, 18, 20, 22, 24};
        spec.snr_db = {8};
        break;
    case ExperimentKind::timing:
        spec.n_users = {12, 14, 16, 18, 20, 22, 24};
        spec.snr_db = {8};
        break;
    case ExperimentKind::single_solve:
        spec.n_users = {20};
        spec.snr_db = {8};
        break;
    }
}

} // namespace

ConfigError::ConfigError(const std::string& message, int line, std::string key)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + (key.empty() ? "" : ", key '" + key + "'") +
                                        ": " + message
                                  : (key.empty() ? message : "key '" + key + "': " + message)),
      line_(line), key_(std::move(key))
{
}

std::string_view to_string(ExperimentKind kind) noexcept
{
    switch (kind) {
    case ExperimentKind::timing:
        return "timing";
    case ExperimentKind::ser_vs_snr:
        return "ser_vs_snr";
    case ExperimentKind::ser_vs_users:
        return "ser_vs_users";
    case ExperimentKind::single_solve:
        return "single_solve";
    }
    return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view text)
{
    for (const auto kind : {ExperimentKind::timing, ExperimentKind::ser_vs_snr, ExperimentKind::ser_vs_users,
                            ExperimentKind::single_solve}) {
        if (text == to_string(kind)) {
            return kind;
        }
    }
    throw std::invalid_argument("unknown experiment '" + std::string(text) +
                                "' (expected timing, ser_vs_snr, ser_vs_users or single_solve)");
}

void ExperimentSpec::validate() const
{
    auto require = [](bool ok, const std::string& what) {
        if (!ok) {
            throw std::invalid_argument(what);
        }
    };
    require(!solvers.empty(), "solvers: list is empty");
    require(std::set<SolverTag>(solvers.begin(), solvers.end()).size() == solvers.size(),
            "solvers: duplicate entry");
    require(!n_antennas.empty(), "N: list is empty");
    require(!n_users.empty(), "M: list is empty");
    for (const auto n : n_antennas) {
        require(n >= 1, "N: must be at least 1");
    }
    for (const auto m : n_users) {
        require(m >= 1, "M: must be at least 1");
    }
    require(order >= 2, "L: must be at least 2");
    require(amplitude > 0.0, "u: must be positive");
    require(power_budget > 0.0, "P_T: must be positive");
    require(!snr_db.empty(), "snr_db: list is empty");
    require(n_symbols >= 1, "n_symbols: must be at least 1");
    require(coherence >= 1, "coherence: must be at least 1");
    require(trials >= 1, "trials: must be at least 1");
    require(threads >= 1, "threads: must be at least 1");
    require(!output_path.empty(), "output: must not be empty");
    suite.validate();
}

ExperimentSpec parse_config(std::string_view text)
{
    struct Entry {
        const KeyDef* def;
        std::string value;
        int line;
    };
    std::vector<Entry> entries;
    std::set<std::string> seen;

    int line_no = 0;
    for (const auto raw : split(text, '\n')) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = trim(line.substr(0, hash));
        }
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("expected 'key = value'", line_no, "");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) {
            throw ConfigError("missing key before '='", line_no, "");
        }
        const KeyDef* def = find_key(key);
        if (def == nullptr) {
            throw ConfigError("unknown key", line_no, key);
        }
        if (value.empty()) {
            throw ConfigError("missing value", line_no, key);
        }
        if (!seen.insert(def->name).second) {
            throw ConfigError("key given more than once", line_no, key);
        }
        entries.push_back({def, value, line_no});
    }

    ExperimentSpec spec;
    // The experiment kind decides the defaults, so it is applied first.
    for (const auto& e : entries) {
        if (e.def->name == "experiment") {
            try {
                e.def->set(spec, e.value);
            } catch (const BadValue& bad) {
                throw ConfigError(bad.message, e.line, "experiment");
            }
        }
    }
    apply_experiment_defaults(spec);
    for (const auto& e : entries) {
        try {
            e.def->set(spec, e.value);
        } catch (const BadValue& bad) {
            throw ConfigError(bad.message, e.line, e.def->name);
        }
    }
    try {
        spec.validate();
    } catch (const std::invalid_argument& err) {
        throw ConfigError(err.what(), 0, "");
    }
    return spec;
}

ExperimentSpec load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read config file '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string render(const ExperimentSpec& spec)
{
    std::string out;
    for (const auto& def : key_table()) {
        if (const auto value = def.show(spec)) {
            out += def.name + " = " + *value + "\n";
        }
    }
    return out;
}

} // namespace cep
