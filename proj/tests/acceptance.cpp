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


// Acceptance run. Prints one PASS/FAIL line per criterion and a summary;
// the exit status is 0 once every criterion has been evaluated, so a FAIL is
// a reported outcome rather than a crash. argv[1] is the scratch directory
// for experiment outputs (default: ./acceptance_runs).

#include "ceprecode/cli.hpp"
#include "oracles.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

using namespace cep;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int g_passed = 0;
int g_total = 0;

void report(int id, std::string_view name, const Outcome& o)
{
    ++g_total;
    g_passed += o.pass ? 1 : 0;
    fmt::print("{} {:>2}  {}: {}\n", o.pass ? "PASS" : "FAIL", id, name, o.detail);
    std::fflush(stdout);
}

void progress(const std::string& text)
{
    fmt::print("  .. {}\n", text);
    std::fflush(stdout);
}

// Worst CE deviation seen anywhere in the run.
double g_max_ce = 0.0;

void observe_ce(double dev)
{
    g_max_ce = std::max(g_max_ce, dev);
}

// Every (exact, smoothed, epsilon, 2M) evaluation seen in the run.
struct SandwichStats {
    long evaluations = 0;
    long violations = 0;
    double min_gap = 1e300;
    double max_gap_ratio = 0.0; // gap / (eps ln 2M)
};

SandwichStats g_sandwich;

void observe_sandwich(double exact, double smoothed, double eps, Eigen::Index m)
{
    const double gap = smoothed - exact;
    const double bound = eps * std::log(2.0 * static_cast<double>(m));
    ++g_sandwich.evaluations;
    if (!(gap >= 0.0) || !(gap <= bound + 1e-12)) {
        ++g_sandwich.violations;
    }
    g_sandwich.min_gap = std::min(g_sandwich.min_gap, gap);
    g_sandwich.max_gap_ratio = std::max(g_sandwich.max_gap_ratio, gap / bound);
}

void observe_trace(const SolveReport& r, double eps, Eigen::Index m)
{
    for (const auto& sample : r.objective_trace) {
        observe_sandwich(sample.exact, sample.smoothed, eps, m);
    }
}

Matrix2N gaussian(Eigen::Index n, Rng& rng)
{
    std::normal_distribution<double> normal;
    Matrix2N g(2, n);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        g.data()[i] = normal(rng);
    }
    return g;
}

// --- CSV reading --------------------------------------------------------------

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t col(std::string_view name) const
    {
        const auto it = std::find(columns.begin(), columns.end(), name);
        if (it == columns.end()) {
            throw std::runtime_error("missing column " + std::string(name));
        }
        return static_cast<std::size_t>(it - columns.begin());
    }
    double num(std::size_t row, std::string_view name) const { return std::stod(rows.at(row).at(col(name))); }
    const std::string& str(std::size_t row, std::string_view name) const { return rows.at(row).at(col(name)); }
};

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        out.push_back(cell);
    }
    return out;
}

Table read_table(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    Table t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (t.columns.empty()) {
            t.columns = split(line);
        } else {
            t.rows.push_back(split(line));
        }
    }
    return t;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void observe_ce_column(const Table& t)
{
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        observe_ce(t.num(r, "max_ce_deviation"));
    }
}

// --- criteria -----------------------------------------------------------------

Outcome gradient_check()
{
    const auto start = Clock::now();
    const std::array<Eigen::Index, 3> ns{2, 8, 64};
    const std::array<Eigen::Index, 3> ms{1, 4, 20};
    const std::array<double, 3> epss{1.0, 0.1, 0.01};
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Eigen::Index n = ns[static_cast<std::size_t>(i % 3)];
        const Eigen::Index m = ms[static_cast<std::size_t>((i / 3) % 3)];
        const double eps = epss[static_cast<std::size_t>((i / 9) % 3)];
        const auto seed = static_cast<std::uint64_t>(i);
        const ChannelMatrix h = generate_channel(n, m, derive_seed(101, seed, "channel"));
        const SymbolVector s = draw_symbols(m, 4, 1.0, derive_seed(101, seed, "symbols"));
        const RotatedChannel ch = rotate_channel(h, s, 1.0);
        const RealPoint x = oblique_random(n, derive_seed(101, seed, "point"));
        const Matrix2N grad = euclidean_gradient(x, ch, eps);
        Matrix2N fd(2, n);
        const double step = 1e-6;
        for (Eigen::Index k = 0; k < fd.size(); ++k) {
            Matrix2N up = x.data();
            Matrix2N dn = x.data();
            up.data()[k] += step;
            dn.data()[k] -= step;
            fd.data()[k] =
                (log_sum_exp(eval_g(up, ch), eps) - log_sum_exp(eval_g(dn, ch), eps)) / (2.0 * step);
        }
        worst = std::max(worst, (grad - fd).norm() / fd.norm());
        const ObjectiveEval e = evaluate(x, ch, eps);
        observe_sandwich(e.exact_value, e.smoothed_value, eps, m);
    }
    const double secs = seconds_since(start);
    return {worst < 1e-5 && secs < 30.0,
            fmt::format("max relative error {:.2e} over 100 instances (limit 1e-5), {:.2f} s (limit 30 s)", worst,
                        secs)};
}

Outcome manifold_suite()
{
    const auto start = Clock::now();
    Rng rng(202);
    std::uniform_int_distribution<int> dim(1, 64);
    std::uniform_real_distribution<double> step(-2.0, 2.0);
    double membership = 0.0;
    double tangency = 0.0;
    double idempotence = 0.0;
    double identity = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Eigen::Index n = dim(rng);
        const RealPoint x = oblique_random(n, rng());
        const Matrix2N g = gaussian(n, rng);
        const TangentVector v = i % 2 == 0 ? tangent_project(x, g) : tangent_project_dense(x, g);
        tangency = std::max(tangency, v.tangency_residual());
        idempotence = std::max(idempotence, (tangent_project(x, v.data()).data() - v.data()).cwiseAbs().maxCoeff());
        const RealPoint y = retract(x, v, step(rng));
        membership = std::max(membership, (y.data().colwise().norm().array() - 1.0).abs().maxCoeff());
        identity =
            std::max(identity, (retract(x, TangentVector::zero(x), step(rng)).data() - x.data()).cwiseAbs().maxCoeff());
    }
    const double secs = seconds_since(start);
    const bool pass = membership < 1e-12 && tangency < 1e-10 && idempotence < 1e-12 && identity == 0.0 && secs < 10.0;
    return {pass, fmt::format("10^4 cases: membership {:.1e}, tangency {:.1e}, idempotence {:.1e}, zero-step identity "
                              "{:.1e}, {:.2f} s (limit 10 s)",
                              membership, tangency, idempotence, identity, secs)};
}

Outcome identity_oracle()
{
    Rng rng(303);
    std::uniform_int_distribution<int> n_dist(1, 16);
    std::uniform_int_distribution<int> m_dist(1, 8);
    std::uniform_int_distribution<int> l_dist(3, 8);
    std::uniform_real_distribution<double> u_dist(0.5, 2.0);
    double worst = 0.0;
    double literal_min = 1e300;
    double literal_max = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Eigen::Index n = n_dist(rng);
        const Eigen::Index m = m_dist(rng);
        const int order = l_dist(rng);
        const double u = u_dist(rng);
        const double power = u_dist(rng);
        const ChannelMatrix h(oracle::random_complex(n, m, rng()));
        const SymbolVector s = draw_symbols(m, order, u, rng());
        const RotatedChannel ch = rotate_channel(h, s, power);
        const RealPoint x = oblique_random(n, rng(), power);
        const RealVector g = eval_g(x, ch);
        const ComplexVector received = h.data().transpose() * x.precoder();
        for (Eigen::Index k = 0; k < m; ++k) {
            const double lhs =
                oracle::sector_violation(received[k], s.symbols()[k], s.phases()[k], s.beta());
            const double pair = std::max(g[2 * k], g[2 * k + 1]);
            worst = std::max(worst, std::abs(lhs - (pair + u * s.beta())));
            const double literal_gap = std::abs(lhs - (pair - u * s.beta())) / (u * s.beta());
            literal_min = std::min(literal_min, literal_gap);
            literal_max = std::max(literal_max, literal_gap);
        }
    }
    return {worst < 1e-10,
            fmt::format("|Im t| - beta Re t = max(g pair) + u beta within {:.1e} on 10^3 triples (limit 1e-10); the "
                        "form with '- u beta' is off by [{:.6f}, {:.6f}] x u beta",
                        worst, literal_min, literal_max)};
}

Outcome scalar_oracle()
{
    const auto start = Clock::now();
    ComplexMatrix one(1, 1);
    one(0, 0) = 1.0;
    const ChannelMatrix h(one);
    const SymbolVector s({0}, 4, 1.0);
    const double grid = oracle::scalar_ci_grid_min(1.0, 1.0, 0.0, 1.0);
    const RotatedChannel ch = rotate_channel(h, s, 1.0);
    int reached = 0;
    std::vector<std::string> finals;
    for (int t = 0; t < 20; ++t) {
        SolverConfig cfg;
        cfg.seed = derive_seed(505, static_cast<std::uint64_t>(t), "init");
        const SolveReport r = rcg_solve(h, s, 1.0, cfg);
        observe_ce(envelope_deviation(r.x, 1.0));
        observe_trace(r, cfg.resolved_epsilon(ch), 1);
        const bool ok = std::abs(r.final_exact() - grid) < 1e-3;
        reached += ok ? 1 : 0;
        if (!ok) {
            finals.push_back(fmt::format("{:.4f}", r.final_exact()));
        }
    }
    const double secs = seconds_since(start);
    std::string stuck;
    for (const auto& f : finals) {
        stuck += (stuck.empty() ? "" : " ") + f;
    }
    return {reached == 20 && secs < 5.0,
            fmt::format("{}/20 starts within 1e-3 of grid minimum {:.6f}, {:.2f} s (limit 5 s){}", reached, grid, secs,
                        finals.empty() ? ""
                                       : "; others stopped at the mirrored local minimum +1 (values " + stuck + ")")};
}

Outcome flop_check()
{
    const auto g = flop_model(64, 20, FlopStage::gradient);
    const auto d = flop_model(64, 20, FlopStage::direction);
    return {g == 84840 && d == 16768, fmt::format("(64, 20): gradient stage {}, direction stage {}", g, d)};
}

// SNR where log10(SER) crosses log10(target), linear in dB; extrapolates from
// the nearest segment when the target is outside the measured range.
std::optional<double> crossing(const std::vector<double>& snr, const std::vector<double>& ser, double target)
{
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < snr.size(); ++i) {
        if (ser[i] > 0.0) {
            pts.emplace_back(snr[i], std::log10(ser[i]));
        }
    }
    if (pts.size() < 2) {
        return std::nullopt;
    }
    const double y = std::log10(target);
    std::size_t seg = pts.size() - 2;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if ((pts[i].second - y) * (pts[i + 1].second - y) <= 0.0) {
            seg = i;
            break;
        }
        if (i == 0 && y > pts[0].second) {
            seg = 0;
            break;
        }
    }
    const auto [x0, y0] = pts[seg];
    const auto [x1, y1] = pts[seg + 1];
    if (y1 == y0) {
        return std::nullopt;
    }
    return x0 + (y - y0) * (x1 - x0) / (y1 - y0);
}

struct SerPoint {
    double snr;
    double ser;
};

std::map<std::string, std::vector<SerPoint>> ser_by_solver(const Table& t)
{
    std::map<std::string, std::vector<SerPoint>> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        out[t.str(r, "solver")].push_back({t.num(r, "snr_db"), t.num(r, "ser")});
    }
    return out;
}

ExperimentSpec base_spec(ExperimentKind kind)
{
    ExperimentSpec spec = parse_config("experiment = " + std::string(to_string(kind)));
    spec.master_seed = 20240601;
    return spec;
}

Outcome ser_ordering(const Table& t)
{
    const auto by = ser_by_solver(t);
    const std::vector<std::string> ci{"rcg-ci", "cvx-ci", "ceo-ci"};
    const std::vector<std::string> ir{"rcg-ir", "gd-ir", "ceo-ir"};
    bool ordering = true;
    std::string table;
    const auto& snrs = by.at("rcg-ci");
    for (std::size_t k = 0; k < snrs.size(); ++k) {
        double worst_ci = 0.0;
        double best_ir = 1.0;
        for (const auto& c : ci) {
            worst_ci = std::max(worst_ci, by.at(c)[k].ser);
        }
        for (const auto& c : ir) {
            best_ir = std::min(best_ir, by.at(c)[k].ser);
        }
        ordering = ordering && worst_ci < best_ir;
    }
    bool rcg_vs_cvx = true;
    for (std::size_t k = 0; k < snrs.size(); ++k) {
        if (snrs[k].snr >= 8.0) {
            rcg_vs_cvx = rcg_vs_cvx && by.at("rcg-ci")[k].ser <= by.at("cvx-ci")[k].ser;
        }
    }
    for (const auto& [name, pts] : by) {
        table += fmt::format(" {}[", name);
        for (std::size_t k = 0; k < pts.size(); ++k) {
            table += fmt::format("{}{:.2e}", k > 0 ? " " : "", pts[k].ser);
        }
        table += "]";
    }

    auto cross = [&](const std::string& name) {
        std::vector<double> x;
        std::vector<double> y;
        for (const auto& p : by.at(name)) {
            x.push_back(p.snr);
            y.push_back(p.ser);
        }
        return crossing(x, y, 3e-3);
    };
    const auto rcg = cross("rcg-ci");
    bool shifts = rcg.has_value();
    std::string shift_text;
    for (const auto& name : {"rcg-ir", "gd-ir", "ceo-ir", "cvx-ci"}) {
        const auto other = cross(name);
        if (!rcg || !other) {
            shifts = false;
            shift_text += fmt::format(" {}: n/a", name);
            continue;
        }
        const double shift = *other - *rcg;
        const bool is_cvx = std::string_view(name) == "cvx-ci";
        const double lo = is_cvx ? 0.0 : 1.0;
        const double hi = is_cvx ? 2.0 : 3.0;
        shifts = shifts && shift >= lo && shift <= hi;
        shift_text += fmt::format(" {} {:+.2f} dB (band [{}, {}])", name, shift, lo, hi);
    }
    return {ordering && rcg_vs_cvx && shifts,
            fmt::format("CI < IR at every point: {}; RCG-CI <= relaxed-CI at >= 8 dB: {}; shift at SER 3e-3 vs "
                        "RCG-CI:{}; SER at 4/6/8/10 dB:{}",
                        ordering ? "yes" : "no", rcg_vs_cvx ? "yes" : "no", shift_text, table)};
}

Outcome ir_floor(const std::map<Eigen::Index, std::map<std::string, double>>& by_m)
{
    bool band = true;
    bool lowest = true;
    std::string text;
    for (const auto& [m, sers] : by_m) {
        text += fmt::format(" M={}:", m);
        const double rcg = sers.at("rcg-ci");
        for (const auto& [name, ser] : sers) {
            text += fmt::format(" {} {:.2e}", name, ser);
            if (name.ends_with("-ir")) {
                band = band && ser >= 1e-2 / 3.0 && ser <= 3e-2;
            }
            if (name != "rcg-ci") {
                lowest = lowest && rcg <= ser;
            }
        }
        text += ";";
    }
    return {band && lowest, fmt::format("IR SER within [3.3e-3, 3e-2]: {}; RCG-CI lowest at every M: {};{}",
                                        band ? "yes" : "no", lowest ? "yes" : "no", text)};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t n = x.size();
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double dn = static_cast<double>(n);
    return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

Outcome timing_trend(const Table& by_m, const Table& by_n)
{
    std::map<std::string, std::map<long, double>> t;
    for (std::size_t r = 0; r < by_m.rows.size(); ++r) {
        t[by_m.str(r, "solver")][std::lround(by_m.num(r, "M"))] = by_m.num(r, "mean_time_s");
    }
    double lo = 1e300;
    double hi = 0.0;
    for (const auto& [m, secs] : t.at("rcg-ci")) {
        lo = std::min(lo, secs);
        hi = std::max(hi, secs);
    }
    const double ratio = hi / lo;
    bool ceo_slower = true;
    for (const auto& [m, secs] : t.at("rcg-ci")) {
        const double rcg_max = std::max(secs, t.at("rcg-ir").at(m));
        ceo_slower = ceo_slower && t.at("ceo-ci").at(m) > rcg_max && t.at("ceo-ir").at(m) > rcg_max;
    }
    std::vector<double> ns;
    std::vector<double> per_iter;
    std::string iter_text;
    for (std::size_t r = 0; r < by_n.rows.size(); ++r) {
        ns.push_back(by_n.num(r, "N"));
        per_iter.push_back(by_n.num(r, "mean_time_per_iter_s"));
        iter_text += fmt::format(" N={} {:.3e} s", ns.back(), per_iter.back());
    }
    const double slope = loglog_slope(ns, per_iter);
    const bool pass = ratio < 2.0 && ceo_slower && slope >= 1.5 && slope <= 2.5;
    std::string times;
    for (const auto& [name, row] : t) {
        times += fmt::format(" {}[", name);
        bool first = true;
        for (const auto& [m, secs] : row) {
            times += fmt::format("{}{:.4f}", first ? "" : " ", secs);
            first = false;
        }
        times += "]";
    }
    return {pass, fmt::format("RCG-CI max/min over M = {:.2f} (limit 2); CEO slower than RCG at every M: {}; "
                              "per-iteration log-log slope {:.2f} (band [1.5, 2.5]);{}; mean s at M=12/16/20/24:{}",
                              ratio, ceo_slower ? "yes" : "no", slope, iter_text, times)};
}

Outcome determinism(const fs::path& root)
{
    std::vector<std::string> mismatched;
    int compared = 0;
    for (const auto kind : {ExperimentKind::ser_vs_snr, ExperimentKind::ser_vs_users, ExperimentKind::timing,
                            ExperimentKind::single_solve}) {
        const std::string name(to_string(kind));
        ExperimentSpec spec = base_spec(kind);
        spec.n_antennas = {16};
        spec.n_users = kind == ExperimentKind::ser_vs_users || kind == ExperimentKind::timing
                           ? std::vector<Eigen::Index>{4, 6}
                           : std::vector<Eigen::Index>{4};
        spec.snr_db = kind == ExperimentKind::ser_vs_snr ? std::vector<double>{0, 4, 8} : std::vector<double>{8};
        spec.n_symbols = 40;
        spec.trials = 2;
        spec.threads = 2;
        spec.suite.ceo.iterations = 50;
        const fs::path first = root / ("determinism_" + name);
        const fs::path second = root / ("determinism_" + name + "_rerun");
        const RunSummary a = run_experiment(spec, {first, nullptr});
        ExperimentSpec again = load_config(first / "manifest.txt");
        again.threads = 1;
        const RunSummary b = run_experiment(again, {second, nullptr});
        for (std::size_t i = 0; i < a.files.size(); ++i) {
            const std::string file = a.files[i].filename().string();
            if (file.find("wallclock") != std::string::npos || a.files[i].extension() != ".csv") {
                continue;
            }
            ++compared;
            if (i >= b.files.size() || slurp(a.files[i]) != slurp(b.files[i])) {
                mismatched.push_back(name + "/" + file);
            }
        }
    }
    std::string list;
    for (const auto& m : mismatched) {
        list += " " + m;
    }
    return {mismatched.empty() && compared > 0,
            fmt::format("{} result CSVs across all four experiment kinds rerun from their manifests (threads 2 then 1); "
                        "{} differ{}; wall-clock sidecars are not compared",
                        compared, mismatched.size(), list)};
}

} // namespace

int main(int argc, char** argv)
{
    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_runs");
    std::error_code ec;
    fs::remove_all(root, ec);
    fs::create_directories(root);
    const auto started = Clock::now();

    try {
        report(1, "gradient vs finite differences", gradient_check());
        report(2, "manifold invariant suite", manifold_suite());
        report(3, "CI identity oracle", identity_oracle());
        report(9, "flop model", flop_check());
        const Outcome scalar = scalar_oracle();

        // Sandwich also checked on full solver traces at the experiment size.
        for (int t = 0; t < 30; ++t) {
            const auto u = static_cast<std::uint64_t>(t);
            const ChannelMatrix h = generate_channel(64, 20, derive_seed(404, u, "channel"));
            const SymbolVector s = draw_symbols(20, 4, 1.0, derive_seed(404, u, "symbols"));
            SolverConfig cfg;
            cfg.seed = derive_seed(404, u, "init");
            cfg.continuation = t % 2 == 1;
            const SolveReport r = rcg_solve(h, s, 1.0, cfg);
            observe_ce(envelope_deviation(r.x, 1.0));
            const RotatedChannel ch = rotate_channel(h, s, 1.0);
            // With continuation the later rows use eps / 4, so eps bounds every row.
            observe_trace(r, cfg.resolved_epsilon(ch), 20);
        }

        report(5, "scalar global optimum", scalar);

        // Criterion 6.
        progress("SER vs SNR sweep: N=64, M=20, 1000 slots, SNR 4/6/8/10 dB, six solvers");
        auto t6 = Clock::now();
        ExperimentSpec snr = base_spec(ExperimentKind::ser_vs_snr);
        snr.snr_db = {4, 6, 8, 10};
        snr.n_symbols = 1000;
        run_experiment(snr, {root / "ser_vs_snr", nullptr});
        const Table snr_table = read_table(root / "ser_vs_snr" / "ser_vs_snr.csv");
        observe_ce_column(snr_table);
        Outcome o6 = ser_ordering(snr_table);
        const double secs6 = seconds_since(t6);
        o6.pass = o6.pass && secs6 < 1800.0;
        o6.detail += fmt::format("; {:.0f} s (target 1800 s)", secs6);
        report(6, "SER ordering vs SNR", o6);

        // Criterion 7: 2e4 user-symbols per M; the M=20 point is the 8 dB row
        // of the previous sweep, which shares its seed stream.
        progress("SER vs users: N=64, 8 dB, M 12/16/24 (M=20 reused)");
        auto t7 = Clock::now();
        std::map<Eigen::Index, std::map<std::string, double>> by_m;
        for (std::size_t r = 0; r < snr_table.rows.size(); ++r) {
            if (snr_table.num(r, "snr_db") == 8.0) {
                by_m[20][snr_table.str(r, "solver")] = snr_table.num(r, "ser");
            }
        }
        for (const Eigen::Index m : {12, 16, 24}) {
            ExperimentSpec users = base_spec(ExperimentKind::ser_vs_users);
            users.n_users = {m};
            users.n_symbols = (20000 + m - 1) / m;
            const fs::path dir = root / fmt::format("ser_vs_users_M{}", m);
            run_experiment(users, {dir, nullptr});
            const Table t = read_table(dir / "ser_vs_users.csv");
            observe_ce_column(t);
            for (std::size_t r = 0; r < t.rows.size(); ++r) {
                by_m[m][t.str(r, "solver")] = t.num(r, "ser");
            }
        }
        Outcome o7 = ir_floor(by_m);
        o7.detail += fmt::format(" {:.0f} s", seconds_since(t7));
        report(7, "IR error floor vs users", o7);

        progress("timing: N=64, M 12/16/20/24, all solvers; RCG-CI at N 32/64/128/256");
        ExperimentSpec timing = base_spec(ExperimentKind::timing);
        timing.n_users = {12, 16, 20, 24};
        run_experiment(timing, {root / "timing_users", nullptr});
        const Table timing_main = read_table(root / "timing_users" / "timing.csv");
        observe_ce_column(timing_main);
        ExperimentSpec scaling = base_spec(ExperimentKind::timing);
        scaling.solvers = {SolverTag::rcg_ci};
        scaling.n_antennas = {32, 64, 128, 256};
        scaling.n_users = {20};
        run_experiment(scaling, {root / "timing_antennas", nullptr});
        observe_ce_column(read_table(root / "timing_antennas" / "timing.csv"));
        report(8, "timing trend",
               timing_trend(read_table(root / "timing_users" / "timing.wallclock.csv"),
                            read_table(root / "timing_antennas" / "timing.wallclock.csv")));

        progress("determinism reruns");
        const Outcome o11 = determinism(root);

        report(4, "smoothing sandwich",
               {g_sandwich.violations == 0,
                fmt::format("{} evaluations, {} violations; min gap {:.2e}, max gap / (eps ln 2M) {:.4f}",
                            g_sandwich.evaluations, g_sandwich.violations, g_sandwich.min_gap,
                            g_sandwich.max_gap_ratio)});
        report(10, "exact constant envelope",
               {g_max_ce < 1e-12, fmt::format("max ||x_n| - sqrt(P_T/N)| over the run {:.2e} (limit 1e-12)", g_max_ce)});
        report(11, "determinism from manifest", o11);
    } catch (const std::exception& e) {
        fmt::print("FAIL     acceptance run aborted: {}\n", e.what());
        return 1;
    }
    fmt::print("{}/{} criteria passed, {:.0f} s total\n", g_passed, g_total, seconds_since(started));
    return 0;
}
