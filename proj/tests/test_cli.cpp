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
#include "oracles.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace cep;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("ceprecode_test_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write(const fs::path& path, const std::string& text)
{
    std::ofstream(path, std::ios::binary) << text;
}

std::vector<std::string> lines_of(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        out.push_back(line);
    }
    return out;
}

std::vector<std::string> cells(const std::string& line)
{
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        out.push_back(cell);
    }
    return out;
}

ExperimentSpec tiny(ExperimentKind kind)
{
    ExperimentSpec spec = parse_config("experiment = " + std::string(to_string(kind)));
    spec.n_antennas = {8};
    spec.n_users = {2, 3};
    spec.snr_db = {0, 10};
    spec.n_symbols = 20;
    spec.trials = 2;
    spec.suite.ceo.iterations = 10;
    spec.suite.ceo.samples = 40;
    spec.suite.relaxed.iterations = 100;
    return spec;
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(CEPRECODE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("empty config gives the documented defaults")
{
    const ExperimentSpec spec = parse_config("");
    CHECK(spec.experiment == ExperimentKind::ser_vs_snr);
    CHECK(spec.n_antennas == std::vector<Eigen::Index>{64});
    CHECK(spec.n_users == std::vector<Eigen::Index>{20});
    CHECK(spec.order == 4);
    CHECK(spec.amplitude == 1.0);
    CHECK(spec.power_budget == 1.0);
    CHECK(spec.solvers.size() == kAllSolvers.size());
    CHECK(spec.suite.ceo.iterations == 1000);
    CHECK(spec.suite.ceo.samples == 500);
    CHECK(spec.suite.ceo.quantile == 0.05);
    CHECK(spec.suite.ceo.smoothing == 0.08);
    CHECK(spec.suite.gd.iterations == 50);
    CHECK(spec == ExperimentSpec{});
    CHECK(parse_config("# only a comment\n\n   \n") == spec);
}

TEST_CASE("ser_vs_users defaults")
{
    const ExperimentSpec spec = parse_config("experiment = ser_vs_users\n");
    CHECK(spec.n_antennas == std::vector<Eigen::Index>{64});
    CHECK(spec.snr_db == std::vector<double>{8.0});
    CHECK(spec.n_users == std::vector<Eigen::Index>{12, 14, 16, 18, 20, 22, 24});
    const ExperimentSpec timing = parse_config("experiment = timing\n");
    CHECK(timing.n_users.front() == 12);
    CHECK(timing.n_users.back() == 24);
}

TEST_CASE("ranges, lists and aliases")
{
    const ExperimentSpec spec = parse_config("snr_range = 0:2:12\nM_range = 12:4:24\nsolvers = rcg-ci, gd-ir\n"
                                             "master_seed = 9  # trailing comment\nP_T = 2.5\nL=8\n");
    CHECK(spec.snr_db == std::vector<double>{0, 2, 4, 6, 8, 10, 12});
    CHECK(spec.n_users == std::vector<Eigen::Index>{12, 16, 20, 24});
    CHECK(spec.solvers == std::vector<SolverTag>{SolverTag::rcg_ci, SolverTag::gd_ir});
    CHECK(spec.master_seed == 9);
    CHECK(spec.power_budget == 2.5);
    CHECK(spec.order == 8);
    CHECK(parse_config("snr_db = -3, 1.5, 7\n").snr_db == std::vector<double>{-3, 1.5, 7});
    CHECK(parse_config("rcg.max_iters = 7\nceo.samples = 9\ngd.sequential = true\n").suite.rcg.max_iters == 7);
}

TEST_CASE("configuration errors name the line and key")
{
    try {
        parse_config("N = 64\nsolvers = rcg-ci, nosuch\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 2);
        CHECK(e.key() == "solvers");
        CHECK(std::string(e.what()).find("nosuch") != std::string::npos);
    }
    try {
        parse_config("\nbogus = 1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 2);
        CHECK(e.key() == "bogus");
    }
    CHECK_THROWS_AS(parse_config("N = 64\nN = 32\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("snr_db = 12:2:0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("snr_db = 0:0:4\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("N = sixty\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("N =\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("just words\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("experiment = nosuch\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("L = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("ceo.quantile = 2\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/ceprecode.cfg"), IoError);
}

TEST_CASE("render and parse round-trip")
{
    std::vector<ExperimentSpec> specs{ExperimentSpec{}};
    ExperimentSpec a = tiny(ExperimentKind::timing);
    a.master_seed = 123456789012345ULL;
    a.power_budget = 0.1;
    a.snr_db = {-1.25, 0.1, 7.3};
    a.suite.rcg.epsilon = 0.003;
    a.suite.rcg.grad_tol = 1e-7;
    a.suite.rcg.continuation = true;
    a.suite.rcg.kernel = ProjectionKernel::columnwise;
    a.suite.gd.coordinate_sequential = true;
    a.output_path = "out dir/x";
    specs.push_back(a);
    specs.push_back(tiny(ExperimentKind::single_solve));
    specs.push_back(parse_config("experiment = ser_vs_users\nsolvers = ceo-ir\ncoherence = 5\nthreads = 4\n"));
    for (const auto& spec : specs) {
        CHECK(parse_config(render(spec)) == spec);
        CHECK(render(parse_config(render(spec))) == render(spec));
    }
}

TEST_CASE("single_solve on the scalar instance writes a trace ending at the grid optimum")
{
    const fs::path dir = scratch("single");
    ExperimentSpec spec = parse_config("experiment = single_solve\nN = 1\nM = 1\nsolvers = rcg-ci\nseed = 3\n");
    const RunSummary summary = run_experiment(spec, {dir, nullptr});
    const fs::path trace = dir / "trace_rcg-ci_N1_M1.csv";
    REQUIRE(fs::exists(trace));
    const auto lines = lines_of(slurp(trace));
    REQUIRE(lines.size() >= 3);
    CHECK(lines[0] == "# schema: objective_trace v1");
    CHECK(lines[1] == "iteration,exact,smoothed,grad_norm");
    const double final_exact = std::stod(cells(lines.back()).at(1));

    const ChannelMatrix h = generate_channel(1, 1, derive_seed(3, "single/N1/M1/channel"));
    const SymbolVector s = draw_symbols(1, 4, 1.0, derive_seed(3, "single/N1/M1/symbols"));
    const double grid = oracle::scalar_ci_grid_min(h.data()(0, 0), 1.0, s.phases()[0], s.beta());
    CHECK(final_exact == doctest::Approx(grid).epsilon(1e-3));

    const auto table = lines_of(slurp(dir / "single_solve.csv"));
    REQUIRE(table.size() == 3);
    CHECK(table[1] == "solver,N,M,iterations,converged,stalled,final_objective,ci_cost,ci_feasible,ir_objective,"
                      "max_ce_deviation,flops");
    CHECK(cells(table[2]).at(0) == "rcg-ci");
    CHECK(std::find(summary.files.begin(), summary.files.end(), trace) != summary.files.end());
}

TEST_CASE("every experiment kind is reproducible from its manifest")
{
    for (const auto kind : {ExperimentKind::ser_vs_snr, ExperimentKind::ser_vs_users, ExperimentKind::timing,
                            ExperimentKind::single_solve}) {
        const std::string name(to_string(kind));
        const fs::path first = scratch(name + "_a");
        const fs::path second = scratch(name + "_b");
        const ExperimentSpec spec = tiny(kind);
        const RunSummary a = run_experiment(spec, {first, nullptr});
        const ExperimentSpec again = load_config(first / "manifest.txt");
        CHECK(again == spec);
        const RunSummary b = run_experiment(again, {second, nullptr});
        REQUIRE(a.files.size() == b.files.size());
        for (std::size_t i = 0; i < a.files.size(); ++i) {
            const std::string file = a.files[i].filename().string();
            CHECK(b.files[i].filename().string() == file);
            if (file.find("wallclock") == std::string::npos) {
                INFO(name << ": " << file);
                CHECK(slurp(a.files[i]) == slurp(b.files[i]));
            }
        }
        const std::string main = slurp(first / ((kind == ExperimentKind::timing ? "timing" : name) + ".csv"));
        CHECK(main.rfind("# schema: ", 0) == 0);
        CHECK(main.find('\r') == std::string::npos);
    }
}

TEST_CASE("ser_vs_snr CSV columns and counts")
{
    const fs::path dir = scratch("ser_columns");
    ExperimentSpec spec = tiny(ExperimentKind::ser_vs_snr);
    spec.solvers = {SolverTag::rcg_ci, SolverTag::rcg_ir};
    spec.n_users = {2};
    run_experiment(spec, {dir, nullptr});
    const auto lines = lines_of(slurp(dir / "ser_vs_snr.csv"));
    REQUIRE(lines.size() == 2 + 4);
    CHECK(lines[0] == "# schema: ser_vs_snr v1");
    CHECK(lines[1] == "solver,N,M,snr_db,n_symbols,user_symbols,errors,ser,ci_feasible_fraction,mean_iters,"
                      "stalled_slots,degenerate_detections,max_ce_deviation");
    const auto row = cells(lines[2]);
    CHECK(row.at(0) == "rcg-ci");
    CHECK(row.at(3) == "0");
    CHECK(row.at(4) == "20");
    CHECK(row.at(5) == "40");
    CHECK(std::stod(row.at(7)) == doctest::Approx(std::stod(row.at(6)) / 40.0));
    const auto clock = lines_of(slurp(dir / "ser_vs_snr.wallclock.csv"));
    CHECK(clock.at(1) == "solver,N,M,snr_db,mean_time_s");
}

TEST_CASE("unwritable output is an I/O error")
{
    const fs::path dir = scratch("io");
    write(dir / "file", "x");
    ExperimentSpec spec = tiny(ExperimentKind::single_solve);
    CHECK_THROWS_AS(run_experiment(spec, {dir / "file" / "sub", nullptr}), IoError);
}

TEST_CASE("plot data")
{
    const fs::path dir = scratch("plot");
    ExperimentSpec spec = tiny(ExperimentKind::ser_vs_snr);
    spec.solvers = {SolverTag::rcg_ci, SolverTag::gd_ir, SolverTag::cvx_ci};
    spec.n_users = {2};
    run_experiment(spec, {dir, nullptr});
    const auto files = emit_plot_data(dir / "ser_vs_snr.csv", PlotKind::ser);
    REQUIRE(files.size() == 2);
    const std::string dat = slurp(files[0]);
    int blocks = 0;
    for (const auto& line : lines_of(dat)) {
        blocks += line.rfind("# ", 0) == 0 ? 1 : 0;
    }
    CHECK(blocks == 3);
    CHECK(dat.find("# RCG-CI") != std::string::npos);
    CHECK(dat.find("surrogate") != std::string::npos);
    const std::string gp = slurp(files[1]);
    CHECK(gp.find("set logscale y") != std::string::npos);
    CHECK(gp.find("ser_vs_snr.dat") != std::string::npos);

    const fs::path tdir = scratch("plot_time");
    ExperimentSpec timing = tiny(ExperimentKind::timing);
    timing.solvers = {SolverTag::rcg_ci, SolverTag::ceo_ci};
    run_experiment(timing, {tdir, nullptr});
    const auto tfiles = emit_plot_data(tdir / "timing.csv", PlotKind::time);
    const std::string tgp = slurp(tfiles[1]);
    CHECK(tgp.find("unset logscale y") != std::string::npos);
    CHECK(lines_of(slurp(tfiles[0])).size() == 2 * (1 + 2 + 2));

    write(dir / "empty.csv", "");
    CHECK_THROWS_AS(emit_plot_data(dir / "empty.csv", PlotKind::ser), SchemaError);
    write(dir / "wrong.csv", "a,b\n1,2\n");
    try {
        emit_plot_data(dir / "wrong.csv", PlotKind::ser);
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        const std::string what = e.what();
        CHECK(what.find("expected columns [solver, N, M, snr_db, ser]") != std::string::npos);
        CHECK(what.find("found [a, b]") != std::string::npos);
    }
    CHECK_THROWS_AS(emit_plot_data(dir / "missing.csv", PlotKind::ser), IoError);
    CHECK_THROWS_AS(parse_plot_kind("pie"), std::invalid_argument);
}

TEST_CASE("selftest passes")
{
    std::ostringstream out;
    CHECK(run_selftest(out) == kExitOk);
    CHECK(out.str().find("FAIL") == std::string::npos);
    CHECK(out.str().find("PASS") != std::string::npos);
}

TEST_CASE("command-line exit codes")
{
    const fs::path dir = scratch("exit");
    write(dir / "bad.cfg", "bogus = 1\n");
    write(dir / "good.cfg", "experiment = single_solve\nN = 4\nM = 2\nsolvers = rcg-ci\n");
    write(dir / "wrong.csv", "a,b\n1,2\n");
    CHECK(run_cli("selftest") == kExitOk);
    CHECK(run_cli("run " + (dir / "bad.cfg").string()) == kExitConfig);
    CHECK(run_cli("run " + (dir / "absent.cfg").string()) == kExitIo);
    CHECK(run_cli("run " + (dir / "good.cfg").string() + " --quiet --out " + (dir / "out").string()) == kExitOk);
    CHECK(fs::exists(dir / "out" / "single_solve.csv"));
    CHECK(run_cli("run " + (dir / "good.cfg").string() + " --quiet --out " + (dir / "bad.cfg" / "x").string()) ==
          kExitIo);
    CHECK(run_cli("plot " + (dir / "wrong.csv").string() + " --kind ser") == kExitConfig);
    CHECK(run_cli("plot " + (dir / "out" / "single_solve.csv").string() + " --kind pie") == kExitConfig);
    CHECK(run_cli("") == kExitConfig);

    // The seed flag wins over the environment, which wins over the config.
    CHECK(run_cli("run " + (dir / "good.cfg").string() + " --quiet --seed 5 --out " + (dir / "s5").string()) == 0);
    CHECK(run_cli("run " + (dir / "good.cfg").string() + " --quiet --out " + (dir / "s1").string()) == 0);
    const std::string env = "CEPRECODE_SEED=5 ";
    const std::string cmd = env + CEPRECODE_CLI_PATH + " run " + (dir / "good.cfg").string() + " --quiet --out " +
                            (dir / "env5").string() + " >/dev/null 2>&1";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(load_config(dir / "s5" / "manifest.txt").master_seed == 5);
    CHECK(load_config(dir / "env5" / "manifest.txt").master_seed == 5);
    CHECK(load_config(dir / "s1" / "manifest.txt").master_seed == 1);
    CHECK(slurp(dir / "s5" / "single_solve.csv") == slurp(dir / "env5" / "single_solve.csv"));
}
