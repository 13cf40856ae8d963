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

// ceprecode: experiment runner.
//
//   ceprecode run <config> [--out DIR] [--seed S] [--threads T] [--quiet]
//   ceprecode plot <csv> --kind ser|time
//   ceprecode selftest
//
// CEPRECODE_SEED overrides the config seed; --seed overrides both.

#include "ceprecode/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <iostream>

namespace {

std::optional<std::uint64_t> seed_from_env()
{
    const char* text = std::getenv("CEPRECODE_SEED");
    if (text == nullptr || *text == '\0') {
        return std::nullopt;
    }
    const std::string_view s(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw cep::ConfigError("CEPRECODE_SEED is not an unsigned integer: '" + std::string(s) + "'", 0, "seed");
    }
    return v;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Constant-envelope precoding experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    bool quiet = false;
    auto* run = app.add_subcommand("run", "Run the experiment described by a config file or manifest");
    run->add_option("config", config_path, "Config file (key = value lines)")->required();
    run->add_option("--out", out_dir, "Output directory (overrides the config 'output' key)");
    run->add_option("--seed", seed, "Master seed (overrides the config and CEPRECODE_SEED)");
    run->add_option("--threads", threads, "Worker threads for Monte-Carlo slots")->check(CLI::PositiveNumber);
    run->add_flag("--quiet", quiet, "No progress output");

    std::string csv_path;
    std::string kind = "ser";
    auto* plot = app.add_subcommand("plot", "Write gnuplot data and script for a result CSV");
    plot->add_option("csv", csv_path, "Result CSV")->required();
    plot->add_option("--kind", kind, "Plot kind")->check(CLI::IsMember({"ser", "time"}));

    auto* selftest = app.add_subcommand("selftest", "Run the invariant self-checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cep::kExitOk : cep::kExitConfig;
    }

    try {
        if (run->parsed()) {
            cep::ExperimentSpec spec = cep::load_config(config_path);
            if (const auto env = seed_from_env()) {
                spec.master_seed = *env;
            }
            if (seed) {
                spec.master_seed = *seed;
            }
            if (threads) {
                spec.threads = *threads;
            }
            cep::RunOptions options;
            if (!out_dir.empty()) {
                options.out_dir = out_dir;
            }
            options.log = quiet ? nullptr : &std::cerr;
            const cep::RunSummary summary = cep::run_experiment(spec, options);
            if (!quiet) {
                for (const auto& f : summary.files) {
                    std::cerr << "wrote " << f.string() << '\n';
                }
            }
            return cep::kExitOk;
        }
        if (plot->parsed()) {
            for (const auto& f : cep::emit_plot_data(csv_path, cep::parse_plot_kind(kind))) {
                std::cout << f.string() << '\n';
            }
            return cep::kExitOk;
        }
        if (selftest->parsed()) {
            return cep::run_selftest(std::cout);
        }
    } catch (const cep::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return cep::kExitConfig;
    } catch (const cep::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return cep::kExitConfig;
    } catch (const cep::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return cep::kExitIo;
    } catch (const cep::NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return cep::kExitNumerical;
    } catch (const cep::DegenerateRetraction& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return cep::kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return cep::kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cep::kExitNumerical;
    }
    return cep::kExitOk;
}
