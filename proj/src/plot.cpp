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

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace cep {

namespace fs = std::filesystem;

namespace {

struct CsvData {
    std::string schema; // e.g. "ser_vs_snr"; empty when the file has no schema line
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::ptrdiff_t column(std::string_view name) const
    {
        const auto it = std::find(columns.begin(), columns.end(), name);
        return it == columns.end() ? -1 : it - columns.begin();
    }
};

std::vector<std::string> split_row(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

CsvData read_csv(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read '" + path.string() + "'");
    }
    CsvData data;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            constexpr std::string_view tag = "# schema: ";
            if (line.rfind(tag, 0) == 0) {
                const std::string rest = line.substr(tag.size());
                data.schema = rest.substr(0, rest.find(' '));
            }
            continue;
        }
        if (data.columns.empty()) {
            data.columns = split_row(line);
        } else {
            data.rows.push_back(split_row(line));
        }
    }
    return data;
}

std::string join(const std::vector<std::string>& items)
{
    std::string out;
    for (const auto& s : items) {
        out += (out.empty() ? "" : ", ") + s;
    }
    return out.empty() ? "(none)" : out;
}

void require_columns(const CsvData& data, const std::vector<std::string>& expected, const fs::path& path)
{
    std::vector<std::string> missing;
    for (const auto& c : expected) {
        if (data.column(c) < 0) {
            missing.push_back(c);
        }
    }
    if (data.columns.empty() || !missing.empty()) {
        throw SchemaError(fmt::format("{}: expected columns [{}], found [{}]", path.string(), join(expected),
                                      join(data.columns)));
    }
}

std::string solver_title(const std::string& tag)
{
    try {
        return std::string(display_name(parse_solver_tag(tag)));
    } catch (const std::invalid_argument&) {
        return tag;
    }
}

struct Block {
    std::string title;
    std::vector<std::pair<std::string, std::string>> points;
};

// Groups rows by solver and by every listed fixed column that takes more than one value.
std::vector<Block> make_blocks(const CsvData& data, const std::string& x_col, const std::string& y_col,
                               const std::vector<std::string>& fixed)
{
    const auto solver_i = data.column("solver");
    const auto x_i = data.column(x_col);
    const auto y_i = data.column(y_col);
    std::vector<std::string> varying;
    for (const auto& f : fixed) {
        const auto i = data.column(f);
        if (i < 0) {
            continue;
        }
        std::vector<std::string> values;
        for (const auto& r : data.rows) {
            values.push_back(r.at(static_cast<std::size_t>(i)));
        }
        std::sort(values.begin(), values.end());
        if (std::unique(values.begin(), values.end()) - values.begin() > 1) {
            varying.push_back(f);
        }
    }

    std::vector<Block> blocks;
    std::map<std::string, std::size_t> index;
    for (const auto& r : data.rows) {
        if (r.size() != data.columns.size()) {
            throw SchemaError(fmt::format("row has {} cells, header has {}", r.size(), data.columns.size()));
        }
        std::string title = solver_title(r[static_cast<std::size_t>(solver_i)]);
        for (const auto& f : varying) {
            title += fmt::format(" {}={}", f, r[static_cast<std::size_t>(data.column(f))]);
        }
        auto [it, inserted] = index.emplace(title, blocks.size());
        if (inserted) {
            blocks.push_back({title, {}});
        }
        blocks[it->second].points.emplace_back(r[static_cast<std::size_t>(x_i)], r[static_cast<std::size_t>(y_i)]);
    }
    return blocks;
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text)) {
        throw IoError("cannot write '" + path.string() + "'");
    }
}

} // namespace

PlotKind parse_plot_kind(std::string_view text)
{
    if (text == "ser") {
        return PlotKind::ser;
    }
    if (text == "time") {
        return PlotKind::time;
    }
    throw std::invalid_argument("unknown plot kind '" + std::string(text) + "' (expected ser or time)");
}

std::vector<fs::path> emit_plot_data(const fs::path& csv_path, PlotKind kind)
{
    CsvData data = read_csv(csv_path);
    std::string x_col;
    std::string y_col;
    std::string x_label;
    std::string y_label;
    std::vector<std::string> fixed;
    bool log_y = false;

    if (kind == PlotKind::ser) {
        require_columns(data, {"solver", "N", "M", "snr_db", "ser"}, csv_path);
        const bool by_users = data.schema == "ser_vs_users";
        x_col = by_users ? "M" : "snr_db";
        x_label = by_users ? "Number of users M" : "SNR (dB)";
        y_col = "ser";
        y_label = "SER";
        fixed = by_users ? std::vector<std::string>{"N", "snr_db"} : std::vector<std::string>{"N", "M"};
        log_y = true;
    } else {
        if (data.column("mean_time_s") < 0) {
            // The main timing CSV keeps wall-clock data in its sidecar.
            fs::path sidecar = csv_path;
            sidecar.replace_extension(".wallclock.csv");
            if (!data.columns.empty() && fs::exists(sidecar)) {
                data = read_csv(sidecar);
            }
        }
        require_columns(data, {"solver", "N", "M", "mean_time_s"}, csv_path);
        x_col = "M";
        x_label = "Number of users M";
        y_col = "mean_time_s";
        y_label = "Mean execution time (s)";
        fixed = {"N"};
    }

    const std::vector<Block> blocks = make_blocks(data, x_col, y_col, fixed);
    std::string dat;
    for (const auto& b : blocks) {
        dat += "# " + b.title + "\n";
        for (const auto& [x, y] : b.points) {
            dat += x + " " + y + "\n";
        }
        dat += "\n\n";
    }

    fs::path stem = csv_path;
    stem.replace_extension();
    const fs::path dat_path = fs::path(stem.string() + ".dat");
    const fs::path gp_path = fs::path(stem.string() + ".gp");
    const std::string dat_name = dat_path.filename().string();

    std::string gp = "set terminal pngcairo size 900,600\n";
    gp += fmt::format("set output '{}.png'\n", stem.filename().string());
    gp += fmt::format("set xlabel '{}'\nset ylabel '{}'\n", x_label, y_label);
    gp += log_y ? "set logscale y\nset format y '10^{%L}'\n" : "unset logscale y\n";
    gp += "set grid\nset key outside right\n";
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        gp += fmt::format("{}'{}' index {} using 1:2 with linespoints title '{}'{}\n", i == 0 ? "plot " : "     ",
                          i == 0 ? dat_name : "", i, blocks[i].title, i + 1 < blocks.size() ? ", \\" : "");
    }
    if (blocks.empty()) {
        throw SchemaError(csv_path.string() + ": no data rows");
    }

    write_file(dat_path, dat);
    write_file(gp_path, gp);
    return {dat_path, gp_path};
}

} // namespace cep
