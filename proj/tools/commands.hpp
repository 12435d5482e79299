// Copyright 2026 The rankp Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rankp/campaign.hpp"

namespace rankp::cli {

/// Environment variable holding the default output directory.
inline constexpr const char *kOutDirEnv = "RANKP_OUT_DIR";

std::filesystem::path default_out_dir();

/// "N1:N2" with reals such as 1e2:1e6.
std::pair<double, double> parse_window(const std::string &text);

struct SimulateOptions {
    CampaignConfig campaign;
    std::optional<std::filesystem::path> state_file; ///< explicit ensemble
    std::filesystem::path out;
    double points_per_decade = 10.0;
    bool quiet = false;
};

/// <out>/<protocol>/run_NNNN.csv for every run (plus run_NNNN.records with
/// keep_records) and <out>/<protocol>.curve.txt per protocol.
int cmd_simulate(SimulateOptions opts, std::ostream &log);

struct AnalyzeOptions {
    /// Each input is [label=]path; a path is a trace directory, a single
    /// trace file or a curve file.
    std::vector<std::string> inputs;
    std::optional<std::pair<double, double>> fit_window; ///< default [1e2, max N]
    std::optional<std::pair<double, double>> ratio_window; ///< default: the fit window
    /// "a/b" requests R-bar of label a against label b.
    std::vector<std::string> comparisons;
    std::string bound = "mixed";
    std::filesystem::path report;
    double points_per_decade = 10.0;
};

int cmd_analyze(const AnalyzeOptions &opts, std::ostream &log);

struct ReplayCliOptions {
    std::vector<std::filesystem::path> records;
    std::optional<double> n0;
    double clip = 0.25; ///< keep points with N <= clip * N0; 0 keeps all
    double points_per_decade = 10.0;
    MleOptions mle;
    std::optional<std::pair<double, double>> fit_window;
    std::filesystem::path out;
};

/// One replay trace per records file in <out>/replay_NNNN.csv, and with two
/// or more inputs an averaged curve and fit in <out>/replay.report.txt.
int cmd_replay(const ReplayCliOptions &opts, std::ostream &log);

/// Parses a state file: D lines of 2D comma-separated reals (re, im pairs).
DensityMatrix read_state_file(const std::filesystem::path &path);

} // namespace rankp::cli
