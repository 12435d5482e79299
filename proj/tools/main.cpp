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

#include <exception>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace rankp;

namespace {

std::vector<Protocol> parse_protocols(const std::string &list) {
    std::vector<Protocol> out;
    std::istringstream is(list);
    std::string name;
    while (std::getline(is, name, ',')) {
        if (!name.empty()) {
            out.push_back(parse_protocol(name));
        }
    }
    return out;
}

struct MleFlags {
    double tol = MleOptions{}.tol;
    int max_iter = MleOptions{}.max_iter;

    void add(CLI::App &app) {
        app.add_option("--mle-tol", tol, "MLE stopping tolerance (trace-norm step)")
            ->check(CLI::PositiveNumber);
        app.add_option("--mle-max-iter", max_iter, "MLE iteration cap")->check(CLI::PositiveNumber);
    }
    [[nodiscard]] MleOptions options() const {
        MleOptions o;
        o.tol = tol;
        o.max_iter = max_iter;
        return o;
    }
};

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Monte-Carlo simulator for adaptive qubit tomography"};
    app.require_subcommand(1);

    // simulate
    auto *sim = app.add_subcommand("simulate", "run tomography campaigns on random or given states");
    std::string protocols = "rankp-nc";
    std::string states = "pure";
    std::string state_file;
    cli::SimulateOptions sopts;
    MleFlags sim_mle;
    double n_max = sopts.campaign.schedule.n_max;
    std::string sim_out;
    sim->add_option("--protocol", protocols,
                    "comma-separated list of random, eigen, rankp-nc, rankp-b, rankp-m")
        ->capture_default_str();
    sim->add_option("--states", states, "state ensemble: pure, bures or explicit")->capture_default_str();
    sim->add_option("--state-file", state_file,
                    "explicit state: D lines of 2D comma-separated reals (re, im pairs)")
        ->check(CLI::ExistingFile);
    sim->add_option("--runs", sopts.campaign.runs, "runs per protocol")->capture_default_str();
    sim->add_option("--n-max", n_max, "emitted copies per run")->capture_default_str();
    sim->add_option("--seed", sopts.campaign.seed, "master seed")->capture_default_str();
    sim->add_option("--out", sim_out, "output directory (default $RANKP_OUT_DIR or results)");
    sim->add_option("--growth", sopts.campaign.schedule.growth, "per-iteration budget growth")
        ->capture_default_str();
    sim->add_option("--initial-budget", sopts.campaign.schedule.initial_budget,
                    "expected emitted copies in iteration 0")
        ->capture_default_str();
    sim_mle.add(*sim);
    sim->add_option("--delta", sopts.campaign.plan.delta, "regularization before the transformation")
        ->capture_default_str();
    sim->add_flag("--random-v", sopts.campaign.plan.random_v,
                  "apply a fresh Haar-random unitary freedom each iteration");
    sim->add_option("--efficiency", sopts.campaign.source.intensity,
                    "source intensity I (emitted copies per exposition unit)")
        ->capture_default_str();
    sim->add_option("--detection-efficiency", sopts.campaign.source.efficiency,
                    "detector efficiency in (0, 1]")
        ->capture_default_str();
    bool eigen_basis_only = false;
    sim->add_flag("--eigen-basis-only", eigen_basis_only,
                  "Eigen measures only the estimator eigenbasis");
    sim->add_flag("--warm-start", sopts.campaign.warm_start, "start each MLE from the last estimate");
    sim->add_flag("--export-records", sopts.campaign.keep_records,
                  "write the raw count stream of every run");
    sim->add_option("--threads", sopts.campaign.threads, "worker threads (0 = all cores)")
        ->capture_default_str();
    sim->add_option("--points-per-decade", sopts.points_per_decade, "averaged curve grid density")
        ->capture_default_str();
    sim->add_flag("--quiet", sopts.quiet, "do not log individual runs");

    // analyze
    auto *ana = app.add_subcommand("analyze", "fit averaged curves and compare protocols");
    cli::AnalyzeOptions aopts;
    std::string fit_window, ratio_window, report;
    ana->add_option("inputs", aopts.inputs,
                    "[label=]path of a trace directory, trace file or curve file")
        ->required();
    ana->add_option("--fit-window", fit_window, "fit window N1:N2 (default 1e2:max N)");
    ana->add_option("--ratio-window", ratio_window, "ratio window N1:N2 (default: fit window)");
    ana->add_option("--compare", aopts.comparisons, "a/b: average accuracy ratio of a against b");
    ana->add_option("--bound", aopts.bound, "reference bound column: mixed or pure")
        ->capture_default_str();
    ana->add_option("--report", report, "report path (default <out dir>/report.txt)");
    ana->add_option("--points-per-decade", aopts.points_per_decade, "averaged curve grid density")
        ->capture_default_str();

    // replay
    auto *rep = app.add_subcommand("replay", "self-referenced convergence of recorded count data");
    cli::ReplayCliOptions ropts;
    MleFlags rep_mle;
    std::string rep_out, rep_window;
    double n0 = 0.0;
    rep->add_option("records", ropts.records, "record stream files")->required()->check(CLI::ExistingFile);
    rep->add_option("--n0", n0, "reference prefix size (default: whole stream)");
    rep->add_option("--clip", ropts.clip, "keep points with N <= clip * N0 (0 keeps all)")
        ->capture_default_str();
    rep->add_option("--points-per-decade", ropts.points_per_decade, "prefix grid density")
        ->capture_default_str();
    rep->add_option("--fit-window", rep_window, "fit window N1:N2 for the averaged curve");
    rep->add_option("--out", rep_out, "output directory (default $RANKP_OUT_DIR or results)");
    rep_mle.add(*rep);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            sopts.campaign.protocols = parse_protocols(protocols);
            sopts.campaign.ensemble = parse_ensemble(states);
            sopts.campaign.schedule.n_max = n_max;
            sopts.campaign.mle = sim_mle.options();
            sopts.campaign.plan.eigen_rotated_base = !eigen_basis_only;
            if (!state_file.empty()) {
                sopts.state_file = state_file;
            } else if (sopts.campaign.ensemble == StateEnsemble::Explicit) {
                throw std::invalid_argument("--states explicit requires --state-file");
            }
            sopts.out = sim_out.empty() ? cli::default_out_dir() : std::filesystem::path(sim_out);
            return cli::cmd_simulate(std::move(sopts), std::cout);
        }
        if (ana->parsed()) {
            if (!fit_window.empty()) {
                aopts.fit_window = cli::parse_window(fit_window);
            }
            if (!ratio_window.empty()) {
                aopts.ratio_window = cli::parse_window(ratio_window);
            }
            aopts.report = report.empty() ? cli::default_out_dir() / "report.txt"
                                          : std::filesystem::path(report);
            return cli::cmd_analyze(aopts, std::cout);
        }
        if (rep->parsed()) {
            if (rep->count("--n0") > 0) {
                ropts.n0 = n0;
            }
            if (!rep_window.empty()) {
                ropts.fit_window = cli::parse_window(rep_window);
            }
            ropts.mle = rep_mle.options();
            ropts.out = rep_out.empty() ? cli::default_out_dir() : std::filesystem::path(rep_out);
            return cli::cmd_replay(ropts, std::cout);
        }
    } catch (const std::exception &e) {
        std::cerr << "rankp: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
