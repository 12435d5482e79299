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

#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "commands.hpp"
#include "rankp/io.hpp"

using namespace rankp;
using namespace rankp::cli;
namespace fs = std::filesystem;

namespace {

class TempDir {
  public:
    TempDir() {
        path_ = fs::temp_directory_path() / ("rankp_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    [[nodiscard]] const fs::path &path() const { return path_; }

  private:
    fs::path path_;
};

SimulateOptions small_simulation(const fs::path &out) {
    SimulateOptions s;
    s.campaign.protocols = {Protocol::Eigen, Protocol::RankPNC};
    s.campaign.ensemble = StateEnsemble::PureHaar;
    s.campaign.runs = 3;
    s.campaign.seed = 5;
    s.campaign.schedule = {100.0, 1.25, 2e4};
    s.out = out;
    s.quiet = true;
    return s;
}

} // namespace

TEST(ParseWindow, Forms) {
    EXPECT_EQ(parse_window("1e3:1e6"), std::make_pair(1e3, 1e6));
    EXPECT_EQ(parse_window("100:2000"), std::make_pair(100.0, 2000.0));
    EXPECT_THROW((void)parse_window("1e6:1e3"), std::invalid_argument);
    EXPECT_THROW((void)parse_window("1e3"), std::invalid_argument);
    EXPECT_THROW((void)parse_window("a:b"), std::invalid_argument);
    EXPECT_THROW((void)parse_window("0:10"), std::invalid_argument);
}

TEST(DefaultOutDir, ReadsEnvironment) {
    ::setenv(kOutDirEnv, "/tmp/somewhere", 1);
    EXPECT_EQ(default_out_dir(), fs::path("/tmp/somewhere"));
    ::unsetenv(kOutDirEnv);
    EXPECT_EQ(default_out_dir(), fs::path("results"));
}

TEST(StateFile, ParsesRowsOfComplexEntries) {
    TempDir tmp;
    write_file(tmp.path() / "s.txt", "# diag state\n0.9 0 0 0\n0 0 0.1 0\n");
    const auto rho = read_state_file(tmp.path() / "s.txt");
    EXPECT_NEAR(rho.matrix()(0, 0).real(), 0.9, 1e-15);
    write_file(tmp.path() / "bad.txt", "0.9 0 0\n0 0 0.1 0\n");
    EXPECT_THROW((void)read_state_file(tmp.path() / "bad.txt"), FormatError);
    write_file(tmp.path() / "neg.txt", "1.5 0 0 0\n0 0 -0.5 0\n");
    EXPECT_ANY_THROW((void)read_state_file(tmp.path() / "neg.txt"));
}

TEST(Simulate, WritesTracesAndCurves) {
    TempDir tmp;
    std::ostringstream log;
    ASSERT_EQ(cmd_simulate(small_simulation(tmp.path()), log), 0);
    for (const char *p : {"eigen", "rankp-nc"}) {
        for (int r = 0; r < 3; ++r) {
            char name[32];
            std::snprintf(name, sizeof name, "run_%04d.csv", r);
            const auto path = tmp.path() / p / name;
            ASSERT_TRUE(fs::exists(path)) << path;
            std::istringstream is(read_file(path));
            const auto trace = read_trace(is);
            EXPECT_EQ(trace.protocol, p);
            EXPECT_EQ(trace.run_id, r);
        }
        const auto curve_path = tmp.path() / (std::string(p) + ".curve.txt");
        ASSERT_TRUE(fs::exists(curve_path));
        std::istringstream is(read_file(curve_path));
        EXPECT_EQ(read_curve(is).curve.runs, 3);
    }
    EXPECT_FALSE(fs::exists(tmp.path() / "eigen" / "run_0000.records"));
}

TEST(Simulate, ByteIdenticalOnRepeat) {
    TempDir a, b;
    std::ostringstream log;
    auto opts = small_simulation(a.path());
    opts.campaign.threads = 2;
    ASSERT_EQ(cmd_simulate(opts, log), 0);
    opts.out = b.path();
    opts.campaign.threads = 1;
    ASSERT_EQ(cmd_simulate(opts, log), 0);
    for (const auto &entry : fs::recursive_directory_iterator(a.path())) {
        if (!entry.is_regular_file()) {
            continue;
        }
        const auto rel = fs::relative(entry.path(), a.path());
        ASSERT_TRUE(fs::exists(b.path() / rel)) << rel;
        EXPECT_EQ(read_file(entry.path()), read_file(b.path() / rel)) << rel;
    }
}

TEST(Simulate, RejectsDuplicateProtocols) {
    TempDir tmp;
    auto opts = small_simulation(tmp.path());
    opts.campaign.protocols = {Protocol::Eigen, Protocol::Eigen};
    std::ostringstream log;
    EXPECT_THROW((void)cmd_simulate(opts, log), std::invalid_argument);
}

TEST(Analyze, FitsAndRatiosFromDirectoriesAndCurves) {
    TempDir tmp;
    std::ostringstream log;
    ASSERT_EQ(cmd_simulate(small_simulation(tmp.path()), log), 0);

    AnalyzeOptions a;
    a.inputs = {"eig=" + (tmp.path() / "eigen").string(), (tmp.path() / "rankp-nc.curve.txt").string()};
    a.comparisons = {"rankp-nc/eig"};
    a.fit_window = std::make_pair(1e2, 1e4);
    a.bound = "pure";
    a.report = tmp.path() / "report.txt";
    ASSERT_EQ(cmd_analyze(a, log), 0);

    std::istringstream is(read_file(a.report));
    const auto report = read_report(is);
    ASSERT_EQ(report.fits.size(), 2u);
    EXPECT_EQ(report.fits[0].label, "eig");
    EXPECT_EQ(report.fits[1].label, "rankp-nc");
    ASSERT_EQ(report.ratios.size(), 1u);
    const double expected = efficiency_ratio(report.fits[0].fit, report.fits[1].fit, 1e2, 1e4);
    EXPECT_NEAR(report.ratios[0].value, expected, 1e-12 * expected);
    EXPECT_EQ(report.curves[0].bound, BoundKind::PureQubit);

    a.comparisons = {"rankp-nc/nothing"};
    EXPECT_THROW((void)cmd_analyze(a, log), std::invalid_argument);
    a.comparisons.clear();
    a.bound = "weird";
    EXPECT_THROW((void)cmd_analyze(a, log), std::invalid_argument);
}

TEST(Replay, ClipsBeforeTheReferencePoint) {
    TempDir tmp;
    auto sim = small_simulation(tmp.path() / "sim");
    sim.campaign.protocols = {Protocol::RankPNC};
    sim.campaign.keep_records = true;
    sim.campaign.schedule.n_max = 1e5;
    std::ostringstream log;
    ASSERT_EQ(cmd_simulate(sim, log), 0);

    ReplayCliOptions r;
    for (int k = 0; k < 3; ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "run_%04d.records", k);
        r.records.push_back(tmp.path() / "sim" / "rankp-nc" / name);
    }
    r.out = tmp.path() / "replay";
    ASSERT_EQ(cmd_replay(r, log), 0);
    for (int k = 0; k < 3; ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "replay_%04d.csv", k);
        std::istringstream is(read_file(r.out / name));
        const auto trace = read_trace(is);
        ASSERT_FALSE(trace.entries.empty());
        for (const auto &e : trace.entries) {
            EXPECT_LE(e.n_emit, 0.25 * 1e5 * (1.0 + 1e-9));
            EXPECT_GT(*e.d_bures_sq, 0.0);
        }
    }
    EXPECT_TRUE(fs::exists(r.out / "replay.report.txt"));

    r.clip = 0.0;
    r.records.resize(1);
    ASSERT_EQ(cmd_replay(r, log), 0);
    std::istringstream is(read_file(r.out / "replay_0000.csv"));
    EXPECT_EQ(*read_trace(is).entries.back().d_bures_sq, 0.0);

    r.clip = 1.5;
    EXPECT_THROW((void)cmd_replay(r, log), std::invalid_argument);
}
