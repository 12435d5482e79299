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

#include <algorithm>
#include <cmath>

#include "rankp/simulator.hpp"
#include "stats.hpp"

using namespace rankp;

namespace {

const std::vector<Complex> kH{1.0, 0.0};
const std::vector<Complex> kV{0.0, 1.0};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

bool same_trace(const TomographyTrace &a, const TomographyTrace &b) {
    if (a.entries.size() != b.entries.size()) {
        return false;
    }
    for (std::size_t k = 0; k < a.entries.size(); ++k) {
        const auto &x = a.entries[k];
        const auto &y = b.entries[k];
        if (x.n_emit != y.n_emit || x.n_det != y.n_det || x.loglik != y.loglik || x.d_bures_sq != y.d_bures_sq ||
            x.estimate.matrix().max_abs_diff(y.estimate.matrix()) != 0.0) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST(SampleCounts, ZeroProbabilityGivesZero) {
    Rng rng = make_rng(81);
    const TimedMeasurement m{PovmElement::projector(kV), 1.0};
    for (int k = 0; k < 100; ++k) {
        ASSERT_EQ(sample_counts(m, DensityMatrix::pure(kH), {1e6, 1.0}, 1.0, rng), 0);
    }
}

TEST(SampleCounts, PoissonMoments) {
    Rng rng = make_rng(82);
    // I p t = 200 * 0.5 * 1.0 = 100
    const TimedMeasurement m{PovmElement::projector(kH), 1.0};
    std::vector<double> draws;
    for (int k = 0; k < 10000; ++k) {
        draws.push_back(static_cast<double>(sample_counts(m, maximally_mixed(2), {200.0, 1.0}, 1.0, rng)));
    }
    const double mean = rankp::testing::mean(draws);
    double var = 0.0;
    for (double x : draws) {
        var += (x - mean) * (x - mean);
    }
    var /= static_cast<double>(draws.size() - 1);
    EXPECT_GE(mean, 97.0);
    EXPECT_LE(mean, 103.0);
    EXPECT_GE(var, 90.0);
    EXPECT_LE(var, 110.0);
}

TEST(SampleCounts, GroupSumMatchesExposure) {
    Rng rng = make_rng(83);
    MeasurementPlan plan;
    plan.measurements = {{PovmElement::projector(kH), 1.0}, {PovmElement::projector(kV), 1.0}};
    plan.groups = {{0, 1}};
    std::vector<double> sums;
    for (int k = 0; k < 2000; ++k) {
        const auto n = sample_group_counts(plan, 0, maximally_mixed(2), {1000.0, 1.0}, 1.0, rng);
        ASSERT_EQ(n.size(), 2u);
        sums.push_back(static_cast<double>(n[0] + n[1]));
    }
    const double sigma = std::sqrt(1000.0 / 2000.0);
    EXPECT_NEAR(rankp::testing::mean(sums), 1000.0, 3.0 * sigma);
}

TEST(EmittedCopies, Examples) {
    EXPECT_DOUBLE_EQ(emitted_copies(0.0, {100.0, 1.0}), 0.0);
    const auto mub = base_plan(mub_qubit());
    EXPECT_DOUBLE_EQ(emitted_copies(mub.exposure_weight() * 1.0, {100.0, 1.0}), 300.0);

    Rng rng = make_rng(84);
    const auto nc = next_plan(Protocol::RankPNC, random_pure_haar(2, rng), mub_qubit(), rng);
    double total = 0.0;
    for (const auto &m : nc.measurements) {
        total += m.time_weight;
    }
    EXPECT_NEAR(emitted_copies(nc.exposure_weight(), {100.0, 1.0}), 100.0 * total, 1e-9 * total);
}

TEST(SourceModelValidation, Rejects) {
    EXPECT_THROW((SourceModel{0.0, 1.0}.validate()), std::invalid_argument);
    EXPECT_THROW((SourceModel{1.0, 1.5}.validate()), std::invalid_argument);
    EXPECT_THROW((Schedule{100.0, 0.9, 1e6}.validate()), std::invalid_argument);
    EXPECT_THROW((Schedule{100.0, 1.25, 50.0}.validate()), std::invalid_argument);
    EXPECT_NO_THROW((Schedule{100.0, 1.0, 1e6}.validate()));
}

TEST(RunTomography, DeterministicForFixedSeed) {
    Rng rng = make_rng(85);
    const auto truth = random_pure_haar(2, rng);
    for (auto p : {Protocol::Random, Protocol::Eigen, Protocol::RankPNC, Protocol::RankPB, Protocol::RankPM}) {
        const auto a = run_tomography(p, truth, {}, {100.0, 1.25, 1e5}, 99);
        const auto b = run_tomography(p, truth, {}, {100.0, 1.25, 1e5}, 99);
        EXPECT_TRUE(same_trace(a, b)) << to_string(p);
        const auto c = run_tomography(p, truth, {}, {100.0, 1.25, 1e5}, 100);
        EXPECT_FALSE(same_trace(a, c)) << to_string(p);
    }
}

TEST(RunTomography, TraceInvariants) {
    Rng rng = make_rng(86);
    const auto truth = random_bures_mixed(2, rng);
    for (auto p : {Protocol::Random, Protocol::Eigen, Protocol::RankPNC, Protocol::RankPB, Protocol::RankPM}) {
        const auto t = run_tomography(p, truth, {}, {100.0, 1.25, 1e5}, 7);
        ASSERT_FALSE(t.entries.empty());
        EXPECT_EQ(t.protocol, to_string(p));
        EXPECT_NEAR(t.entries.front().n_emit, 100.0, 1e-9);
        EXPECT_NEAR(t.entries.back().n_emit, 1e5, 1e-6);
        for (std::size_t k = 1; k < t.entries.size(); ++k) {
            ASSERT_GT(t.entries[k].n_emit, t.entries[k - 1].n_emit);
            ASSERT_GE(t.entries[k].n_det, t.entries[k - 1].n_det);
            ASSERT_LE(t.entries[k].n_emit / t.entries[k - 1].n_emit, 2.25 + 1e-9);
        }
        const std::size_t m = t.entries.size() - 2;
        EXPECT_NEAR(t.entries[m].n_emit / t.entries[m - 1].n_emit, 1.25, 0.01);
        for (const auto &e : t.entries) {
            ASSERT_TRUE(e.d_bures_sq.has_value());
            ASSERT_NEAR(*e.d_bures_sq, bures_sq(e.estimate, truth), 1e-12);
        }
    }
}

TEST(RunTomography, CompleteProtocolsDetectEveryCopy) {
    Rng rng = make_rng(87);
    for (auto p : {Protocol::Random, Protocol::Eigen, Protocol::RankPB}) {
        double emit = 0.0, det = 0.0;
        for (int r = 0; r < 5; ++r) {
            const auto t = run_tomography(p, random_pure_haar(2, rng), {}, {100.0, 1.25, 1e5}, 200 + r);
            emit += t.entries.back().n_emit;
            det += static_cast<double>(t.entries.back().n_det);
        }
        EXPECT_LE(std::abs(det - emit), 5.0 * std::sqrt(emit)) << to_string(p);
    }
}

TEST(RunTomography, RankPNCLosesOutcomesOnPureStates) {
    Rng rng = make_rng(88);
    for (int r = 0; r < 5; ++r) {
        const auto t = run_tomography(Protocol::RankPNC, random_pure_haar(2, rng), {}, {100.0, 1.25, 1e5}, 300 + r);
        const auto &last = t.entries.back();
        EXPECT_LT(static_cast<double>(last.n_det) / last.n_emit, 0.9);
    }
}

TEST(RunTomography, DetectionEfficiencyThinsCounts) {
    Rng rng = make_rng(89);
    const auto truth = random_pure_haar(2, rng);
    const auto t = run_tomography(Protocol::Eigen, truth, {1000.0, 0.5}, {100.0, 1.25, 1e5}, 11);
    const double emit = t.entries.back().n_emit;
    EXPECT_NEAR(static_cast<double>(t.entries.back().n_det), 0.5 * emit, 5.0 * std::sqrt(emit));
}

TEST(RunTomography, GroupingConsumesOneExposurePerGroup) {
    Rng rng = make_rng(90);
    const auto truth = random_bures_mixed(2, rng);
    RunOptions opts;
    opts.keep_records = true;
    const std::pair<Protocol, std::size_t> expected[] = {
        {Protocol::Random, 1}, {Protocol::Eigen, 3}, {Protocol::RankPNC, 6}, {Protocol::RankPB, 6}};
    for (const auto &[p, groups] : expected) {
        const auto t = run_tomography(p, truth, {}, {100.0, 1.25, 1e4}, 13, opts);
        ASSERT_TRUE(t.records.has_value());
        // Group ids of the second iteration onward.
        std::int64_t first = -1, last = -1;
        std::size_t rows = 0;
        for (const auto &rec : t.records->records) {
            if (rec.group_id < 3) {
                continue; // iteration 0: three MUB bases
            }
            if (first < 0) {
                first = rec.group_id;
            }
            last = rec.group_id;
            ++rows;
        }
        const auto iterations = t.entries.size() - 1;
        EXPECT_EQ(static_cast<std::size_t>(last - first + 1), groups * iterations) << to_string(p);
        EXPECT_GE(rows, groups * iterations);
    }
}

TEST(RunTomography, MaximallyMixedTruthConvergesNearTheBound) {
    for (auto p : {Protocol::Eigen, Protocol::RankPNC}) {
        int within = 0;
        for (int r = 0; r < 50; ++r) {
            const auto t = run_tomography(p, maximally_mixed(2), {}, {}, 1000 + static_cast<std::uint64_t>(r));
            within += *t.entries.back().d_bures_sq <= 10.0 * 9.0 / (4.0 * 1e6) ? 1 : 0;
        }
        EXPECT_GE(within, 48) << to_string(p);
    }
}

TEST(RunTomography, EigenConsistentAtLargeBudget) {
    const auto truth = DensityMatrix::from_matrix(CMatrix::diagonal(std::vector<double>{0.9, 0.1}));
    const auto t = run_tomography(Protocol::Eigen, truth, {}, {100.0, 1.25, 1e7}, 5);
    EXPECT_GE(fidelity(t.entries.back().estimate, truth), 0.9999);
}

TEST(ReplayCounts, SelfReferencedCurve) {
    Rng rng = make_rng(91);
    RunOptions opts;
    opts.keep_records = true;
    std::vector<double> first_decade, last_decade;
    for (int r = 0; r < 10; ++r) {
        const auto t =
            run_tomography(Protocol::RankPNC, random_pure_haar(2, rng), {}, {100.0, 1.25, 1e5}, 400 + r, opts);
        const auto replay = replay_counts(*t.records);
        ASSERT_FALSE(replay.entries.empty());
        const auto &last = replay.entries.back();
        EXPECT_DOUBLE_EQ(*last.d_bures_sq, 0.0);
        EXPECT_NEAR(last.n_emit, t.entries.back().n_emit, 1e-6 * last.n_emit);
        EXPECT_LE(last.estimate.matrix().max_abs_diff(t.entries.back().estimate.matrix()), 1e-6);
        for (std::size_t k = 1; k < replay.entries.size(); ++k) {
            ASSERT_GE(replay.entries[k].n_emit, replay.entries[k - 1].n_emit);
        }
        for (const auto &e : replay.entries) {
            if (e.n_emit <= 1e3) {
                first_decade.push_back(*e.d_bures_sq);
            } else if (e.n_emit >= 1e4 && e.n_emit < 0.25 * last.n_emit) {
                last_decade.push_back(*e.d_bures_sq);
            }
        }
    }
    ASSERT_FALSE(first_decade.empty());
    ASSERT_FALSE(last_decade.empty());
    EXPECT_LT(median(last_decade), median(first_decade));
}

TEST(ReplayCounts, ReferencePrefix) {
    RunOptions opts;
    opts.keep_records = true;
    const auto t = run_tomography(Protocol::Eigen, maximally_mixed(2), {}, {100.0, 1.25, 1e5}, 17, opts);
    ReplayOptions ro;
    ro.n0 = 2e4;
    const auto replay = replay_counts(*t.records, ro);
    bool found_reference = false;
    for (const auto &e : replay.entries) {
        ASSERT_LE(e.n_emit, 2e4 * (1.0 + 1e-9));
        if (std::abs(e.n_emit - replay.entries.back().n_emit) == 0.0) {
            found_reference = true;
            EXPECT_DOUBLE_EQ(*e.d_bures_sq, 0.0);
        }
    }
    EXPECT_TRUE(found_reference);
}
