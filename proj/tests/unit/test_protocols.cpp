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

#include <cmath>
#include <numeric>

#include "rankp/protocols.hpp"
#include "rankp/simulator.hpp"

using namespace rankp;

namespace {

const std::vector<Complex> kH{1.0, 0.0};
const std::vector<Complex> kV{0.0, 1.0};

DensityMatrix diag_state(double a, double b) {
    return DensityMatrix::from_matrix(CMatrix::diagonal(std::vector<double>{a, b}));
}

CMatrix timed_sum(const MeasurementPlan &plan, const std::vector<std::size_t> &indices) {
    CMatrix sum(plan.measurements.front().projector.dim());
    for (auto i : indices) {
        sum += plan.measurements[i].time_weight * plan.measurements[i].projector.matrix();
    }
    return sum;
}

std::vector<std::size_t> all_indices(const MeasurementPlan &plan) {
    std::vector<std::size_t> idx(plan.measurements.size());
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
}

double cosine(const std::array<double, 3> &a, const std::array<double, 3> &b) {
    const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    const double na = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    const double nb = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
    return dot / (na * nb);
}

} // namespace

TEST(ProtocolNames, RoundTrip) {
    for (auto p : {Protocol::Random, Protocol::Eigen, Protocol::RankPNC, Protocol::RankPB, Protocol::RankPM}) {
        EXPECT_EQ(parse_protocol(to_string(p)), p);
    }
    EXPECT_THROW((void)parse_protocol("rankp"), std::invalid_argument);
    EXPECT_TRUE(is_rank_preserving(Protocol::RankPM));
    EXPECT_FALSE(is_rank_preserving(Protocol::Eigen));
}

TEST(RankPreservingMap, MaximallyMixedGivesIdentity) {
    const auto op = rank_preserving_map(maximally_mixed(2), 1e-12);
    EXPECT_LE(op.lmap.max_abs_diff(CMatrix::identity(2)), 1e-12);
}

TEST(RankPreservingMap, DiagonalEstimator) {
    const auto rho = diag_state(0.9, 0.1);
    const auto op = rank_preserving_map(rho, 1e-12);
    const CMatrix expected = CMatrix::diagonal(std::vector<double>{1.0 / std::sqrt(1.8), 1.0 / std::sqrt(0.2)});
    EXPECT_LE(op.lmap.max_abs_diff(expected), 1e-9);
    EXPECT_LE((op.lmap * rho.matrix() * op.lmap.adjoint()).max_abs_diff(maximally_mixed(2).matrix()), 1e-9);
}

TEST(RankPreservingMap, RotatedEstimator) {
    Rng rng = make_rng(61);
    for (int k = 0; k < 50; ++k) {
        const CMatrix w = random_haar_unitary(2, rng);
        const auto rho = DensityMatrix::from_matrix(
            w * CMatrix::diagonal(std::vector<double>{0.7, 0.3}) * w.adjoint());
        const auto op = rank_preserving_map(rho, 1e-12);
        EXPECT_LE((op.lmap * rho.matrix() * op.lmap.adjoint()).max_abs_diff(maximally_mixed(2).matrix()),
                  1e-9);
        // Rows equal (1/sqrt 2) diag(0.7, 0.3)^{-1/2} W† up to row phases.
        for (std::size_t i = 0; i < 2; ++i) {
            const double scale = 1.0 / std::sqrt(2.0 * (i == 0 ? 0.7 : 0.3));
            for (std::size_t j = 0; j < 2; ++j) {
                EXPECT_NEAR(std::abs(op.lmap(i, j)), scale * std::abs(w(j, i)), 1e-9);
            }
        }
    }
}

TEST(RankPreservingMap, RejectsBadDelta) {
    EXPECT_THROW((void)rank_preserving_map(maximally_mixed(2), 1.0), std::invalid_argument);
    EXPECT_THROW((void)rank_preserving_map(DensityMatrix::pure(kH), 0.0), std::invalid_argument);
}

TEST(TransformMeasurement, IdentityLeavesElementsUnchanged) {
    const auto op = rank_preserving_map(maximally_mixed(2), 1e-12);
    for (const auto &m : mub_qubit().elements()) {
        EXPECT_LE(transform_measurement(op, m).matrix().max_abs_diff(m.matrix()), 1e-12);
    }
}

TEST(TransformMeasurement, DiagonalEstimatorExample) {
    const auto rho = diag_state(0.9, 0.1);
    const auto op = rank_preserving_map(rho, 1e-12);
    const auto d = PovmElement::projector(mub_qubit_vectors()[2]);
    const auto m = transform_measurement(op, d);
    const CMatrix expected = 0.5 * CMatrix{{1.0 / 1.8, 1.0 / 0.6}, {1.0 / 0.6, 5.0}};
    EXPECT_LE(m.matrix().max_abs_diff(expected), 1e-9);
    EXPECT_NEAR(m.weight(), 0.5 * (1.0 / 1.8 + 5.0), 1e-9);
    EXPECT_NEAR(trace_product_real(m.matrix(), rho.matrix()), 0.5, 1e-9);

    const auto timed = normalize_with_time(m);
    ASSERT_TRUE(timed.has_value());
    EXPECT_NEAR(timed->time_weight, 2.7777777777777777, 1e-9);
    EXPECT_NEAR(timed->projector.weight(), 1.0, 1e-12);
    EXPECT_LE((timed->time_weight * timed->projector.matrix()).max_abs_diff(m.matrix()), 1e-12);
}

TEST(TransformMeasurement, ProbabilityAndRankPreserved) {
    Rng rng = make_rng(62);
    for (int k = 0; k < 100; ++k) {
        const auto rho = k % 2 ? random_pure_haar(2, rng) : random_bures_mixed(2, rng);
        const auto op = rank_preserving_map(rho, 1e-4);
        const auto m = PovmElement::projector(random_haar_unitary(2, rng).column(0));
        const auto out = transform_measurement(op, m);
        ASSERT_EQ(numeric_rank(out.matrix(), 1e-8), 1);
        ASSERT_NEAR(trace_product_real(out.matrix(), op.source_estimator.matrix()), 0.5, 1e-9);
    }
}

TEST(UnitaryFreedom, IdentityAndHaar) {
    Rng rng = make_rng(63);
    const auto rho = random_bures_mixed(2, rng);
    const auto op = rank_preserving_map(rho, 1e-4);
    EXPECT_LE(apply_unitary_freedom(op, CMatrix::identity(2)).lmap.max_abs_diff(op.lmap), 1e-15);
    for (int k = 0; k < 20; ++k) {
        const auto moved = apply_unitary_freedom(op, random_haar_unitary(2, rng));
        const auto &reg = moved.source_estimator.matrix();
        EXPECT_LE((moved.lmap * reg * moved.lmap.adjoint()).max_abs_diff(maximally_mixed(2).matrix()), 1e-9);
        for (const auto &m : mub_qubit().elements()) {
            EXPECT_NEAR(trace_product_real(transform_measurement(moved, m).matrix(), reg), 0.5, 1e-9);
        }
    }
    EXPECT_THROW((void)apply_unitary_freedom(op, 2.0 * CMatrix::identity(2)), std::invalid_argument);
}

TEST(NormalizeWithTime, UntransformedAndVanishing) {
    const auto t = normalize_with_time(mub_qubit().elements()[3]);
    ASSERT_TRUE(t.has_value());
    EXPECT_DOUBLE_EQ(t->time_weight, 1.0);
    EXPECT_FALSE(normalize_with_time(PovmElement::unchecked(CMatrix(2))).has_value());
}

TEST(ComplementToBasis, HorizontalGivesVertical) {
    Rng rng = make_rng(64);
    const auto plan = complement_to_basis({PovmElement::projector(kH), 2.5}, rng);
    ASSERT_EQ(plan.measurements.size(), 2u);
    ASSERT_EQ(plan.groups.size(), 1u);
    EXPECT_LE(plan.measurements[1].projector.matrix().max_abs_diff(CMatrix::outer(kV)), 1e-12);
    EXPECT_DOUBLE_EQ(plan.measurements[1].time_weight, 2.5);
}

TEST(ComplementToBasis, RandomInputsInSeveralDimensions) {
    Rng rng = make_rng(65);
    for (int k = 0; k < 100; ++k) {
        const std::size_t dim = 2 + static_cast<std::size_t>(k % 3);
        const auto v = random_haar_unitary(dim, rng).column(0);
        const auto plan = complement_to_basis({PovmElement::projector(v), 1.7}, rng);
        ASSERT_EQ(plan.measurements.size(), dim);
        ASSERT_EQ(plan.groups.size(), 1u);
        CMatrix sum(dim);
        for (std::size_t a = 0; a < dim; ++a) {
            sum += plan.measurements[a].projector.matrix();
            ASSERT_DOUBLE_EQ(plan.measurements[a].time_weight, 1.7);
            for (std::size_t b = a + 1; b < dim; ++b) {
                ASSERT_LE(std::abs(trace_product_real(plan.measurements[a].projector.matrix(),
                                                      plan.measurements[b].projector.matrix())),
                          1e-9);
            }
        }
        ASSERT_LE(sum.max_abs_diff(CMatrix::identity(dim)), 1e-9);
        ASSERT_LE(plan.measurements[0].projector.matrix().max_abs_diff(CMatrix::outer(v)), 1e-12);
        ASSERT_NO_THROW(plan.validate());
    }
}

TEST(ComplementMinimal, UntransformedMub) {
    const auto c = complement_minimal(mub_qubit().elements());
    EXPECT_NEAR(c.mu_max, 3.0, 1e-12);
    ASSERT_EQ(c.scaled.size(), 6u);
    EXPECT_LE(c.scaled[0].matrix().max_abs_diff(mub_qubit().elements()[0].matrix() / 3.0), 1e-12);
    for (const auto &e : c.extra) {
        EXPECT_NEAR(e.weight(), 0.0, 1e-12);
    }
}

TEST(ComplementMinimal, SyntheticDiagonalSum) {
    const std::vector<PovmElement> set{PovmElement::unchecked(CMatrix::diagonal(std::vector<double>{2.0, 0.0})),
                                       PovmElement::projector(kV)};
    const auto c = complement_minimal(set);
    EXPECT_NEAR(c.mu_max, 2.0, 1e-12);
    ASSERT_LE(c.extra.size(), 2u);
    int nonzero = 0;
    CMatrix total(2);
    for (const auto &e : c.extra) {
        total += e.matrix();
        if (e.weight() > 1e-12) {
            ++nonzero;
            EXPECT_LE(e.matrix().max_abs_diff(0.5 * CMatrix::outer(kV)), 1e-12);
        }
    }
    EXPECT_EQ(nonzero, 1);
    for (const auto &e : c.scaled) {
        total += e.matrix();
    }
    EXPECT_LE(total.max_abs_diff(CMatrix::identity(2)), 1e-12);
}

TEST(ComplementMinimal, TransformedSetsDecomposeUnity) {
    Rng rng = make_rng(66);
    for (int k = 0; k < 100; ++k) {
        const auto op = rank_preserving_map(random_pure_haar(2, rng), 1e-4);
        std::vector<PovmElement> set;
        for (const auto &m : mub_qubit().elements()) {
            set.push_back(transform_measurement(op, m));
        }
        const auto c = complement_minimal(set);
        ASSERT_LE(c.extra.size(), 2u);
        CMatrix total(2);
        for (const auto &e : c.scaled) {
            total += e.matrix();
        }
        for (const auto &e : c.extra) {
            total += e.matrix();
        }
        ASSERT_LE(total.max_abs_diff(CMatrix::identity(2)), 1e-9);
    }
}

TEST(BasePlan, MubPairsIntoThreeBases) {
    const auto plan = base_plan(mub_qubit());
    ASSERT_EQ(plan.groups.size(), 3u);
    for (const auto &g : plan.groups) {
        EXPECT_EQ(g.size(), 2u);
        EXPECT_LE(timed_sum(plan, g).max_abs_diff(CMatrix::identity(2)), 1e-12);
    }
    EXPECT_DOUBLE_EQ(plan.exposure_weight(), 3.0);
}

TEST(NextPlan, EigenBasisOnly) {
    Rng rng = make_rng(67);
    PlanOptions opts;
    opts.eigen_rotated_base = false;
    const auto plan = next_plan(Protocol::Eigen, diag_state(0.9, 0.1), mub_qubit(), rng, opts);
    ASSERT_EQ(plan.measurements.size(), 2u);
    ASSERT_EQ(plan.groups.size(), 1u);
    CMatrix p0 = CMatrix::outer(kH), p1 = CMatrix::outer(kV);
    const auto &a = plan.measurements[0].projector.matrix();
    const auto &b = plan.measurements[1].projector.matrix();
    EXPECT_TRUE((a.max_abs_diff(p0) < 1e-12 && b.max_abs_diff(p1) < 1e-12) ||
                (a.max_abs_diff(p1) < 1e-12 && b.max_abs_diff(p0) < 1e-12));
    EXPECT_DOUBLE_EQ(plan.exposure_weight(), 1.0);
}

TEST(NextPlan, EigenRotatedBaseStartsWithEigenbasis) {
    Rng rng = make_rng(68);
    for (int k = 0; k < 50; ++k) {
        const auto rho = random_bures_mixed(2, rng);
        const auto plan = next_plan(Protocol::Eigen, rho, mub_qubit(), rng);
        ASSERT_EQ(plan.groups.size(), 3u);
        ASSERT_DOUBLE_EQ(plan.exposure_weight(), 3.0);
        // First group diagonalizes the estimator; the other two are unbiased to it.
        const auto eig = hermitian_eig(rho.matrix());
        const auto &first = plan.measurements[plan.groups[0][0]].projector.matrix();
        const double p = trace_product_real(first, rho.matrix());
        ASSERT_TRUE(std::abs(p - eig.eigenvalues[0]) < 1e-9 || std::abs(p - eig.eigenvalues[1]) < 1e-9);
        for (std::size_t g = 1; g < 3; ++g) {
            const auto &m = plan.measurements[plan.groups[g][0]].projector.matrix();
            ASSERT_NEAR(trace_product_real(m, first), 0.5, 1e-9);
            ASSERT_LE(timed_sum(plan, plan.groups[g]).max_abs_diff(CMatrix::identity(2)), 1e-9);
        }
    }
}

TEST(NextPlan, MaximallyMixedRankPNCIsTheMubSet) {
    Rng rng = make_rng(69);
    const auto plan = next_plan(Protocol::RankPNC, maximally_mixed(2), mub_qubit(), rng);
    ASSERT_EQ(plan.measurements.size(), 6u);
    ASSERT_EQ(plan.groups.size(), 6u);
    for (std::size_t k = 0; k < 6; ++k) {
        EXPECT_NEAR(plan.measurements[k].time_weight, 1.0, 1e-9);
        EXPECT_LE(plan.measurements[k].projector.matrix().max_abs_diff(mub_qubit().elements()[k].matrix()),
                  1e-9);
    }
}

TEST(NextPlan, RandomIsOneBasis) {
    Rng rng = make_rng(70);
    const auto plan = next_plan(Protocol::Random, maximally_mixed(2), mub_qubit(), rng);
    ASSERT_EQ(plan.groups.size(), 1u);
    EXPECT_LE(timed_sum(plan, plan.groups[0]).max_abs_diff(CMatrix::identity(2)), 1e-12);
}

TEST(NextPlan, RankPInvariants) {
    Rng rng = make_rng(71);
    for (int k = 0; k < 100; ++k) {
        const auto rho = k % 2 ? random_pure_haar(2, rng) : random_bures_mixed(2, rng);
        const auto reg = regularize_full_rank(rho, 1e-4);

        const auto nc = next_plan(Protocol::RankPNC, rho, mub_qubit(), rng);
        ASSERT_EQ(nc.groups.size(), 6u);
        for (const auto &m : nc.measurements) {
            ASSERT_NEAR(trace_product_real(m.projector.matrix(), reg.matrix()) * m.time_weight, 0.5, 1e-9);
            ASSERT_EQ(numeric_rank(m.projector.matrix(), 1e-8), 1);
        }

        const auto b = next_plan(Protocol::RankPB, rho, mub_qubit(), rng);
        ASSERT_EQ(b.groups.size(), 6u);
        for (const auto &g : b.groups) {
            ASSERT_EQ(g.size(), 2u);
            const double t = b.measurements[g[0]].time_weight;
            ASSERT_LE((timed_sum(b, g) / t).max_abs_diff(CMatrix::identity(2)), 1e-9);
        }

        const auto m = next_plan(Protocol::RankPM, rho, mub_qubit(), rng);
        ASSERT_LE(timed_sum(m, all_indices(m)).max_abs_diff(CMatrix::identity(2)), 1e-9);
        ASSERT_NO_THROW(m.validate());
    }
}

TEST(NextPlan, RankPNCMeasurementsTurnAwayFromTheEstimate) {
    // Along one convergence trace on a pure state, the transformed
    // measurements gain exposure and, weighted by time, their Bloch vectors
    // approach the point antipodal to the estimate.
    const auto truth = DensityMatrix::pure(std::vector<Complex>{Complex(0.6, 0.0), Complex(0.0, 0.8)});
    RunOptions opts;
    const auto trace = run_tomography(Protocol::RankPNC, truth, {}, {100.0, 1.25, 1e6}, 2024, opts);
    ASSERT_GT(trace.entries.size(), 20u);

    Rng rng = make_rng(1);
    std::vector<double> mean_cos, total_time;
    for (const auto &e : trace.entries) {
        const auto plan = next_plan(Protocol::RankPNC, e.estimate, mub_qubit(), rng);
        const auto r = bloch_vector(e.estimate.matrix());
        double c = 0.0;
        for (const auto &m : plan.measurements) {
            c += m.time_weight * cosine(bloch_vector(m.projector.matrix()), r);
        }
        mean_cos.push_back(c / plan.exposure_weight());
        total_time.push_back(plan.exposure_weight());
    }
    const std::size_t n = mean_cos.size();
    const std::size_t third = n / 3;
    const auto avg = [](auto first, auto last) {
        return std::accumulate(first, last, 0.0) / static_cast<double>(last - first);
    };
    const double early = avg(mean_cos.begin() + 1, mean_cos.begin() + static_cast<long>(third));
    const double late = avg(mean_cos.end() - static_cast<long>(third), mean_cos.end());
    EXPECT_LT(late, early);
    EXPECT_LT(mean_cos.back(), -0.9);
    EXPECT_GT(total_time.back(), 6.0);
    EXPECT_GT(avg(total_time.end() - static_cast<long>(third), total_time.end()),
              avg(total_time.begin() + 1, total_time.begin() + static_cast<long>(third)));
}
