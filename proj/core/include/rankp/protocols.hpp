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

/**
 * @file
 * Adaptive measurement selection.
 *
 * The rank-preserving strategies map the current estimator to the maximally
 * mixed state with a full-rank operator T (T rho T† = 1_D / D, T = D^{-1/2}
 * Λ^{-1/2} U† from rho = U Λ U†) and measure the base set conjugated by the
 * adjoint, M -> T† M T. The transformed elements are no longer normalized;
 * each is measured as its unit-trace projector for an exposition time equal
 * to its trace.
 */

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rankp/quantum.hpp"
#include "rankp/random.hpp"

namespace rankp {

enum class Protocol { Random, Eigen, RankPNC, RankPB, RankPM };

[[nodiscard]] std::string_view to_string(Protocol p) noexcept;
/// Accepts "random", "eigen", "rankp-nc", "rankp-b", "rankp-m".
[[nodiscard]] Protocol parse_protocol(std::string_view name);
[[nodiscard]] bool is_rank_preserving(Protocol p) noexcept;

/// Map that sends a (regularized) estimator to the maximally mixed state.
struct TransformOperator {
    CMatrix lmap;                   ///< T with T rho T† = 1_D / D
    DensityMatrix source_estimator; ///< the regularized estimator rho
};

/// Unit-trace projector measured for `time_weight` exposition units.
struct TimedMeasurement {
    PovmElement projector;
    double time_weight = 1.0;
};

/// Measurements plus a partition of their indices into simultaneity groups.
/// Members of one group are mutually orthogonal and measured in a single
/// exposure whose duration is the largest time weight in the group.
struct MeasurementPlan {
    std::vector<TimedMeasurement> measurements;
    std::vector<std::vector<std::size_t>> groups;

    /// Sum over groups of the group exposure weight.
    [[nodiscard]] double exposure_weight() const;
    [[nodiscard]] double group_weight(std::size_t group) const;
    /// Checks orthogonality (|Tr Ma Mb| <= 1e-8), group size <= D, and that
    /// the groups partition the measurements. Throws std::logic_error.
    void validate() const;
};

/// Minimal completion of a transformed set to a decomposition of unity.
struct MinimalCompletion {
    std::vector<PovmElement> scaled; ///< M_new / mu_max
    std::vector<PovmElement> extra;  ///< lambda_j |phi_j><phi_j|, lambda_j may be 0
    double mu_max = 0.0;
};

struct PlanOptions {
    double delta = 1e-4;   ///< full-rank mixing before the transformation
    bool random_v = false; ///< left-multiply T by a fresh Haar unitary
    /// Eigen measures the whole base set rotated so that its first basis is
    /// the estimator eigenbasis; when false only the eigenbasis is measured.
    bool eigen_rotated_base = true;
};

/// T = D^{-1/2} Lambda^{-1/2} U† of the delta-regularized estimator, with
/// eigenvalues in descending order.
TransformOperator rank_preserving_map(const DensityMatrix &estimate, double delta);

/// M -> T† M T.
PovmElement transform_measurement(const TransformOperator &op, const PovmElement &m);

/// T -> V T for unitary V (throws std::invalid_argument otherwise).
TransformOperator apply_unitary_freedom(const TransformOperator &op, const CMatrix &v);

/// Splits M into (M / Tr M, Tr M); nullopt when Tr M <= 1e-12.
std::optional<TimedMeasurement> normalize_with_time(const PovmElement &m);

/// Completes a rank-1 measurement to an orthonormal basis (random completion
/// for D > 2); all members share the input's time weight and one group.
MeasurementPlan complement_to_basis(const TimedMeasurement &m, Rng &rng);

MinimalCompletion complement_minimal(const std::vector<PovmElement> &set);

/// Eigenbasis of an estimator. Degenerate spectra use the computational
/// basis; otherwise every eigenvector is phased so that its first
/// non-negligible component is real and positive.
std::vector<std::vector<Complex>> estimator_eigenbasis(const DensityMatrix &estimate);

/// Base set measured as given: consecutive mutually orthogonal elements are
/// grouped (pairs H/V, D/A, R/L for the qubit MUB).
MeasurementPlan base_plan(const Povm &base);

MeasurementPlan next_plan(Protocol protocol, const DensityMatrix &estimate, const Povm &base,
                          Rng &rng, const PlanOptions &opts = {});

} // namespace rankp
