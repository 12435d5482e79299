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
 * Poissonian likelihood of photon-counting data and its maximizer over
 * density matrices.
 *
 * The likelihood of counts n_j recorded with normalized elements M_j held
 * for times t_j, for a source of known intensity I, is
 *
 *     log L = sum_j [ n_j ln(I p_j t_j) - I p_j t_j ],   p_j = Tr(M_j rho),
 *
 * with the model-independent -ln n_j! dropped.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rankp/quantum.hpp"

namespace rankp {

/// Data cannot pin down an estimator (counts outside the measured support).
class NonIdentifiableDataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// One exposure of one normalized element: (M_j, t_j, n_j).
class MeasurementRecord {
  public:
    /// Throws std::invalid_argument unless Tr M = 1, t >= 0, n >= 0, and
    /// n = 0 whenever t = 0.
    MeasurementRecord(PovmElement element, double time, std::int64_t counts);

    [[nodiscard]] const PovmElement &element() const noexcept { return element_; }
    [[nodiscard]] double time() const noexcept { return time_; }
    [[nodiscard]] std::int64_t counts() const noexcept { return counts_; }

  private:
    PovmElement element_;
    double time_;
    std::int64_t counts_;
};

struct LikelihoodData {
    std::vector<MeasurementRecord> records;
    double intensity = 1.0; ///< expected emissions per exposition unit

    [[nodiscard]] std::int64_t total_counts() const;
};

struct MleOptions {
    int max_iter = 1000;
    double tol = 1e-10;     ///< stop once the trace-norm step falls below this
    double dilution = 0.5;  ///< initial mixing weight of the fixed-point map
    double mix_floor = 0.0; ///< full-rank mix applied to the returned estimate
    bool record_history = false;
};

struct MleResult {
    DensityMatrix estimate;
    int iterations = 0;
    bool converged = false;
    double log_likelihood = 0.0;
    std::vector<double> history; ///< log L after every accepted step (opt-in)
};

/// Probabilities below this are clamped when they appear in a logarithm or
/// a denominator.
inline constexpr double kProbabilityFloor = 1e-12;

double log_likelihood(const LikelihoodData &data, const DensityMatrix &rho);

/// Maximizes the likelihood from `start` (default 1_D/D). Each iteration takes
/// the best ascending candidate among the diluted extended-R-rho-R step (with
/// halving, then over-relaxation while it keeps ascending) and a damped Newton
/// step on the unit-trace plane kept inside the PSD cone.
MleResult mle_solve(const LikelihoodData &data, const MleOptions &opts,
                    const std::optional<DensityMatrix> &start = std::nullopt);

/// mle_solve(data, opts).estimate.
DensityMatrix mle_estimate(const LikelihoodData &data, const MleOptions &opts = {});

/// (1 - delta) rho + delta 1_D / D.
DensityMatrix regularize_full_rank(const DensityMatrix &rho, double delta);

} // namespace rankp
