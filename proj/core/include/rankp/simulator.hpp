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
 * Photon-counting experiment engine: Poissonian count sampling, emitted and
 * detected copy accounting, the adaptive estimate-plan-measure loop, and
 * replay of recorded count streams.
 *
 * Copy accounting: N_emit is the source intensity times the total exposure
 * time, where a simultaneity group costs one exposure. N_det is the number
 * of registered outcomes; it falls short of N_emit whenever the measured set
 * is not a decomposition of unity.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rankp/estimation.hpp"
#include "rankp/protocols.hpp"
#include "rankp/quantum.hpp"
#include "rankp/random.hpp"

namespace rankp {

struct SourceModel {
    double intensity = 1000.0; ///< expected emitted copies per exposition unit
    double efficiency = 1.0;   ///< detection efficiency in (0, 1]

    void validate() const;
    /// Expected registered counts per unit probability and exposition unit.
    [[nodiscard]] double detected_rate() const noexcept { return intensity * efficiency; }
};

/// Geometric exposure budget: iteration k aims at initial_budget * growth^k
/// expected emitted copies, stopping once N_emit reaches n_max.
struct Schedule {
    double initial_budget = 100.0;
    double growth = 1.25;
    double n_max = 1e6;

    void validate() const;
};

struct TraceEntry {
    int iteration = 0;
    double n_emit = 0.0;
    std::int64_t n_det = 0;
    DensityMatrix estimate = maximally_mixed(2);
    std::optional<double> d_bures_sq; ///< to the reference state, when known
    std::optional<double> fidelity;
    double loglik = 0.0;
};

/// One registered outcome line of an exposure, in chronological order.
/// Members of one simultaneity group share a group id and exposure time.
struct StreamRecord {
    std::int64_t group_id = 0;
    PovmElement projector = PovmElement::unchecked(CMatrix::identity(2) / 2.0);
    double time = 0.0;
    std::int64_t counts = 0;
};

struct RecordStream {
    std::size_t dim = 2;
    double intensity = 1.0;  ///< source intensity (emitted copies per unit)
    double efficiency = 1.0; ///< detection efficiency applied to the counts
    std::vector<StreamRecord> records;

    /// Likelihood data of the first `count` records.
    [[nodiscard]] LikelihoodData likelihood_data(std::size_t count) const;
};

struct TomographyTrace {
    std::string protocol;
    int run_id = 0;
    std::uint64_t seed = 0;
    std::vector<TraceEntry> entries;
    std::optional<RecordStream> records;
};

struct RunOptions {
    MleOptions mle;
    PlanOptions plan;
    bool warm_start = false;   ///< start each MLE from the previous estimate
    bool keep_records = false; ///< attach the raw count stream to the trace
    int run_id = 0;
    std::optional<Povm> base; ///< defaults to the qubit MUB set
};

/// Counts of one measurement held for time_weight * base_time:
/// Poisson(I * efficiency * p * t).
std::int64_t sample_counts(const TimedMeasurement &m, const DensityMatrix &truth,
                           const SourceModel &src, double base_time, Rng &rng);

/// Counts of every member of one simultaneity group from a single exposure
/// of length group_weight * base_time (independent Poisson per outcome).
std::vector<std::int64_t> sample_group_counts(const MeasurementPlan &plan, std::size_t group,
                                              const DensityMatrix &truth, const SourceModel &src,
                                              double base_time, Rng &rng);

/// I * total_time.
double emitted_copies(double total_time, const SourceModel &src);

/// Full adaptive run on a known true state. Iteration 0 measures the base
/// set as is; every later iteration measures next_plan(protocol, estimate).
TomographyTrace run_tomography(Protocol protocol, const DensityMatrix &truth,
                               const SourceModel &src, const Schedule &sched, std::uint64_t seed,
                               const RunOptions &opts = {});

struct ReplayOptions {
    double points_per_decade = 10.0;
    std::optional<double> n0; ///< reference prefix size; defaults to the whole stream
    MleOptions mle;
};

/// Estimates on growing prefixes (group boundaries, log-spaced in N) with
/// distances measured to the estimate at N0.
TomographyTrace replay_counts(const RecordStream &stream, const ReplayOptions &opts = {});

} // namespace rankp
