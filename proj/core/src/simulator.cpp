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

#include "rankp/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace rankp {

namespace {

std::int64_t poisson(double mean, Rng &rng) {
    if (!(mean > 0.0)) {
        return 0;
    }
    std::poisson_distribution<std::int64_t> dist(mean);
    return dist(rng);
}

} // namespace

void SourceModel::validate() const {
    if (!(intensity > 0.0) || !std::isfinite(intensity)) {
        throw std::invalid_argument("source intensity must be positive");
    }
    if (!(efficiency > 0.0 && efficiency <= 1.0)) {
        throw std::invalid_argument("detection efficiency must lie in (0, 1]");
    }
}

void Schedule::validate() const {
    if (!(initial_budget >= 1.0)) {
        throw std::invalid_argument("schedule initial budget must be >= 1");
    }
    if (!(growth >= 1.0)) {
        throw std::invalid_argument("schedule growth must be >= 1");
    }
    if (!(n_max > initial_budget)) {
        throw std::invalid_argument("schedule n_max must exceed the initial budget");
    }
}

LikelihoodData RecordStream::likelihood_data(std::size_t count) const {
    LikelihoodData data;
    data.intensity = intensity * efficiency;
    count = std::min(count, records.size());
    data.records.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const auto &r = records[k];
        data.records.emplace_back(r.projector, r.time, r.counts);
    }
    return data;
}

std::int64_t sample_counts(const TimedMeasurement &m, const DensityMatrix &truth,
                           const SourceModel &src, double base_time, Rng &rng) {
    if (!(base_time > 0.0)) {
        throw std::invalid_argument("sample_counts: base_time must be positive");
    }
    const double p = born_probability(m.projector, truth);
    return poisson(src.detected_rate() * p * m.time_weight * base_time, rng);
}

std::vector<std::int64_t> sample_group_counts(const MeasurementPlan &plan, std::size_t group,
                                              const DensityMatrix &truth, const SourceModel &src,
                                              double base_time, Rng &rng) {
    const double weight = plan.group_weight(group);
    std::vector<std::int64_t> counts;
    for (auto i : plan.groups.at(group)) {
        TimedMeasurement exposed{plan.measurements.at(i).projector, weight};
        counts.push_back(sample_counts(exposed, truth, src, base_time, rng));
    }
    return counts;
}

double emitted_copies(double total_time, const SourceModel &src) {
    if (!(total_time >= 0.0)) {
        throw std::invalid_argument("emitted_copies: total time must be >= 0");
    }
    return src.intensity * total_time;
}

TomographyTrace run_tomography(Protocol protocol, const DensityMatrix &truth,
                               const SourceModel &src, const Schedule &sched, std::uint64_t seed,
                               const RunOptions &opts) {
    src.validate();
    sched.validate();
    const std::size_t dim = truth.dim();
    if (!opts.base && dim != 2) {
        throw std::invalid_argument("run_tomography: a base set is required for dimension != 2");
    }
    const Povm base = opts.base.value_or(mub_qubit());
    if (base.dim() != dim) {
        throw std::invalid_argument("run_tomography: base set dimension differs from the state");
    }

    Rng rng = make_rng(seed);
    TomographyTrace trace;
    trace.protocol = std::string(to_string(protocol));
    trace.run_id = opts.run_id;
    trace.seed = seed;
    if (opts.keep_records) {
        trace.records = RecordStream{dim, src.intensity, src.efficiency, {}};
    }

    LikelihoodData data;
    data.intensity = src.detected_rate();
    DensityMatrix estimate = maximally_mixed(dim);
    double n_emit = 0.0;
    std::int64_t n_det = 0;
    std::int64_t next_group_id = 0;
    double budget = sched.initial_budget;

    for (int iteration = 0;; ++iteration) {
        try {
            const MeasurementPlan plan =
                iteration == 0 ? base_plan(base) : next_plan(protocol, estimate, base, rng, opts.plan);
            const double remaining = sched.n_max - n_emit;
            const double this_budget = std::min(budget, remaining);
            const double base_time = this_budget / (src.intensity * plan.exposure_weight());

            for (std::size_t g = 0; g < plan.groups.size(); ++g) {
                const double exposure = plan.group_weight(g) * base_time;
                const auto counts = sample_group_counts(plan, g, truth, src, base_time, rng);
                const auto &members = plan.groups[g];
                for (std::size_t k = 0; k < members.size(); ++k) {
                    const auto &projector = plan.measurements[members[k]].projector;
                    data.records.emplace_back(projector, exposure, counts[k]);
                    n_det += counts[k];
                    if (trace.records) {
                        trace.records->records.push_back(
                            {next_group_id, projector, exposure, counts[k]});
                    }
                }
                ++next_group_id;
            }
            n_emit += emitted_copies(plan.exposure_weight() * base_time, src);
            const bool last = this_budget >= remaining || n_emit >= sched.n_max * (1.0 - 1e-12);
            if (last) {
                n_emit = sched.n_max;
            }

            std::optional<DensityMatrix> start;
            if (opts.warm_start) {
                start = estimate;
            }
            const auto mle = mle_solve(data, opts.mle, start);
            estimate = mle.estimate;

            TraceEntry entry;
            entry.iteration = iteration;
            entry.n_emit = n_emit;
            entry.n_det = n_det;
            entry.estimate = estimate;
            entry.fidelity = fidelity(truth, estimate);
            entry.d_bures_sq = bures_sq(truth, estimate);
            entry.loglik = mle.log_likelihood;
            trace.entries.push_back(std::move(entry));

            if (last) {
                break;
            }
        } catch (const std::exception &e) {
            std::ostringstream os;
            os << "tomography run failed (protocol " << to_string(protocol) << ", run "
               << opts.run_id << ", seed " << seed << ", iteration " << iteration
               << "): " << e.what();
            throw std::runtime_error(os.str());
        }
        budget *= sched.growth;
    }
    return trace;
}

TomographyTrace replay_counts(const RecordStream &stream, const ReplayOptions &opts) {
    if (stream.records.empty()) {
        throw std::invalid_argument("replay: record stream is empty");
    }
    if (!(stream.intensity > 0.0) || !(stream.efficiency > 0.0 && stream.efficiency <= 1.0)) {
        throw std::invalid_argument("replay: invalid intensity or efficiency");
    }
    if (!(opts.points_per_decade > 0.0)) {
        throw std::invalid_argument("replay: points_per_decade must be positive");
    }

    // Prefix ends at group boundaries with cumulative emitted copies.
    struct Boundary {
        std::size_t end;
        double n_emit;
        std::int64_t n_det;
    };
    std::vector<Boundary> boundaries;
    double time = 0.0;
    std::int64_t n_det = 0;
    std::size_t k = 0;
    while (k < stream.records.size()) {
        const std::int64_t gid = stream.records[k].group_id;
        double exposure = 0.0;
        while (k < stream.records.size() && stream.records[k].group_id == gid) {
            const auto &r = stream.records[k];
            if (r.projector.dim() != stream.dim) {
                throw std::invalid_argument("replay: record dimension differs from the stream header");
            }
            exposure = std::max(exposure, r.time);
            n_det += r.counts;
            ++k;
        }
        time += exposure;
        boundaries.push_back({k, stream.intensity * time, n_det});
    }

    const double n0 = opts.n0.value_or(boundaries.back().n_emit);
    auto last_within = [&](double n) {
        const auto it = std::upper_bound(
            boundaries.begin(), boundaries.end(), n * (1.0 + 1e-12),
            [](double value, const Boundary &b) { return value < b.n_emit; });
        return it == boundaries.begin() ? boundaries.end() : std::prev(it);
    };
    const auto reference_it = last_within(n0);
    if (reference_it == boundaries.end()) {
        throw std::invalid_argument("replay: N0 is smaller than the first exposure");
    }

    // Log-spaced selection of prefixes up to the reference prefix.
    std::vector<std::size_t> chosen;
    const double first = boundaries.front().n_emit;
    const double step = 1.0 / opts.points_per_decade;
    for (double e = std::floor(std::log10(first) / step) * step;; e += step) {
        const double target = std::pow(10.0, e);
        if (target > reference_it->n_emit * (1.0 + 1e-12)) {
            break;
        }
        const auto it = last_within(target);
        if (it == boundaries.end()) {
            continue;
        }
        const auto idx = static_cast<std::size_t>(it - boundaries.begin());
        if (chosen.empty() || chosen.back() != idx) {
            chosen.push_back(idx);
        }
    }
    const auto ref_idx = static_cast<std::size_t>(reference_it - boundaries.begin());
    if (chosen.empty() || chosen.back() != ref_idx) {
        chosen.push_back(ref_idx);
    }

    std::vector<MleResult> fits;
    for (auto idx : chosen) {
        fits.push_back(mle_solve(stream.likelihood_data(boundaries[idx].end), opts.mle));
    }
    const DensityMatrix &reference = fits.back().estimate;

    TomographyTrace trace;
    trace.protocol = "replay";
    for (std::size_t i = 0; i < chosen.size(); ++i) {
        const auto &b = boundaries[chosen[i]];
        TraceEntry entry;
        entry.iteration = static_cast<int>(i);
        entry.n_emit = b.n_emit;
        entry.n_det = b.n_det;
        entry.estimate = fits[i].estimate;
        entry.fidelity = fidelity(reference, fits[i].estimate);
        entry.d_bures_sq = i + 1 == chosen.size() ? 0.0 : bures_sq(reference, fits[i].estimate);
        entry.loglik = fits[i].log_likelihood;
        trace.entries.push_back(std::move(entry));
    }
    return trace;
}

} // namespace rankp
