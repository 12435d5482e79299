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

#include "rankp/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rankp/estimation.hpp"

namespace rankp {

namespace {

constexpr double kVanishingTrace = 1e-12;
constexpr double kOrthogonalityTolerance = 1e-8;

// Unit vector spanning the range of a rank-1 PSD operator.
std::vector<Complex> leading_vector(const CMatrix &m) {
    std::size_t best = 0;
    double best_norm = -1.0;
    for (std::size_t c = 0; c < m.dim(); ++c) {
        const double n = norm(m.column(c));
        if (n > best_norm) {
            best_norm = n;
            best = c;
        }
    }
    auto v = m.column(best);
    const double n = norm(v);
    if (n == 0.0) {
        throw std::invalid_argument("cannot extract a vector from a zero operator");
    }
    for (auto &z : v) {
        z /= n;
    }
    return v;
}

void canonical_phase(std::vector<Complex> &v) {
    for (const auto &z : v) {
        if (std::abs(z) > 1e-12) {
            const Complex phase = std::conj(z) / std::abs(z);
            for (auto &w : v) {
                w *= phase;
            }
            return;
        }
    }
}

MeasurementPlan basis_plan(const std::vector<std::vector<Complex>> &basis) {
    MeasurementPlan plan;
    std::vector<std::size_t> group;
    for (const auto &v : basis) {
        group.push_back(plan.measurements.size());
        plan.measurements.push_back({PovmElement::projector(v), 1.0});
    }
    plan.groups.push_back(std::move(group));
    return plan;
}

void append_singleton(MeasurementPlan &plan, TimedMeasurement m) {
    plan.groups.push_back({plan.measurements.size()});
    plan.measurements.push_back(std::move(m));
}

void append_plan(MeasurementPlan &plan, const MeasurementPlan &other) {
    const std::size_t offset = plan.measurements.size();
    plan.measurements.insert(plan.measurements.end(), other.measurements.begin(),
                             other.measurements.end());
    for (const auto &g : other.groups) {
        std::vector<std::size_t> shifted;
        for (auto i : g) {
            shifted.push_back(i + offset);
        }
        plan.groups.push_back(std::move(shifted));
    }
}

TransformOperator prepared_transform(const DensityMatrix &estimate, Rng &rng,
                                     const PlanOptions &opts) {
    auto op = rank_preserving_map(estimate, opts.delta);
    if (opts.random_v) {
        op = apply_unitary_freedom(op, random_haar_unitary(estimate.dim(), rng));
    }
    return op;
}

} // namespace

std::string_view to_string(Protocol p) noexcept {
    switch (p) {
    case Protocol::Random:
        return "random";
    case Protocol::Eigen:
        return "eigen";
    case Protocol::RankPNC:
        return "rankp-nc";
    case Protocol::RankPB:
        return "rankp-b";
    case Protocol::RankPM:
        return "rankp-m";
    }
    return "unknown";
}

Protocol parse_protocol(std::string_view name) {
    for (auto p : {Protocol::Random, Protocol::Eigen, Protocol::RankPNC, Protocol::RankPB,
                   Protocol::RankPM}) {
        if (name == to_string(p)) {
            return p;
        }
    }
    throw std::invalid_argument("unknown protocol '" + std::string(name) +
                                "' (expected random, eigen, rankp-nc, rankp-b or rankp-m)");
}

bool is_rank_preserving(Protocol p) noexcept {
    return p == Protocol::RankPNC || p == Protocol::RankPB || p == Protocol::RankPM;
}

double MeasurementPlan::group_weight(std::size_t group) const {
    double w = 0.0;
    for (auto i : groups.at(group)) {
        w = std::max(w, measurements.at(i).time_weight);
    }
    return w;
}

double MeasurementPlan::exposure_weight() const {
    double total = 0.0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        total += group_weight(g);
    }
    return total;
}

void MeasurementPlan::validate() const {
    std::vector<int> seen(measurements.size(), 0);
    for (const auto &g : groups) {
        if (g.empty()) {
            throw std::logic_error("measurement plan has an empty group");
        }
        for (std::size_t a = 0; a < g.size(); ++a) {
            const auto &ma = measurements.at(g[a]);
            if (g.size() > ma.projector.dim()) {
                throw std::logic_error("simultaneity group larger than the dimension");
            }
            ++seen[g[a]];
            for (std::size_t b = a + 1; b < g.size(); ++b) {
                const auto &mb = measurements.at(g[b]);
                const double overlap =
                    std::abs(trace_product_real(ma.projector.matrix(), mb.projector.matrix()));
                if (overlap > kOrthogonalityTolerance) {
                    std::ostringstream os;
                    os << "simultaneity group members overlap: |Tr Ma Mb| = " << overlap;
                    throw std::logic_error(os.str());
                }
            }
        }
    }
    for (int s : seen) {
        if (s != 1) {
            throw std::logic_error("measurement plan groups do not partition the measurements");
        }
    }
}

TransformOperator rank_preserving_map(const DensityMatrix &estimate, double delta) {
    if (!(delta >= 0.0 && delta < 1.0)) {
        throw std::invalid_argument("rank_preserving_map: delta must lie in [0, 1)");
    }
    const DensityMatrix reg = regularize_full_rank(estimate, delta);
    const auto eig = hermitian_eig(reg.matrix());
    if (!(eig.eigenvalues.front() > 0.0)) {
        throw std::invalid_argument("rank_preserving_map: estimator is rank deficient; use delta > 0");
    }
    const std::size_t dim = reg.dim();
    // Rows follow descending eigenvalues with canonical phases; a degenerate
    // estimator keeps the computational basis.
    const bool degenerate = eig.eigenvalues.back() - eig.eigenvalues.front() <= 1e-12;
    CMatrix lmap(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        const std::size_t k = dim - 1 - i;
        std::vector<Complex> v(dim, 0.0);
        if (degenerate) {
            v[i] = 1.0;
        } else {
            v = eig.eigenvectors.column(k);
            canonical_phase(v);
        }
        const double scale = 1.0 / std::sqrt(static_cast<double>(dim) * eig.eigenvalues[k]);
        for (std::size_t j = 0; j < dim; ++j) {
            lmap(i, j) = scale * std::conj(v[j]);
        }
    }
    return {std::move(lmap), reg};
}

PovmElement transform_measurement(const TransformOperator &op, const PovmElement &m) {
    if (op.lmap.dim() != m.dim()) {
        throw std::invalid_argument("transform_measurement: dimension mismatch");
    }
    return PovmElement::unchecked(op.lmap.adjoint() * m.matrix() * op.lmap);
}

TransformOperator apply_unitary_freedom(const TransformOperator &op, const CMatrix &v) {
    if (v.dim() != op.lmap.dim()) {
        throw std::invalid_argument("apply_unitary_freedom: dimension mismatch");
    }
    const double dev = (v.adjoint() * v).max_abs_diff(CMatrix::identity(v.dim()));
    if (dev > 1e-10) {
        std::ostringstream os;
        os << "apply_unitary_freedom: V is not unitary (max|V^dagger V - 1| = " << dev << ")";
        throw std::invalid_argument(os.str());
    }
    return {v * op.lmap, op.source_estimator};
}

std::optional<TimedMeasurement> normalize_with_time(const PovmElement &m) {
    const double w = m.weight();
    if (!(w > kVanishingTrace)) {
        return std::nullopt;
    }
    return TimedMeasurement{PovmElement::unchecked(m.matrix() / w), w};
}

MeasurementPlan complement_to_basis(const TimedMeasurement &m, Rng &rng) {
    const std::size_t dim = m.projector.dim();
    std::vector<std::vector<Complex>> seeds{leading_vector(m.projector.matrix())};
    std::vector<std::vector<Complex>> basis;
    while (true) {
        basis = gram_schmidt(seeds);
        if (basis.size() == dim) {
            break;
        }
        seeds.push_back(complex_gaussian_vector(dim, rng));
    }
    MeasurementPlan plan;
    std::vector<std::size_t> group;
    for (std::size_t k = 0; k < dim; ++k) {
        group.push_back(k);
        plan.measurements.push_back(
            {k == 0 ? m.projector : PovmElement::projector(basis[k]), m.time_weight});
    }
    plan.groups.push_back(std::move(group));
    return plan;
}

MinimalCompletion complement_minimal(const std::vector<PovmElement> &set) {
    if (set.empty()) {
        throw std::invalid_argument("complement_minimal: empty measurement set");
    }
    const std::size_t dim = set.front().dim();
    CMatrix s(dim);
    for (const auto &m : set) {
        s += m.matrix();
    }
    const double mu = hermitian_eig(s).eigenvalues.back();
    if (!(mu > 0.0)) {
        throw std::invalid_argument("complement_minimal: summed operator has no positive eigenvalue");
    }
    MinimalCompletion out;
    out.mu_max = mu;
    for (const auto &m : set) {
        out.scaled.push_back(PovmElement::unchecked(m.matrix() / mu));
    }
    const auto residual = hermitian_eig(CMatrix::identity(dim) - s / mu);
    for (std::size_t j = 0; j < dim; ++j) {
        const double lambda = std::max(residual.eigenvalues[j], 0.0);
        CMatrix e = CMatrix::outer(residual.eigenvectors.column(j));
        out.extra.push_back(PovmElement::unchecked(e * lambda));
    }
    return out;
}

std::vector<std::vector<Complex>> estimator_eigenbasis(const DensityMatrix &estimate) {
    const auto eig = hermitian_eig(estimate.matrix());
    const std::size_t dim = estimate.dim();
    std::vector<std::vector<Complex>> basis;
    if (eig.eigenvalues.back() - eig.eigenvalues.front() <= 1e-12) {
        for (std::size_t k = 0; k < dim; ++k) {
            std::vector<Complex> e(dim, 0.0);
            e[k] = 1.0;
            basis.push_back(std::move(e));
        }
        return basis;
    }
    for (std::size_t k = 0; k < dim; ++k) {
        auto v = eig.eigenvectors.column(k);
        canonical_phase(v);
        basis.push_back(std::move(v));
    }
    return basis;
}

MeasurementPlan base_plan(const Povm &base) {
    MeasurementPlan plan;
    std::vector<std::size_t> current;
    for (const auto &element : base.elements()) {
        auto timed = normalize_with_time(element);
        if (!timed) {
            continue;
        }
        // Group members must be orthogonal and share one exposure time.
        bool fits = current.size() < base.dim();
        if (fits && !current.empty()) {
            fits = std::abs(timed->time_weight -
                            plan.measurements[current.front()].time_weight) <= 1e-12;
        }
        for (auto i : current) {
            fits = fits && std::abs(trace_product_real(plan.measurements[i].projector.matrix(),
                                                       timed->projector.matrix())) <=
                               kOrthogonalityTolerance;
        }
        if (!fits && !current.empty()) {
            plan.groups.push_back(std::move(current));
            current.clear();
        }
        current.push_back(plan.measurements.size());
        plan.measurements.push_back(std::move(*timed));
    }
    if (!current.empty()) {
        plan.groups.push_back(std::move(current));
    }
    return plan;
}

MeasurementPlan next_plan(Protocol protocol, const DensityMatrix &estimate, const Povm &base,
                          Rng &rng, const PlanOptions &opts) {
    const std::size_t dim = estimate.dim();
    switch (protocol) {
    case Protocol::Random: {
        const CMatrix u = random_haar_unitary(dim, rng);
        std::vector<std::vector<Complex>> basis;
        for (std::size_t k = 0; k < dim; ++k) {
            basis.push_back(u.column(k));
        }
        return basis_plan(basis);
    }
    case Protocol::Eigen: {
        const auto basis = estimator_eigenbasis(estimate);
        if (!opts.eigen_rotated_base) {
            return basis_plan(basis);
        }
        if (base.dim() != dim) {
            throw std::invalid_argument("next_plan: base set and estimator dimensions differ");
        }
        const CMatrix u = CMatrix::from_columns(basis);
        std::vector<PovmElement> rotated;
        for (const auto &m : base.elements()) {
            rotated.push_back(PovmElement::unchecked(u * m.matrix() * u.adjoint()));
        }
        return base_plan(Povm(std::move(rotated), base.complete()));
    }
    case Protocol::RankPNC:
    case Protocol::RankPB:
    case Protocol::RankPM:
        break;
    }

    if (base.dim() != dim) {
        throw std::invalid_argument("next_plan: base set and estimator dimensions differ");
    }
    const auto op = prepared_transform(estimate, rng, opts);
    std::vector<PovmElement> transformed;
    for (const auto &m : base.elements()) {
        transformed.push_back(transform_measurement(op, m));
    }

    MeasurementPlan plan;
    if (protocol == Protocol::RankPNC || protocol == Protocol::RankPB) {
        for (const auto &m : transformed) {
            auto timed = normalize_with_time(m);
            if (!timed) {
                continue;
            }
            if (protocol == Protocol::RankPNC) {
                append_singleton(plan, std::move(*timed));
            } else {
                append_plan(plan, complement_to_basis(*timed, rng));
            }
        }
        return plan;
    }

    const auto completion = complement_minimal(transformed);
    for (const auto &m : completion.scaled) {
        if (auto timed = normalize_with_time(m)) {
            append_singleton(plan, std::move(*timed));
        }
    }
    // The completion elements are eigenvectors of one Hermitian operator,
    // hence orthogonal: they are measured together as one basis exposure.
    std::vector<std::size_t> group;
    for (const auto &m : completion.extra) {
        if (auto timed = normalize_with_time(m)) {
            group.push_back(plan.measurements.size());
            plan.measurements.push_back(std::move(*timed));
        }
    }
    if (!group.empty()) {
        plan.groups.push_back(std::move(group));
    }
    return plan;
}

} // namespace rankp
