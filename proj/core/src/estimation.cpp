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

#include "rankp/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace rankp {

namespace {

constexpr double kTraceOneTolerance = 1e-9;
constexpr int kMaxOverRelaxation = 20;

// Records with t > 0, flattened for the inner loops.
class CompiledData {
  public:
    explicit CompiledData(const LikelihoodData &data) : intensity_(data.intensity) {
        if (!(data.intensity > 0.0) || !std::isfinite(data.intensity)) {
            throw std::invalid_argument("likelihood data needs a positive finite intensity");
        }
        if (data.records.empty()) {
            throw std::invalid_argument("likelihood data has no records");
        }
        dim_ = data.records.front().element().dim();
        for (const auto &r : data.records) {
            if (r.element().dim() != dim_) {
                throw std::invalid_argument("likelihood data mixes element dimensions");
            }
            if (r.time() <= 0.0) {
                continue;
            }
            const auto m = r.element().matrix().data();
            entries_.insert(entries_.end(), m.begin(), m.end());
            counts_.push_back(static_cast<double>(r.counts()));
            exposure_.push_back(intensity_ * r.time());
        }
        if (counts_.empty()) {
            throw std::invalid_argument("likelihood data needs at least one record with time > 0");
        }
    }

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t size() const noexcept { return counts_.size(); }
    [[nodiscard]] double counts(std::size_t j) const { return counts_[j]; }
    [[nodiscard]] double exposure(std::size_t j) const { return exposure_[j]; }

    [[nodiscard]] double probability(std::size_t j, const CMatrix &rho) const {
        const std::size_t n2 = dim_ * dim_;
        const Complex *m = entries_.data() + j * n2;
        double s = 0.0;
        for (std::size_t r = 0; r < dim_; ++r) {
            for (std::size_t c = 0; c < dim_; ++c) {
                const Complex a = m[r * dim_ + c];
                const Complex b = rho(c, r);
                s += a.real() * b.real() - a.imag() * b.imag();
            }
        }
        return std::clamp(s, 0.0, 1.0);
    }

    void add_scaled(std::size_t j, double w, CMatrix &acc) const {
        const std::size_t n2 = dim_ * dim_;
        const Complex *m = entries_.data() + j * n2;
        auto out = acc.data();
        for (std::size_t k = 0; k < n2; ++k) {
            out[k] += w * m[k];
        }
    }

    /// Fills `probs` and returns log L.
    double evaluate(const CMatrix &rho, std::vector<double> &probs) const {
        probs.resize(size());
        double total = 0.0;
        for (std::size_t j = 0; j < size(); ++j) {
            const double p = probability(j, rho);
            probs[j] = p;
            const double mean = exposure_[j] * p;
            if (counts_[j] > 0.0) {
                total += counts_[j] * std::log(exposure_[j] * std::max(p, kProbabilityFloor));
            }
            total -= mean;
        }
        return total;
    }

    [[nodiscard]] CMatrix exposure_operator() const {
        CMatrix g(dim_);
        for (std::size_t j = 0; j < size(); ++j) {
            add_scaled(j, exposure_[j], g);
        }
        return g.hermitian_part();
    }

    [[nodiscard]] CMatrix count_operator(const std::vector<double> &probs) const {
        CMatrix r(dim_);
        for (std::size_t j = 0; j < size(); ++j) {
            if (counts_[j] > 0.0) {
                add_scaled(j, counts_[j] / std::max(probs[j], kProbabilityFloor), r);
            }
        }
        return r;
    }

    /// Weight of record j outside the span of `support_projector`.
    [[nodiscard]] double weight_outside(std::size_t j, const CMatrix &support_projector) const {
        CMatrix m(dim_);
        add_scaled(j, 1.0, m);
        return m.trace().real() - trace_product_real(m, support_projector);
    }

  private:
    double intensity_;
    std::size_t dim_ = 0;
    std::vector<Complex> entries_;
    std::vector<double> counts_;
    std::vector<double> exposure_;
};

// Pseudo-inverse of a PSD matrix restricted to eigenvalues above the relative
// cutoff; also reports the projector onto that support.
struct PseudoInverse {
    CMatrix inverse;
    CMatrix support;
    bool full_rank;
};

PseudoInverse psd_pinv(const CMatrix &a) {
    const auto eig = hermitian_eig(a);
    const double cutoff = 1e-12 * std::max(std::abs(eig.eigenvalues.back()), 1e-300);
    bool full = true;
    for (double v : eig.eigenvalues) {
        full = full && v > cutoff;
    }
    return {spectral_function(eig, [&](double v) { return v > cutoff ? 1.0 / v : 0.0; }),
            spectral_function(eig, [&](double v) { return v > cutoff ? 1.0 : 0.0; }), full};
}


// Orthonormal basis of traceless Hermitian matrices (generalized Gell-Mann).
std::vector<CMatrix> traceless_basis(std::size_t dim) {
    std::vector<CMatrix> basis;
    const double r2 = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = i + 1; j < dim; ++j) {
            CMatrix x(dim), y(dim);
            x(i, j) = x(j, i) = r2;
            y(i, j) = Complex(0.0, -r2);
            y(j, i) = Complex(0.0, r2);
            basis.push_back(std::move(x));
            basis.push_back(std::move(y));
        }
    }
    for (std::size_t k = 1; k < dim; ++k) {
        CMatrix z(dim);
        const double scale = 1.0 / std::sqrt(static_cast<double>(k * (k + 1)));
        for (std::size_t i = 0; i < k; ++i) {
            z(i, i) = scale;
        }
        z(k, k) = -static_cast<double>(k) * scale;
        basis.push_back(std::move(z));
    }
    return basis;
}

// Solves a x = b for symmetric positive definite a (row-major, n x n).
bool cholesky_solve(std::vector<double> a, std::vector<double> &b, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) {
            d -= a[j * n + k] * a[j * n + k];
        }
        if (!(d > 1e-14 * std::max(1.0, std::abs(a[j * n + j])))) {
            return false;
        }
        a[j * n + j] = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) {
                v -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = v / a[j * n + j];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) {
            b[i] -= a[i * n + k] * b[k];
        }
        b[i] /= a[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = i + 1; k < n; ++k) {
            b[i] -= a[k * n + i] * b[k];
        }
        b[i] /= a[i * n + i];
    }
    return true;
}

// Newton direction of log L on the unit-trace plane, or nullopt when the
// curvature is singular or a modeled probability sits at the floor.
std::optional<CMatrix> newton_direction(const CompiledData &data, const std::vector<CMatrix> &basis,
                                        const std::vector<double> &coords, const std::vector<double> &probs) {
    const std::size_t n = basis.size();
    std::vector<double> grad(n, 0.0), curv(n * n, 0.0);
    for (std::size_t j = 0; j < data.size(); ++j) {
        const double p = probs[j];
        const double c = data.counts(j);
        if (c > 0.0 && p <= kProbabilityFloor) {
            return std::nullopt;
        }
        const double w = c > 0.0 ? c / p : 0.0;
        const double *x = coords.data() + j * n;
        for (std::size_t a = 0; a < n; ++a) {
            grad[a] += (w - data.exposure(j)) * x[a];
            if (c > 0.0) {
                for (std::size_t b = 0; b <= a; ++b) {
                    curv[a * n + b] += w / p * x[a] * x[b];
                }
            }
        }
    }
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < a; ++b) {
            curv[b * n + a] = curv[a * n + b];
        }
    }
    if (!cholesky_solve(std::move(curv), grad, n)) {
        return std::nullopt;
    }
    CMatrix step(data.dim());
    for (std::size_t a = 0; a < n; ++a) {
        step += basis[a] * grad[a];
    }
    return step;
}
} // namespace

MeasurementRecord::MeasurementRecord(PovmElement element, double time, std::int64_t counts)
    : element_(std::move(element)), time_(time), counts_(counts) {
    if (!(time_ >= 0.0) || !std::isfinite(time_)) {
        throw std::invalid_argument("measurement record time must be finite and >= 0");
    }
    if (counts_ < 0) {
        throw std::invalid_argument("measurement record counts must be >= 0");
    }
    if (time_ == 0.0 && counts_ != 0) {
        throw std::invalid_argument("measurement record has counts but zero exposition time");
    }
    if (std::abs(element_.weight() - 1.0) > kTraceOneTolerance) {
        std::ostringstream os;
        os << "measurement record element must be normalized (Tr M = " << element_.weight()
           << ")";
        throw std::invalid_argument(os.str());
    }
}

std::int64_t LikelihoodData::total_counts() const {
    std::int64_t n = 0;
    for (const auto &r : records) {
        n += r.counts();
    }
    return n;
}

double log_likelihood(const LikelihoodData &data, const DensityMatrix &rho) {
    const CompiledData compiled(data);
    if (compiled.dim() != rho.dim()) {
        throw std::invalid_argument("log_likelihood: state and data dimensions differ");
    }
    std::vector<double> probs;
    return compiled.evaluate(rho.matrix(), probs);
}

MleResult mle_solve(const LikelihoodData &data, const MleOptions &opts,
                    const std::optional<DensityMatrix> &start) {
    if (opts.max_iter < 1 || !(opts.tol > 0.0)) {
        throw std::invalid_argument("MLE options need max_iter >= 1 and tol > 0");
    }
    if (!(opts.dilution > 0.0 && opts.dilution <= 1.0)) {
        throw std::invalid_argument("MLE dilution must lie in (0, 1]");
    }
    const CompiledData compiled(data);
    const std::size_t dim = compiled.dim();
    DensityMatrix rho = start.value_or(maximally_mixed(dim));
    if (rho.dim() != dim) {
        throw std::invalid_argument("MLE start state has the wrong dimension");
    }

    std::vector<double> probs;
    double loglik = compiled.evaluate(rho.matrix(), probs);
    MleResult result{rho, 0, false, loglik, {}};
    if (opts.record_history) {
        result.history.push_back(loglik);
    }
    if (data.total_counts() == 0) {
        result.converged = true;
        return result;
    }

    const CMatrix g = compiled.exposure_operator();
    {
        const auto pinv = psd_pinv(g);
        if (!pinv.full_rank) {
            for (std::size_t j = 0; j < compiled.size(); ++j) {
                if (compiled.counts(j) > 0.0 && compiled.weight_outside(j, pinv.support) > 1e-9) {
                    throw NonIdentifiableDataError(
                        "exposure operator is singular and counts fall outside its support");
                }
            }
        }
    }

    const CMatrix identity = CMatrix::identity(dim);
    const auto basis = traceless_basis(dim);
    std::vector<double> coords;
    coords.reserve(compiled.size() * basis.size());
    for (std::size_t j = 0; j < compiled.size(); ++j) {
        CMatrix m(dim);
        compiled.add_scaled(j, 1.0, m);
        for (const auto &b : basis) {
            coords.push_back(trace_product_real(m, b));
        }
    }
    std::vector<double> cand_probs, newton_probs;
    for (int it = 1; it <= opts.max_iter; ++it) {
        const CMatrix r = compiled.count_operator(probs);
        // Stationarity with known intensity reads (R - G) rho = mu rho, where
        // mu = Tr((R - G) rho) is the multiplier of the unit-trace constraint.
        const double mu = trace_product_real(r, rho.matrix()) - trace_product_real(g, rho.matrix());
        auto pinv = psd_pinv(g + identity * mu);
        if (!pinv.full_rank) {
            pinv = psd_pinv(g);
        }
        const CMatrix step = pinv.inverse * r;
        const CMatrix pushed = step * rho.matrix() * step.adjoint();
        const double pushed_trace = pushed.trace().real();
        if (!(pushed_trace > 0.0) || !std::isfinite(pushed_trace)) {
            break;
        }
        const CMatrix target = pushed / pushed_trace;

        const CMatrix direction = target - rho.matrix();
        double eps = opts.dilution;
        bool accepted = false;
        CMatrix candidate;
        double cand_loglik = 0.0;
        for (int halving = 0; halving < 60; ++halving) {
            candidate = rho.matrix() + direction * eps;
            cand_loglik = compiled.evaluate(candidate, cand_probs);
            if (cand_loglik >= loglik) {
                accepted = true;
                break;
            }
            eps *= 0.5;
        }
        // Over-relax along the same direction while the likelihood keeps rising.
        if (accepted && eps == opts.dilution) {
            std::vector<double> ext_probs;
            for (int doubling = 0; doubling < kMaxOverRelaxation; ++doubling) {
                const CMatrix ext = rho.matrix() + direction * (2.0 * eps);
                if (hermitian_eig(ext).eigenvalues.front() < 0.0) {
                    break;
                }
                const double ext_loglik = compiled.evaluate(ext, ext_probs);
                if (!(ext_loglik > cand_loglik)) {
                    break;
                }
                eps *= 2.0;
                candidate = ext;
                cand_loglik = ext_loglik;
                std::swap(cand_probs, ext_probs);
            }
        }
        if (const auto dir = newton_direction(compiled, basis, coords, probs)) {
            double step = 1.0;
            for (int halving = 0; halving < 40; ++halving, step *= 0.5) {
                const CMatrix trial = rho.matrix() + *dir * step;
                if (hermitian_eig(trial).eigenvalues.front() < 0.0) {
                    continue;
                }
                const double trial_loglik = compiled.evaluate(trial, newton_probs);
                if (trial_loglik < loglik) {
                    continue;
                }
                if (!accepted || trial_loglik > cand_loglik) {
                    candidate = trial;
                    cand_loglik = trial_loglik;
                    std::swap(cand_probs, newton_probs);
                    accepted = true;
                }
                break;
            }
        }
        if (!accepted) {
            // No ascent left at double precision.
            result.converged = true;
            break;
        }
        const double change = trace_norm(candidate - rho.matrix());
        rho = DensityMatrix::normalized(candidate);
        loglik = cand_loglik;
        std::swap(probs, cand_probs);
        result.iterations = it;
        if (opts.record_history) {
            result.history.push_back(loglik);
        }
        if (change < opts.tol) {
            result.converged = true;
            break;
        }
    }

    if (opts.mix_floor > 0.0) {
        rho = regularize_full_rank(rho, opts.mix_floor);
        loglik = compiled.evaluate(rho.matrix(), probs);
    }
    result.estimate = rho;
    result.log_likelihood = loglik;
    return result;
}

DensityMatrix mle_estimate(const LikelihoodData &data, const MleOptions &opts) {
    return mle_solve(data, opts).estimate;
}

DensityMatrix regularize_full_rank(const DensityMatrix &rho, double delta) {
    if (!(delta >= 0.0 && delta <= 1.0)) {
        throw std::invalid_argument("regularize_full_rank: delta must lie in [0, 1]");
    }
    const std::size_t dim = rho.dim();
    CMatrix m = rho.matrix() * (1.0 - delta);
    for (std::size_t i = 0; i < dim; ++i) {
        m(i, i) += delta / static_cast<double>(dim);
    }
    return DensityMatrix::normalized(m);
}

} // namespace rankp
