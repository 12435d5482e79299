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

#include "rankp/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rankp {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char *what) {
    if (a != b) {
        std::ostringstream os;
        os << what << ": dimension mismatch (" << a << " vs " << b << ")";
        throw std::invalid_argument(os.str());
    }
}

double det2(const CMatrix &m) {
    return m(0, 0).real() * m(1, 1).real() - std::norm(m(0, 1));
}

} // namespace

DensityMatrix DensityMatrix::from_matrix(const CMatrix &m) {
    if (m.empty()) {
        throw InvalidStateError("density matrix must have dimension >= 1");
    }
    if (!m.is_hermitian(1e-12)) {
        throw InvalidStateError("density matrix is not Hermitian");
    }
    const double tr = m.trace().real();
    if (std::abs(tr - 1.0) > kTraceTolerance) {
        std::ostringstream os;
        os << "density matrix trace " << tr << " differs from 1";
        throw InvalidStateError(os.str());
    }
    const auto eig = hermitian_eig(m);
    if (eig.eigenvalues.front() < -kPsdClamp) {
        std::ostringstream os;
        os << "density matrix has negative eigenvalue " << eig.eigenvalues.front();
        throw InvalidStateError(os.str());
    }
    return DensityMatrix(m.hermitian_part());
}

DensityMatrix DensityMatrix::normalized(const CMatrix &m) {
    CMatrix h = m.hermitian_part();
    const double tr = h.trace().real();
    if (!(tr > 0.0) || !std::isfinite(tr)) {
        throw InvalidStateError("cannot normalize an operator with non-positive trace");
    }
    h /= tr;
    return DensityMatrix(std::move(h));
}

DensityMatrix DensityMatrix::pure(std::span<const Complex> psi) {
    const double n = norm(psi);
    if (n == 0.0) {
        throw InvalidStateError("pure state vector must be nonzero");
    }
    CMatrix m = CMatrix::outer(psi);
    m /= n * n;
    return DensityMatrix(std::move(m));
}

double DensityMatrix::purity() const { return trace_product_real(m_, m_); }

PovmElement PovmElement::from_matrix(const CMatrix &m) {
    if (m.empty()) {
        throw std::invalid_argument("POVM element must have dimension >= 1");
    }
    const double tol = kHermitianTolerance * std::max(1.0, m.max_abs());
    if (!m.is_hermitian(tol)) {
        throw NotHermitianError(m.max_abs_diff(m.adjoint()), tol);
    }
    const auto eig = hermitian_eig(m);
    const double clamp = kPsdClamp * std::max(1.0, std::abs(eig.eigenvalues.back()));
    if (eig.eigenvalues.front() < -clamp) {
        throw NotPositiveError(eig.eigenvalues.front(), clamp);
    }
    CMatrix h = m.hermitian_part();
    const double w = std::max(0.0, h.trace().real());
    return PovmElement(std::move(h), w);
}

PovmElement PovmElement::projector(std::span<const Complex> v) {
    CMatrix m = CMatrix::outer(v);
    const double w = m.trace().real();
    return PovmElement(std::move(m), w);
}

PovmElement PovmElement::unchecked(CMatrix m) {
    CMatrix h = m.hermitian_part();
    const double w = std::max(0.0, h.trace().real());
    return PovmElement(std::move(h), w);
}

Povm::Povm(std::vector<PovmElement> elements, bool complete)
    : elements_(std::move(elements)), complete_(complete) {
    if (elements_.empty()) {
        throw std::invalid_argument("POVM must contain at least one element");
    }
    dim_ = elements_.front().dim();
    for (const auto &e : elements_) {
        require_same_dim(e.dim(), dim_, "Povm");
    }
    if (complete_) {
        const double dev = sum().max_abs_diff(CMatrix::identity(dim_));
        if (dev > kCompletenessTolerance) {
            std::ostringstream os;
            os << "POVM flagged complete but elements deviate from identity by " << dev;
            throw std::invalid_argument(os.str());
        }
    }
}

CMatrix Povm::sum() const {
    CMatrix s(dim_);
    for (const auto &e : elements_) {
        s += e.matrix();
    }
    return s;
}

double born_probability(const PovmElement &m, const DensityMatrix &rho) {
    require_same_dim(m.dim(), rho.dim(), "born_probability");
    const double p = trace_product_real(m.matrix(), rho.matrix());
    return std::clamp(p, 0.0, m.weight());
}

double fidelity(const DensityMatrix &rho, const DensityMatrix &sigma) {
    require_same_dim(rho.dim(), sigma.dim(), "fidelity");
    double f = 0.0;
    if (rho.dim() == 2) {
        // For qubits Tr^2 sqrt(...) = Tr(rho sigma) + 2 sqrt(det rho det sigma).
        const double dets = std::max(0.0, det2(rho.matrix())) * std::max(0.0, det2(sigma.matrix()));
        f = trace_product_real(rho.matrix(), sigma.matrix()) + 2.0 * std::sqrt(dets);
    } else {
        const CMatrix root = psd_sqrt(rho.matrix());
        const auto eig = hermitian_eig((root * sigma.matrix() * root).hermitian_part());
        double s = 0.0;
        for (double v : eig.eigenvalues) {
            s += std::sqrt(std::max(v, 0.0));
        }
        f = s * s;
    }
    return std::clamp(f, 0.0, 1.0);
}

double bures_sq(const DensityMatrix &rho, const DensityMatrix &sigma) {
    const double f = fidelity(rho, sigma);
    return 2.0 * (1.0 - f) / (1.0 + std::sqrt(f));
}

std::array<std::array<Complex, 2>, 6> mub_qubit_vectors() {
    const double s = 1.0 / std::sqrt(2.0);
    const Complex i{0.0, 1.0};
    return {{
        {1.0, 0.0},      // H
        {0.0, 1.0},      // V
        {s, s},          // D
        {s, -s},         // A
        {s, i * s},      // R
        {s, -i * s},     // L
    }};
}

Povm mub_qubit() {
    std::vector<PovmElement> elements;
    for (const auto &v : mub_qubit_vectors()) {
        elements.push_back(PovmElement::projector(v));
    }
    return Povm(std::move(elements), false);
}

DensityMatrix maximally_mixed(std::size_t dim) {
    if (dim == 0) {
        throw std::invalid_argument("maximally_mixed: dimension must be >= 1");
    }
    CMatrix m = CMatrix::identity(dim);
    m /= static_cast<double>(dim);
    return DensityMatrix::normalized(m);
}

std::vector<Complex> complex_gaussian_vector(std::size_t dim, Rng &rng) {
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    std::vector<Complex> v(dim);
    for (auto &z : v) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        z = {re, im};
    }
    return v;
}

CMatrix random_haar_unitary(std::size_t dim, Rng &rng) {
    for (;;) {
        std::vector<std::vector<Complex>> cols;
        for (std::size_t c = 0; c < dim; ++c) {
            cols.push_back(complex_gaussian_vector(dim, rng));
        }
        auto basis = gram_schmidt(cols);
        if (basis.size() == dim) {
            return CMatrix::from_columns(basis);
        }
    }
}

DensityMatrix random_pure_haar(std::size_t dim, Rng &rng) {
    if (dim < 2) {
        throw std::invalid_argument("random_pure_haar: dimension must be >= 2");
    }
    for (;;) {
        auto v = complex_gaussian_vector(dim, rng);
        if (norm(v) > 0.0) {
            return DensityMatrix::pure(v);
        }
    }
}

DensityMatrix random_bures_mixed(std::size_t dim, Rng &rng) {
    if (dim < 2) {
        throw std::invalid_argument("random_bures_mixed: dimension must be >= 2");
    }
    CMatrix g(dim);
    for (std::size_t c = 0; c < dim; ++c) {
        const auto col = complex_gaussian_vector(dim, rng);
        for (std::size_t r = 0; r < dim; ++r) {
            g(r, c) = col[r];
        }
    }
    const CMatrix w = random_haar_unitary(dim, rng);
    const CMatrix a = (CMatrix::identity(dim) + w) * g;
    return DensityMatrix::normalized(a * a.adjoint());
}

std::array<double, 3> bloch_vector(const CMatrix &m) {
    require_same_dim(m.dim(), 2, "bloch_vector");
    return {2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(), m(0, 0).real() - m(1, 1).real()};
}

} // namespace rankp
