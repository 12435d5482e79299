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

#include "rankp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace rankp {

namespace {

std::string hermitian_message(double deviation, double tolerance) {
    std::ostringstream os;
    os << "matrix is not Hermitian: max|A - A^dagger| = " << deviation
       << " exceeds tolerance " << tolerance;
    return os.str();
}

std::string positive_message(double eigenvalue, double tolerance) {
    std::ostringstream os;
    os << "matrix is not positive semidefinite: eigenvalue " << eigenvalue
       << " is below -" << tolerance;
    return os.str();
}

void require_same_dim(const CMatrix &a, const CMatrix &b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("matrix dimension mismatch: " + std::to_string(a.dim()) +
                                    " vs " + std::to_string(b.dim()));
    }
}

// Eigenpairs of [[a, b], [conj(b), d]] with a, d real, ascending.
struct Eig2 {
    double low, high;
    Complex v0, v1; // eigenvector of `low`; the other one is (-conj(v1), conj(v0))
};

Eig2 eig2(double a, Complex b, double d) {
    const double mean = 0.5 * (a + d);
    const double half_gap = 0.5 * (a - d);
    const double babs = std::abs(b);
    const double r = std::hypot(half_gap, babs);
    Eig2 out{mean - r, mean + r, 1.0, 0.0};
    if (babs == 0.0) {
        if (a > d) {
            out.v0 = 0.0;
            out.v1 = 1.0;
        }
        return out;
    }
    // Pick the better conditioned of the two row-derived null vectors.
    Complex x, y;
    if (half_gap >= 0.0) {
        x = b;
        y = -(half_gap + r);
    } else {
        x = half_gap - r;
        y = std::conj(b);
    }
    const double n = std::sqrt(std::norm(x) + std::norm(y));
    out.v0 = x / n;
    out.v1 = y / n;
    return out;
}

EigenDecomposition eig_2x2(const CMatrix &a) {
    const Eig2 e = eig2(a(0, 0).real(), a(0, 1), a(1, 1).real());
    EigenDecomposition out;
    out.eigenvalues = {e.low, e.high};
    out.eigenvectors = CMatrix(2);
    out.eigenvectors(0, 0) = e.v0;
    out.eigenvectors(1, 0) = e.v1;
    out.eigenvectors(0, 1) = -std::conj(e.v1);
    out.eigenvectors(1, 1) = std::conj(e.v0);
    return out;
}

double off_diagonal_norm2(const CMatrix &a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < a.dim(); ++j) {
            if (i != j) {
                s += std::norm(a(i, j));
            }
        }
    }
    return s;
}

EigenDecomposition eig_jacobi(CMatrix a) {
    const std::size_t n = a.dim();
    CMatrix v = CMatrix::identity(n);
    double total = 0.0;
    for (auto z : a.data()) {
        total += std::norm(z);
    }
    const double threshold = total * 1e-32;

    for (int sweep = 0; sweep < 100; ++sweep) {
        if (off_diagonal_norm2(a) <= threshold) {
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) == 0.0) {
                    continue;
                }
                // Exact 2x2 diagonalization of the (p, q) block; W has the
                // block eigenvectors as columns.
                const Eig2 e = eig2(a(p, p).real(), a(p, q), a(q, q).real());
                const Complex w00 = e.v0, w10 = e.v1;
                const Complex w01 = -std::conj(e.v1), w11 = std::conj(e.v0);

                // A <- A J  (columns p, q)
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * w00 + akq * w10;
                    a(k, q) = akp * w01 + akq * w11;
                }
                // A <- J† A  (rows p, q)
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex apk = a(p, k), aqk = a(q, k);
                    a(p, k) = std::conj(w00) * apk + std::conj(w10) * aqk;
                    a(q, k) = std::conj(w01) * apk + std::conj(w11) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * w00 + vkq * w10;
                    v(k, q) = vkp * w01 + vkq * w11;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return a(i, i).real() < a(j, j).real();
    });
    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = CMatrix(n);
    for (std::size_t c = 0; c < n; ++c) {
        out.eigenvalues[c] = a(order[c], order[c]).real();
        for (std::size_t r = 0; r < n; ++r) {
            out.eigenvectors(r, c) = v(r, order[c]);
        }
    }
    return out;
}

} // namespace

NotHermitianError::NotHermitianError(double deviation, double tolerance)
    : std::invalid_argument(hermitian_message(deviation, tolerance)), deviation_(deviation) {}

NotPositiveError::NotPositiveError(double eigenvalue, double tolerance)
    : std::invalid_argument(positive_message(eigenvalue, tolerance)), eigenvalue_(eigenvalue) {}

CMatrix::CMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, Complex{0.0, 0.0}) {}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : CMatrix(rows.size()) {
    std::size_t r = 0;
    for (const auto &row : rows) {
        if (row.size() != dim_) {
            throw std::invalid_argument("CMatrix rows must form a square matrix");
        }
        std::copy(row.begin(), row.end(), data_.begin() + static_cast<std::ptrdiff_t>(r * dim_));
        ++r;
    }
}

CMatrix CMatrix::identity(std::size_t dim) {
    CMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

CMatrix CMatrix::diagonal(std::span<const double> values) {
    CMatrix m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        m(i, i) = values[i];
    }
    return m;
}

CMatrix CMatrix::outer(std::span<const Complex> v) {
    CMatrix m(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = 0; j < v.size(); ++j) {
            m(i, j) = v[i] * std::conj(v[j]);
        }
    }
    return m;
}

CMatrix CMatrix::from_columns(const std::vector<std::vector<Complex>> &cols) {
    CMatrix m(cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (cols[c].size() != cols.size()) {
            throw std::invalid_argument("from_columns: expected square set of column vectors");
        }
        for (std::size_t r = 0; r < cols.size(); ++r) {
            m(r, c) = cols[c][r];
        }
    }
    return m;
}

std::vector<Complex> CMatrix::column(std::size_t col) const {
    std::vector<Complex> out(dim_);
    for (std::size_t r = 0; r < dim_; ++r) {
        out[r] = (*this)(r, col);
    }
    return out;
}

CMatrix CMatrix::adjoint() const {
    CMatrix m(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) {
            m(j, i) = std::conj((*this)(i, j));
        }
    }
    return m;
}

Complex CMatrix::trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        t += (*this)(i, i);
    }
    return t;
}

double CMatrix::max_abs() const {
    double m = 0.0;
    for (auto z : data_) {
        m = std::max(m, std::abs(z));
    }
    return m;
}

double CMatrix::max_abs_diff(const CMatrix &other) const {
    require_same_dim(*this, other);
    double m = 0.0;
    for (std::size_t k = 0; k < data_.size(); ++k) {
        m = std::max(m, std::abs(data_[k] - other.data_[k]));
    }
    return m;
}

CMatrix CMatrix::hermitian_part() const {
    CMatrix m(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) {
            m(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
        }
    }
    return m;
}

bool CMatrix::is_hermitian(double tol) const {
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = i; j < dim_; ++j) {
            if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) {
                return false;
            }
        }
    }
    return true;
}

CMatrix &CMatrix::operator+=(const CMatrix &rhs) {
    require_same_dim(*this, rhs);
    for (std::size_t k = 0; k < data_.size(); ++k) {
        data_[k] += rhs.data_[k];
    }
    return *this;
}

CMatrix &CMatrix::operator-=(const CMatrix &rhs) {
    require_same_dim(*this, rhs);
    for (std::size_t k = 0; k < data_.size(); ++k) {
        data_[k] -= rhs.data_[k];
    }
    return *this;
}

CMatrix &CMatrix::operator*=(Complex s) {
    for (auto &z : data_) {
        z *= s;
    }
    return *this;
}

CMatrix &CMatrix::operator/=(Complex s) {
    for (auto &z : data_) {
        z /= s;
    }
    return *this;
}

CMatrix operator*(const CMatrix &lhs, const CMatrix &rhs) {
    require_same_dim(lhs, rhs);
    const std::size_t n = lhs.dim();
    CMatrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const Complex l = lhs(i, k);
            for (std::size_t j = 0; j < n; ++j) {
                out(i, j) += l * rhs(k, j);
            }
        }
    }
    return out;
}

std::vector<Complex> apply(const CMatrix &a, std::span<const Complex> x) {
    if (x.size() != a.dim()) {
        throw std::invalid_argument("apply: vector length does not match matrix dimension");
    }
    std::vector<Complex> y(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        Complex s = 0.0;
        for (std::size_t j = 0; j < a.dim(); ++j) {
            s += a(i, j) * x[j];
        }
        y[i] = s;
    }
    return y;
}

Complex inner(std::span<const Complex> x, std::span<const Complex> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("inner: vector length mismatch");
    }
    Complex s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += std::conj(x[i]) * y[i];
    }
    return s;
}

double norm(std::span<const Complex> x) {
    double s = 0.0;
    for (auto z : x) {
        s += std::norm(z);
    }
    return std::sqrt(s);
}

double trace_product_real(const CMatrix &a, const CMatrix &b) {
    require_same_dim(a, b);
    const std::size_t n = a.dim();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const Complex x = a(i, k), y = b(k, i);
            s += x.real() * y.real() - x.imag() * y.imag();
        }
    }
    return s;
}

double trace_norm(const CMatrix &hermitian) {
    const auto eig = hermitian_eig(hermitian);
    double s = 0.0;
    for (double v : eig.eigenvalues) {
        s += std::abs(v);
    }
    return s;
}

CMatrix EigenDecomposition::reconstruct() const {
    return spectral_function(*this, [](double x) { return x; });
}

EigenDecomposition hermitian_eig(const CMatrix &a) {
    if (a.empty()) {
        throw std::invalid_argument("hermitian_eig: empty matrix");
    }
    const double tol = kHermitianTolerance * std::max(1.0, a.max_abs());
    const double deviation = a.max_abs_diff(a.adjoint());
    if (deviation > tol) {
        throw NotHermitianError(deviation, tol);
    }
    const CMatrix h = a.hermitian_part();
    if (h.dim() == 1) {
        EigenDecomposition out;
        out.eigenvalues = {h(0, 0).real()};
        out.eigenvectors = CMatrix::identity(1);
        return out;
    }
    if (h.dim() == 2) {
        return eig_2x2(h);
    }
    return eig_jacobi(h);
}

CMatrix spectral_function(const EigenDecomposition &eig, const std::function<double(double)> &f) {
    const std::size_t n = eig.eigenvectors.dim();
    std::vector<double> fv(n);
    for (std::size_t k = 0; k < n; ++k) {
        fv[k] = f(eig.eigenvalues[k]);
    }
    CMatrix out(n);
    const CMatrix &u = eig.eigenvectors;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            Complex s = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                s += u(i, k) * fv[k] * std::conj(u(j, k));
            }
            out(i, j) = s;
            out(j, i) = std::conj(s);
        }
        out(i, i) = out(i, i).real();
    }
    return out;
}

CMatrix psd_sqrt(const CMatrix &a) {
    const auto eig = hermitian_eig(a);
    const double tol = kPsdClamp * std::max(1.0, std::abs(eig.eigenvalues.back()));
    if (eig.eigenvalues.front() < -tol) {
        throw NotPositiveError(eig.eigenvalues.front(), tol);
    }
    return spectral_function(eig, [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
}

int numeric_rank(const CMatrix &a, double tol) {
    if (!(tol > 0.0)) {
        throw std::invalid_argument("numeric_rank: tolerance must be positive");
    }
    std::vector<double> magnitudes;
    const double herm_tol = kHermitianTolerance * std::max(1.0, a.max_abs());
    if (a.max_abs_diff(a.adjoint()) <= herm_tol) {
        for (double v : hermitian_eig(a).eigenvalues) {
            magnitudes.push_back(std::abs(v));
        }
    } else {
        for (double v : hermitian_eig(a.adjoint() * a).eigenvalues) {
            magnitudes.push_back(std::sqrt(std::max(v, 0.0)));
        }
    }
    const double largest = *std::max_element(magnitudes.begin(), magnitudes.end());
    if (largest == 0.0) {
        return 0;
    }
    return static_cast<int>(std::count_if(magnitudes.begin(), magnitudes.end(),
                                          [&](double m) { return m > tol * largest; }));
}

std::vector<std::vector<Complex>> gram_schmidt(const std::vector<std::vector<Complex>> &vectors,
                                               double drop_tol) {
    std::vector<std::vector<Complex>> basis;
    for (const auto &v : vectors) {
        std::vector<Complex> w = v;
        const double original = norm(w);
        if (original == 0.0) {
            continue;
        }
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto &b : basis) {
                const Complex c = inner(b, w);
                for (std::size_t i = 0; i < w.size(); ++i) {
                    w[i] -= c * b[i];
                }
            }
        }
        const double n = norm(w);
        if (n <= drop_tol * original) {
            continue;
        }
        for (auto &z : w) {
            z /= n;
        }
        basis.push_back(std::move(w));
    }
    return basis;
}

} // namespace rankp
