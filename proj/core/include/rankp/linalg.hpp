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
 * Small dense complex matrices and the Hermitian kernels the quantum layer
 * needs: eigendecomposition, PSD square root, spectral functions, rank.
 *
 * Dimensions are expected to stay small (a qubit is D = 2, nothing beyond
 * D ~ 16 is supported efficiently).
 */

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rankp {

using Complex = std::complex<double>;

/// Raised when a routine that requires a Hermitian argument receives one
/// that is not, beyond tolerance.
class NotHermitianError : public std::invalid_argument {
  public:
    NotHermitianError(double deviation, double tolerance);
    [[nodiscard]] double deviation() const noexcept { return deviation_; }

  private:
    double deviation_;
};

/// Raised when a PSD routine meets an eigenvalue below the clamp window.
class NotPositiveError : public std::invalid_argument {
  public:
    NotPositiveError(double eigenvalue, double tolerance);
    [[nodiscard]] double eigenvalue() const noexcept { return eigenvalue_; }

  private:
    double eigenvalue_;
};

/// Square complex matrix, row-major.
class CMatrix {
  public:
    CMatrix() = default;
    explicit CMatrix(std::size_t dim);
    CMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static CMatrix identity(std::size_t dim);
    static CMatrix diagonal(std::span<const double> values);
    /// |v><v| (v is used as given, not normalized).
    static CMatrix outer(std::span<const Complex> v);
    /// Matrix whose columns are the given vectors.
    static CMatrix from_columns(const std::vector<std::vector<Complex>> &cols);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] bool empty() const noexcept { return dim_ == 0; }

    Complex &operator()(std::size_t row, std::size_t col) {
        return data_[row * dim_ + col];
    }
    const Complex &operator()(std::size_t row, std::size_t col) const {
        return data_[row * dim_ + col];
    }

    [[nodiscard]] std::span<const Complex> data() const noexcept { return data_; }
    [[nodiscard]] std::span<Complex> data() noexcept { return data_; }

    [[nodiscard]] std::vector<Complex> column(std::size_t col) const;

    [[nodiscard]] CMatrix adjoint() const;
    [[nodiscard]] Complex trace() const;
    /// Largest absolute entry.
    [[nodiscard]] double max_abs() const;
    [[nodiscard]] double max_abs_diff(const CMatrix &other) const;
    /// (A + A†)/2.
    [[nodiscard]] CMatrix hermitian_part() const;
    [[nodiscard]] bool is_hermitian(double tol = 1e-12) const;

    CMatrix &operator+=(const CMatrix &rhs);
    CMatrix &operator-=(const CMatrix &rhs);
    CMatrix &operator*=(Complex s);
    CMatrix &operator/=(Complex s);

    friend CMatrix operator+(CMatrix lhs, const CMatrix &rhs) { return lhs += rhs; }
    friend CMatrix operator-(CMatrix lhs, const CMatrix &rhs) { return lhs -= rhs; }
    friend CMatrix operator*(CMatrix lhs, Complex s) { return lhs *= s; }
    friend CMatrix operator*(Complex s, CMatrix rhs) { return rhs *= s; }
    friend CMatrix operator/(CMatrix lhs, Complex s) { return lhs /= s; }
    friend CMatrix operator*(const CMatrix &lhs, const CMatrix &rhs);

    friend bool operator==(const CMatrix &, const CMatrix &) = default;

  private:
    std::size_t dim_ = 0;
    std::vector<Complex> data_;
};

/// A x.
std::vector<Complex> apply(const CMatrix &a, std::span<const Complex> x);
/// <x|y>, conjugate-linear in the first argument.
Complex inner(std::span<const Complex> x, std::span<const Complex> y);
double norm(std::span<const Complex> x);
/// Re Tr(A B) without forming the product.
double trace_product_real(const CMatrix &a, const CMatrix &b);
/// Sum of absolute eigenvalues of a Hermitian matrix.
double trace_norm(const CMatrix &hermitian);

struct EigenDecomposition {
    std::vector<double> eigenvalues; ///< ascending
    CMatrix eigenvectors;            ///< unitary, eigenvectors as columns

    [[nodiscard]] CMatrix reconstruct() const;
};

/// Relative Hermiticity tolerance used by the spectral routines: entries of
/// A - A† may deviate by this times max(1, max|A|).
inline constexpr double kHermitianTolerance = 1e-12;
/// Eigenvalues in [-kPsdClamp, 0] are rounded up to zero in PSD routines.
inline constexpr double kPsdClamp = 1e-10;

/// Spectral decomposition of a Hermitian matrix. Closed form for D = 2,
/// cyclic Jacobi sweeps otherwise.
EigenDecomposition hermitian_eig(const CMatrix &a);

/// U f(Λ) U† for Hermitian A.
CMatrix spectral_function(const EigenDecomposition &eig,
                          const std::function<double(double)> &f);

/// Principal square root of a PSD matrix.
CMatrix psd_sqrt(const CMatrix &a);

/// Number of eigenvalues (singular values for non-Hermitian input) whose
/// magnitude exceeds tol times the largest one.
int numeric_rank(const CMatrix &a, double tol);

/// Orthonormalizes `vectors` in order (modified Gram-Schmidt, two passes).
/// Vectors that become numerically dependent are dropped.
std::vector<std::vector<Complex>>
gram_schmidt(const std::vector<std::vector<Complex>> &vectors, double drop_tol = 1e-10);

} // namespace rankp
