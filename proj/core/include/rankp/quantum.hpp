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
 * States, POVM elements, the Born rule, fidelity and Bures distance, the
 * qubit mutually unbiased bases, and random-state samplers.
 *
 * Basis convention for qubits: computational basis = {|H>, |V>},
 * |D/A> = (|H> +- |V>)/sqrt2, |R/L> = (|H> +- i|V>)/sqrt2.
 */

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rankp/linalg.hpp"
#include "rankp/random.hpp"

namespace rankp {

/// Raised when a matrix fails the density-matrix invariants.
class InvalidStateError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Hermitian, unit-trace, positive semidefinite matrix.
class DensityMatrix {
  public:
    static constexpr double kTraceTolerance = 1e-10;

    /// Checks every invariant; throws InvalidStateError on violation.
    static DensityMatrix from_matrix(const CMatrix &m);
    /// Hermitian part of `m` scaled to unit trace. The caller guarantees
    /// positivity (e.g. the result of A rho A†).
    static DensityMatrix normalized(const CMatrix &m);
    /// |psi><psi| / <psi|psi>.
    static DensityMatrix pure(std::span<const Complex> psi);

    [[nodiscard]] const CMatrix &matrix() const noexcept { return m_; }
    [[nodiscard]] std::size_t dim() const noexcept { return m_.dim(); }
    [[nodiscard]] double purity() const;

    friend bool operator==(const DensityMatrix &, const DensityMatrix &) = default;

  private:
    explicit DensityMatrix(CMatrix m) : m_(std::move(m)) {}
    CMatrix m_;
};

/// Hermitian PSD operator; its trace is the weight (an exposition-time
/// multiplier once normalized). Zero-weight elements are inert.
class PovmElement {
  public:
    /// Checks Hermiticity and positivity (with the usual clamp).
    static PovmElement from_matrix(const CMatrix &m);
    /// |v><v|; the weight is <v|v>.
    static PovmElement projector(std::span<const Complex> v);
    /// Trusted construction for operators that are PSD by construction.
    static PovmElement unchecked(CMatrix m);

    [[nodiscard]] const CMatrix &matrix() const noexcept { return m_; }
    [[nodiscard]] std::size_t dim() const noexcept { return m_.dim(); }
    [[nodiscard]] double weight() const noexcept { return weight_; }
    [[nodiscard]] bool inert() const noexcept { return weight_ <= 0.0; }

  private:
    PovmElement(CMatrix m, double w) : m_(std::move(m)), weight_(w) {}
    CMatrix m_;
    double weight_ = 0.0;
};

/// Ordered set of POVM elements. When `complete` is set the elements sum to
/// the identity within kCompletenessTolerance.
class Povm {
  public:
    static constexpr double kCompletenessTolerance = 1e-9;

    Povm(std::vector<PovmElement> elements, bool complete);

    [[nodiscard]] const std::vector<PovmElement> &elements() const & noexcept { return elements_; }
    [[nodiscard]] std::vector<PovmElement> elements() && { return std::move(elements_); }
    [[nodiscard]] bool complete() const noexcept { return complete_; }
    [[nodiscard]] std::size_t size() const noexcept { return elements_.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] CMatrix sum() const;

  private:
    std::vector<PovmElement> elements_;
    bool complete_;
    std::size_t dim_ = 0;
};

/// Tr(M rho), clamped to [0, Tr M].
double born_probability(const PovmElement &m, const DensityMatrix &rho);

/// Tr^2 sqrt(sqrt(rho) sigma sqrt(rho)); closed form for qubits.
double fidelity(const DensityMatrix &rho, const DensityMatrix &sigma);

/// 2 - 2 sqrt(F), evaluated without cancellation near F = 1.
double bures_sq(const DensityMatrix &rho, const DensityMatrix &sigma);

/// Six rank-1 projectors H, V, D, A, R, L (three bases, not complete).
Povm mub_qubit();

/// The six MUB vectors, same order as mub_qubit().
std::array<std::array<Complex, 2>, 6> mub_qubit_vectors();

DensityMatrix maximally_mixed(std::size_t dim);

/// Vector of independent standard complex Gaussians (E|z|^2 = 1).
std::vector<Complex> complex_gaussian_vector(std::size_t dim, Rng &rng);

/// Haar-random unitary (Gram-Schmidt of a Ginibre matrix).
CMatrix random_haar_unitary(std::size_t dim, Rng &rng);

/// Haar-random pure state.
DensityMatrix random_pure_haar(std::size_t dim, Rng &rng);

/// Bures-ensemble mixed state: (1 + W) G G† (1 + W)† / Tr(.), W Haar, G Ginibre.
DensityMatrix random_bures_mixed(std::size_t dim, Rng &rng);

/// Bloch vector (Tr rho sigma_x, Tr rho sigma_y, Tr rho sigma_z) of a 2x2
/// Hermitian operator, without trace normalization.
std::array<double, 3> bloch_vector(const CMatrix &m);

} // namespace rankp
