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
 * Run aggregation, power-law fits d(N) = alpha N^beta, efficiency ratios and
 * the asymptotic qubit bounds.
 */

#pragma once

#include <span>
#include <vector>

#include "rankp/simulator.hpp"

namespace rankp {

struct CurvePoint {
    double n = 0.0;
    double mean = 0.0;
    double sem = 0.0; ///< standard deviation of the mean
};

struct ConvergenceCurve {
    std::vector<CurvePoint> points;
    int runs = 0;
};

struct PowerLawFit {
    double alpha = 0.0;
    double beta = 0.0;
    double alpha_err = 0.0;
    double beta_err = 0.0;
    double n_lo = 0.0;
    double n_hi = 0.0;
    int points = 0;
};

struct CurveOptions {
    /// Grid points sit at 10^(k / points_per_decade) for integer k.
    double points_per_decade = 10.0;
};

/// Interpolates every trace (linear in log N, log d) onto a shared anchored
/// log grid covering the common N support, then averages per grid point.
ConvergenceCurve average_curves(std::span<const TomographyTrace> traces,
                                const CurveOptions &opts = {});

/// Weighted least squares of ln d against ln N over points with
/// n_lo <= N <= n_hi. Weights follow from sem/mean; if any sem in the window
/// is zero, all points get unit weight.
PowerLawFit fit_power_law(const ConvergenceCurve &curve, double n_lo, double n_hi);

/// Geometric mean over [n1, n2] of fit2(N) / fit1(N):
/// (alpha2 / alpha1) (n1 n2)^((beta2 - beta1) / 2).
double efficiency_ratio(const PowerLawFit &fit1, const PowerLawFit &fit2, double n1, double n2);

enum class BoundKind { MixedQubit, PureQubit };

/// 9 / (4N) for mixed qubits, 1 / N for pure ones.
double gill_massar_bound(double n, BoundKind kind);

/// Value of the fitted law at N.
double evaluate(const PowerLawFit &fit, double n);

} // namespace rankp
