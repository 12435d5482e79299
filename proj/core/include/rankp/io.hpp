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
 * Flat-file formats: per-run trace tables, raw record streams, averaged
 * curves and analysis reports. Reals are written with 17 significant digits,
 * so every reader returns bit-identical values.
 *
 * Trace table (comma separated, one header line):
 *
 *     protocol,run_id,seed,iteration,n_emit,n_det,d_bures_sq,fidelity,loglik,re_00,im_00,...
 *
 * Missing distances are empty fields. Record stream:
 *
 *     # rankp-records dim=2 intensity=1000 efficiency=1
 *     group_id,re_00,im_00,...,re_11,im_11,time,counts
 *
 * Curves and reports are `key = value` sections followed by CSV tables.
 */

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rankp/analysis.hpp"
#include "rankp/simulator.hpp"

namespace rankp {

class FormatError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// `%.17g`; NaN and infinities are rejected.
std::string format_real(double x);
/// Strict full-string parse; throws FormatError.
double parse_real(const std::string &s);

void write_trace(std::ostream &os, const TomographyTrace &trace);
/// The record stream, if any, is not part of the table and is not restored.
TomographyTrace read_trace(std::istream &is);

void write_records(std::ostream &os, const RecordStream &stream);
RecordStream read_records(std::istream &is);

struct CurveFile {
    std::string protocol;
    std::string ensemble;
    ConvergenceCurve curve;
};

void write_curve(std::ostream &os, const CurveFile &curve);
CurveFile read_curve(std::istream &is);

struct NamedFit {
    std::string label;
    PowerLawFit fit;
};

struct RatioEntry {
    std::string numerator;   ///< label of fit2
    std::string denominator; ///< label of fit1
    double n1 = 0.0;
    double n2 = 0.0;
    double value = 0.0;
};

struct ReportCurve {
    std::string label;
    BoundKind bound = BoundKind::MixedQubit;
    ConvergenceCurve curve;
};

struct AnalysisReport {
    std::vector<NamedFit> fits;
    std::vector<RatioEntry> ratios;
    std::vector<ReportCurve> curves; ///< written with a bound column
};

void write_report(std::ostream &os, const AnalysisReport &report);
AnalysisReport read_report(std::istream &is);

/// Opens the file or throws std::runtime_error naming it.
std::string read_file(const std::filesystem::path &path);
/// Writes through a temporary sibling and renames it into place.
void write_file(const std::filesystem::path &path, const std::string &contents);

} // namespace rankp
