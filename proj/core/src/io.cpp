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

#include "rankp/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace rankp {

namespace {

const char *const kTraceColumns = "protocol,run_id,seed,iteration,n_emit,n_det,d_bures_sq,fidelity,loglik";
constexpr std::size_t kTraceFixedColumns = 9;
const char *const kRecordsMagic = "# rankp-records";
const char *const kCurveMagic = "# rankp-curve";
const char *const kReportMagic = "# rankp-report";

std::vector<std::string> split(const std::string &line, char sep = ',') {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, sep)) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

std::string strip(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool next_line(std::istream &is, std::string &line) {
    if (!std::getline(is, line)) {
        return false;
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return true;
}

template <class Int> Int parse_int(const std::string &s) {
    if (s.empty()) {
        throw FormatError("expected an integer, got an empty field");
    }
    errno = 0;
    char *end = nullptr;
    Int value{};
    if constexpr (std::is_unsigned_v<Int>) {
        if (s.front() == '-') {
            throw FormatError("expected a non-negative integer, got '" + s + "'");
        }
        value = static_cast<Int>(std::strtoull(s.c_str(), &end, 10));
    } else {
        value = static_cast<Int>(std::strtoll(s.c_str(), &end, 10));
    }
    if (errno != 0 || end != s.c_str() + s.size()) {
        throw FormatError("expected an integer, got '" + s + "'");
    }
    return value;
}

std::size_t square_dim(std::size_t reals) {
    // reals = 2 D^2
    const auto d = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(reals) / 2.0)));
    if (d == 0 || 2 * d * d != reals) {
        throw FormatError("matrix column count " + std::to_string(reals) + " is not 2 D^2");
    }
    return d;
}

void write_matrix(std::ostream &os, const CMatrix &m) {
    for (const auto &z : m.data()) {
        os << ',' << format_real(z.real()) << ',' << format_real(z.imag());
    }
}

CMatrix read_matrix(const std::vector<std::string> &fields, std::size_t first, std::size_t dim) {
    CMatrix m(dim);
    auto data = m.data();
    for (std::size_t k = 0; k < dim * dim; ++k) {
        data[k] = {parse_real(fields[first + 2 * k]), parse_real(fields[first + 2 * k + 1])};
    }
    return m;
}

std::string bound_name(BoundKind kind) { return kind == BoundKind::MixedQubit ? "mixed" : "pure"; }

BoundKind parse_bound(const std::string &s) {
    if (s == "mixed") {
        return BoundKind::MixedQubit;
    }
    if (s == "pure") {
        return BoundKind::PureQubit;
    }
    throw FormatError("unknown bound kind '" + s + "'");
}

using KeyValues = std::map<std::string, std::string>;

const std::string &require(const KeyValues &kv, const std::string &key) {
    const auto it = kv.find(key);
    if (it == kv.end()) {
        throw FormatError("missing key '" + key + "'");
    }
    return it->second;
}

/// Reads `key = value` lines until a CSV header line or section start,
/// which is returned through `stop` (empty at end of input).
KeyValues read_key_values(std::istream &is, std::string &stop) {
    KeyValues kv;
    std::string line;
    stop.clear();
    while (next_line(is, line)) {
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find(" = ");
        if (line.front() == '[' || eq == std::string::npos) {
            stop = line;
            return kv;
        }
        kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 3));
    }
    return kv;
}

void write_points(std::ostream &os, const ConvergenceCurve &curve) {
    for (const auto &p : curve.points) {
        os << format_real(p.n) << ',' << format_real(p.mean) << ',' << format_real(p.sem) << '\n';
    }
}

/// Reads rows until a blank line, a section start or end of input.
std::vector<CurvePoint> read_points(std::istream &is, std::size_t columns, std::string &stop) {
    std::vector<CurvePoint> points;
    std::string line;
    stop.clear();
    while (next_line(is, line)) {
        if (line.empty()) {
            break;
        }
        if (line.front() == '[') {
            stop = line;
            break;
        }
        const auto f = split(line);
        if (f.size() != columns) {
            throw FormatError("curve row has " + std::to_string(f.size()) + " fields, expected " +
                              std::to_string(columns));
        }
        points.push_back({parse_real(f[0]), parse_real(f[1]), parse_real(f[2])});
    }
    return points;
}

} // namespace

std::string format_real(double x) {
    if (!std::isfinite(x)) {
        throw FormatError("cannot write a non-finite value");
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_real(const std::string &s) {
    if (s.empty()) {
        throw FormatError("expected a number, got an empty field");
    }
    errno = 0;
    char *end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (errno == ERANGE && std::abs(x) > 1.0) {
        throw FormatError("number out of range: '" + s + "'");
    }
    if (end != s.c_str() + s.size() || !std::isfinite(x)) {
        throw FormatError("expected a number, got '" + s + "'");
    }
    return x;
}

void write_trace(std::ostream &os, const TomographyTrace &trace) {
    if (trace.protocol.find_first_of(",\n") != std::string::npos) {
        throw FormatError("protocol name must not contain commas or newlines");
    }
    const std::size_t dim = trace.entries.empty() ? 2 : trace.entries.front().estimate.dim();
    os << kTraceColumns;
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            os << ",re_" << i << j << ",im_" << i << j;
        }
    }
    os << '\n';
    for (const auto &e : trace.entries) {
        if (e.estimate.dim() != dim) {
            throw FormatError("trace entries have mixed dimensions");
        }
        os << trace.protocol << ',' << trace.run_id << ',' << trace.seed << ',' << e.iteration << ','
           << format_real(e.n_emit) << ',' << e.n_det << ','
           << (e.d_bures_sq ? format_real(*e.d_bures_sq) : "") << ','
           << (e.fidelity ? format_real(*e.fidelity) : "") << ',' << format_real(e.loglik);
        write_matrix(os, e.estimate.matrix());
        os << '\n';
    }
}

TomographyTrace read_trace(std::istream &is) {
    std::string line;
    if (!next_line(is, line) || line.rfind(kTraceColumns, 0) != 0) {
        throw FormatError("trace file does not start with the expected header");
    }
    const auto header = split(line);
    if (header.size() <= kTraceFixedColumns) {
        throw FormatError("trace header has no estimator columns");
    }
    const std::size_t dim = square_dim(header.size() - kTraceFixedColumns);

    TomographyTrace trace;
    bool first = true;
    std::size_t row = 1;
    while (next_line(is, line)) {
        ++row;
        if (line.empty()) {
            continue;
        }
        try {
            const auto f = split(line);
            if (f.size() != header.size()) {
                throw FormatError("expected " + std::to_string(header.size()) + " fields, got " +
                                  std::to_string(f.size()));
            }
            const auto run_id = parse_int<int>(f[1]);
            const auto seed = parse_int<std::uint64_t>(f[2]);
            if (first) {
                trace.protocol = f[0];
                trace.run_id = run_id;
                trace.seed = seed;
                first = false;
            } else if (f[0] != trace.protocol || run_id != trace.run_id || seed != trace.seed) {
                throw FormatError("rows from different runs in one trace file");
            }
            TraceEntry e;
            e.iteration = parse_int<int>(f[3]);
            e.n_emit = parse_real(f[4]);
            e.n_det = parse_int<std::int64_t>(f[5]);
            if (!f[6].empty()) {
                e.d_bures_sq = parse_real(f[6]);
            }
            if (!f[7].empty()) {
                e.fidelity = parse_real(f[7]);
            }
            e.loglik = parse_real(f[8]);
            e.estimate = DensityMatrix::from_matrix(read_matrix(f, kTraceFixedColumns, dim));
            trace.entries.push_back(std::move(e));
        } catch (const std::exception &ex) {
            throw FormatError("trace line " + std::to_string(row) + ": " + ex.what());
        }
    }
    return trace;
}

void write_records(std::ostream &os, const RecordStream &stream) {
    os << kRecordsMagic << " dim=" << stream.dim << " intensity=" << format_real(stream.intensity)
       << " efficiency=" << format_real(stream.efficiency) << '\n';
    for (const auto &r : stream.records) {
        if (r.projector.dim() != stream.dim) {
            throw FormatError("record dimension differs from the stream dimension");
        }
        os << r.group_id;
        write_matrix(os, r.projector.matrix());
        os << ',' << format_real(r.time) << ',' << r.counts << '\n';
    }
}

RecordStream read_records(std::istream &is) {
    std::string line;
    if (!next_line(is, line) || line.rfind(kRecordsMagic, 0) != 0) {
        throw FormatError("record file does not start with '" + std::string(kRecordsMagic) + "'");
    }
    KeyValues kv;
    for (const auto &token : split(line.substr(std::string(kRecordsMagic).size()), ' ')) {
        if (token.empty()) {
            continue;
        }
        const auto eq = token.find('=');
        if (eq == std::string::npos) {
            throw FormatError("malformed record header token '" + token + "'");
        }
        kv[token.substr(0, eq)] = token.substr(eq + 1);
    }
    RecordStream stream;
    stream.dim = parse_int<std::size_t>(require(kv, "dim"));
    stream.intensity = parse_real(require(kv, "intensity"));
    stream.efficiency = kv.count("efficiency") ? parse_real(kv.at("efficiency")) : 1.0;
    if (stream.dim < 1 || !(stream.intensity > 0.0) ||
        !(stream.efficiency > 0.0 && stream.efficiency <= 1.0)) {
        throw FormatError("record header has an invalid dimension, intensity or efficiency");
    }

    const std::size_t fields = 1 + 2 * stream.dim * stream.dim + 2;
    std::size_t row = 1;
    while (next_line(is, line)) {
        ++row;
        if (line.empty()) {
            continue;
        }
        try {
            const auto f = split(line);
            if (f.size() != fields) {
                throw FormatError("expected " + std::to_string(fields) + " fields, got " +
                                  std::to_string(f.size()));
            }
            StreamRecord r;
            r.group_id = parse_int<std::int64_t>(f[0]);
            const CMatrix m = read_matrix(f, 1, stream.dim);
            if (!m.is_hermitian(1e-9)) {
                throw FormatError("projector is not Hermitian");
            }
            r.projector = PovmElement::unchecked(m);
            r.time = parse_real(f[fields - 2]);
            r.counts = parse_int<std::int64_t>(f[fields - 1]);
            if (r.time < 0.0 || r.counts < 0) {
                throw FormatError("negative time or counts");
            }
            if (!stream.records.empty() && r.group_id < stream.records.back().group_id) {
                throw FormatError("group ids are not in chronological order");
            }
            stream.records.push_back(std::move(r));
        } catch (const std::exception &ex) {
            throw FormatError("record line " + std::to_string(row) + ": " + ex.what());
        }
    }
    return stream;
}

void write_curve(std::ostream &os, const CurveFile &curve) {
    os << kCurveMagic << '\n'
       << "protocol = " << curve.protocol << '\n'
       << "ensemble = " << curve.ensemble << '\n'
       << "runs = " << curve.curve.runs << '\n'
       << "n,mean,sem\n";
    write_points(os, curve.curve);
}

CurveFile read_curve(std::istream &is) {
    std::string line;
    if (!next_line(is, line) || line != kCurveMagic) {
        throw FormatError("curve file does not start with '" + std::string(kCurveMagic) + "'");
    }
    std::string stop;
    const auto kv = read_key_values(is, stop);
    if (stop != "n,mean,sem") {
        throw FormatError("curve file lacks the 'n,mean,sem' table");
    }
    CurveFile out;
    out.protocol = require(kv, "protocol");
    out.ensemble = require(kv, "ensemble");
    out.curve.runs = parse_int<int>(require(kv, "runs"));
    out.curve.points = read_points(is, 3, stop);
    return out;
}

void write_report(std::ostream &os, const AnalysisReport &report) {
    os << kReportMagic << '\n';
    for (const auto &f : report.fits) {
        os << "\n[fit " << f.label << "]\n"
           << "alpha = " << format_real(f.fit.alpha) << '\n'
           << "alpha_err = " << format_real(f.fit.alpha_err) << '\n'
           << "beta = " << format_real(f.fit.beta) << '\n'
           << "beta_err = " << format_real(f.fit.beta_err) << '\n'
           << "n_lo = " << format_real(f.fit.n_lo) << '\n'
           << "n_hi = " << format_real(f.fit.n_hi) << '\n'
           << "points = " << f.fit.points << '\n';
    }
    for (const auto &r : report.ratios) {
        os << "\n[ratio]\n"
           << "numerator = " << r.numerator << '\n'
           << "denominator = " << r.denominator << '\n'
           << "n1 = " << format_real(r.n1) << '\n'
           << "n2 = " << format_real(r.n2) << '\n'
           << "value = " << format_real(r.value) << '\n';
    }
    for (const auto &c : report.curves) {
        os << "\n[curve " << c.label << "]\n"
           << "bound_kind = " << bound_name(c.bound) << '\n'
           << "runs = " << c.curve.runs << '\n'
           << "n,mean,sem,bound\n";
        for (const auto &p : c.curve.points) {
            os << format_real(p.n) << ',' << format_real(p.mean) << ',' << format_real(p.sem) << ','
               << format_real(gill_massar_bound(p.n, c.bound)) << '\n';
        }
    }
}

AnalysisReport read_report(std::istream &is) {
    std::string line;
    if (!next_line(is, line) || line != kReportMagic) {
        throw FormatError("report file does not start with '" + std::string(kReportMagic) + "'");
    }
    AnalysisReport report;
    std::string section;
    while (section.empty() && next_line(is, line)) {
        if (!line.empty()) {
            section = line;
        }
    }
    while (!section.empty()) {
        if (section.size() < 2 || section.front() != '[' || section.back() != ']') {
            throw FormatError("expected a section header, got '" + section + "'");
        }
        const std::string name = section.substr(1, section.size() - 2);
        std::string stop;
        const auto kv = read_key_values(is, stop);
        if (name.rfind("fit ", 0) == 0) {
            NamedFit f;
            f.label = name.substr(4);
            f.fit.alpha = parse_real(require(kv, "alpha"));
            f.fit.alpha_err = parse_real(require(kv, "alpha_err"));
            f.fit.beta = parse_real(require(kv, "beta"));
            f.fit.beta_err = parse_real(require(kv, "beta_err"));
            f.fit.n_lo = parse_real(require(kv, "n_lo"));
            f.fit.n_hi = parse_real(require(kv, "n_hi"));
            f.fit.points = parse_int<int>(require(kv, "points"));
            report.fits.push_back(std::move(f));
        } else if (name == "ratio") {
            RatioEntry r;
            r.numerator = require(kv, "numerator");
            r.denominator = require(kv, "denominator");
            r.n1 = parse_real(require(kv, "n1"));
            r.n2 = parse_real(require(kv, "n2"));
            r.value = parse_real(require(kv, "value"));
            report.ratios.push_back(std::move(r));
        } else if (name.rfind("curve ", 0) == 0) {
            if (stop != "n,mean,sem,bound") {
                throw FormatError("curve section lacks the 'n,mean,sem,bound' table");
            }
            ReportCurve c;
            c.label = name.substr(6);
            c.bound = parse_bound(require(kv, "bound_kind"));
            c.curve.runs = parse_int<int>(require(kv, "runs"));
            c.curve.points = read_points(is, 4, stop);
            report.curves.push_back(std::move(c));
        } else {
            throw FormatError("unknown report section '" + name + "'");
        }
        section = stop;
        while (section.empty() && next_line(is, line)) {
            if (!line.empty()) {
                section = line;
            }
        }
    }
    return report;
}

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::filesystem::path &path, const std::string &contents) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        }
        out << contents;
        out.flush();
        if (!out) {
            throw std::runtime_error("failed writing '" + tmp.string() + "'");
        }
    }
    std::filesystem::rename(tmp, path);
}

} // namespace rankp
