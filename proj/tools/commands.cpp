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

#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rankp/analysis.hpp"
#include "rankp/io.hpp"

namespace fs = std::filesystem;

namespace rankp::cli {

namespace {

std::string run_name(int run) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "run_%04d", run);
    return buf;
}

std::string short_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

template <class T> T parse_text(const std::string &text, T (*reader)(std::istream &)) {
    std::istringstream is(text);
    return reader(is);
}

struct LabelledCurve {
    std::string label;
    ConvergenceCurve curve;
};

std::vector<TomographyTrace> read_trace_dir(const fs::path &dir) {
    std::vector<fs::path> files;
    for (const auto &entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && name.rfind("run_", 0) == 0 && entry.path().extension() == ".csv") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<TomographyTrace> traces;
    for (const auto &f : files) {
        traces.push_back(parse_text(read_file(f), &read_trace));
    }
    return traces;
}

bool is_curve_file(const fs::path &path) {
    return path.filename().string().size() > 10 &&
           path.filename().string().ends_with(".curve.txt");
}

LabelledCurve load_input(const std::string &spec, double points_per_decade) {
    std::string label;
    fs::path path = spec;
    const auto eq = spec.find('=');
    if (eq != std::string::npos) {
        label = spec.substr(0, eq);
        path = spec.substr(eq + 1);
    }
    if (!fs::exists(path)) {
        throw std::runtime_error("input '" + path.string() + "' does not exist");
    }
    LabelledCurve out;
    if (fs::is_regular_file(path) && is_curve_file(path)) {
        const auto cf = parse_text(read_file(path), &read_curve);
        out.label = label.empty() ? cf.protocol : label;
        out.curve = cf.curve;
        return out;
    }
    std::vector<TomographyTrace> traces;
    if (fs::is_directory(path)) {
        traces = read_trace_dir(path);
    } else {
        traces.push_back(parse_text(read_file(path), &read_trace));
    }
    if (traces.empty()) {
        throw std::runtime_error("no run_*.csv traces in '" + path.string() + "'");
    }
    std::set<std::string> protocols;
    for (const auto &t : traces) {
        protocols.insert(t.protocol);
    }
    if (protocols.size() != 1) {
        throw std::runtime_error("input '" + path.string() + "' mixes traces of several protocols");
    }
    out.label = label.empty() ? *protocols.begin() : label;
    out.curve = average_curves(traces, {points_per_decade});
    return out;
}

std::pair<double, double> default_window(const ConvergenceCurve &curve) {
    return {1e2, curve.points.back().n};
}

} // namespace

fs::path default_out_dir() {
    if (const char *env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') {
        return env;
    }
    return "results";
}

std::pair<double, double> parse_window(const std::string &text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw std::invalid_argument("window '" + text + "' is not of the form N1:N2");
    }
    try {
        const double lo = parse_real(text.substr(0, colon));
        const double hi = parse_real(text.substr(colon + 1));
        if (!(lo > 0.0 && lo < hi)) {
            throw std::invalid_argument("need 0 < N1 < N2");
        }
        return {lo, hi};
    } catch (const std::exception &e) {
        throw std::invalid_argument("window '" + text + "': " + e.what());
    }
}

DensityMatrix read_state_file(const fs::path &path) {
    std::istringstream is(read_file(path));
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line.front() == '#') {
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::vector<double> row;
        std::istringstream ls(line);
        std::string field;
        while (ls >> field) {
            row.push_back(parse_real(field));
        }
        if (!row.empty()) {
            rows.push_back(std::move(row));
        }
    }
    const std::size_t dim = rows.size();
    if (dim == 0) {
        throw FormatError("state file '" + path.string() + "' has no rows");
    }
    CMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        if (rows[i].size() != 2 * dim) {
            throw FormatError("state file row " + std::to_string(i + 1) + " needs " +
                              std::to_string(2 * dim) + " reals");
        }
        for (std::size_t j = 0; j < dim; ++j) {
            m(i, j) = {rows[i][2 * j], rows[i][2 * j + 1]};
        }
    }
    return DensityMatrix::from_matrix(m);
}

int cmd_simulate(SimulateOptions opts, std::ostream &log) {
    auto &config = opts.campaign;
    if (opts.state_file) {
        config.ensemble = StateEnsemble::Explicit;
        config.explicit_state = read_state_file(*opts.state_file);
    }
    config.validate();
    std::set<Protocol> unique(config.protocols.begin(), config.protocols.end());
    if (unique.size() != config.protocols.size()) {
        throw std::invalid_argument("a protocol is listed twice");
    }

    fs::create_directories(opts.out);
    const auto on_run = [&](Protocol p, const TomographyTrace &trace) {
        const fs::path dir = opts.out / std::string(to_string(p));
        std::ostringstream os;
        write_trace(os, trace);
        write_file(dir / (run_name(trace.run_id) + ".csv"), os.str());
        if (trace.records) {
            std::ostringstream rs;
            write_records(rs, *trace.records);
            write_file(dir / (run_name(trace.run_id) + ".records"), rs.str());
        }
        if (!opts.quiet) {
            log << to_string(p) << ' ' << run_name(trace.run_id) << " d_B^2="
                << short_real(trace.entries.back().d_bures_sq.value_or(0.0)) << '\n';
        }
    };
    const auto results = run_campaign(config, on_run);

    for (const auto &[protocol, traces] : results) {
        const std::string name(to_string(protocol));
        if (traces.size() < 2) {
            log << name << ": single run, no averaged curve written\n";
            continue;
        }
        CurveFile cf{name, std::string(to_string(config.ensemble)),
                     average_curves(traces, {opts.points_per_decade})};
        std::ostringstream os;
        write_curve(os, cf);
        write_file(opts.out / (name + ".curve.txt"), os.str());
        try {
            const auto fit = fit_power_law(cf.curve, 1e2, cf.curve.points.back().n);
            log << name << ": alpha=" << short_real(fit.alpha) << " beta=" << short_real(fit.beta)
                << " +- " << short_real(fit.beta_err) << " over [" << short_real(fit.n_lo) << ", "
                << short_real(fit.n_hi) << "]\n";
        } catch (const std::invalid_argument &) {
            log << name << ": too few curve points for a fit\n";
        }
    }
    return 0;
}

int cmd_analyze(const AnalyzeOptions &opts, std::ostream &log) {
    if (opts.inputs.empty()) {
        throw std::invalid_argument("analyze needs at least one input");
    }
    if (opts.bound != "mixed" && opts.bound != "pure") {
        throw std::invalid_argument("--bound must be mixed or pure");
    }
    const BoundKind bound = opts.bound == "pure" ? BoundKind::PureQubit : BoundKind::MixedQubit;
    std::vector<LabelledCurve> curves;
    std::map<std::string, std::size_t> by_label;
    for (const auto &input : opts.inputs) {
        auto c = load_input(input, opts.points_per_decade);
        if (by_label.count(c.label)) {
            throw std::invalid_argument("duplicate input label '" + c.label +
                                        "' (use label=path to disambiguate)");
        }
        by_label[c.label] = curves.size();
        curves.push_back(std::move(c));
    }

    AnalysisReport report;
    std::map<std::string, PowerLawFit> fits;
    for (const auto &c : curves) {
        const auto window = opts.fit_window.value_or(default_window(c.curve));
        const auto fit = fit_power_law(c.curve, window.first, window.second);
        fits[c.label] = fit;
        report.fits.push_back({c.label, fit});
        report.curves.push_back({c.label, bound, c.curve});
        log << c.label << ": alpha=" << short_real(fit.alpha) << " +- " << short_real(fit.alpha_err)
            << " beta=" << short_real(fit.beta) << " +- " << short_real(fit.beta_err) << " ("
            << fit.points << " points over [" << short_real(fit.n_lo) << ", "
            << short_real(fit.n_hi) << "])\n";
    }
    for (const auto &cmp : opts.comparisons) {
        const auto slash = cmp.find('/');
        if (slash == std::string::npos) {
            throw std::invalid_argument("comparison '" + cmp + "' is not of the form a/b");
        }
        const std::string num = cmp.substr(0, slash);
        const std::string den = cmp.substr(slash + 1);
        if (!fits.count(num) || !fits.count(den)) {
            throw std::invalid_argument("comparison '" + cmp + "' names an unknown input label");
        }
        const auto window = opts.ratio_window.value_or(
            opts.fit_window.value_or(default_window(curves[by_label[den]].curve)));
        const double r = efficiency_ratio(fits[den], fits[num], window.first, window.second);
        report.ratios.push_back({num, den, window.first, window.second, r});
        log << "R(" << num << " vs " << den << ") = " << short_real(r) << '\n';
    }

    std::ostringstream os;
    write_report(os, report);
    write_file(opts.report, os.str());
    log << "report written to " << opts.report.string() << '\n';
    return 0;
}

int cmd_replay(const ReplayCliOptions &opts, std::ostream &log) {
    if (opts.records.empty()) {
        throw std::invalid_argument("replay needs at least one records file");
    }
    if (opts.clip < 0.0 || opts.clip > 1.0) {
        throw std::invalid_argument("--clip must lie in [0, 1]");
    }
    ReplayOptions ro;
    ro.points_per_decade = opts.points_per_decade;
    ro.n0 = opts.n0;
    ro.mle = opts.mle;

    std::vector<TomographyTrace> traces;
    for (std::size_t k = 0; k < opts.records.size(); ++k) {
        const auto stream = parse_text(read_file(opts.records[k]), &read_records);
        auto trace = replay_counts(stream, ro);
        trace.run_id = static_cast<int>(k);
        const double n0 = trace.entries.back().n_emit;
        if (opts.clip > 0.0) {
            std::erase_if(trace.entries,
                          [&](const TraceEntry &e) { return e.n_emit > opts.clip * n0; });
        }
        if (trace.entries.empty()) {
            throw std::runtime_error("replay of '" + opts.records[k].string() +
                                     "' keeps no points after clipping");
        }
        std::ostringstream os;
        write_trace(os, trace);
        char name[32];
        std::snprintf(name, sizeof name, "replay_%04zu.csv", k);
        write_file(opts.out / name, os.str());
        log << opts.records[k].string() << ": N0=" << short_real(n0) << ", "
            << trace.entries.size() << " points kept\n";
        traces.push_back(std::move(trace));
    }

    if (traces.size() >= 2) {
        AnalysisReport report;
        const auto curve = average_curves(traces, {opts.points_per_decade});
        report.curves.push_back({"replay", BoundKind::MixedQubit, curve});
        const auto window =
            opts.fit_window.value_or(std::make_pair(curve.points.front().n, curve.points.back().n));
        try {
            const auto fit = fit_power_law(curve, window.first, window.second);
            report.fits.push_back({"replay", fit});
            log << "replay: alpha=" << short_real(fit.alpha) << " beta=" << short_real(fit.beta)
                << " +- " << short_real(fit.beta_err) << '\n';
        } catch (const std::invalid_argument &e) {
            log << "replay: no fit (" << e.what() << ")\n";
        }
        std::ostringstream os;
        write_report(os, report);
        write_file(opts.out / "replay.report.txt", os.str());
    }
    return 0;
}

} // namespace rankp::cli
