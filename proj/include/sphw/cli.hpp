#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sphw/config.hpp"
#include "sphw/convergence.hpp"
#include "sphw/droplet.hpp"
#include "sphw/io.hpp"
#include "sphw/parallel.hpp"
#include "sphw/shocktube.hpp"

namespace sphw {

enum ExitCode : int { kExitOk = 0, kExitBand = 1, kExitUsage = 2, kExitRuntime = 3 };

/// Output of one resolution: the snapshot CSV text and its JSON sidecar.
struct LevelOutput {
    std::string stem;  // file name without extension
    std::string csv;
    nlohmann::json sidecar;
};

inline std::string level_stem(const std::string& experiment, std::size_t level) {
    return experiment == "droplet" ? "droplet_l" + std::to_string(level) : "shocktube_n" + std::to_string(level);
}

inline LevelOutput run_droplet_level(const ExperimentManifest& m, std::size_t level) {
    DropletConfig c;
    apply_overrides(c, m.overrides);
    c.sites_across = static_cast<int>(level);
    const auto r = run_droplet(c);

    LevelOutput out;
    out.stem = level_stem(m.experiment, level);
    std::ostringstream csv;
    write_snapshot_csv(csv, r.series);
    out.csv = csv.str();

    auto axes = nlohmann::json::array();
    for (const auto& a : r.axes) {
        const auto ref = droplet_reference(a.time, c.shear, c.radius);
        axes.push_back({{"t", a.time}, {"semi_major", a.semi_major}, {"semi_minor", a.semi_minor},
                        {"reference_b", ref.b}, {"reference_a", ref.a}});
    }
    out.sidecar = {{"experiment", m.experiment},
                   {"level", level},
                   {"particles", r.series.snapshots.front().state.size()},
                   {"config", config_json(c)},
                   {"diagnostics", diagnostics_json(r.series)},
                   {"axes", axes}};
    return out;
}

inline LevelOutput run_shocktube_level(const ExperimentManifest& m, std::size_t level) {
    ShockTubeConfig c;
    apply_overrides(c, m.overrides);
    c.count = level;
    const auto series = run_shocktube(c);

    LevelOutput out;
    out.stem = level_stem(m.experiment, level);
    std::ostringstream csv;
    write_snapshot_csv(csv, series);
    out.csv = csv.str();
    const auto ref = shocktube_reference(c);
    out.sidecar = {{"experiment", m.experiment},
                   {"level", level},
                   {"particles", level},
                   {"config", config_json(c)},
                   {"diagnostics", diagnostics_json(series)},
                   {"reference", {{"star_density", ref.star_density()}, {"star_velocity", ref.star_velocity()}}}};
    return out;
}

/// Runs every level of the manifest (levels concurrently) and returns the
/// outputs in level order without touching the file system.
inline std::vector<LevelOutput> run_levels(const ExperimentManifest& m) {
    m.validate();
    std::vector<LevelOutput> outputs(m.levels.size());
    parallel_for(m.levels.size(), [&](std::size_t k) {
        outputs[k] = m.experiment == "droplet" ? run_droplet_level(m, m.levels[k]) : run_shocktube_level(m, m.levels[k]);
    });
    return outputs;
}

/// Writes <out>/<stem>.csv and <out>/<stem>.json for every level.
inline std::vector<std::filesystem::path> cmd_run(const ExperimentManifest& m) {
    const auto outputs = run_levels(m);
    std::vector<std::filesystem::path> written;
    for (const auto& o : outputs) {
        const auto csv_path = m.out / (o.stem + ".csv");
        {
            auto f = detail::open_out(csv_path);
            f << o.csv;
            if (!f) throw IoError("write failed: " + csv_path.string());
        }
        write_json(m.out / (o.stem + ".json"), o.sidecar);
        written.push_back(csv_path);
    }
    return written;
}

/// Snapshot CSVs in `dir` (convergence outputs excluded), ordered by name.
inline std::vector<std::filesystem::path> snapshot_files(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && e.path().extension() == ".csv" && name.rfind("convergence", 0) != 0)
            files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

template <int D>
ConvergenceReport converge_files(const std::vector<std::filesystem::path>& files) {
    std::vector<SnapshotSeries<D>> runs;
    for (const auto& f : files) runs.push_back(read_snapshot_csv<D>(f));
    std::sort(runs.begin(), runs.end(), [](const auto& a, const auto& b) {
        return a.snapshots.front().state.size() < b.snapshots.front().state.size();
    });
    for (std::size_t k = 1; k < runs.size(); ++k)
        if (runs[k].snapshots.front().state.size() == runs[k - 1].snapshots.front().state.size())
            throw ConfigError("two series have the same particle count");
    return convergence_report(runs);
}

/**
 * Reads all snapshot series in `dir`, orders them by particle count and
 * writes the convergence report to `out` (defaults to `dir`). `dimension`
 * of 0 takes it from the CSV headers.
 */
inline ConvergenceReport cmd_converge(const std::filesystem::path& dir, int dimension = 0,
                                      std::filesystem::path out = {}, bool svg = true) {
    const auto files = snapshot_files(dir);
    if (files.size() < 2) throw IoError("need at least two snapshot series in " + dir.string());
    int d = snapshot_csv_dimension(files.front());
    for (const auto& f : files)
        if (snapshot_csv_dimension(f) != d) throw IoError("series in " + dir.string() + " differ in dimension");
    if (dimension != 0 && dimension != d) throw ConfigError("requested dimension does not match the series");
    const auto report = d == 1 ? converge_files<1>(files) : converge_files<2>(files);
    write_convergence(out.empty() ? dir : out, report, svg);
    return report;
}

struct ReportSummary {
    std::string text;
    int exit_code = kExitOk;
};

/// Human-readable table of a convergence report. Rates within 0.3 of -1/d
/// are marked "ok"; the exit code is 0 iff the final rate is defined and
/// inside that band.
inline ReportSummary cmd_report(const ConvergenceReport& r) {
    const double ref = r.expected_rate();
    const double band = 0.3;
    std::ostringstream o;
    char line[160];
    std::snprintf(line, sizeof line, "%-4s %-8s %-8s %-14s %-10s %s\n", "k", "N_k", "N_k+1", "M", "C", "flag");
    o << line;
    for (std::size_t k = 0; k < r.sup_distances.size(); ++k) {
        std::string c = "-", flag = "";
        if (k < r.rates.size()) {
            if (r.rates[k]) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.4f", *r.rates[k]);
                c = buf;
                flag = std::abs(*r.rates[k] - ref) <= band ? "ok" : "off";
            } else {
                c = "undefined";
            }
        }
        std::snprintf(line, sizeof line, "%-4zu %-8zu %-8zu %-14.6e %-10s %s\n", k, r.levels[k], r.levels[k + 1],
                      r.sup_distances[k], c.c_str(), flag.c_str());
        o << line;
    }

    std::vector<double> defined;
    for (const auto& c : r.rates)
        if (c) defined.push_back(*c);
    const bool all_zero = std::all_of(r.sup_distances.begin(), r.sup_distances.end(), [](double m) { return m == 0.0; });

    ReportSummary s;
    char refbuf[32];
    std::snprintf(refbuf, sizeof refbuf, "%.4g", ref);
    if (all_zero || defined.empty()) {
        o << "degenerate: no defined rates\n";
        s.exit_code = kExitBand;
    } else {
        double mean = 0.0;
        int crossings = 0;
        for (std::size_t k = 0; k < defined.size(); ++k) {
            mean += defined[k];
            if (k > 0 && (defined[k] - ref) * (defined[k - 1] - ref) < 0.0) ++crossings;
        }
        mean /= static_cast<double>(defined.size());
        char buf[160];
        if (crossings > 0 && std::abs(mean - ref) <= band)
            std::snprintf(buf, sizeof buf, "rates oscillate around %s (mean %.4f)\n", refbuf, mean);
        else
            std::snprintf(buf, sizeof buf, "rates trend toward %.4f against %s (mean %.4f)\n", defined.back(),
                          refbuf, mean);
        o << buf;
        const auto& last = r.rates.back();
        const bool pass = last && std::abs(*last - ref) <= band;
        o << (pass ? "final rate within band\n" : "final rate outside band\n");
        s.exit_code = pass ? kExitOk : kExitBand;
    }
    s.text = o.str();
    return s;
}

}  // namespace sphw
