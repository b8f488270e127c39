#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sphw/convergence.hpp"
#include "sphw/errors.hpp"
#include "sphw/integrator.hpp"

namespace sphw {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest form that still carries 17 significant digits ("%.17g").
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) throw IoError("not a number: '" + std::string(s) + "'");
    return v;
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    return in;
}

}  // namespace detail

template <int D>
std::string snapshot_csv_header() {
    return D == 1 ? "t,id,x,vx,m,h,rho" : "t,id,x,y,vx,vy,m,h,rho";
}

/// One row per particle per snapshot: t,id,x[,y],vx[,vy],m,h,rho.
template <int D>
void write_snapshot_csv(std::ostream& out, const SnapshotSeries<D>& series) {
    out << snapshot_csv_header<D>() << '\n';
    for (const auto& snap : series.snapshots) {
        const auto& s = snap.state;
        const std::string t = format_double(snap.time);
        for (std::size_t i = 0; i < s.size(); ++i) {
            out << t << ',' << i;
            for (int k = 0; k < D; ++k) out << ',' << format_double(s.positions[i][k]);
            for (int k = 0; k < D; ++k) out << ',' << format_double(s.velocities[i][k]);
            out << ',' << format_double(s.masses[i]) << ',' << format_double(s.smoothing_lengths[i]) << ','
                << format_double(s.densities[i]) << '\n';
        }
    }
}

template <int D>
void write_snapshot_csv(const std::filesystem::path& path, const SnapshotSeries<D>& series) {
    auto out = detail::open_out(path);
    write_snapshot_csv(out, series);
    if (!out) throw IoError("write failed: " + path.string());
}

/// Parses a snapshot CSV back into states. Rows of one snapshot must be
/// contiguous with ids 0..N-1 in order. Diagnostics are recomputed from the
/// states (energy is left as NaN).
template <int D>
SnapshotSeries<D> read_snapshot_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty snapshot file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != snapshot_csv_header<D>()) throw IoError("unexpected header '" + line + "'");
    SnapshotSeries<D> series;
    const std::size_t cols = 2 + 2 * D + 3;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = detail::split(line, ',');
        if (f.size() != cols) throw IoError("row " + std::to_string(row) + ": expected " + std::to_string(cols) + " fields");
        const double t = parse_double(f[0]);
        std::size_t id = 0;
        {
            auto [ptr, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), id);
            if (ec != std::errc() || ptr != f[1].data() + f[1].size())
                throw IoError("row " + std::to_string(row) + ": bad id");
        }
        if (id == 0) {
            if (!series.snapshots.empty() && !(t > series.snapshots.back().time))
                throw IoError("row " + std::to_string(row) + ": snapshot times must increase");
            Snapshot<D> snap;
            snap.time = t;
            series.snapshots.push_back(std::move(snap));
        }
        if (series.snapshots.empty() || series.snapshots.back().time != t ||
            series.snapshots.back().state.size() != id)
            throw IoError("row " + std::to_string(row) + ": rows out of order");
        auto& s = series.snapshots.back().state;
        Vec<D> x{}, v{};
        for (int k = 0; k < D; ++k) x[k] = parse_double(f[2 + k]);
        for (int k = 0; k < D; ++k) v[k] = parse_double(f[2 + D + k]);
        s.positions.push_back(x);
        s.velocities.push_back(v);
        s.masses.push_back(parse_double(f[2 + 2 * D]));
        s.smoothing_lengths.push_back(parse_double(f[3 + 2 * D]));
        s.densities.push_back(parse_double(f[4 + 2 * D]));
    }
    for (auto& snap : series.snapshots) {
        snap.total_mass = snap.state.total_mass();
        snap.total_momentum = snap.state.total_momentum();
        snap.total_energy = std::nan("");
    }
    return series;
}

template <int D>
SnapshotSeries<D> read_snapshot_csv(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    return read_snapshot_csv<D>(in);
}

/// Reads only the header to find the spatial dimension of a snapshot CSV.
inline int snapshot_csv_dimension(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == snapshot_csv_header<1>()) return 1;
    if (line == snapshot_csv_header<2>()) return 2;
    throw IoError(path.string() + ": not a snapshot file");
}

/// Per-snapshot diagnostics for the JSON sidecar.
template <int D>
nlohmann::json diagnostics_json(const SnapshotSeries<D>& series) {
    auto rows = nlohmann::json::array();
    for (const auto& snap : series.snapshots) {
        nlohmann::json row;
        row["t"] = snap.time;
        row["step"] = snap.step;
        row["particles"] = snap.state.size();
        row["total_mass"] = snap.total_mass;
        row["total_momentum"] = std::vector<double>(snap.total_momentum.begin(), snap.total_momentum.end());
        if (std::isfinite(snap.total_energy)) row["total_energy"] = snap.total_energy;
        else row["total_energy"] = nullptr;
        rows.push_back(std::move(row));
    }
    return rows;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    auto out = detail::open_out(path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

// --- convergence report -----------------------------------------------------

inline nlohmann::json report_to_json(const ConvergenceReport& r) {
    nlohmann::json j;
    j["dimension"] = r.dimension;
    j["expected_rate"] = r.expected_rate();
    j["levels"] = r.levels;
    j["times"] = r.times;
    j["distances"] = r.distances;
    j["M"] = r.sup_distances;
    auto rates = nlohmann::json::array();
    for (const auto& c : r.rates) rates.push_back(c ? nlohmann::json(*c) : nlohmann::json(nullptr));
    j["C"] = rates;
    return j;
}

inline ConvergenceReport report_from_json(const nlohmann::json& j) {
    try {
        return make_report(j.at("dimension").get<int>(), j.at("levels").get<std::vector<std::size_t>>(),
                           j.at("times").get<std::vector<double>>(),
                           j.at("distances").get<std::vector<std::vector<double>>>());
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed report: ") + e.what());
    }
}

/// Per-time distances: k,N_k,N_k1,t,W.
inline void write_distances_csv(std::ostream& out, const ConvergenceReport& r) {
    out << "k,N_k,N_k1,t,W\n";
    for (std::size_t k = 0; k < r.distances.size(); ++k)
        for (std::size_t t = 0; t < r.times.size(); ++t)
            out << k << ',' << r.levels[k] << ',' << r.levels[k + 1] << ',' << format_double(r.times[t]) << ','
                << format_double(r.distances[k][t]) << '\n';
}

/// k,M,C with M = M_{k,k+1} and C = C_{k+1} (empty when undefined or when
/// no following level exists).
inline void write_rates_csv(std::ostream& out, const ConvergenceReport& r) {
    out << "k,M,C\n";
    for (std::size_t k = 0; k < r.sup_distances.size(); ++k) {
        out << k << ',' << format_double(r.sup_distances[k]) << ',';
        if (k < r.rates.size() && r.rates[k]) out << format_double(*r.rates[k]);
        out << '\n';
    }
}

/// Line plot of C_{k+1} against N_{k+1} (log axis) with a dashed line at -1/d.
inline std::string rates_svg(const ConvergenceReport& r) {
    const double width = 480, height = 320, left = 60, right = 20, top = 20, bottom = 50;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < r.rates.size(); ++k)
        if (r.rates[k]) pts.emplace_back(static_cast<double>(r.levels[k + 1]), *r.rates[k]);
    double xmin = 1.0, xmax = 10.0;
    if (!r.levels.empty()) {
        xmin = static_cast<double>(r.levels.front());
        xmax = static_cast<double>(r.levels.back());
    }
    if (!(xmax > xmin)) xmax = xmin * 10.0;
    double ymin = r.expected_rate() - 0.5, ymax = 0.0;
    for (const auto& p : pts) {
        ymin = std::min(ymin, p.second - 0.1);
        ymax = std::max(ymax, p.second + 0.1);
    }
    auto sx = [&](double x) {
        return left + (std::log(x) - std::log(xmin)) / (std::log(xmax) - std::log(xmin)) * (width - left - right);
    };
    auto sy = [&](double y) { return top + (ymax - y) / (ymax - ymin) * (height - top - bottom); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
      << height - bottom << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
      << "\" stroke=\"black\"/>\n";
    const double yref = sy(r.expected_rate());
    o << "<line x1=\"" << left << "\" y1=\"" << yref << "\" x2=\"" << width - right << "\" y2=\"" << yref
      << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
    o << "<text x=\"" << width - right - 4 << "\" y=\"" << yref - 4 << "\" font-size=\"11\" text-anchor=\"end\">-1/"
      << r.dimension << "</text>\n";
    if (!pts.empty()) {
        o << "<polyline fill=\"none\" stroke=\"crimson\" stroke-width=\"2\" points=\"";
        for (const auto& p : pts) o << sx(p.first) << ',' << sy(p.second) << ' ';
        o << "\"/>\n";
        for (const auto& p : pts)
            o << "<circle cx=\"" << sx(p.first) << "\" cy=\"" << sy(p.second) << "\" r=\"3\" fill=\"crimson\"/>\n";
    }
    for (std::size_t k = 1; k < r.levels.size(); ++k) {
        const double x = sx(static_cast<double>(r.levels[k]));
        o << "<text x=\"" << x << "\" y=\"" << height - bottom + 16 << "\" font-size=\"10\" text-anchor=\"middle\">"
          << r.levels[k] << "</text>\n";
    }
    for (int i = 0; i <= 4; ++i) {
        const double y = ymin + (ymax - ymin) * i / 4.0;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", y);
        o << "<text x=\"" << left - 6 << "\" y=\"" << sy(y) + 4 << "\" font-size=\"10\" text-anchor=\"end\">" << buf
          << "</text>\n";
    }
    o << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 10
      << "\" font-size=\"12\" text-anchor=\"middle\">N</text>\n";
    o << "<text x=\"14\" y=\"" << (top + height - bottom) / 2 << "\" font-size=\"12\" transform=\"rotate(-90 14 "
      << (top + height - bottom) / 2 << ")\" text-anchor=\"middle\">C</text>\n";
    o << "</svg>\n";
    return o.str();
}

/// Writes convergence_distances.csv, convergence_rates.csv,
/// convergence.json and, optionally, convergence_rates.svg into `dir`.
inline void write_convergence(const std::filesystem::path& dir, const ConvergenceReport& r, bool svg = true) {
    {
        auto out = detail::open_out(dir / "convergence_distances.csv");
        write_distances_csv(out, r);
    }
    {
        auto out = detail::open_out(dir / "convergence_rates.csv");
        write_rates_csv(out, r);
    }
    write_json(dir / "convergence.json", report_to_json(r));
    if (svg) {
        auto out = detail::open_out(dir / "convergence_rates.svg");
        out << rates_svg(r);
    }
}

}  // namespace sphw
