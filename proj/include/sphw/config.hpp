#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sphw/droplet.hpp"
#include "sphw/errors.hpp"
#include "sphw/io.hpp"
#include "sphw/shocktube.hpp"

namespace sphw {

/**
 * Experiment files are flat `key = value` text (INI syntax without sections;
 * `#` and `;` start comments). Reserved keys:
 *
 *   experiment = droplet | shocktube
 *   levels     = comma-separated, strictly increasing
 *                (droplet: lattice sites across the disc; shocktube: N)
 *   out        = output directory
 *
 * Every other key overrides the field of the same name in DropletConfig or
 * ShockTubeConfig (see docs/formats.md for the list).
 */
struct ExperimentManifest {
    std::string experiment;
    std::vector<std::size_t> levels;
    std::map<std::string, std::string> overrides;
    std::filesystem::path out = "out";

    void validate() const {
        if (experiment != "droplet" && experiment != "shocktube")
            throw ConfigError("unknown experiment '" + experiment + "' (expected droplet or shocktube)");
        if (levels.empty()) throw ConfigError("no levels given");
        for (std::size_t k = 1; k < levels.size(); ++k)
            if (!(levels[k] > levels[k - 1])) throw ConfigError("levels must be strictly increasing");
    }
};

namespace detail {

inline std::string trim(std::string s) {
    const auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), issp));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), issp).base(), s.end());
    return s;
}

inline double to_double(const std::string& key, const std::string& v) {
    try {
        return parse_double(trim(v));
    } catch (const IoError&) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
}

inline long to_long(const std::string& key, const std::string& v) {
    const auto t = trim(v);
    long x = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return x;
}

inline DensityMode to_density_mode(const std::string& v) {
    const auto t = trim(v);
    if (t == "summation") return DensityMode::Summation;
    if (t == "continuity") return DensityMode::Continuity;
    throw ConfigError("density_mode: expected summation or continuity, got '" + v + "'");
}

inline PairSmoothing to_pair_smoothing(const std::string& v) {
    const auto t = trim(v);
    if (t == "gather") return PairSmoothing::Gather;
    if (t == "mean") return PairSmoothing::Mean;
    throw ConfigError("pair_smoothing: expected gather or mean, got '" + v + "'");
}

inline NeighborSearch to_neighbor_search(const std::string& v) {
    const auto t = trim(v);
    if (t == "cell-grid") return NeighborSearch::CellGrid;
    if (t == "brute-force") return NeighborSearch::BruteForce;
    throw ConfigError("neighbor_search: expected cell-grid or brute-force, got '" + v + "'");
}

inline SummationReference to_summation_reference(const std::string& v) {
    const auto t = trim(v);
    if (t == "absolute") return SummationReference::Absolute;
    if (t == "initial-profile") return SummationReference::InitialProfile;
    throw ConfigError("summation_reference: expected absolute or initial-profile, got '" + v + "'");
}

using Setter = std::function<void(const std::string&)>;

inline void apply(const std::map<std::string, Setter>& table, const std::map<std::string, std::string>& values,
                  const std::string& experiment) {
    for (const auto& [key, value] : values) {
        const auto it = table.find(key);
        if (it == table.end()) throw ConfigError("unknown " + experiment + " key '" + key + "'");
        it->second(value);
    }
}

}  // namespace detail

inline std::vector<std::size_t> parse_levels(const std::string& text) {
    std::vector<std::size_t> levels;
    for (auto part : detail::split(text, ',')) {
        const long v = detail::to_long("levels", std::string(part));
        if (v < 1) throw ConfigError("levels must be positive");
        levels.push_back(static_cast<std::size_t>(v));
    }
    return levels;
}

inline ExperimentManifest parse_manifest(std::istream& in) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(e.what());
    }
    ExperimentManifest m;
    for (const auto& [key, node] : tree) {
        if (!node.empty()) throw ConfigError("sections are not supported ('" + key + "')");
        const auto value = detail::trim(node.data());
        if (key == "experiment") m.experiment = value;
        else if (key == "levels") m.levels = parse_levels(value);
        else if (key == "out") m.out = value;
        else m.overrides[key] = value;
    }
    return m;
}

inline ExperimentManifest load_manifest(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    return parse_manifest(in);
}

inline void apply_overrides(DropletConfig& c, const std::map<std::string, std::string>& values) {
    using detail::to_double;
    using detail::to_long;
    const std::map<std::string, detail::Setter> table{
        {"radius", [&](const std::string& v) { c.radius = to_double("radius", v); }},
        {"rho0", [&](const std::string& v) { c.rho0 = to_double("rho0", v); }},
        {"shear", [&](const std::string& v) { c.shear = to_double("shear", v); }},
        {"sound_speed", [&](const std::string& v) { c.sound_speed = to_double("sound_speed", v); }},
        {"tait_B", [&](const std::string& v) { c.tait_B = to_double("tait_B", v); }},
        {"gamma", [&](const std::string& v) { c.gamma = to_double("gamma", v); }},
        {"kernel", [&](const std::string& v) { c.kernel = parse_kernel_family(detail::trim(v)); }},
        {"theta", [&](const std::string& v) { c.theta = static_cast<int>(to_long("theta", v)); }},
        {"eta", [&](const std::string& v) { c.eta = to_double("eta", v); }},
        {"dt", [&](const std::string& v) { c.dt = to_double("dt", v); }},
        {"t_final", [&](const std::string& v) { c.t_final = to_double("t_final", v); }},
        {"intervals", [&](const std::string& v) { c.intervals = static_cast<int>(to_long("intervals", v)); }},
        {"probe_time", [&](const std::string& v) { c.probe_time = to_double("probe_time", v); }},
        {"viscosity_alpha", [&](const std::string& v) { c.viscosity_alpha = to_double("viscosity_alpha", v); }},
        {"viscosity_beta", [&](const std::string& v) { c.viscosity_beta = to_double("viscosity_beta", v); }},
        {"mass_flux_alpha", [&](const std::string& v) { c.mass_flux_alpha = to_double("mass_flux_alpha", v); }},
        {"mass_flux_beta", [&](const std::string& v) { c.mass_flux_beta = to_double("mass_flux_beta", v); }},
        {"density_mode", [&](const std::string& v) { c.density_mode = detail::to_density_mode(v); }},
        {"pair_smoothing", [&](const std::string& v) { c.pair_smoothing = detail::to_pair_smoothing(v); }},
        {"neighbor_search", [&](const std::string& v) { c.neighbor_search = detail::to_neighbor_search(v); }},
    };
    detail::apply(table, values, "droplet");
}

inline void apply_overrides(ShockTubeConfig& c, const std::map<std::string, std::string>& values) {
    using detail::to_double;
    using detail::to_long;
    const std::map<std::string, detail::Setter> table{
        {"rho_left", [&](const std::string& v) { c.rho_left = to_double("rho_left", v); }},
        {"rho_right", [&](const std::string& v) { c.rho_right = to_double("rho_right", v); }},
        {"x_jump", [&](const std::string& v) { c.x_jump = to_double("x_jump", v); }},
        {"a", [&](const std::string& v) { c.a = to_double("a", v); }},
        {"b", [&](const std::string& v) { c.b = to_double("b", v); }},
        {"gamma", [&](const std::string& v) { c.gamma = to_double("gamma", v); }},
        {"K", [&](const std::string& v) { c.K = to_double("K", v); }},
        {"kernel", [&](const std::string& v) { c.kernel = parse_kernel_family(detail::trim(v)); }},
        {"theta", [&](const std::string& v) { c.theta = static_cast<int>(to_long("theta", v)); }},
        {"eta", [&](const std::string& v) { c.eta = to_double("eta", v); }},
        {"t_final", [&](const std::string& v) { c.t_final = to_double("t_final", v); }},
        {"intervals", [&](const std::string& v) { c.intervals = static_cast<int>(to_long("intervals", v)); }},
        {"dt", [&](const std::string& v) { c.dt = to_double("dt", v); }},
        {"cfl", [&](const std::string& v) { c.cfl = to_double("cfl", v); }},
        {"viscosity_alpha", [&](const std::string& v) { c.viscosity_alpha = to_double("viscosity_alpha", v); }},
        {"viscosity_beta", [&](const std::string& v) { c.viscosity_beta = to_double("viscosity_beta", v); }},
        {"mass_flux_alpha", [&](const std::string& v) { c.mass_flux_alpha = to_double("mass_flux_alpha", v); }},
        {"mass_flux_beta", [&](const std::string& v) { c.mass_flux_beta = to_double("mass_flux_beta", v); }},
        {"density_mode", [&](const std::string& v) { c.density_mode = detail::to_density_mode(v); }},
        {"summation_reference",
         [&](const std::string& v) { c.summation_reference = detail::to_summation_reference(v); }},
        {"pair_smoothing", [&](const std::string& v) { c.pair_smoothing = detail::to_pair_smoothing(v); }},
        {"neighbor_search", [&](const std::string& v) { c.neighbor_search = detail::to_neighbor_search(v); }},
    };
    detail::apply(table, values, "shocktube");
}

inline std::string to_string(DensityMode m) { return m == DensityMode::Summation ? "summation" : "continuity"; }
inline std::string to_string(PairSmoothing p) { return p == PairSmoothing::Gather ? "gather" : "mean"; }
inline std::string to_string(NeighborSearch n) { return n == NeighborSearch::CellGrid ? "cell-grid" : "brute-force"; }
inline std::string to_string(SummationReference r) {
    return r == SummationReference::Absolute ? "absolute" : "initial-profile";
}

inline nlohmann::json config_json(const DropletConfig& c) {
    return {{"sites_across", c.sites_across}, {"radius", c.radius}, {"rho0", c.rho0}, {"shear", c.shear},
            {"sound_speed", c.sound_speed}, {"tait_B", c.stiffness()}, {"gamma", c.gamma},
            {"kernel", kernel_name(c.kernel)}, {"theta", c.theta}, {"eta", c.eta}, {"dt", c.dt},
            {"t_final", c.t_final}, {"intervals", c.intervals}, {"probe_time", c.probe_time},
            {"viscosity_alpha", c.viscosity_alpha}, {"viscosity_beta", c.viscosity_beta},
            {"mass_flux_alpha", c.mass_flux_alpha}, {"mass_flux_beta", c.mass_flux_beta},
            {"density_mode", to_string(c.density_mode)}, {"pair_smoothing", to_string(c.pair_smoothing)},
            {"neighbor_search", to_string(c.neighbor_search)}};
}

inline nlohmann::json config_json(const ShockTubeConfig& c) {
    return {{"count", c.count}, {"rho_left", c.rho_left}, {"rho_right", c.rho_right}, {"x_jump", c.x_jump},
            {"a", c.a}, {"b", c.b}, {"gamma", c.gamma}, {"K", c.polytropic_K()},
            {"kernel", kernel_name(c.kernel)}, {"theta", c.theta}, {"eta", c.eta}, {"t_final", c.t_final},
            {"intervals", c.intervals}, {"dt", c.time_step()}, {"cfl", c.cfl},
            {"viscosity_alpha", c.viscosity_alpha}, {"viscosity_beta", c.viscosity_beta},
            {"mass_flux_alpha", c.mass_flux_alpha}, {"mass_flux_beta", c.mass_flux_beta},
            {"density_mode", to_string(c.density_mode)},
            {"summation_reference", to_string(c.summation_reference)},
            {"pair_smoothing", to_string(c.pair_smoothing)}, {"neighbor_search", to_string(c.neighbor_search)}};
}

}  // namespace sphw
