// Command-line front end: run experiments, build convergence tables, report.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sphw/sphw.hpp"

namespace {

struct RunOptions {
    std::string config;
    std::string experiment;
    std::string levels;
    std::optional<int> theta;
    std::string density_mode;
    std::string kernel;
    std::string out;
    std::vector<std::string> sets;
};

sphw::ExperimentManifest build_manifest(const RunOptions& o) {
    sphw::ExperimentManifest m;
    if (!o.config.empty()) m = sphw::load_manifest(o.config);
    if (!o.experiment.empty()) m.experiment = o.experiment;
    if (!o.levels.empty()) m.levels = sphw::parse_levels(o.levels);
    if (!o.out.empty()) m.out = o.out;
    if (o.theta) m.overrides["theta"] = std::to_string(*o.theta);
    if (!o.density_mode.empty()) m.overrides["density_mode"] = o.density_mode;
    if (!o.kernel.empty()) m.overrides["kernel"] = o.kernel;
    for (const auto& kv : o.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw sphw::ConfigError("--set expects key=value, got '" + kv + "'");
        m.overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    m.validate();
    return m;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Particle hydrodynamics with Wasserstein convergence studies"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (default: SPHW_THREADS or 1)")
        ->check(CLI::NonNegativeNumber);

    RunOptions run;
    auto* cmd_run = app.add_subcommand("run", "Run an experiment at every level and write snapshot series");
    cmd_run->add_option("--config", run.config, "Experiment file (key = value)");
    cmd_run->add_option("--experiment", run.experiment, "droplet or shocktube");
    cmd_run->add_option("--levels", run.levels, "Comma-separated, strictly increasing resolutions");
    cmd_run->add_option("--theta", run.theta, "Motion equation: 1 (momentum-conserving) or 0")
        ->check(CLI::IsMember({0, 1}));
    cmd_run->add_option("--density-mode", run.density_mode, "summation or continuity")
        ->check(CLI::IsMember({"summation", "continuity"}));
    cmd_run->add_option("--kernel", run.kernel, "wendland-c2, cubic-spline or gaussian")
        ->check(CLI::IsMember({"wendland-c2", "cubic-spline", "gaussian"}));
    cmd_run->add_option("--out", run.out, "Output directory");
    cmd_run->add_option("--set", run.sets, "Extra config override key=value (repeatable)");

    std::string converge_dir, converge_out;
    int dimension = 0;
    bool no_svg = false;
    auto* cmd_conv = app.add_subcommand("converge", "Wasserstein distances and rates between snapshot series");
    cmd_conv->add_option("dir", converge_dir, "Directory holding the snapshot CSVs")->required();
    cmd_conv->add_option("--dimension,-d", dimension, "Spatial dimension (default: from the files)")
        ->check(CLI::IsMember({0, 1, 2}));
    cmd_conv->add_option("--out", converge_out, "Report directory (default: the input directory)");
    cmd_conv->add_flag("--no-svg", no_svg, "Skip the SVG plot");

    std::string report_path;
    auto* cmd_rep = app.add_subcommand("report", "Summarize a convergence report; exit 0 iff the final rate is in band");
    cmd_rep->add_option("report", report_path, "convergence.json or the directory holding it")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? sphw::kExitOk : sphw::kExitUsage;
    }

    try {
        if (threads > 0) sphw::set_thread_count(threads);
        if (*cmd_run) {
            const auto manifest = build_manifest(run);
            for (const auto& p : sphw::cmd_run(manifest)) std::cout << p.string() << '\n';
            return sphw::kExitOk;
        }
        if (*cmd_conv) {
            const auto r = sphw::cmd_converge(converge_dir, dimension, converge_out, !no_svg);
            std::cout << sphw::cmd_report(r).text;
            return sphw::kExitOk;
        }
        if (*cmd_rep) {
            std::filesystem::path p = report_path;
            if (std::filesystem::is_directory(p)) p /= "convergence.json";
            const auto summary = sphw::cmd_report(sphw::report_from_json(sphw::read_json(p)));
            std::cout << summary.text;
            return summary.exit_code;
        }
    } catch (const sphw::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return sphw::kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return sphw::kExitRuntime;
    }
    return sphw::kExitUsage;
}
