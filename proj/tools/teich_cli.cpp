// teich: lines of minima, Teichmüller geodesics and the audits run on them.
//
//   teich qgeo-check --config samples/torus_symmetric.json --out out/sym
//
// Every subcommand writes CSV tables plus constants.json into --out and exits
// with 0 only when all of its checks pass.

#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "teich/teich.hpp"

namespace {

struct Options {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void print(const std::string& command, const teich::Report& r, const std::string& dir) {
    for (const auto& c : r.checks)
        std::printf("%-4s %-22s %.6g (limit %.6g)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value, c.limit);
    std::printf("%s: %zu tables written to %s\n", command.c_str(), r.tables.size(), dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lines of minima and Teichmüller geodesics on marked surfaces"};
    app.require_subcommand(1);

    using Runner = std::function<teich::Report(const teich::RunConfig&)>;
    const std::map<std::string, std::pair<std::string, Runner>> commands{
        {"trace-minima", {"Trace the line of minima L_t over the t grid", teich::run_trace_minima}},
        {"trace-geodesic", {"Sample the Teichmüller geodesic G_t over the t grid", teich::run_trace_geodesic}},
        {"shortcurves", {"Short-curve bands, decay laws and twist audits", teich::run_shortcurves}},
        {"qgeo-check", {"Fit quasi-geodesic constants for L_t", teich::run_qgeo_check}},
        {"surgery-check", {"Cut-and-reglue checks on an origami", teich::run_surgery_check}},
        {"dichotomy-audit", {"Trichotomy tags and annulus distances on short intervals", teich::run_dichotomy_audit}},
    };

    Options opt;
    for (const auto& [name, entry] : commands) {
        auto* sub = app.add_subcommand(name, entry.first);
        sub->add_option("--config", opt.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "Output directory (overrides the config)");
        sub->add_option_function<std::uint64_t>(
            "--seed", [&opt](std::uint64_t s) { opt.seed = s; opt.seed_set = true; }, "Seed for randomized pairs");
    }
    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        teich::RunConfig cfg = teich::load_config(opt.config);
        if (!opt.out.empty()) cfg.out_dir = opt.out;
        if (opt.seed_set) cfg.seed = opt.seed;
        const teich::Report report = commands.at(command).second(cfg);
        report.write(cfg.out_dir);
        print(command, report, cfg.out_dir);
        return report.passed() ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s: %s\n", command.c_str(), e.what());
        return 2;
    }
}
