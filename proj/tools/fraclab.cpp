#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fraclab/commands.hpp"

namespace {

struct Common {
    std::string out;
    std::optional<std::uint64_t> seed;
    bool force = false;

    fraclab::CommandOptions options() const {
        fraclab::CommandOptions o;
        if (!out.empty()) o.out_dir = out;
        o.seed = seed;
        o.force = force;
        return o;
    }
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--out", c.out, "Output directory (overrides output_dir in the config)");
    cmd->add_option("--seed", c.seed, "Seed (overrides the config seed)");
    cmd->add_flag("--force", c.force, "Allow writing into a non-empty output directory");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional W^{s,p} harmonic-map laboratory"};
    app.require_subcommand(1);

    Common common;
    std::string config;
    std::string snapshot;

    auto* solve = app.add_subcommand("solve", "Minimize the energy for a config and write a snapshot");
    solve->add_option("config", config, "Run configuration (JSON)")->required();
    add_common(solve, common);

    auto* diagnose = app.add_subcommand("diagnose", "Run the configured probes on a field snapshot");
    diagnose->add_option("config", config, "Run configuration (JSON)")->required();
    diagnose->add_option("snapshot", snapshot, "Field snapshot (field.bin)")->required();
    add_common(diagnose, common);

    auto* sweep = app.add_subcommand("sweep", "Solve and diagnose over the config's parameter lists");
    sweep->add_option("config", config, "Run configuration (JSON)")->required();
    add_common(sweep, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : fraclab::exit_invalid;
    }

    if (solve->parsed()) return fraclab::cmd_solve(config, common.options(), std::cout, std::cerr);
    if (diagnose->parsed()) return fraclab::cmd_diagnose(config, snapshot, common.options(), std::cout, std::cerr);
    return fraclab::cmd_sweep(config, common.options(), std::cout, std::cerr);
}
