#include "revorbit/app.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <utility>

int main(int argc, char** argv) {
    CLI::App cli{"Central-force motion on surfaces of revolution"};
    cli.require_subcommand(1);

    std::string config;
    revorbit::app::CommandOptions opts;
    std::string out_dir;

    const std::pair<const char*, const char*> commands[] = {
        {"surface-info", "domain, class, h statistics and b^2 of the surface"},
        {"orbit", "integrate one orbit and write its trajectory"},
        {"apsidal-sweep", "apsidal angle and closure over an energy grid"},
        {"bertrand", "beta-quartic classification of closed-orbit potentials"},
        {"appell-check", "compare a sphere orbit with its central projection to the plane"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = cli.add_subcommand(name, help);
        sub->add_option("--config", config, "run config (JSON)")->required();
        sub->add_option("--out", out_dir, "directory for output files");
        sub->add_option("--format", opts.format, "stdout format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_flag("--require-bound", opts.require_bound, "exit 3 when the orbit reaches a singular end");
        sub->add_option("--seed", opts.seed, "seed for randomized test points");
    }

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? 0 : revorbit::app::kConfigError;
    }

    const std::string command = cli.get_subcommands().front()->get_name();
    if (!out_dir.empty()) opts.out_dir = out_dir;

    revorbit::app::CommandResult r = revorbit::app::run(command, config, opts);
    if (opts.out_dir && !r.files.empty()) {
        try {
            revorbit::app::write_files(r, *opts.out_dir);
        } catch (const std::exception& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return revorbit::app::kConfigError;
        }
    }
    std::cout << r.out;
    std::cerr << r.log;
    return r.exit_code;
}
