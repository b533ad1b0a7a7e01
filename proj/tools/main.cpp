#include <iostream>

#include <CLI11.hpp>

#include "cyber/cli/app.hpp"
#include "cyber/core/errors.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Cyber insurance risk modeling toolkit"};
    app.require_subcommand(1);

    std::string config;
    cyber::cli::RunOptions options;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string out_dir = "out";

    auto* run = app.add_subcommand("run", "Run a scenario and write its outputs");
    run->add_option("config", config, "Scenario JSON file")->required();
    auto* seed_opt = run->add_option("--seed", seed, "Master seed (overrides the config)");
    run->add_option("--out", out_dir, "Output directory")->capture_default_str();
    auto* threads_opt = run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a scenario without running it");
    validate->add_option("config", validate_path, "Scenario JSON file")->required();

    app.add_subcommand("version", "Print the version");

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand("version")) {
        std::cout << "cyberrisk " << cyber::cli::version() << '\n';
        return 0;
    }
    if (app.got_subcommand("validate")) {
        try {
            const auto diags = cyber::cli::validate_config(validate_path);
            for (const auto& d : diags) std::cout << d.str() << '\n';
            return diags.empty() ? 0 : cyber::cli::kExitValidation;
        } catch (const cyber::Error& e) {
            std::cerr << "error: " << e.what() << '\n';
            return cyber::cli::kExitValidation;
        }
    }
    if (*seed_opt) options.seed = seed;
    if (*threads_opt) options.threads = threads;
    options.out = out_dir;
    return cyber::cli::run_scenario(config, options, std::cerr);
}
