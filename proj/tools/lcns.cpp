// lcns: command-line front end for the linearized compressible Navier-Stokes control toolkit.
#include <spdlog/cfg/helpers.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <optional>

#include "lcns/app.hpp"
#include "lcns/error.hpp"

int main(int argc, char** argv) {
    spdlog::set_level(spdlog::level::info);
    if (const char* lvl = std::getenv("LCNS_LOG")) spdlog::cfg::helpers::load_levels(lvl);

    CLI::App app{"Adjoint-based optimal control of the linearized compressible Navier-Stokes equations"};
    app.set_version_flag("--version", std::string(lcns::tool_version()));
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    app.add_option("--config", config_path, "Scenario file (INI sections)")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory (overrides [output] dir)");
    app.add_option("--seed", seed, "Seed for every sampled check (overrides [verify] seed)");
    app.add_option("--threads", threads, "Worker threads, 0 = auto; the solvers currently run serially")
        ->check(CLI::NonNegativeNumber);

    std::string target = "all";
    for (const char* name : {"manufacture", "forward", "adjoint", "optimize", "report"})
        app.add_subcommand(name, std::string("Run the ") + name + " stage")->fallthrough();
    auto* verify = app.add_subcommand("verify", "Run verification certificates")->fallthrough();
    std::vector<std::string> choices = lcns::verify_targets();
    choices.push_back("all");
    verify->add_option("target", target, "Certificate to run")->check(CLI::IsMember(choices));

    CLI11_PARSE(app, argc, argv);
    const std::string sub = app.get_subcommands().front()->get_name();

    try {
        lcns::ScenarioConfig cfg = lcns::parse_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (seed) cfg.seed = *seed;
        spdlog::info("{} {} with config {} (hash {})", sub, sub == "verify" ? target : "", config_path,
                     lcns::config_hash(cfg).substr(0, 12));
        if (threads > 1) spdlog::debug("--threads {} requested; running serially", threads);
        const lcns::RunManifest m = lcns::run(sub, target, cfg);
        for (const auto& c : m.certificates) std::printf("%s\n", c.c_str());
        spdlog::info("{} artifacts written under {}", m.artifacts.size(), cfg.out_dir);
        return m.all_pass ? 0 : 1;
    } catch (const lcns::Error& e) {
        spdlog::error("{}", e.what());
        return 2;
    }
}
