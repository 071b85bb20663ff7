#include <cstdio>
#include <cstdlib>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "nls/config.hpp"
#include "nls/errors.hpp"
#include "nls/runner.hpp"

// Exit codes: 0 ok, 2 configuration, 3 domain/resolution, 4 no convergence,
// 1 anything else.
int main(int argc, char** argv) {
    CLI::App app{"nlslab: ground states of the confined focusing Schrodinger energy"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    int threads = 1;

    const std::pair<const char*, const char*> modes[] = {
        {"soliton", "solve the limit profile and dump it"},
        {"constants", "scale-invariant constants of the limit profile"},
        {"qmin", "effective well potentials and the concentration site"},
        {"minimize", "one constrained minimization"},
        {"sweep", "warm-started minimizations over a rho list"},
        {"verify", "full measurement battery plus the configured sweep"},
        {"probe", "multi-start uniqueness experiment"},
    };
    for (const auto& [name, desc] : modes) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "experiment description file")
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides config and NLSLAB_OUT)");
        sub->add_option("--seed", seed, "seed override");
        sub->add_option("--threads", threads, "worker thread override")
            ->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    CLI::App* sub = app.get_subcommands().front();

    try {
        nls::ExperimentConfig cfg;
        if (sub->count("--config")) cfg = nls::parse_config(config_path);
        if (!cfg.mode.empty() && cfg.mode != sub->get_name())
            throw nls::config_error("config sets mode '" + cfg.mode + "' but the '" +
                                    sub->get_name() + "' subcommand was invoked");
        cfg.mode = sub->get_name();
        if (sub->count("--seed")) cfg.seed = seed;
        if (sub->count("--threads")) cfg.threads = threads;
        if (sub->count("--out"))
            cfg.out_dir = out_dir;
        else if (const char* env = std::getenv("NLSLAB_OUT"))
            cfg.out_dir = env;
        nls::run_experiment(cfg);
        return 0;
    } catch (const nls::config_error& e) {
        std::fprintf(stderr, "nlslab: %s\n", e.what());
        return 2;
    } catch (const nls::domain_error& e) {
        std::fprintf(stderr, "nlslab: %s\n", e.what());
        return 3;
    } catch (const nls::convergence_error& e) {
        std::fprintf(stderr, "nlslab: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "nlslab: %s\n", e.what());
        return 1;
    }
}
