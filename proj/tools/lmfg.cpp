// lmfg: batch experiment runner for the agent-consensus simulator.
//
// Subcommands: simulate-ca, simulate-pde, analyze, consensus, sweep.
// Exit codes: 0 success, 2 config error, 3 runtime error.

#include "lmfg/runner.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace {

struct SubArgs {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> seed_overrides;
    int threads = 1;
};

void add_common(CLI::App* sub, SubArgs& args) {
    sub->add_option("--config", args.config_path, "experiment config file")->required();
    sub->add_option("--out", args.out_dir, "output directory")->required();
    sub->add_option("--seed-override", args.seed_overrides,
                    "override a seed, K=V with K in disorder|noise|init|field");
    sub->add_option("--threads", args.threads, "worker count")
        ->check(CLI::PositiveNumber);
}

int run_sub(const SubArgs& args, lmfg::Mode mode) {
    lmfg::ExperimentConfig cfg;
    try {
        cfg = lmfg::parse_config(args.config_path);
        if (cfg.mode != mode) {
            // the subcommand decides the mode; an explicit key must agree
            lmfg::KeyValueMap raw = lmfg::read_config_file(args.config_path);
            if (raw.count("mode"))
                throw lmfg::ConfigError("config mode '" + lmfg::to_string(cfg.mode) +
                                        "' does not match the subcommand");
            cfg.mode = mode;
            cfg = lmfg::parse_config_map([&] {
                raw["mode"] = lmfg::to_string(mode);
                return raw;
            }());
        }
        for (const auto& kv : args.seed_overrides) lmfg::apply_seed_override(cfg, kv);
    } catch (const lmfg::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    try {
        lmfg::PointSummary sum = lmfg::run_experiment(cfg, args.out_dir, args.threads);
        if (sum.status != "ok" && sum.status != "partial") {
            std::fprintf(stderr, "run finished with status: %s\n", sum.status.c_str());
            return 3;
        }
        return 0;
    } catch (const lmfg::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"agent-consensus simulator and analysis toolkit"};
    app.require_subcommand(1);

    struct Entry {
        const char* name;
        const char* desc;
        lmfg::Mode mode;
    };
    const Entry entries[] = {
        {"simulate-ca", "run the discrete synchronous agent dynamics", lmfg::Mode::ca},
        {"simulate-pde", "integrate the continuous field equation", lmfg::Mode::pde},
        {"analyze", "cluster/phase analysis of saved snapshots", lmfg::Mode::analyze},
        {"consensus", "fuse an ensemble of binary predictions", lmfg::Mode::consensus},
        {"sweep", "parameter sweep producing a phase-diagram table", lmfg::Mode::sweep},
    };

    std::vector<SubArgs> args(std::size(entries));
    int rc = 0;
    for (std::size_t i = 0; i < std::size(entries); ++i) {
        CLI::App* sub = app.add_subcommand(entries[i].name, entries[i].desc);
        add_common(sub, args[i]);
        lmfg::Mode mode = entries[i].mode;
        SubArgs* a = &args[i];
        sub->callback([a, mode, &rc] { rc = run_sub(*a, mode); });
    }

    CLI11_PARSE(app, argc, argv);
    return rc;
}
