#include <CLI11.hpp>
#include <iostream>
#include <memory>

#include "revoq/cli.hpp"
#include "revoq/errors.hpp"

namespace revoq {

namespace {

struct SubState {
    std::string name;
    std::string config_file;
    std::map<std::string, std::string> flags;
};

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"revoqsim: desk-scale experiments for multi-copy revocable cryptography"};
    app.require_subcommand(1);

    std::vector<std::shared_ptr<SubState>> states;
    for (const std::string& name : known_experiments()) {
        auto state = std::make_shared<SubState>();
        state->name = name;
        states.push_back(state);
        CLI::App* sub = app.add_subcommand(name, "run the '" + name + "' experiment");

        auto capture = [state](const std::string& key) {
            return [state, key](CLI::results_t res) {
                state->flags[key] = res.at(0);
                return true;
            };
        };
        sub->add_option("--seed", capture("seed"), "PRNG seed (64-bit)")
            ->envname("REVOQSIM_SEED");
        sub->add_option("--trials", capture("trials"), "number of trials");
        sub->add_option("--out", capture("out"), "manifest JSON path");
        sub->add_option("--csv", capture("csv"), "summary CSV path");
        sub->add_option("--transcripts", capture("transcripts"), "JSON-lines transcript path");
        sub->add_option("--config", state->config_file,
                        "flat key=value config file (flags win on conflict)");

        // Experiment-specific keys are validated by parse_config; register a
        // pass-through option for each known field so --help is useful.
        for (const char* key : {"n", "m", "k", "s", "t", "r", "c", "lambda", "ell",
                                "backend", "strategy", "program", "table-file",
                                "marked-weight", "challenge-dist", "variant", "queries",
                                "adversary", "width", "set-size", "env-qubits",
                                "extra-qubits", "table-size", "scale", "allow-forward",
                                "out-dir"}) {
            sub->add_option("--" + std::string(key), capture(key), "");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        for (const auto& state : states) {
            if (!app.get_subcommand(state->name)->parsed()) continue;
            std::map<std::string, std::string> file_params;
            if (!state->config_file.empty()) file_params = read_config_file(state->config_file);
            const ExperimentConfig config = parse_config(state->name, state->flags, file_params);
            const RunManifest manifest = dispatch(config);
            if (config.output_path.empty()) {
                std::cout << manifest.to_json() << std::endl;
            } else {
                std::cout << state->name << ": ok=" << (manifest.ok ? "true" : "false")
                          << " digest=" << manifest.transcript_digest << " -> "
                          << config.output_path << std::endl;
            }
            return manifest.ok ? 0 : 1;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
    return 2;
}

}  // namespace revoq
