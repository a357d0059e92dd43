#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace revoq {

/// Validated experiment request. Parameter values are kept as strings and
/// checked against the target experiment's schema before any work starts.
struct ExperimentConfig {
    std::string experiment;
    std::map<std::string, std::string> params;
    uint64_t seed = 0;
    uint64_t trials = 0;
    std::string output_path;       // manifest JSON ("" = stdout only)
    std::string transcripts_path;  // JSON-lines transcripts ("" = off)
    std::string csv_path;          // summary CSV ("" = off)
};

struct RunManifest {
    ExperimentConfig config;
    std::string version;
    double wall_seconds = 0.0;
    std::string results_json;      // per-experiment result records
    std::string transcript_digest; // hex, reproducible for a fixed config
    bool ok = false;               // every requested assertion passed

    std::string to_json() const;
};

/// Parse `key = value` lines (flat schema, '#' comments) into a param map.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Build a validated config from an experiment name and raw key-value pairs,
/// merging `file_params` under `flag_params` (flags win). Throws
/// UnknownExperiment or BadParameter naming the offending field.
ExperimentConfig parse_config(const std::string& experiment,
                              const std::map<std::string, std::string>& flag_params,
                              const std::map<std::string, std::string>& file_params = {});

/// Run the named experiment and persist results atomically.
RunManifest dispatch(const ExperimentConfig& config);

/// Recompute the derived reference values used by the unit tests and write
/// them to `out_dir/derived.json`. Returns the file path.
std::string regen_reference_tables(const std::string& out_dir);

/// Full command-line entry point (subcommands, flags, config file, env seed).
int run_cli(int argc, const char* const* argv);

std::vector<std::string> known_experiments();

}  // namespace revoq
