#pragma once

#include "ats/common.hpp"
#include "ats/strategies.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace ats {

struct ExperimentConfig {
    std::string benchmark = "Branin";  // a registered name, or "external"
    BatchConfig batch;
    int n_iterations = 1;
    int n_repetitions = 10;
    int n_init = 5;
    Seed root_seed = 0;
    std::string output;  // directory for trace files; empty writes nothing
    bool record_wallclock = true;
    std::optional<Bounds> domain;  // required for "external"
    int rep_threads = 1;

    void validate() const;  // throws ConfigError
    Bounds resolved_domain() const;
};

/// Flat JSON object; keys are the field names above plus the BatchConfig
/// fields (batch_size, s, acquisition, strategy, enhance_p, jitter_p) and
/// the sampler/search knobs (mcmc_walkers, mcmc_burn_in, mcmc_thin,
/// mcmc_stretch_a, search_probes_per_dim, search_top_k, search_refine_iters,
/// n_features, n_threads). Unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Parses text, reporting syntax errors with line and column.
nlohmann::json parse_json_text(const std::string& text, const std::string& what);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace ats
