#include "ats/config.hpp"

#include "ats/benchmarks.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace ats {

using nlohmann::json;

void ExperimentConfig::validate() const {
    if (n_init < 1) throw ConfigError("n_init must be >= 1");
    if (n_iterations < 1) throw ConfigError("n_iterations must be >= 1");
    if (n_repetitions < 1) throw ConfigError("n_repetitions must be >= 1");
    if (rep_threads < 1) throw ConfigError("rep_threads must be >= 1");
    if (benchmark == "external") {
        if (!domain) throw ConfigError("benchmark 'external' needs a domain");
    } else {
        try {
            find_benchmark(benchmark);
        } catch (const LookupError& e) {
            throw ConfigError(e.what());
        }
    }
    batch.validate();
    try {
        batch.mcmc.validate(packed_dim(resolved_domain().dim()));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

Bounds ExperimentConfig::resolved_domain() const {
    if (domain) return *domain;
    return find_benchmark(benchmark).domain;
}

namespace {

template <typename T>
T field(const json& j, const std::string& key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config field '" + key + "': invalid value " + j.at(key).dump());
    }
}

Bounds parse_domain(const json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("config field 'domain': expected [[lo, hi], ...]");
    Eigen::VectorXd lo(static_cast<Eigen::Index>(j.size()));
    Eigen::VectorXd hi(lo.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        const json& b = j[i];
        if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number()) {
            throw ConfigError("config field 'domain[" + std::to_string(i) + "]': expected [lo, hi]");
        }
        lo[static_cast<Eigen::Index>(i)] = b[0].get<double>();
        hi[static_cast<Eigen::Index>(i)] = b[1].get<double>();
    }
    try {
        return Bounds(lo, hi);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config field 'domain': ") + e.what());
    }
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    static const std::set<std::string> known = {
        "benchmark",      "strategy",       "batch_size",       "s",
        "acquisition",    "enhance_p",      "jitter_p",         "n_iterations",
        "n_repetitions",  "n_init",         "root_seed",        "output",
        "record_wallclock", "domain",       "rep_threads",      "n_threads",
        "n_features",     "mcmc_walkers",   "mcmc_burn_in",     "mcmc_thin",
        "mcmc_stretch_a", "search_probes_per_dim", "search_top_k", "search_refine_iters"};
    for (const auto& [key, value] : j.items()) {
        if (known.count(key) == 0) throw ConfigError("config: unknown field '" + key + "'");
    }

    ExperimentConfig cfg;
    BatchConfig& b = cfg.batch;
    if (j.contains("benchmark")) cfg.benchmark = field<std::string>(j, "benchmark");
    if (j.contains("strategy")) b.strategy = parse_strategy(field<std::string>(j, "strategy"));
    if (j.contains("acquisition")) b.acquisition = parse_acquisition(field<std::string>(j, "acquisition"));
    if (j.contains("batch_size")) b.batch_size = field<int>(j, "batch_size");
    if (j.contains("s")) b.s = field<int>(j, "s");
    if (j.contains("enhance_p")) b.enhance_p = field<double>(j, "enhance_p");
    if (j.contains("jitter_p")) b.jitter_p = field<double>(j, "jitter_p");
    if (j.contains("n_features")) b.n_features = field<int>(j, "n_features");
    if (j.contains("n_threads")) b.n_threads = field<int>(j, "n_threads");
    if (j.contains("mcmc_walkers")) b.mcmc.n_walkers = field<int>(j, "mcmc_walkers");
    if (j.contains("mcmc_burn_in")) b.mcmc.burn_in = field<int>(j, "mcmc_burn_in");
    if (j.contains("mcmc_thin")) b.mcmc.thin = field<int>(j, "mcmc_thin");
    if (j.contains("mcmc_stretch_a")) b.mcmc.stretch_a = field<double>(j, "mcmc_stretch_a");
    if (j.contains("search_probes_per_dim")) b.search.probes_per_dim = field<int>(j, "search_probes_per_dim");
    if (j.contains("search_top_k")) b.search.top_k = field<int>(j, "search_top_k");
    if (j.contains("search_refine_iters")) b.search.refine_iters = field<int>(j, "search_refine_iters");
    if (j.contains("n_iterations")) cfg.n_iterations = field<int>(j, "n_iterations");
    if (j.contains("n_repetitions")) cfg.n_repetitions = field<int>(j, "n_repetitions");
    if (j.contains("n_init")) cfg.n_init = field<int>(j, "n_init");
    if (j.contains("root_seed")) cfg.root_seed = field<Seed>(j, "root_seed");
    if (j.contains("output")) cfg.output = field<std::string>(j, "output");
    if (j.contains("record_wallclock")) cfg.record_wallclock = field<bool>(j, "record_wallclock");
    if (j.contains("rep_threads")) cfg.rep_threads = field<int>(j, "rep_threads");
    if (j.contains("domain")) cfg.domain = parse_domain(j.at("domain"));
    cfg.batch.root_seed = cfg.root_seed;
    cfg.validate();
    return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
    const BatchConfig& b = cfg.batch;
    json j = {
        {"benchmark", cfg.benchmark},
        {"strategy", to_string(b.strategy)},
        {"acquisition", to_string(b.acquisition)},
        {"batch_size", b.batch_size},
        {"s", b.s},
        {"enhance_p", b.enhance_p},
        {"jitter_p", b.jitter_p},
        {"n_features", b.n_features},
        {"n_threads", b.n_threads},
        {"mcmc_walkers", b.mcmc.n_walkers},
        {"mcmc_burn_in", b.mcmc.burn_in},
        {"mcmc_thin", b.mcmc.thin},
        {"mcmc_stretch_a", b.mcmc.stretch_a},
        {"search_probes_per_dim", b.search.probes_per_dim},
        {"search_top_k", b.search.top_k},
        {"search_refine_iters", b.search.refine_iters},
        {"n_iterations", cfg.n_iterations},
        {"n_repetitions", cfg.n_repetitions},
        {"n_init", cfg.n_init},
        {"root_seed", cfg.root_seed},
        {"output", cfg.output},
        {"record_wallclock", cfg.record_wallclock},
        {"rep_threads", cfg.rep_threads},
    };
    if (cfg.domain) {
        json d = json::array();
        for (Eigen::Index i = 0; i < cfg.domain->dim(); ++i) d.push_back({cfg.domain->lo[i], cfg.domain->hi[i]});
        j["domain"] = d;
    }
    return j;
}

json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        std::size_t col = 1;
        const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < upto; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(what + ": syntax error at line " + std::to_string(line) + ", column " +
                         std::to_string(col) + ": " + e.what());
    }
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path.string());
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    json j;
    try {
        j = read_json_file(path);
    } catch (const ParseError& e) {
        throw ConfigError(e.what());
    }
    return config_from_json(j);
}

}  // namespace ats
