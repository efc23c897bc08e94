#include "ats/strategies.hpp"

#include "ats/random.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cctype>
#include <memory>
#include <random>

namespace ats {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::shared_ptr<const Dataset> normalized_copy(const Dataset& raw) {
    if (raw.empty()) throw InvalidStateError("batch proposal needs at least one evaluation");
    return std::make_shared<const Dataset>(normalize(raw));
}

BatchProposal make_proposal(const Dataset& norm, std::vector<std::pair<Point, PointProvenance>> pts) {
    BatchProposal out;
    for (auto& [u, prov] : pts) {
        out.points.push_back(norm.norm().from_unit(u));
        out.unit_points.push_back(std::move(u));
        out.provenance.push_back(std::move(prov));
    }
    return out;
}

SearchResult search(const AcquisitionSample& acq, const BatchConfig& cfg, Seed pseed) {
    return maximize(acq, Bounds::unit_cube(acq.dataset().dim()), cfg.search, derive_seed(pseed, {stream::kSearch}));
}

BatchConfig with_size(BatchConfig cfg, int m) {
    cfg.batch_size = m;
    return cfg;
}

}  // namespace

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::Sequential: return "Sequential";
        case Strategy::ATS: return "ATS";
        case Strategy::JATS: return "jATS";
        case Strategy::HATS: return "hATS";
        case Strategy::BLCB: return "BLCB";
        case Strategy::PTS: return "PTS";
        case Strategy::ATSonBLCB: return "ATSonBLCB";
        case Strategy::ATSonPTS: return "ATSonPTS";
    }
    return "?";
}

std::string to_string(AcquisitionKind k) {
    switch (k) {
        case AcquisitionKind::EI: return "EI";
        case AcquisitionKind::LCB: return "LCB";
        case AcquisitionKind::Thompson: return "TS";
    }
    return "?";
}

Strategy parse_strategy(const std::string& name) {
    const std::string n = lower(name);
    for (Strategy s : {Strategy::Sequential, Strategy::ATS, Strategy::JATS, Strategy::HATS, Strategy::BLCB,
                       Strategy::PTS, Strategy::ATSonBLCB, Strategy::ATSonPTS}) {
        if (lower(to_string(s)) == n) return s;
    }
    if (n == "j-ats") return Strategy::JATS;
    if (n == "h-ats") return Strategy::HATS;
    if (n == "b-lcb") return Strategy::BLCB;
    if (n == "p-ts") return Strategy::PTS;
    if (n == "ats-b-lcb") return Strategy::ATSonBLCB;
    if (n == "ats-p-ts") return Strategy::ATSonPTS;
    throw ConfigError("unknown strategy '" + name + "'");
}

AcquisitionKind parse_acquisition(const std::string& name) {
    const std::string n = lower(name);
    if (n == "ei") return AcquisitionKind::EI;
    if (n == "lcb") return AcquisitionKind::LCB;
    throw ConfigError("unknown acquisition '" + name + "' (expected EI or LCB)");
}

void BatchConfig::validate() const {
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (s < 1) throw ConfigError("s must be >= 1");
    if (!(enhance_p >= 0.0 && enhance_p <= 1.0)) throw ConfigError("enhance_p must lie in [0, 1]");
    if (!(jitter_p >= 0.0 && jitter_p <= 1.0)) throw ConfigError("jitter_p must lie in [0, 1]");
    if (acquisition == AcquisitionKind::Thompson) throw ConfigError("acquisition must be EI or LCB");
    if (n_features < 1) throw ConfigError("n_features must be >= 1");
    if (n_threads < 1) throw ConfigError("n_threads must be >= 1");
    const bool lcb_only = strategy == Strategy::BLCB || strategy == Strategy::ATSonBLCB;
    if (lcb_only && acquisition != AcquisitionKind::LCB) {
        throw ConfigError(to_string(strategy) + " requires the LCB acquisition");
    }
    try {
        search.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

void HallucinatedDataset::append(const Point& x, double h) {
    combined_.add(x, h);
    pending_.emplace_back(x, h);
}

bool enhance_coin(double p, Seed pseed) {
    Rng rng(derive_seed(pseed, {stream::kCoin}));
    return std::bernoulli_distribution(p)(rng);
}

Seed point_seed(Seed root, int iteration, int index) {
    return derive_seed(root, {static_cast<std::uint64_t>(iteration), static_cast<std::uint64_t>(index)});
}

std::vector<HyperParams> draw_thetas(const Dataset& normalized, const BatchConfig& cfg, Seed pseed) {
    McmcConfig mc = cfg.mcmc;
    mc.seed = derive_seed(pseed, {stream::kMcmc});
    return sample_hyperparams(normalized, cfg.s, mc, cfg.prior);
}

std::pair<Point, PointProvenance> ats_point(const Dataset& normalized, const BatchConfig& cfg, Seed pseed,
                                            bool sample_jitter_draw) {
    auto data = std::make_shared<const Dataset>(normalized);
    PointProvenance prov;
    prov.seed = pseed;
    prov.jitter = default_jitter(cfg.acquisition);
    if (sample_jitter_draw) {
        JitterSpec js;
        js.kind = cfg.acquisition;
        js.bernoulli_p = cfg.jitter_p;
        const JitterDraw jd = sample_jitter(js, derive_seed(pseed, {stream::kJitter}));
        prov.jitter = jd.value;
        prov.jitter_explorative = jd.explorative;
    }
    prov.thetas = draw_thetas(normalized, cfg, pseed);
    const auto acq = AcquisitionSample::marginalized(cfg.acquisition, data, prov.thetas, prov.jitter);
    SearchResult res = search(acq, cfg, pseed);
    prov.acquisition_value = res.value;
    return {std::move(res.point), std::move(prov)};
}

namespace {

BatchProposal independent_points(const Dataset& raw, const BatchConfig& cfg, int iteration, bool jitter) {
    cfg.validate();
    const auto norm = normalized_copy(raw);
    const int m = cfg.batch_size;
    std::vector<std::pair<Point, PointProvenance>> pts(static_cast<std::size_t>(m));
    detail::parallel_for(m, cfg.n_threads, [&](int i) {
        auto& slot = pts[static_cast<std::size_t>(i)];
        slot = ats_point(*norm, cfg, point_seed(cfg.root_seed, iteration, i), jitter);
        slot.second.index = i;
        slot.second.theta_set = i;
    });
    return make_proposal(*norm, std::move(pts));
}

// Shared inner loop of B-LCB and ATS-on-B-LCB.
BatchProposal hallucinated_lcb(const Dataset& raw, const BatchConfig& cfg, int iteration, bool enhanced) {
    cfg.validate();
    if (cfg.acquisition != AcquisitionKind::LCB) throw ConfigError("B-LCB requires the LCB acquisition");
    const auto norm = normalized_copy(raw);
    HallucinatedDataset hallucinated(*norm);
    const double jitter = default_jitter(AcquisitionKind::LCB);

    std::vector<HyperParams> thetas;
    int theta_set = 0;
    std::vector<std::pair<Point, PointProvenance>> pts;
    for (int i = 0; i < cfg.batch_size; ++i) {
        const Seed pseed = point_seed(cfg.root_seed, iteration, i);
        PointProvenance prov;
        prov.index = i;
        prov.seed = pseed;
        prov.jitter = jitter;
        bool redraw = i == 0;
        if (enhanced && i > 0) {
            prov.coin = enhance_coin(cfg.enhance_p, pseed);
            redraw = *prov.coin;
        }
        if (redraw) {
            thetas = draw_thetas(*norm, cfg, pseed);
            theta_set = i;
        }
        prov.theta_set = theta_set;
        prov.thetas = thetas;

        const auto acq = AcquisitionSample::marginalized(
            AcquisitionKind::LCB, std::make_shared<const Dataset>(hallucinated.combined()), thetas, jitter);
        SearchResult res = search(acq, cfg, pseed);
        const double h = acq.mean(res.point);
        hallucinated.append(res.point, h);
        prov.hallucination = h;
        prov.acquisition_value = res.value;
        pts.emplace_back(std::move(res.point), std::move(prov));
    }
    return make_proposal(*norm, std::move(pts));
}

std::pair<Point, PointProvenance> thompson_point(const std::shared_ptr<const Dataset>& norm, const BatchConfig& cfg,
                                                 const std::vector<HyperParams>& thetas, int theta_set, int i,
                                                 int iteration) {
    const Seed pseed = point_seed(cfg.root_seed, iteration, i);
    PointProvenance prov;
    prov.index = i;
    prov.seed = pseed;
    prov.theta_set = theta_set;
    prov.thetas = {thetas[static_cast<std::size_t>(i) % thetas.size()]};
    auto fn = std::make_shared<const GpFunctionSample>(
        sample_gp_function(*norm, prov.thetas.front(), derive_seed(pseed, {stream::kFunction}), cfg.n_features));
    const auto acq = AcquisitionSample::thompson(norm, std::move(fn));
    SearchResult res = search(acq, cfg, pseed);
    prov.acquisition_value = res.value;
    return {std::move(res.point), std::move(prov)};
}

}  // namespace

BatchProposal sequential_step(const Dataset& raw, const BatchConfig& cfg, int iteration) {
    return independent_points(raw, with_size(cfg, 1), iteration, false);
}

BatchProposal ats_batch(const Dataset& raw, const BatchConfig& cfg, int iteration) {
    return independent_points(raw, cfg, iteration, false);
}

BatchProposal jats_batch(const Dataset& raw, const BatchConfig& cfg, int iteration) {
    return independent_points(raw, cfg, iteration, true);
}

BatchProposal hats_batch(const Dataset& raw, const BatchConfig& cfg, int iteration) {
    cfg.validate();
    const auto norm = normalized_copy(raw);
    HallucinatedDataset hallucinated(*norm);
    const double jitter = default_jitter(cfg.acquisition);

    std::vector<std::pair<Point, PointProvenance>> pts;
    for (int i = 0; i < cfg.batch_size; ++i) {
        const Seed pseed = point_seed(cfg.root_seed, iteration, i);
        PointProvenance prov;
        prov.index = i;
        prov.seed = pseed;
        prov.theta_set = i;
        prov.jitter = jitter;
        // thetas from the hallucinated data posterior, acquisition on D_t
        prov.thetas = draw_thetas(hallucinated.combined(), cfg, pseed);
        const auto acq = AcquisitionSample::marginalized(cfg.acquisition, norm, prov.thetas, jitter);
        SearchResult res = search(acq, cfg, pseed);
        const double h = acq.mean(res.point);
        hallucinated.append(res.point, h);
        prov.hallucination = h;
        prov.acquisition_value = res.value;
        pts.emplace_back(std::move(res.point), std::move(prov));
    }
    return make_proposal(*norm, std::move(pts));
}

BatchProposal blcb_batch(const Dataset& raw, const BatchConfig& cfg, int iteration) {
    return hallucinated_lcb(raw, cfg, iteration, false);
}

BatchProposal pts_batch(const Dataset& raw, const BatchConfig& cfg, int iteration) {
    cfg.validate();
    const auto norm = normalized_copy(raw);
    const auto thetas = draw_thetas(*norm, cfg, point_seed(cfg.root_seed, iteration, 0));
    const int m = cfg.batch_size;
    std::vector<std::pair<Point, PointProvenance>> pts(static_cast<std::size_t>(m));
    detail::parallel_for(m, cfg.n_threads, [&](int i) {
        pts[static_cast<std::size_t>(i)] = thompson_point(norm, cfg, thetas, 0, i, iteration);
    });
    return make_proposal(*norm, std::move(pts));
}

BatchProposal ats_enhance(Strategy base, const Dataset& raw, const BatchConfig& cfg, int iteration) {
    if (base == Strategy::BLCB) return hallucinated_lcb(raw, cfg, iteration, true);
    if (base != Strategy::PTS) throw ConfigError("ATS enhancement applies to BLCB or PTS only");
    cfg.validate();
    const auto norm = normalized_copy(raw);
    std::vector<HyperParams> thetas;
    int theta_set = 0;
    std::vector<std::pair<Point, PointProvenance>> pts;
    for (int i = 0; i < cfg.batch_size; ++i) {
        const Seed pseed = point_seed(cfg.root_seed, iteration, i);
        std::optional<bool> coin;
        bool redraw = i == 0;
        if (i > 0) {
            coin = enhance_coin(cfg.enhance_p, pseed);
            redraw = *coin;
        }
        if (redraw) {
            thetas = draw_thetas(*norm, cfg, pseed);
            theta_set = i;
        }
        auto pt = thompson_point(norm, cfg, thetas, theta_set, i, iteration);
        pt.second.coin = coin;
        pts.push_back(std::move(pt));
    }
    return make_proposal(*norm, std::move(pts));
}

BatchProposal propose(const Dataset& raw, const BatchConfig& cfg, int iteration) {
    switch (cfg.strategy) {
        case Strategy::Sequential: return sequential_step(raw, cfg, iteration);
        case Strategy::ATS: return ats_batch(raw, cfg, iteration);
        case Strategy::JATS: return jats_batch(raw, cfg, iteration);
        case Strategy::HATS: return hats_batch(raw, cfg, iteration);
        case Strategy::BLCB: return blcb_batch(raw, cfg, iteration);
        case Strategy::PTS: return pts_batch(raw, cfg, iteration);
        case Strategy::ATSonBLCB: return ats_enhance(Strategy::BLCB, raw, cfg, iteration);
        case Strategy::ATSonPTS: return ats_enhance(Strategy::PTS, raw, cfg, iteration);
    }
    throw ConfigError("unknown strategy");
}

}  // namespace ats
