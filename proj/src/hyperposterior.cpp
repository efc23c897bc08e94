#include "ats/hyperposterior.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace ats {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kInitAttempts = 100;
}  // namespace

void McmcConfig::validate(int dim) const {
    if (n_walkers < 2 * dim || n_walkers % 2 != 0) {
        throw std::invalid_argument("mcmc: need an even number of walkers >= 2 * dim (dim = " + std::to_string(dim) +
                                    ", walkers = " + std::to_string(n_walkers) + ")");
    }
    if (burn_in < 0) throw std::invalid_argument("mcmc: negative burn-in");
    if (thin < 1) throw std::invalid_argument("mcmc: thin must be >= 1");
    if (!(stretch_a > 1.0)) throw std::invalid_argument("mcmc: stretch parameter must exceed 1");
}

double log_gamma_density(double x, double shape, double rate) {
    if (!(x > 0.0) || !std::isfinite(x)) return kNegInf;
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double log_prior(const HyperParams& hp, const PriorSpec& spec) {
    if (!(hp.mean_const >= spec.mean_lo && hp.mean_const <= spec.mean_hi)) return kNegInf;
    double lp = -std::log(spec.mean_hi - spec.mean_lo);
    lp += log_gamma_density(hp.signal_variance, spec.signal_shape, spec.signal_rate);
    for (Eigen::Index i = 0; i < hp.lengthscales.size(); ++i) {
        lp += log_gamma_density(hp.lengthscales[i], spec.lengthscale_shape, spec.lengthscale_rate);
    }
    return std::isnan(lp) ? kNegInf : lp;
}

double log_posterior(const HyperParams& hp, const PriorSpec& spec, const LikelihoodFn& likelihood) {
    const double lp = log_prior(hp, spec);
    if (lp == kNegInf) return kNegInf;
    return lp + likelihood(hp);
}

double log_posterior(const HyperParams& hp, const Dataset& data, const PriorSpec& spec) {
    return log_posterior(hp, spec, [&data](const HyperParams& h) { return log_marginal_likelihood(data, h); });
}

int packed_dim(Eigen::Index input_dim) {
    return static_cast<int>(input_dim) + 2;
}

Eigen::VectorXd pack(const HyperParams& hp) {
    const Eigen::Index d = hp.lengthscales.size();
    Eigen::VectorXd v(d + 2);
    v.head(d) = hp.lengthscales.array().log().matrix();
    v[d] = std::log(hp.signal_variance);
    v[d + 1] = hp.mean_const;
    return v;
}

HyperParams unpack(const Eigen::VectorXd& packed, double nugget) {
    const Eigen::Index d = packed.size() - 2;
    HyperParams hp;
    hp.lengthscales = packed.head(d).array().exp().matrix();
    hp.signal_variance = std::exp(packed[d]);
    hp.mean_const = packed[d + 1];
    hp.nugget = nugget;
    return hp;
}

double packed_log_posterior(const Eigen::VectorXd& packed, const PriorSpec& spec, const LikelihoodFn& likelihood) {
    if (!packed.allFinite()) return kNegInf;
    const HyperParams hp = unpack(packed);
    const double lp = log_posterior(hp, spec, likelihood);
    if (lp == kNegInf) return kNegInf;
    // d(theta)/d(log theta) = theta for every positive component
    return lp + packed.head(packed.size() - 1).sum();
}

double sample_stretch_factor(double a, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    const double s = (a - 1.0) * u + 1.0;
    return s * s / a;
}

EnsembleResult ensemble_sample(const LogDensity& logpdf, const Eigen::MatrixXd& initial, const McmcConfig& cfg,
                               int n_steps) {
    const int n = static_cast<int>(initial.rows());
    const int dim = static_cast<int>(initial.cols());
    cfg.validate(dim);
    if (n != cfg.n_walkers) throw std::invalid_argument("mcmc: initial ensemble size != n_walkers");
    if (n_steps < 0) throw std::invalid_argument("mcmc: negative step count");

    Eigen::MatrixXd walkers = initial;
    Eigen::VectorXd lp(n);
    bool any_finite = false;
    for (int k = 0; k < n; ++k) {
        lp[k] = logpdf(walkers.row(k).transpose());
        any_finite = any_finite || lp[k] > kNegInf;
    }
    if (!any_finite) throw McmcInitError("mcmc: every initial walker has zero density");

    Rng rng(cfg.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int half = n / 2;
    std::uniform_int_distribution<int> pick(0, half - 1);

    EnsembleResult out;
    std::size_t accepted = 0;
    std::size_t proposed = 0;
    for (int step = 1; step <= n_steps; ++step) {
        for (int side = 0; side < 2; ++side) {
            const int first = side * half;
            const int other = (1 - side) * half;
            for (int k = first; k < first + half; ++k) {
                const int j = other + pick(rng);
                const double z = sample_stretch_factor(cfg.stretch_a, rng);
                const double u = unif(rng);
                const Eigen::VectorXd y = stretch_proposal(walkers.row(k).transpose(), walkers.row(j).transpose(), z);
                const double lp_y = logpdf(y);
                ++proposed;
                if (std::log(u) < stretch_log_acceptance(z, dim, lp_y, lp[k])) {
                    walkers.row(k) = y.transpose();
                    lp[k] = lp_y;
                    ++accepted;
                }
            }
        }
        if (step > cfg.burn_in && (step - cfg.burn_in) % cfg.thin == 0) {
            for (int k = 0; k < n; ++k) out.draws.emplace_back(walkers.row(k).transpose());
        }
    }
    out.final_walkers = std::move(walkers);
    out.acceptance_rate = proposed > 0 ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
    return out;
}

Eigen::VectorXd sample_prior_packed(Eigen::Index input_dim, const PriorSpec& spec, Rng& rng) {
    std::gamma_distribution<double> ls(spec.lengthscale_shape, 1.0 / spec.lengthscale_rate);
    std::gamma_distribution<double> sv(spec.signal_shape, 1.0 / spec.signal_rate);
    std::uniform_real_distribution<double> mu(spec.mean_lo, spec.mean_hi);
    Eigen::VectorXd v(input_dim + 2);
    for (Eigen::Index i = 0; i < input_dim; ++i) v[i] = std::log(ls(rng));
    v[input_dim] = std::log(sv(rng));
    v[input_dim + 1] = mu(rng);
    return v;
}

std::vector<HyperParams> sample_hyperparams(const Dataset& data, int s, const McmcConfig& cfg,
                                            const PriorSpec& spec) {
    if (s < 1) throw std::invalid_argument("sample_hyperparams: s must be >= 1");
    const int dim = packed_dim(data.dim());
    cfg.validate(dim);

    const LikelihoodEvaluator likelihood(data);
    const LikelihoodFn lik = [&likelihood](const HyperParams& hp) { return likelihood(hp); };
    const LogDensity logpdf = [&](const Eigen::VectorXd& v) { return packed_log_posterior(v, spec, lik); };

    Rng init_rng(derive_seed(cfg.seed, {0x1417}));
    Eigen::MatrixXd initial(cfg.n_walkers, dim);
    for (int k = 0; k < cfg.n_walkers; ++k) {
        Eigen::VectorXd v = sample_prior_packed(data.dim(), spec, init_rng);
        for (int attempt = 1; attempt < kInitAttempts && !(logpdf(v) > kNegInf); ++attempt) {
            v = sample_prior_packed(data.dim(), spec, init_rng);
        }
        initial.row(k) = v.transpose();
    }

    const int kept_steps = (s + cfg.n_walkers - 1) / cfg.n_walkers;
    const EnsembleResult res = ensemble_sample(logpdf, initial, cfg, cfg.burn_in + kept_steps * cfg.thin);

    std::vector<HyperParams> out;
    out.reserve(static_cast<std::size_t>(s));
    for (std::size_t i = res.draws.size() - static_cast<std::size_t>(s); i < res.draws.size(); ++i) {
        out.push_back(unpack(res.draws[i]));
    }
    return out;
}

double JitterSpec::default_value() const {
    return default_jitter(kind);
}

JitterDraw sample_jitter(const JitterSpec& spec, Seed seed) {
    Rng rng(seed);
    std::bernoulli_distribution coin(spec.bernoulli_p);
    if (!coin(rng)) return {spec.default_value(), false};
    if (spec.kind == AcquisitionKind::LCB) {
        std::gamma_distribution<double> ga(spec.lcb_alpha, 1.0);
        std::gamma_distribution<double> gb(spec.lcb_beta, 1.0);
        const double a = ga(rng);
        const double b = gb(rng);
        return {a / (a + b), true};
    }
    std::uniform_real_distribution<double> expo(spec.ei_log10_lo, spec.ei_log10_hi);
    return {std::pow(10.0, expo(rng)), true};
}

}  // namespace ats
