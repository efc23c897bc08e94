#pragma once

#include "ats/common.hpp"
#include "ats/gp.hpp"
#include "ats/random.hpp"

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace ats {

enum class AcquisitionKind { EI, LCB, Thompson };

/// Independent priors on the surrogate hyper-parameters. Gamma laws are
/// shape/rate, so the default lengthscale prior has mean 1/6 in unit-cube
/// units.
struct PriorSpec {
    double lengthscale_shape = 1.0;
    double lengthscale_rate = 6.0;
    double signal_shape = 1.0;
    double signal_rate = 6.0;
    double mean_lo = -3.0;
    double mean_hi = 3.0;
};

struct McmcConfig {
    int n_walkers = 32;
    int burn_in = 300;
    int thin = 1;
    double stretch_a = 2.0;
    Seed seed = 0;

    void validate(int dim) const;
};

double log_gamma_density(double x, double shape, double rate);

/// Sum of the component log-densities; -inf outside the support.
double log_prior(const HyperParams& hp, const PriorSpec& spec);

using LikelihoodFn = std::function<double(const HyperParams&)>;

/// log_prior + likelihood(hp). The likelihood is not called when the prior
/// is -inf.
double log_posterior(const HyperParams& hp, const PriorSpec& spec, const LikelihoodFn& likelihood);
double log_posterior(const HyperParams& hp, const Dataset& data, const PriorSpec& spec);

// Sampler coordinates: [log lengthscale_1..d, log signal_variance, mean_const].
int packed_dim(Eigen::Index input_dim);
Eigen::VectorXd pack(const HyperParams& hp);
HyperParams unpack(const Eigen::VectorXd& packed, double nugget = kDefaultNugget);

/// Log-density of the packed vector, including the log-Jacobian of the
/// exp transform on the positive components.
double packed_log_posterior(const Eigen::VectorXd& packed, const PriorSpec& spec, const LikelihoodFn& likelihood);

using LogDensity = std::function<double(const Eigen::VectorXd&)>;

struct EnsembleResult {
    std::vector<Eigen::VectorXd> draws;  // kept steps in order, walkers in order within a step
    Eigen::MatrixXd final_walkers;       // n_walkers x dim
    double acceptance_rate = 0.0;
};

/// Draw z from g(z) ~ 1/sqrt(z) on [1/a, a].
double sample_stretch_factor(double a, Rng& rng);

inline Eigen::VectorXd stretch_proposal(const Eigen::VectorXd& walker, const Eigen::VectorXd& partner, double z) {
    return partner + z * (walker - partner);
}

inline double stretch_log_acceptance(double z, int dim, double lp_proposal, double lp_current) {
    return (dim - 1) * std::log(z) + lp_proposal - lp_current;
}

/// Goodman-Weare stretch-move ensemble sampler. The two halves of the
/// ensemble are updated in turn, each against the other half. Returns the
/// walker positions of every thin-th step after burn_in, over n_steps total
/// steps. Throws McmcInitError if every initial walker has -inf density.
EnsembleResult ensemble_sample(const LogDensity& logpdf, const Eigen::MatrixXd& initial, const McmcConfig& cfg,
                               int n_steps);

/// One draw from the prior, in packed coordinates.
Eigen::VectorXd sample_prior_packed(Eigen::Index input_dim, const PriorSpec& spec, Rng& rng);

/// s draws from p(theta | data): walkers start i.i.d. from the prior, run
/// burn-in, and the last s kept positions are returned.
std::vector<HyperParams> sample_hyperparams(const Dataset& data, int s, const McmcConfig& cfg,
                                            const PriorSpec& spec);

/// Jitter prior for j-ATS: with probability bernoulli_p an explorative draw,
/// otherwise the plain-acquisition default (EI 0, LCB 1).
struct JitterSpec {
    AcquisitionKind kind = AcquisitionKind::EI;
    double bernoulli_p = 0.5;
    double ei_log10_lo = -3.0;
    double ei_log10_hi = 0.0;
    double lcb_alpha = 1.0;
    double lcb_beta = 12.0;

    double default_value() const;
};

inline double default_jitter(AcquisitionKind kind) {
    return kind == AcquisitionKind::LCB ? 1.0 : 0.0;
}

struct JitterDraw {
    double value = 0.0;
    bool explorative = false;
};

JitterDraw sample_jitter(const JitterSpec& spec, Seed seed);

}  // namespace ats
