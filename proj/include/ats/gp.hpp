#pragma once

#include "ats/common.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>
#include <vector>

namespace ats {

inline constexpr double kDefaultNugget = 1e-6;
inline constexpr double kMaxNugget = 1e-2;

/// Affine maps between the original problem coordinates and the normalized
/// coordinates the surrogate works in (unit-cube inputs, z-scored outputs).
struct NormState {
    bool active = false;
    Eigen::VectorXd input_offset;
    Eigen::VectorXd input_scale;
    double output_mean = 0.0;
    double output_std = 1.0;

    Point to_unit(const Point& x) const;
    Point from_unit(const Point& u) const;
    double normalize_output(double y) const { return (y - output_mean) / output_std; }
    double denormalize_output(double z) const { return z * output_std + output_mean; }
};

/// Collected evaluations. Inputs are stored row-wise (t x d).
class Dataset {
  public:
    Dataset() = default;
    explicit Dataset(Bounds domain);
    Dataset(Bounds domain, Eigen::MatrixXd inputs, Eigen::VectorXd outputs);

    void add(const Point& x, double y);

    Eigen::Index size() const { return outputs_.size(); }
    bool empty() const { return outputs_.size() == 0; }
    Eigen::Index dim() const { return domain_.dim(); }

    const Bounds& domain() const { return domain_; }
    const Eigen::MatrixXd& inputs() const { return inputs_; }
    const Eigen::VectorXd& outputs() const { return outputs_; }
    Point input(Eigen::Index i) const { return inputs_.row(i).transpose(); }
    const NormState& norm() const { return norm_; }
    bool normalized() const { return norm_.active; }

    /// Smallest output, the incumbent f(x-). Requires size() >= 1.
    double min_output() const;

    friend Dataset normalize(const Dataset& raw);
    friend Dataset denormalize(const Dataset& normalized);

  private:
    Bounds domain_;
    Eigen::MatrixXd inputs_;
    Eigen::VectorXd outputs_;
    NormState norm_;
};

/// Maps inputs to the unit cube and z-scores outputs. A constant output
/// vector keeps stddev 1. Throws InvalidStateError on an empty or already
/// normalized dataset.
Dataset normalize(const Dataset& raw);
Dataset denormalize(const Dataset& normalized);

/// Surrogate hyper-parameters in normalized units.
struct HyperParams {
    Eigen::VectorXd lengthscales;
    double signal_variance = 1.0;
    double mean_const = 0.0;
    double nugget = kDefaultNugget;

    bool valid() const;
    void validate() const;  // throws std::invalid_argument
};

/// Matern 5/2 correlation at scaled distance r (no signal variance).
inline double matern52_correlation(double r) {
    constexpr double kSqrt5 = 2.23606797749978969640917366873127623544;
    const double sr = kSqrt5 * r;
    return (1.0 + sr + sr * sr / 3.0) * std::exp(-sr);
}

double matern52(const Point& a, const Point& b, const HyperParams& hp);

/// Exact GP posterior for one hyper-parameter vector. Immutable after
/// construction and safe to query concurrently.
class Posterior {
  public:
    Posterior(const Dataset& data, HyperParams hp);

    double mean(const Point& x) const;
    double variance(const Point& x) const;
    double stddev(const Point& x) const { return std::sqrt(variance(x)); }

    /// Row-wise batch prediction; var is floored at zero.
    void predict(const Eigen::MatrixXd& points, Eigen::VectorXd& mean, Eigen::VectorXd& var) const;

    double log_marginal_likelihood() const;

    const HyperParams& hyperparams() const { return hp_; }
    double effective_nugget() const { return nugget_; }
    Eigen::Index size() const { return y_.size(); }

  private:
    Eigen::VectorXd cross_kernel(const Point& x) const;

    Eigen::MatrixXd x_;
    Eigen::VectorXd y_;
    HyperParams hp_;
    Eigen::VectorXd inv_lengthscales_;
    Eigen::LLT<Eigen::MatrixXd> chol_;
    Eigen::VectorXd alpha_;  // (K + nugget I)^-1 (y - mean_const)
    double nugget_ = kDefaultNugget;
};

Posterior posterior(const Dataset& data, const HyperParams& hp);

/// -1/2 r'K^-1 r - 1/2 log|K| - t/2 log 2pi with r = y - mean_const.
/// Defined as 0 for an empty dataset.
double log_marginal_likelihood(const Dataset& data, const HyperParams& hp);

/// Repeated marginal-likelihood evaluation on fixed data. Pairwise squared
/// coordinate differences are computed once, which is what the MCMC inner
/// loop needs.
class LikelihoodEvaluator {
  public:
    explicit LikelihoodEvaluator(const Dataset& data);

    double operator()(const HyperParams& hp) const;

  private:
    Eigen::Index n_ = 0;
    Eigen::Index dim_ = 0;
    // squared coordinate differences, dim_ values per strictly-lower pair (i > j), column-major pair order
    std::vector<double> sq_diff_;
    Eigen::VectorXd y_;
};

/// Factorizes K + nugget I, escalating the nugget tenfold up to kMaxNugget.
/// Returns the nugget that succeeded; throws NumericalError otherwise.
double robust_cholesky(const Eigen::MatrixXd& k, double nugget, Eigen::LLT<Eigen::MatrixXd>& out);

/// A function drawn (approximately) from the GP posterior through a random
/// feature expansion of the Matern 5/2 kernel.
class GpFunctionSample {
  public:
    GpFunctionSample(Eigen::MatrixXd frequencies, Eigen::VectorXd phases, Eigen::VectorXd weights,
                     double amplitude, double mean_const);

    double operator()(const Point& x) const;
    Eigen::VectorXd evaluate(const Eigen::MatrixXd& points) const;

    Eigen::Index n_features() const { return phases_.size(); }

  private:
    Eigen::MatrixXd frequencies_;  // features x d
    Eigen::VectorXd phases_;
    Eigen::VectorXd weights_;
    double amplitude_;
    double mean_const_;
};

inline constexpr int kDefaultFeatureCount = 1024;

/// Random-feature posterior draw. Frequencies come from the Matern 5/2
/// spectral density (multivariate Student-t, 5 dof, scale 1/lengthscale);
/// weights are conditioned on the data by Matheron's update, which gives an
/// exact sample of the weight-space posterior.
GpFunctionSample sample_gp_function(const Dataset& data, const HyperParams& hp, Seed seed,
                                    int n_features = kDefaultFeatureCount);

}  // namespace ats
