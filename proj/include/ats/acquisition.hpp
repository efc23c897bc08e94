#pragma once

#include "ats/common.hpp"
#include "ats/gp.hpp"
#include "ats/hyperposterior.hpp"

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <vector>

namespace ats {

/// Closed-form EI_j for minimization: E[max(incumbent - jitter - f, 0)].
double expected_improvement(double mean, double stddev, double incumbent, double jitter);

/// LCB_j = jitter * stddev - mean, maximized.
inline double lower_confidence_bound(double mean, double stddev, double jitter) {
    return jitter * stddev - mean;
}

double ei_value(const Point& x, const Posterior& post, double incumbent, double jitter);
double lcb_value(const Point& x, const Posterior& post, double jitter);

/// One draw of the acquisition process: the average of the chosen
/// acquisition over s hyper-parameter draws, or the negated value of a
/// sampled GP function for Thompson sampling. Immutable.
class AcquisitionSample {
  public:
    static AcquisitionSample marginalized(AcquisitionKind kind, std::shared_ptr<const Dataset> data,
                                          std::vector<HyperParams> thetas, double jitter);
    static AcquisitionSample thompson(std::shared_ptr<const Dataset> data,
                                      std::shared_ptr<const GpFunctionSample> fn);

    double value(const Point& x) const;
    Eigen::VectorXd values(const Eigen::MatrixXd& points) const;

    /// Posterior mean averaged over the theta draws.
    double mean(const Point& x) const;

    AcquisitionKind kind() const { return kind_; }
    double jitter() const { return jitter_; }
    double incumbent() const { return incumbent_; }
    const std::vector<HyperParams>& thetas() const { return thetas_; }
    const std::vector<Posterior>& posteriors() const { return posteriors_; }
    const Dataset& dataset() const { return *data_; }
    const GpFunctionSample* function() const { return fn_.get(); }

  private:
    AcquisitionSample() = default;

    AcquisitionKind kind_ = AcquisitionKind::EI;
    std::shared_ptr<const Dataset> data_;
    std::vector<HyperParams> thetas_;
    std::vector<Posterior> posteriors_;
    std::shared_ptr<const GpFunctionSample> fn_;
    double jitter_ = 0.0;
    double incumbent_ = 0.0;
};

inline double marginal_value(const Point& x, const AcquisitionSample& sample) {
    return sample.value(x);
}

/// Multi-start derivative-free maximizer settings: uniform probes, the best
/// top_k of them refined by compass search with a halving step.
struct SearchOptions {
    int probes_per_dim = 2048;
    int top_k = 5;
    int refine_iters = 100;
    double initial_step = 0.1;  // fraction of the domain width

    void validate() const;
};

struct SearchResult {
    Point point;
    double value = 0.0;
    double best_probe_value = 0.0;
    int best_probe_index = 0;
};

using BatchObjective = std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>;

SearchResult maximize(const BatchObjective& objective, const Bounds& domain, const SearchOptions& opts, Seed seed);
SearchResult maximize(const AcquisitionSample& sample, const Bounds& domain, const SearchOptions& opts, Seed seed);

/// The uniform probe set used by maximize for this (domain, opts, seed).
Eigen::MatrixXd probe_points(const Bounds& domain, const SearchOptions& opts, Seed seed);

}  // namespace ats
