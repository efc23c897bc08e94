#include "ats/acquisition.hpp"

#include "ats/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ats {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440084436210484903928;
constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438186848;

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z * kInvSqrt2);
}

double normal_pdf(double z) {
    return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

}  // namespace

double expected_improvement(double mean, double stddev, double incumbent, double jitter) {
    const double delta = incumbent - jitter - mean;
    if (!(stddev > 0.0)) return std::max(delta, 0.0);
    const double z = delta / stddev;
    return std::max(delta * normal_cdf(z) + stddev * normal_pdf(z), 0.0);
}

double ei_value(const Point& x, const Posterior& post, double incumbent, double jitter) {
    return expected_improvement(post.mean(x), post.stddev(x), incumbent, jitter);
}

double lcb_value(const Point& x, const Posterior& post, double jitter) {
    return lower_confidence_bound(post.mean(x), post.stddev(x), jitter);
}

AcquisitionSample AcquisitionSample::marginalized(AcquisitionKind kind, std::shared_ptr<const Dataset> data,
                                                  std::vector<HyperParams> thetas, double jitter) {
    if (kind == AcquisitionKind::Thompson) throw std::invalid_argument("acquisition: use thompson() for TS samples");
    if (thetas.empty()) throw std::invalid_argument("acquisition: need at least one hyper-parameter draw");
    if (!data) throw std::invalid_argument("acquisition: null dataset");
    if (kind == AcquisitionKind::EI && jitter < 0.0) throw std::invalid_argument("acquisition: EI jitter < 0");
    if (kind == AcquisitionKind::LCB && !(jitter > 0.0)) throw std::invalid_argument("acquisition: LCB jitter <= 0");

    AcquisitionSample s;
    s.kind_ = kind;
    s.jitter_ = jitter;
    s.incumbent_ = data->empty() ? 0.0 : data->min_output();
    s.posteriors_.reserve(thetas.size());
    for (const auto& th : thetas) s.posteriors_.emplace_back(*data, th);
    s.thetas_ = std::move(thetas);
    s.data_ = std::move(data);
    return s;
}

AcquisitionSample AcquisitionSample::thompson(std::shared_ptr<const Dataset> data,
                                              std::shared_ptr<const GpFunctionSample> fn) {
    if (!fn) throw std::invalid_argument("acquisition: null function sample");
    if (!data) throw std::invalid_argument("acquisition: null dataset");
    AcquisitionSample s;
    s.kind_ = AcquisitionKind::Thompson;
    s.incumbent_ = data->empty() ? 0.0 : data->min_output();
    s.data_ = std::move(data);
    s.fn_ = std::move(fn);
    return s;
}

double AcquisitionSample::value(const Point& x) const {
    if (kind_ == AcquisitionKind::Thompson) return -(*fn_)(x);
    double acc = 0.0;
    for (const auto& post : posteriors_) {
        acc += kind_ == AcquisitionKind::EI ? ei_value(x, post, incumbent_, jitter_) : lcb_value(x, post, jitter_);
    }
    return acc / static_cast<double>(posteriors_.size());
}

Eigen::VectorXd AcquisitionSample::values(const Eigen::MatrixXd& points) const {
    if (kind_ == AcquisitionKind::Thompson) return -fn_->evaluate(points);
    const Eigen::Index m = points.rows();
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd mu;
    Eigen::VectorXd var;
    for (const auto& post : posteriors_) {
        post.predict(points, mu, var);
        for (Eigen::Index i = 0; i < m; ++i) {
            const double sd = std::sqrt(var[i]);
            acc[i] += kind_ == AcquisitionKind::EI ? expected_improvement(mu[i], sd, incumbent_, jitter_)
                                                   : lower_confidence_bound(mu[i], sd, jitter_);
        }
    }
    return acc / static_cast<double>(posteriors_.size());
}

double AcquisitionSample::mean(const Point& x) const {
    if (kind_ == AcquisitionKind::Thompson) return (*fn_)(x);
    double acc = 0.0;
    for (const auto& post : posteriors_) acc += post.mean(x);
    return acc / static_cast<double>(posteriors_.size());
}

// ---------------------------------------------------------------- search

void SearchOptions::validate() const {
    if (probes_per_dim < 1) throw std::invalid_argument("search: probe budget must be >= 1");
    if (top_k < 1) throw std::invalid_argument("search: top_k must be >= 1");
    if (refine_iters < 0) throw std::invalid_argument("search: negative refinement budget");
    if (!(initial_step > 0.0)) throw std::invalid_argument("search: initial step must be positive");
}

Eigen::MatrixXd probe_points(const Bounds& domain, const SearchOptions& opts, Seed seed) {
    const Eigen::Index d = domain.dim();
    const Eigen::Index n = static_cast<Eigen::Index>(opts.probes_per_dim) * d;
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::MatrixXd probes(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < d; ++k) {
            probes(i, k) = std::min(domain.lo[k] + unif(rng) * (domain.hi[k] - domain.lo[k]), domain.hi[k]);
        }
    }
    return probes;
}

namespace {

struct Refined {
    Point point;
    double value;
};

Refined compass_search(const BatchObjective& objective, const Bounds& domain, Point x, double fx,
                       const SearchOptions& opts) {
    const Eigen::Index d = domain.dim();
    Eigen::VectorXd step = opts.initial_step * domain.width();
    const Eigen::VectorXd min_step = 1e-10 * domain.width();
    Eigen::MatrixXd polls(2 * d, d);
    for (int it = 0; it < opts.refine_iters; ++it) {
        for (Eigen::Index k = 0; k < d; ++k) {
            Point up = x;
            Point down = x;
            up[k] = std::min(x[k] + step[k], domain.hi[k]);
            down[k] = std::max(x[k] - step[k], domain.lo[k]);
            polls.row(2 * k) = up.transpose();
            polls.row(2 * k + 1) = down.transpose();
        }
        const Eigen::VectorXd vals = objective(polls);
        Eigen::Index best = -1;
        double best_val = fx;
        for (Eigen::Index i = 0; i < vals.size(); ++i) {
            if (vals[i] > best_val) {
                best_val = vals[i];
                best = i;
            }
        }
        if (best >= 0) {
            x = polls.row(best).transpose();
            fx = best_val;
        } else {
            step *= 0.5;
            if ((step.array() < min_step.array()).all()) break;
        }
    }
    return {std::move(x), fx};
}

}  // namespace

SearchResult maximize(const BatchObjective& objective, const Bounds& domain, const SearchOptions& opts, Seed seed) {
    opts.validate();
    const Eigen::MatrixXd probes = probe_points(domain, opts, seed);
    const Eigen::VectorXd vals = objective(probes);

    std::vector<Eigen::Index> order(static_cast<std::size_t>(probes.rows()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(opts.top_k), order.size());
    // NaN values rank last
    auto better = [&vals](Eigen::Index a, Eigen::Index b) {
        const double va = std::isnan(vals[a]) ? -HUGE_VAL : vals[a];
        const double vb = std::isnan(vals[b]) ? -HUGE_VAL : vals[b];
        return va > vb || (va == vb && a < b);
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), better);

    SearchResult res;
    res.best_probe_index = static_cast<int>(order.front());
    res.best_probe_value = vals[order.front()];
    res.point = probes.row(order.front()).transpose();
    res.value = res.best_probe_value;
    for (std::size_t r = 0; r < k; ++r) {
        const Eigen::Index idx = order[r];
        Refined ref = compass_search(objective, domain, probes.row(idx).transpose(), vals[idx], opts);
        if (ref.value > res.value) {
            res.value = ref.value;
            res.point = std::move(ref.point);
        }
    }
    return res;
}

SearchResult maximize(const AcquisitionSample& sample, const Bounds& domain, const SearchOptions& opts, Seed seed) {
    return maximize([&sample](const Eigen::MatrixXd& pts) { return sample.values(pts); }, domain, opts, seed);
}

}  // namespace ats
