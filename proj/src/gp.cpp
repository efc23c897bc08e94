#include "ats/gp.hpp"

#include "ats/random.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace ats {

namespace {

constexpr double kLog2Pi = 1.83787706640934548356065947281123527972;

void check_dim(const Point& x, Eigen::Index dim, const char* where) {
    if (x.size() != dim) {
        throw std::invalid_argument(std::string(where) + ": expected dimension " + std::to_string(dim) +
                                    ", got " + std::to_string(x.size()));
    }
}

Eigen::MatrixXd gram(const Eigen::MatrixXd& x, const HyperParams& hp) {
    const Eigen::Index n = x.rows();
    const Eigen::MatrixXd scaled = x * hp.lengthscales.cwiseInverse().asDiagonal();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        k(j, j) = hp.signal_variance;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double r = (scaled.row(i) - scaled.row(j)).norm();
            k(i, j) = k(j, i) = hp.signal_variance * matern52_correlation(r);
        }
    }
    return k;
}

double lml_from_factor(const Eigen::LLT<Eigen::MatrixXd>& chol, const Eigen::VectorXd& resid) {
    const Eigen::VectorXd v = chol.matrixL().solve(resid);
    const double log_det = 2.0 * chol.matrixLLT().diagonal().array().log().sum();
    return -0.5 * v.squaredNorm() - 0.5 * log_det - 0.5 * static_cast<double>(resid.size()) * kLog2Pi;
}

}  // namespace

// ---------------------------------------------------------------- normalization

Point NormState::to_unit(const Point& x) const {
    if (!active) return x;
    return ((x - input_offset).array() / input_scale.array()).matrix().cwiseMax(0.0).cwiseMin(1.0);
}

Point NormState::from_unit(const Point& u) const {
    if (!active) return u;
    Point x = input_offset + (u.array() * input_scale.array()).matrix();
    return x.cwiseMax(input_offset).cwiseMin(input_offset + input_scale);
}

Dataset::Dataset(Bounds domain) : domain_(std::move(domain)), inputs_(0, domain_.dim()), outputs_(0) {}

Dataset::Dataset(Bounds domain, Eigen::MatrixXd inputs, Eigen::VectorXd outputs)
    : domain_(std::move(domain)), inputs_(std::move(inputs)), outputs_(std::move(outputs)) {
    if (inputs_.rows() != outputs_.size()) throw std::invalid_argument("dataset: inputs/outputs length mismatch");
    if (inputs_.cols() != domain_.dim()) throw std::invalid_argument("dataset: input dimension mismatch");
    for (Eigen::Index i = 0; i < inputs_.rows(); ++i) {
        if (!domain_.contains(inputs_.row(i).transpose())) throw DomainError("dataset: input outside domain");
    }
}

void Dataset::add(const Point& x, double y) {
    check_dim(x, dim(), "dataset add");
    if (!domain_.contains(x)) throw DomainError("dataset: input outside domain");
    const Eigen::Index t = size();
    inputs_.conservativeResize(t + 1, dim());
    inputs_.row(t) = x.transpose();
    outputs_.conservativeResize(t + 1);
    outputs_[t] = y;
}

double Dataset::min_output() const {
    if (empty()) throw InvalidStateError("dataset: incumbent of an empty dataset");
    return outputs_.minCoeff();
}

Dataset normalize(const Dataset& raw) {
    if (raw.empty()) throw InvalidStateError("normalize: empty dataset");
    if (raw.normalized()) throw InvalidStateError("normalize: dataset is already normalized");

    NormState ns;
    ns.active = true;
    ns.input_offset = raw.domain().lo;
    ns.input_scale = raw.domain().width();
    const Eigen::Index t = raw.size();
    ns.output_mean = raw.outputs().mean();
    const double var = (raw.outputs().array() - ns.output_mean).square().sum() / static_cast<double>(t);
    ns.output_std = var > 0.0 ? std::sqrt(var) : 1.0;

    Dataset out(Bounds::unit_cube(raw.dim()));
    out.inputs_.resize(t, raw.dim());
    out.outputs_.resize(t);
    for (Eigen::Index i = 0; i < t; ++i) {
        out.inputs_.row(i) = ns.to_unit(raw.input(i)).transpose();
        out.outputs_[i] = ns.normalize_output(raw.outputs()[i]);
    }
    out.norm_ = ns;
    return out;
}

Dataset denormalize(const Dataset& normalized) {
    if (!normalized.normalized()) throw InvalidStateError("denormalize: dataset is not normalized");
    const NormState& ns = normalized.norm();
    Dataset out(Bounds(ns.input_offset, ns.input_offset + ns.input_scale));
    const Eigen::Index t = normalized.size();
    out.inputs_.resize(t, normalized.dim());
    out.outputs_.resize(t);
    for (Eigen::Index i = 0; i < t; ++i) {
        out.inputs_.row(i) = ns.from_unit(normalized.input(i)).transpose();
        out.outputs_[i] = ns.denormalize_output(normalized.outputs()[i]);
    }
    return out;
}

// ---------------------------------------------------------------- kernel

bool HyperParams::valid() const {
    if (lengthscales.size() == 0) return false;
    if (!(lengthscales.array() > 0.0).all() || !lengthscales.allFinite()) return false;
    return signal_variance > 0.0 && std::isfinite(signal_variance) && std::isfinite(mean_const) && nugget > 0.0;
}

void HyperParams::validate() const {
    if (!valid()) throw std::invalid_argument("hyper-parameters: positivity/finiteness violated");
}

double matern52(const Point& a, const Point& b, const HyperParams& hp) {
    check_dim(a, hp.lengthscales.size(), "matern52");
    check_dim(b, hp.lengthscales.size(), "matern52");
    const double r = ((a - b).array() / hp.lengthscales.array()).matrix().norm();
    return hp.signal_variance * matern52_correlation(r);
}

double robust_cholesky(const Eigen::MatrixXd& k, double nugget, Eigen::LLT<Eigen::MatrixXd>& out) {
    const Eigen::Index n = k.rows();
    for (;;) {
        Eigen::MatrixXd kn = k;
        kn.diagonal().array() += nugget;
        out.compute(kn);
        if (out.info() == Eigen::Success && (out.matrixLLT().diagonal().array() > 0.0).all()) return nugget;
        if (nugget * 10.0 > kMaxNugget * (1.0 + 1e-12)) {
            throw NumericalError("cholesky failed for a " + std::to_string(n) + "x" + std::to_string(n) +
                                     " kernel matrix after nugget escalation",
                                 nugget);
        }
        nugget *= 10.0;
    }
}

// ---------------------------------------------------------------- posterior

Posterior::Posterior(const Dataset& data, HyperParams hp)
    : x_(data.inputs()), y_(data.outputs()), hp_(std::move(hp)) {
    hp_.validate();
    if (hp_.lengthscales.size() != data.dim()) throw std::invalid_argument("posterior: lengthscale count != dimension");
    inv_lengthscales_ = hp_.lengthscales.cwiseInverse();
    nugget_ = hp_.nugget;
    if (y_.size() > 0) {
        nugget_ = robust_cholesky(gram(x_, hp_), hp_.nugget, chol_);
        alpha_ = chol_.solve((y_.array() - hp_.mean_const).matrix());
    }
}

Eigen::VectorXd Posterior::cross_kernel(const Point& x) const {
    const Eigen::Index n = x_.rows();
    Eigen::VectorXd k(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r = ((x_.row(i).transpose() - x).array() * inv_lengthscales_.array()).matrix().norm();
        k[i] = hp_.signal_variance * matern52_correlation(r);
    }
    return k;
}

double Posterior::mean(const Point& x) const {
    check_dim(x, x_.cols(), "posterior mean");
    if (y_.size() == 0) return hp_.mean_const;
    return hp_.mean_const + cross_kernel(x).dot(alpha_);
}

double Posterior::variance(const Point& x) const {
    check_dim(x, x_.cols(), "posterior variance");
    if (y_.size() == 0) return hp_.signal_variance;
    const Eigen::VectorXd v = chol_.matrixL().solve(cross_kernel(x));
    return std::max(hp_.signal_variance - v.squaredNorm(), 0.0);
}

void Posterior::predict(const Eigen::MatrixXd& points, Eigen::VectorXd& mean, Eigen::VectorXd& var) const {
    if (points.cols() != x_.cols()) throw std::invalid_argument("posterior predict: dimension mismatch");
    const Eigen::Index m = points.rows();
    const Eigen::Index n = x_.rows();
    if (n == 0) {
        mean = Eigen::VectorXd::Constant(m, hp_.mean_const);
        var = Eigen::VectorXd::Constant(m, hp_.signal_variance);
        return;
    }
    const Eigen::MatrixXd ps = points * inv_lengthscales_.asDiagonal();
    const Eigen::MatrixXd xs = x_ * inv_lengthscales_.asDiagonal();
    Eigen::MatrixXd kt(n, m);  // column per query point
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double r = (xs.row(i) - ps.row(j)).norm();
            kt(i, j) = hp_.signal_variance * matern52_correlation(r);
        }
    }
    mean = (kt.transpose() * alpha_).array() + hp_.mean_const;
    chol_.matrixL().solveInPlace(kt);
    var = (hp_.signal_variance - kt.colwise().squaredNorm().array()).max(0.0).matrix().transpose();
}

double Posterior::log_marginal_likelihood() const {
    if (y_.size() == 0) return 0.0;
    return lml_from_factor(chol_, (y_.array() - hp_.mean_const).matrix());
}

Posterior posterior(const Dataset& data, const HyperParams& hp) {
    return Posterior(data, hp);
}

double log_marginal_likelihood(const Dataset& data, const HyperParams& hp) {
    if (data.empty()) return 0.0;
    return Posterior(data, hp).log_marginal_likelihood();
}

// ---------------------------------------------------------------- fast likelihood

LikelihoodEvaluator::LikelihoodEvaluator(const Dataset& data)
    : n_(data.size()), dim_(data.dim()), y_(data.outputs()) {
    const auto& x = data.inputs();
    sq_diff_.reserve(static_cast<std::size_t>(n_ * (n_ - 1) / 2 * dim_));
    for (Eigen::Index j = 0; j < n_; ++j) {
        for (Eigen::Index i = j + 1; i < n_; ++i) {
            for (Eigen::Index d = 0; d < dim_; ++d) {
                const double diff = x(i, d) - x(j, d);
                sq_diff_.push_back(diff * diff);
            }
        }
    }
}

double LikelihoodEvaluator::operator()(const HyperParams& hp) const {
    if (n_ == 0) return 0.0;
    if (hp.lengthscales.size() != dim_) throw std::invalid_argument("likelihood: lengthscale count != dimension");
    const Eigen::VectorXd inv_l2 = hp.lengthscales.array().square().inverse().matrix();
    const double sv = hp.signal_variance;

    Eigen::MatrixXd k(n_, n_);
    auto fill = [&](double nugget) {
        const double* sq = sq_diff_.data();
        for (Eigen::Index j = 0; j < n_; ++j) {
            k(j, j) = sv + nugget;
            for (Eigen::Index i = j + 1; i < n_; ++i) {
                double r2 = 0.0;
                for (Eigen::Index d = 0; d < dim_; ++d) r2 += sq[d] * inv_l2[d];
                sq += dim_;
                k(i, j) = sv * matern52_correlation(std::sqrt(r2));
            }
        }
    };

    double nugget = hp.nugget;
    for (;;) {
        fill(nugget);
        Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> chol(k);
        if (chol.info() == Eigen::Success && (k.diagonal().array() > 0.0).all()) {
            const Eigen::VectorXd v =
                k.triangularView<Eigen::Lower>().solve((y_.array() - hp.mean_const).matrix());
            const double log_det = 2.0 * k.diagonal().array().log().sum();
            return -0.5 * v.squaredNorm() - 0.5 * log_det - 0.5 * static_cast<double>(n_) * kLog2Pi;
        }
        if (nugget * 10.0 > kMaxNugget * (1.0 + 1e-12)) {
            throw NumericalError("cholesky failed in the marginal likelihood after nugget escalation", nugget);
        }
        nugget *= 10.0;
    }
}

// ---------------------------------------------------------------- function draws

GpFunctionSample::GpFunctionSample(Eigen::MatrixXd frequencies, Eigen::VectorXd phases, Eigen::VectorXd weights,
                                   double amplitude, double mean_const)
    : frequencies_(std::move(frequencies)),
      phases_(std::move(phases)),
      weights_(std::move(weights)),
      amplitude_(amplitude),
      mean_const_(mean_const) {}

double GpFunctionSample::operator()(const Point& x) const {
    check_dim(x, frequencies_.cols(), "gp function");
    const Eigen::ArrayXd arg = (frequencies_ * x + phases_).array();
    return mean_const_ + amplitude_ * (arg.cos() * weights_.array()).sum();
}

Eigen::VectorXd GpFunctionSample::evaluate(const Eigen::MatrixXd& points) const {
    if (points.cols() != frequencies_.cols()) throw std::invalid_argument("gp function: dimension mismatch");
    Eigen::MatrixXd arg = points * frequencies_.transpose();
    arg.rowwise() += phases_.transpose();
    return (arg.array().cos().matrix() * weights_ * amplitude_).array() + mean_const_;
}

GpFunctionSample sample_gp_function(const Dataset& data, const HyperParams& hp, Seed seed, int n_features) {
    if (n_features < 1) throw std::invalid_argument("gp function: need at least one feature");
    hp.validate();
    const Eigen::Index d = data.dim();
    if (hp.lengthscales.size() != d) throw std::invalid_argument("gp function: lengthscale count != dimension");

    constexpr double kDof = 5.0;
    Rng rng(seed);
    std::normal_distribution<double> normal;
    std::chi_squared_distribution<double> chi2(kDof);
    std::uniform_real_distribution<double> unif(0.0, 2.0 * std::numbers::pi);

    const Eigen::Index f = n_features;
    Eigen::MatrixXd freq(f, d);
    Eigen::VectorXd phase(f);
    for (Eigen::Index i = 0; i < f; ++i) {
        const double scale = std::sqrt(kDof / chi2(rng));
        for (Eigen::Index k = 0; k < d; ++k) freq(i, k) = normal(rng) * scale / hp.lengthscales[k];
        phase[i] = unif(rng);
    }
    Eigen::VectorXd w(f);
    for (Eigen::Index i = 0; i < f; ++i) w[i] = normal(rng);

    const double amplitude = std::sqrt(2.0 * hp.signal_variance / static_cast<double>(f));
    const Eigen::Index t = data.size();
    if (t > 0) {
        Eigen::MatrixXd phi = data.inputs() * freq.transpose();
        phi.rowwise() += phase.transpose();
        phi = amplitude * phi.array().cos().matrix();  // t x f

        Eigen::VectorXd eps(t);
        for (Eigen::Index i = 0; i < t; ++i) eps[i] = normal(rng);

        Eigen::LLT<Eigen::MatrixXd> chol;
        const Eigen::MatrixXd gram_f = phi * phi.transpose();
        const double nugget = robust_cholesky(gram_f, hp.nugget, chol);
        const Eigen::VectorXd resid =
            (data.outputs().array() - hp.mean_const).matrix() - phi * w - std::sqrt(nugget) * eps;
        w += phi.transpose() * chol.solve(resid);
    }
    return GpFunctionSample(std::move(freq), std::move(phase), std::move(w), amplitude, hp.mean_const);
}

}  // namespace ats
