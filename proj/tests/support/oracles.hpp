#pragma once

// Reference computations written independently of the library: dense
// inverses, explicit determinants, direct sums. Slow and obvious on purpose.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

inline double matern52(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& ls, double sv) {
    double r2 = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        const double d = (a[k] - b[k]) / ls[k];
        r2 += d * d;
    }
    const double r = std::sqrt(r2);
    return sv * (1.0 + std::sqrt(5.0) * r + 5.0 * r2 / 3.0) * std::exp(-std::sqrt(5.0) * r);
}

struct GpOracle {
    Eigen::MatrixXd x;  // t x d
    Eigen::VectorXd y;
    Eigen::VectorXd ls;
    double sv;
    double mu;
    double nugget;
    Eigen::MatrixXd kinv;

    GpOracle(Eigen::MatrixXd x_, Eigen::VectorXd y_, Eigen::VectorXd ls_, double sv_, double mu_, double nugget_)
        : x(std::move(x_)), y(std::move(y_)), ls(std::move(ls_)), sv(sv_), mu(mu_), nugget(nugget_) {
        kinv = gram().inverse();
    }

    Eigen::MatrixXd gram() const {
        const Eigen::Index t = x.rows();
        Eigen::MatrixXd k(t, t);
        for (Eigen::Index i = 0; i < t; ++i) {
            for (Eigen::Index j = 0; j < t; ++j) k(i, j) = matern52(x.row(i), x.row(j), ls, sv);
        }
        k.diagonal().array() += nugget;
        return k;
    }

    Eigen::VectorXd cross(const Eigen::VectorXd& p) const {
        Eigen::VectorXd k(x.rows());
        for (Eigen::Index i = 0; i < x.rows(); ++i) k[i] = matern52(x.row(i), p, ls, sv);
        return k;
    }

    double mean(const Eigen::VectorXd& p) const {
        return mu + cross(p).dot(kinv * (y.array() - mu).matrix());
    }

    double var(const Eigen::VectorXd& p) const {
        const Eigen::VectorXd k = cross(p);
        return std::max(sv - k.dot(kinv * k), 0.0);
    }

    double lml() const {
        const Eigen::VectorXd r = (y.array() - mu).matrix();
        const double det = gram().determinant();
        return -0.5 * r.dot(kinv * r) - 0.5 * std::log(det) - 0.5 * static_cast<double>(x.rows()) * std::log(2.0 * M_PI);
    }
};

/// Index of the largest value on a grid, first one on ties.
inline std::size_t argmax(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

inline double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

/// Monte-Carlo E[max(delta - sigma Z, 0)] and its standard error.
inline std::pair<double, double> mc_improvement(double delta, double sigma, int n, std::mt19937_64& rng) {
    std::normal_distribution<double> z(0.0, 1.0);
    double sum = 0.0;
    double sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = std::max(delta - sigma * z(rng), 0.0);
        sum += v;
        sum2 += v * v;
    }
    const double m = sum / n;
    const double var = sum2 / n - m * m;
    return {m, std::sqrt(std::max(var, 0.0) / n)};
}

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double variance_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

}  // namespace oracle
