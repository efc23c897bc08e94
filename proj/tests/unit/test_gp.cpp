#include "ats/gp.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace ats;

namespace {

HyperParams make_hp(Eigen::VectorXd ls, double sv = 1.0, double mu = 0.0) {
    HyperParams hp;
    hp.lengthscales = std::move(ls);
    hp.signal_variance = sv;
    hp.mean_const = mu;
    return hp;
}

Dataset random_unit_dataset(int t, int d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> n(0.0, 1.0);
    Dataset data(Bounds::unit_cube(d));
    for (int i = 0; i < t; ++i) {
        Point x(d);
        for (int k = 0; k < d; ++k) x[k] = u(rng);
        data.add(x, n(rng));
    }
    return data;
}

HyperParams random_hp(int d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ls(0.1, 1.0);
    std::uniform_real_distribution<double> sv(0.5, 2.0);
    std::uniform_real_distribution<double> mu(-1.0, 1.0);
    Eigen::VectorXd l(d);
    for (int k = 0; k < d; ++k) l[k] = ls(rng);
    return make_hp(l, sv(rng), mu(rng));
}

}  // namespace

TEST_CASE("matern52 at zero distance is the signal variance") {
    const auto hp = make_hp(Eigen::Vector2d(0.3, 0.7), 2.5);
    const Point a = Eigen::Vector2d(0.2, 0.9);
    CHECK(matern52(a, a, hp) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("matern52 is symmetric") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const auto hp = make_hp(Eigen::Vector3d(0.4, 1.2, 0.8), 1.3);
    for (int i = 0; i < 100; ++i) {
        const Point a = Eigen::Vector3d(u(rng), u(rng), u(rng));
        const Point b = Eigen::Vector3d(u(rng), u(rng), u(rng));
        CHECK(matern52(a, b, hp) == matern52(b, a, hp));
    }
}

TEST_CASE("matern52 at unit distance matches the closed form") {
    const auto hp = make_hp(Eigen::VectorXd::Ones(1));
    const Point a = Eigen::VectorXd::Constant(1, 0.0);
    const Point b = Eigen::VectorXd::Constant(1, 1.0);
    CHECK(matern52(a, b, hp) == doctest::Approx(0.5239941088318203).epsilon(1e-14));
}

TEST_CASE("matern52 rejects mismatched dimensions") {
    const auto hp = make_hp(Eigen::Vector2d(1, 1));
    CHECK_THROWS_AS(matern52(Eigen::Vector2d(0, 0), Eigen::Vector3d(0, 0, 0), hp), std::invalid_argument);
}

TEST_CASE("normalize z-scores two outputs") {
    Dataset d(Bounds::unit_cube(1));
    d.add(Eigen::VectorXd::Constant(1, 0.1), 2.0);
    d.add(Eigen::VectorXd::Constant(1, 0.9), 4.0);
    const Dataset n = normalize(d);
    CHECK(n.outputs()[0] == doctest::Approx(-1.0));
    CHECK(n.outputs()[1] == doctest::Approx(1.0));
    CHECK(n.normalized());
}

TEST_CASE("normalize clamps the spread of constant outputs") {
    Dataset d(Bounds::unit_cube(2));
    for (int i = 0; i < 3; ++i) d.add(Eigen::Vector2d(0.1 * i, 0.2), 7.0);
    const Dataset n = normalize(d);
    for (Eigen::Index i = 0; i < n.size(); ++i) CHECK(n.outputs()[i] == 0.0);
    CHECK(n.norm().output_std == 1.0);
}

TEST_CASE("normalize maps the domain corner to the unit corner") {
    Bounds branin(Eigen::Vector2d(-5, 0), Eigen::Vector2d(10, 15));
    Dataset d(branin);
    d.add(Eigen::Vector2d(-5, 0), 1.0);
    d.add(Eigen::Vector2d(10, 15), 2.0);
    const Dataset n = normalize(d);
    CHECK(n.input(0).norm() == doctest::Approx(0.0));
    CHECK(n.input(1)[0] == doctest::Approx(1.0));
    CHECK(n.input(1)[1] == doctest::Approx(1.0));
    CHECK(n.domain().lo.isZero());
    CHECK(n.domain().hi.isOnes());
}

TEST_CASE("normalize rejects empty and already-normalized data") {
    Dataset d(Bounds::unit_cube(2));
    CHECK_THROWS_AS(normalize(d), InvalidStateError);
    d.add(Eigen::Vector2d(0.5, 0.5), 1.0);
    CHECK_THROWS_AS(normalize(normalize(d)), InvalidStateError);
}

TEST_CASE("denormalize inverts normalize") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Bounds dom(Eigen::Vector3d(-5, 0, 100), Eigen::Vector3d(10, 15, 300));
    Dataset d(dom);
    for (int i = 0; i < 20; ++i) {
        Point x = dom.lo + (dom.hi - dom.lo).cwiseProduct(Eigen::Vector3d(u(rng), u(rng), u(rng)));
        d.add(x, 1e3 * (u(rng) - 0.3));
    }
    const Dataset back = denormalize(normalize(d));
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        CHECK(std::abs(back.outputs()[i] - d.outputs()[i]) <= 1e-12 * std::max(1.0, std::abs(d.outputs()[i])));
        for (Eigen::Index k = 0; k < 3; ++k) {
            CHECK(std::abs(back.inputs()(i, k) - d.inputs()(i, k)) <= 1e-12 * std::max(1.0, std::abs(d.inputs()(i, k))));
        }
    }
    const Dataset n = normalize(d);
    CHECK(n.outputs().mean() == doctest::Approx(0.0).epsilon(1e-12));
    const double sd = std::sqrt((n.outputs().array() - n.outputs().mean()).square().mean());
    CHECK(sd == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dataset rejects out-of-domain points") {
    Dataset d(Bounds::unit_cube(2));
    CHECK_THROWS_AS(d.add(Eigen::Vector2d(1.5, 0.5), 1.0), DomainError);
}

TEST_CASE("empty posterior is the prior") {
    Dataset d(Bounds::unit_cube(2));
    const Posterior p(d, make_hp(Eigen::Vector2d(0.2, 0.3), 1.7, 0.4));
    const Point x = Eigen::Vector2d(0.3, 0.6);
    CHECK(p.mean(x) == 0.4);
    CHECK(p.stddev(x) == doctest::Approx(std::sqrt(1.7)));
    CHECK(log_marginal_likelihood(d, make_hp(Eigen::Vector2d(0.2, 0.3))) == 0.0);
}

TEST_CASE("posterior interpolates a single point") {
    Dataset d(Bounds::unit_cube(2));
    d.add(Eigen::Vector2d(0.3, 0.4), 0.8);
    const Posterior p(d, make_hp(Eigen::Vector2d(0.3, 0.3)));
    CHECK(std::abs(p.mean(Eigen::Vector2d(0.3, 0.4)) - 0.8) <= 1e-4);
}

TEST_CASE("posterior matches the explicit-inverse oracle") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Dataset d = random_unit_dataset(5, 2, rng);
    const auto hp = random_hp(2, rng);
    const Posterior p(d, hp);
    const oracle::GpOracle o(d.inputs(), d.outputs(), hp.lengthscales, hp.signal_variance, hp.mean_const, hp.nugget);
    for (int i = 0; i < 10; ++i) {
        const Point x = Eigen::Vector2d(u(rng), u(rng));
        CHECK(std::abs(p.mean(x) - o.mean(x)) <= 1e-8);
        CHECK(std::abs(p.variance(x) - o.var(x)) <= 1e-8);
    }
}

TEST_CASE("batch prediction agrees with pointwise queries") {
    std::mt19937_64 rng(12);
    const Dataset d = random_unit_dataset(9, 3, rng);
    const Posterior p(d, random_hp(3, rng));
    const Eigen::MatrixXd pts = (Eigen::MatrixXd::Random(20, 3).array() + 1.0) / 2.0;
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    p.predict(pts, m, v);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        CHECK(m[i] == doctest::Approx(p.mean(pts.row(i).transpose())).epsilon(1e-12));
        CHECK(v[i] == doctest::Approx(p.variance(pts.row(i).transpose())).epsilon(1e-10));
    }
}

TEST_CASE("posterior at training inputs is nugget-limited") {
    std::mt19937_64 rng(13);
    const Dataset n = normalize(random_unit_dataset(8, 2, rng));
    const Posterior p(n, make_hp(Eigen::Vector2d(0.3, 0.3)));
    for (Eigen::Index i = 0; i < n.size(); ++i) {
        CHECK(std::abs(p.mean(n.input(i)) - n.outputs()[i]) <= 1e-4);
        CHECK(p.stddev(n.input(i)) <= 1e-2);
    }
}

TEST_CASE("posterior variance stays within the prior") {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        const Dataset d = random_unit_dataset(6, 2, rng);
        const auto hp = random_hp(2, rng);
        const Posterior p(d, hp);
        for (int i = 0; i < 50; ++i) {
            const double v = p.variance(Eigen::Vector2d(u(rng), u(rng)));
            CHECK(v >= 0.0);
            CHECK(v <= hp.signal_variance + hp.nugget);
        }
    }
}

TEST_CASE("single-point marginal likelihood closed form") {
    Dataset d(Bounds::unit_cube(1));
    d.add(Eigen::VectorXd::Constant(1, 0.5), 0.0);
    CHECK(log_marginal_likelihood(d, make_hp(Eigen::VectorXd::Ones(1))) ==
          doctest::Approx(-0.9189385332046727 - 0.5 * std::log(1.0 + 1e-6)).epsilon(1e-14));
}

TEST_CASE("marginal likelihood matches the explicit-determinant oracle") {
    std::mt19937_64 rng(15);
    for (int t = 1; t <= 8; ++t) {
        const Dataset d = random_unit_dataset(t, 2, rng);
        const auto hp = random_hp(2, rng);
        const oracle::GpOracle o(d.inputs(), d.outputs(), hp.lengthscales, hp.signal_variance, hp.mean_const, hp.nugget);
        CHECK(std::abs(log_marginal_likelihood(d, hp) - o.lml()) <= 1e-8);
        CHECK(std::abs(LikelihoodEvaluator(d)(hp) - o.lml()) <= 1e-8);
        CHECK(std::abs(Posterior(d, hp).log_marginal_likelihood() - o.lml()) <= 1e-8);
    }
}

TEST_CASE("marginal likelihood depends on the nugget") {
    std::mt19937_64 rng(16);
    const Dataset d = random_unit_dataset(4, 2, rng);
    auto hp = make_hp(Eigen::Vector2d(0.3, 0.3));
    const double a = log_marginal_likelihood(d, hp);
    hp.nugget *= 10;
    CHECK(log_marginal_likelihood(d, hp) != a);
}

TEST_CASE("gram matrices of distinct points factorize") {
    std::mt19937_64 rng(17);
    const Dataset d = random_unit_dataset(200, 2, rng);
    const Posterior p(d, make_hp(Eigen::Vector2d(2.0, 2.0)));
    CHECK(p.effective_nugget() <= kMaxNugget);
}

TEST_CASE("duplicated inputs escalate the nugget or factorize") {
    Dataset d(Bounds::unit_cube(1));
    for (int i = 0; i < 30; ++i) d.add(Eigen::VectorXd::Constant(1, 0.5), 1.0);
    const Posterior p(d, make_hp(Eigen::VectorXd::Constant(1, 0.2)));
    CHECK(p.effective_nugget() >= kDefaultNugget);
    CHECK(std::isfinite(p.mean(Eigen::VectorXd::Constant(1, 0.4))));
}

TEST_CASE("cholesky failure reports the final nugget") {
    Eigen::MatrixXd k = Eigen::MatrixXd::Identity(2, 2);
    k(0, 0) = -1.0;
    Eigen::LLT<Eigen::MatrixXd> llt;
    try {
        robust_cholesky(k, kDefaultNugget, llt);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(e.last_nugget() == doctest::Approx(kMaxNugget));
    }
}

TEST_CASE("function samples are deterministic in the seed") {
    Dataset d(Bounds::unit_cube(2));
    const auto hp = make_hp(Eigen::Vector2d(0.3, 0.3));
    const auto g1 = sample_gp_function(d, hp, 5);
    const auto g2 = sample_gp_function(d, hp, 5);
    const auto g3 = sample_gp_function(d, hp, 6);
    bool differ = false;
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            const Point x = Eigen::Vector2d(i / 9.0, j / 9.0);
            CHECK(g1(x) == g2(x));
            differ = differ || g1(x) != g3(x);
        }
    }
    CHECK(differ);
    CHECK_THROWS_AS(sample_gp_function(d, hp, 1, 0), std::invalid_argument);
}

TEST_CASE("function samples agree with the posterior in distribution") {
    Dataset d(Bounds::unit_cube(1));
    d.add(Eigen::VectorXd::Constant(1, 0.2), 0.5);
    d.add(Eigen::VectorXd::Constant(1, 0.5), -0.3);
    d.add(Eigen::VectorXd::Constant(1, 0.8), 1.1);
    const auto hp = make_hp(Eigen::VectorXd::Constant(1, 0.1), 1.0, 0.2);
    const Posterior post(d, hp);
    const Point train = Eigen::VectorXd::Constant(1, 0.5);
    const Point far = Eigen::VectorXd::Constant(1, 0.0);
    std::vector<double> at_train;
    std::vector<double> at_far;
    for (int s = 0; s < 2000; ++s) {
        const auto g = sample_gp_function(d, hp, static_cast<Seed>(s));
        at_train.push_back(g(train));
        at_far.push_back(g(far));
    }
    const double se = std::sqrt(oracle::variance_of(at_train) / 2000.0);
    CHECK(std::abs(oracle::mean_of(at_train) - post.mean(train)) <= 3.0 * se + 1e-9);
    CHECK(std::abs(oracle::variance_of(at_far) / post.variance(far) - 1.0) <= 0.15);
}
