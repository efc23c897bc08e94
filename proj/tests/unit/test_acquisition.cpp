#include "ats/acquisition.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <memory>
#include <random>

using namespace ats;

namespace {

HyperParams hp2(double l1, double l2, double sv = 1.0, double mu = 0.0) {
    HyperParams hp;
    hp.lengthscales = Eigen::Vector2d(l1, l2);
    hp.signal_variance = sv;
    hp.mean_const = mu;
    return hp;
}

std::shared_ptr<const Dataset> toy_data(std::uint64_t seed, int t = 6) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Dataset d(Bounds::unit_cube(2));
    for (int i = 0; i < t; ++i) {
        const double a = u(rng);
        const double b = u(rng);
        d.add(Eigen::Vector2d(a, b), std::cos(5 * a) + b);
    }
    return std::make_shared<const Dataset>(normalize(d));
}

SearchOptions small_search() {
    SearchOptions o;
    o.probes_per_dim = 256;
    o.refine_iters = 60;
    return o;
}

}  // namespace

TEST_CASE("EI with zero spread") {
    CHECK(expected_improvement(1.0, 0.0, 1.0, 0.0) == 0.0);
    CHECK(expected_improvement(2.0, 0.0, 1.0, 0.5) == 0.0);
    CHECK(expected_improvement(0.2, 0.0, 1.0, 0.3) == doctest::Approx(0.5));
}

TEST_CASE("EI in the symmetric case is phi(0)") {
    CHECK(expected_improvement(0.0, 1.0, 0.0, 0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
}

TEST_CASE("EI agrees with a Monte-Carlo expectation") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> delta(-2.0, 2.0);
    std::uniform_real_distribution<double> sigma(0.05, 2.0);
    for (int i = 0; i < 5; ++i) {
        const double d = delta(rng);
        const double s = sigma(rng);
        const auto [mc, se] = oracle::mc_improvement(d, s, 200000, rng);
        CHECK(std::abs(expected_improvement(-d, s, 0.0, 0.0) - mc) <= 3.0 * se + 1e-12);
    }
}

TEST_CASE("EI is non-negative and non-increasing in the jitter") {
    for (double m = -2.0; m <= 2.0; m += 0.25) {
        for (double s = 0.0; s <= 2.0; s += 0.25) {
            double prev = std::numeric_limits<double>::infinity();
            for (double j = 0.0; j <= 1.0; j += 0.1) {
                const double v = expected_improvement(m, s, 0.0, j);
                CHECK(v >= 0.0);
                CHECK(v <= prev + 1e-15);
                prev = v;
            }
        }
    }
}

TEST_CASE("LCB arithmetic and monotonicity") {
    CHECK(lower_confidence_bound(1.0, 2.0, 0.2) == doctest::Approx(-0.6));
    CHECK(lower_confidence_bound(0.4, 0.3, 1.0) == doctest::Approx(0.3 - 0.4));
    for (double j = 0.1; j < 1.0; j += 0.1) {
        CHECK(lower_confidence_bound(0.4, 0.3, j + 0.05) > lower_confidence_bound(0.4, 0.3, j));
    }
}

TEST_CASE("LCB at a training point is minus the observation") {
    const auto data = toy_data(1);
    const Posterior post(*data, hp2(0.3, 0.3));
    for (Eigen::Index i = 0; i < data->size(); ++i) {
        CHECK(std::abs(lcb_value(data->input(i), post, 1.0) + data->outputs()[i]) <= 1e-2);
    }
}

TEST_CASE("marginal value reduces to the single-theta value") {
    const auto data = toy_data(2);
    const HyperParams hp = hp2(0.3, 0.5, 0.9, 0.1);
    const Posterior post(*data, hp);
    const auto one = AcquisitionSample::marginalized(AcquisitionKind::EI, data, {hp}, 0.0);
    const auto two = AcquisitionSample::marginalized(AcquisitionKind::EI, data, {hp, hp}, 0.0);
    const auto lcb = AcquisitionSample::marginalized(AcquisitionKind::LCB, data, {hp}, 1.0);
    for (double a = 0.05; a < 1.0; a += 0.2) {
        const Point x = Eigen::Vector2d(a, 1.0 - a);
        CHECK(marginal_value(x, one) == ei_value(x, post, data->min_output(), 0.0));
        CHECK(marginal_value(x, two) == doctest::Approx(marginal_value(x, one)).epsilon(1e-15));
        CHECK(marginal_value(x, lcb) == lcb_value(x, post, 1.0));
    }
    CHECK(one.incumbent() == data->min_output());
}

TEST_CASE("marginal value is the mean over thetas") {
    const auto data = toy_data(3);
    const std::vector<HyperParams> thetas = {hp2(0.2, 0.4), hp2(0.5, 0.1, 1.5, -0.3), hp2(0.9, 0.9, 0.4, 0.2)};
    const auto acq = AcquisitionSample::marginalized(AcquisitionKind::EI, data, thetas, 0.05);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd pts(20, 2);
    for (int i = 0; i < 20; ++i) pts.row(i) << u(rng), u(rng);
    const Eigen::VectorXd batch = acq.values(pts);
    for (int i = 0; i < 20; ++i) {
        const Point x = pts.row(i).transpose();
        double sum = 0.0;
        for (const auto& hp : thetas) sum += ei_value(x, Posterior(*data, hp), data->min_output(), 0.05);
        CHECK(std::abs(marginal_value(x, acq) - sum / 3.0) <= 1e-12);
        CHECK(std::abs(batch[i] - sum / 3.0) <= 1e-12);
    }
}

TEST_CASE("Thompson acquisition negates the sampled function") {
    const auto data = toy_data(5);
    auto fn = std::make_shared<const GpFunctionSample>(sample_gp_function(*data, hp2(0.3, 0.3), 8, 64));
    const auto acq = AcquisitionSample::thompson(data, fn);
    const Point x = Eigen::Vector2d(0.4, 0.6);
    CHECK(acq.value(x) == -(*fn)(x));
    CHECK(acq.kind() == AcquisitionKind::Thompson);
    CHECK(acq.thetas().empty());
}

TEST_CASE("constant acquisition returns the first probe") {
    const auto empty = std::make_shared<const Dataset>(Bounds::unit_cube(2));
    const auto acq = AcquisitionSample::marginalized(AcquisitionKind::LCB, empty, {hp2(0.3, 0.3)}, 1.0);
    const Bounds dom = Bounds::unit_cube(2);
    const auto opts = small_search();
    const auto res = maximize(acq, dom, opts, 17);
    const Eigen::MatrixXd probes = probe_points(dom, opts, 17);
    CHECK(res.best_probe_index == 0);
    CHECK(res.point == Point(probes.row(0).transpose()));
    CHECK(dom.contains(res.point));
}

TEST_CASE("maximizer finds a quadratic peak") {
    const BatchObjective quad = [](const Eigen::MatrixXd& p) {
        return Eigen::VectorXd(-(p.col(0).array() - 0.3).square());
    };
    const auto res = maximize(quad, Bounds::unit_cube(1), small_search(), 3);
    CHECK(std::abs(res.point[0] - 0.3) <= 1e-3);
}

TEST_CASE("maximizer beats its probe set and stays in the domain") {
    const BatchObjective multi = [](const Eigen::MatrixXd& p) {
        return Eigen::VectorXd((12.0 * p.col(0).array()).sin() * (9.0 * p.col(1).array()).cos());
    };
    const Bounds dom(Eigen::Vector2d(-1.0, 2.0), Eigen::Vector2d(1.0, 3.0));
    const auto opts = small_search();
    for (Seed seed : {1u, 2u}) {
        const auto res = maximize(multi, dom, opts, seed);
        const double probe_max = multi(probe_points(dom, opts, seed)).maxCoeff();
        CHECK(res.best_probe_value == probe_max);
        CHECK(res.value >= probe_max - 1e-9);
        CHECK(dom.contains(res.point));
        CHECK(multi(res.point.transpose())[0] == res.value);
    }
}

TEST_CASE("maximizer ranks NaN last") {
    const BatchObjective nan_first = [](const Eigen::MatrixXd& p) {
        Eigen::VectorXd v = -p.col(0);
        v[0] = std::numeric_limits<double>::quiet_NaN();
        return v;
    };
    const auto res = maximize(nan_first, Bounds::unit_cube(1), small_search(), 9);
    CHECK(std::isfinite(res.value));
    CHECK(res.point[0] <= 1e-3);
}

TEST_CASE("EI argmax is unchanged by output normalization") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto raw = std::make_shared<Dataset>(Bounds::unit_cube(2));
    for (int i = 0; i < 7; ++i) {
        const double a = u(rng);
        const double b = u(rng);
        raw->add(Eigen::Vector2d(a, b), 40.0 * std::sin(4 * a) + 10.0 * b + 100.0);
    }
    const auto norm = std::make_shared<const Dataset>(normalize(*raw));
    // normalization only touches outputs here, so the inputs already coincide
    const double m = norm->norm().output_mean;
    const double s = norm->norm().output_std;
    HyperParams raw_hp = hp2(0.25, 0.4, 1.3 * s * s, m + 0.2 * s);
    raw_hp.nugget = 1e-6 * s * s;
    const HyperParams norm_hp = hp2(0.25, 0.4, 1.3, 0.2);
    const auto a = AcquisitionSample::marginalized(AcquisitionKind::EI, raw, {raw_hp}, 0.0);
    const auto b = AcquisitionSample::marginalized(AcquisitionKind::EI, norm, {norm_hp}, 0.0);
    const auto opts = small_search();
    const auto ra = maximize(a, Bounds::unit_cube(2), opts, 4);
    const auto rb = maximize(b, Bounds::unit_cube(2), opts, 4);
    CHECK(ra.best_probe_index == rb.best_probe_index);
    CHECK((ra.point - rb.point).norm() <= 1e-6);
    CHECK(ra.value / s == doctest::Approx(rb.value).epsilon(1e-6));
}

TEST_CASE("search options validation") {
    SearchOptions o;
    CHECK_NOTHROW(o.validate());
    o.top_k = 0;
    CHECK_THROWS(o.validate());
    o = SearchOptions{};
    o.probes_per_dim = 0;
    CHECK_THROWS(o.validate());
}
