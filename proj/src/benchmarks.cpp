#include "ats/benchmarks.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace ats {

namespace benchmarks {

double branin(const Point& x) {
    constexpr double pi = std::numbers::pi;
    const double a = 1.0;
    const double b = 5.1 / (4.0 * pi * pi);
    const double c = 5.0 / pi;
    const double r = 6.0;
    const double s = 10.0;
    const double t = 1.0 / (8.0 * pi);
    const double q = x[1] - b * x[0] * x[0] + c * x[0] - r;
    return a * q * q + s * (1.0 - t) * std::cos(x[0]) + s;
}

double cosines(const Point& x) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < 2; ++i) {
        const double g = 1.6 * x[i] - 0.5;
        acc += g * g - 0.3 * std::cos(3.0 * std::numbers::pi * g);
    }
    return 1.0 - acc;
}

double hartmann6(const Point& x) {
    static constexpr double alpha[4] = {1.0, 1.2, 3.0, 3.2};
    static constexpr double a[4][6] = {{10, 3, 17, 3.5, 1.7, 8},
                                       {0.05, 10, 17, 0.1, 8, 14},
                                       {3, 3.5, 1.7, 10, 17, 8},
                                       {17, 8, 0.05, 10, 0.1, 14}};
    static constexpr double p[4][6] = {{0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
                                       {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
                                       {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
                                       {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) {
        double inner = 0.0;
        for (int j = 0; j < 6; ++j) {
            const double diff = x[j] - p[i][j];
            inner += a[i][j] * diff * diff;
        }
        acc += alpha[i] * std::exp(-inner);
    }
    return -acc;
}

double eggholder(const Point& x) {
    const double y47 = x[1] + 47.0;
    return -y47 * std::sin(std::sqrt(std::abs(x[0] / 2.0 + y47))) -
           x[0] * std::sin(std::sqrt(std::abs(x[0] - y47)));
}

double rosenbrock(const Point& x) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
        const double u = x[i + 1] - x[i] * x[i];
        const double v = 1.0 - x[i];
        acc += 100.0 * u * u + v * v;
    }
    return acc;
}

}  // namespace benchmarks

namespace {

Bounds box(Eigen::Index d, double lo, double hi) {
    return Bounds(Eigen::VectorXd::Constant(d, lo), Eigen::VectorXd::Constant(d, hi));
}

struct Registry {
    std::mutex mutex;
    std::map<std::string, BenchmarkSpec> specs;

    Registry() {
        Eigen::Vector2d blo(-5.0, 0.0);
        Eigen::Vector2d bhi(10.0, 15.0);
        add({"Branin", Bounds(blo, bhi), 0.3979, benchmarks::branin});
        add({"Cosines", box(2, 0.0, 1.0), -1.773, benchmarks::cosines});
        add({"Hartmann6", box(6, 0.0, 1.0), -3.322, benchmarks::hartmann6});
        add({"Eggholder", box(2, -512.0, 512.0), -959.64, benchmarks::eggholder});
        add({"Rosenbrock4", box(4, -5.0, 10.0), 0.0, benchmarks::rosenbrock});
    }

    void add(BenchmarkSpec spec) {
        auto name = spec.name;
        specs.insert_or_assign(std::move(name), std::move(spec));
    }
};

Registry& registry() {
    static Registry r;
    return r;
}

}  // namespace

const BenchmarkSpec& find_benchmark(const std::string& name) {
    auto& reg = registry();
    std::lock_guard lock(reg.mutex);
    auto it = reg.specs.find(name);
    if (it == reg.specs.end()) throw LookupError("unknown benchmark '" + name + "'");
    // std::map nodes are stable; entries are never erased
    return it->second;
}

std::vector<std::string> benchmark_names() {
    auto& reg = registry();
    std::lock_guard lock(reg.mutex);
    std::vector<std::string> names;
    for (const auto& [name, spec] : reg.specs) names.push_back(name);
    return names;
}

void register_benchmark(BenchmarkSpec spec) {
    if (spec.name.empty()) throw std::invalid_argument("benchmark: empty name");
    if (!spec.evaluator) throw std::invalid_argument("benchmark: missing evaluator");
    auto& reg = registry();
    std::lock_guard lock(reg.mutex);
    if (reg.specs.count(spec.name) != 0) throw std::invalid_argument("benchmark '" + spec.name + "' already exists");
    reg.add(std::move(spec));
}

double evaluate(const std::string& name, const Point& x) {
    const BenchmarkSpec& spec = find_benchmark(name);
    if (x.size() != spec.dim()) {
        throw DomainError(name + ": expected a " + std::to_string(spec.dim()) + "-dimensional point");
    }
    if (!spec.domain.contains(x)) throw DomainError(name + ": point outside the domain");
    return spec.evaluator(x);
}

double min_value(const std::string& name) {
    const BenchmarkSpec& spec = find_benchmark(name);
    if (!spec.known_minimum) throw LookupError("benchmark '" + name + "' has no known minimum");
    return *spec.known_minimum;
}

}  // namespace ats
