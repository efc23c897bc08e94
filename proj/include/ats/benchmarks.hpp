#pragma once

#include "ats/common.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ats {

using Objective = std::function<double(const Point&)>;

struct BenchmarkSpec {
    std::string name;
    Bounds domain;
    std::optional<double> known_minimum;
    Objective evaluator;

    Eigen::Index dim() const { return domain.dim(); }
};

namespace benchmarks {

double branin(const Point& x);
/// 1 - sum(g^2 - 0.3 cos(3 pi g)), g = 1.6 w - 0.5, minimized on [0,1]^2.
double cosines(const Point& x);
double hartmann6(const Point& x);
double eggholder(const Point& x);
double rosenbrock(const Point& x);

}  // namespace benchmarks

/// Built-ins plus anything added through register_benchmark. Lookups are
/// thread-safe.
const BenchmarkSpec& find_benchmark(const std::string& name);
std::vector<std::string> benchmark_names();
void register_benchmark(BenchmarkSpec spec);

/// Throws DomainError outside the domain, LookupError on unknown names.
double evaluate(const std::string& name, const Point& x);
double min_value(const std::string& name);

}  // namespace ats
