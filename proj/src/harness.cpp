#include "ats/harness.hpp"

#include "ats/random.hpp"
#include "parallel.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

namespace ats {

using nlohmann::json;

bool ExperimentTrace::failed(int rep) const {
    for (const auto& f : failures) {
        if (f.rep == rep) return true;
    }
    return false;
}

std::vector<IterationRecord> ExperimentTrace::repetition(int rep) const {
    std::vector<IterationRecord> out;
    for (const auto& r : rows) {
        if (r.rep == rep) out.push_back(r);
    }
    return out;
}

double regret(double best, double min_value) {
    return std::max(best - min_value, kRegretFloor);
}

std::optional<double> regret(double best, const BenchmarkSpec& spec) {
    if (!spec.known_minimum) return std::nullopt;
    return regret(best, *spec.known_minimum);
}

std::optional<double> regret(double best, const std::string& benchmark) {
    return regret(best, find_benchmark(benchmark));
}

std::optional<double> intra_batch_distance(const std::vector<Point>& unit_points) {
    const std::size_t m = unit_points.size();
    if (m < 2) return std::nullopt;
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (j != i) row += (unit_points[i] - unit_points[j]).norm();
        }
        total += row / static_cast<double>(m - 1);
    }
    return total / static_cast<double>(m);
}

Seed repetition_seed(Seed root, int rep) {
    return derive_seed(root, {0x5e9, static_cast<std::uint64_t>(rep)});
}

std::vector<Point> initial_points(const Bounds& domain, int n_init, Seed rep_seed) {
    Rng rng(derive_seed(rep_seed, {stream::kInitDesign}));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Point> pts;
    for (int i = 0; i < n_init; ++i) {
        Point x(domain.dim());
        for (Eigen::Index k = 0; k < domain.dim(); ++k) x[k] = domain.lo[k] + unif(rng) * (domain.hi[k] - domain.lo[k]);
        pts.push_back(domain.clamp(x));
    }
    return pts;
}

BatchConfig batch_config_for(const ExperimentConfig& cfg, Seed rep_seed) {
    BatchConfig b = cfg.batch;
    b.root_seed = rep_seed;
    return b;
}

IterationRecord summarize_iteration(const BenchmarkSpec& spec, const Dataset& data, int rep, int iter,
                                    const BatchProposal& batch, const std::vector<double>& values) {
    IterationRecord rec;
    rec.rep = rep;
    rec.iter = iter;
    rec.evals = static_cast<int>(data.size());
    rec.best = data.min_output();
    rec.regret = regret(rec.best, spec);
    rec.diversity = intra_batch_distance(batch.unit_points);
    rec.points = batch.points;
    rec.values = values;
    rec.provenance = batch.provenance;
    return rec;
}

namespace {

struct RepetitionResult {
    std::vector<IterationRecord> rows;
    std::optional<RepetitionFailure> failure;
};

RepetitionResult run_repetition(const ExperimentConfig& cfg, const BenchmarkSpec& spec, int rep) {
    using clock = std::chrono::steady_clock;
    RepetitionResult out;
    const Seed rs = repetition_seed(cfg.root_seed, rep);
    const BatchConfig bcfg = batch_config_for(cfg, rs);
    int iter = 0;
    try {
        Dataset data(spec.domain);
        for (const Point& x : initial_points(spec.domain, cfg.n_init, rs)) data.add(x, spec.evaluator(x));
        for (iter = 1; iter <= cfg.n_iterations; ++iter) {
            const auto t0 = clock::now();
            const BatchProposal batch = propose(data, bcfg, iter);
            std::vector<double> values;
            values.reserve(batch.size());
            for (const Point& x : batch.points) values.push_back(spec.evaluator(x));
            for (std::size_t i = 0; i < batch.size(); ++i) data.add(batch.points[i], values[i]);
            IterationRecord rec = summarize_iteration(spec, data, rep, iter, batch, values);
            if (cfg.record_wallclock) {
                rec.wallclock_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
            }
            out.rows.push_back(std::move(rec));
        }
    } catch (const std::exception& e) {
        out.failure = RepetitionFailure{rep, iter, e.what()};
    }
    return out;
}

}  // namespace

ExperimentTrace run_experiment(const ExperimentConfig& cfg) {
    if (cfg.benchmark == "external") throw ConfigError("run_experiment needs an objective for 'external'");
    return run_experiment(cfg, find_benchmark(cfg.benchmark));
}

ExperimentTrace run_experiment(const ExperimentConfig& cfg, const BenchmarkSpec& objective) {
    cfg.validate();
    std::vector<RepetitionResult> results(static_cast<std::size_t>(cfg.n_repetitions));
    detail::parallel_for(cfg.n_repetitions, cfg.rep_threads, [&](int rep) {
        results[static_cast<std::size_t>(rep)] = run_repetition(cfg, objective, rep);
    });
    ExperimentTrace trace;
    trace.config = cfg;
    for (auto& r : results) {
        for (auto& row : r.rows) trace.rows.push_back(std::move(row));
        if (r.failure) trace.failures.push_back(std::move(*r.failure));
    }
    return trace;
}

std::vector<AggregateRow> aggregate(const ExperimentTrace& trace) {
    std::map<int, std::vector<const IterationRecord*>> by_iter;
    int n_failed = static_cast<int>(trace.failures.size());
    for (const auto& r : trace.rows) {
        if (!trace.failed(r.rep)) by_iter[r.iter].push_back(&r);
    }
    auto mean_se = [](const std::vector<double>& v) {
        const double n = static_cast<double>(v.size());
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= n;
        if (v.size() < 2) return std::pair{mean, 0.0};
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return std::pair{mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
    };
    std::vector<AggregateRow> out;
    for (const auto& [iter, recs] : by_iter) {
        AggregateRow row;
        row.iter = iter;
        row.evals = recs.front()->evals;
        row.n_ok = static_cast<int>(recs.size());
        row.n_failed = n_failed;
        std::vector<double> best;
        std::vector<double> reg;
        std::vector<double> div;
        for (const auto* r : recs) {
            best.push_back(r->best);
            if (r->regret) reg.push_back(*r->regret);
            if (r->diversity) div.push_back(*r->diversity);
        }
        std::tie(row.mean_best, row.se_best) = mean_se(best);
        if (reg.size() == recs.size()) {
            const auto [m, se] = mean_se(reg);
            row.mean_regret = m;
            row.se_regret = se;
        }
        if (div.size() == recs.size()) row.mean_diversity = mean_se(div).first;
        out.push_back(row);
    }
    return out;
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_number(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
}

void write_trace_csv(const ExperimentTrace& trace, std::ostream& out) {
    out << "rep,iter,evals,best,regret,batch_diversity,wallclock_ms\n";
    for (const auto& r : trace.rows) {
        out << r.rep << ',' << r.iter << ',' << r.evals << ',' << format_number(r.best) << ','
            << format_number(r.regret) << ',' << format_number(r.diversity) << ','
            << format_number(r.wallclock_ms) << '\n';
    }
}

void write_aggregate_csv(const std::vector<AggregateRow>& rows, std::ostream& out) {
    out << "iter,evals,mean_best,se_best,mean_regret,se_regret,mean_batch_diversity,n_ok,n_failed\n";
    for (const auto& r : rows) {
        out << r.iter << ',' << r.evals << ',' << format_number(r.mean_best) << ',' << format_number(r.se_best) << ','
            << format_number(r.mean_regret) << ',' << format_number(r.se_regret) << ','
            << format_number(r.mean_diversity) << ',' << r.n_ok << ',' << r.n_failed << '\n';
    }
}

namespace {

json vec_json(const Eigen::VectorXd& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json opt_json(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

}  // namespace

json provenance_to_json(const PointProvenance& p) {
    json thetas = json::array();
    for (const auto& th : p.thetas) {
        thetas.push_back({{"lengthscales", vec_json(th.lengthscales)},
                          {"signal_variance", th.signal_variance},
                          {"mean_const", th.mean_const}});
    }
    json j = {{"index", p.index},
              {"seed", p.seed},
              {"theta_set", p.theta_set},
              {"thetas", thetas},
              {"jitter", p.jitter},
              {"jitter_explorative", p.jitter_explorative},
              {"coin", p.coin ? json(*p.coin) : json(nullptr)},
              {"hallucination", opt_json(p.hallucination)},
              {"acquisition_value", p.acquisition_value}};
    return j;
}

json trace_sidecar(const ExperimentTrace& trace) {
    json iters = json::array();
    for (const auto& r : trace.rows) {
        json pts = json::array();
        for (const auto& x : r.points) pts.push_back(vec_json(x));
        json prov = json::array();
        for (const auto& p : r.provenance) prov.push_back(provenance_to_json(p));
        iters.push_back({{"rep", r.rep},
                         {"iter", r.iter},
                         {"evals", r.evals},
                         {"best", r.best},
                         {"points", pts},
                         {"values", r.values},
                         {"provenance", prov}});
    }
    json fails = json::array();
    for (const auto& f : trace.failures) fails.push_back({{"rep", f.rep}, {"iter", f.iter}, {"message", f.message}});
    return {{"config", config_to_json(trace.config)}, {"failures", fails}, {"iterations", iters}};
}

void write_outputs(const ExperimentTrace& trace, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / "trace.csv");
        write_trace_csv(trace, f);
    }
    {
        std::ofstream f(dir / "aggregate.csv");
        write_aggregate_csv(aggregate(trace), f);
    }
    std::ofstream f(dir / "trace.json");
    f << trace_sidecar(trace).dump(1) << '\n';
}

}  // namespace ats
