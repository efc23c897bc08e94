#include "ats/ask_tell.hpp"
#include "ats/benchmarks.hpp"
#include "ats/config.hpp"
#include "ats/gp.hpp"
#include "ats/harness.hpp"
#include "ats/hyperposterior.hpp"
#include "ats/strategies.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;

namespace {

// JSON crosses the boundary as text so the Python side can use its own json module.
ats::ExperimentConfig config_from_text(const std::string& text) {
    return ats::config_from_json(ats::parse_json_text(text, "config"));
}

std::vector<ats::Point> rows(const Eigen::MatrixXd& m) {
    std::vector<ats::Point> out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(m.row(i).transpose());
    return out;
}

Eigen::MatrixXd stack(const std::vector<ats::Point>& pts, Eigen::Index dim) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(pts.size()), dim);
    for (std::size_t i = 0; i < pts.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
    return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Batch Bayesian optimization with acquisition Thompson sampling";

    auto base = py::register_exception<ats::Error>(m, "AtsError", PyExc_RuntimeError);
    py::register_exception<ats::ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<ats::NumericalError>(m, "NumericalError", base.ptr());
    py::register_exception<ats::StateMismatchError>(m, "StateMismatchError", base.ptr());
    py::register_exception<ats::ParseError>(m, "ParseError", base.ptr());
    py::register_exception<ats::InvalidStateError>(m, "InvalidStateError", base.ptr());
    py::register_exception<ats::DomainError>(m, "DomainError", base.ptr());
    py::register_exception<ats::LookupError>(m, "LookupError", base.ptr());

    py::class_<ats::HyperParams>(m, "HyperParams")
        .def(py::init([](Eigen::VectorXd ls, double sv, double mean) {
                 ats::HyperParams hp;
                 hp.lengthscales = std::move(ls);
                 hp.signal_variance = sv;
                 hp.mean_const = mean;
                 hp.validate();
                 return hp;
             }),
             py::arg("lengthscales"), py::arg("signal_variance") = 1.0, py::arg("mean_const") = 0.0)
        .def_readwrite("lengthscales", &ats::HyperParams::lengthscales)
        .def_readwrite("signal_variance", &ats::HyperParams::signal_variance)
        .def_readwrite("mean_const", &ats::HyperParams::mean_const)
        .def_readwrite("nugget", &ats::HyperParams::nugget);

    py::class_<ats::Dataset>(m, "Dataset")
        .def(py::init([](Eigen::VectorXd lo, Eigen::VectorXd hi) { return ats::Dataset(ats::Bounds(lo, hi)); }),
             py::arg("lo"), py::arg("hi"))
        .def("add", &ats::Dataset::add, py::arg("x"), py::arg("y"))
        .def("__len__", &ats::Dataset::size)
        .def_property_readonly("dim", &ats::Dataset::dim)
        .def_property_readonly("inputs", &ats::Dataset::inputs)
        .def_property_readonly("outputs", &ats::Dataset::outputs)
        .def_property_readonly("normalized", &ats::Dataset::normalized)
        .def("min_output", &ats::Dataset::min_output)
        .def("normalize", [](const ats::Dataset& d) { return ats::normalize(d); })
        .def("denormalize", [](const ats::Dataset& d) { return ats::denormalize(d); });

    m.def("log_marginal_likelihood", &ats::log_marginal_likelihood, py::arg("data"), py::arg("hp"));
    m.def(
        "predict",
        [](const ats::Dataset& data, const ats::HyperParams& hp, const Eigen::MatrixXd& points) {
            Eigen::VectorXd mean;
            Eigen::VectorXd var;
            ats::Posterior(data, hp).predict(points, mean, var);
            return py::make_tuple(mean, var);
        },
        py::arg("data"), py::arg("hp"), py::arg("points"), "Posterior mean and variance at each row of points.");
    m.def(
        "sample_hyperparams",
        [](const ats::Dataset& data, int s, ats::Seed seed, int n_walkers, int burn_in) {
            ats::McmcConfig cfg;
            cfg.seed = seed;
            cfg.n_walkers = n_walkers;
            cfg.burn_in = burn_in;
            py::gil_scoped_release release;
            return ats::sample_hyperparams(data, s, cfg, ats::PriorSpec{});
        },
        py::arg("data"), py::arg("s"), py::arg("seed") = 0, py::arg("n_walkers") = 32, py::arg("burn_in") = 300);

    m.def("benchmark_names", &ats::benchmark_names);
    m.def("evaluate", &ats::evaluate, py::arg("name"), py::arg("x"));
    m.def("min_value", &ats::min_value, py::arg("name"));
    m.def("benchmark_domain", [](const std::string& name) {
        const auto& b = ats::find_benchmark(name);
        return py::make_tuple(b.domain.lo, b.domain.hi);
    });

    m.def(
        "propose",
        [](const ats::Dataset& data, const std::string& config_json, int iteration) {
            const auto cfg = config_from_text(config_json);
            ats::BatchConfig b = ats::batch_config_for(cfg, cfg.root_seed);
            py::gil_scoped_release release;
            return stack(ats::propose(data, b, iteration).points, data.dim());
        },
        py::arg("data"), py::arg("config_json"), py::arg("iteration") = 1,
        "One batch for a raw dataset; the config uses the same keys as the CLI.");

    m.def(
        "run_experiment",
        [](const std::string& config_json) {
            const auto cfg = config_from_text(config_json);
            ats::ExperimentTrace trace;
            {
                py::gil_scoped_release release;
                trace = ats::run_experiment(cfg);
            }
            py::list out;
            for (const auto& r : trace.rows) {
                py::dict row;
                row["rep"] = r.rep;
                row["iter"] = r.iter;
                row["evals"] = r.evals;
                row["best"] = r.best;
                row["regret"] = r.regret;
                row["batch_diversity"] = r.diversity;
                row["points"] = stack(r.points, cfg.resolved_domain().dim());
                out.append(row);
            }
            py::list failures;
            for (const auto& f : trace.failures) failures.append(py::make_tuple(f.rep, f.iter, f.message));
            return py::make_tuple(out, failures);
        },
        py::arg("config_json"), "Returns (rows, failures).");

    py::class_<ats::AskTellState>(m, "AskTell")
        .def(py::init([](const std::string& config_json, int rep) { return ats::make_state(config_from_text(config_json), rep); }),
             py::arg("config_json"), py::arg("rep") = 0)
        .def_static("from_json",
                    [](const std::string& text) { return ats::state_from_json(ats::parse_json_text(text, "state")); })
        .def("to_json", [](const ats::AskTellState& s) { return ats::state_to_json(s).dump(); })
        .def("suggest",
             [](ats::AskTellState& s) {
                 std::vector<ats::Point> pts;
                 {
                     py::gil_scoped_release release;
                     pts = ats::suggest(s);
                 }
                 return stack(pts, s.data.dim());
             })
        .def(
            "update",
            [](ats::AskTellState& s, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
                if (x.rows() != y.size()) throw ats::StateMismatchError("x and y differ in length");
                std::vector<ats::Evaluation> res;
                for (const auto& p : rows(x)) res.push_back({p, y[static_cast<Eigen::Index>(res.size())]});
                ats::update(s, res);
            },
            py::arg("x"), py::arg("y"))
        .def_property_readonly("iteration", &ats::AskTellState::next_iteration)
        .def_property_readonly("data", [](const ats::AskTellState& s) { return s.data; })
        .def_property_readonly("has_pending", [](const ats::AskTellState& s) { return s.pending.has_value(); });
}
