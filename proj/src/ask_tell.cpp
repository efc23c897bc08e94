#include "ats/ask_tell.hpp"

#include "ats/harness.hpp"
#include "ats/strategies.hpp"

#include <cmath>
#include <fstream>

namespace ats {

using nlohmann::json;

AskTellState make_state(const ExperimentConfig& cfg, int rep) {
    cfg.validate();
    if (rep < 0) throw ConfigError("rep must be >= 0");
    AskTellState s;
    s.config = cfg;
    s.rep = rep;
    s.data = Dataset(cfg.resolved_domain());
    return s;
}

std::vector<Point> suggest(AskTellState& state) {
    if (state.pending) return *state.pending;
    const Seed rs = repetition_seed(state.config.root_seed, state.rep);
    std::vector<Point> pts;
    if (!state.initialized) {
        pts = initial_points(state.data.domain(), state.config.n_init, rs);
    } else {
        pts = propose(state.data, batch_config_for(state.config, rs), state.next_iteration()).points;
    }
    state.pending = pts;
    return pts;
}

void update(AskTellState& state, const std::vector<Evaluation>& results, double tol) {
    if (!state.pending) throw StateMismatchError("update without a pending batch; call suggest first");
    const auto& pending = *state.pending;
    if (results.size() != pending.size()) {
        throw StateMismatchError("expected " + std::to_string(pending.size()) + " results for the pending batch, got " +
                                 std::to_string(results.size()));
    }
    const Eigen::VectorXd width = state.data.domain().width();
    std::vector<int> match(pending.size(), -1);
    std::vector<bool> used(results.size(), false);
    for (std::size_t i = 0; i < pending.size(); ++i) {
        for (std::size_t r = 0; r < results.size(); ++r) {
            if (used[r] || results[r].x.size() != pending[i].size()) continue;
            const double dev = ((results[r].x - pending[i]).cwiseAbs().array() / width.array()).maxCoeff();
            if (dev <= tol) {
                match[i] = static_cast<int>(r);
                used[r] = true;
                break;
            }
        }
        if (match[i] < 0) {
            throw StateMismatchError("pending point " + std::to_string(i) + " has no matching result");
        }
        if (!std::isfinite(results[static_cast<std::size_t>(match[i])].y)) {
            throw StateMismatchError("result for pending point " + std::to_string(i) + " is not finite");
        }
    }

    // Build the new dataset first so a failure leaves the state as it was.
    Dataset data = state.data;
    HistoryEntry entry;
    entry.iter = state.next_iteration();
    for (std::size_t i = 0; i < pending.size(); ++i) {
        const double y = results[static_cast<std::size_t>(match[i])].y;
        data.add(pending[i], y);
        entry.points.push_back(pending[i]);
        entry.values.push_back(y);
    }
    state.data = std::move(data);
    state.history.push_back(std::move(entry));
    if (state.initialized) {
        ++state.iteration;
    } else {
        state.initialized = true;
    }
    state.pending.reset();
}

namespace {

json point_json(const Point& x) {
    return json(std::vector<double>(x.data(), x.data() + x.size()));
}

json points_json(const std::vector<Point>& pts) {
    json a = json::array();
    for (const auto& p : pts) a.push_back(point_json(p));
    return a;
}

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
    throw ParseError("state field '" + path + "': " + msg);
}

const json& member(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) bad(path + key, "missing");
    return obj.at(key);
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) bad(path, "expected a number, got " + j.dump());
    return j.get<double>();
}

int integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) bad(path, "expected an integer, got " + j.dump());
    return j.get<int>();
}

Point parse_point(const json& j, Eigen::Index dim, const std::string& path) {
    if (!j.is_array()) bad(path, "expected an array of numbers");
    if (static_cast<Eigen::Index>(j.size()) != dim) {
        bad(path, "expected " + std::to_string(dim) + " coordinates, got " + std::to_string(j.size()));
    }
    Point x(dim);
    for (std::size_t k = 0; k < j.size(); ++k) {
        x[static_cast<Eigen::Index>(k)] = number(j[k], path + "[" + std::to_string(k) + "]");
    }
    return x;
}

std::vector<Point> parse_points(const json& j, Eigen::Index dim, const std::string& path) {
    if (!j.is_array()) bad(path, "expected an array of points");
    std::vector<Point> pts;
    for (std::size_t i = 0; i < j.size(); ++i) pts.push_back(parse_point(j[i], dim, path + "[" + std::to_string(i) + "]"));
    return pts;
}

std::vector<double> parse_values(const json& j, const std::string& path) {
    if (!j.is_array()) bad(path, "expected an array of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

}  // namespace

json state_to_json(const AskTellState& state) {
    json data = {{"inputs", json::array()}, {"outputs", json::array()}};
    for (Eigen::Index i = 0; i < state.data.size(); ++i) {
        data["inputs"].push_back(point_json(state.data.input(i)));
        data["outputs"].push_back(state.data.outputs()[i]);
    }
    json hist = json::array();
    for (const auto& h : state.history) {
        hist.push_back({{"iter", h.iter}, {"points", points_json(h.points)}, {"values", h.values}});
    }
    return {{"config", config_to_json(state.config)},
            {"rep", state.rep},
            {"initialized", state.initialized},
            {"iteration", state.iteration},
            {"dataset", data},
            {"pending", state.pending ? points_json(*state.pending) : json(nullptr)},
            {"history", hist}};
}

AskTellState state_from_json(const json& j) {
    if (!j.is_object()) bad("", "expected a JSON object");
    ExperimentConfig cfg;
    try {
        cfg = config_from_json(member(j, "config", ""));
    } catch (const ConfigError& e) {
        bad("config", e.what());
    }
    AskTellState s = make_state(cfg, j.contains("rep") ? integer(j.at("rep"), "rep") : 0);
    if (!j.contains("initialized") && !j.contains("dataset")) return s;

    const Eigen::Index dim = s.data.dim();
    if (!member(j, "initialized", "").is_boolean()) bad("initialized", "expected a boolean");
    s.initialized = j.at("initialized").get<bool>();
    s.iteration = integer(member(j, "iteration", ""), "iteration");
    if (s.iteration < 0 || (!s.initialized && s.iteration != 0)) bad("iteration", "inconsistent with 'initialized'");

    const json& data = member(j, "dataset", "");
    const auto inputs = parse_points(member(data, "inputs", "dataset."), dim, "dataset.inputs");
    const auto outputs = parse_values(member(data, "outputs", "dataset."), "dataset.outputs");
    if (inputs.size() != outputs.size()) bad("dataset", "inputs and outputs differ in length");
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        try {
            s.data.add(inputs[i], outputs[i]);
        } catch (const DomainError& e) {
            bad("dataset.inputs[" + std::to_string(i) + "]", e.what());
        }
    }

    const json& pend = member(j, "pending", "");
    if (!pend.is_null()) s.pending = parse_points(pend, dim, "pending");

    if (j.contains("history")) {
        const json& hist = j.at("history");
        if (!hist.is_array()) bad("history", "expected an array");
        for (std::size_t i = 0; i < hist.size(); ++i) {
            const std::string p = "history[" + std::to_string(i) + "].";
            HistoryEntry h;
            h.iter = integer(member(hist[i], "iter", p), p + "iter");
            h.points = parse_points(member(hist[i], "points", p), dim, p + "points");
            h.values = parse_values(member(hist[i], "values", p), p + "values");
            s.history.push_back(std::move(h));
        }
    }
    return s;
}

AskTellState load_state(const std::filesystem::path& path) {
    return state_from_json(read_json_file(path));
}

void save_state(const AskTellState& state, const std::filesystem::path& path) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out << state_to_json(state).dump(1) << '\n';
        if (!out) throw Error("write to '" + tmp.string() + "' failed");
    }
    std::filesystem::rename(tmp, path);
}

std::vector<Evaluation> results_from_json(const json& j) {
    const json& arr = j.is_object() && j.contains("results") ? j.at("results") : j;
    if (!arr.is_array()) throw ParseError("results: expected an array of {\"x\": [...], \"y\": v}");
    std::vector<Evaluation> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string p = "results[" + std::to_string(i) + "]";
        const json& e = arr[i];
        if (!e.is_object() || !e.contains("x") || !e.contains("y")) throw ParseError(p + ": expected {\"x\": [...], \"y\": v}");
        if (!e.at("x").is_array()) throw ParseError(p + ".x: expected an array of numbers");
        Evaluation ev;
        ev.x.resize(static_cast<Eigen::Index>(e.at("x").size()));
        for (std::size_t k = 0; k < e.at("x").size(); ++k) {
            if (!e.at("x")[k].is_number()) throw ParseError(p + ".x[" + std::to_string(k) + "]: expected a number");
            ev.x[static_cast<Eigen::Index>(k)] = e.at("x")[k].get<double>();
        }
        if (!e.at("y").is_number()) throw ParseError(p + ".y: expected a number");
        ev.y = e.at("y").get<double>();
        out.push_back(std::move(ev));
    }
    return out;
}

std::vector<Evaluation> load_results(const std::filesystem::path& path) {
    return results_from_json(read_json_file(path));
}

}  // namespace ats
