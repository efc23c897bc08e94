#pragma once

#include "ats/config.hpp"
#include "ats/gp.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

namespace ats {

struct Evaluation {
    Point x;
    double y = 0.0;
};

struct HistoryEntry {
    int iter = 0;  // 0 is the initial design
    std::vector<Point> points;
    std::vector<double> values;
};

/// Everything an external driver needs between suggest and update. The seed
/// state is (config.root_seed, rep, iteration): suggestions are a pure
/// function of it and the dataset.
struct AskTellState {
    ExperimentConfig config;
    int rep = 0;
    Dataset data;
    int iteration = 0;  // batches already evaluated, not counting the initial design
    bool initialized = false;  // initial design evaluated
    std::optional<std::vector<Point>> pending;
    std::vector<HistoryEntry> history;

    /// Iteration index the next (or pending) batch belongs to; 0 for the
    /// initial design.
    int next_iteration() const { return initialized ? iteration + 1 : 0; }
};

AskTellState make_state(const ExperimentConfig& cfg, int rep = 0);

/// Returns the pending batch, computing and recording it if there is none.
/// Calling it again before update returns the same points.
std::vector<Point> suggest(AskTellState& state);

/// Appends the results of the pending batch in pending order. Results may
/// arrive in any order; each must match a distinct pending point to within
/// tol times the domain width. Throws StateMismatchError and leaves the state
/// untouched otherwise.
void update(AskTellState& state, const std::vector<Evaluation>& results, double tol = 1e-9);

nlohmann::json state_to_json(const AskTellState& state);
/// Throws ParseError naming the offending field path. A document holding
/// only "config" is a fresh state.
AskTellState state_from_json(const nlohmann::json& j);

AskTellState load_state(const std::filesystem::path& path);
/// Writes to a sibling temp file and renames it over path.
void save_state(const AskTellState& state, const std::filesystem::path& path);

/// Accepts [{"x": [...], "y": v}, ...] or {"results": [...]}.
std::vector<Evaluation> results_from_json(const nlohmann::json& j);
std::vector<Evaluation> load_results(const std::filesystem::path& path);

}  // namespace ats
