#pragma once

#include "ats/acquisition.hpp"
#include "ats/common.hpp"
#include "ats/gp.hpp"
#include "ats/hyperposterior.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ats {

enum class Strategy { Sequential, ATS, JATS, HATS, BLCB, PTS, ATSonBLCB, ATSonPTS };

std::string to_string(Strategy s);
std::string to_string(AcquisitionKind k);
Strategy parse_strategy(const std::string& name);      // throws ConfigError
AcquisitionKind parse_acquisition(const std::string& name);  // EI or LCB only

struct BatchConfig {
    int batch_size = 1;
    int s = 10;
    AcquisitionKind acquisition = AcquisitionKind::EI;
    Strategy strategy = Strategy::ATS;
    double enhance_p = 0.5;  // coin probability for the ATSon* wrappers
    double jitter_p = 0.5;   // probability of an explorative jitter in j-ATS
    Seed root_seed = 0;
    McmcConfig mcmc;
    PriorSpec prior;
    SearchOptions search;
    int n_features = kDefaultFeatureCount;
    int n_threads = 1;  // worker threads for the independent-point strategies

    void validate() const;  // throws ConfigError
};

/// How one batch point was produced. Values are in normalized units.
struct PointProvenance {
    int index = 0;
    Seed seed = 0;
    int theta_set = 0;  // index of the batch point whose seed drew the theta set
    std::vector<HyperParams> thetas;
    double jitter = 0.0;
    bool jitter_explorative = false;
    std::optional<bool> coin;
    std::optional<double> hallucination;
    double acquisition_value = 0.0;
};

struct BatchProposal {
    std::vector<Point> points;       // original coordinates
    std::vector<Point> unit_points;  // normalized coordinates
    std::vector<PointProvenance> provenance;

    std::size_t size() const { return points.size(); }
};

/// D_t plus the hallucinated pending evaluations of the current batch.
class HallucinatedDataset {
  public:
    explicit HallucinatedDataset(Dataset base) : combined_(std::move(base)) {}

    void append(const Point& x, double h);

    const Dataset& combined() const { return combined_; }
    const std::vector<std::pair<Point, double>>& pending() const { return pending_; }

  private:
    Dataset combined_;
    std::vector<std::pair<Point, double>> pending_;
};

/// Coin of the ATS enhancement for one batch point: true means redraw.
bool enhance_coin(double p, Seed pseed);

/// hash(root_seed, iteration, point index).
Seed point_seed(Seed root, int iteration, int index);

/// s draws from p(theta | data) using the MCMC stream of a point seed.
std::vector<HyperParams> draw_thetas(const Dataset& normalized, const BatchConfig& cfg, Seed pseed);

/// One ATS point from an explicit point seed. With explicit jitter the
/// j-ATS draw is skipped.
std::pair<Point, PointProvenance> ats_point(const Dataset& normalized, const BatchConfig& cfg, Seed pseed,
                                            bool sample_jitter_draw);

// All strategies take the raw dataset (t >= 1) and normalize it internally.
// The input dataset is never modified.

BatchProposal sequential_step(const Dataset& raw, const BatchConfig& cfg, int iteration);
BatchProposal ats_batch(const Dataset& raw, const BatchConfig& cfg, int iteration);
BatchProposal jats_batch(const Dataset& raw, const BatchConfig& cfg, int iteration);
BatchProposal hats_batch(const Dataset& raw, const BatchConfig& cfg, int iteration);
BatchProposal blcb_batch(const Dataset& raw, const BatchConfig& cfg, int iteration);
BatchProposal pts_batch(const Dataset& raw, const BatchConfig& cfg, int iteration);
BatchProposal ats_enhance(Strategy base, const Dataset& raw, const BatchConfig& cfg, int iteration);

/// Dispatch on cfg.strategy.
BatchProposal propose(const Dataset& raw, const BatchConfig& cfg, int iteration);

}  // namespace ats
