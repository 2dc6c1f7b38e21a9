#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sepdiff/diffusion_model.hpp"
#include "sepdiff/errors.hpp"

namespace sepdiff {

enum class Refinement { UniformX, UniformScale };
enum class EndMode { Absorb, Reflect };

std::string to_string(Refinement r);
std::string to_string(EndMode m);

// Finite grid ends replacing boundaries the chain cannot carry.
struct Truncation {
    std::optional<double> lo;
    std::optional<double> hi;
};

struct GridChain {
    DiffusionSpec spec;
    std::vector<double> grid;
    std::vector<double> scale;      // s at the nodes
    std::vector<double> ds;         // s(grid[i + 1]) - s(grid[i])
    std::vector<double> p_up;       // 1 at a reflecting lower end, 0 at a reflecting upper end
    std::vector<double> mean_hold;  // 0 at absorbing ends
    std::vector<double> atom_hold;  // part of mean_hold spent in the atom at the node
    EndMode lower = EndMode::Absorb;
    EndMode upper = EndMode::Absorb;
    bool truncated_lower = false;
    bool truncated_upper = false;
    std::vector<std::string> notes;

    std::size_t size() const { return grid.size(); }
    std::size_t last() const { return grid.size() - 1; }
    bool absorbing(std::size_t i) const {
        return (i == 0 && lower == EndMode::Absorb) || (i == last() && upper == EndMode::Absorb);
    }
    // Index of the node closest to x.
    std::size_t nearest(double x) const;
};

// Throws UnboundedDomainWithoutTruncation when an end is infinite or
// inaccessible and no truncation level is given for it.
GridChain build_chain(const DiffusionSpec& spec, int n_cells, Refinement refinement = Refinement::UniformX,
                      const Truncation& truncation = {});

// Adds delta to every interior p_up, clamped inside (0, 1).
GridChain with_p_up_bias(GridChain chain, double delta);

// Expected time for the chain started at node x to reach node a or node b.
double chain_exit_time(const GridChain& chain, std::size_t a, std::size_t x, std::size_t b);
// Probability that the embedded chain started at x reaches b before a.
double chain_hitting_probability(const GridChain& chain, std::size_t a, std::size_t x, std::size_t b);

// Integral of kernel(y) g(y) m(dy) over the part of the cell of node i inside
// [lo, hi], where kernel is the cell's Green kernel seen from the node. With
// g = 1 over the whole cell this is mean_hold[i].
double cell_integral(const GridChain& chain, std::size_t i, const std::function<double(double)>& g,
                     double lo = -INFINITY, double hi = INFINITY);

struct StopRule {
    std::optional<double> horizon;
    std::vector<std::size_t> targets;
};

enum class Termination { Horizon, Absorbed, TargetHit };
std::string to_string(Termination t);

struct PathEvent {
    double state;
    double holding;
};

struct PathSample {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::vector<PathEvent> events;
    double final_state = NAN;
    Termination termination = Termination::Horizon;
};

// Stream selects an independent generator for the same seed; path k of an
// estimate uses stream k.
PathSample sample_path(const GridChain& chain, std::size_t start, const StopRule& stop, std::uint64_t seed,
                       std::uint64_t stream = 0);

// Indicator of reaching node target before node floor.
struct HitBefore {
    std::size_t target;
    std::size_t floor;
};

// Time to reach node a or node b.
struct ExitTime {
    std::size_t a;
    std::size_t b;
};

// Time spent in [lo, hi] until the stop rule fires; divided by the horizon
// when fraction is set. Cell visits are credited with their conditional
// share of time in the set.
struct Occupation {
    double lo;
    double hi;
    StopRule stop;
    bool fraction = false;
};

// Long-run time average of f, estimated from whole excursions away from the
// start node, continued until the elapsed time reaches the horizon.
struct ErgodicAverage {
    std::function<double(double)> f;
    double horizon = 1.0;
    std::string label = "f";
};

using Statistic = std::variant<HitBefore, ExitTime, Occupation, ErgodicAverage>;

struct MonteCarloEstimate {
    double value = NAN;
    double std_error = NAN;
    std::size_t n_paths = 0;
    std::string target;
    bool truncated = false;
    double truncation_leakage = 0.0;  // bound on the chance of reaching a truncation level first
};

// Worker count: hardware concurrency capped by SEPDIFF_THREADS and requested (0 = no cap).
unsigned worker_count(unsigned requested = 0);

MonteCarloEstimate estimate(const GridChain& chain, std::size_t start, const Statistic& statistic, std::size_t n_paths,
                            std::uint64_t seed, unsigned threads = 0);

// Paths run to the horizon or absorption: absorption probability and mean
// terminal state, path k using stream k as in sample_path.
struct HorizonSummary {
    MonteCarloEstimate absorbed;
    MonteCarloEstimate terminal_state;
};

HorizonSummary simulate_horizon(const GridChain& chain, std::size_t start, double horizon, std::size_t n_paths,
                                std::uint64_t seed, unsigned threads = 0);

struct ValidationConfig {
    int n_cells = 200;
    std::size_t n_paths = 100000;
    std::uint64_t seed = 7;
    Refinement refinement = Refinement::UniformX;
    Truncation window;
    std::optional<double> x0;
    double p_up_bias = 0.0;
    double ergodic_horizon = 1.0;
    double z_max = 4.0;
    unsigned threads = 0;
};

struct ValidationCheck {
    std::string name;
    std::string target;
    double estimate;
    double std_error;
    double oracle;
    double z;
    bool pass;
};

struct ValidationReport {
    double lo;
    double hi;
    double x0;
    std::size_t nodes;
    EndMode lower;
    EndMode upper;
    std::vector<ValidationCheck> checks;
    std::vector<std::string> notes;
    bool pass = true;
    GridChain chain;  // first-passage paths start at x0 and stop at either end
};

ValidationReport validate_against_analytic(const DiffusionSpec& spec, const ValidationConfig& config = {});

}  // namespace sepdiff
