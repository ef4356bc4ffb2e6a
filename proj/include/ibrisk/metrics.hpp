#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ibrisk/contagion.hpp"

namespace ibrisk {

enum class Weighting { Count, Assets };

struct MeanCI {
    double mean = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    long n = 0;
};

// Welford accumulator fed in a fixed order so results are reproducible; the
// band is the normal-approximation 95% interval mean +/- 1.96 stderr.
class ScalarAccumulator {
  public:
    void add(double x);
    MeanCI stats() const;
    long count() const { return n_; }

  private:
    long n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Pointwise statistics over trajectories laid on a shared step grid; series
// shorter than the grid are extended by their absorbing value.
class CurveAccumulator {
  public:
    explicit CurveAccumulator(int grid_points);
    void add(std::span<const double> series);
    std::vector<MeanCI> stats() const;

  private:
    std::vector<ScalarAccumulator> cells_;
};

// Per-step distribution of the bankruptcy-rate field over (bank, run)
// samples: exact mean/min/max plus histogram quartiles (values live in
// [0, 1]; a quartile reports the mean of its bin, 4096 bins).
struct MuStepSummary {
    double mean = 0.0;
    double min = 0.0;
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
    double max = 0.0;
    std::uint64_t samples = 0;
};

class MuAccumulator {
  public:
    MuAccumulator(int grid_points, int bins = 4096);
    void add(const Trajectory& traj);
    std::vector<MuStepSummary> summary() const;

  private:
    struct Cell {
        std::uint64_t count = 0;
        double sum = 0.0, comp = 0.0; // Kahan
        double min = 0.0, max = 0.0;
        std::vector<std::uint64_t> hist_count;
        std::vector<double> hist_sum;
    };
    void add_value(Cell& cell, double v);
    int bins_;
    std::vector<Cell> cells_;
};

struct PrevalenceResult {
    std::vector<MeanCI> s, i1, i2; // one entry per grid point
};

PrevalenceResult prevalence(std::span<const Trajectory> trajectories, int max_steps,
                            Weighting weighting);

struct RatioResult {
    MeanCI ratio;
    long censored_runs = 0; // hit the step cap with distressed banks left
    long runs = 0;
};

// Fraction (or asset share) of bankrupted banks at the end of each run.
RatioResult bankruptcy_ratio(std::span<const Trajectory> trajectories, Weighting weighting);

// Per-country contribution to the bankruptcy ratio; contributions sum to the
// total ratio. Countries are keyed by code; the ground node is skipped.
std::map<std::string, MeanCI> country_decomposition(
    std::span<const Trajectory> trajectories, std::span<const NodeMeta> nodes,
    std::span<const double> asset_weight, Weighting weighting);

std::vector<MuStepSummary> mu_dynamics(std::span<const Trajectory> trajectories,
                                       int max_steps);

// First step whose non-linear systemic multiplier is at or below 1, i.e. the
// switch from deceleration to acceleration; nullopt when the trajectory never
// gets there within its recorded horizon.
std::optional<int> critical_time(const Trajectory& traj, double beta_star, double phi);

// Spearman rank correlation with average ranks on ties.
double rank_correlation(std::span<const double> a, std::span<const double> b);

} // namespace ibrisk
