#include "ibrisk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ibrisk/errors.hpp"

namespace ibrisk {

void ScalarAccumulator::add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
}

MeanCI ScalarAccumulator::stats() const {
    MeanCI out;
    out.n = n_;
    out.mean = mean_;
    if (n_ < 2) {
        out.lo = out.hi = mean_;
        return out;
    }
    const double variance = m2_ / static_cast<double>(n_ - 1);
    const double stderr_ = std::sqrt(std::max(variance, 0.0) / static_cast<double>(n_));
    out.lo = mean_ - 1.96 * stderr_;
    out.hi = mean_ + 1.96 * stderr_;
    return out;
}

CurveAccumulator::CurveAccumulator(int grid_points) : cells_(grid_points) {}

void CurveAccumulator::add(std::span<const double> series) {
    if (series.empty()) throw validation_error("empty trajectory series");
    for (std::size_t t = 0; t < cells_.size(); ++t) {
        const double v = t < series.size() ? series[t] : series.back();
        cells_[t].add(v);
    }
}

std::vector<MeanCI> CurveAccumulator::stats() const {
    std::vector<MeanCI> out;
    out.reserve(cells_.size());
    for (const auto& c : cells_) out.push_back(c.stats());
    return out;
}

MuAccumulator::MuAccumulator(int grid_points, int bins) : bins_(bins), cells_(grid_points) {
    for (auto& c : cells_) {
        c.hist_count.assign(bins_, 0);
        c.hist_sum.assign(bins_, 0.0);
    }
}

void MuAccumulator::add_value(Cell& cell, double v) {
    if (cell.count == 0) {
        cell.min = cell.max = v;
    } else {
        cell.min = std::min(cell.min, v);
        cell.max = std::max(cell.max, v);
    }
    ++cell.count;
    const double y = v - cell.comp;
    const double t = cell.sum + y;
    cell.comp = (t - cell.sum) - y;
    cell.sum = t;
    int bin = static_cast<int>(v * bins_);
    bin = std::clamp(bin, 0, bins_ - 1);
    ++cell.hist_count[bin];
    cell.hist_sum[bin] += v;
}

void MuAccumulator::add(const Trajectory& traj) {
    if (traj.mu_log.empty()) {
        throw validation_error("trajectory carries no bankruptcy-rate log");
    }
    for (std::size_t t = 0; t < cells_.size(); ++t) {
        const auto& values = t < traj.mu_log.size() ? traj.mu_log[t] : traj.mu_log.back();
        for (double v : values) add_value(cells_[t], v);
    }
}

std::vector<MuStepSummary> MuAccumulator::summary() const {
    std::vector<MuStepSummary> out;
    out.reserve(cells_.size());
    for (const auto& c : cells_) {
        MuStepSummary s;
        s.samples = c.count;
        if (c.count == 0) {
            out.push_back(s);
            continue;
        }
        s.mean = c.sum / static_cast<double>(c.count);
        s.min = c.min;
        s.max = c.max;
        auto quantile = [&](double q) {
            const auto rank = static_cast<std::uint64_t>(
                std::ceil(q * static_cast<double>(c.count)));
            std::uint64_t cum = 0;
            for (int b = 0; b < bins_; ++b) {
                cum += c.hist_count[b];
                if (cum >= rank && c.hist_count[b] > 0) {
                    return c.hist_sum[b] / static_cast<double>(c.hist_count[b]);
                }
            }
            return c.max;
        };
        s.q25 = quantile(0.25);
        s.median = quantile(0.50);
        s.q75 = quantile(0.75);
        out.push_back(s);
    }
    return out;
}

PrevalenceResult prevalence(std::span<const Trajectory> trajectories, int max_steps,
                            Weighting weighting) {
    if (trajectories.empty()) throw validation_error("prevalence of an empty run set");
    const int grid = max_steps + 1;
    CurveAccumulator s(grid), i1(grid), i2(grid);
    for (const auto& traj : trajectories) {
        if (weighting == Weighting::Count) {
            s.add(traj.s);
            i1.add(traj.i1);
            i2.add(traj.i2);
        } else {
            s.add(traj.s_w);
            i1.add(traj.i1_w);
            i2.add(traj.i2_w);
        }
    }
    return PrevalenceResult{s.stats(), i1.stats(), i2.stats()};
}

RatioResult bankruptcy_ratio(std::span<const Trajectory> trajectories, Weighting weighting) {
    if (trajectories.empty()) throw validation_error("bankruptcy ratio of an empty run set");
    ScalarAccumulator acc;
    RatioResult out;
    for (const auto& traj : trajectories) {
        const auto& series = weighting == Weighting::Count ? traj.i2 : traj.i2_w;
        acc.add(series.back());
        if (traj.censored) ++out.censored_runs;
        ++out.runs;
    }
    out.ratio = acc.stats();
    return out;
}

std::map<std::string, MeanCI> country_decomposition(
    std::span<const Trajectory> trajectories, std::span<const NodeMeta> nodes,
    std::span<const double> asset_weight, Weighting weighting) {
    std::map<std::string, ScalarAccumulator> acc;
    int n_real = 0;
    for (const auto& node : nodes) {
        if (!node.is_ground) {
            ++n_real;
            acc[node.country]; // make sure zero-default countries show up
        }
    }
    for (const auto& traj : trajectories) {
        std::map<std::string, double> share;
        for (auto& [country, unused] : acc) share[country] = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i].is_ground) continue;
            if (traj.final_state[i] != Compartment::Bankrupted) continue;
            share[nodes[i].country] += weighting == Weighting::Count
                                           ? 1.0 / static_cast<double>(n_real)
                                           : asset_weight[i];
        }
        for (auto& [country, a] : acc) a.add(share[country]);
    }
    std::map<std::string, MeanCI> out;
    for (auto& [country, a] : acc) out[country] = a.stats();
    return out;
}

std::vector<MuStepSummary> mu_dynamics(std::span<const Trajectory> trajectories,
                                       int max_steps) {
    MuAccumulator acc(max_steps + 1);
    for (const auto& traj : trajectories) acc.add(traj);
    return acc.summary();
}

std::optional<int> critical_time(const Trajectory& traj, double beta_star, double phi) {
    const double theta_max = 1.0 + beta_star;
    for (std::size_t t = 0; t < traj.theta.size(); ++t) {
        if (theta_nonlinear(traj.theta[t], phi, theta_max) <= 1.0) {
            return static_cast<int>(t);
        }
    }
    return std::nullopt;
}

namespace {

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

} // namespace

double rank_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw validation_error("rank correlation needs two equal series of length >= 2");
    }
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (va == 0.0 || vb == 0.0) {
        throw validation_error("rank correlation undefined for a constant series");
    }
    return cov / std::sqrt(va * vb);
}

} // namespace ibrisk
