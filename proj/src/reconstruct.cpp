#include "ibrisk/reconstruct.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ibrisk/errors.hpp"

namespace ibrisk {

double ReconstructedNetwork::out_strength(int i) const {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += w(i, j);
    return s;
}

double ReconstructedNetwork::in_strength(int j) const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += w(i, j);
    return s;
}

std::vector<BankRecord> add_ground_bank(std::span<const BankRecord> banks) {
    std::vector<BankRecord> out(banks.begin(), banks.end());
    if (banks.empty()) return out;
    const int year = banks.front().year;
    double sum_a = 0.0, sum_l = 0.0;
    for (const auto& b : banks) {
        if (b.year != year) {
            throw validation_error("add_ground_bank expects records of a single year");
        }
        sum_a += b.interbank_assets;
        sum_l += b.interbank_liabilities;
    }
    if (sum_a == sum_l) return out; // balanced books, nothing to absorb

    BankRecord ground;
    ground.bank_id = kGroundBankId;
    ground.country = kGroundCountry;
    ground.year = year;
    ground.is_ground = true;
    ground.liquid_funding = 1.0;
    if (sum_l > sum_a) {
        ground.interbank_assets = sum_l - sum_a; // external lender
        ground.interbank_liabilities = 0.0;
    } else {
        ground.interbank_assets = 0.0; // external borrower
        ground.interbank_liabilities = sum_a - sum_l;
    }
    ground.total_assets = std::max(ground.interbank_assets, ground.interbank_liabilities);
    out.push_back(std::move(ground));
    return out;
}

namespace {

// Exposure matrix over block buckets, extended with a synthetic row/column
// for the ground node. The ground row follows the borrower-side column
// shares (and vice versa), scaled by the ground share of aggregate strength
// so block totals of a_split and l_split stay aligned.
struct BucketExposures {
    std::vector<std::string> buckets;
    std::vector<double> exp; // B x B
    std::size_t b() const { return buckets.size(); }
    double at(std::size_t u, std::size_t v) const { return exp[u * b() + v]; }
    double& at(std::size_t u, std::size_t v) { return exp[u * b() + v]; }
};

BucketExposures bucket_exposures(std::span<const BankRecord> banks,
                                 const BisExposureMatrix& bis, bool use_blocks,
                                 bool has_ground) {
    BucketExposures be;
    if (!use_blocks) {
        be.buckets = {"*"};
        be.exp = {1.0};
        return be;
    }
    be.buckets = bis.countries;
    const std::size_t c = bis.countries.size();
    const std::size_t b = c + (has_ground ? 1 : 0);
    if (has_ground) be.buckets.push_back(kGroundCountry);
    be.exp.assign(b * b, 0.0);
    for (std::size_t u = 0; u < c; ++u) {
        for (std::size_t v = 0; v < c; ++v) be.at(u, v) = bis.at(u, v);
    }
    if (has_ground) {
        double ground_a = 0.0, ground_l = 0.0, real_a = 0.0, real_l = 0.0;
        for (const auto& bank : banks) {
            if (bank.is_ground) {
                ground_a = bank.interbank_assets;
                ground_l = bank.interbank_liabilities;
            } else {
                real_a += bank.interbank_assets;
                real_l += bank.interbank_liabilities;
            }
        }
        const std::size_t g = c;
        if (ground_a > 0.0 && real_a > 0.0) {
            const double scale = ground_a / real_a;
            for (std::size_t v = 0; v < c; ++v) be.at(g, v) = scale * bis.col_sum(v);
        }
        if (ground_l > 0.0 && real_l > 0.0) {
            const double scale = ground_l / real_l;
            for (std::size_t u = 0; u < c; ++u) be.at(u, g) = scale * bis.row_sum(u);
        }
    }
    return be;
}

} // namespace

BlockFitnesses block_fitnesses(std::span<const BankRecord> banks,
                               const BisExposureMatrix& bis, bool use_blocks) {
    bool has_ground = false;
    for (const auto& b : banks) has_ground = has_ground || b.is_ground;
    const auto be = bucket_exposures(banks, bis, use_blocks, has_ground);
    const std::size_t nb = be.b();

    BlockFitnesses fit;
    fit.buckets = be.buckets;
    fit.nodes.reserve(banks.size());
    fit.node_bucket.reserve(banks.size());
    for (const auto& bank : banks) {
        fit.nodes.push_back({bank.bank_id, bank.country, bank.is_ground});
        if (!use_blocks) {
            fit.node_bucket.push_back(0);
            continue;
        }
        const std::string& code = bank.is_ground ? std::string(kGroundCountry) : bank.country;
        auto it = std::find(be.buckets.begin(), be.buckets.end(), code);
        if (it == be.buckets.end()) {
            throw validation_error("bank " + bank.bank_id + ": country " + bank.country +
                                   " not present in the BIS matrix");
        }
        fit.node_bucket.push_back(static_cast<int>(it - be.buckets.begin()));
    }

    std::vector<double> row_sum(nb, 0.0), col_sum(nb, 0.0);
    for (std::size_t u = 0; u < nb; ++u) {
        for (std::size_t v = 0; v < nb; ++v) {
            row_sum[u] += be.at(u, v);
            col_sum[v] += be.at(u, v);
        }
    }

    const std::size_t n = banks.size();
    fit.a_split.assign(n * nb, 0.0);
    fit.l_split.assign(n * nb, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& bank = banks[i];
        const std::size_t u = static_cast<std::size_t>(fit.node_bucket[i]);
        if (bank.interbank_assets > 0.0) {
            if (!(row_sum[u] > 0.0)) {
                throw validation_error("BIS row sum for " + be.buckets[u] +
                                       " is zero but its banks hold interbank assets");
            }
            for (std::size_t v = 0; v < nb; ++v) {
                // Multiply by the share so a single-entry row maps to the
                // aggregate exactly.
                fit.a_split[i * nb + v] =
                    bank.interbank_assets * (be.at(u, v) / row_sum[u]);
            }
        }
        if (bank.interbank_liabilities > 0.0) {
            if (!(col_sum[u] > 0.0)) {
                throw validation_error("BIS column sum for " + be.buckets[u] +
                                       " is zero but its banks hold interbank liabilities");
            }
            for (std::size_t v = 0; v < nb; ++v) {
                fit.l_split[i * nb + v] =
                    bank.interbank_liabilities * (be.at(v, u) / col_sum[u]);
            }
        }
    }

    fit.w_norm.assign(nb * nb, 0.0);
    for (std::size_t u = 0; u < nb; ++u) {
        for (std::size_t v = 0; v < nb; ++v) {
            double sum_a = 0.0, sum_l = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (static_cast<std::size_t>(fit.node_bucket[i]) == u)
                    sum_a += fit.a_split[i * nb + v];
                if (static_cast<std::size_t>(fit.node_bucket[i]) == v)
                    sum_l += fit.l_split[i * nb + u];
            }
            fit.w_norm[u * nb + v] = std::sqrt(sum_a * sum_l);
        }
    }
    return fit;
}

double link_probability(double a_fitness, double l_fitness, double z) {
    const double q = z * a_fitness * l_fitness;
    return q / (1.0 + q);
}

namespace {

struct PairSet {
    std::vector<double> products; // positive products only
    std::size_t admissible = 0;   // all ordered pairs counted toward density
};

double pair_density(const PairSet& pairs, double z) {
    double sum = 0.0;
    for (double p : pairs.products) {
        const double q = z * p;
        sum += q / (1.0 + q);
    }
    return sum / static_cast<double>(pairs.admissible);
}

double bisect_z(const PairSet& pairs, double target, const std::string& what) {
    if (pairs.admissible == 0) {
        throw infeasible_error(what + ": no admissible pairs");
    }
    const double max_density =
        static_cast<double>(pairs.products.size()) / static_cast<double>(pairs.admissible);
    if (!(target < max_density)) {
        std::ostringstream msg;
        msg << what << ": target density " << target << " is not attainable; the "
            << "positive-fitness support admits densities in [0, " << max_density << ")";
        throw infeasible_error(msg.str());
    }

    double lo = 0.0, hi = 1.0;
    while (pair_density(pairs, hi) < target) {
        hi *= 2.0;
        if (hi > 1e300) {
            throw infeasible_error(what + ": density target could not be bracketed");
        }
    }
    double z = hi;
    for (int iter = 0; iter < 2000; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double d = pair_density(pairs, mid);
        z = mid;
        if (std::abs(d - target) <= 1e-12) break;
        if (d < target) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-16 * hi) break;
    }
    return z;
}

bool pair_counts(const BlockFitnesses& fit, int i, int j, bool ground_in_density) {
    if (ground_in_density) return true;
    return !fit.nodes[i].is_ground && !fit.nodes[j].is_ground;
}

} // namespace

ZSolution solve_z(const BlockFitnesses& fit, double target_density, ZMode mode,
                  bool ground_in_density) {
    if (!(target_density > 0.0 && target_density < 1.0)) {
        throw validation_error("target density must lie in (0, 1)");
    }
    const int n = static_cast<int>(fit.nodes.size());
    ZSolution sol;
    sol.mode = mode;
    if (mode == ZMode::Global) {
        PairSet pairs;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j || !pair_counts(fit, i, j, ground_in_density)) continue;
                ++pairs.admissible;
                const double prod = fit.product(i, j);
                if (prod > 0.0) pairs.products.push_back(prod);
            }
        }
        sol.z_global = bisect_z(pairs, target_density, "global z");
        return sol;
    }

    const std::size_t nb = fit.bucket_count();
    std::vector<PairSet> blocks(nb * nb);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            auto& pairs = blocks[fit.node_bucket[i] * nb + fit.node_bucket[j]];
            ++pairs.admissible;
            const double prod = fit.product(i, j);
            if (prod > 0.0) pairs.products.push_back(prod);
        }
    }
    sol.z_block.assign(nb * nb, 0.0);
    for (std::size_t u = 0; u < nb; ++u) {
        for (std::size_t v = 0; v < nb; ++v) {
            auto& pairs = blocks[u * nb + v];
            if (pairs.admissible == 0 || pairs.products.empty()) continue; // block stays empty
            std::ostringstream what;
            what << "block " << fit.buckets[u] << "->" << fit.buckets[v] << " z";
            sol.z_block[u * nb + v] = bisect_z(pairs, target_density, what.str());
        }
    }
    return sol;
}

double expected_density(const BlockFitnesses& fit, const ZSolution& z,
                        bool ground_in_density) {
    const int n = static_cast<int>(fit.nodes.size());
    double sum = 0.0;
    std::size_t count = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j || !pair_counts(fit, i, j, ground_in_density)) continue;
            ++count;
            const double prod = fit.product(i, j);
            if (prod <= 0.0) continue;
            const double q = z.z_for(fit, i, j) * prod;
            sum += q / (1.0 + q);
        }
    }
    if (count == 0) return 0.0;
    return sum / static_cast<double>(count);
}

std::vector<double> probability_matrix(const BlockFitnesses& fit, const ZSolution& z) {
    const int n = static_cast<int>(fit.nodes.size());
    std::vector<double> p(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double prod = fit.product(i, j);
            if (prod <= 0.0) continue;
            p[static_cast<std::size_t>(i) * n + j] =
                link_probability(fit.a_of(i, fit.node_bucket[j]),
                                 fit.l_of(j, fit.node_bucket[i]), z.z_for(fit, i, j));
        }
    }
    return p;
}

std::vector<std::uint8_t> sample_adjacency(std::span<const double> probabilities, int n,
                                           RngStream& rng, int rejection_cap) {
    std::vector<std::uint8_t> a(static_cast<std::size_t>(n) * n, 0);
    for (int attempt = 0; attempt < rejection_cap; ++attempt) {
        std::fill(a.begin(), a.end(), 0);
        std::vector<std::uint8_t> touched(n, 0);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                const double p = probabilities[static_cast<std::size_t>(i) * n + j];
                if (p <= 0.0) continue;
                if (rng.bernoulli(p)) {
                    a[static_cast<std::size_t>(i) * n + j] = 1;
                    touched[i] = 1;
                    touched[j] = 1;
                }
            }
        }
        bool isolated = false;
        for (int i = 0; i < n; ++i) {
            if (!touched[i]) {
                isolated = true;
                break;
            }
        }
        if (!isolated) return a;
    }
    std::ostringstream msg;
    msg << "could not sample a network free of isolated nodes in " << rejection_cap
        << " attempts";
    throw infeasible_error(msg.str());
}

std::vector<double> assign_weights(const BlockFitnesses& fit,
                                   std::span<const double> probabilities,
                                   std::span<const std::uint8_t> adjacency) {
    const int n = static_cast<int>(fit.nodes.size());
    std::vector<double> w(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * n + j;
            if (!adjacency[k]) continue;
            const double p = probabilities[k];
            const double norm = fit.block_norm(i, j);
            assert(p > 0.0 && norm > 0.0 && "sampled link with zero probability");
            w[k] = fit.product(i, j) / (norm * p);
        }
    }
    return w;
}

IpfResult ipf_rebalance(std::vector<double>& weights, int n,
                        std::span<const double> row_targets,
                        std::span<const double> col_targets, double tol, int max_iter) {
    auto at = [&](int i, int j) -> double& {
        return weights[static_cast<std::size_t>(i) * n + j];
    };
    double total = 0.0, total_rows = 0.0, total_cols = 0.0;
    for (int i = 0; i < n; ++i) {
        if (at(i, i) != 0.0) {
            throw validation_error("ipf_rebalance requires a zero diagonal");
        }
        total_rows += row_targets[i];
        total_cols += col_targets[i];
        for (int j = 0; j < n; ++j) total += at(i, j);
    }
    if (!(total > 0.0)) {
        throw validation_error("ipf_rebalance requires positive total weight");
    }
    const double scale = std::max(std::abs(total_rows), std::abs(total_cols));
    if (std::abs(total_rows - total_cols) > 1e-8 * std::max(scale, 1.0)) {
        throw validation_error("ipf_rebalance targets are inconsistent: row and column "
                               "totals differ");
    }
    for (int i = 0; i < n; ++i) {
        bool has_out = false, has_in = false;
        for (int j = 0; j < n; ++j) {
            has_out = has_out || at(i, j) > 0.0;
            has_in = has_in || at(j, i) > 0.0;
        }
        if (row_targets[i] > 0.0 && !has_out) {
            std::ostringstream msg;
            msg << "ipf_rebalance: row " << i << " targets " << row_targets[i]
                << " but has no out-links";
            throw validation_error(msg.str());
        }
        if (row_targets[i] == 0.0 && has_out) {
            std::ostringstream msg;
            msg << "ipf_rebalance: row " << i << " has out-links but a zero target";
            throw validation_error(msg.str());
        }
        if (col_targets[i] > 0.0 && !has_in) {
            std::ostringstream msg;
            msg << "ipf_rebalance: column " << i << " targets " << col_targets[i]
                << " but has no in-links";
            throw validation_error(msg.str());
        }
        if (col_targets[i] == 0.0 && has_in) {
            std::ostringstream msg;
            msg << "ipf_rebalance: column " << i << " has in-links but a zero target";
            throw validation_error(msg.str());
        }
    }

    auto residual = [&]() {
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            double rs = 0.0, cs = 0.0;
            for (int j = 0; j < n; ++j) {
                rs += at(i, j);
                cs += at(j, i);
            }
            const double re =
                row_targets[i] > 0.0 ? std::abs(rs - row_targets[i]) / row_targets[i]
                                     : std::abs(rs);
            const double ce =
                col_targets[i] > 0.0 ? std::abs(cs - col_targets[i]) / col_targets[i]
                                     : std::abs(cs);
            worst = std::max({worst, re, ce});
        }
        return worst;
    };

    IpfResult result;
    result.residual = residual();
    if (result.residual < tol) return result; // already balanced, zero iterations

    double checkpoint = result.residual;
    for (int iter = 1; iter <= max_iter; ++iter) {
        for (int i = 0; i < n; ++i) {
            if (row_targets[i] <= 0.0) continue;
            double rs = 0.0;
            for (int j = 0; j < n; ++j) rs += at(i, j);
            const double f = row_targets[i] / rs;
            for (int j = 0; j < n; ++j) at(i, j) *= f;
        }
        for (int j = 0; j < n; ++j) {
            if (col_targets[j] <= 0.0) continue;
            double cs = 0.0;
            for (int i = 0; i < n; ++i) cs += at(i, j);
            const double f = col_targets[j] / cs;
            for (int i = 0; i < n; ++i) at(i, j) *= f;
        }
        result.iterations = iter;
        result.residual = residual();
        if (result.residual < tol) return result;
        // An infeasible support plateaus at a positive residual; a feasible
        // one keeps shrinking geometrically. Bail once progress stalls.
        if (iter % 200 == 0) {
            if (result.residual > 0.5 * checkpoint) {
                std::ostringstream msg;
                msg << "ipf_rebalance stalled after " << iter
                    << " iterations; residual " << result.residual;
                throw infeasible_error(msg.str());
            }
            checkpoint = result.residual;
        }
    }
    std::ostringstream msg;
    msg << "ipf_rebalance did not converge in " << max_iter
        << " iterations; residual " << result.residual;
    throw infeasible_error(msg.str());
}

double realized_density(std::span<const std::uint8_t> adjacency,
                        std::span<const NodeMeta> nodes, bool ground_in_density) {
    const int n = static_cast<int>(nodes.size());
    std::size_t links = 0, pairs = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (!ground_in_density && (nodes[i].is_ground || nodes[j].is_ground)) continue;
            ++pairs;
            links += adjacency[static_cast<std::size_t>(i) * n + j];
        }
    }
    if (pairs == 0) return 0.0;
    return static_cast<double>(links) / static_cast<double>(pairs);
}

EnsembleBuild generate_ensemble(std::span<const BankRecord> banks,
                                const BisExposureMatrix& bis,
                                const ReconstructionConfig& config) {
    if (config.ensemble_size < 1) {
        throw validation_error("ensemble size must be at least 1");
    }
    const auto augmented = add_ground_bank(banks);
    EnsembleBuild build;
    build.fitnesses = block_fitnesses(augmented, bis, config.use_blocks);
    build.z = solve_z(build.fitnesses, config.target_density, config.z_mode,
                      config.ground_in_density);
    build.expected_density =
        expected_density(build.fitnesses, build.z, config.ground_in_density);

    const auto probabilities = probability_matrix(build.fitnesses, build.z);
    const int n = static_cast<int>(augmented.size());
    std::vector<double> row_targets(n), col_targets(n);
    for (int i = 0; i < n; ++i) {
        row_targets[i] = augmented[i].interbank_assets;
        col_targets[i] = augmented[i].interbank_liabilities;
    }

    // Beyond isolated nodes, a sampled pattern must let IPF meet every
    // positive strength target: each such node needs the matching link and
    // the support must satisfy the usual transportation feasibility. Tiny
    // networks can miss both, so a member redraws its sample until the
    // rebalance converges.
    auto pattern_supports_targets = [&](const std::vector<std::uint8_t>& a) {
        for (int i = 0; i < n; ++i) {
            bool has_out = false, has_in = false;
            for (int j = 0; j < n; ++j) {
                has_out = has_out || a[static_cast<std::size_t>(i) * n + j];
                has_in = has_in || a[static_cast<std::size_t>(j) * n + i];
            }
            if (row_targets[i] > 0.0 && !has_out) return false;
            if (col_targets[i] > 0.0 && !has_in) return false;
        }
        return true;
    };

    build.members.reserve(config.ensemble_size);
    for (int k = 0; k < config.ensemble_size; ++k) {
        const std::uint64_t member_seed =
            derive_seed(config.seed, {static_cast<std::uint64_t>(k)});
        RngStream rng(member_seed);

        ReconstructedNetwork net;
        bool accepted = false;
        for (int attempt = 0; attempt < config.rejection_cap && !accepted; ++attempt) {
            const auto adjacency =
                sample_adjacency(probabilities, n, rng, config.rejection_cap);
            if (!pattern_supports_targets(adjacency)) continue;
            auto weights = assign_weights(build.fitnesses, probabilities, adjacency);
            if (config.ipf) {
                try {
                    ipf_rebalance(weights, n, row_targets, col_targets, config.ipf_tol,
                                  config.ipf_max_iter);
                } catch (const infeasible_error&) {
                    continue; // pattern cannot carry the strengths, redraw
                }
            }
            net.n = n;
            net.weights = std::move(weights);
            net.nodes = build.fitnesses.nodes;
            net.realized_density =
                realized_density(adjacency, net.nodes, config.ground_in_density);
            net.member_index = k;
            net.member_seed = member_seed;
            accepted = true;
        }
        if (!accepted) {
            throw infeasible_error("could not sample a pattern supporting every "
                                   "strength target within the rejection cap");
        }
        build.members.push_back(std::move(net));
    }
    return build;
}

} // namespace ibrisk
