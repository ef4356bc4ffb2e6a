#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ibrisk/ingest.hpp"
#include "ibrisk/rng.hpp"

namespace ibrisk {

struct NodeMeta {
    std::string bank_id;
    std::string country;
    bool is_ground = false;
};

// A lender-to-borrower weight matrix sampled from the fitness ensemble.
// w(i, j) is the volume node i lends to node j; the diagonal is zero.
struct ReconstructedNetwork {
    int n = 0;
    std::vector<double> weights; // row-major n x n
    std::vector<NodeMeta> nodes;
    double realized_density = 0.0;
    int member_index = 0;
    std::uint64_t member_seed = 0;

    double w(int i, int j) const { return weights[static_cast<std::size_t>(i) * n + j]; }
    double& w(int i, int j) { return weights[static_cast<std::size_t>(i) * n + j]; }
    double out_strength(int i) const;
    double in_strength(int j) const;
};

enum class ZMode { Global, PerBlock };

struct ReconstructionConfig {
    double target_density = 0.3;
    int ensemble_size = 100;
    ZMode z_mode = ZMode::Global;
    bool use_blocks = true;        // off: plain fitness model, no country constraints
    bool ipf = true;
    double ipf_tol = 1e-9;
    int ipf_max_iter = 20000;
    std::uint64_t seed = 0;
    bool ground_in_density = true; // count ground pairs in the density normalization
    int rejection_cap = 1000;      // redraws allowed before giving up on isolated nodes
};

// Country-block splits of the aggregate strengths. a_split(i, V) is bank i's
// interbank assets allotted to borrowers of country V; l_split(j, U) is bank
// j's liabilities allotted to lenders of country U. Only the bucket of the
// bank's own country is populated on the opposite axis, so the pair (i, j)
// always lives in exactly one block (country_of(i), country_of(j)).
struct BlockFitnesses {
    std::vector<NodeMeta> nodes;
    std::vector<std::string> buckets; // block country codes ("*" when blocks are off)
    std::vector<int> node_bucket;     // per node index into buckets
    std::vector<double> a_split;      // node-major n x B
    std::vector<double> l_split;      // node-major n x B
    std::vector<double> w_norm;       // B x B block normalizations W^{UV}

    std::size_t bucket_count() const { return buckets.size(); }
    double a_of(int i, std::size_t v) const { return a_split[i * bucket_count() + v]; }
    double l_of(int j, std::size_t u) const { return l_split[j * bucket_count() + u]; }

    // Fitness product A~_i L~_j of the block the ordered pair lives in.
    double product(int i, int j) const {
        return a_of(i, node_bucket[j]) * l_of(j, node_bucket[i]);
    }
    double block_norm(int i, int j) const {
        return w_norm[node_bucket[i] * bucket_count() + node_bucket[j]];
    }
};

struct ZSolution {
    ZMode mode = ZMode::Global;
    double z_global = 0.0;
    std::vector<double> z_block; // B x B, used in PerBlock mode

    double z_for(const BlockFitnesses& fit, int i, int j) const {
        if (mode == ZMode::Global) return z_global;
        return z_block[fit.node_bucket[i] * fit.bucket_count() + fit.node_bucket[j]];
    }
};

struct EnsembleBuild {
    BlockFitnesses fitnesses;
    ZSolution z;
    double expected_density = 0.0;
    std::vector<ReconstructedNetwork> members;
};

// Appends a synthetic node absorbing the aggregate imbalance: a pure lender
// with A = sum(L) - sum(A) when liabilities dominate, a pure borrower on the
// flipped side otherwise. Returns the input unchanged when books balance.
std::vector<BankRecord> add_ground_bank(std::span<const BankRecord> banks);

inline constexpr const char* kGroundBankId = "__GROUND__";
inline constexpr const char* kGroundCountry = "ZZ";

// Splits A_i and L_j across country blocks proportionally to the BIS row and
// column shares. With use_blocks off everything lands in one bucket and the
// splits reduce to the plain aggregate strengths. The ground node, absent
// from the BIS data, gets a synthetic row (or column) proportional to the
// opposite-side marginals, scaled by its share of aggregate strength.
BlockFitnesses block_fitnesses(std::span<const BankRecord> banks,
                               const BisExposureMatrix& bis, bool use_blocks = true);

// p = z a l / (1 + z a l); p(., ., 0) = 0.
double link_probability(double a_fitness, double l_fitness, double z);

// Calibrates z so the expected density over admissible ordered pairs matches
// the target: one global z, or one per block solved to the same target.
// Throws infeasible_error (with the attainable range) when the support of
// positive fitness products cannot reach the target.
ZSolution solve_z(const BlockFitnesses& fit, double target_density, ZMode mode,
                  bool ground_in_density = true);

// Mean link probability over admissible ordered pairs; no sampling involved.
double expected_density(const BlockFitnesses& fit, const ZSolution& z,
                        bool ground_in_density = true);

// Dense n x n matrix of link probabilities, zero diagonal.
std::vector<double> probability_matrix(const BlockFitnesses& fit, const ZSolution& z);

// Independent Bernoulli draw per ordered pair; whole networks containing an
// isolated node (no in- or out-link) are rejected and redrawn.
std::vector<std::uint8_t> sample_adjacency(std::span<const double> probabilities, int n,
                                           RngStream& rng, int rejection_cap = 1000);

// w_ij = A~_i L~_j / (W^{UV} p_ij) on sampled links. Algebraically equal to
// (z^-1 + A~_i L~_j) / W^{UV}.
std::vector<double> assign_weights(const BlockFitnesses& fit,
                                   std::span<const double> probabilities,
                                   std::span<const std::uint8_t> adjacency);

struct IpfResult {
    int iterations = 0;
    double residual = 0.0; // max relative row/column mismatch at exit
};

// Alternating row/column proportional scaling on the fixed sparsity pattern
// until every row sum matches row_targets and every column sum col_targets
// within tol (relative for positive targets, absolute for zero ones).
IpfResult ipf_rebalance(std::vector<double>& weights, int n,
                        std::span<const double> row_targets,
                        std::span<const double> col_targets, double tol = 1e-9,
                        int max_iter = 20000);

double realized_density(std::span<const std::uint8_t> adjacency,
                        std::span<const NodeMeta> nodes, bool ground_in_density);

// Full pipeline for one year of bank records: ground bank, fitnesses, z,
// then `ensemble_size` members each drawn from its own (seed, index)
// sub-stream so generation order and parallelism cannot change results.
EnsembleBuild generate_ensemble(std::span<const BankRecord> banks,
                                const BisExposureMatrix& bis,
                                const ReconstructionConfig& config);

} // namespace ibrisk
