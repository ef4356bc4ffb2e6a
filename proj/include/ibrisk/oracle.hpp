#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ibrisk/contagion.hpp"
#include "ibrisk/reconstruct.hpp"

namespace ibrisk {

// Exact distribution machinery for networks of up to 8 banks: every joint
// compartment assignment is a state (base-3 encoding, 3^n states) and the
// synchronous update factorizes into independent per-bank transitions. The
// per-edge probabilities are recomputed here from the weight matrix so the
// chain does not share the simulation engine's cached code paths.
struct ExactChain {
    int n = 0;
    std::size_t states = 0;
    // Sparse row-stochastic transition matrix.
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows;

    static std::uint32_t encode(std::span<const Compartment> state);
    static std::vector<Compartment> decode(std::uint32_t code, int n);
    static bool is_absorbing(std::uint32_t code, int n); // no distressed bank
};

inline constexpr int kMaxOracleBanks = 8;

ExactChain build_chain(const ReconstructedNetwork& net, const ContagionConfig& config,
                       std::span<const double> gamma, std::span<const double> nu);

// Exact state distribution after `horizon` synchronous steps from a point
// mass on `initial`.
std::vector<double> absorbing_distribution(const ExactChain& chain, std::uint32_t initial,
                                           int horizon);

// Debug dump of the transition matrix: one `from,to,probability` row per
// nonzero entry.
void dump_chain_csv(const ExactChain& chain, const std::filesystem::path& path);

// Monte Carlo engine runs against the exact chain on randomized tiny
// instances, cycling the model variants. An instance passes when every
// absorbing state with exact mass >= min_mass sees its empirical frequency
// within 3 binomial standard deviations.
struct OracleInstanceResult {
    int index = 0;
    int n = 0;
    Variant variant = Variant::BM;
    double epsilon = 1.0;
    double beta_star = 0.0;
    double phi = 1.0;
    int states_compared = 0;
    double worst_sigma = 0.0; // max |freq - p| / binomial sd
    bool pass = false;
};

struct OracleCheckReport {
    std::vector<OracleInstanceResult> instances;
    long runs_per_instance = 0;
    bool pass = false;
};

OracleCheckReport oracle_check(int instances, long runs_per_instance, std::uint64_t seed,
                               int max_steps = 50, double min_mass = 0.001);

} // namespace ibrisk
