#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "ibrisk/contagion.hpp"
#include "ibrisk/metrics.hpp"
#include "ibrisk/reconstruct.hpp"

namespace ibrisk {

// --- ensemble files ---------------------------------------------------------
// One file pair per member under <dir>/year=<year>/: member_###.csv holds the
// sparse `lender_id,borrower_id,weight` edges and member_###.json the node
// order, seed, z and realized density.

void write_ensemble(const std::filesystem::path& dir, int year, const EnsembleBuild& build,
                    const nlohmann::json& config_echo);

struct StoredEnsemble {
    int year = 0;
    std::vector<ReconstructedNetwork> members;
};

StoredEnsemble load_ensemble_year(const std::filesystem::path& dir, int year);
std::vector<int> ensemble_years(const std::filesystem::path& dir);

// --- simulation campaign ----------------------------------------------------

struct CriticalTimeRow {
    int network = 0;
    int seed_bank = 0; // node index
    std::optional<int> t_star;
};

struct YearResults {
    int year = 0;
    int max_steps = 0;
    long runs = 0;
    long censored = 0;
    PrevalenceResult prevalence_count, prevalence_assets;
    RatioResult ratio_count, ratio_assets;
    std::map<std::string, MeanCI> country_count, country_assets;
    std::vector<MuStepSummary> mu;
    std::vector<CriticalTimeRow> critical_times;
    std::vector<NodeMeta> nodes;
};

// Called once per run in deterministic run order (network-major, then seed
// bank), whatever the worker count.
using TrajectorySink = std::function<void(int network, int seed_bank, const Trajectory&)>;

// Runs one contagion per (network, real seed bank) pair: every real node
// seeds exactly once on every member. The run RNG is derived from
// (master seed, year, network index, seed index), so scheduling cannot
// change any result.
YearResults simulate_year(std::span<const ReconstructedNetwork> ensemble,
                          std::span<const double> gamma, std::span<const double> nu,
                          std::span<const double> total_assets,
                          const ContagionConfig& config, std::uint64_t master_seed,
                          int year, int threads, const TrajectorySink& sink = {});

// Aligns per-(bank_id, year) indicator values to a network's node order;
// ground nodes get zero terms and zero asset weight.
struct AlignedIndicators {
    std::vector<double> gamma;
    std::vector<double> nu;
    std::vector<double> total_assets;
};

AlignedIndicators align_indicators(std::span<const NodeMeta> nodes, int year,
                                   std::span<const BankRecord> banks,
                                   std::span<const double> gamma_by_bank,
                                   std::span<const double> nu_by_bank);

// --- metrics CSV writers ----------------------------------------------------

void write_prevalence_csv(const std::filesystem::path& path,
                          std::span<const YearResults> years);
void write_bankruptcy_ratio_csv(const std::filesystem::path& path,
                                std::span<const YearResults> years);
void write_country_decomposition_csv(const std::filesystem::path& path,
                                     std::span<const YearResults> years);
void write_mu_dynamics_csv(const std::filesystem::path& path,
                           std::span<const YearResults> years);
void write_critical_times_csv(const std::filesystem::path& path,
                              std::span<const YearResults> years);

nlohmann::json contagion_config_json(const ContagionConfig& config);
nlohmann::json reconstruction_config_json(const ReconstructionConfig& config);

} // namespace ibrisk
