#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ibrisk {

// One bank-year row of balance-sheet aggregates. Currency columns are in
// millions USD; only the fields the model consumes are kept.
struct BankRecord {
    std::string bank_id;
    std::string country;
    int year = 0;
    double total_assets = 0.0;          // T
    double interbank_assets = 0.0;      // A, out-strength target
    double interbank_liabilities = 0.0; // L, in-strength target
    double liquid_funding = 0.0;        // F, deposits + money market + short-term funding
    bool is_ground = false;
};

struct CountrySpread {
    std::string country;
    int year = 0;
    double bid_price = 0.0;
    double ask_price = 0.0;
    double spread = 0.0; // bid - ask, stored exactly as computed
};

// Country-by-country lending volumes: exp(U, V) is the amount the banking
// sector of U lends to banks of V.
struct BisExposureMatrix {
    std::vector<std::string> countries;
    std::vector<double> exposures; // row-major C x C

    std::size_t size() const { return countries.size(); }
    double at(std::size_t u, std::size_t v) const { return exposures[u * size() + v]; }
    double& at(std::size_t u, std::size_t v) { return exposures[u * size() + v]; }
    std::optional<std::size_t> index_of(const std::string& code) const;
    double row_sum(std::size_t u) const;
    double col_sum(std::size_t v) const;
};

enum class Pooling { AllYears, PerYear };

// Per-bank risk terms aligned index-for-index with the bank list they were
// computed from, plus the per-(country, year) spreads used.
struct IndicatorTable {
    std::vector<double> liq;   // T/F
    std::vector<double> gamma; // in [-1, 1]
    std::vector<double> nu;    // in [-1, 1]
    std::map<std::pair<std::string, int>, double> spread_by_country_year;
};

std::vector<BankRecord> load_banks(const std::filesystem::path& path,
                                   std::optional<int> year_filter = std::nullopt);
std::vector<CountrySpread> load_spreads(const std::filesystem::path& path);

// bis.csv carries a header row and a leading column of country codes. Cells
// left blank (or NA) are missing and must be covered by the optional
// imputation sidecar `lender,borrower,value`; anything still missing is an
// error, no automatic fill-in.
BisExposureMatrix load_bis(const std::filesystem::path& path,
                           std::optional<std::filesystem::path> impute_path = std::nullopt);

double median(std::span<const double> values);

// f(x) = (x - m) / (x + m) with m the median of the input list. Maps the
// median to 0 and is scale-free; rejects x = -m where it is undefined.
std::vector<double> median_transform(std::span<const double> values);

// Same map with an externally supplied median, for pooled rescaling.
double median_map(double x, double m);

double liquidity_indicator(const BankRecord& bank);

// gamma_i = f(Liq_i * spread(country_i, year_i)); the median is pooled over
// every loaded year by default so the indicator keeps its dynamics over time.
std::vector<double> node_term_gamma(std::span<const BankRecord> banks,
                                    std::span<const CountrySpread> spreads,
                                    Pooling pooling = Pooling::AllYears);

// nu_i = f(L_i / F_i), same pooling rule.
std::vector<double> resilience_nu(std::span<const BankRecord> banks,
                                  Pooling pooling = Pooling::AllYears);

IndicatorTable compute_indicators(std::span<const BankRecord> banks,
                                  std::span<const CountrySpread> spreads,
                                  Pooling pooling = Pooling::AllYears);

// VOL(U,V) = exp(U,V)^2 / (rowsum_U * colsum_V); requires every row and
// column sum positive.
std::vector<double> rescale_bis(const BisExposureMatrix& bis);

// Validates the cross-file constraints: unique (bank_id, year), positive T/F,
// nonnegative A/L, every bank country present in the BIS matrix with positive
// row/column sums, and a spread for every (country, year) in use.
void validate_inputs(std::span<const BankRecord> banks,
                     std::span<const CountrySpread> spreads,
                     const BisExposureMatrix& bis);

std::vector<int> distinct_years(std::span<const BankRecord> banks);

} // namespace ibrisk
