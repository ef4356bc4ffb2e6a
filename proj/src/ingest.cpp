#include "ibrisk/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "ibrisk/csv.hpp"
#include "ibrisk/errors.hpp"

namespace ibrisk {

namespace {

std::size_t require_column(const csv::Table& table, const std::filesystem::path& path,
                           const std::string& name) {
    auto idx = table.column(name);
    if (!idx) {
        throw validation_error(path.string() + ": missing column '" + name + "'");
    }
    return *idx;
}

bool is_missing_cell(const std::string& s) {
    return s.empty() || s == "NA" || s == "na" || s == "nan" || s == "NaN";
}

} // namespace

std::optional<std::size_t> BisExposureMatrix::index_of(const std::string& code) const {
    for (std::size_t i = 0; i < countries.size(); ++i) {
        if (countries[i] == code) return i;
    }
    return std::nullopt;
}

double BisExposureMatrix::row_sum(std::size_t u) const {
    double s = 0.0;
    for (std::size_t v = 0; v < size(); ++v) s += at(u, v);
    return s;
}

double BisExposureMatrix::col_sum(std::size_t v) const {
    double s = 0.0;
    for (std::size_t u = 0; u < size(); ++u) s += at(u, v);
    return s;
}

std::vector<BankRecord> load_banks(const std::filesystem::path& path,
                                   std::optional<int> year_filter) {
    const auto table = csv::read_file(path);
    const auto c_id = require_column(table, path, "bank_id");
    const auto c_country = require_column(table, path, "country");
    const auto c_year = require_column(table, path, "year");
    const auto c_total = require_column(table, path, "total_assets");
    const auto c_assets = require_column(table, path, "interbank_assets");
    const auto c_liab = require_column(table, path, "interbank_liabilities");
    const auto c_fund = require_column(table, path, "liquid_funding");

    std::vector<BankRecord> banks;
    std::set<std::pair<std::string, int>> seen;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto line = table.line_numbers[r];
        BankRecord b;
        b.bank_id = row[c_id];
        b.country = row[c_country];
        b.year = csv::parse_int(row[c_year], path, line, "year");
        b.total_assets = csv::parse_double(row[c_total], path, line, "total_assets");
        b.interbank_assets = csv::parse_double(row[c_assets], path, line, "interbank_assets");
        b.interbank_liabilities =
            csv::parse_double(row[c_liab], path, line, "interbank_liabilities");
        b.liquid_funding = csv::parse_double(row[c_fund], path, line, "liquid_funding");
        if (year_filter && b.year != *year_filter) continue;

        std::ostringstream where;
        where << path.string() << ":" << line << ": bank " << b.bank_id << ": ";
        if (b.bank_id.empty()) throw validation_error(where.str() + "bank_id must be non-empty");
        if (b.country.empty()) throw validation_error(where.str() + "country must be non-empty");
        if (!(b.total_assets > 0.0))
            throw validation_error(where.str() + "total_assets must be positive");
        if (!(b.liquid_funding > 0.0))
            throw validation_error(where.str() + "liquid_funding must be positive");
        if (b.interbank_assets < 0.0)
            throw validation_error(where.str() + "interbank_assets must be nonnegative");
        if (b.interbank_liabilities < 0.0)
            throw validation_error(where.str() + "interbank_liabilities must be nonnegative");
        if (!seen.insert({b.bank_id, b.year}).second) {
            std::ostringstream msg;
            msg << where.str() << "duplicate bank_id '" << b.bank_id << "' in year " << b.year;
            throw validation_error(msg.str());
        }
        banks.push_back(std::move(b));
    }
    return banks;
}

std::vector<CountrySpread> load_spreads(const std::filesystem::path& path) {
    const auto table = csv::read_file(path);
    const auto c_country = require_column(table, path, "country");
    const auto c_year = require_column(table, path, "year");
    const auto c_bid = require_column(table, path, "bid_price");
    const auto c_ask = require_column(table, path, "ask_price");

    std::vector<CountrySpread> spreads;
    std::set<std::pair<std::string, int>> seen;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto line = table.line_numbers[r];
        CountrySpread s;
        s.country = row[c_country];
        s.year = csv::parse_int(row[c_year], path, line, "year");
        s.bid_price = csv::parse_double(row[c_bid], path, line, "bid_price");
        s.ask_price = csv::parse_double(row[c_ask], path, line, "ask_price");
        s.spread = s.bid_price - s.ask_price;
        if (!seen.insert({s.country, s.year}).second) {
            std::ostringstream msg;
            msg << path.string() << ":" << line << ": duplicate spread for " << s.country
                << " in year " << s.year;
            throw validation_error(msg.str());
        }
        spreads.push_back(std::move(s));
    }
    return spreads;
}

BisExposureMatrix load_bis(const std::filesystem::path& path,
                           std::optional<std::filesystem::path> impute_path) {
    const auto table = csv::read_file(path);
    if (table.header.size() < 2) {
        throw validation_error(path.string() + ": expected country columns after the first");
    }
    BisExposureMatrix bis;
    bis.countries.assign(table.header.begin() + 1, table.header.end());
    const std::size_t c = bis.countries.size();
    if (table.rows.size() != c) {
        std::ostringstream msg;
        msg << path.string() << ": " << c << " country columns but " << table.rows.size()
            << " rows";
        throw validation_error(msg.str());
    }
    bis.exposures.assign(c * c, 0.0);
    std::vector<bool> missing(c * c, false);
    for (std::size_t r = 0; r < c; ++r) {
        const auto& row = table.rows[r];
        const auto line = table.line_numbers[r];
        if (row[0] != bis.countries[r]) {
            std::ostringstream msg;
            msg << path.string() << ":" << line << ": row label '" << row[0]
                << "' does not match column order ('" << bis.countries[r] << "' expected)";
            throw validation_error(msg.str());
        }
        for (std::size_t v = 0; v < c; ++v) {
            const auto& cell = row[v + 1];
            if (is_missing_cell(cell)) {
                missing[r * c + v] = true;
                continue;
            }
            bis.at(r, v) = csv::parse_double(cell, path, line, bis.countries[v]);
        }
    }

    if (impute_path) {
        const auto imp = csv::read_file(*impute_path);
        const auto c_lender = require_column(imp, *impute_path, "lender");
        const auto c_borrower = require_column(imp, *impute_path, "borrower");
        const auto c_value = require_column(imp, *impute_path, "value");
        for (std::size_t r = 0; r < imp.rows.size(); ++r) {
            const auto& row = imp.rows[r];
            const auto line = imp.line_numbers[r];
            auto u = bis.index_of(row[c_lender]);
            auto v = bis.index_of(row[c_borrower]);
            if (!u || !v) {
                std::ostringstream msg;
                msg << impute_path->string() << ":" << line << ": unknown country pair "
                    << row[c_lender] << "-" << row[c_borrower];
                throw validation_error(msg.str());
            }
            bis.at(*u, *v) = csv::parse_double(row[c_value], *impute_path, line, "value");
            missing[*u * c + *v] = false;
        }
    }

    for (std::size_t u = 0; u < c; ++u) {
        for (std::size_t v = 0; v < c; ++v) {
            if (missing[u * c + v]) {
                std::ostringstream msg;
                msg << path.string() << ": missing exposure " << bis.countries[u] << "-"
                    << bis.countries[v] << " (provide an imputation file)";
                throw validation_error(msg.str());
            }
            if (bis.at(u, v) < 0.0) {
                std::ostringstream msg;
                msg << path.string() << ": negative exposure " << bis.countries[u] << "-"
                    << bis.countries[v];
                throw validation_error(msg.str());
            }
        }
    }
    return bis;
}

double median(std::span<const double> values) {
    if (values.empty()) {
        throw validation_error("median of an empty list");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    if (n % 2 == 1) return sorted[n / 2];
    return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

double median_map(double x, double m) {
    const double denom = x + m;
    if (denom == 0.0) {
        std::ostringstream msg;
        msg << "median transform undefined at x = " << x << " (x + median = 0)";
        throw validation_error(msg.str());
    }
    return (x - m) / denom;
}

std::vector<double> median_transform(std::span<const double> values) {
    const double m = median(values);
    std::vector<double> out;
    out.reserve(values.size());
    for (double x : values) out.push_back(median_map(x, m));
    return out;
}

double liquidity_indicator(const BankRecord& bank) {
    if (!(bank.liquid_funding > 0.0)) {
        throw validation_error("bank " + bank.bank_id + ": liquid_funding must be positive");
    }
    return bank.total_assets / bank.liquid_funding;
}

namespace {

double spread_for(const std::map<std::pair<std::string, int>, double>& spreads,
                  const BankRecord& bank) {
    auto it = spreads.find({bank.country, bank.year});
    if (it == spreads.end()) {
        std::ostringstream msg;
        msg << "no spread for country " << bank.country << " in year " << bank.year
            << " (bank " << bank.bank_id << ")";
        throw validation_error(msg.str());
    }
    return it->second;
}

// Applies the median map either with one pooled median or with per-year
// medians. Ground banks carry no balance sheet: they are excluded from the
// pool and their term is fixed at 0.
std::vector<double> pooled_transform(std::span<const BankRecord> banks,
                                     const std::vector<double>& raw, Pooling pooling,
                                     const char* what) {
    std::vector<double> out(banks.size(), 0.0);
    auto apply = [&](const std::vector<std::size_t>& idx) {
        std::vector<double> pool;
        pool.reserve(idx.size());
        for (auto i : idx) pool.push_back(raw[i]);
        const double m = median(pool);
        for (auto i : idx) {
            const double v = median_map(raw[i], m);
            if (!(v >= -1.0 && v <= 1.0)) {
                std::ostringstream msg;
                msg << what << " for bank " << banks[i].bank_id << " year " << banks[i].year
                    << " is " << v << ", outside [-1, 1]; input " << raw[i]
                    << " and pool median " << m << " have mixed signs";
                throw validation_error(msg.str());
            }
            out[i] = v;
        }
    };

    if (pooling == Pooling::AllYears) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < banks.size(); ++i) {
            if (!banks[i].is_ground) idx.push_back(i);
        }
        if (!idx.empty()) apply(idx);
    } else {
        std::map<int, std::vector<std::size_t>> by_year;
        for (std::size_t i = 0; i < banks.size(); ++i) {
            if (!banks[i].is_ground) by_year[banks[i].year].push_back(i);
        }
        for (auto& [year, idx] : by_year) apply(idx);
    }
    return out;
}

} // namespace

std::vector<double> node_term_gamma(std::span<const BankRecord> banks,
                                    std::span<const CountrySpread> spreads,
                                    Pooling pooling) {
    std::map<std::pair<std::string, int>, double> by_key;
    for (const auto& s : spreads) by_key[{s.country, s.year}] = s.spread;
    std::vector<double> raw(banks.size(), 0.0);
    for (std::size_t i = 0; i < banks.size(); ++i) {
        if (banks[i].is_ground) continue;
        raw[i] = liquidity_indicator(banks[i]) * spread_for(by_key, banks[i]);
    }
    return pooled_transform(banks, raw, pooling, "gamma");
}

std::vector<double> resilience_nu(std::span<const BankRecord> banks, Pooling pooling) {
    std::vector<double> raw(banks.size(), 0.0);
    for (std::size_t i = 0; i < banks.size(); ++i) {
        if (banks[i].is_ground) continue;
        if (!(banks[i].liquid_funding > 0.0)) {
            throw validation_error("bank " + banks[i].bank_id +
                                   ": liquid_funding must be positive");
        }
        raw[i] = banks[i].interbank_liabilities / banks[i].liquid_funding;
    }
    return pooled_transform(banks, raw, pooling, "nu");
}

IndicatorTable compute_indicators(std::span<const BankRecord> banks,
                                  std::span<const CountrySpread> spreads, Pooling pooling) {
    IndicatorTable table;
    table.liq.resize(banks.size(), 0.0);
    for (std::size_t i = 0; i < banks.size(); ++i) {
        if (!banks[i].is_ground) table.liq[i] = liquidity_indicator(banks[i]);
    }
    table.gamma = node_term_gamma(banks, spreads, pooling);
    table.nu = resilience_nu(banks, pooling);
    for (const auto& s : spreads) {
        table.spread_by_country_year[{s.country, s.year}] = s.spread;
    }
    return table;
}

std::vector<double> rescale_bis(const BisExposureMatrix& bis) {
    const std::size_t c = bis.size();
    std::vector<double> row(c, 0.0), col(c, 0.0);
    for (std::size_t u = 0; u < c; ++u) row[u] = bis.row_sum(u);
    for (std::size_t v = 0; v < c; ++v) col[v] = bis.col_sum(v);
    for (std::size_t u = 0; u < c; ++u) {
        if (!(row[u] > 0.0)) {
            throw validation_error("BIS row sum for " + bis.countries[u] + " is not positive");
        }
        if (!(col[u] > 0.0)) {
            throw validation_error("BIS column sum for " + bis.countries[u] +
                                   " is not positive");
        }
    }
    std::vector<double> vol(c * c, 0.0);
    for (std::size_t u = 0; u < c; ++u) {
        for (std::size_t v = 0; v < c; ++v) {
            const double e = bis.at(u, v);
            vol[u * c + v] = e * e / (row[u] * col[v]);
        }
    }
    return vol;
}

void validate_inputs(std::span<const BankRecord> banks, std::span<const CountrySpread> spreads,
                     const BisExposureMatrix& bis) {
    std::map<std::pair<std::string, int>, double> spread_keys;
    for (const auto& s : spreads) spread_keys[{s.country, s.year}] = s.spread;
    for (const auto& b : banks) {
        if (b.is_ground) continue;
        auto c = bis.index_of(b.country);
        if (!c) {
            throw validation_error("bank " + b.bank_id + ": country " + b.country +
                                   " not present in the BIS matrix");
        }
        if (!(bis.row_sum(*c) > 0.0) || !(bis.col_sum(*c) > 0.0)) {
            throw validation_error("BIS row/column sum for populated country " + b.country +
                                   " must be positive");
        }
        spread_for(spread_keys, b);
    }
}

std::vector<int> distinct_years(std::span<const BankRecord> banks) {
    std::set<int> years;
    for (const auto& b : banks) years.insert(b.year);
    return std::vector<int>(years.begin(), years.end());
}

} // namespace ibrisk
