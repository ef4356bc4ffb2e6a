#include "ibrisk/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ibrisk/csv.hpp"
#include "ibrisk/errors.hpp"
#include "ibrisk/rng.hpp"

namespace ibrisk {

namespace {

const char* kCountryPool[] = {"AT", "DE", "ES", "FR", "GB", "GR", "IT", "PT", "SE",
                              "BE", "DK", "FI", "IE", "NL", "NO", "PL", "CZ", "HU"};

std::vector<std::string> country_codes(int count) {
    std::vector<std::string> codes;
    const int pool = static_cast<int>(std::size(kCountryPool));
    for (int i = 0; i < count; ++i) {
        if (i < pool) {
            codes.push_back(kCountryPool[i]);
        } else {
            // Synthetic two-letter codes beyond the pool: XA, XB, ...
            std::string code = "X";
            code.push_back(static_cast<char>('A' + (i - pool) % 26));
            if (i - pool >= 26) code.insert(code.begin(), static_cast<char>('A' + (i - pool) / 26));
            codes.push_back(code);
        }
    }
    return codes;
}

// Allocates banks to countries with a floor of four per country when the
// total allows it, mirroring heterogeneous country representation.
std::vector<int> allocate_banks(int banks, int countries, RngStream& rng) {
    const int floor_per = std::min(4, banks / countries);
    std::vector<int> counts(countries, floor_per);
    int remaining = banks - floor_per * countries;
    std::vector<double> weight(countries);
    double total = 0.0;
    for (int c = 0; c < countries; ++c) {
        weight[c] = rng.lognormal(0.0, 0.8);
        total += weight[c];
    }
    // Largest-remainder split of the remaining banks.
    std::vector<std::pair<double, int>> frac(countries);
    int assigned = 0;
    for (int c = 0; c < countries; ++c) {
        const double exact = remaining * weight[c] / total;
        const int whole = static_cast<int>(exact);
        counts[c] += whole;
        assigned += whole;
        frac[c] = {exact - whole, c};
    }
    std::sort(frac.begin(), frac.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (int k = 0; k < remaining - assigned; ++k) counts[frac[k].second] += 1;
    return counts;
}

// Dense Sinkhorn used only to shape the synthetic BIS matrix: diagonal
// entries are allowed, everything is strictly positive, so it converges.
void scale_to_marginals(std::vector<double>& m, int c, const std::vector<double>& row,
                        const std::vector<double>& col) {
    for (int iter = 0; iter < 500; ++iter) {
        double worst = 0.0;
        for (int u = 0; u < c; ++u) {
            double rs = 0.0;
            for (int v = 0; v < c; ++v) rs += m[u * c + v];
            const double f = row[u] / rs;
            for (int v = 0; v < c; ++v) m[u * c + v] *= f;
        }
        for (int v = 0; v < c; ++v) {
            double cs = 0.0;
            for (int u = 0; u < c; ++u) cs += m[u * c + v];
            const double f = col[v] / cs;
            for (int u = 0; u < c; ++u) m[u * c + v] *= f;
            worst = std::max(worst, std::abs(f - 1.0));
        }
        if (worst < 1e-12) break;
    }
}

} // namespace

SynthData synth_inputs(const SynthConfig& config) {
    if (config.banks < 1 || config.countries < 1) {
        throw validation_error("bank and country counts must be at least 1");
    }
    if (config.banks < config.countries) {
        throw validation_error("need at least one bank per country");
    }
    if (config.year_end < config.year_start) {
        throw validation_error("year range is empty");
    }

    SynthData data;
    const auto codes = country_codes(config.countries);
    RngStream rng(derive_seed(config.seed, {0x5359u})); // synth stream

    const auto counts = allocate_banks(config.banks, config.countries, rng);

    struct BankState {
        std::string id;
        std::string country;
        double total_assets;
        double liq; // T / F
        double a_frac;
        double l_frac;
    };
    std::vector<BankState> state;
    state.reserve(config.banks);
    int serial = 0;
    for (int c = 0; c < config.countries; ++c) {
        for (int k = 0; k < counts[c]; ++k) {
            BankState b;
            std::ostringstream id;
            id << "B" << std::setw(3) << std::setfill('0') << ++serial;
            b.id = id.str();
            b.country = codes[c];
            if (config.homogeneous) {
                b.total_assets = 50000.0;
                b.liq = 8.0;
                b.a_frac = 0.06;
                b.l_frac = 0.06;
            } else {
                b.total_assets = 50000.0 * rng.lognormal(0.0, config.size_sigma);
                b.liq = std::clamp(rng.lognormal(std::log(8.0), 0.55), 1.5, 45.0);
                // Interbank books scale as T^alpha: the biggest banks hold
                // relatively smaller shares of the interbank market, which
                // keeps single banks from dominating their country block.
                const double tilt =
                    std::pow(b.total_assets / 50000.0, config.interbank_alpha - 1.0);
                b.a_frac =
                    std::clamp(tilt * rng.lognormal(std::log(0.06), 0.35), 0.005, 0.4);
                b.l_frac =
                    std::clamp(tilt * rng.lognormal(std::log(0.06), 0.35), 0.005, 0.4);
            }
            state.push_back(std::move(b));
        }
    }

    for (int year = config.year_start; year <= config.year_end; ++year) {
        std::vector<BankRecord> rows;
        rows.reserve(state.size());
        double sum_a = 0.0, sum_l = 0.0;
        for (auto& b : state) {
            if (year > config.year_start && !config.homogeneous) {
                const double drift = config.year_drift;
                b.total_assets *= rng.lognormal(0.0, 0.08 * drift);
                b.liq = std::clamp(b.liq * rng.lognormal(0.0, 0.05 * drift), 1.5, 45.0);
                b.a_frac =
                    std::clamp(b.a_frac * rng.lognormal(0.0, 0.10 * drift), 0.005, 0.4);
                b.l_frac =
                    std::clamp(b.l_frac * rng.lognormal(0.0, 0.10 * drift), 0.005, 0.4);
            }
            BankRecord r;
            r.bank_id = b.id;
            r.country = b.country;
            r.year = year;
            r.total_assets = b.total_assets;
            r.liquid_funding = b.total_assets / b.liq;
            r.interbank_assets = b.total_assets * b.a_frac;
            r.interbank_liabilities = b.total_assets * b.l_frac;
            sum_a += r.interbank_assets;
            sum_l += r.interbank_liabilities;
            rows.push_back(std::move(r));
        }
        // Liabilities run ahead of assets in aggregate; the reconstruction's
        // ground bank absorbs the gap.
        const double surplus =
            config.homogeneous ? config.liability_surplus
                               : config.liability_surplus * rng.lognormal(0.0, 0.2);
        const double scale = (1.0 + surplus) * sum_a / sum_l;
        for (auto& r : rows) r.interbank_liabilities *= scale;
        data.banks.insert(data.banks.end(), rows.begin(), rows.end());
    }

    // Spreads: persistent positive paths per country; stored spread is the
    // bid-ask difference so high values mean tight market liquidity.
    for (int c = 0; c < config.countries; ++c) {
        double spread = std::exp(rng.normal(std::log(0.3), 0.7));
        for (int year = config.year_start; year <= config.year_end; ++year) {
            if (year > config.year_start) spread *= rng.lognormal(0.0, 0.35);
            CountrySpread s;
            s.country = codes[c];
            s.year = year;
            s.ask_price = 100.0 * rng.lognormal(0.0, 0.02);
            s.bid_price = s.ask_price + spread;
            s.spread = s.bid_price - s.ask_price;
            data.spreads.push_back(std::move(s));
        }
    }

    // BIS matrix from the final year's country aggregates: marginals follow
    // the countries' interbank assets/liabilities, diagonal boosted before
    // rebalancing so own-country lending dominates.
    const int c = config.countries;
    std::vector<double> row_share(c, 0.0), col_share(c, 0.0);
    double sum_a = 0.0, sum_l = 0.0;
    for (const auto& r : data.banks) {
        if (r.year != config.year_end) continue;
        const auto it = std::find(codes.begin(), codes.end(), r.country);
        const int idx = static_cast<int>(it - codes.begin());
        row_share[idx] += r.interbank_assets;
        col_share[idx] += r.interbank_liabilities;
        sum_a += r.interbank_assets;
        sum_l += r.interbank_liabilities;
    }
    const double total_volume = sum_a;
    std::vector<double> row_target(c), col_target(c);
    for (int u = 0; u < c; ++u) {
        row_target[u] = total_volume * row_share[u] / sum_a;
        col_target[u] = total_volume * col_share[u] / sum_l;
    }
    std::vector<double> m(static_cast<std::size_t>(c) * c, 0.0);
    for (int u = 0; u < c; ++u) {
        for (int v = 0; v < c; ++v) {
            const double boost = u == v ? 1.0 + config.bis_diagonal_boost : 1.0;
            m[u * c + v] = row_target[u] * col_target[v] * boost;
        }
    }
    scale_to_marginals(m, c, row_target, col_target);
    data.bis.countries = codes;
    data.bis.exposures = std::move(m);
    return data;
}

void write_synth(const SynthData& data, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "banks.csv");
        if (!out) throw io_error("cannot write " + (dir / "banks.csv").string());
        out << "bank_id,country,year,total_assets,interbank_assets,"
               "interbank_liabilities,liquid_funding\n";
        for (const auto& b : data.banks) {
            out << b.bank_id << "," << b.country << "," << b.year << ","
                << csv::format_double(b.total_assets) << ","
                << csv::format_double(b.interbank_assets) << ","
                << csv::format_double(b.interbank_liabilities) << ","
                << csv::format_double(b.liquid_funding) << "\n";
        }
    }
    {
        std::ofstream out(dir / "spreads.csv");
        if (!out) throw io_error("cannot write " + (dir / "spreads.csv").string());
        out << "country,year,bid_price,ask_price\n";
        for (const auto& s : data.spreads) {
            out << s.country << "," << s.year << "," << csv::format_double(s.bid_price)
                << "," << csv::format_double(s.ask_price) << "\n";
        }
    }
    {
        std::ofstream out(dir / "bis.csv");
        if (!out) throw io_error("cannot write " + (dir / "bis.csv").string());
        out << "country";
        for (const auto& code : data.bis.countries) out << "," << code;
        out << "\n";
        const std::size_t c = data.bis.size();
        for (std::size_t u = 0; u < c; ++u) {
            out << data.bis.countries[u];
            for (std::size_t v = 0; v < c; ++v) {
                out << "," << csv::format_double(data.bis.at(u, v));
            }
            out << "\n";
        }
    }
}

} // namespace ibrisk
