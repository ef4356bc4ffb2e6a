#pragma once

#include <cstdint>
#include <filesystem>

#include "ibrisk/ingest.hpp"

namespace ibrisk {

// Generator for desk-scale stand-in data with the shapes the model expects:
// heavy-tailed bank sizes, aggregate liabilities slightly above assets, a
// diagonal-dominant BIS matrix consistent with the country aggregates, and
// positive persistent bond spreads.
struct SynthConfig {
    int banks = 97;
    int countries = 9;
    int year_start = 2006;
    int year_end = 2013;
    std::uint64_t seed = 42;
    double liability_surplus = 0.08; // aggregate L over A, before noise
    double size_sigma = 1.0;         // lognormal spread of total assets
    double interbank_alpha = 0.7;    // interbank books scale as T^alpha
    double year_drift = 0.5;         // scale on the year-over-year noise
    double bis_diagonal_boost = 4.0; // own-country preferential lending
    bool homogeneous = false;        // equal balance sheets, for calibration studies
};

struct SynthData {
    std::vector<BankRecord> banks;
    std::vector<CountrySpread> spreads;
    BisExposureMatrix bis;
};

SynthData synth_inputs(const SynthConfig& config);

// Writes banks.csv, spreads.csv and bis.csv under dir.
void write_synth(const SynthData& data, const std::filesystem::path& dir);

} // namespace ibrisk
