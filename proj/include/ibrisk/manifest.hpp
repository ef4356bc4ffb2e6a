#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

namespace ibrisk {

// FNV-1a 64-bit digest of a file's bytes, hex-encoded. Not cryptographic;
// it only pins which inputs produced which outputs.
std::string file_digest(const std::filesystem::path& path);

// Every output directory gets exactly one manifest.json echoing everything
// that can affect the data outputs, so a rerun can be checked byte-for-byte.
struct RunManifest {
    std::string command;
    std::uint64_t master_seed = 0;
    nlohmann::json config;
    nlohmann::json input_digests;
    double wall_seconds = 0.0;
};

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);

} // namespace ibrisk
