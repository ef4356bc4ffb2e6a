#include "ibrisk/manifest.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "ibrisk/errors.hpp"
#include "ibrisk/version.hpp"

namespace ibrisk {

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path.string() + " for hashing");
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    char buffer[1 << 14];
    while (in) {
        in.read(buffer, sizeof(buffer));
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buffer[i]);
            hash *= 0x100000001B3ULL;
        }
    }
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << hash;
    return hex.str();
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest) {
    nlohmann::json j;
    j["tool"] = "ibrisk";
    j["version"] = kVersion;
    j["command"] = manifest.command;
    j["master_seed"] = manifest.master_seed;
    j["config"] = manifest.config;
    j["input_digests"] = manifest.input_digests;
    j["wall_seconds"] = manifest.wall_seconds;
    std::ofstream out(dir / "manifest.json");
    if (!out) throw io_error("cannot write " + (dir / "manifest.json").string());
    out << j.dump(2) << "\n";
}

} // namespace ibrisk
