#include "fk/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "fk/version.hpp"

namespace fk {

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_row(const std::vector<std::string>& cells) {
    std::string row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) row += ",";
        row += cells[i];
    }
    row += "\n";
    return row;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string json_hash(const nlohmann::json& j) {
    const std::string text = j.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

nlohmann::json make_manifest(const std::string& subcommand, const nlohmann::json& config) {
    return nlohmann::json{{"version", version()},
                          {"subcommand", subcommand},
                          {"config", config},
                          {"config_hash", json_hash(config)}};
}

void write_manifest(const std::filesystem::path& dir, const std::string& subcommand,
                    const nlohmann::json& config) {
    atomic_write_file(dir / "manifest.json", make_manifest(subcommand, config).dump(2) + "\n");
}

}  // namespace fk
