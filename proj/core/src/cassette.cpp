// SPDX-License-Identifier: Apache-2.0
#include "gep/cassette.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include "gep/errors.hpp"
#include "gep/types.hpp"

namespace fs = std::filesystem;

namespace gep {

std::string normalize_query(std::string_view query) {
    return collapse_spaces(query);
}

std::string content_hash(std::span<const std::uint8_t> bytes) {
    // FNV-1a 64
    std::uint64_t h = 14695981039346656037ull;
    for (auto b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

std::string Cassette::entry_key(const std::string& tool, const std::string& key) {
    return tool + "\x1f" + key;
}

Cassette Cassette::load(const std::string& path) {
    Cassette c;
    c.path_ = path;
    c.blob_dir_ = (fs::path(path).parent_path() / "blobs").string();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open cassette: " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        nlohmann::json entry;
        try {
            entry = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("bad cassette line " + std::to_string(lineno) + ": " + e.what());
        }
        c.entries_[entry_key(entry.at("tool"), entry.at("key"))] = entry.at("response");
    }
    return c;
}

Cassette Cassette::open_for_record(const std::string& path) {
    Cassette c;
    if (fs::exists(path)) c = load(path);
    c.path_ = path;
    c.blob_dir_ = (fs::path(path).parent_path() / "blobs").string();
    c.writable_ = true;
    fs::create_directories(fs::path(path).parent_path());
    fs::create_directories(c.blob_dir_);
    return c;
}

std::optional<nlohmann::json> Cassette::find(const std::string& tool, const std::string& key) const {
    auto it = entries_.find(entry_key(tool, key));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void Cassette::record(const std::string& tool, const std::string& key, nlohmann::json response) {
    if (!writable_) throw ConfigError("cassette not opened for record: " + path_);
    std::lock_guard lock(*write_mutex_);
    auto now = std::chrono::system_clock::now().time_since_epoch();
    nlohmann::json entry{
        {"tool", tool},
        {"key", key},
        {"response", response},
        {"recorded_at", std::chrono::duration_cast<std::chrono::seconds>(now).count()},
    };
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    out << entry.dump() << "\n";
    entries_[entry_key(tool, key)] = std::move(response);
}

std::string Cassette::store_blob(std::span<const std::uint8_t> bytes) {
    auto hash = content_hash(bytes);
    std::lock_guard lock(*write_mutex_);
    fs::create_directories(blob_dir_);
    auto p = fs::path(blob_dir_) / hash;
    if (!fs::exists(p)) {
        std::ofstream out(p, std::ios::binary);
        out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    }
    return hash;
}

std::optional<std::vector<std::uint8_t>> Cassette::load_blob(const std::string& hash) const {
    auto p = fs::path(blob_dir_) / hash;
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

} // namespace gep
