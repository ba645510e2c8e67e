// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>

#include <json.hpp>

namespace gep {

// Collapses whitespace runs and trims, so that queries differing only in
// spacing hit the same cassette entry.
std::string normalize_query(std::string_view query);

// FNV-1a 64-bit over raw bytes, hex-encoded. Used for cassette keys of
// binary payloads.
std::string content_hash(std::span<const std::uint8_t> bytes);

/// Recorded map of external-tool requests to responses (JSON-lines on disk,
/// one entry per line: {tool, key, response, recorded_at}). Binary payloads
/// live in a sibling "blobs/" directory, referenced by content hash.
class Cassette {
public:
    Cassette() = default;

    static Cassette load(const std::string& path);
    // Opens (creating if needed) a cassette for appending in record mode.
    static Cassette open_for_record(const std::string& path);

    // Replay lookup. nullopt on unknown key.
    std::optional<nlohmann::json> find(const std::string& tool, const std::string& key) const;

    // Record-mode append; serialized through an internal mutex.
    void record(const std::string& tool, const std::string& key, nlohmann::json response);

    // Blob storage next to the cassette file.
    std::string store_blob(std::span<const std::uint8_t> bytes);
    std::optional<std::vector<std::uint8_t>> load_blob(const std::string& hash) const;

    std::size_t size() const { return entries_.size(); }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::string blob_dir_;
    bool writable_ = false;
    std::unordered_map<std::string, nlohmann::json> entries_;
    // behind a pointer so Cassette stays movable
    std::unique_ptr<std::mutex> write_mutex_ = std::make_unique<std::mutex>();

    static std::string entry_key(const std::string& tool, const std::string& key);
};

} // namespace gep
