// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gep/cassette.hpp"

namespace gep {

enum class RunMode { Live, Replay, Record };

RunMode parse_run_mode(std::string_view s); // "live" | "replay" | "record"
std::string to_string(RunMode m);

struct SearchResult {
    std::string title;
    std::string snippet;
    std::string link;
    std::string display_link;
    int rank = 0; // 1-based, contiguous within one response
};

struct ImageResult {
    std::string thumbnail_link;
    std::string source_link;
    std::string title;
    std::string snippet;
    std::string context_link;
    int rank = 0;
};

struct LogoDetection {
    std::optional<std::string> brand_guess;
    double confidence = 0.0; // 0 when brand_guess is absent
};

struct VisionDescription {
    std::string text; // may be empty for blank/sensitive screenshots
};

struct RetryPolicy {
    int retries = 2;
    std::chrono::milliseconds initial_backoff{500};
    std::chrono::milliseconds timeout{15000};
};

class WebSearchClient {
public:
    virtual ~WebSearchClient() = default;
    // query non-empty, 1 <= count <= 10. Throws ToolUnavailable / CassetteMiss.
    virtual std::vector<SearchResult> search(const std::string& query, int count) = 0;
};

class ImageSearchClient {
public:
    virtual ~ImageSearchClient() = default;
    virtual std::vector<ImageResult> search(const std::string& query, int count) = 0;
};

class LogoDetectorClient {
public:
    virtual ~LogoDetectorClient() = default;
    // image must be non-empty.
    virtual LogoDetection detect(std::span<const std::uint8_t> image) = 0;
};

class VisionDescriberClient {
public:
    virtual ~VisionDescriberClient() = default;
    virtual VisionDescription describe(std::span<const std::uint8_t> screenshot,
                                       std::optional<std::span<const std::uint8_t>> logo) = 0;
};

/// Fetches small binary resources (image-search thumbnails). nullopt on a
/// per-item failure; never throws for 404-style misses.
class ResourceFetcher {
public:
    virtual ~ResourceFetcher() = default;
    virtual std::optional<std::vector<std::uint8_t>> fetch(const std::string& url) = 0;
};

/// Follows HTTP redirects to the final URL (the optional checker step).
class RedirectResolver {
public:
    virtual ~RedirectResolver() = default;
    // Returns the final URL after redirects, or nullopt when unreachable.
    virtual std::optional<std::string> resolve(const std::string& url) = 0;
};

/// Live credentials, read from the environment only.
struct Credentials {
    std::string search_api_key;   // SEARCH_API_KEY
    std::string search_engine_id; // SEARCH_ENGINE_ID
    std::string vision_api_key;   // VISION_API_KEY
    std::string logo_api_key;     // LOGO_API_KEY

    static Credentials from_env();
    bool complete() const;
};

/// The full set of remote-tool clients for one run.
struct ToolClients {
    std::shared_ptr<WebSearchClient> web_search;
    std::shared_ptr<ImageSearchClient> image_search;
    std::shared_ptr<LogoDetectorClient> logo_detector;
    std::shared_ptr<VisionDescriberClient> vision;
    std::shared_ptr<ResourceFetcher> fetcher;
    std::shared_ptr<RedirectResolver> redirects;
};

// Builds clients for the given mode. Replay/record take a cassette; live
// requires complete credentials. Throws ConfigError on bad combinations.
ToolClients make_clients(RunMode mode, std::shared_ptr<Cassette> cassette,
                         const Credentials& creds = Credentials::from_env(),
                         RetryPolicy retry = {});

} // namespace gep
