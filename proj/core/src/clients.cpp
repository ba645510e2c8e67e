// SPDX-License-Identifier: Apache-2.0
#include "gep/clients.hpp"

#include <cstdlib>
#include <functional>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "gep/base64.hpp"
#include "gep/errors.hpp"
#include "gep/types.hpp"

namespace gep {

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    static const char* alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        std::uint32_t n = bytes[i] << 16 | bytes[i + 1] << 8 | bytes[i + 2];
        out.push_back(alphabet[n >> 18]);
        out.push_back(alphabet[(n >> 12) & 63]);
        out.push_back(alphabet[(n >> 6) & 63]);
        out.push_back(alphabet[n & 63]);
    }
    if (i + 1 == bytes.size()) {
        std::uint32_t n = bytes[i] << 16;
        out.push_back(alphabet[n >> 18]);
        out.push_back(alphabet[(n >> 12) & 63]);
        out.append("==");
    } else if (i + 2 == bytes.size()) {
        std::uint32_t n = bytes[i] << 16 | bytes[i + 1] << 8;
        out.push_back(alphabet[n >> 18]);
        out.push_back(alphabet[(n >> 12) & 63]);
        out.push_back(alphabet[(n >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

std::optional<std::vector<std::uint8_t>> base64_decode(std::string_view text) {
    auto value = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    std::vector<std::uint8_t> out;
    std::uint32_t buf = 0;
    int bits = 0;
    for (char c : text) {
        if (c == '=' || c == '\n' || c == '\r') continue;
        int v = value(c);
        if (v < 0) return std::nullopt;
        buf = buf << 6 | v;
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<std::uint8_t>(buf >> bits));
        }
    }
    return out;
}

RunMode parse_run_mode(std::string_view s) {
    if (s == "live") return RunMode::Live;
    if (s == "replay") return RunMode::Replay;
    if (s == "record") return RunMode::Record;
    throw ConfigError("unknown mode: " + std::string(s) + " (expected live|replay|record)");
}

std::string to_string(RunMode m) {
    switch (m) {
        case RunMode::Live: return "live";
        case RunMode::Replay: return "replay";
        case RunMode::Record: return "record";
    }
    return "?";
}

Credentials Credentials::from_env() {
    auto get = [](const char* name) {
        const char* v = std::getenv(name);
        return v ? std::string(v) : std::string{};
    };
    return {get("SEARCH_API_KEY"), get("SEARCH_ENGINE_ID"), get("VISION_API_KEY"),
            get("LOGO_API_KEY")};
}

bool Credentials::complete() const {
    return !search_api_key.empty() && !search_engine_id.empty();
}

namespace {

void check_query(const std::string& query, int count) {
    if (trim(query).empty()) throw Error("precondition: query must be non-empty");
    if (count < 1 || count > 10) throw Error("precondition: count must be in [1,10]");
}

void to_json(nlohmann::json& j, const SearchResult& r) {
    j = {{"title", r.title}, {"snippet", r.snippet}, {"link", r.link},
         {"display_link", r.display_link}, {"rank", r.rank}};
}

SearchResult search_result_from_json(const nlohmann::json& j) {
    return {j.value("title", ""), j.value("snippet", ""), j.value("link", ""),
            j.value("display_link", ""), j.value("rank", 0)};
}

void to_json(nlohmann::json& j, const ImageResult& r) {
    j = {{"thumbnail_link", r.thumbnail_link}, {"source_link", r.source_link},
         {"title", r.title}, {"snippet", r.snippet}, {"context_link", r.context_link},
         {"rank", r.rank}};
}

ImageResult image_result_from_json(const nlohmann::json& j) {
    return {j.value("thumbnail_link", ""), j.value("source_link", ""), j.value("title", ""),
            j.value("snippet", ""), j.value("context_link", ""), j.value("rank", 0)};
}

std::string describe_key(std::span<const std::uint8_t> screenshot,
                         std::optional<std::span<const std::uint8_t>> logo) {
    return content_hash(screenshot) + "+" + (logo ? content_hash(*logo) : std::string("-"));
}

// ---- replay --------------------------------------------------------------

[[noreturn]] void miss(const std::string& tool, const std::string& key) {
    throw CassetteMiss("cassette miss: tool=" + tool + " key=" + key);
}

class ReplayWebSearch final : public WebSearchClient {
public:
    explicit ReplayWebSearch(std::shared_ptr<Cassette> c) : cassette_(std::move(c)) {}
    std::vector<SearchResult> search(const std::string& query, int count) override {
        check_query(query, count);
        auto key = normalize_query(query);
        auto rec = cassette_->find("web_search", key);
        if (!rec) miss("web_search", key);
        std::vector<SearchResult> out;
        for (const auto& item : *rec) {
            if ((int)out.size() >= count) break;
            out.push_back(search_result_from_json(item));
        }
        return out;
    }

private:
    std::shared_ptr<Cassette> cassette_;
};

class ReplayImageSearch final : public ImageSearchClient {
public:
    explicit ReplayImageSearch(std::shared_ptr<Cassette> c) : cassette_(std::move(c)) {}
    std::vector<ImageResult> search(const std::string& query, int count) override {
        check_query(query, count);
        auto key = normalize_query(query);
        auto rec = cassette_->find("image_search", key);
        if (!rec) miss("image_search", key);
        std::vector<ImageResult> out;
        for (const auto& item : *rec) {
            if ((int)out.size() >= count) break;
            out.push_back(image_result_from_json(item));
        }
        return out;
    }

private:
    std::shared_ptr<Cassette> cassette_;
};

class ReplayLogoDetector final : public LogoDetectorClient {
public:
    explicit ReplayLogoDetector(std::shared_ptr<Cassette> c) : cassette_(std::move(c)) {}
    LogoDetection detect(std::span<const std::uint8_t> image) override {
        if (image.empty()) throw Error("precondition: image must be non-empty");
        auto key = content_hash(image);
        auto rec = cassette_->find("detect_logo", key);
        if (!rec) miss("detect_logo", key);
        LogoDetection d;
        if (rec->contains("brand_guess") && !(*rec)["brand_guess"].is_null()) {
            d.brand_guess = (*rec)["brand_guess"].get<std::string>();
            d.confidence = rec->value("confidence", 0.0);
        }
        return d;
    }

private:
    std::shared_ptr<Cassette> cassette_;
};

class ReplayVision final : public VisionDescriberClient {
public:
    explicit ReplayVision(std::shared_ptr<Cassette> c) : cassette_(std::move(c)) {}
    VisionDescription describe(std::span<const std::uint8_t> screenshot,
                               std::optional<std::span<const std::uint8_t>> logo) override {
        if (screenshot.empty()) throw Error("precondition: screenshot must be non-empty");
        auto key = describe_key(screenshot, logo);
        auto rec = cassette_->find("describe", key);
        if (!rec) miss("describe", key);
        return {rec->value("text", "")};
    }

private:
    std::shared_ptr<Cassette> cassette_;
};

class ReplayFetcher final : public ResourceFetcher {
public:
    explicit ReplayFetcher(std::shared_ptr<Cassette> c) : cassette_(std::move(c)) {}
    std::optional<std::vector<std::uint8_t>> fetch(const std::string& url) override {
        auto rec = cassette_->find("fetch", url);
        // a missing or failed fetch is a per-item failure, not a run failure
        if (!rec || !rec->contains("blob") || (*rec)["blob"].is_null()) return std::nullopt;
        return cassette_->load_blob((*rec)["blob"].get<std::string>());
    }

private:
    std::shared_ptr<Cassette> cassette_;
};

class ReplayRedirects final : public RedirectResolver {
public:
    explicit ReplayRedirects(std::shared_ptr<Cassette> c) : cassette_(std::move(c)) {}
    std::optional<std::string> resolve(const std::string& url) override {
        auto rec = cassette_->find("resolve_redirect", url);
        if (!rec) miss("resolve_redirect", url);
        if (!rec->contains("final_url") || (*rec)["final_url"].is_null()) return std::nullopt;
        return (*rec)["final_url"].get<std::string>();
    }

private:
    std::shared_ptr<Cassette> cassette_;
};

// ---- live ----------------------------------------------------------------

struct UrlParts {
    std::string origin; // scheme://host[:port]
    std::string path;   // /path?query
};

UrlParts split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error("not an absolute URL: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

// Runs fn with the configured retry budget; raises ToolUnavailable when
// every attempt fails.
template <typename F>
auto with_retries(const RetryPolicy& retry, const std::string& what, F&& fn) {
    auto backoff = retry.initial_backoff;
    for (int attempt = 0;; ++attempt) {
        try {
            return fn();
        } catch (const ToolUnavailable&) {
            if (attempt >= retry.retries) throw;
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
    }
}

httplib::Client make_http(const std::string& origin, const RetryPolicy& retry) {
    httplib::Client cli(origin);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(retry.timeout);
    cli.set_connection_timeout(secs.count());
    cli.set_read_timeout(secs.count());
    cli.set_follow_location(true);
    return cli;
}

nlohmann::json http_get_json(const std::string& origin, const std::string& path,
                             const RetryPolicy& retry) {
    return with_retries(retry, origin, [&] {
        auto cli = make_http(origin, retry);
        auto res = cli.Get(path);
        if (!res || res->status < 200 || res->status >= 300)
            throw ToolUnavailable("GET " + origin + " failed" +
                                  (res ? " with status " + std::to_string(res->status) : ""));
        return nlohmann::json::parse(res->body);
    });
}

nlohmann::json http_post_json(const std::string& origin, const std::string& path,
                              const nlohmann::json& body, const httplib::Headers& headers,
                              const RetryPolicy& retry) {
    return with_retries(retry, origin, [&] {
        auto cli = make_http(origin, retry);
        auto res = cli.Post(path, headers, body.dump(), "application/json");
        if (!res || res->status < 200 || res->status >= 300)
            throw ToolUnavailable("POST " + origin + " failed" +
                                  (res ? " with status " + std::to_string(res->status) : ""));
        return nlohmann::json::parse(res->body);
    });
}

std::string url_encode(const std::string& s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(c);
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 15]);
        }
    }
    return out;
}

class LiveWebSearch final : public WebSearchClient {
public:
    LiveWebSearch(Credentials creds, RetryPolicy retry, bool images)
        : creds_(std::move(creds)), retry_(retry), images_(images) {}

    std::vector<SearchResult> search(const std::string& query, int count) override {
        check_query(query, count);
        auto body = fetch_items(query, count);
        std::vector<SearchResult> out;
        int rank = 1;
        for (const auto& item : body) {
            out.push_back({item.value("title", ""), item.value("snippet", ""),
                           item.value("link", ""), item.value("displayLink", ""), rank++});
        }
        return out;
    }

    nlohmann::json fetch_items(const std::string& query, int count) {
        std::string path = "/customsearch/v1?key=" + url_encode(creds_.search_api_key) +
                           "&cx=" + url_encode(creds_.search_engine_id) +
                           "&q=" + url_encode(normalize_query(query)) +
                           "&num=" + std::to_string(count);
        if (images_) path += "&searchType=image";
        auto j = http_get_json("https://www.googleapis.com", path, retry_);
        return j.value("items", nlohmann::json::array());
    }

private:
    Credentials creds_;
    RetryPolicy retry_;
    bool images_;
};

class LiveImageSearch final : public ImageSearchClient {
public:
    LiveImageSearch(Credentials creds, RetryPolicy retry)
        : inner_(std::move(creds), retry, /*images=*/true) {}

    std::vector<ImageResult> search(const std::string& query, int count) override {
        check_query(query, count);
        auto items = inner_.fetch_items(query, count);
        std::vector<ImageResult> out;
        int rank = 1;
        for (const auto& item : items) {
            auto image = item.value("image", nlohmann::json::object());
            out.push_back({image.value("thumbnailLink", ""), item.value("link", ""),
                           item.value("title", ""), item.value("snippet", ""),
                           image.value("contextLink", ""), rank++});
        }
        return out;
    }

private:
    LiveWebSearch inner_;
};

class LiveLogoDetector final : public LogoDetectorClient {
public:
    LiveLogoDetector(std::string api_key, RetryPolicy retry)
        : api_key_(std::move(api_key)), retry_(retry) {}

    LogoDetection detect(std::span<const std::uint8_t> image) override {
        if (image.empty()) throw Error("precondition: image must be non-empty");
        nlohmann::json body = {
            {"requests",
             {{{"image", {{"content", base64_encode(image)}}},
               {"features", {{{"type", "LOGO_DETECTION"}, {"maxResults", 1}}}}}}}};
        auto j = http_post_json("https://vision.googleapis.com",
                                "/v1/images:annotate?key=" + url_encode(api_key_), body, {},
                                retry_);
        LogoDetection d;
        auto annotations = j["responses"][0].value("logoAnnotations", nlohmann::json::array());
        if (!annotations.empty()) {
            d.brand_guess = annotations[0].value("description", "");
            d.confidence = annotations[0].value("score", 0.0);
        }
        return d;
    }

private:
    std::string api_key_;
    RetryPolicy retry_;
};

class LiveVision final : public VisionDescriberClient {
public:
    LiveVision(std::string api_key, RetryPolicy retry)
        : api_key_(std::move(api_key)), retry_(retry) {}

    VisionDescription describe(std::span<const std::uint8_t> screenshot,
                               std::optional<std::span<const std::uint8_t>> logo) override {
        if (screenshot.empty()) throw Error("precondition: screenshot must be non-empty");
        nlohmann::json content = nlohmann::json::array();
        content.push_back(
            {{"type", "text"},
             {"text", "Describe the brand shown on this webpage screenshot (and logo, if "
                      "given). Read any visible text. Answer with the brand name and what "
                      "you see; say so if nothing identifiable is visible."}});
        content.push_back({{"type", "image_url"},
                           {"image_url",
                            {{"url", "data:image/png;base64," + base64_encode(screenshot)}}}});
        if (logo)
            content.push_back({{"type", "image_url"},
                               {"image_url",
                                {{"url", "data:image/png;base64," + base64_encode(*logo)}}}});
        nlohmann::json body = {
            {"model", "gpt-4-turbo"},
            {"temperature", 0},
            {"messages", {{{"role", "user"}, {"content", content}}}},
        };
        auto j = http_post_json("https://api.openai.com", "/v1/chat/completions", body,
                                {{"Authorization", "Bearer " + api_key_}}, retry_);
        return {j["choices"][0]["message"].value("content", "")};
    }

private:
    std::string api_key_;
    RetryPolicy retry_;
};

class LiveFetcher final : public ResourceFetcher {
public:
    explicit LiveFetcher(RetryPolicy retry) : retry_(retry) {}
    std::optional<std::vector<std::uint8_t>> fetch(const std::string& url) override {
        try {
            auto parts = split_url(url);
            auto cli = make_http(parts.origin, retry_);
            auto res = cli.Get(parts.path);
            if (!res || res->status != 200) return std::nullopt;
            return std::vector<std::uint8_t>(res->body.begin(), res->body.end());
        } catch (const Error&) {
            return std::nullopt;
        }
    }

private:
    RetryPolicy retry_;
};

class LiveRedirects final : public RedirectResolver {
public:
    explicit LiveRedirects(RetryPolicy retry) : retry_(retry) {}
    std::optional<std::string> resolve(const std::string& url) override {
        try {
            auto parts = split_url(url);
            auto cli = make_http(parts.origin, retry_);
            auto res = cli.Get(parts.path);
            if (!res) return std::nullopt;
            // httplib follows redirects; the final location is in the
            // response when a redirect chain was taken
            if (res->has_header("Location")) return res->get_header_value("Location");
            return url;
        } catch (const Error&) {
            return std::nullopt;
        }
    }

private:
    RetryPolicy retry_;
};

// ---- record wrappers -----------------------------------------------------

class RecordingWebSearch final : public WebSearchClient {
public:
    RecordingWebSearch(std::shared_ptr<WebSearchClient> live, std::shared_ptr<Cassette> c)
        : live_(std::move(live)), cassette_(std::move(c)) {}
    std::vector<SearchResult> search(const std::string& query, int count) override {
        auto results = live_->search(query, count);
        nlohmann::json rec = nlohmann::json::array();
        for (const auto& r : results) {
            nlohmann::json j;
            to_json(j, r);
            rec.push_back(std::move(j));
        }
        cassette_->record("web_search", normalize_query(query), rec);
        return results;
    }

private:
    std::shared_ptr<WebSearchClient> live_;
    std::shared_ptr<Cassette> cassette_;
};

class RecordingImageSearch final : public ImageSearchClient {
public:
    RecordingImageSearch(std::shared_ptr<ImageSearchClient> live, std::shared_ptr<Cassette> c)
        : live_(std::move(live)), cassette_(std::move(c)) {}
    std::vector<ImageResult> search(const std::string& query, int count) override {
        auto results = live_->search(query, count);
        nlohmann::json rec = nlohmann::json::array();
        for (const auto& r : results) {
            nlohmann::json j;
            to_json(j, r);
            rec.push_back(std::move(j));
        }
        cassette_->record("image_search", normalize_query(query), rec);
        return results;
    }

private:
    std::shared_ptr<ImageSearchClient> live_;
    std::shared_ptr<Cassette> cassette_;
};

class RecordingLogoDetector final : public LogoDetectorClient {
public:
    RecordingLogoDetector(std::shared_ptr<LogoDetectorClient> live, std::shared_ptr<Cassette> c)
        : live_(std::move(live)), cassette_(std::move(c)) {}
    LogoDetection detect(std::span<const std::uint8_t> image) override {
        auto d = live_->detect(image);
        nlohmann::json rec{{"brand_guess", d.brand_guess ? nlohmann::json(*d.brand_guess)
                                                         : nlohmann::json(nullptr)},
                           {"confidence", d.confidence}};
        cassette_->record("detect_logo", content_hash(image), rec);
        return d;
    }

private:
    std::shared_ptr<LogoDetectorClient> live_;
    std::shared_ptr<Cassette> cassette_;
};

class RecordingVision final : public VisionDescriberClient {
public:
    RecordingVision(std::shared_ptr<VisionDescriberClient> live, std::shared_ptr<Cassette> c)
        : live_(std::move(live)), cassette_(std::move(c)) {}
    VisionDescription describe(std::span<const std::uint8_t> screenshot,
                               std::optional<std::span<const std::uint8_t>> logo) override {
        auto d = live_->describe(screenshot, logo);
        cassette_->record("describe", describe_key(screenshot, logo), {{"text", d.text}});
        return d;
    }

private:
    std::shared_ptr<VisionDescriberClient> live_;
    std::shared_ptr<Cassette> cassette_;
};

class RecordingFetcher final : public ResourceFetcher {
public:
    RecordingFetcher(std::shared_ptr<ResourceFetcher> live, std::shared_ptr<Cassette> c)
        : live_(std::move(live)), cassette_(std::move(c)) {}
    std::optional<std::vector<std::uint8_t>> fetch(const std::string& url) override {
        auto bytes = live_->fetch(url);
        nlohmann::json rec;
        rec["blob"] = bytes ? nlohmann::json(cassette_->store_blob(*bytes)) : nlohmann::json(nullptr);
        cassette_->record("fetch", url, rec);
        return bytes;
    }

private:
    std::shared_ptr<ResourceFetcher> live_;
    std::shared_ptr<Cassette> cassette_;
};

class RecordingRedirects final : public RedirectResolver {
public:
    RecordingRedirects(std::shared_ptr<RedirectResolver> live, std::shared_ptr<Cassette> c)
        : live_(std::move(live)), cassette_(std::move(c)) {}
    std::optional<std::string> resolve(const std::string& url) override {
        auto final_url = live_->resolve(url);
        cassette_->record("resolve_redirect", url,
                          {{"final_url", final_url ? nlohmann::json(*final_url)
                                                   : nlohmann::json(nullptr)}});
        return final_url;
    }

private:
    std::shared_ptr<RedirectResolver> live_;
    std::shared_ptr<Cassette> cassette_;
};

ToolClients make_live_clients(const Credentials& creds, RetryPolicy retry) {
    if (!creds.complete())
        throw ConfigError("live mode requires SEARCH_API_KEY and SEARCH_ENGINE_ID");
    ToolClients t;
    t.web_search = std::make_shared<LiveWebSearch>(creds, retry, false);
    t.image_search = std::make_shared<LiveImageSearch>(creds, retry);
    t.logo_detector = std::make_shared<LiveLogoDetector>(creds.logo_api_key, retry);
    t.vision = std::make_shared<LiveVision>(creds.vision_api_key, retry);
    t.fetcher = std::make_shared<LiveFetcher>(retry);
    t.redirects = std::make_shared<LiveRedirects>(retry);
    return t;
}

} // namespace

ToolClients make_clients(RunMode mode, std::shared_ptr<Cassette> cassette,
                         const Credentials& creds, RetryPolicy retry) {
    switch (mode) {
        case RunMode::Live:
            return make_live_clients(creds, retry);
        case RunMode::Replay: {
            if (!cassette) throw ConfigError("replay mode requires a cassette");
            ToolClients t;
            t.web_search = std::make_shared<ReplayWebSearch>(cassette);
            t.image_search = std::make_shared<ReplayImageSearch>(cassette);
            t.logo_detector = std::make_shared<ReplayLogoDetector>(cassette);
            t.vision = std::make_shared<ReplayVision>(cassette);
            t.fetcher = std::make_shared<ReplayFetcher>(cassette);
            t.redirects = std::make_shared<ReplayRedirects>(cassette);
            return t;
        }
        case RunMode::Record: {
            if (!cassette) throw ConfigError("record mode requires a cassette");
            auto live = make_live_clients(creds, retry);
            ToolClients t;
            t.web_search = std::make_shared<RecordingWebSearch>(live.web_search, cassette);
            t.image_search = std::make_shared<RecordingImageSearch>(live.image_search, cassette);
            t.logo_detector =
                std::make_shared<RecordingLogoDetector>(live.logo_detector, cassette);
            t.vision = std::make_shared<RecordingVision>(live.vision, cassette);
            t.fetcher = std::make_shared<RecordingFetcher>(live.fetcher, cassette);
            t.redirects = std::make_shared<RecordingRedirects>(live.redirects, cassette);
            return t;
        }
    }
    throw ConfigError("unreachable mode");
}

} // namespace gep
