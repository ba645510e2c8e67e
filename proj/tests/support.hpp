// SPDX-License-Identifier: Apache-2.0
// Shared test helpers: stub tool clients, an HTML fuzzer, the frozen
// verdict-parsing corpus, and an independent public-suffix oracle.
#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gep/agent.hpp"
#include "gep/clients.hpp"
#include "gep/domain_tools.hpp"
#include "gep/errors.hpp"
#include "gep/types.hpp"

namespace geptest {

// ---- stub clients ----------------------------------------------------------

inline std::vector<gep::SearchResult> make_results(const std::vector<std::string>& hosts) {
    std::vector<gep::SearchResult> out;
    for (std::size_t i = 0; i < hosts.size(); ++i)
        out.push_back({hosts[i], hosts[i] + " site.", "https://www." + hosts[i] + "/",
                       hosts[i], static_cast<int>(i) + 1});
    return out;
}

struct StubWebSearch final : gep::WebSearchClient {
    std::map<std::string, std::vector<gep::SearchResult>> canned;
    mutable int calls = 0;
    std::vector<gep::SearchResult> search(const std::string& query, int count) override {
        ++calls;
        auto it = canned.find(query);
        if (it == canned.end()) return {};
        auto out = it->second;
        if (out.size() > static_cast<std::size_t>(count)) out.resize(count);
        return out;
    }
};

struct StubImageSearch final : gep::ImageSearchClient {
    std::map<std::string, std::vector<gep::ImageResult>> canned;
    int calls = 0;
    std::vector<gep::ImageResult> search(const std::string& query, int count) override {
        ++calls;
        auto it = canned.find(query);
        if (it == canned.end()) return {};
        auto out = it->second;
        if (out.size() > static_cast<std::size_t>(count)) out.resize(count);
        return out;
    }
};

struct StubLogoDetector final : gep::LogoDetectorClient {
    gep::LogoDetection result;
    gep::LogoDetection detect(std::span<const std::uint8_t>) override { return result; }
};

struct StubVision final : gep::VisionDescriberClient {
    gep::VisionDescription result;
    gep::VisionDescription describe(std::span<const std::uint8_t>,
                                    std::optional<std::span<const std::uint8_t>>) override {
        return result;
    }
};

struct StubFetcher final : gep::ResourceFetcher {
    std::map<std::string, std::optional<std::vector<std::uint8_t>>> canned;
    std::atomic<int> calls{0}; // fetches may run concurrently
    std::optional<std::vector<std::uint8_t>> fetch(const std::string& url) override {
        ++calls;
        auto it = canned.find(url);
        if (it == canned.end()) return std::nullopt;
        return it->second;
    }
};

struct StubRedirects final : gep::RedirectResolver {
    std::map<std::string, std::string> canned;
    int calls = 0;
    std::optional<std::string> resolve(const std::string& url) override {
        ++calls;
        auto it = canned.find(url);
        if (it == canned.end()) return std::nullopt;
        return it->second;
    }
};

inline gep::ToolClients stub_clients(std::shared_ptr<StubWebSearch> web = {},
                                     std::shared_ptr<StubImageSearch> img = {}) {
    gep::ToolClients c;
    c.web_search = web ? web : std::make_shared<StubWebSearch>();
    c.image_search = img ? img : std::make_shared<StubImageSearch>();
    c.logo_detector = std::make_shared<StubLogoDetector>();
    c.vision = std::make_shared<StubVision>();
    c.fetcher = std::make_shared<StubFetcher>();
    c.redirects = std::make_shared<StubRedirects>();
    return c;
}

// ---- HTML fuzzer -----------------------------------------------------------

inline std::string random_html(std::mt19937& rng) {
    static const char* words[] = {"login", "bank", "secure", "account", "verify", "pay",
                                  "portal", "welcome", "brand", "nike", "update", "id"};
    static const char* entities[] = {"&amp;", "&lt;", "&gt;", "&quot;", "&#65;", "&nbsp;"};
    auto pick = [&](auto& arr) { return arr[rng() % (sizeof(arr) / sizeof(arr[0]))]; };
    std::string word;

    std::string html;
    int pieces = 1 + rng() % 120;
    for (int i = 0; i < pieces; ++i) {
        switch (rng() % 12) {
            case 0: html += "<title>"; html += pick(words); html += "</title>"; break;
            case 1: html += "<p>"; html += pick(words); html += " "; html += pick(words);
                    html += "</p>"; break;
            case 2: html += "<button>"; html += pick(words); html += "</button>"; break;
            case 3: html += "<input type=\"text\" name=\""; html += pick(words);
                    html += "\" placeholder=\""; html += pick(words); html += "\">"; break;
            case 4: html += "<script>var x = '<div>evil</div>';</script>"; break;
            case 5: html += "<style>.a { color: red; }</style>"; break;
            case 6: html += "<!-- "; html += pick(words); html += " -->"; break;
            case 7: html += pick(entities); break;
            case 8: html += pick(words); html += " "; break;
            case 9: html += "<di"; break; // truncated tag
            case 10: html += "<div class=\"x\"><span>"; html += pick(words);
                     html += "</span></div>"; break;
            case 11:
                // raw noise bytes
                for (int k = 0; k < 8; ++k) html += static_cast<char>(32 + rng() % 95);
                break;
        }
    }
    return html;
}

// ---- verdict-parsing corpus (30 cases, frozen) -------------------------------

struct VerdictCase {
    std::string input;
    enum { Named, NoBrand, Malformed } expect;
    std::string name; // for Named
};

inline std::vector<VerdictCase> verdict_cases() {
    using V = VerdictCase;
    return {
        {R"({"brand_name":"AT&T","reason":"logo matches"})", V::Named, "AT&T"},
        {"```json\n{\"brand_name\":\"Nike\",\"reason\":\"swoosh logo\"}\n```", V::Named, "Nike"},
        {"```\n{\"brand_name\":\"PayPal\",\"reason\":\"login form\"}\n```", V::Named, "PayPal"},
        {"  \n {\"brand_name\":\"GitHub\",\"reason\":\"octocat\"} \n ", V::Named, "GitHub"},
        {R"({"brand_name":"  PayPal  ","reason":"padded name"})", V::Named, "PayPal"},
        {R"({"brand_name":"Apple","reason":"apple id","confidence":0.9})", V::Named, "Apple"},
        {R"({"brand_name":"Crédit Agricole","reason":"french bank"})", V::Named,
         "Cr\xc3\xa9"
         "dit Agricole"},
        {R"({"reason":"title and favicon both match","brand_name":"Amazon"})", V::Named,
         "Amazon"},
        {R"({"brand_name":"Bank of America","reason":"text says \"Bank of America\""})",
         V::Named, "Bank of America"},
        {R"({"brand_name":"Bitkub","reason":"exchange wallet login"})", V::Named, "Bitkub"},
        {R"({"brand_name":"no brand found","reason":"nothing identifiable"})", V::NoBrand, ""},
        {R"({"brand_name":"no brand name","reason":"insufficient info"})", V::NoBrand, ""},
        {R"({"brand_name":"No Brand Found","reason":"case variant"})", V::NoBrand, ""},
        {R"({"brand_name":"NO BRAND NAME","reason":"upper case variant"})", V::NoBrand, ""},
        {R"({"brand_name":"  no brand found  ","reason":"padded sentinel"})", V::NoBrand, ""},
        {"```json\n{\"brand_name\":\"no brand name\",\"reason\":\"blank page\"}\n```",
         V::NoBrand, ""},
        {"", V::Malformed, ""},
        {"The brand is Nike.", V::Malformed, ""},
        {R"({"brand":"Nike"})", V::Malformed, ""},
        {R"({"brand_name":"Nike"})", V::Malformed, ""},
        {R"({"reason":"missing the brand key"})", V::Malformed, ""},
        {R"({"brand_name":123,"reason":"numeric brand"})", V::Malformed, ""},
        {R"({"brand_name":"Nike","reason":42})", V::Malformed, ""},
        {R"({"brand_name":null,"reason":"null brand"})", V::Malformed, ""},
        {R"(["brand_name","Nike"])", V::Malformed, ""},
        {R"({"brand_name":"Nike","reason":"truncated)", V::Malformed, ""},
        {R"({"brand_name":"","reason":"empty brand"})", V::Malformed, ""},
        {R"({"brand_name":"Nike","reason":""})", V::Malformed, ""},
        {"```json\n{\"brand_name\": 1}\n```", V::Malformed, ""},
        {"null", V::Malformed, ""},
    };
}

// ---- independent public-suffix oracle ----------------------------------------
//
// Parses the same snapshot file but matches rules label-by-label over the full
// rule list (no tail-lookup sets), mirroring the publicsuffix.org algorithm.

struct PslOracle {
    struct Rule {
        std::vector<std::string> labels; // reversed: TLD first
        bool exception = false;
    };
    std::vector<Rule> rules;

    static std::vector<std::string> rev_labels(const std::string& name) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : name) {
            if (c == '.') { out.push_back(cur); cur.clear(); }
            else cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
        out.push_back(cur);
        std::reverse(out.begin(), out.end());
        return out;
    }

    static PslOracle from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open PSL snapshot: " + path);
        PslOracle o;
        std::string line;
        while (std::getline(in, line)) {
            auto t = gep::trim(line);
            if (t.empty() || t.rfind("//", 0) == 0) continue;
            Rule r;
            if (t[0] == '!') { r.exception = true; t = t.substr(1); }
            r.labels = rev_labels(t);
            o.rules.push_back(std::move(r));
        }
        return o;
    }

    // Number of labels in the public suffix of host (0 = no rule matched).
    int suffix_label_count(const std::vector<std::string>& host_rev) const {
        int best = 0;
        for (const auto& r : rules) {
            if (r.labels.size() > host_rev.size()) continue;
            bool match = true;
            for (std::size_t i = 0; i < r.labels.size(); ++i)
                if (r.labels[i] != "*" && r.labels[i] != host_rev[i]) { match = false; break; }
            if (!match) continue;
            if (r.exception) return static_cast<int>(r.labels.size()) - 1;
            best = std::max(best, static_cast<int>(r.labels.size()));
        }
        return best;
    }

    // Registrable domain as "sld.suffix", or "" when the host has none.
    // Mirrors the implementation's documented normalization: lowercase, strip
    // trailing dots and one leading "www.".
    std::string registrable(std::string host) const {
        for (auto& c : host) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        while (!host.empty() && host.back() == '.') host.pop_back();
        if (host.rfind("www.", 0) == 0) host = host.substr(4);
        auto rev = rev_labels(host);
        if (rev.size() < 2) return "";
        int n = suffix_label_count(rev);
        if (n == 0) n = 1; // fallback: last label
        if (static_cast<int>(rev.size()) <= n) return ""; // host is itself a suffix
        std::string out;
        for (int i = n; i >= 0; --i) {
            out += rev[i];
            if (i > 0) out += ".";
        }
        return out;
    }
};

// Frozen 50-URL table: URL -> expected registrable domain "sld.suffix",
// "IpHost" or "InvalidUrl". Values fixed at authoring time from the PSL
// matching algorithm over the bundled snapshot.
struct UrlCase {
    std::string url;
    std::string expect;
};

inline std::vector<UrlCase> url_table() {
    return {
        {"https://accounts.google.com/signin", "google.com"},
        {"https://www.example.co.uk", "example.co.uk"},
        {"http://192.168.0.1/login", "IpHost"},
        {"https://nike.com", "nike.com"},
        {"http://shop.nike.com/us/en", "nike.com"},
        {"https://about.att.com/", "att.com"},
        {"https://www.att.com:443/my", "att.com"},
        {"HTTPS://WWW.PAYPAL.COM/signin", "paypal.com"},
        {"https://paypa1-secure-login.xyz/verify", "paypa1-secure-login.xyz"},
        {"https://login.micros0ft-online.icu/common", "micros0ft-online.icu"},
        {"https://foo.github.io/page", "foo.github.io"},
        {"https://bar.foo.github.io/x", "foo.github.io"},
        {"https://githubusercontent.com/", "InvalidUrl"},
        {"https://raw.githubusercontent.com/a/b", "raw.githubusercontent.com"},
        {"https://myshop.myshopify.com", "myshop.myshopify.com"},
        {"https://sub.domain.example.com.br", "example.com.br"},
        {"https://www.example.com.br", "example.com.br"},
        {"https://example.br", "example.br"},
        {"https://a.b.ck/", "a.b.ck"},
        {"https://example.ck/", "InvalidUrl"},
        {"https://foo.www.ck/", "www.ck"},
        {"https://www.ck/", "InvalidUrl"},
        {"https://x.mm", "InvalidUrl"},
        {"https://site.x.mm", "site.x.mm"},
        {"https://example.np", "InvalidUrl"},
        {"https://b.gov.np", "b.gov.np"},
        {"http://[2001:db8::1]/", "IpHost"},
        {"http://10.0.0.1:8080/admin", "IpHost"},
        {"https://secure-bankofamerica.verify-id.net/auth", "verify-id.net"},
        {"https://en.wikipedia.org/wiki/Main_Page", "wikipedia.org"},
        {"https://www.amazon.co.uk", "amazon.co.uk"},
        {"https://www.amazon.com.au", "amazon.com.au"},
        {"https://seller.amazon.com.au", "amazon.com.au"},
        {"https://example.co", "example.co"},
        {"https://example.com.co", "example.com.co"},
        {"https://www.gov.uk", "InvalidUrl"},
        {"https://service.gov.uk", "service.gov.uk"},
        {"https://blogspot.com", "InvalidUrl"},
        {"https://myblog.blogspot.com", "myblog.blogspot.com"},
        {"https://deep.sub.myblog.blogspot.com", "myblog.blogspot.com"},
        {"https://localhost/", "InvalidUrl"},
        {"https://intranet.localnet/", "intranet.localnet"},
        {"https://a.b.c.d.e.example.com", "example.com"},
        {"https://xn--nxasmq6b.com", "xn--nxasmq6b.com"},
        {"https://example.com./path", "example.com"},
        {"https://upload.wikimedia.org/x.png", "wikimedia.org"},
        {"http://att-verify.account-helper.top/login", "account-helper.top"},
        {"https://bitkub-login.site/wallet", "bitkub-login.site"},
        {"https://www.globexbank.com/retail", "globexbank.com"},
        {"https://app.workers.dev", "app.workers.dev"},
    };
}

} // namespace geptest
