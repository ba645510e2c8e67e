// SPDX-License-Identifier: Apache-2.0
#include "gep/types.hpp"

#include <algorithm>
#include <cctype>

#include "gep/errors.hpp"

namespace gep {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string collapse_spaces(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_space = false;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            in_space = true;
        } else {
            if (in_space && !out.empty()) out.push_back(' ');
            in_space = false;
            out.push_back(c);
        }
    }
    return out;
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

} // namespace

std::string url_host(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos || scheme_end == 0)
        throw InvalidUrl("not an absolute URL: " + url);
    for (std::size_t i = 0; i < scheme_end; ++i) {
        unsigned char c = url[i];
        if (!std::isalnum(c) && c != '+' && c != '-' && c != '.')
            throw InvalidUrl("bad scheme: " + url);
    }
    auto rest = url.substr(scheme_end + 3);
    auto end = rest.find_first_of("/?#");
    auto authority = rest.substr(0, end);
    // strip userinfo
    if (auto at = authority.rfind('@'); at != std::string::npos)
        authority = authority.substr(at + 1);
    // strip port (but keep IPv6 brackets intact)
    if (!authority.empty() && authority.front() == '[') {
        auto close = authority.find(']');
        if (close == std::string::npos) throw InvalidUrl("unterminated IPv6 host: " + url);
        authority = authority.substr(0, close + 1);
    } else if (auto colon = authority.find(':'); colon != std::string::npos) {
        authority = authority.substr(0, colon);
    }
    if (authority.empty()) throw InvalidUrl("URL has no host: " + url);
    if (authority.find(' ') != std::string::npos)
        throw InvalidUrl("host contains spaces: " + url);
    return lower(authority);
}

WebSample validate_sample(RawSample raw) {
    if (trim(raw.id).empty()) throw EmptyId("sample id is empty");
    url_host(raw.url); // throws InvalidUrl
    return WebSample{
        std::move(raw.id), std::move(raw.url),  std::move(raw.html),
        std::move(raw.screenshot), std::move(raw.logo_crop), std::move(raw.label),
    };
}

BrandVerdict BrandVerdict::named(std::string name, std::string reason, int rounds) {
    auto trimmed = trim(name);
    if (trimmed.empty()) throw Error("named verdict requires a non-empty brand");
    return BrandVerdict{Named{std::move(trimmed)}, std::move(reason), rounds};
}

BrandVerdict BrandVerdict::no_brand(std::string reason, int rounds) {
    return BrandVerdict{NoBrand{}, std::move(reason), rounds};
}

Classification Classification::from_basis(ClassBasis basis) {
    switch (basis) {
        case ClassBasis::DomainMatch:
        case ClassBasis::NoBrandDefault:
            return {ClassValue::Benign, basis};
        case ClassBasis::DomainMismatch:
            return {ClassValue::Phishing, basis};
    }
    throw Error("unreachable basis");
}

std::string to_string(Label l) { return l == Label::Phish ? "phish" : "benign"; }
std::string to_string(ClassValue v) { return v == ClassValue::Phishing ? "phishing" : "benign"; }

std::string to_string(ClassBasis b) {
    switch (b) {
        case ClassBasis::DomainMatch: return "domain_match";
        case ClassBasis::NoBrandDefault: return "no_brand_default";
        case ClassBasis::DomainMismatch: return "domain_mismatch";
    }
    return "?";
}

namespace {

Label label_from_string(const std::string& s) {
    auto v = lower(trim(s));
    if (v == "phish" || v == "phishing") return Label::Phish;
    if (v == "benign") return Label::Benign;
    throw Error("unknown label: " + s);
}

ClassBasis basis_from_string(const std::string& s) {
    if (s == "domain_match") return ClassBasis::DomainMatch;
    if (s == "no_brand_default") return ClassBasis::NoBrandDefault;
    if (s == "domain_mismatch") return ClassBasis::DomainMismatch;
    throw Error("unknown basis: " + s);
}

} // namespace

void to_json(nlohmann::json& j, const GroundTruth& g) {
    j = nlohmann::json{{"label", to_string(g.label)}};
    if (!g.true_brands.empty()) j["true_brand"] = g.true_brands;
}

void from_json(const nlohmann::json& j, GroundTruth& g) {
    g.label = label_from_string(j.at("label").get<std::string>());
    g.true_brands.clear();
    if (j.contains("true_brand")) {
        const auto& tb = j["true_brand"];
        if (tb.is_string()) {
            g.true_brands.push_back(tb.get<std::string>());
        } else {
            for (const auto& b : tb) g.true_brands.push_back(b.get<std::string>());
        }
    }
}

void to_json(nlohmann::json& j, const WebSample& s) {
    j = nlohmann::json{{"id", s.id}, {"url", s.url}, {"html", s.html}};
    if (s.screenshot) j["screenshot"] = *s.screenshot;
    if (s.logo_crop) j["logo_crop"] = *s.logo_crop;
    if (s.label) j["label"] = *s.label;
}

void from_json(const nlohmann::json& j, WebSample& s) {
    s.id = j.at("id").get<std::string>();
    s.url = j.at("url").get<std::string>();
    s.html = j.value("html", std::string{});
    s.screenshot.reset();
    s.logo_crop.reset();
    s.label.reset();
    if (j.contains("screenshot")) s.screenshot = j["screenshot"].get<std::vector<std::uint8_t>>();
    if (j.contains("logo_crop")) s.logo_crop = j["logo_crop"].get<std::vector<std::uint8_t>>();
    if (j.contains("label")) s.label = j["label"].get<GroundTruth>();
}

void to_json(nlohmann::json& j, const BrandVerdict& v) {
    j = nlohmann::json{{"reason", v.reason}, {"rounds_used", v.rounds_used}};
    if (auto* name = v.brand_name())
        j["brand"] = *name;
    else
        j["brand"] = nullptr;
}

void from_json(const nlohmann::json& j, BrandVerdict& v) {
    v.reason = j.at("reason").get<std::string>();
    v.rounds_used = j.at("rounds_used").get<int>();
    const auto& b = j.at("brand");
    if (b.is_null())
        v.brand = BrandVerdict::NoBrand{};
    else
        v.brand = BrandVerdict::Named{b.get<std::string>()};
}

void to_json(nlohmann::json& j, const Classification& c) {
    j = nlohmann::json{{"value", to_string(c.value)}, {"basis", to_string(c.basis)}};
}

void from_json(const nlohmann::json& j, Classification& c) {
    c = Classification::from_basis(basis_from_string(j.at("basis").get<std::string>()));
    // value is derived; reject inconsistent payloads
    if (to_string(c.value) != j.at("value").get<std::string>())
        throw Error("classification value inconsistent with basis");
}

void to_json(nlohmann::json& j, const ConfusionCounts& c) {
    j = nlohmann::json{{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

void from_json(const nlohmann::json& j, ConfusionCounts& c) {
    c.tp = j.at("tp").get<std::uint64_t>();
    c.fp = j.at("fp").get<std::uint64_t>();
    c.tn = j.at("tn").get<std::uint64_t>();
    c.fn = j.at("fn").get<std::uint64_t>();
}

} // namespace gep
