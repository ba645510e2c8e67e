// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace gep {

/// Ground-truth class for a labeled sample.
enum class Label { Phish, Benign };

struct GroundTruth {
    Label label;
    // Accepted brand names for this sample; empty when unknown.
    std::vector<std::string> true_brands;

    bool operator==(const GroundTruth&) const = default;
};

/// One unit of work: a pre-captured webpage.
struct WebSample {
    std::string id;
    std::string url;
    std::string html;
    std::optional<std::vector<std::uint8_t>> screenshot;
    std::optional<std::vector<std::uint8_t>> logo_crop;
    std::optional<GroundTruth> label;

    bool operator==(const WebSample&) const = default;
};

/// Raw, not-yet-validated sample record as read from disk or a request body.
struct RawSample {
    std::string id;
    std::string url;
    std::string html;
    std::optional<std::vector<std::uint8_t>> screenshot;
    std::optional<std::vector<std::uint8_t>> logo_crop;
    std::optional<GroundTruth> label;
};

// Validates id and URL (absolute, with a host); passes binary fields through.
// Throws EmptyId or InvalidUrl.
WebSample validate_sample(RawSample raw);

// Host component of an absolute URL, lowercased, port stripped.
// Throws InvalidUrl.
std::string url_host(const std::string& url);

/// Agent conclusion: an identified brand or an explicit no-brand answer.
struct BrandVerdict {
    struct Named {
        std::string name; // trimmed, non-empty
        bool operator==(const Named&) const = default;
    };
    struct NoBrand {
        bool operator==(const NoBrand&) const = default;
    };

    std::variant<Named, NoBrand> brand;
    std::string reason;
    int rounds_used = 0;

    bool is_no_brand() const { return std::holds_alternative<NoBrand>(brand); }
    const std::string* brand_name() const {
        auto* n = std::get_if<Named>(&brand);
        return n ? &n->name : nullptr;
    }

    static BrandVerdict named(std::string name, std::string reason, int rounds = 0);
    static BrandVerdict no_brand(std::string reason, int rounds = 0);

    bool operator==(const BrandVerdict&) const = default;
};

enum class ClassValue { Phishing, Benign };
enum class ClassBasis { DomainMatch, NoBrandDefault, DomainMismatch };

/// Final phishing/benign decision. The basis determines the value.
struct Classification {
    ClassValue value;
    ClassBasis basis;

    // The only constructor path: value is derived from basis.
    static Classification from_basis(ClassBasis basis);

    bool operator==(const Classification&) const = default;
};

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const { return tp + fp + tn + fn; }
    bool operator==(const ConfusionCounts&) const = default;
};

// JSON serialization (nlohmann ADL hooks).
void to_json(nlohmann::json& j, const GroundTruth& g);
void from_json(const nlohmann::json& j, GroundTruth& g);
void to_json(nlohmann::json& j, const WebSample& s);
void from_json(const nlohmann::json& j, WebSample& s);
void to_json(nlohmann::json& j, const BrandVerdict& v);
void from_json(const nlohmann::json& j, BrandVerdict& v);
void to_json(nlohmann::json& j, const Classification& c);
void from_json(const nlohmann::json& j, Classification& c);
void to_json(nlohmann::json& j, const ConfusionCounts& c);
void from_json(const nlohmann::json& j, ConfusionCounts& c);

std::string to_string(Label l);
std::string to_string(ClassValue v);
std::string to_string(ClassBasis b);

// Whitespace helpers shared across modules.
std::string trim(std::string_view s);
std::string collapse_spaces(std::string_view s);

} // namespace gep
