// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace gep {

/// eTLD+1: the public suffix plus one label. The unit of domain ownership.
struct RegistrableDomain {
    std::string sld;    // single lowercase label, no dots
    std::string suffix; // lowercase public suffix, may contain dots
    bool suffix_known = true; // false when the suffix fell back to the last label

    std::string str() const { return sld + "." + suffix; }
    bool operator==(const RegistrableDomain& o) const {
        return sld == o.sld && suffix == o.suffix;
    }
};

/// Rank-ordered, deduplicated list of registrable domains from search results.
struct DomainList {
    std::vector<RegistrableDomain> entries;

    bool contains(const RegistrableDomain& d) const;
};

/// Immutable public-suffix snapshot (publicsuffix.org text format:
/// one rule per line, "//" comments, "*." wildcards, "!" exceptions).
class PublicSuffixList {
public:
    static PublicSuffixList from_text(std::string_view text);
    static PublicSuffixList from_file(const std::string& path);
    // The snapshot compiled into the library.
    static const PublicSuffixList& bundled();

    // Longest matching public suffix for a lowercase host, per the PSL
    // algorithm. Empty when no rule matches.
    std::string match_suffix(std::string_view host) const;

    bool contains_rule(std::string_view suffix) const { return rules_.count(std::string(suffix)) > 0; }
    std::size_t rule_count() const { return rules_.size() + wildcards_.size(); }

private:
    std::unordered_set<std::string> rules_;
    std::unordered_set<std::string> wildcards_;  // "ck" for "*.ck"
    std::unordered_set<std::string> exceptions_; // "www.ck" for "!www.ck"
};

// Extracts the registrable domain of an absolute URL: strips scheme, port,
// path and a leading "www.", lowercases, splits into sld + longest matching
// suffix. Throws IpHost for IP-literal hosts and InvalidUrl when the host has
// no registrable form (e.g. the host is itself a public suffix). A host with
// no matching suffix rule falls back to its last label, flagged suffix_known=false.
RegistrableDomain registrable_domain(const std::string& url,
                                     const PublicSuffixList& psl = PublicSuffixList::bundled());

// Top-level and second-level matching: equality of (sld, suffix).
bool domains_match(const RegistrableDomain& a, const RegistrableDomain& b);

// Maps display links through registrable_domain, skipping IP/unparseable
// entries, deduplicating in rank order, truncating to limit.
DomainList build_domain_list(const std::vector<std::string>& display_links, std::size_t limit,
                             const PublicSuffixList& psl = PublicSuffixList::bundled());

bool host_is_ip_literal(std::string_view host);

} // namespace gep
