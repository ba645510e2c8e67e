// SPDX-License-Identifier: Apache-2.0
#include "gep/domain_tools.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "gep/errors.hpp"
#include "gep/types.hpp"

namespace gep {

namespace detail {
std::string_view bundled_public_suffix_data(); // psl_data.cpp (generated)
}

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::vector<std::string_view> split_labels(std::string_view host) {
    std::vector<std::string_view> labels;
    std::size_t start = 0;
    while (start <= host.size()) {
        auto dot = host.find('.', start);
        if (dot == std::string_view::npos) {
            labels.push_back(host.substr(start));
            break;
        }
        labels.push_back(host.substr(start, dot - start));
        start = dot + 1;
    }
    return labels;
}

} // namespace

bool host_is_ip_literal(std::string_view host) {
    if (!host.empty() && host.front() == '[') return true; // IPv6
    if (host.find(':') != std::string_view::npos) return true;
    auto labels = split_labels(host);
    if (labels.size() != 4) return false;
    for (auto l : labels) {
        if (l.empty() || l.size() > 3) return false;
        for (char c : l)
            if (!std::isdigit((unsigned char)c)) return false;
        if (std::stoi(std::string(l)) > 255) return false;
    }
    return true;
}

PublicSuffixList PublicSuffixList::from_text(std::string_view text) {
    PublicSuffixList psl;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        auto line_view = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        auto line = trim(line_view);
        if (line.empty() || line.rfind("//", 0) == 0) continue;
        line = lower(line);
        if (line[0] == '!') {
            psl.exceptions_.insert(line.substr(1));
        } else if (line.rfind("*.", 0) == 0) {
            psl.wildcards_.insert(line.substr(2));
        } else {
            psl.rules_.insert(line);
        }
    }
    return psl;
}

PublicSuffixList PublicSuffixList::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open public-suffix snapshot: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

const PublicSuffixList& PublicSuffixList::bundled() {
    static const PublicSuffixList psl = from_text(detail::bundled_public_suffix_data());
    return psl;
}

std::string PublicSuffixList::match_suffix(std::string_view host) const {
    // PSL algorithm: exceptions beat wildcards; otherwise the longest
    // matching rule wins. Candidate suffixes are the label tails of host.
    std::string_view tail = host;
    std::string best;
    while (true) {
        std::string candidate(tail);
        if (exceptions_.count(candidate)) {
            // exception rule: the suffix is the candidate minus its first label
            auto dot = candidate.find('.');
            return dot == std::string::npos ? std::string{} : candidate.substr(dot + 1);
        }
        if (rules_.count(candidate) && candidate.size() > best.size()) best = candidate;
        // wildcard "*.x" matches "anything.x"
        if (auto dot = candidate.find('.'); dot != std::string::npos) {
            auto parent = candidate.substr(dot + 1);
            if (wildcards_.count(parent) && candidate.size() > best.size()) best = candidate;
        }
        auto dot = tail.find('.');
        if (dot == std::string_view::npos) break;
        tail = tail.substr(dot + 1);
    }
    return best;
}

RegistrableDomain registrable_domain(const std::string& url, const PublicSuffixList& psl) {
    auto host = url_host(url); // throws InvalidUrl
    if (host_is_ip_literal(host)) throw IpHost("IP-literal host: " + host);
    while (!host.empty() && host.back() == '.') host.pop_back();
    if (host.rfind("www.", 0) == 0) host = host.substr(4);
    if (host.empty() || host.find('.') == std::string::npos)
        throw InvalidUrl("host has no registrable form: " + url);

    RegistrableDomain rd;
    auto suffix = psl.match_suffix(host);
    if (suffix.empty()) {
        // no rule matched: fall back to the last label, flagged
        suffix = host.substr(host.rfind('.') + 1);
        rd.suffix_known = false;
    }
    if (suffix.size() >= host.size())
        throw InvalidUrl("host is itself a public suffix: " + host);
    auto rest = host.substr(0, host.size() - suffix.size() - 1);
    auto last_dot = rest.rfind('.');
    rd.sld = last_dot == std::string::npos ? rest : rest.substr(last_dot + 1);
    rd.suffix = std::move(suffix);
    if (rd.sld.empty()) throw InvalidUrl("empty second-level label: " + url);
    return rd;
}

bool domains_match(const RegistrableDomain& a, const RegistrableDomain& b) {
    return a.sld == b.sld && a.suffix == b.suffix;
}

bool DomainList::contains(const RegistrableDomain& d) const {
    return std::any_of(entries.begin(), entries.end(),
                       [&](const RegistrableDomain& e) { return domains_match(e, d); });
}

DomainList build_domain_list(const std::vector<std::string>& display_links, std::size_t limit,
                             const PublicSuffixList& psl) {
    DomainList list;
    for (const auto& link : display_links) {
        if (list.entries.size() >= limit) break;
        // display links sometimes arrive as bare hosts
        auto url = link.find("://") == std::string::npos ? "https://" + link : link;
        RegistrableDomain rd;
        try {
            rd = registrable_domain(url, psl);
        } catch (const Error&) {
            continue; // IP hosts and unparseable entries are skipped
        }
        if (!list.contains(rd)) list.entries.push_back(std::move(rd));
    }
    return list;
}

} // namespace gep
