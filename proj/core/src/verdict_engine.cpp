// SPDX-License-Identifier: Apache-2.0
#include "gep/verdict_engine.hpp"

#include "gep/errors.hpp"

namespace gep {

CheckOutcome classify(const WebSample& sample, const BrandVerdict& verdict,
                      const CheckerConfig& cfg, WebSearchClient& search,
                      RedirectResolver* redirects, const PublicSuffixList& psl) {
    if (verdict.is_no_brand())
        return {Classification::from_basis(ClassBasis::NoBrandDefault), {}};

    // The raw brand name enclosed in quotes, no extra keywords.
    std::string query = "\"" + *verdict.brand_name() + "\"";
    std::vector<SearchResult> results;
    try {
        results = search.search(query, 10);
    } catch (const CassetteMiss&) {
        throw;
    } catch (const Error& e) {
        throw SearchUnavailable(std::string("domain-checker query failed: ") + e.what());
    }
    std::vector<std::string> display_links;
    display_links.reserve(results.size());
    for (const auto& r : results)
        display_links.push_back(r.display_link.empty() ? r.link : r.display_link);
    auto list = build_domain_list(display_links, cfg.list_size, psl);

    auto matches = [&](const std::string& url) {
        try {
            return list.contains(registrable_domain(url, psl));
        } catch (const Error&) {
            return false; // IP hosts and unparseable URLs never match
        }
    };

    if (matches(sample.url))
        return {Classification::from_basis(ClassBasis::DomainMatch), std::move(list)};

    if (cfg.redirection_check && redirects) {
        if (auto final_url = redirects->resolve(sample.url);
            final_url && matches(*final_url))
            return {Classification::from_basis(ClassBasis::DomainMatch), std::move(list)};
    }
    return {Classification::from_basis(ClassBasis::DomainMismatch), std::move(list)};
}

AgentResult one_shot_brand(const WebSample& sample, ModelGateway& gateway,
                           const AgentConfig& cfg, const ToolClients& clients) {
    Agent agent(clients, cfg);
    return agent.run_one_shot(sample, gateway);
}

} // namespace gep
