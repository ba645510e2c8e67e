// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>

#include "gep/agent.hpp"
#include "gep/clients.hpp"
#include "gep/domain_tools.hpp"
#include "gep/types.hpp"

namespace gep {

/// Domain-checker configuration. Defaults are the final configuration:
/// 10 domains in the list, no redirection check.
struct CheckerConfig {
    std::size_t list_size = 10; // one of {1, 5, 10}
    bool redirection_check = false;
};

struct CheckOutcome {
    Classification classification;
    DomainList domains_checked; // empty for NoBrand verdicts
};

// The domain checker: NoBrand -> Benign; otherwise search the quoted brand
// name, build a domain list from display links, and compare against the
// sample's registrable domain. With redirection_check, a mismatch triggers
// one redirect-following request and a re-test of the final URL.
// Throws SearchUnavailable when the checker query fails.
CheckOutcome classify(const WebSample& sample, const BrandVerdict& verdict,
                      const CheckerConfig& cfg, WebSearchClient& search,
                      RedirectResolver* redirects = nullptr,
                      const PublicSuffixList& psl = PublicSuffixList::bundled());

// NLP one-shot baseline: single prompt over condensed HTML, no tools.
AgentResult one_shot_brand(const WebSample& sample, ModelGateway& gateway,
                           const AgentConfig& cfg = {}, const ToolClients& clients = {});

} // namespace gep
