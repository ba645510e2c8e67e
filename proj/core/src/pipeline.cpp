// SPDX-License-Identifier: Apache-2.0
#include "gep/pipeline.hpp"

#include <filesystem>

#include "gep/errors.hpp"

namespace fs = std::filesystem;

namespace gep {

void RunConfig::validate() const {
    if (checker.list_size != 1 && checker.list_size != 5 && checker.list_size != 10)
        throw ConfigError("--list-size must be 1, 5 or 10");
    if (agent.tool_budget < 1) throw ConfigError("agent budget must be >= 1");
    if (agent.condenser_budget < 64) throw ConfigError("condenser budget must be >= 64");
    if (concurrency < 1) throw ConfigError("concurrency must be >= 1");
    if (mode == RunMode::Replay && cassette_path.empty())
        throw ConfigError("replay mode requires --cassette");
    if (mode == RunMode::Record && !Credentials::from_env().complete())
        throw ConfigError("record mode requires SEARCH_API_KEY and SEARCH_ENGINE_ID");
}

GatewayFactory make_gateway_factory(const RunConfig& cfg) {
    if (cfg.mode == RunMode::Replay) {
        if (cfg.scenario_path.empty())
            throw ConfigError("replay mode requires --scenario");
        auto scenario = cfg.scenario_path;
        return [scenario](const std::string& sample_id) -> std::unique_ptr<ModelGateway> {
            fs::path p(scenario);
            if (fs::is_directory(p)) p /= sample_id + ".json";
            if (!fs::exists(p))
                throw ConfigError("no scenario for sample " + sample_id + ": " + p.string());
            return std::make_unique<ScriptedGateway>(ScriptedGateway::from_file(p.string()));
        };
    }
    auto model = cfg.model;
    return [model](const std::string&) { return make_live_gateway(model); };
}

nlohmann::json PipelineOutcome::to_json() const {
    nlohmann::json j;
    j["classification"] = classification;
    j["brand"] = verdict.brand_name() ? nlohmann::json(*verdict.brand_name())
                                      : nlohmann::json(nullptr);
    j["reason"] = verdict.reason;
    j["rounds_used"] = verdict.rounds_used;
    auto& domains = j["domains_checked"] = nlohmann::json::array();
    for (const auto& d : domains_checked.entries) domains.push_back(d.str());
    return j;
}

Pipeline::Pipeline(ToolClients clients, AgentConfig agent_cfg, CheckerConfig checker_cfg,
                   bool one_shot)
    : clients_(clients), agent_(clients, agent_cfg), checker_(checker_cfg),
      one_shot_(one_shot) {}

PipelineOutcome Pipeline::analyze(const WebSample& sample, ModelGateway& gateway) const {
    auto agent_result =
        one_shot_ ? agent_.run_one_shot(sample, gateway) : agent_.run(sample, gateway);
    auto check = classify(sample, agent_result.verdict, checker_, *clients_.web_search,
                          clients_.redirects.get());
    return {std::move(agent_result.verdict), check.classification,
            std::move(agent_result.transcript), std::move(check.domains_checked)};
}

} // namespace gep
