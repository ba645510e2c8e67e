// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "gep/agent.hpp"
#include "gep/clients.hpp"
#include "gep/verdict_engine.hpp"

namespace gep {

/// Per-run configuration resolved from flags, env and config file.
struct RunConfig {
    RunMode mode = RunMode::Replay;
    CheckerConfig checker;
    AgentConfig agent;
    bool one_shot = false;
    std::string cassette_path;
    std::string scenario_path; // file (analyze) or directory (eval)
    std::string corpus_path;
    std::string labels_path;
    std::string out_dir = ".";
    int concurrency = 4;
    std::string model = "gpt-4-turbo";

    void validate() const; // throws ConfigError
};

// Builds a gateway for one sample: scripted (scenario file keyed by sample
// id) in replay mode, live otherwise.
using GatewayFactory = std::function<std::unique_ptr<ModelGateway>(const std::string& sample_id)>;

GatewayFactory make_gateway_factory(const RunConfig& cfg);

struct PipelineOutcome {
    BrandVerdict verdict;
    Classification classification;
    AgentTranscript transcript;
    DomainList domains_checked;

    nlohmann::json to_json() const;
};

/// Glue shared by the CLI, the HTTP service and the eval harness.
class Pipeline {
public:
    Pipeline(ToolClients clients, AgentConfig agent_cfg, CheckerConfig checker_cfg,
             bool one_shot = false);

    // Full run for one sample. Throws on tool/gateway outages.
    PipelineOutcome analyze(const WebSample& sample, ModelGateway& gateway) const;

    const CheckerConfig& checker() const { return checker_; }

private:
    ToolClients clients_;
    Agent agent_;
    CheckerConfig checker_;
    bool one_shot_;
};

} // namespace gep
