// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gep/clients.hpp"
#include "gep/html_condenser.hpp"
#include "gep/logo_similarity.hpp"
#include "gep/types.hpp"

namespace gep {

/// Everything the system prompt needs; absent inputs render as an explicit
/// "not available" marker.
struct PromptContext {
    CondensedPage processed_html;
    bool logo_present = false;
    bool screenshot_present = false;
    std::optional<LogoDetection> logo_detector_output;
    std::optional<VisionDescription> vision_output;
};

// The agent's system prompt with all slots substituted.
std::string build_prompt(const PromptContext& ctx);

// Single-prompt baseline: condensed HTML only, no tools, no vision inputs.
std::string build_one_shot_prompt(const CondensedPage& page);

struct ToolRequest {
    std::string name;
    nlohmann::json arguments;
};
struct FinalText {
    std::string text;
};
using ModelReply = std::variant<ToolRequest, FinalText>;

struct Message {
    std::string role; // "system" | "assistant" | "tool"
    std::string content;
};

struct ToolSpec {
    std::string name;
    std::string description;
};

/// Model transport. Implementations: live chat API, or a scripted responder
/// driven by a scenario file.
class ModelGateway {
public:
    virtual ~ModelGateway() = default;
    // Throws GatewayUnavailable on transport failure.
    virtual ModelReply send(const std::vector<Message>& conversation,
                            const std::vector<ToolSpec>& tools) = 0;
};

/// Replays a fixed list of responses. Scenario file: JSON array of
/// {kind:"tool"|"final", name?, arguments?, text?}.
class ScriptedGateway final : public ModelGateway {
public:
    explicit ScriptedGateway(std::vector<ModelReply> script);
    static ScriptedGateway from_file(const std::string& path);
    static ScriptedGateway from_json(const nlohmann::json& script);

    ModelReply send(const std::vector<Message>& conversation,
                    const std::vector<ToolSpec>& tools) override;

private:
    std::vector<ModelReply> script_;
    std::size_t next_ = 0;
};

// OpenAI-style chat-completions gateway (live mode). Reads OPENAI_API_KEY.
std::unique_ptr<ModelGateway> make_live_gateway(const std::string& model = "gpt-4-turbo");

enum class TurnRole { System, Model, ToolCall, ToolResult };

struct Turn {
    TurnRole role;
    nlohmann::json payload; // text for System/Model, structured record otherwise
};

/// Ordered record of one agent run. Every ToolCall turn is immediately
/// followed by exactly one ToolResult turn.
struct AgentTranscript {
    std::vector<Turn> turns;
    int tool_calls_used = 0;

    nlohmann::json to_json() const;
};

struct AgentResult {
    BrandVerdict verdict;
    AgentTranscript transcript;
};

struct AgentConfig {
    int tool_budget = 5;
    int repair_attempts = 2;
    std::size_t condenser_budget = 3000;
    std::size_t max_query_length = 256;
};

// Parses the model's final output: strips optional markdown fences, requires
// string keys brand_name and reason, maps "no brand found"/"no brand name"
// (case-insensitive) to NoBrand. Throws MalformedOutput.
BrandVerdict parse_verdict(const std::string& text);

// Canonical rendering of a verdict as the model's JSON contract.
std::string render_verdict(const BrandVerdict& v);

/// The tool-calling loop: preprocess the sample, build the prompt, iterate
/// model <-> tool exchanges under the call budget, parse the terminal JSON.
class Agent {
public:
    Agent(ToolClients clients, AgentConfig config = {});

    AgentResult run(const WebSample& sample, ModelGateway& gateway) const;

    // Baseline mode: one prompt over condensed HTML, no tools. rounds_used = 0.
    AgentResult run_one_shot(const WebSample& sample, ModelGateway& gateway) const;

private:
    ToolClients clients_;
    AgentConfig config_;
    LogoSimilarity similarity_;

    PromptContext preprocess(const WebSample& sample) const;
    nlohmann::json dispatch_tool(const ToolRequest& req, const WebSample& sample) const;
    AgentResult run_loop(std::string system_prompt, ModelGateway& gateway,
                         const WebSample& sample, bool tools_allowed) const;
};

std::vector<ToolSpec> default_tool_specs();

} // namespace gep
