// SPDX-License-Identifier: Apache-2.0
#include "gep/agent.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>

#include <httplib.h>

#include "gep/errors.hpp"

namespace gep {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

constexpr const char* kNotAvailable = "not available";

std::string render_logo_detection(const std::optional<LogoDetection>& d) {
    if (!d) return kNotAvailable;
    if (!d->brand_guess) return "no logo recognized";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", d->confidence);
    return *d->brand_guess + " (confidence " + buf + ")";
}

std::string render_vision(const std::optional<VisionDescription>& v) {
    if (!v) return kNotAvailable;
    if (v->text.empty()) return "no identifiable brand";
    return v->text;
}

} // namespace

std::string build_prompt(const PromptContext& ctx) {
    std::string prompt;
    prompt +=
        "You are an expert assistant with strong reasoning and brand understanding skills. "
        "You're able to identify the brands regardless they are commercial, famous, valuable "
        "or not. Be truthful and only make claims that are grounded with the provided "
        "information. Do not fabricate any fact or make up non-existent content.";
    prompt +=
        "Given some text fragments and logo images from a webpage, your final goal is to "
        "determine the brand from the Google Search and Google Image Search that matches this "
        "webpage, or report that no known brand can be found. Please provide the brand name "
        "that matches the given text fragments and logo images, or type 'no brand found' if "
        "no brand can be found, and provide reasons for every decision you make. In some "
        "cases, if the given tools do not provide enough information, you can change the "
        "query to get more information. Try to identify which parts of the input are most "
        "likely to be brand-related.";
    prompt +=
        "You can call any available functions, but only five times in total, and once you "
        "make decision, you can give output of brand name with reason in json format and "
        "terminate. ";
    prompt +=
        "INPUT: you will be given: Text fragments from the webpage html, possibly "
        "brand-related: ";
    prompt += "processed_html: " + ctx.processed_html.render() + ", ";
    prompt += "Any possible logo image from the webpage: ";
    prompt += "logo: " + std::string(ctx.logo_present ? "available" : kNotAvailable);
    prompt += ", screen_shot: " +
              std::string(ctx.screenshot_present ? "available" : kNotAvailable);
    prompt += ", Output of Google Logo Search on the logo image (e.g., a brand name): " +
              render_logo_detection(ctx.logo_detector_output) +
              ", this is an important information to identify.";
    prompt += "Output of ChatGPT-4 Vision on the screenshot and logo: " +
              render_vision(ctx.vision_output) +
              ", the brand of the website as the result is reliable for more than 60 percent "
              "of the cases. ";
    prompt +=
        "TOOLS: To search for information about the text fragments and logo images, select "
        "from the following tools to query: Google Search (get_google_search_results). "
        "Input: text query; Output: search results, you can use this function to gather more "
        "information of text fragment as well as google logo detector result. Google Image "
        "Search (get_google_img_search_res): Input: text query; Output: image URLs, basic "
        "info, snippets, titles and whether they visually match the current webpage's logo "
        "image with similarity score. A score that greater than 0.8 is considered to be "
        "similar. You can use it to understand the logo images from the webpage. ";
    prompt +=
        "FINAL OUTPUT FROM YOU: if you decide to stop, you should only have your output in "
        "JSON format for your decision based on your evaluation. There should have two keys: "
        "brand_name and reason. Find as much information as possible and specify your "
        "decision in 'reason'.";
    prompt +=
        "If you cannot decide for the brand name, specify 'no brand name' in 'brand_name' "
        "and state why you cannot decide in 'reason'. No markdown and indention.";
    prompt += "Some samples of final output from you is provided below:";
    prompt +=
        "SAMPLE FINAL OUTPUT FROM YOU: {\"brand_name\": \"Nike\", \"reason\": \"Based on the "
        "google search result and google image result, the logo from the webpage is highly "
        "similar to Nike's logo.\"}";
    return prompt;
}

std::string build_one_shot_prompt(const CondensedPage& page) {
    std::string prompt;
    prompt +=
        "You are an expert assistant with strong reasoning and brand understanding skills. "
        "Be truthful and only make claims that are grounded with the provided information. ";
    prompt +=
        "Given text fragments extracted from a webpage's HTML, determine the brand this "
        "webpage represents, or report that no known brand can be found. ";
    prompt += "processed_html: " + page.render() + " ";
    prompt +=
        "Output in JSON format with two keys: brand_name and reason. If you cannot decide "
        "for the brand name, specify 'no brand name' in 'brand_name' and state why in "
        "'reason'. No markdown and indention.";
    return prompt;
}

std::vector<ToolSpec> default_tool_specs() {
    return {
        {"get_google_search_results",
         "Google Search. Input: text query; Output: search results (titles, snippets, links)."},
        {"get_google_img_search_res",
         "Google Image Search. Input: text query; Output: image results with thumbnail links "
         "and a similarity score against the webpage's logo (>0.8 is similar)."},
    };
}

// ---- verdict parsing -------------------------------------------------------

namespace {

std::string strip_code_fences(const std::string& text) {
    auto s = trim(text);
    if (s.rfind("```", 0) != 0) return s;
    auto first_nl = s.find('\n');
    if (first_nl == std::string::npos) return s;
    auto body = s.substr(first_nl + 1);
    auto close = body.rfind("```");
    if (close != std::string::npos) body = body.substr(0, close);
    return trim(body);
}

} // namespace

BrandVerdict parse_verdict(const std::string& text) {
    auto body = strip_code_fences(text);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedOutput(std::string("not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("brand_name") || !j.contains("reason"))
        throw MalformedOutput("missing brand_name/reason keys");
    if (!j["brand_name"].is_string() || !j["reason"].is_string())
        throw MalformedOutput("brand_name/reason must be strings");
    auto brand = trim(j["brand_name"].get<std::string>());
    auto reason = trim(j["reason"].get<std::string>());
    if (reason.empty()) throw MalformedOutput("empty reason");
    auto brand_lc = lower(brand);
    if (brand_lc == "no brand found" || brand_lc == "no brand name")
        return BrandVerdict::no_brand(reason);
    if (brand.empty()) throw MalformedOutput("empty brand_name");
    return BrandVerdict::named(brand, reason);
}

std::string render_verdict(const BrandVerdict& v) {
    nlohmann::json j;
    j["brand_name"] = v.brand_name() ? *v.brand_name() : "no brand found";
    j["reason"] = v.reason;
    return j.dump();
}

// ---- scripted gateway ------------------------------------------------------

ScriptedGateway::ScriptedGateway(std::vector<ModelReply> script) : script_(std::move(script)) {}

ScriptedGateway ScriptedGateway::from_json(const nlohmann::json& script) {
    std::vector<ModelReply> replies;
    for (const auto& step : script) {
        auto kind = step.at("kind").get<std::string>();
        if (kind == "tool") {
            replies.push_back(ToolRequest{step.at("name").get<std::string>(),
                                          step.value("arguments", nlohmann::json::object())});
        } else if (kind == "final") {
            replies.push_back(FinalText{step.at("text").get<std::string>()});
        } else {
            throw ConfigError("scenario step kind must be tool|final, got " + kind);
        }
    }
    return ScriptedGateway(std::move(replies));
}

ScriptedGateway ScriptedGateway::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad scenario file " + path + ": " + e.what());
    }
    return from_json(j);
}

ModelReply ScriptedGateway::send(const std::vector<Message>&, const std::vector<ToolSpec>&) {
    // An exhausted script keeps answering with an empty (malformed) final so
    // the loop always terminates through its repair path.
    if (next_ >= script_.size()) return FinalText{""};
    return script_[next_++];
}

// ---- live gateway ----------------------------------------------------------

namespace {

class LiveGateway final : public ModelGateway {
public:
    explicit LiveGateway(std::string model) : model_(std::move(model)) {
        const char* key = std::getenv("OPENAI_API_KEY");
        if (!key || !*key) throw ConfigError("live gateway requires OPENAI_API_KEY");
        api_key_ = key;
    }

    ModelReply send(const std::vector<Message>& conversation,
                    const std::vector<ToolSpec>& tools) override {
        nlohmann::json messages = nlohmann::json::array();
        for (const auto& m : conversation)
            messages.push_back({{"role", m.role == "tool" ? "user" : m.role},
                                {"content", m.content}});
        nlohmann::json body = {
            {"model", model_}, {"temperature", 0}, {"messages", messages}};
        if (!tools.empty()) {
            nlohmann::json tool_defs = nlohmann::json::array();
            for (const auto& t : tools)
                tool_defs.push_back(
                    {{"type", "function"},
                     {"function",
                      {{"name", t.name},
                       {"description", t.description},
                       {"parameters",
                        {{"type", "object"},
                         {"properties", {{"query", {{"type", "string"}}}}},
                         {"required", {"query"}}}}}}});
            body["tools"] = tool_defs;
        }

        httplib::Client cli("https://api.openai.com");
        cli.set_read_timeout(60);
        auto res = cli.Post("/v1/chat/completions",
                            {{"Authorization", "Bearer " + api_key_}}, body.dump(),
                            "application/json");
        if (!res || res->status != 200)
            throw GatewayUnavailable(
                "chat completion failed" +
                (res ? " with status " + std::to_string(res->status) : ""));
        auto j = nlohmann::json::parse(res->body);
        const auto& msg = j["choices"][0]["message"];
        if (msg.contains("tool_calls") && !msg["tool_calls"].empty()) {
            const auto& call = msg["tool_calls"][0]["function"];
            nlohmann::json args = nlohmann::json::object();
            try {
                args = nlohmann::json::parse(call.value("arguments", "{}"));
            } catch (const nlohmann::json::exception&) {
            }
            return ToolRequest{call.value("name", ""), args};
        }
        return FinalText{msg.value("content", "")};
    }

private:
    std::string model_;
    std::string api_key_;
};

} // namespace

std::unique_ptr<ModelGateway> make_live_gateway(const std::string& model) {
    return std::make_unique<LiveGateway>(model);
}

// ---- transcript ------------------------------------------------------------

namespace {

std::string role_name(TurnRole r) {
    switch (r) {
        case TurnRole::System: return "system";
        case TurnRole::Model: return "model";
        case TurnRole::ToolCall: return "tool_call";
        case TurnRole::ToolResult: return "tool_result";
    }
    return "?";
}

} // namespace

nlohmann::json AgentTranscript::to_json() const {
    nlohmann::json j;
    j["tool_calls_used"] = tool_calls_used;
    auto& ts = j["turns"] = nlohmann::json::array();
    for (const auto& t : turns) ts.push_back({{"role", role_name(t.role)}, {"payload", t.payload}});
    return j;
}

// ---- agent loop ------------------------------------------------------------

Agent::Agent(ToolClients clients, AgentConfig config)
    : clients_(std::move(clients)), config_(config), similarity_() {}

PromptContext Agent::preprocess(const WebSample& sample) const {
    PromptContext ctx;
    ctx.processed_html = condense(sample.html, config_.condenser_budget);
    ctx.logo_present = sample.logo_crop && !sample.logo_crop->empty();
    ctx.screenshot_present = sample.screenshot && !sample.screenshot->empty();
    if (ctx.logo_present && clients_.logo_detector)
        ctx.logo_detector_output = clients_.logo_detector->detect(*sample.logo_crop);
    if (ctx.screenshot_present && clients_.vision) {
        std::optional<std::span<const std::uint8_t>> logo;
        if (ctx.logo_present) logo = std::span<const std::uint8_t>(*sample.logo_crop);
        ctx.vision_output = clients_.vision->describe(*sample.screenshot, logo);
    }
    return ctx;
}

nlohmann::json Agent::dispatch_tool(const ToolRequest& req, const WebSample& sample) const {
    std::string query;
    if (req.arguments.is_string())
        query = req.arguments.get<std::string>();
    else if (req.arguments.is_object() && req.arguments.contains("query") &&
             req.arguments["query"].is_string())
        query = req.arguments["query"].get<std::string>();
    query = trim(query);
    if (query.size() > config_.max_query_length) query.resize(config_.max_query_length);
    if (query.empty()) return {{"error", "missing or empty query argument"}};

    if (req.name == "get_google_search_results") {
        auto results = clients_.web_search->search(query, 10);
        nlohmann::json out = nlohmann::json::array();
        for (const auto& r : results)
            out.push_back({{"title", r.title}, {"snippet", r.snippet}, {"link", r.link},
                           {"display_link", r.display_link}, {"rank", r.rank}});
        return out;
    }
    if (req.name == "get_google_img_search_res") {
        auto results = clients_.image_search->search(query, 10);
        std::optional<std::span<const std::uint8_t>> logo;
        if (sample.logo_crop && !sample.logo_crop->empty())
            logo = std::span<const std::uint8_t>(*sample.logo_crop);
        auto annotated = similarity_.annotate_image_results(logo, results, *clients_.fetcher);
        nlohmann::json out = nlohmann::json::array();
        for (const auto& [r, s] : annotated) {
            nlohmann::json item{{"thumbnail_link", r.thumbnail_link},
                                {"source_link", r.source_link},
                                {"title", r.title},
                                {"snippet", r.snippet},
                                {"context_link", r.context_link},
                                {"rank", r.rank}};
            if (s)
                item["similarity"] = {{"score", s->value}, {"similar", s->similar}};
            else
                item["similarity"] = nullptr;
            out.push_back(std::move(item));
        }
        return out;
    }
    return {{"error", "unknown tool: " + req.name}};
}

AgentResult Agent::run_loop(std::string system_prompt, ModelGateway& gateway,
                            const WebSample& sample, bool tools_allowed) const {
    const auto tools = tools_allowed ? default_tool_specs() : std::vector<ToolSpec>{};
    std::vector<Message> conversation{{"system", system_prompt}};
    AgentTranscript transcript;
    transcript.turns.push_back({TurnRole::System, system_prompt});

    int repairs_left = config_.repair_attempts;
    bool finalize_nudged = false;

    auto nudge = [&](const std::string& text) {
        conversation.push_back({"system", text});
        transcript.turns.push_back({TurnRole::System, text});
    };
    auto give_up = [&]() {
        return AgentResult{
            BrandVerdict::no_brand("unparseable agent output", transcript.tool_calls_used),
            std::move(transcript)};
    };

    while (true) {
        ModelReply reply = gateway.send(conversation, tools);

        if (auto* req = std::get_if<ToolRequest>(&reply)) {
            bool budget_left = transcript.tool_calls_used < config_.tool_budget;
            if (tools_allowed && budget_left) {
                nlohmann::json call{{"name", req->name}, {"arguments", req->arguments}};
                transcript.turns.push_back({TurnRole::ToolCall, call});
                conversation.push_back({"assistant", call.dump()});
                ++transcript.tool_calls_used;

                nlohmann::json result;
                try {
                    result = dispatch_tool(*req, sample);
                } catch (const CassetteMiss&) {
                    throw; // replay gap: fail the run loudly
                } catch (const ToolUnavailable& e) {
                    result = {{"error", e.what()}};
                }
                transcript.turns.push_back({TurnRole::ToolResult, result});
                conversation.push_back({"tool", result.dump()});
                continue;
            }
            if (tools_allowed && !finalize_nudged) {
                finalize_nudged = true;
                nudge("You have used all available function calls. Respond now with your "
                      "final decision as a JSON object with keys brand_name and reason. Do "
                      "not request any more tools.");
                continue;
            }
            // still asking for tools: burn a repair attempt, then give up
            if (repairs_left-- > 0) {
                nudge("Tools are not available. Output only the final JSON object with keys "
                      "brand_name and reason.");
                continue;
            }
            return give_up();
        }

        const auto& text = std::get<FinalText>(reply).text;
        transcript.turns.push_back({TurnRole::Model, text});
        try {
            auto verdict = parse_verdict(text);
            verdict.rounds_used = transcript.tool_calls_used;
            return {std::move(verdict), std::move(transcript)};
        } catch (const MalformedOutput& e) {
            if (repairs_left-- > 0) {
                nudge(std::string("Your previous output was not valid (") + e.what() +
                      "). Reply with exactly one JSON object with string keys brand_name "
                      "and reason, nothing else.");
                continue;
            }
            return give_up();
        }
    }
}

AgentResult Agent::run(const WebSample& sample, ModelGateway& gateway) const {
    auto ctx = preprocess(sample);
    return run_loop(build_prompt(ctx), gateway, sample, /*tools_allowed=*/true);
}

AgentResult Agent::run_one_shot(const WebSample& sample, ModelGateway& gateway) const {
    auto page = condense(sample.html, config_.condenser_budget);
    auto result = run_loop(build_one_shot_prompt(page), gateway, sample, /*tools_allowed=*/false);
    result.verdict.rounds_used = 0;
    result.transcript.tool_calls_used = 0;
    return result;
}

} // namespace gep
