// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "gep/agent.hpp"
#include "gep/errors.hpp"
#include "support.hpp"

using namespace gep;

namespace {

WebSample sample(const std::string& url = "https://www.nike.com/",
                 const std::string& html = "<title>Nike</title><button>Sign in</button>") {
    WebSample s;
    s.id = "t1";
    s.url = url;
    s.html = html;
    return s;
}

ModelReply tool(const std::string& name, const std::string& query) {
    return ToolRequest{name, nlohmann::json{{"query", query}}};
}

ModelReply final_json(const std::string& brand, const std::string& reason) {
    nlohmann::json j{{"brand_name", brand}, {"reason", reason}};
    return FinalText{j.dump()};
}

void check_transcript_shape(const AgentTranscript& t) {
    int calls = 0;
    for (std::size_t i = 0; i < t.turns.size(); ++i) {
        if (t.turns[i].role == TurnRole::ToolCall) {
            ++calls;
            REQUIRE(i + 1 < t.turns.size());
            CHECK(t.turns[i + 1].role == TurnRole::ToolResult);
        }
    }
    CHECK(calls == t.tool_calls_used);
}

} // namespace

TEST_CASE("prompt declares the budget and tools") {
    PromptContext ctx;
    ctx.processed_html = condense("<title>Nike Store</title>", 3000);
    auto prompt = build_prompt(ctx);
    CHECK(prompt.find("only five times in total") != std::string::npos);
    CHECK(prompt.find("get_google_search_results") != std::string::npos);
    CHECK(prompt.find("get_google_img_search_res") != std::string::npos);
    CHECK(prompt.find("brand_name") != std::string::npos);
    CHECK(prompt.find("no brand name") != std::string::npos);
    CHECK(prompt.find("Nike Store") != std::string::npos);
}

TEST_CASE("absent inputs render as explicit markers") {
    PromptContext ctx; // nothing available
    auto prompt = build_prompt(ctx);
    CHECK(prompt.find("logo: not available") != std::string::npos);
    CHECK(prompt.find("screen_shot: not available") != std::string::npos);

    ctx.logo_present = true;
    ctx.logo_detector_output = LogoDetection{"AT&T", 0.9};
    ctx.vision_output = VisionDescription{""};
    auto with_logo = build_prompt(ctx);
    CHECK(with_logo.find("logo: available") != std::string::npos);
    CHECK(with_logo.find("AT&T (confidence 0.90)") != std::string::npos);
    CHECK(with_logo.find("no identifiable brand") != std::string::npos);
}

TEST_CASE("empty condensed page still yields a well-formed prompt") {
    PromptContext ctx;
    ctx.processed_html = condense("", 3000);
    auto prompt = build_prompt(ctx);
    CHECK_FALSE(prompt.empty());
    CHECK(prompt.find("processed_html: ") != std::string::npos);
}

TEST_CASE("verdict parsing agrees with the frozen 30-case corpus") {
    auto cases = geptest::verdict_cases();
    REQUIRE(cases.size() == 30);
    for (const auto& c : cases) {
        CAPTURE(c.input);
        switch (c.expect) {
            case geptest::VerdictCase::Named: {
                auto v = parse_verdict(c.input);
                CHECK_FALSE(v.is_no_brand());
                REQUIRE(v.brand_name() != nullptr);
                CHECK(*v.brand_name() == c.name);
                break;
            }
            case geptest::VerdictCase::NoBrand: {
                auto v = parse_verdict(c.input);
                CHECK(v.is_no_brand());
                break;
            }
            case geptest::VerdictCase::Malformed:
                CHECK_THROWS_AS(parse_verdict(c.input), MalformedOutput);
                break;
        }
    }
}

TEST_CASE("parse_verdict after render_verdict is identity") {
    std::vector<BrandVerdict> verdicts = {
        BrandVerdict::named("Nike", "logo match"),
        BrandVerdict::named("Bank of America", "text says \"BofA\""),
        BrandVerdict::named("AT&T", "unicode & ampersand"),
        BrandVerdict::no_brand("blank page"),
    };
    for (const auto& v : verdicts) {
        auto round = parse_verdict(render_verdict(v));
        CHECK(round.is_no_brand() == v.is_no_brand());
        if (!v.is_no_brand()) CHECK(*round.brand_name() == *v.brand_name());
        CHECK(round.reason == v.reason);
    }
}

TEST_CASE("scripted happy path: one search then a named verdict") {
    auto web = std::make_shared<geptest::StubWebSearch>();
    web->canned["Nike"] = geptest::make_results({"nike.com"});
    Agent agent(geptest::stub_clients(web));
    ScriptedGateway gw({tool("get_google_search_results", "Nike"),
                        final_json("Nike", "logo match")});
    auto result = agent.run(sample(), gw);
    REQUIRE(result.verdict.brand_name() != nullptr);
    CHECK(*result.verdict.brand_name() == "Nike");
    CHECK(result.verdict.rounds_used == 1);
    CHECK(result.transcript.tool_calls_used == 1);
    CHECK(web->calls == 1);
    check_transcript_shape(result.transcript);
}

TEST_CASE("seven tool requests: exactly five dispatched, then forced finalization") {
    auto web = std::make_shared<geptest::StubWebSearch>();
    Agent agent(geptest::stub_clients(web));
    std::vector<ModelReply> script;
    for (int i = 0; i < 7; ++i) script.push_back(tool("get_google_search_results", "q" + std::to_string(i)));
    script.push_back(final_json("Nike", "done after nudges"));
    ScriptedGateway gw(script);
    auto result = agent.run(sample(), gw);
    CHECK(result.transcript.tool_calls_used == 5);
    CHECK(web->calls == 5);
    REQUIRE(result.verdict.brand_name() != nullptr);
    CHECK(*result.verdict.brand_name() == "Nike");
    CHECK(result.verdict.rounds_used == 5);
    check_transcript_shape(result.transcript);
}

TEST_CASE("no-brand JSON becomes a NoBrand verdict") {
    Agent agent(geptest::stub_clients());
    ScriptedGateway gw({final_json("no brand found", "nothing identifiable")});
    auto result = agent.run(sample(), gw);
    CHECK(result.verdict.is_no_brand());
    CHECK(result.verdict.rounds_used == 0);
}

TEST_CASE("malformed output is repaired, then given up on") {
    Agent agent(geptest::stub_clients());

    SUBCASE("one repair suffices") {
        ScriptedGateway gw({FinalText{"The brand is Wikipedia, obviously."},
                            final_json("Wikipedia", "second attempt valid")});
        auto result = agent.run(sample(), gw);
        REQUIRE(result.verdict.brand_name() != nullptr);
        CHECK(*result.verdict.brand_name() == "Wikipedia");
    }

    SUBCASE("persistent garbage degrades to NoBrand") {
        ScriptedGateway gw({FinalText{"garbage"}, FinalText{"{broken"}, FinalText{"still bad"}});
        auto result = agent.run(sample(), gw);
        CHECK(result.verdict.is_no_brand());
        CHECK(result.verdict.reason == "unparseable agent output");
    }
}

TEST_CASE("unknown tools and empty queries burn budget but return errors") {
    auto web = std::make_shared<geptest::StubWebSearch>();
    Agent agent(geptest::stub_clients(web));
    ScriptedGateway gw({tool("get_weather", "x"),
                        ToolRequest{"get_google_search_results", nlohmann::json::object()},
                        final_json("Nike", "after failed calls")});
    auto result = agent.run(sample(), gw);
    CHECK(result.transcript.tool_calls_used == 2);
    CHECK(web->calls == 0);
    REQUIRE(result.verdict.brand_name() != nullptr);
    CHECK(*result.verdict.brand_name() == "Nike");
}

TEST_CASE("model-supplied queries are trimmed and capped at 256 chars") {
    auto web = std::make_shared<geptest::StubWebSearch>();
    struct Capture final : WebSearchClient {
        std::string last;
        std::vector<SearchResult> search(const std::string& q, int) override {
            last = q;
            return {};
        }
    };
    auto capture = std::make_shared<Capture>();
    ToolClients clients = geptest::stub_clients();
    clients.web_search = capture;
    Agent agent(clients);
    std::string long_query = "  " + std::string(1000, 'q') + "  ";
    ScriptedGateway gw({tool("get_google_search_results", long_query),
                        final_json("Nike", "done")});
    agent.run(sample(), gw);
    CHECK(capture->last.size() == 256);
    CHECK(capture->last == std::string(256, 'q'));
}

TEST_CASE("budget safety under randomized adversarial gateways") {
    auto web = std::make_shared<geptest::StubWebSearch>();
    web->canned["q"] = geptest::make_results({"nike.com"});
    Agent agent(geptest::stub_clients(web));

    std::mt19937 rng(1234509876);
    for (int run = 0; run < 200; ++run) {
        std::vector<ModelReply> script;
        int steps = rng() % 16;
        for (int i = 0; i < steps; ++i) {
            switch (rng() % 6) {
                case 0: script.push_back(tool("get_google_search_results", "q")); break;
                case 1: script.push_back(tool("get_google_img_search_res", "q")); break;
                case 2: script.push_back(tool("bogus_tool_" + std::to_string(rng() % 3), "q")); break;
                case 3: script.push_back(FinalText{"not json at all"}); break;
                case 4: script.push_back(FinalText{"```json\n{\"brand_name\":\"X\"}\n```"}); break;
                case 5: script.push_back(final_json("Brand" + std::to_string(rng() % 9), "r")); break;
            }
        }
        ScriptedGateway gw(script);
        auto result = agent.run(sample(), gw);
        CHECK(result.transcript.tool_calls_used <= 5);
        CHECK(result.verdict.rounds_used <= 5);
        CHECK_FALSE(result.verdict.reason.empty());
        check_transcript_shape(result.transcript);
    }
}

TEST_CASE("agent runs are deterministic under scripted gateways") {
    auto make_script = [] {
        return std::vector<ModelReply>{tool("get_google_search_results", "Nike"),
                                       final_json("Nike", "match")};
    };
    auto web = std::make_shared<geptest::StubWebSearch>();
    web->canned["Nike"] = geptest::make_results({"nike.com", "nike.co.uk"});
    Agent agent(geptest::stub_clients(web));
    ScriptedGateway g1(make_script()), g2(make_script());
    auto r1 = agent.run(sample(), g1);
    auto r2 = agent.run(sample(), g2);
    CHECK(r1.transcript.to_json().dump() == r2.transcript.to_json().dump());
    CHECK(r1.verdict == r2.verdict);
}

TEST_CASE("one-shot mode never calls tools") {
    auto web = std::make_shared<geptest::StubWebSearch>();
    Agent agent(geptest::stub_clients(web));
    ScriptedGateway gw({tool("get_google_search_results", "Nike"),
                        final_json("Nike", "after the refused tool call")});
    auto result = agent.run_one_shot(sample(), gw);
    CHECK(web->calls == 0);
    CHECK(result.transcript.tool_calls_used == 0);
    REQUIRE(result.verdict.brand_name() != nullptr);
    CHECK(*result.verdict.brand_name() == "Nike");
    CHECK(result.verdict.rounds_used == 0);
}

TEST_CASE("scenario files round-trip through the scripted gateway") {
    nlohmann::json script = nlohmann::json::array(
        {{{"kind", "tool"}, {"name", "get_google_search_results"},
          {"arguments", {{"query", "Nike"}}}},
         {{"kind", "final"}, {"text", R"({"brand_name":"Nike","reason":"r"})"}}});
    auto gw = ScriptedGateway::from_json(script);
    auto first = gw.send({}, {});
    CHECK(std::holds_alternative<ToolRequest>(first));
    auto second = gw.send({}, {});
    CHECK(std::holds_alternative<FinalText>(second));
    // exhausted scripts answer with an empty final so loops terminate
    auto third = gw.send({}, {});
    REQUIRE(std::holds_alternative<FinalText>(third));
    CHECK(std::get<FinalText>(third).text.empty());

    nlohmann::json bad = nlohmann::json::array({{{"kind", "other"}}});
    CHECK_THROWS_AS(ScriptedGateway::from_json(bad), ConfigError);
}
