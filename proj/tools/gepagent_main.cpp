// SPDX-License-Identifier: Apache-2.0
// Operator CLI: analyze one page, evaluate a corpus, or serve HTTP.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "gep/base64.hpp"
#include "gep/errors.hpp"
#include "gep/eval.hpp"
#include "gep/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Simple key=value config file ("#" comments). Flags and env override it.
std::unordered_map<std::string, std::string> read_config_file(const std::string& path) {
    std::unordered_map<std::string, std::string> kv;
    if (path.empty()) return kv;
    std::ifstream in(path);
    if (!in) throw gep::ConfigError("cannot open config file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        auto t = gep::trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos) continue;
        kv[gep::trim(t.substr(0, eq))] = gep::trim(t.substr(eq + 1));
    }
    return kv;
}

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v && *v ? v : fallback;
}

struct CliOptions {
    gep::RunConfig run;
    std::string config_file;
    std::string mode_flag;
    std::string bind = "127.0.0.1:8080";
    std::string target; // analyze: url or sample dir; eval: corpus dir
};

// Attaches the shared flags to a subcommand.
void add_common_options(CLI::App* cmd, CliOptions& opts) {
    cmd->add_option("--config", opts.config_file, "key=value config file");
    cmd->add_option("--mode", opts.mode_flag, "live|replay|record");
    cmd->add_option("--list-size", opts.run.checker.list_size, "domain list size (1|5|10)");
    cmd->add_flag("--redirect-check", opts.run.checker.redirection_check,
                  "re-test the final URL after redirects on a mismatch");
    cmd->add_option("--budget,-b", opts.run.agent.tool_budget, "agent tool-call budget");
    cmd->add_option("--condenser-budget", opts.run.agent.condenser_budget,
                    "HTML condenser token budget");
    cmd->add_option("--cassette", opts.run.cassette_path, "cassette JSONL path");
    cmd->add_option("--scenario", opts.run.scenario_path,
                    "scenario file (analyze/serve) or directory (eval)");
    cmd->add_option("--concurrency", opts.run.concurrency, "parallel samples");
    cmd->add_option("--out", opts.run.out_dir, "report output directory");
    cmd->add_option("--model", opts.run.model, "live model name");
    cmd->add_flag("--one-shot", opts.run.one_shot, "NLP one-shot baseline (no tools)");
}

// Precedence: CLI flag > env var > config file > built-in default.
void resolve_config(CLI::App* cmd, CliOptions& opts) {
    auto file = read_config_file(opts.config_file);
    auto pick = [&](const char* flag, const char* env, const char* key,
                    const std::string& current) -> std::string {
        if (cmd->count(flag) > 0) return current;
        auto from_env = env_or(env, "");
        if (!from_env.empty()) return from_env;
        if (auto it = file.find(key); it != file.end()) return it->second;
        return current;
    };
    opts.mode_flag = pick("--mode", "MODE", "mode", opts.mode_flag);
    if (!opts.mode_flag.empty()) opts.run.mode = gep::parse_run_mode(opts.mode_flag);
    opts.run.cassette_path =
        pick("--cassette", "GEP_CASSETTE", "cassette", opts.run.cassette_path);
    opts.run.scenario_path =
        pick("--scenario", "GEP_SCENARIO", "scenario", opts.run.scenario_path);
    opts.run.out_dir = pick("--out", "GEP_OUT", "out", opts.run.out_dir);
    auto list_size = pick("--list-size", "GEP_LIST_SIZE", "list_size",
                          std::to_string(opts.run.checker.list_size));
    opts.run.checker.list_size = std::stoul(list_size);
    auto conc = pick("--concurrency", "GEP_CONCURRENCY", "concurrency",
                     std::to_string(opts.run.concurrency));
    opts.run.concurrency = std::stoi(conc);
}

gep::ToolClients build_clients(const gep::RunConfig& cfg) {
    std::shared_ptr<gep::Cassette> cassette;
    if (cfg.mode == gep::RunMode::Replay) {
        cassette = std::make_shared<gep::Cassette>(gep::Cassette::load(cfg.cassette_path));
    } else if (cfg.mode == gep::RunMode::Record) {
        if (cfg.cassette_path.empty())
            throw gep::ConfigError("record mode requires --cassette");
        cassette = std::make_shared<gep::Cassette>(
            gep::Cassette::open_for_record(cfg.cassette_path));
    }
    return gep::make_clients(cfg.mode, cassette);
}

gep::WebSample sample_from_dir(const fs::path& dir) {
    auto read = [](const fs::path& p) -> std::optional<std::string> {
        std::ifstream in(p, std::ios::binary);
        if (!in) return std::nullopt;
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    auto read_bin = [](const fs::path& p) -> std::optional<std::vector<std::uint8_t>> {
        std::ifstream in(p, std::ios::binary);
        if (!in) return std::nullopt;
        return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
    };
    auto info = read(dir / "info.txt");
    if (!info) throw gep::ConfigError("no info.txt in " + dir.string());
    gep::RawSample raw;
    raw.id = dir.filename().string();
    auto nl = info->find('\n');
    raw.url = gep::trim(nl == std::string::npos ? *info : info->substr(0, nl));
    raw.html = read(dir / "html.txt").value_or("");
    raw.screenshot = read_bin(dir / "shot.png");
    raw.logo_crop = read_bin(dir / "logo.png");
    return gep::validate_sample(std::move(raw));
}

int cmd_analyze(CliOptions& opts) {
    opts.run.validate();
    auto clients = build_clients(opts.run);
    gep::Pipeline pipeline(clients, opts.run.agent, opts.run.checker, opts.run.one_shot);

    gep::WebSample sample;
    if (fs::is_directory(opts.target)) {
        sample = sample_from_dir(opts.target);
    } else {
        sample = gep::validate_sample({"cli", opts.target, "", {}, {}, {}});
    }

    std::unique_ptr<gep::ModelGateway> gateway;
    if (opts.run.mode == gep::RunMode::Replay) {
        if (opts.run.scenario_path.empty())
            throw gep::ConfigError("replay mode requires --scenario");
        fs::path p(opts.run.scenario_path);
        if (fs::is_directory(p)) p /= sample.id + ".json";
        gateway = std::make_unique<gep::ScriptedGateway>(
            gep::ScriptedGateway::from_file(p.string()));
    } else {
        gateway = gep::make_live_gateway(opts.run.model);
    }

    auto outcome = pipeline.analyze(sample, *gateway);
    std::cout << outcome.to_json().dump(2) << "\n";
    return outcome.classification.value == gep::ClassValue::Phishing ? 1 : 0;
}

int cmd_eval(CliOptions& opts, const std::string& labels_flag) {
    opts.run.validate();
    auto labels = labels_flag;
    if (labels.empty()) {
        auto candidate = fs::path(opts.target) / "labels.jsonl";
        if (fs::exists(candidate)) labels = candidate.string();
    }
    auto corpus = gep::load_corpus(opts.target, labels);
    for (const auto& w : corpus.warnings) std::cerr << "warning: " << w << "\n";
    if (corpus.samples.empty()) throw gep::ConfigError("no samples in " + opts.target);

    auto clients = build_clients(opts.run);
    auto gateways = gep::make_gateway_factory(opts.run);
    auto result = gep::run_suite(corpus.samples, opts.run, clients, gateways);
    gep::write_report(result, opts.run.out_dir);

    const auto& r = result.report;
    std::cout.setf(std::ios::fixed);
    std::cout.precision(4);
    std::cout << "samples=" << result.records.size() << " errored=" << r.errored
              << " tp=" << r.counts.tp << " fp=" << r.counts.fp << " tn=" << r.counts.tn
              << " fn=" << r.counts.fn << "\n";
    std::cout << "precision=" << r.precision << " recall=" << r.recall
              << " accuracy=" << r.accuracy << " f1=" << r.f1 << "\n";
    std::cout << "report written to " << (fs::path(opts.run.out_dir) / "report.json").string()
              << "\n";
    return 0;
}

int cmd_serve(CliOptions& opts) {
    opts.run.validate();
    if (opts.run.mode == gep::RunMode::Live && !gep::Credentials::from_env().complete())
        throw gep::ConfigError("live mode requires SEARCH_API_KEY and SEARCH_ENGINE_ID");
    auto clients = build_clients(opts.run);
    gep::Pipeline pipeline(clients, opts.run.agent, opts.run.checker, opts.run.one_shot);

    auto colon = opts.bind.rfind(':');
    if (colon == std::string::npos) throw gep::ConfigError("--bind must be host:port");
    auto host = opts.bind.substr(0, colon);
    int port = std::stoi(opts.bind.substr(colon + 1));

    httplib::Server server;

    server.Get("/healthz", [&](const httplib::Request&, httplib::Response& res) {
        json j{{"mode", gep::to_string(opts.run.mode)}};
        if (opts.run.mode == gep::RunMode::Replay)
            j["cassette"] = {{"path", opts.run.cassette_path}, {"loaded", true}};
        res.set_content(j.dump(), "application/json");
    });

    server.Post("/analyze", [&](const httplib::Request& req, httplib::Response& res) {
        auto bad_request = [&](const std::string& msg) {
            res.status = 400;
            res.set_content(json{{"error", msg}}.dump(), "application/json");
        };
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::exception& e) {
            return bad_request(std::string("invalid JSON: ") + e.what());
        }
        if (!body.is_object() || !body.contains("url") || !body["url"].is_string())
            return bad_request("missing url");

        gep::RawSample raw;
        raw.id = "request";
        raw.url = body["url"].get<std::string>();
        raw.html = body.value("html", std::string{});
        for (auto [field, target] :
             {std::pair{"screenshot", &raw.screenshot}, std::pair{"logo", &raw.logo_crop}}) {
            if (!body.contains(field)) continue;
            if (!body[field].is_string()) return bad_request(std::string(field) + " must be base64");
            auto bytes = gep::base64_decode(body[field].get<std::string>());
            if (!bytes) return bad_request(std::string("invalid base64 in ") + field);
            *target = std::move(*bytes);
        }

        try {
            auto sample = gep::validate_sample(std::move(raw));
            std::unique_ptr<gep::ModelGateway> gateway;
            if (opts.run.mode == gep::RunMode::Replay) {
                gateway = std::make_unique<gep::ScriptedGateway>(
                    gep::ScriptedGateway::from_file(opts.run.scenario_path));
            } else {
                gateway = gep::make_live_gateway(opts.run.model);
            }
            auto outcome = pipeline.analyze(sample, *gateway);
            res.set_content(outcome.to_json().dump(), "application/json");
        } catch (const gep::InvalidUrl& e) {
            bad_request(e.what());
        } catch (const gep::EmptyId& e) {
            bad_request(e.what());
        } catch (const std::exception& e) {
            res.status = 503;
            res.set_content(json{{"error", e.what()}}.dump(), "application/json");
        }
    });

    std::cerr << "listening on " << host << ":" << port << " (" << gep::to_string(opts.run.mode)
              << " mode)\n";
    if (!server.listen(host, port)) throw gep::ConfigError("failed to bind " + opts.bind);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reference-based phishing detection: brand agent + domain checker"};
    app.require_subcommand(1);

    CliOptions opts;
    std::string labels_flag;

    auto* analyze = app.add_subcommand("analyze", "Classify one URL or sample directory");
    analyze->add_option("target", opts.target, "URL or sample directory")->required();
    add_common_options(analyze, opts);

    auto* eval = app.add_subcommand("eval", "Run a corpus and write report.json/report.md");
    eval->add_option("corpus", opts.target, "corpus root directory")->required();
    eval->add_option("--labels", labels_flag, "labels.jsonl path");
    add_common_options(eval, opts);

    auto* serve = app.add_subcommand("serve", "HTTP service: POST /analyze, GET /healthz");
    serve->add_option("--bind", opts.bind, "host:port (default 127.0.0.1:8080)");
    add_common_options(serve, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) {
            resolve_config(analyze, opts);
            return cmd_analyze(opts);
        }
        if (eval->parsed()) {
            resolve_config(eval, opts);
            return cmd_eval(opts, labels_flag);
        }
        resolve_config(serve, opts);
        return cmd_serve(opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
