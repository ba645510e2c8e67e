// SPDX-License-Identifier: Apache-2.0
#include "gep/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "gep/errors.hpp"

namespace fs = std::filesystem;

namespace gep {

std::string to_string(BrandOutcome o) {
    switch (o) {
        case BrandOutcome::Correct: return "correct";
        case BrandOutcome::Wrong: return "wrong";
        case BrandOutcome::Unknown: return "unknown";
    }
    return "?";
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::optional<std::string> read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::optional<std::vector<std::uint8_t>> read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
}

std::string first_line(const std::string& text) {
    auto nl = text.find('\n');
    return trim(nl == std::string::npos ? text : text.substr(0, nl));
}

} // namespace

CorpusLoad load_corpus(const std::string& root, const std::string& labels_path) {
    if (!fs::is_directory(root)) throw MissingRoot("corpus root not found: " + root);

    std::unordered_map<std::string, GroundTruth> labels;
    if (!labels_path.empty()) {
        std::ifstream in(labels_path);
        if (!in) throw UnparseableLabels("cannot open labels file: " + labels_path);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (trim(line).empty()) continue;
            try {
                auto j = nlohmann::json::parse(line);
                labels[j.at("id").get<std::string>()] = j.get<GroundTruth>();
            } catch (const std::exception& e) {
                throw UnparseableLabels("bad labels line " + std::to_string(lineno) + ": " +
                                        e.what());
            }
        }
    }

    CorpusLoad out;
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory()) dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());

    for (const auto& dir : dirs) {
        auto id = dir.filename().string();
        auto info = read_text(dir / "info.txt");
        if (!info) {
            out.warnings.push_back(id + ": missing info.txt, skipped");
            continue;
        }
        RawSample raw;
        raw.id = id;
        raw.url = first_line(*info);
        if (auto html = read_text(dir / "html.txt")) {
            raw.html = std::move(*html);
        } else {
            out.warnings.push_back(id + ": missing html.txt, using empty html");
        }
        raw.screenshot = read_bytes(dir / "shot.png");
        raw.logo_crop = read_bytes(dir / "logo.png");
        if (auto it = labels.find(id); it != labels.end()) raw.label = it->second;
        try {
            out.samples.push_back(validate_sample(std::move(raw)));
        } catch (const Error& e) {
            out.warnings.push_back(id + ": " + e.what() + ", skipped");
        }
    }
    return out;
}

BrandOutcome brand_outcome(const BrandVerdict& verdict, const std::optional<GroundTruth>& label) {
    if (verdict.is_no_brand()) return BrandOutcome::Unknown;
    if (!label || label->true_brands.empty()) return BrandOutcome::Wrong;
    auto got = lower(trim(*verdict.brand_name()));
    for (const auto& want : label->true_brands)
        if (lower(trim(want)) == got) return BrandOutcome::Correct;
    return BrandOutcome::Wrong;
}

namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

EvalReport compute_metrics(const std::vector<EvalRecord>& records) {
    EvalReport r;
    for (const auto& rec : records) {
        if (rec.error) {
            ++r.errored;
            continue;
        }
        if (rec.label) {
            switch (rec.brand_outcome) {
                case BrandOutcome::Correct: ++r.brand_counts.correct; break;
                case BrandOutcome::Wrong: ++r.brand_counts.wrong; break;
                case BrandOutcome::Unknown: ++r.brand_counts.unknown; break;
            }
        }
        if (!rec.classification || !rec.label) continue;
        bool predicted_phish = rec.classification->value == ClassValue::Phishing;
        bool is_phish = rec.label->label == Label::Phish;
        if (predicted_phish && is_phish) ++r.counts.tp;
        else if (predicted_phish && !is_phish) ++r.counts.fp;
        else if (!predicted_phish && is_phish) ++r.counts.fn;
        else ++r.counts.tn;
    }
    r.precision = ratio(r.counts.tp, r.counts.tp + r.counts.fp);
    r.recall = ratio(r.counts.tp, r.counts.tp + r.counts.fn);
    r.accuracy = ratio(r.counts.tp + r.counts.tn, r.counts.total());
    r.f1 = (r.precision + r.recall) == 0.0
               ? 0.0
               : 2.0 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

nlohmann::json EvalRecord::to_json() const {
    nlohmann::json j;
    j["id"] = id;
    j["verdict"] = verdict;
    j["classification"] =
        classification ? nlohmann::json(*classification) : nlohmann::json(nullptr);
    j["label"] = label ? nlohmann::json(*label) : nlohmann::json(nullptr);
    j["brand_outcome"] = to_string(brand_outcome);
    j["wall_time_s"] = wall_time_s;
    j["error"] = error ? nlohmann::json(*error) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json EvalReport::to_json() const {
    nlohmann::json j;
    j["counts"] = counts;
    j["precision"] = precision;
    j["recall"] = recall;
    j["accuracy"] = accuracy;
    j["f1"] = f1;
    j["brand_counts"] = {{"correct", brand_counts.correct},
                         {"wrong", brand_counts.wrong},
                         {"unknown", brand_counts.unknown}};
    j["errored"] = errored;
    j["config"] = config_echo;
    return j;
}

std::string EvalReport::to_markdown() const {
    std::ostringstream md;
    md.setf(std::ios::fixed);
    md.precision(4);
    md << "# Evaluation Report\n\n";
    md << "## Brand Recognition\n\n";
    md << "| Correct | Wrong | Unknown |\n|---|---|---|\n";
    md << "| " << brand_counts.correct << " | " << brand_counts.wrong << " | "
       << brand_counts.unknown << " |\n\n";
    md << "## Confusion Matrix (phishing = positive)\n\n";
    md << "| TP | FP | TN | FN |\n|---|---|---|---|\n";
    md << "| " << counts.tp << " | " << counts.fp << " | " << counts.tn << " | " << counts.fn
       << " |\n\n";
    md << "## Metrics\n\n";
    md << "| Precision | Recall | Accuracy | F1 |\n|---|---|---|---|\n";
    md << "| " << precision << " | " << recall << " | " << accuracy << " | " << f1 << " |\n\n";
    md << "Errored samples (excluded from metrics): " << errored << "\n";
    return md.str();
}

SuiteResult run_suite(const std::vector<WebSample>& samples, const RunConfig& cfg,
                      const ToolClients& clients, const GatewayFactory& gateways) {
    cfg.validate();
    Pipeline pipeline(clients, cfg.agent, cfg.checker, cfg.one_shot);

    std::vector<EvalRecord> records(samples.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            auto i = next.fetch_add(1);
            if (i >= samples.size()) break;
            const auto& sample = samples[i];
            EvalRecord rec;
            rec.id = sample.id;
            rec.label = sample.label;
            auto start = std::chrono::steady_clock::now();
            try {
                auto gateway = gateways(sample.id);
                auto outcome = pipeline.analyze(sample, *gateway);
                rec.verdict = std::move(outcome.verdict);
                rec.classification = outcome.classification;
                rec.brand_outcome = brand_outcome(rec.verdict, rec.label);
            } catch (const std::exception& e) {
                rec.verdict = BrandVerdict::no_brand("errored");
                rec.error = e.what();
            }
            // wall time is only meaningful (and only deterministic to omit)
            // outside replay mode
            if (cfg.mode != RunMode::Replay) {
                std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
                rec.wall_time_s = dt.count();
            }
            records[i] = std::move(rec);
        }
    };
    std::vector<std::thread> pool;
    auto n_workers = std::min<std::size_t>(cfg.concurrency, std::max<std::size_t>(samples.size(), 1));
    for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::sort(records.begin(), records.end(),
              [](const EvalRecord& a, const EvalRecord& b) { return a.id < b.id; });

    SuiteResult result;
    result.records = std::move(records);
    result.report = compute_metrics(result.records);
    result.report.config_echo = {
        {"mode", to_string(cfg.mode)},
        {"list_size", cfg.checker.list_size},
        {"redirection_check", cfg.checker.redirection_check},
        {"agent_budget", cfg.agent.tool_budget},
        {"condenser_budget", cfg.agent.condenser_budget},
        {"one_shot", cfg.one_shot},
    };
    return result;
}

void write_report(const SuiteResult& result, const std::string& out_dir) {
    fs::create_directories(out_dir);
    nlohmann::json j = result.report.to_json();
    auto& recs = j["records"] = nlohmann::json::array();
    for (const auto& r : result.records) recs.push_back(r.to_json());
    std::ofstream json_out(fs::path(out_dir) / "report.json", std::ios::binary);
    json_out << j.dump(2) << "\n";
    std::ofstream md_out(fs::path(out_dir) / "report.md", std::ios::binary);
    md_out << result.report.to_markdown();
}

} // namespace gep
