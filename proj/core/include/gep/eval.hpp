// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gep/pipeline.hpp"
#include "gep/types.hpp"

namespace gep {

enum class BrandOutcome { Correct, Wrong, Unknown };

/// One evaluated sample.
struct EvalRecord {
    std::string id;
    BrandVerdict verdict;
    std::optional<Classification> classification;
    std::optional<GroundTruth> label;
    BrandOutcome brand_outcome = BrandOutcome::Unknown;
    double wall_time_s = 0.0; // reported as 0 in replay mode for determinism
    std::optional<std::string> error; // set when the sample errored

    nlohmann::json to_json() const;
};

struct BrandCounts {
    std::uint64_t correct = 0;
    std::uint64_t wrong = 0;
    std::uint64_t unknown = 0;
};

/// Aggregated metrics. Phishing is the positive class. Each ratio is 0 when
/// its denominator is 0.
struct EvalReport {
    ConfusionCounts counts;
    double precision = 0.0;
    double recall = 0.0;
    double accuracy = 0.0;
    double f1 = 0.0;
    BrandCounts brand_counts;
    std::uint64_t errored = 0;
    nlohmann::json config_echo;

    nlohmann::json to_json() const;
    std::string to_markdown() const;
};

struct CorpusLoad {
    std::vector<WebSample> samples;
    std::vector<std::string> warnings;
};

// One sample per directory under root: info.txt (URL), html.txt, optional
// shot.png / logo.png. Ground truth from labels.jsonl {id, label, true_brand?}
// where true_brand is a string or list. Unreadable samples produce warnings,
// not failures. Throws MissingRoot / UnparseableLabels.
CorpusLoad load_corpus(const std::string& root, const std::string& labels_path = "");

// Brand correctness: case-insensitive trimmed match against any accepted
// true_brand. NoBrand verdicts are Unknown.
BrandOutcome brand_outcome(const BrandVerdict& verdict, const std::optional<GroundTruth>& label);

// Confusion counts and metric formulas over classified, labeled records.
EvalReport compute_metrics(const std::vector<EvalRecord>& records);

struct SuiteResult {
    std::vector<EvalRecord> records; // sorted by sample id
    EvalReport report;
};

// Runs the full pipeline per sample with bounded parallelism. Per-sample
// failures land in the record's error field; only configuration errors throw.
SuiteResult run_suite(const std::vector<WebSample>& samples, const RunConfig& cfg,
                      const ToolClients& clients, const GatewayFactory& gateways);

// Writes report.json and report.md under out_dir.
void write_report(const SuiteResult& result, const std::string& out_dir);

std::string to_string(BrandOutcome o);

} // namespace gep
