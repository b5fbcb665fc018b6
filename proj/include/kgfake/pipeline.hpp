#pragma once
// File-staged pipeline: ingest -> mine -> generate -> judge -> report.
//
// Each stage reads its inputs from disk and writes its outputs into
// RunConfig::out_dir, so stages can be rerun independently.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgfake/gateway.hpp"
#include "kgfake/harness.hpp"

namespace kgfake {

struct RunConfig {
    std::string kg_path;
    std::string descriptions_path;
    std::string out_dir = ".";

    std::vector<std::string> denylist{"base", "common", "dataworld", "freebase", "kg", "type", "user"};
    std::size_t min_category_triples = 0;

    // Seeds: explicit file, else a per-category sample (0 = every triple).
    std::string seeds_path;
    std::size_t sample_per_category = 0;
    std::uint64_t seed = 0;

    std::string policy = "extremes";  // "extremes" | "topk"
    std::size_t top_k = 1;
    bool strict_exclusion = false;
    std::size_t workers = 1;

    // Real facts for generation: explicit file, else a per-category sample (0 = none).
    std::string real_seeds_path;
    std::size_t real_per_category = 0;

    std::string generator_model = "generator";
    EndpointConfig generator_endpoint;
    double generator_temperature = 0.7;
    int generator_max_tokens = 256;

    std::vector<std::string> judge_models{"judge"};
    EndpointConfig judge_endpoint;
    double judge_temperature = 0.0;
    int judge_max_tokens = 16;

    std::size_t parallelism = 4;

    InvalidPolicy invalid_policy = InvalidPolicy::kExclude;
    bool jury = false;
    bool confusion = false;

    // Stage file locations; empty means <out_dir>/<default name>.
    std::string candidates_path;
    std::string records_path;
    std::string verdicts_path;

    std::string candidates_file() const;
    std::string records_file() const;
    std::string verdicts_file() const;
    std::string out_file(const std::string& name) const;

    // Canonical JSON of every setting that can change an artifact's content.
    // File paths and the API token are left out.
    nlohmann::json canonical() const;
    std::string config_hash() const;
};

struct IngestSummary {
    std::size_t triples = 0;
    std::size_t entities = 0;
    std::size_t relations = 0;
    std::map<std::string, std::size_t> categories;
    ParseStats stats;
    DescriptionStats descriptions;
    std::string kg_digest;
};

struct MineSummary {
    std::size_t seeds = 0;
    std::size_t candidates = 0;
    std::size_t skipped = 0;
};

struct GenerateSummary {
    std::size_t records = 0;
    std::size_t fake = 0;
    std::size_t real = 0;
    std::size_t skipped = 0;
};

struct JudgeSummary {
    std::size_t verdicts = 0;
    std::size_t invalid = 0;
    std::size_t skipped = 0;
};

struct ReportSummary {
    std::size_t rows = 0;
    std::vector<std::string> files;
};

// Writes graph_manifest.json.
IngestSummary cmd_ingest(const RunConfig& config);
// Writes candidates.jsonl and mine_skips.jsonl.
MineSummary cmd_mine(const RunConfig& config);
// Writes records.jsonl and generate_skips.jsonl.
GenerateSummary cmd_generate(const RunConfig& config);
// Writes verdicts.jsonl and judge_skips.jsonl.
JudgeSummary cmd_judge(const RunConfig& config);
// Writes summary.csv, categories.csv and, on request, confusion.csv.
ReportSummary cmd_report(const RunConfig& config);

}  // namespace kgfake
