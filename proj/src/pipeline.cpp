#include "kgfake/pipeline.hpp"

#include <filesystem>
#include <fstream>

#include <spdlog/spdlog.h>

#include "kgfake/artifacts.hpp"
#include "kgfake/error.hpp"
#include "kgfake/hash.hpp"
#include "kgfake/miner.hpp"
#include "kgfake/sampling.hpp"

namespace kgfake {

using nlohmann::json;

std::string RunConfig::out_file(const std::string& name) const {
    return (std::filesystem::path(out_dir) / name).string();
}

std::string RunConfig::candidates_file() const {
    return candidates_path.empty() ? out_file("candidates.jsonl") : candidates_path;
}

std::string RunConfig::records_file() const { return records_path.empty() ? out_file("records.jsonl") : records_path; }

std::string RunConfig::verdicts_file() const {
    return verdicts_path.empty() ? out_file("verdicts.jsonl") : verdicts_path;
}

namespace {

json endpoint_json(const EndpointConfig& e) {
    json j = {{"kind", to_string(e.kind)}};
    if (e.kind == ProviderKind::kRemote) {
        j["base_url"] = e.base_url;
        j["path"] = e.path;
        j["system_role"] = e.system_role;
        j["max_attempts"] = e.retry.max_attempts;
    }
    return j;
}

}  // namespace

json RunConfig::canonical() const {
    CategorySet sorted(denylist.begin(), denylist.end());
    return {
        {"denylist", std::vector<std::string>(sorted.begin(), sorted.end())},
        {"min_category_triples", min_category_triples},
        {"seed_source", seeds_path.empty() ? "sample" : "file"},
        {"sample_per_category", sample_per_category},
        {"seed", seed},
        {"policy", policy},
        {"top_k", top_k},
        {"strict_exclusion", strict_exclusion},
        {"real_source", real_seeds_path.empty() ? "sample" : "file"},
        {"real_per_category", real_per_category},
        {"generator_model", generator_model},
        {"generator_endpoint", endpoint_json(generator_endpoint)},
        {"generator_temperature", generator_temperature},
        {"generator_max_tokens", generator_max_tokens},
        {"judge_models", judge_models},
        {"judge_endpoint", endpoint_json(judge_endpoint)},
        {"judge_temperature", judge_temperature},
        {"judge_max_tokens", judge_max_tokens},
        {"invalid_policy", invalid_policy == InvalidPolicy::kExclude ? "exclude" : "count-wrong"},
        {"jury", jury},
        {"confusion", confusion},
    };
}

std::string RunConfig::config_hash() const { return fnv1a_hex(canonical().dump()); }

namespace {

ParseOptions parse_options(const RunConfig& config) {
    ParseOptions o;
    o.denylist = CategorySet(config.denylist.begin(), config.denylist.end());
    o.min_category_triples = config.min_category_triples;
    return o;
}

KnowledgeGraph load_graph(const RunConfig& config, bool with_descriptions) {
    if (config.kg_path.empty()) throw PathError("(no --kg given)");
    auto kg = parse_triples_file(config.kg_path, parse_options(config));
    if (with_descriptions && !config.descriptions_path.empty()) {
        kg = load_descriptions_file(config.descriptions_path, std::move(kg));
    }
    return kg;
}

ArtifactMeta meta_for(const RunConfig& config, std::string stage, std::string kg_digest = {}) {
    return {std::move(stage), config.seed, config.config_hash(), std::move(kg_digest)};
}

void ensure_out_dir(const RunConfig& config) {
    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (ec) throw PathError(config.out_dir);
}

void write_skips(const RunConfig& config, const std::string& name, const ArtifactMeta& meta,
                 const std::vector<Skip>& skips) {
    std::vector<json> rows;
    for (const auto& s : skips) {
        spdlog::warn("skipped {} ({}): {}", s.id, s.detail, s.reason);
        rows.push_back(skip_to_json(s));
    }
    write_jsonl_file(config.out_file(name), meta, rows);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PathError(path);
    out << text;
}

}  // namespace

IngestSummary cmd_ingest(const RunConfig& config) {
    ensure_out_dir(config);
    auto kg = load_graph(config, true);
    IngestSummary s;
    s.triples = kg.triple_count();
    s.entities = kg.entity_count();
    s.relations = kg.relation_count();
    s.categories = kg.category_counts();
    s.stats = kg.parse_stats();
    s.descriptions = kg.description_stats();
    s.kg_digest = kg.digest();

    json manifest = {
        {"_meta", meta_for(config, "ingest", s.kg_digest).to_json()["_meta"]},
        {"triples", s.triples},
        {"entities", s.entities},
        {"relations", s.relations},
        {"categories", s.categories},
        {"lines", s.stats.lines},
        {"comment_lines", s.stats.comment_lines},
        {"blank_lines", s.stats.blank_lines},
        {"duplicates", s.stats.duplicates},
        {"denylisted", s.stats.denylisted},
        {"pruned_rare", s.stats.pruned_rare},
        {"descriptions_attached", s.descriptions.attached},
        {"descriptions_skipped", s.descriptions.skipped_unknown},
    };
    write_text(config.out_file("graph_manifest.json"), manifest.dump(2) + "\n");
    return s;
}

MineSummary cmd_mine(const RunConfig& config) {
    ensure_out_dir(config);
    auto kg = load_graph(config, false);

    std::vector<Triple> seeds;
    if (!config.seeds_path.empty()) {
        auto named = read_named_triples_file(config.seeds_path);
        seeds = resolve_seeds(kg, named);
    } else {
        seeds = sample_per_category(kg, config.sample_per_category, config.seed, "seeds");
    }

    MinePolicy policy = ExtremesOnly{};
    if (config.policy == "topk") {
        policy = TopK{config.top_k};
    } else if (config.policy != "extremes") {
        throw PreconditionError("unknown mining policy '" + config.policy + "'");
    }
    MinerOptions options;
    options.exclusion = config.strict_exclusion ? Exclusion::kStrict : Exclusion::kFormal;
    options.workers = config.workers;

    auto result = mine(kg, seeds, policy, options);
    auto meta = meta_for(config, "mine", kg.digest());

    std::vector<json> rows;
    rows.reserve(result.candidates.size());
    for (const auto& c : result.candidates) rows.push_back(candidate_to_json(kg, c));
    write_jsonl_file(config.candidates_file(), meta, rows);

    std::vector<Skip> skips;
    for (const auto& s : result.skipped) {
        skips.push_back({kg.describe(s.seed), kg.category_of(s.seed.relation), s.reason});
    }
    write_skips(config, "mine_skips.jsonl", meta, skips);

    return {seeds.size(), result.candidates.size(), result.skipped.size()};
}

GenerateSummary cmd_generate(const RunConfig& config) {
    ensure_out_dir(config);
    auto kg = load_graph(config, true);

    std::vector<FakeCandidate> candidates;
    for (const auto& j : read_jsonl_file(config.candidates_file())) candidates.push_back(candidate_from_json(kg, j));

    std::vector<Triple> real;
    if (!config.real_seeds_path.empty()) {
        auto named = read_named_triples_file(config.real_seeds_path);
        real = resolve_seeds(kg, named);
    } else if (config.real_per_category > 0) {
        real = sample_per_category(kg, config.real_per_category, config.seed, "real");
    }

    auto provider = make_provider(config.generator_endpoint);
    GenerationSettings settings;
    settings.model = config.generator_model;
    settings.temperature = config.generator_temperature;
    settings.max_tokens = config.generator_max_tokens;
    settings.parallelism = config.parallelism;
    auto result = assemble_records(candidates, real, kg, *provider, settings);

    auto meta = meta_for(config, "generate", kg.digest());
    std::vector<json> rows;
    GenerateSummary s;
    for (const auto& r : result.records) {
        rows.push_back(record_to_json(r));
        ++(r.label == Label::kFake ? s.fake : s.real);
    }
    write_jsonl_file(config.records_file(), meta, rows);
    write_skips(config, "generate_skips.jsonl", meta, result.skipped);
    s.records = result.records.size();
    s.skipped = result.skipped.size();
    return s;
}

JudgeSummary cmd_judge(const RunConfig& config) {
    ensure_out_dir(config);
    auto records = read_records_file(config.records_file());
    auto provider = make_provider(config.judge_endpoint);
    JudgeSettings settings;
    settings.models = config.judge_models;
    settings.temperature = config.judge_temperature;
    settings.max_tokens = config.judge_max_tokens;
    settings.parallelism = config.parallelism;
    auto result = collect_verdicts(records, *provider, settings);

    auto meta = meta_for(config, "judge");
    std::vector<json> rows;
    JudgeSummary s;
    for (const auto& v : result.verdicts) {
        rows.push_back(verdict_to_json(v));
        if (v.parsed == Parsed::kInvalid) ++s.invalid;
    }
    write_jsonl_file(config.verdicts_file(), meta, rows);
    write_skips(config, "judge_skips.jsonl", meta, result.skipped);
    s.verdicts = result.verdicts.size();
    s.skipped = result.skipped.size();
    return s;
}

ReportSummary cmd_report(const RunConfig& config) {
    ensure_out_dir(config);
    auto records = read_records_file(config.records_file());
    auto verdicts = read_verdicts_file(config.verdicts_file());
    auto report = evaluate(records, verdicts, {config.invalid_policy, config.jury});

    const std::string header =
        "# seed=" + std::to_string(config.seed) + " config_hash=" + config.config_hash() + "\n";
    ReportSummary s;
    s.rows = report.rows.size();
    auto emit = [&](const std::string& name, const std::string& csv) {
        auto path = config.out_file(name);
        write_text(path, header + csv);
        s.files.push_back(path);
    };
    emit("summary.csv", emit_report(report, ReportLayout::kSummaryTable));
    emit("categories.csv", emit_report(report, ReportLayout::kCategoryBreakdown));
    if (config.confusion) emit("confusion.csv", emit_confusion(records, verdicts));
    return s;
}

}  // namespace kgfake
