#pragma once
// JSON-lines artifacts exchanged between pipeline stages.
//
// Every file written here starts with one metadata object
// {"_meta": {...}} carrying the RNG seed and config hash of the run that
// produced it. Readers skip that line.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgfake/harness.hpp"
#include "kgfake/kg.hpp"
#include "kgfake/miner.hpp"

namespace kgfake {

struct ArtifactMeta {
    std::string stage;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string kg_digest;

    nlohmann::json to_json() const;
};

// Fields: subject, predicate, object_real, object_fake, score_num, score_den,
// score, tier, category.
nlohmann::json candidate_to_json(const KnowledgeGraph& kg, const FakeCandidate& c);
// Throws ConsistencyError when names do not resolve or the seed is not a fact.
FakeCandidate candidate_from_json(const KnowledgeGraph& kg, const nlohmann::json& j);

nlohmann::json record_to_json(const FactRecord& r);
FactRecord record_from_json(const nlohmann::json& j);

nlohmann::json verdict_to_json(const Verdict& v);
Verdict verdict_from_json(const nlohmann::json& j);

nlohmann::json skip_to_json(const Skip& s);

// Non-empty, non-meta lines as parsed objects. Throws ParseError with the
// line number on malformed JSON, PathError when the file cannot be opened.
std::vector<nlohmann::json> read_jsonl(std::istream& in);
std::vector<nlohmann::json> read_jsonl_file(const std::string& path);
// Meta object of a file, or null when it has none.
nlohmann::json read_meta_file(const std::string& path);

void write_jsonl(std::ostream& out, const ArtifactMeta& meta, std::span<const nlohmann::json> rows);
void write_jsonl_file(const std::string& path, const ArtifactMeta& meta, std::span<const nlohmann::json> rows);

std::vector<FactRecord> read_records_file(const std::string& path);
std::vector<Verdict> read_verdicts_file(const std::string& path);

}  // namespace kgfake
