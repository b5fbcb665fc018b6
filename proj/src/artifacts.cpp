#include "kgfake/artifacts.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "kgfake/error.hpp"

namespace kgfake {

using nlohmann::json;

json ArtifactMeta::to_json() const {
    return {{"_meta", {{"stage", stage}, {"seed", seed}, {"config_hash", config_hash}, {"kg_digest", kg_digest}}}};
}

namespace {

std::optional<Tier> parse_tier(const json& j) {
    if (j.is_null()) return std::nullopt;
    const auto& s = j.get_ref<const std::string&>();
    if (s == "high") return Tier::kHigh;
    if (s == "low") return Tier::kLow;
    if (s == "none") return std::nullopt;
    throw ConsistencyError("unknown tier '" + s + "'");
}

template <typename Fn>
auto guarded(const char* what, Fn&& fn) {
    try {
        return fn();
    } catch (const json::exception& e) {
        throw ConsistencyError(std::string("malformed ") + what + ": " + e.what());
    }
}

}  // namespace

json candidate_to_json(const KnowledgeGraph& kg, const FakeCandidate& c) {
    return {
        {"subject", kg.entity_name(c.seed.subject)},
        {"predicate", kg.relation_name(c.seed.relation)},
        {"object_real", kg.entity_name(c.seed.object)},
        {"object_fake", kg.entity_name(c.fake_object)},
        {"score_num", c.score.numerator()},
        {"score_den", c.score.denominator()},
        {"score", c.score.to_double()},
        {"tier", c.tier ? json(to_string(*c.tier)) : json(nullptr)},
        {"category", kg.category_of(c.seed.relation)},
    };
}

FakeCandidate candidate_from_json(const KnowledgeGraph& kg, const json& j) {
    return guarded("candidate", [&] {
        const auto& subject = j.at("subject").get_ref<const std::string&>();
        const auto& predicate = j.at("predicate").get_ref<const std::string&>();
        const auto& real = j.at("object_real").get_ref<const std::string&>();
        const auto& fake = j.at("object_fake").get_ref<const std::string&>();
        auto seed = kg.find_triple(subject, predicate, real);
        auto fake_id = kg.find_entity(fake);
        if (!seed || !kg.contains(*seed)) throw NotAFactError("<" + subject + ", " + predicate + ", " + real + ">");
        if (!fake_id) throw ConsistencyError("fake object '" + fake + "' is not an entity of the graph");
        auto den = j.at("score_den").get<std::uint64_t>();
        if (den == 0) throw ConsistencyError("candidate score has zero denominator");
        FakeCandidate c;
        c.seed = *seed;
        c.fake_object = *fake_id;
        c.score = Rational(j.at("score_num").get<std::uint64_t>(), den);
        c.tier = j.contains("tier") ? parse_tier(j.at("tier")) : std::nullopt;
        return c;
    });
}

json record_to_json(const FactRecord& r) {
    return {
        {"id", r.id},
        {"subject", r.subject},
        {"predicate", r.predicate},
        {"object_real", r.object_real},
        {"object_used", r.object_used},
        {"label", to_string(r.label)},
        {"tier", tier_name(r.tier)},
        {"score_num", r.score ? json(r.score->numerator()) : json(nullptr)},
        {"score_den", r.score ? json(r.score->denominator()) : json(nullptr)},
        {"category", r.category},
        {"statement", r.statement},
        {"generator_model", r.generator_model},
    };
}

FactRecord record_from_json(const json& j) {
    return guarded("record", [&] {
        FactRecord r;
        r.id = j.at("id").get<std::string>();
        r.subject = j.at("subject").get<std::string>();
        r.predicate = j.at("predicate").get<std::string>();
        r.object_real = j.at("object_real").get<std::string>();
        r.object_used = j.at("object_used").get<std::string>();
        const auto& label = j.at("label").get_ref<const std::string&>();
        if (label != "real" && label != "fake") throw ConsistencyError("unknown label '" + label + "'");
        r.label = label == "real" ? Label::kReal : Label::kFake;
        r.tier = parse_tier(j.at("tier"));
        if (!j.at("score_num").is_null()) {
            auto den = j.at("score_den").get<std::uint64_t>();
            if (den == 0) throw ConsistencyError("record score has zero denominator");
            r.score = Rational(j.at("score_num").get<std::uint64_t>(), den);
        }
        r.category = j.at("category").get<std::string>();
        r.statement = j.at("statement").get<std::string>();
        r.generator_model = j.at("generator_model").get<std::string>();
        if ((r.label == Label::kReal) != (r.object_used == r.object_real) ||
            (r.label == Label::kReal) != !r.tier.has_value()) {
            throw ConsistencyError("record " + r.id + " has inconsistent label, tier and objects");
        }
        if (r.statement.empty()) throw ConsistencyError("record " + r.id + " has an empty statement");
        return r;
    });
}

json verdict_to_json(const Verdict& v) {
    return {
        {"record_id", v.record_id},
        {"judge_model", v.judge_model},
        {"raw_output", v.raw_output},
        {"parsed", to_string(v.parsed)},
    };
}

Verdict verdict_from_json(const json& j) {
    return guarded("verdict", [&] {
        Verdict v;
        v.record_id = j.at("record_id").get<std::string>();
        v.judge_model = j.at("judge_model").get<std::string>();
        v.raw_output = j.at("raw_output").get<std::string>();
        const auto& parsed = j.at("parsed").get_ref<const std::string&>();
        if (parsed == "real") {
            v.parsed = Parsed::kReal;
        } else if (parsed == "fake") {
            v.parsed = Parsed::kFake;
        } else if (parsed == "invalid") {
            v.parsed = Parsed::kInvalid;
        } else {
            throw ConsistencyError("unknown verdict '" + parsed + "'");
        }
        return v;
    });
}

json skip_to_json(const Skip& s) { return {{"id", s.id}, {"detail", s.detail}, {"reason", s.reason}}; }

std::vector<json> read_jsonl(std::istream& in) {
    std::vector<json> rows;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw ParseError(number, "malformed JSON object");
        if (j.contains("_meta")) continue;
        rows.push_back(std::move(j));
    }
    return rows;
}

std::vector<json> read_jsonl_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PathError(path);
    return read_jsonl(in);
}

json read_meta_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PathError(path);
    std::string line;
    if (!std::getline(in, line)) return nullptr;
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("_meta")) return nullptr;
    return j["_meta"];
}

void write_jsonl(std::ostream& out, const ArtifactMeta& meta, std::span<const json> rows) {
    out << meta.to_json().dump() << '\n';
    for (const auto& row : rows) out << row.dump() << '\n';
}

void write_jsonl_file(const std::string& path, const ArtifactMeta& meta, std::span<const json> rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PathError(path);
    write_jsonl(out, meta, rows);
}

std::vector<FactRecord> read_records_file(const std::string& path) {
    std::vector<FactRecord> out;
    for (const auto& j : read_jsonl_file(path)) out.push_back(record_from_json(j));
    return out;
}

std::vector<Verdict> read_verdicts_file(const std::string& path) {
    std::vector<Verdict> out;
    for (const auto& j : read_jsonl_file(path)) out.push_back(verdict_from_json(j));
    return out;
}

}  // namespace kgfake
