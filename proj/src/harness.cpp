#include "kgfake/harness.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

#include "kgfake/error.hpp"
#include "kgfake/hash.hpp"

namespace kgfake {

std::string to_string(Label label) { return label == Label::kReal ? "real" : "fake"; }

std::string to_string(Parsed parsed) {
    switch (parsed) {
        case Parsed::kReal: return "real";
        case Parsed::kFake: return "fake";
        case Parsed::kInvalid: return "invalid";
    }
    return "invalid";
}

std::string tier_name(const std::optional<Tier>& tier) { return tier ? to_string(*tier) : "none"; }

std::string record_id(std::string_view subject, std::string_view predicate, std::string_view object_real,
                      std::string_view object_used, const std::optional<Tier>& tier,
                      std::string_view generator_model) {
    return Fnv1a{}
        .field(subject)
        .field(predicate)
        .field(object_real)
        .field(object_used)
        .field(tier_name(tier))
        .field(generator_model)
        .hex();
}

namespace {

std::string_view trim(std::string_view s) {
    auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

FactRecord make_record(const KnowledgeGraph& kg, const Triple& seed, EntityId used, std::optional<Tier> tier,
                       std::optional<Rational> score, const std::string& generator) {
    FactRecord r;
    r.subject = kg.entity_name(seed.subject);
    r.predicate = kg.relation_name(seed.relation);
    r.object_real = kg.entity_name(seed.object);
    r.object_used = kg.entity_name(used);
    r.label = tier ? Label::kFake : Label::kReal;
    r.tier = tier;
    r.score = score;
    r.category = kg.category_of(seed.relation);
    r.generator_model = generator;
    r.id = record_id(r.subject, r.predicate, r.object_real, r.object_used, r.tier, generator);
    return r;
}

}  // namespace

AssembleResult assemble_records(std::span<const FakeCandidate> candidates, std::span<const Triple> real_seeds,
                                const KnowledgeGraph& kg, CompletionProvider& generator,
                                const GenerationSettings& settings) {
    for (const auto& seed : real_seeds) {
        if (!kg.contains(seed)) throw NotAFactError(kg.describe(seed));
    }

    struct Pending {
        FactRecord record;
        Triple stated;
    };
    std::vector<Pending> pending;
    AssembleResult result;
    std::set<std::string> seen;

    auto enqueue = [&](FactRecord record, const Triple& stated) {
        if (!seen.insert(record.id).second) {
            result.skipped.push_back({record.id, record.subject, "duplicate record"});
            return;
        }
        pending.push_back({std::move(record), stated});
    };

    for (const auto& c : candidates) {
        if (c.fake_object == c.seed.object || kg.contains(c.fake_triple())) {
            throw ConsistencyError("candidate " + kg.describe(c.fake_triple()) + " is a fact in the graph");
        }
        if (!c.tier) {
            throw PreconditionError("candidate " + kg.describe(c.fake_triple()) +
                                    " has no plausibility tier; records need extremes-mined candidates");
        }
        enqueue(make_record(kg, c.seed, c.fake_object, c.tier, c.score, settings.model), c.fake_triple());
    }
    for (const auto& seed : real_seeds) {
        enqueue(make_record(kg, seed, seed.object, std::nullopt, std::nullopt, settings.model), seed);
    }

    std::vector<CompletionRequest> requests;
    requests.reserve(pending.size());
    for (const auto& p : pending) {
        auto description = kg.description_of(p.stated.subject).value_or(kNoDescription);
        CompletionRequest req;
        req.prompt = build_generation_prompt(p.record.subject, description, p.record.predicate, p.record.object_used);
        req.model_name = settings.model;
        req.temperature = settings.temperature;
        req.max_tokens = settings.max_tokens;
        req.request_id = p.record.id;
        requests.push_back(std::move(req));
    }

    auto responses = complete_batch(generator, requests, settings.parallelism);
    for (std::size_t i = 0; i < pending.size(); ++i) {
        auto& record = pending[i].record;
        if (!responses[i].ok()) {
            result.skipped.push_back({record.id, record.subject, responses[i].error_category + ": " + responses[i].error});
            continue;
        }
        auto statement = trim(responses[i].result->raw_text);
        if (statement.empty()) {
            result.skipped.push_back({record.id, record.subject, "empty statement"});
            continue;
        }
        record.statement = std::string(statement);
        result.records.push_back(std::move(record));
    }
    return result;
}

Parsed parse_verdict(std::string_view raw) {
    std::string lower(raw);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

    auto real = lower.find("[real]");
    auto fake = lower.find("[fake]");
    if (real != std::string::npos || fake != std::string::npos) return real < fake ? Parsed::kReal : Parsed::kFake;

    std::string_view rest(lower);
    auto start = rest.find_first_not_of(" \t\r\n\"'`*_:.-");
    if (start == std::string_view::npos) return Parsed::kInvalid;
    rest.remove_prefix(start);
    auto leading_word = [&](std::string_view word) {
        if (!rest.starts_with(word)) return false;
        return rest.size() == word.size() || !std::isalnum(static_cast<unsigned char>(rest[word.size()]));
    };
    if (leading_word("real")) return Parsed::kReal;
    if (leading_word("fake")) return Parsed::kFake;
    return Parsed::kInvalid;
}

VerdictResult collect_verdicts(std::span<const FactRecord> records, CompletionProvider& judge,
                               const JudgeSettings& settings) {
    std::vector<CompletionRequest> requests;
    std::vector<std::pair<const FactRecord*, const std::string*>> owners;
    for (const auto& model : settings.models) {
        for (const auto& record : records) {
            CompletionRequest req;
            req.prompt = build_detection_prompt(record.statement);
            req.model_name = model;
            req.temperature = settings.temperature;
            req.max_tokens = settings.max_tokens;
            req.request_id = record.id + "|" + model;
            requests.push_back(std::move(req));
            owners.emplace_back(&record, &model);
        }
    }

    auto responses = complete_batch(judge, requests, settings.parallelism);
    VerdictResult result;
    for (std::size_t i = 0; i < responses.size(); ++i) {
        const auto& [record, model] = owners[i];
        if (!responses[i].ok()) {
            result.skipped.push_back({record->id, *model, responses[i].error_category + ": " + responses[i].error});
            continue;
        }
        const auto& raw = responses[i].result->raw_text;
        result.verdicts.push_back({record->id, *model, raw, parse_verdict(raw)});
    }
    return result;
}

// ---------------------------------------------------------------------------
// Evaluation

std::optional<Rational> DetectionReport::accuracy(const ReportRow& row) const {
    auto total = row.evaluable(policy);
    if (total == 0) return std::nullopt;
    return Rational(row.n_correct, total);
}

namespace {

int tier_rank(const std::optional<Tier>& tier) { return tier ? static_cast<int>(*tier) : 2; }

using RowKey = std::tuple<std::string, std::string, std::string, int, int>;

RowKey key_of(const std::string& judge, const FactRecord& r) {
    return {judge, r.generator_model, r.category, tier_rank(r.tier), static_cast<int>(r.label)};
}

bool correct(Parsed parsed, Label label) {
    return (parsed == Parsed::kReal && label == Label::kReal) || (parsed == Parsed::kFake && label == Label::kFake);
}

}  // namespace

DetectionReport evaluate(std::span<const FactRecord> records, std::span<const Verdict> verdicts,
                         const EvaluateOptions& options) {
    std::unordered_map<std::string, const FactRecord*> by_id;
    for (const auto& r : records) {
        if (!by_id.emplace(r.id, &r).second) throw ConsistencyError("duplicate record id " + r.id);
    }

    std::map<RowKey, ReportRow> rows;
    auto tally = [&](const std::string& judge, const FactRecord& record, Parsed parsed) {
        auto [it, fresh] = rows.try_emplace(key_of(judge, record));
        auto& row = it->second;
        if (fresh) {
            row.judge_model = judge;
            row.generator_model = record.generator_model;
            row.category = record.category;
            row.tier = record.tier;
            row.label = record.label;
        }
        ++row.n;
        if (parsed == Parsed::kInvalid) ++row.n_invalid;
        if (correct(parsed, record.label)) ++row.n_correct;
    };

    std::set<std::pair<std::string_view, std::string_view>> seen;
    // record id -> (real votes, fake votes)
    std::map<std::string_view, std::pair<std::size_t, std::size_t>> votes;
    for (const auto& v : verdicts) {
        auto it = by_id.find(v.record_id);
        if (it == by_id.end()) throw ConsistencyError("verdict references unknown record " + v.record_id);
        if (!seen.emplace(v.record_id, v.judge_model).second) {
            throw ConsistencyError("duplicate verdict for record " + v.record_id + " by " + v.judge_model);
        }
        tally(v.judge_model, *it->second, v.parsed);
        auto& [real_votes, fake_votes] = votes[v.record_id];
        if (v.parsed == Parsed::kReal) ++real_votes;
        if (v.parsed == Parsed::kFake) ++fake_votes;
    }

    if (options.jury) {
        const std::string jury(kJuryModel);
        for (const auto& [id, count] : votes) {
            Parsed decision = count.first > count.second   ? Parsed::kReal
                              : count.second > count.first ? Parsed::kFake
                                                           : Parsed::kInvalid;
            tally(jury, *by_id.at(std::string(id)), decision);
        }
    }

    DetectionReport report;
    report.policy = options.invalid_policy;
    report.rows.reserve(rows.size());
    for (auto& [key, row] : rows) report.rows.push_back(std::move(row));
    return report;
}

// ---------------------------------------------------------------------------
// Emission

std::string format_percent(const Rational& value) {
    // round(100 * 100 * num / den), half up, in integers.
    using Wide = unsigned __int128;
    Wide scaled = static_cast<Wide>(value.numerator()) * 10000;
    Wide den = value.denominator();
    Wide hundredths = (scaled * 2 + den) / (den * 2);
    auto whole = static_cast<std::uint64_t>(hundredths / 100);
    auto frac = static_cast<unsigned>(hundredths % 100);
    return std::to_string(whole) + "." + (frac < 10 ? "0" : "") + std::to_string(frac);
}

namespace {

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string cell(const std::optional<Rational>& v) { return v ? format_percent(*v) : "NA"; }

template <typename T>
void push_unique(std::vector<T>& list, const T& value) {
    if (std::find(list.begin(), list.end(), value) == list.end()) list.push_back(value);
}

std::string summary_table(const DetectionReport& report) {
    std::vector<std::string> judges;
    std::vector<std::string> generators;
    for (const auto& row : report.rows) {
        push_unique(judges, row.judge_model);
        if (row.label == Label::kFake) push_unique(generators, row.generator_model);
    }

    std::string out = "judge_model";
    for (const auto& g : generators) out += "," + csv_field(g + "/high") + "," + csv_field(g + "/low");
    out += ",real_facts\n";

    for (const auto& judge : judges) {
        out += csv_field(judge);
        for (const auto& g : generators) {
            for (Tier tier : {Tier::kHigh, Tier::kLow}) {
                out += "," + cell(report.accuracy_where([&](const ReportRow& r) {
                    return r.judge_model == judge && r.generator_model == g && r.label == Label::kFake &&
                           r.tier == tier;
                }));
            }
        }
        out += "," + cell(report.accuracy_where(
                          [&](const ReportRow& r) { return r.judge_model == judge && r.label == Label::kReal; }));
        out += "\n";
    }
    return out;
}

std::string category_breakdown(const DetectionReport& report) {
    std::vector<const ReportRow*> rows;
    for (const auto& r : report.rows) rows.push_back(&r);
    std::stable_sort(rows.begin(), rows.end(), [](const ReportRow* a, const ReportRow* b) {
        return std::tie(a->category, a->judge_model, a->generator_model) <
               std::tie(b->category, b->judge_model, b->generator_model);
    });
    std::string out = "category,judge_model,generator_model,tier,label,n,n_correct,n_invalid,accuracy\n";
    for (const auto* r : rows) {
        out += csv_field(r->category) + "," + csv_field(r->judge_model) + "," + csv_field(r->generator_model) + "," +
               tier_name(r->tier) + "," + to_string(r->label) + "," + std::to_string(r->n) + "," +
               std::to_string(r->n_correct) + "," + std::to_string(r->n_invalid) + "," + cell(report.accuracy(*r)) +
               "\n";
    }
    return out;
}

}  // namespace

std::string emit_report(const DetectionReport& report, ReportLayout layout) {
    return layout == ReportLayout::kSummaryTable ? summary_table(report) : category_breakdown(report);
}

std::string emit_confusion(std::span<const FactRecord> records, std::span<const Verdict> verdicts) {
    std::unordered_map<std::string_view, Label> labels;
    for (const auto& r : records) labels.emplace(r.id, r.label);
    // (judge, label) -> counts of predicted real / fake / invalid
    std::map<std::pair<std::string, int>, std::array<std::size_t, 3>> counts;
    for (const auto& v : verdicts) {
        auto it = labels.find(v.record_id);
        if (it == labels.end()) throw ConsistencyError("verdict references unknown record " + v.record_id);
        ++counts[{v.judge_model, static_cast<int>(it->second)}][static_cast<std::size_t>(v.parsed)];
    }
    std::string out = "judge_model,label,predicted_real,predicted_fake,invalid\n";
    for (const auto& [key, c] : counts) {
        out += csv_field(key.first) + "," + to_string(static_cast<Label>(key.second)) + "," + std::to_string(c[0]) +
               "," + std::to_string(c[1]) + "," + std::to_string(c[2]) + "\n";
    }
    return out;
}

}  // namespace kgfake
