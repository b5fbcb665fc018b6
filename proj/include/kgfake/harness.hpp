#pragma once
// Fact records, judge verdicts and detection-accuracy reports.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgfake/gateway.hpp"
#include "kgfake/kg.hpp"
#include "kgfake/miner.hpp"
#include "kgfake/rational.hpp"

namespace kgfake {

enum class Label { kReal, kFake };
enum class Parsed { kReal, kFake, kInvalid };
enum class InvalidPolicy { kExclude, kCountWrong };

std::string to_string(Label label);
std::string to_string(Parsed parsed);
// "high" / "low" / "none"
std::string tier_name(const std::optional<Tier>& tier);

struct FactRecord {
    std::string id;
    std::string subject;
    std::string predicate;
    std::string object_real;
    std::string object_used;
    Label label = Label::kReal;
    std::optional<Tier> tier;  // none for real records
    std::optional<Rational> score;
    std::string category;
    std::string statement;
    std::string generator_model;

    bool operator==(const FactRecord&) const = default;
};

struct Verdict {
    std::string record_id;
    std::string judge_model;
    std::string raw_output;
    Parsed parsed = Parsed::kInvalid;

    bool operator==(const Verdict&) const = default;
};

struct Skip {
    std::string id;
    std::string detail;  // subject for generation skips, judge model for verdict skips
    std::string reason;
};

// Deterministic record id from the seed triple, the object actually stated,
// the tier and the generator.
std::string record_id(std::string_view subject, std::string_view predicate, std::string_view object_real,
                      std::string_view object_used, const std::optional<Tier>& tier,
                      std::string_view generator_model);

struct GenerationSettings {
    std::string model = "generator";
    double temperature = 0.7;
    int max_tokens = 256;
    std::size_t parallelism = 4;
};

struct AssembleResult {
    std::vector<FactRecord> records;
    std::vector<Skip> skipped;
};

// Fake records first (candidate order), then real ones (seed order).
// Throws NotAFactError for a real seed outside the graph and ConsistencyError
// for a candidate whose substituted triple is a fact.
AssembleResult assemble_records(std::span<const FakeCandidate> candidates, std::span<const Triple> real_seeds,
                                const KnowledgeGraph& kg, CompletionProvider& generator,
                                const GenerationSettings& settings);

// First bracketed [real]/[fake] token wins (case-insensitive); otherwise a
// leading bare "real"/"fake" word; otherwise Invalid.
Parsed parse_verdict(std::string_view raw);

struct JudgeSettings {
    std::vector<std::string> models;
    double temperature = 0.0;
    int max_tokens = 16;
    std::size_t parallelism = 4;
};

struct VerdictResult {
    std::vector<Verdict> verdicts;
    std::vector<Skip> skipped;
};

// One verdict per (judge, record); judge-major order.
VerdictResult collect_verdicts(std::span<const FactRecord> records, CompletionProvider& judge,
                               const JudgeSettings& settings);

inline constexpr std::string_view kJuryModel = "jury-majority";

struct ReportRow {
    std::string judge_model;
    std::string generator_model;
    std::string category;
    std::optional<Tier> tier;
    Label label = Label::kReal;
    std::size_t n = 0;
    std::size_t n_correct = 0;
    std::size_t n_invalid = 0;

    std::size_t evaluable(InvalidPolicy policy) const noexcept {
        return policy == InvalidPolicy::kExclude ? n - n_invalid : n;
    }
};

struct DetectionReport {
    InvalidPolicy policy = InvalidPolicy::kExclude;
    std::vector<ReportRow> rows;  // sorted by (judge, generator, category, tier, label)

    // Undefined (nullopt) when no record in the row is evaluable.
    std::optional<Rational> accuracy(const ReportRow& row) const;

    // Pooled accuracy over every row accepted by `keep`.
    template <typename Pred>
    std::optional<Rational> accuracy_where(Pred keep) const {
        std::size_t correct = 0;
        std::size_t total = 0;
        for (const auto& row : rows) {
            if (!keep(row)) continue;
            correct += row.n_correct;
            total += row.evaluable(policy);
        }
        if (total == 0) return std::nullopt;
        return Rational(correct, total);
    }
};

struct EvaluateOptions {
    InvalidPolicy invalid_policy = InvalidPolicy::kExclude;
    // Adds rows for a majority vote over all judges (ties are Invalid).
    bool jury = false;
};

// Throws ConsistencyError on duplicate record ids, dangling verdicts or a
// repeated (record, judge) pair.
DetectionReport evaluate(std::span<const FactRecord> records, std::span<const Verdict> verdicts,
                         const EvaluateOptions& options = {});

enum class ReportLayout { kSummaryTable, kCategoryBreakdown };

// Percentages with two decimals, "NA" for undefined cells.
std::string emit_report(const DetectionReport& report, ReportLayout layout);

// Rows (judge, label) with predicted real/fake/invalid counts.
std::string emit_confusion(std::span<const FactRecord> records, std::span<const Verdict> verdicts);

// Exact percentage rounded half-up to two decimals, e.g. 8936/10000 -> "89.36".
std::string format_percent(const Rational& value);

}  // namespace kgfake
