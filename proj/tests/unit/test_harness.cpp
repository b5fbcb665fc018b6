#include <map>
#include <random>
#include <sstream>

#include <catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "kgfake/artifacts.hpp"
#include "kgfake/error.hpp"
#include "kgfake/harness.hpp"
#include "oracle.hpp"

using namespace kgfake;

namespace {

KnowledgeGraph paris_kg() {
    std::istringstream in(
        "Paris\tlocation.capital_of\tFrance\n"
        "Berlin\tlocation.capital_of\tGermany\n"
        "Rome\tlocation.capital_of\tItaly\n");
    std::istringstream desc("{\"entity\":\"Paris\",\"description\":\"Capital city of France.\"}\n");
    return load_descriptions(desc, parse_triples(in));
}

// Answers every generation prompt with a statement naming its fingerprint.
MockProvider echo_generator() {
    MockProvider m;
    m.table().fallback = "  Statement {{fingerprint}}.\n";
    return m;
}

FactRecord record(const std::string& id, Label label, const std::string& category = "film",
                  std::optional<Tier> tier = std::nullopt, const std::string& generator = "gen") {
    FactRecord r;
    r.id = id;
    r.subject = "s";
    r.predicate = category + ".x";
    r.object_real = "o";
    r.object_used = label == Label::kReal ? "o" : "o'";
    r.label = label;
    r.tier = label == Label::kFake ? tier.value_or(Tier::kHigh) : tier;
    r.category = category;
    r.statement = "statement " + id;
    r.generator_model = generator;
    return r;
}

Verdict verdict(const std::string& id, Parsed p, const std::string& judge = "j") {
    return {id, judge, to_string(p), p};
}

// Echoes ground truth: real statements are answered [Real], fake ones [Fake].
class EchoJudge : public CompletionProvider {
public:
    explicit EchoJudge(const std::vector<FactRecord>& records) {
        for (const auto& r : records) truth_[build_detection_prompt(r.statement).fingerprint] = r.label;
    }
    CompletionResult complete(const CompletionRequest& request) override {
        CompletionResult out;
        out.request_id = request.request_id;
        out.raw_text = truth_.at(request.prompt.fingerprint) == Label::kReal ? "[Real]" : "[Fake]";
        return out;
    }

private:
    std::map<std::string, Label> truth_;
};

}  // namespace

TEST_CASE("parse_verdict", "[harness]") {
    CHECK(parse_verdict("[Fake]") == Parsed::kFake);
    CHECK(parse_verdict("[Real]") == Parsed::kReal);
    CHECK(parse_verdict("I think [Real] because [Fake] is wrong") == Parsed::kReal);
    CHECK(parse_verdict("Answer: [FAKE]") == Parsed::kFake);
    CHECK(parse_verdict("cannot determine") == Parsed::kInvalid);
    CHECK(parse_verdict("") == Parsed::kInvalid);
    CHECK(parse_verdict("Fake.") == Parsed::kFake);
    CHECK(parse_verdict("  \"real\"") == Parsed::kReal);
    CHECK(parse_verdict("**Fake**") == Parsed::kFake);
    CHECK(parse_verdict("Really not sure") == Parsed::kInvalid);
    CHECK(parse_verdict("The statement is fake") == Parsed::kInvalid);
    CHECK(parse_verdict("fakeness") == Parsed::kInvalid);
}

TEST_CASE("record ids are deterministic and distinguish tiers", "[harness]") {
    auto a = record_id("s", "p", "o", "x", Tier::kHigh, "g");
    CHECK(a == record_id("s", "p", "o", "x", Tier::kHigh, "g"));
    CHECK(a != record_id("s", "p", "o", "x", Tier::kLow, "g"));
    CHECK(a != record_id("s", "p", "o", "x", Tier::kHigh, "g2"));
    CHECK(a != record_id("s", "p", "o2", "x", Tier::kHigh, "g"));
    CHECK(record_id("s", "p", "o", "o", std::nullopt, "g") != record_id("s", "p", "o", "o", Tier::kHigh, "g"));
}

TEST_CASE("assemble_records builds fake and real records", "[harness]") {
    auto kg = paris_kg();
    auto paris = *kg.find_triple("Paris", "location.capital_of", "France");
    FakeCandidate c{paris, *kg.find_entity("Germany"), Rational(0, 1), Tier::kHigh};
    auto gen = echo_generator();
    auto result = assemble_records(std::vector<FakeCandidate>{c}, std::vector<Triple>{paris}, kg, gen, {});
    CHECK(result.skipped.empty());
    REQUIRE(result.records.size() == 2);

    const auto& fake = result.records[0];
    CHECK(fake.label == Label::kFake);
    CHECK(fake.tier == Tier::kHigh);
    CHECK(fake.object_used == "Germany");
    CHECK(fake.object_real == "France");
    CHECK(fake.category == "location");
    CHECK(fake.score == Rational(0, 1));
    auto prompt = build_generation_prompt("Paris", "Capital city of France.", "location.capital_of", "Germany");
    CHECK(fake.statement == "Statement " + prompt.fingerprint + ".");
    CHECK(fake.id == record_id("Paris", "location.capital_of", "France", "Germany", Tier::kHigh, "generator"));

    const auto& real = result.records[1];
    CHECK(real.label == Label::kReal);
    CHECK_FALSE(real.tier.has_value());
    CHECK_FALSE(real.score.has_value());
    CHECK(real.object_used == "France");

    // Label agrees with graph membership of the stated triple.
    for (const auto& r : result.records) {
        auto t = kg.find_triple(r.subject, r.predicate, r.object_used);
        bool member = t && kg.contains(*t);
        CHECK(member == (r.label == Label::kReal));
    }
}

TEST_CASE("assemble_records preconditions", "[harness]") {
    auto kg = paris_kg();
    auto gen = echo_generator();
    auto paris = *kg.find_triple("Paris", "location.capital_of", "France");
    Triple absent{paris.subject, paris.relation, *kg.find_entity("Italy")};
    CHECK_THROWS_AS(assemble_records({}, std::vector<Triple>{absent}, kg, gen, {}), NotAFactError);

    FakeCandidate is_fact{paris, paris.object, Rational(0, 1), Tier::kHigh};
    CHECK_THROWS_AS(assemble_records(std::vector<FakeCandidate>{is_fact}, {}, kg, gen, {}), ConsistencyError);

    FakeCandidate ranked{paris, *kg.find_entity("Italy"), Rational(0, 1), std::nullopt};
    CHECK_THROWS_AS(assemble_records(std::vector<FakeCandidate>{ranked}, {}, kg, gen, {}), PreconditionError);
}

TEST_CASE("generation failures become skips", "[harness]") {
    auto kg = paris_kg();
    auto paris = *kg.find_triple("Paris", "location.capital_of", "France");
    auto berlin = *kg.find_triple("Berlin", "location.capital_of", "Germany");
    auto rome = *kg.find_triple("Rome", "location.capital_of", "Italy");
    auto gen = echo_generator();
    auto berlin_prompt = build_generation_prompt("Berlin", "", "location.capital_of", "Germany");
    gen.table().failures[berlin_prompt.fingerprint] = "model overloaded";
    auto rome_prompt = build_generation_prompt("Rome", "", "location.capital_of", "Italy");
    gen.table().responses[rome_prompt.fingerprint] = " \n ";

    auto result = assemble_records({}, std::vector<Triple>{paris, berlin, rome, paris}, kg, gen, {});
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].subject == "Paris");
    REQUIRE(result.skipped.size() == 3);
    std::map<std::string, std::string> reasons;
    for (const auto& s : result.skipped) reasons[s.detail] += s.reason + ";";
    CHECK(reasons["Paris"] == "duplicate record;");
    CHECK(reasons["Berlin"].find("transport") != std::string::npos);
    CHECK(reasons["Rome"] == "empty statement;");
}

TEST_CASE("collect_verdicts queries every judge for every record", "[harness]") {
    std::vector<FactRecord> records{record("a", Label::kFake), record("b", Label::kReal), record("c", Label::kReal)};
    MockProvider judges;
    judges.table_for_model("j1").fallback = "[Fake]";
    judges.table_for_model("j2").fallback = "no idea";
    judges.table().failures[build_detection_prompt("statement c").fingerprint] = "timeout";
    JudgeSettings settings;
    settings.models = {"j1", "j2"};
    auto out = collect_verdicts(records, judges, settings);
    REQUIRE(out.verdicts.size() == 4);
    CHECK(out.skipped.size() == 2);
    CHECK(out.verdicts[0] == Verdict{"a", "j1", "[Fake]", Parsed::kFake});
    CHECK(out.verdicts[1] == Verdict{"b", "j1", "[Fake]", Parsed::kFake});
    CHECK(out.verdicts[2] == Verdict{"a", "j2", "no idea", Parsed::kInvalid});
    CHECK(out.verdicts[3].judge_model == "j2");
}

TEST_CASE("evaluate worked examples", "[harness]") {
    SECTION("three of four fakes caught") {
        std::vector<FactRecord> records;
        std::vector<Verdict> verdicts;
        Parsed answers[] = {Parsed::kFake, Parsed::kFake, Parsed::kFake, Parsed::kReal};
        for (int i = 0; i < 4; ++i) {
            records.push_back(record("r" + std::to_string(i), Label::kFake));
            verdicts.push_back(verdict("r" + std::to_string(i), answers[i]));
        }
        auto report = evaluate(records, verdicts);
        REQUIRE(report.rows.size() == 1);
        CHECK(report.accuracy(report.rows[0]) == Rational(3, 4));
    }
    SECTION("invalid verdicts under both policies") {
        std::vector<FactRecord> records{record("a", Label::kReal), record("b", Label::kReal), record("c", Label::kReal)};
        std::vector<Verdict> verdicts{verdict("a", Parsed::kReal), verdict("b", Parsed::kFake),
                                      verdict("c", Parsed::kInvalid)};
        auto excl = evaluate(records, verdicts, {InvalidPolicy::kExclude, false});
        REQUIRE(excl.rows.size() == 1);
        CHECK(excl.rows[0].evaluable(excl.policy) == 2);
        CHECK(excl.rows[0].n_invalid == 1);
        CHECK(excl.accuracy(excl.rows[0]) == Rational(1, 2));
        auto wrong = evaluate(records, verdicts, {InvalidPolicy::kCountWrong, false});
        CHECK(wrong.accuracy(wrong.rows[0]) == Rational(1, 3));
    }
    SECTION("all-invalid slice is undefined") {
        std::vector<FactRecord> records{record("a", Label::kReal)};
        std::vector<Verdict> verdicts{verdict("a", Parsed::kInvalid)};
        auto report = evaluate(records, verdicts);
        CHECK_FALSE(report.accuracy(report.rows[0]).has_value());
        auto csv = emit_report(report, ReportLayout::kCategoryBreakdown);
        CHECK(csv.find(",NA\n") != std::string::npos);
        CHECK(emit_report(report, ReportLayout::kSummaryTable) == "judge_model,real_facts\nj,NA\n");
    }
}

TEST_CASE("evaluate consistency errors", "[harness]") {
    std::vector<FactRecord> records{record("a", Label::kReal)};
    CHECK_THROWS_AS(evaluate(records, std::vector<Verdict>{verdict("zzz", Parsed::kReal)}), ConsistencyError);
    CHECK_THROWS_AS(evaluate(records, std::vector<Verdict>{verdict("a", Parsed::kReal), verdict("a", Parsed::kFake)}),
                    ConsistencyError);
    std::vector<FactRecord> dup{record("a", Label::kReal), record("a", Label::kFake)};
    CHECK_THROWS_AS(evaluate(dup, {}), ConsistencyError);
    CHECK_NOTHROW(evaluate(records, std::vector<Verdict>{verdict("a", Parsed::kReal, "j1"),
                                                         verdict("a", Parsed::kReal, "j2")}));
}

TEST_CASE("constant and echo judges", "[harness]") {
    std::mt19937_64 rng(41);
    auto data = fixtures::synthetic_verdicts(rng, 300, 0);
    MockProvider constant;
    constant.table().fallback = "[Fake]";
    JudgeSettings settings;
    settings.models = {"constant"};
    auto cv = collect_verdicts(data.records, constant, settings);
    auto report = evaluate(data.records, cv.verdicts);
    CHECK(report.accuracy_where([](const ReportRow& r) { return r.label == Label::kFake; }) == Rational(1, 1));
    CHECK(report.accuracy_where([](const ReportRow& r) { return r.label == Label::kReal; }) == Rational(0, 1));

    EchoJudge echo(data.records);
    settings.models = {"echo"};
    auto ev = collect_verdicts(data.records, echo, settings);
    auto echo_report = evaluate(data.records, ev.verdicts);
    for (const auto& row : echo_report.rows) CHECK(echo_report.accuracy(row) == Rational(1, 1));
}

TEST_CASE("property: accuracy equals the direct formula and aggregates", "[harness]") {
    std::mt19937_64 rng(42);
    for (int round = 0; round < 20; ++round) {
        auto data = fixtures::synthetic_verdicts(rng, 1 + rng() % 800, 1 + rng() % 3);
        for (auto policy : {InvalidPolicy::kExclude, InvalidPolicy::kCountWrong}) {
            auto report = evaluate(data.records, data.verdicts, {policy, false});
            std::map<std::string, const FactRecord*> by_id;
            for (const auto& r : data.records) by_id[r.id] = &r;

            // Direct formula per (judge, label): mean of 1[D(x) = y] over evaluable verdicts.
            std::map<std::pair<std::string, Label>, oracle::Tally> direct;
            std::map<std::string, oracle::Tally> overall;
            for (const auto& v : data.verdicts) {
                const auto& r = *by_id.at(v.record_id);
                if (v.parsed == Parsed::kInvalid && policy == InvalidPolicy::kExclude) continue;
                bool hit = (v.parsed == Parsed::kReal && r.label == Label::kReal) ||
                           (v.parsed == Parsed::kFake && r.label == Label::kFake);
                auto& t = direct[{v.judge_model, r.label}];
                t.correct += hit;
                t.total += 1;
                overall[v.judge_model].correct += hit;
                overall[v.judge_model].total += 1;
            }
            for (const auto& [key, t] : direct) {
                auto got = report.accuracy_where([&](const ReportRow& row) {
                    return row.judge_model == key.first && row.label == key.second;
                });
                if (t.total == 0) {
                    CHECK_FALSE(got.has_value());
                } else {
                    REQUIRE(got.has_value());
                    CHECK(oracle::same_value(got->numerator(), got->denominator(), t.correct, t.total));
                }
            }
            // Category rows recombine to the overall figure.
            for (const auto& [judge, t] : overall) {
                std::uint64_t correct = 0;
                std::uint64_t total = 0;
                for (const auto& row : report.rows) {
                    if (row.judge_model != judge) continue;
                    CHECK(row.n_correct <= row.n);
                    if (auto acc = report.accuracy(row)) {
                        CHECK(*acc <= Rational(1, 1));
                        // n-weighted recombination: acc * evaluable = n_correct exactly.
                        CHECK(oracle::same_value(acc->numerator() * row.evaluable(policy), acc->denominator(),
                                                 row.n_correct, 1));
                    }
                    correct += row.n_correct;
                    total += row.evaluable(policy);
                }
                CHECK(correct == t.correct);
                CHECK(total == t.total);
            }
        }
    }
}

TEST_CASE("jury rows use a majority vote", "[harness]") {
    std::vector<FactRecord> records{record("a", Label::kFake), record("b", Label::kReal)};
    std::vector<Verdict> verdicts{
        verdict("a", Parsed::kFake, "j1"), verdict("a", Parsed::kFake, "j2"), verdict("a", Parsed::kReal, "j3"),
        verdict("b", Parsed::kReal, "j1"), verdict("b", Parsed::kFake, "j2"), verdict("b", Parsed::kInvalid, "j3"),
    };
    auto report = evaluate(records, verdicts, {InvalidPolicy::kExclude, true});
    std::size_t jury_rows = 0;
    for (const auto& row : report.rows) {
        if (row.judge_model != kJuryModel) continue;
        ++jury_rows;
        if (row.label == Label::kFake) CHECK(report.accuracy(row) == Rational(1, 1));
        if (row.label == Label::kReal) CHECK(row.n_invalid == 1);
    }
    CHECK(jury_rows == 2);
    CHECK(evaluate(records, verdicts).rows.size() == 6);
}

TEST_CASE("summary table renders the published values", "[harness]") {
    auto csv = emit_report(fixtures::published_report(), ReportLayout::kSummaryTable);
    auto grid = fixtures::parse_csv(csv);
    REQUIRE(grid.size() == 4);
    CHECK(grid[0] == std::vector<std::string>{"judge_model", "Phi-4/high", "Phi-4/low", "LLaMA-8B/high",
                                              "LLaMA-8B/low", "real_facts"});
    const auto& table = fixtures::published_table();
    for (std::size_t i = 0; i < table.size(); ++i) {
        REQUIRE(grid[i + 1].size() == 6);
        CHECK(grid[i + 1][0] == table[i].judge);
        for (std::size_t c = 0; c < 5; ++c) CHECK(grid[i + 1][c + 1] == fixtures::hundredths(table[i].cells[c]));
    }
    CHECK(grid[1][1] == "89.36");
    CHECK(grid[1][2] == "92.58");
    CHECK(grid[1][5] == "32.31");
}

TEST_CASE("report edge cases", "[harness]") {
    DetectionReport empty;
    CHECK(emit_report(empty, ReportLayout::kSummaryTable) == "judge_model,real_facts\n");
    CHECK(emit_report(empty, ReportLayout::kCategoryBreakdown) ==
          "category,judge_model,generator_model,tier,label,n,n_correct,n_invalid,accuracy\n");

    // A judge that only saw real facts has NA in the fake columns of a generator seen elsewhere.
    std::vector<FactRecord> records{record("a", Label::kFake), record("b", Label::kReal)};
    std::vector<Verdict> verdicts{verdict("a", Parsed::kFake, "j1"), verdict("b", Parsed::kReal, "j2")};
    auto csv = emit_report(evaluate(records, verdicts), ReportLayout::kSummaryTable);
    CHECK(csv == "judge_model,gen/high,gen/low,real_facts\nj1,100.00,NA,NA\nj2,NA,NA,100.00\n");

    auto quoted = record("q", Label::kReal, "film");
    quoted.generator_model = "gen,\"x\"";
    auto q = emit_report(evaluate(std::vector<FactRecord>{quoted}, std::vector<Verdict>{verdict("q", Parsed::kReal)}),
                         ReportLayout::kCategoryBreakdown);
    CHECK(q.find("\"gen,\"\"x\"\"\"") != std::string::npos);
}

TEST_CASE("format_percent rounds half up", "[harness]") {
    CHECK(format_percent(Rational(8936, 10000)) == "89.36");
    CHECK(format_percent(Rational(1, 1)) == "100.00");
    CHECK(format_percent(Rational(0, 1)) == "0.00");
    CHECK(format_percent(Rational(1, 3)) == "33.33");
    CHECK(format_percent(Rational(2, 3)) == "66.67");
    CHECK(format_percent(Rational(1, 8)) == "12.50");
    CHECK(format_percent(Rational(1, 20000)) == "0.01");
    CHECK(format_percent(Rational(1, 20001)) == "0.00");
}

TEST_CASE("confusion counts", "[harness]") {
    std::vector<FactRecord> records{record("a", Label::kFake), record("b", Label::kReal), record("c", Label::kReal)};
    std::vector<Verdict> verdicts{verdict("a", Parsed::kFake), verdict("b", Parsed::kFake),
                                  verdict("c", Parsed::kInvalid)};
    CHECK(emit_confusion(records, verdicts) ==
          "judge_model,label,predicted_real,predicted_fake,invalid\nj,real,0,1,1\nj,fake,0,1,0\n");
}

TEST_CASE("records and verdicts round-trip through JSON lines", "[harness]") {
    std::mt19937_64 rng(43);
    auto data = fixtures::synthetic_verdicts(rng, 200, 2);
    data.records[0].statement = "Quotes \" and\nnewlines \xe2\x86\x92 kept";
    auto dir = oracle::scratch_dir("roundtrip");
    ArtifactMeta meta{"test", 7, "abc", ""};
    std::vector<nlohmann::json> rec_rows;
    std::vector<nlohmann::json> ver_rows;
    for (const auto& r : data.records) rec_rows.push_back(record_to_json(r));
    for (const auto& v : data.verdicts) ver_rows.push_back(verdict_to_json(v));
    write_jsonl_file((dir / "records.jsonl").string(), meta, rec_rows);
    write_jsonl_file((dir / "verdicts.jsonl").string(), meta, ver_rows);

    auto records = read_records_file((dir / "records.jsonl").string());
    auto verdicts = read_verdicts_file((dir / "verdicts.jsonl").string());
    CHECK(records == data.records);
    CHECK(verdicts == data.verdicts);
    CHECK(read_meta_file((dir / "records.jsonl").string())["seed"] == 7);
    for (auto layout : {ReportLayout::kSummaryTable, ReportLayout::kCategoryBreakdown}) {
        CHECK(emit_report(evaluate(records, verdicts), layout) ==
              emit_report(evaluate(data.records, data.verdicts), layout));
    }
}

TEST_CASE("malformed artifact lines", "[harness]") {
    std::istringstream bad("{\"_meta\":{}}\n{\"id\":1}\nnot json\n");
    try {
        read_jsonl(bad);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    auto r = record_to_json(record("a", Label::kReal));
    r["label"] = "maybe";
    CHECK_THROWS_AS(record_from_json(r), ConsistencyError);
    auto inconsistent = record_to_json(record("a", Label::kReal));
    inconsistent["object_used"] = "other";
    CHECK_THROWS_AS(record_from_json(inconsistent), ConsistencyError);
    auto missing = record_to_json(record("a", Label::kReal));
    missing.erase("statement");
    CHECK_THROWS_AS(record_from_json(missing), ConsistencyError);
    CHECK_THROWS_AS(read_records_file("/nonexistent/records.jsonl"), PathError);
}
