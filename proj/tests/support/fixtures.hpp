#pragma once
// Shared fixtures: the published detection-accuracy table as a hand-built
// report, a CSV cell reader, and synthetic records/verdicts.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kgfake/harness.hpp"

namespace fixtures {

struct PublishedRow {
    std::string judge;
    // Percentages in hundredths: phi4 high, phi4 low, llama8b high, llama8b low, real facts.
    std::uint64_t cells[5];
};

inline const std::vector<PublishedRow>& published_table() {
    static const std::vector<PublishedRow> rows = {
        {"Falcon-40B", {8936, 9258, 8650, 9122, 3231}},
        {"Qwen-72B", {5966, 5789, 5336, 5690, 8017}},
        {"LLaMA-70B", {5966, 6834, 6729, 7181, 6803}},
    };
    return rows;
}

// One row per table cell with n = 10000 so n_correct carries the percentage
// in hundredths. Real facts were generated by Phi-4.
inline kgfake::DetectionReport published_report() {
    using kgfake::Label;
    using kgfake::Tier;
    kgfake::DetectionReport report;
    for (const auto& p : published_table()) {
        auto add = [&](const std::string& generator, std::optional<Tier> tier, Label label, std::uint64_t correct) {
            kgfake::ReportRow row;
            row.judge_model = p.judge;
            row.generator_model = generator;
            row.category = "all";
            row.tier = tier;
            row.label = label;
            row.n = 10000;
            row.n_correct = correct;
            report.rows.push_back(row);
        };
        add("Phi-4", Tier::kHigh, Label::kFake, p.cells[0]);
        add("Phi-4", Tier::kLow, Label::kFake, p.cells[1]);
        add("LLaMA-8B", Tier::kHigh, Label::kFake, p.cells[2]);
        add("LLaMA-8B", Tier::kLow, Label::kFake, p.cells[3]);
        add("Phi-4", std::nullopt, Label::kReal, p.cells[4]);
    }
    return report;
}

inline std::string hundredths(std::uint64_t v) {
    std::string frac = std::to_string(v % 100);
    if (frac.size() < 2) frac = "0" + frac;
    return std::to_string(v / 100) + "." + frac;
}

// Unquoted CSV grid; lines starting with '#' are skipped.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        out.push_back(cells);
    }
    return out;
}

struct Synthetic {
    std::vector<kgfake::FactRecord> records;
    std::vector<kgfake::Verdict> verdicts;
};

// Random labelled records over a few categories/generators and random verdicts
// (including invalid ones) from `judges` judges, each answering with
// probability `coverage`.
inline Synthetic synthetic_verdicts(std::mt19937_64& rng, std::size_t n_records, std::size_t judges,
                                    double coverage = 0.9) {
    using kgfake::Label;
    using kgfake::Parsed;
    using kgfake::Tier;
    static const char* kCategories[] = {"book", "film", "music", "tv", "people"};
    static const char* kGenerators[] = {"gen-a", "gen-b"};
    Synthetic s;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < n_records; ++i) {
        kgfake::FactRecord r;
        r.id = "rec" + std::to_string(i);
        r.subject = "s" + std::to_string(i);
        r.predicate = std::string(kCategories[rng() % 5]) + ".x.y";
        r.category = r.predicate.substr(0, r.predicate.find('.'));
        r.object_real = "o" + std::to_string(i);
        r.generator_model = kGenerators[rng() % 2];
        if (rng() % 3 == 0) {
            r.label = Label::kReal;
            r.object_used = r.object_real;
        } else {
            r.label = Label::kFake;
            r.object_used = "fake" + std::to_string(i);
            r.tier = rng() % 2 ? Tier::kHigh : Tier::kLow;
            r.score = kgfake::Rational(rng() % 3, 3);
        }
        r.statement = "statement " + std::to_string(i);
        s.records.push_back(r);
    }
    for (std::size_t j = 0; j < judges; ++j) {
        for (const auto& r : s.records) {
            if (unit(rng) > coverage) continue;
            auto roll = rng() % 10;
            Parsed p = roll == 0 ? Parsed::kInvalid : roll < 5 ? Parsed::kReal : Parsed::kFake;
            s.verdicts.push_back({r.id, "judge" + std::to_string(j), kgfake::to_string(p), p});
        }
    }
    std::shuffle(s.verdicts.begin(), s.verdicts.end(), rng);
    return s;
}

}  // namespace fixtures
