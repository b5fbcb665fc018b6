// kgfake: command-line front end for the mining / generation / judging pipeline.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "kgfake/error.hpp"
#include "kgfake/pipeline.hpp"

namespace {

int exit_code_for(const std::string& category) {
    if (category == "path") return 3;
    if (category == "parse" || category == "encoding" || category == "empty-graph") return 4;
    if (category == "not-a-fact" || category == "consistency" || category == "precondition" ||
        category == "invalid-candidate" || category == "template") {
        return 5;
    }
    if (category == "transport" || category == "request" || category == "protocol") return 6;
    return 1;
}

void add_endpoint_options(CLI::App& cmd, const std::string& role, kgfake::EndpointConfig& endpoint,
                          std::string& mock_path, int& timeout_s) {
    cmd.add_option("--" + role + "-url", endpoint.base_url, "Chat-completions base URL for the " + role)
        ->capture_default_str();
    cmd.add_option("--" + role + "-path", endpoint.path, "Request path appended to the base URL")
        ->capture_default_str();
    cmd.add_option("--" + role + "-mock", mock_path, "Mock response table (JSON); replaces the HTTP endpoint");
    cmd.add_flag("!--" + role + "-no-system-role", endpoint.system_role,
                 "Send system and user parts as a single user message");
    cmd.add_option("--" + role + "-max-attempts", endpoint.retry.max_attempts, "Attempts per request")
        ->capture_default_str();
    cmd.add_option("--" + role + "-timeout", timeout_s, "Read timeout in seconds")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    kgfake::RunConfig config;
    std::string generator_mock;
    std::string judge_mock;
    std::string invalid_policy = "exclude";
    int generator_timeout = 120;
    int judge_timeout = 120;

    CLI::App app{"Mine plausibly-false knowledge-graph triples, generate statements and evaluate LLM judges"};
    app.set_config("--config", "", "TOML/INI file with option values");
    app.require_subcommand(1);
    app.add_option("--out", config.out_dir, "Output directory")->capture_default_str();
    app.add_option("--seed", config.seed, "RNG seed for every sampling step")->capture_default_str();
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Debug logging");

    auto add_kg_options = [&](CLI::App* cmd, bool descriptions) {
        cmd->add_option("--kg", config.kg_path, "Triple dump (subject<TAB>predicate<TAB>object)")->required();
        if (descriptions) cmd->add_option("--descriptions", config.descriptions_path, "Entity descriptions (JSONL)");
        cmd->add_option("--denylist", config.denylist, "Categories to drop")->delimiter(',')->capture_default_str();
        cmd->add_option("--min-category-triples", config.min_category_triples,
                        "Drop categories with fewer unique triples");
    };

    auto* ingest = app.add_subcommand("ingest", "Parse the graph and write graph_manifest.json");
    add_kg_options(ingest, true);

    auto* mine = app.add_subcommand("mine", "Mine fake candidates into candidates.jsonl");
    add_kg_options(mine, false);
    mine->add_option("--seeds", config.seeds_path, "Seed triples (same format as the dump)");
    mine->add_option("--sample-per-category", config.sample_per_category,
                     "Seeds sampled per category when --seeds is absent (0 = all)");
    mine->add_option("--policy", config.policy, "extremes | topk")
        ->check(CLI::IsMember({"extremes", "topk"}))
        ->capture_default_str();
    mine->add_option("--top-k", config.top_k, "Candidates per seed for --policy topk")->check(CLI::PositiveNumber);
    mine->add_flag("--strict-exclusion", config.strict_exclusion,
                   "Also drop objects linked to the seed subject by any relation");
    mine->add_option("--workers", config.workers, "Mining threads")->check(CLI::PositiveNumber);
    mine->add_option("--candidates", config.candidates_path, "Output path");

    auto* generate = app.add_subcommand("generate", "Generate statements into records.jsonl");
    add_kg_options(generate, true);
    generate->add_option("--candidates", config.candidates_path, "Mined candidates");
    generate->add_option("--real-seeds", config.real_seeds_path, "Real triples to state");
    generate->add_option("--real-per-category", config.real_per_category,
                         "Real triples sampled per category when --real-seeds is absent");
    generate->add_option("--generator-model", config.generator_model)->capture_default_str();
    generate->add_option("--temperature", config.generator_temperature)->capture_default_str();
    generate->add_option("--max-tokens", config.generator_max_tokens)->check(CLI::Range(16, 1 << 20));
    generate->add_option("--parallelism", config.parallelism)->check(CLI::PositiveNumber);
    generate->add_option("--records", config.records_path, "Output path");
    add_endpoint_options(*generate, "generator", config.generator_endpoint, generator_mock, generator_timeout);

    auto* judge = app.add_subcommand("judge", "Collect judge verdicts into verdicts.jsonl");
    judge->add_option("--records", config.records_path, "Records to judge");
    judge->add_option("--judge-model", config.judge_models, "Judge model name (repeatable)")->capture_default_str();
    judge->add_option("--temperature", config.judge_temperature)->capture_default_str();
    judge->add_option("--max-tokens", config.judge_max_tokens)->check(CLI::Range(16, 1 << 20));
    judge->add_option("--parallelism", config.parallelism)->check(CLI::PositiveNumber);
    judge->add_option("--verdicts", config.verdicts_path, "Output path");
    add_endpoint_options(*judge, "judge", config.judge_endpoint, judge_mock, judge_timeout);

    auto* report = app.add_subcommand("report", "Write summary.csv and categories.csv");
    report->add_option("--records", config.records_path);
    report->add_option("--verdicts", config.verdicts_path);
    report->add_option("--invalid-policy", invalid_policy, "exclude | count-wrong")
        ->check(CLI::IsMember({"exclude", "count-wrong"}))
        ->capture_default_str();
    report->add_flag("--jury", config.jury, "Add majority-vote rows");
    report->add_flag("--confusion", config.confusion, "Also write confusion.csv");

    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

    for (auto* endpoint : {&config.generator_endpoint, &config.judge_endpoint}) {
        if (const char* token = std::getenv("LLM_API_TOKEN")) endpoint->api_token = token;
    }
    config.generator_endpoint.read_timeout = std::chrono::seconds(generator_timeout);
    config.judge_endpoint.read_timeout = std::chrono::seconds(judge_timeout);
    if (!generator_mock.empty()) {
        config.generator_endpoint.kind = kgfake::ProviderKind::kMock;
        config.generator_endpoint.mock_path = generator_mock;
    }
    if (!judge_mock.empty()) {
        config.judge_endpoint.kind = kgfake::ProviderKind::kMock;
        config.judge_endpoint.mock_path = judge_mock;
    }
    config.invalid_policy =
        invalid_policy == "exclude" ? kgfake::InvalidPolicy::kExclude : kgfake::InvalidPolicy::kCountWrong;

    try {
        if (*ingest) {
            auto s = kgfake::cmd_ingest(config);
            std::cout << "triples: " << s.triples << "\nentities: " << s.entities << "\nrelations: " << s.relations
                      << "\ncategories: " << s.categories.size() << "\nduplicates: " << s.stats.duplicates
                      << "\ndenylisted: " << s.stats.denylisted << "\npruned_rare: " << s.stats.pruned_rare
                      << "\ndescriptions: " << s.descriptions.attached << " attached, "
                      << s.descriptions.skipped_unknown << " skipped\n";
            for (const auto& [category, count] : s.categories) std::cout << "  " << category << ": " << count << "\n";
            std::cout << "digest: " << s.kg_digest << "\n";
        } else if (*mine) {
            auto s = kgfake::cmd_mine(config);
            std::cout << "seeds: " << s.seeds << "\ncandidates: " << s.candidates << "\nskipped: " << s.skipped
                      << "\n";
        } else if (*generate) {
            auto s = kgfake::cmd_generate(config);
            std::cout << "records: " << s.records << " (" << s.fake << " fake, " << s.real << " real)\nskipped: "
                      << s.skipped << "\n";
        } else if (*judge) {
            auto s = kgfake::cmd_judge(config);
            std::cout << "verdicts: " << s.verdicts << "\ninvalid: " << s.invalid << "\nskipped: " << s.skipped
                      << "\n";
        } else if (*report) {
            auto s = kgfake::cmd_report(config);
            std::cout << "rows: " << s.rows << "\n";
            for (const auto& f : s.files) std::cout << "wrote " << f << "\n";
        }
    } catch (const kgfake::Error& e) {
        std::cerr << "error[" << e.category() << "]: " << e.what() << "\n";
        return exit_code_for(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
