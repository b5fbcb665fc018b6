#include "kgfake/miner.hpp"

#include <algorithm>
#include <thread>

#include "kgfake/error.hpp"

namespace kgfake {
namespace {

void require_fact(const KnowledgeGraph& kg, const Triple& t) {
    if (!kg.contains(t)) throw NotAFactError(kg.describe(t));
}

std::size_t intersection_size(std::span<const EntityId> a, std::span<const EntityId> b) {
    std::size_t n = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++n;
            ++i;
            ++j;
        }
    }
    return n;
}

// Candidate test for an o' known to occur with t.relation.
bool admissible(const KnowledgeGraph& kg, const Triple& t, std::span<const EntityId> seed_objects,
                EntityId o_prime, Exclusion exclusion) {
    // seed_objects contains t.object, so this also rejects o' == o.
    if (std::binary_search(seed_objects.begin(), seed_objects.end(), o_prime)) return false;
    if (exclusion == Exclusion::kStrict && kg.linked(t.subject, o_prime)) return false;
    return true;
}

Rational score_from_counts(std::size_t inter, std::size_t a, std::size_t b) {
    return Rational(inter, a + b - inter);
}

}  // namespace

std::string to_string(Tier tier) { return tier == Tier::kHigh ? "high" : "low"; }

Rational jaccard(std::span<const EntityId> a, std::span<const EntityId> b) {
    if (a.empty() && b.empty()) throw UndefinedSimilarityError();
    return score_from_counts(intersection_size(a, b), a.size(), b.size());
}

std::vector<EntityId> candidate_objects(const KnowledgeGraph& kg, const Triple& t, const MinerOptions& options) {
    require_fact(kg, t);
    auto seed_objects = kg.objects_of(t.subject, t.relation);
    std::vector<EntityId> out;
    for (EntityId o_prime : kg.objects_for(t.relation)) {
        if (admissible(kg, t, seed_objects, o_prime, options.exclusion)) out.push_back(o_prime);
    }
    return out;
}

Rational plausibility_score(const KnowledgeGraph& kg, const Triple& t, EntityId o_prime,
                            const MinerOptions& options) {
    require_fact(kg, t);
    auto seed_objects = kg.objects_of(t.subject, t.relation);
    auto pool = kg.objects_for(t.relation);
    if (!std::binary_search(pool.begin(), pool.end(), o_prime) ||
        !admissible(kg, t, seed_objects, o_prime, options.exclusion)) {
        throw InvalidCandidateError(kg.entity_name(o_prime) + " is not a candidate object for " + kg.describe(t));
    }
    return jaccard(kg.subjects_for(t.relation, t.object), kg.subjects_for(t.relation, o_prime));
}

ExtremePair select_extremes(const KnowledgeGraph& kg, const Triple& t, const MinerOptions& options) {
    require_fact(kg, t);
    const auto seed_objects = kg.objects_of(t.subject, t.relation);
    const auto seed_subjects = kg.subjects_for(t.relation, t.object);

    // Intersection sizes |d(r,o) ∩ d(r,o')| for every o' sharing a subject with o.
    std::vector<EntityId> shared;
    for (EntityId s : seed_subjects) {
        auto objs = kg.objects_of(s, t.relation);
        shared.insert(shared.end(), objs.begin(), objs.end());
    }
    std::sort(shared.begin(), shared.end());

    std::optional<FakeCandidate> high;
    std::optional<FakeCandidate> low;
    auto consider = [&](EntityId o_prime, Rational score) {
        // Ids ascend with names and candidates are visited in ascending id
        // order, so strict comparisons keep the smaller name on ties.
        FakeCandidate c{t, o_prime, score, std::nullopt};
        if (!high || score > high->score) high = c;
        if (!low || score < low->score) low = c;
    };

    for (std::size_t i = 0; i < shared.size();) {
        std::size_t j = i;
        while (j < shared.size() && shared[j] == shared[i]) ++j;
        EntityId o_prime = shared[i];
        if (admissible(kg, t, seed_objects, o_prime, options.exclusion)) {
            auto other = kg.subjects_for(t.relation, o_prime).size();
            consider(o_prime, score_from_counts(j - i, seed_subjects.size(), other));
        }
        i = j;
    }

    // Smallest candidate with an empty intersection scores 0: a new minimum,
    // and the maximum only if nothing intersected.
    for (EntityId o_prime : kg.objects_for(t.relation)) {
        if (std::binary_search(shared.begin(), shared.end(), o_prime)) continue;
        if (!admissible(kg, t, seed_objects, o_prime, options.exclusion)) continue;
        // Every intersecting candidate scores above zero.
        FakeCandidate zero{t, o_prime, Rational(0, 1), std::nullopt};
        if (!high) high = zero;
        low = zero;
        break;
    }

    if (high) high->tier = Tier::kHigh;
    if (low) low->tier = Tier::kLow;
    return {high, low};
}

std::vector<FakeCandidate> rank_candidates(const KnowledgeGraph& kg, const Triple& t, std::size_t k,
                                           const MinerOptions& options) {
    if (k == 0) throw PreconditionError("rank_candidates requires k >= 1");
    const auto seed_subjects = kg.subjects_for(t.relation, t.object);
    std::vector<FakeCandidate> all;
    for (EntityId o_prime : candidate_objects(kg, t, options)) {
        all.push_back({t, o_prime, jaccard(seed_subjects, kg.subjects_for(t.relation, o_prime)), std::nullopt});
    }
    auto better = [](const FakeCandidate& a, const FakeCandidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.fake_object < b.fake_object;
    };
    std::size_t keep = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), better);
    all.resize(keep);
    return all;
}

MineResult mine(const KnowledgeGraph& kg, std::span<const Triple> seeds, const MinePolicy& policy,
                const MinerOptions& options) {
    for (const auto& seed : seeds) require_fact(kg, seed);

    std::vector<std::vector<FakeCandidate>> per_seed(seeds.size());
    auto run = [&](std::size_t i) {
        const Triple& seed = seeds[i];
        if (const auto* top = std::get_if<TopK>(&policy)) {
            per_seed[i] = rank_candidates(kg, seed, top->k, options);
            return;
        }
        auto pair = select_extremes(kg, seed, options);
        if (pair.high) per_seed[i].push_back(*pair.high);
        if (pair.low) per_seed[i].push_back(*pair.low);
    };

    std::size_t workers = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(seeds.size(), 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < seeds.size(); ++i) run(i);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < seeds.size(); i += workers) run(i);
            });
        }
    }

    MineResult result;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (per_seed[i].empty()) {
            result.skipped.push_back({seeds[i], "empty-candidate-set"});
            continue;
        }
        result.candidates.insert(result.candidates.end(), per_seed[i].begin(), per_seed[i].end());
    }
    return result;
}

std::vector<Triple> resolve_seeds(const KnowledgeGraph& kg, std::span<const NamedTriple> seeds) {
    std::vector<Triple> out;
    out.reserve(seeds.size());
    for (const auto& n : seeds) {
        auto t = kg.find_triple(n.subject, n.predicate, n.object);
        if (!t || !kg.contains(*t)) {
            throw NotAFactError("<" + n.subject + ", " + n.predicate + ", " + n.object + ">");
        }
        out.push_back(*t);
    }
    return out;
}

}  // namespace kgfake
