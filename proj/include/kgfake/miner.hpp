#pragma once
// Fake-object mining by object substitution.
//
// For a real triple <s, r, o> the candidate pool holds every object o' seen
// with r under some other subject and never with (s, r). Each candidate is
// scored by the Jaccard similarity of the subject sets d(r, o) and d(r, o');
// high/low tiers are the argmax/argmin of that score. Ties always go to the
// lexicographically smaller entity name.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "kgfake/kg.hpp"
#include "kgfake/rational.hpp"

namespace kgfake {

enum class Tier { kHigh, kLow };

std::string to_string(Tier tier);

struct FakeCandidate {
    Triple seed;
    EntityId fake_object;
    Rational score;
    std::optional<Tier> tier;  // unset for ranked output

    Triple fake_triple() const { return {seed.subject, seed.relation, fake_object}; }
    bool operator==(const FakeCandidate&) const = default;
};

struct ExtremePair {
    std::optional<FakeCandidate> high;
    std::optional<FakeCandidate> low;
};

enum class Exclusion {
    kFormal,  // drop o' only when (s, r, o') is a fact
    kStrict,  // also drop o' linked to s by any triple
};

struct MinerOptions {
    Exclusion exclusion = Exclusion::kFormal;
    std::size_t workers = 1;
};

struct ExtremesOnly {};
struct TopK {
    std::size_t k = 1;
};
using MinePolicy = std::variant<ExtremesOnly, TopK>;

struct SeedSkip {
    Triple seed;
    std::string reason;
};

struct MineResult {
    std::vector<FakeCandidate> candidates;
    std::vector<SeedSkip> skipped;
};

// |a ∩ b| / |a ∪ b| over ascending, duplicate-free id lists.
// Throws UndefinedSimilarityError when both are empty.
Rational jaccard(std::span<const EntityId> a, std::span<const EntityId> b);

// Ascending (= lexicographic). Throws NotAFactError when t is not a fact.
std::vector<EntityId> candidate_objects(const KnowledgeGraph& kg, const Triple& t,
                                        const MinerOptions& options = {});

// Throws InvalidCandidateError when o_prime is outside candidate_objects(t).
Rational plausibility_score(const KnowledgeGraph& kg, const Triple& t, EntityId o_prime,
                            const MinerOptions& options = {});

ExtremePair select_extremes(const KnowledgeGraph& kg, const Triple& t, const MinerOptions& options = {});

std::vector<FakeCandidate> rank_candidates(const KnowledgeGraph& kg, const Triple& t, std::size_t k,
                                           const MinerOptions& options = {});

// Per-seed results concatenated in seed order. Seeds with no candidates are
// reported in `skipped`. Every seed is validated before any work starts.
MineResult mine(const KnowledgeGraph& kg, std::span<const Triple> seeds, const MinePolicy& policy,
                const MinerOptions& options = {});

// Resolves dump-level triples against the graph; throws NotAFactError naming
// the first seed that is not a fact.
std::vector<Triple> resolve_seeds(const KnowledgeGraph& kg, std::span<const NamedTriple> seeds);

}  // namespace kgfake
