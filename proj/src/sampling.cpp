#include "kgfake/sampling.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "kgfake/hash.hpp"

namespace kgfake {

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    if (bound <= 1) return 0;
    // Reject the top partial block so every residue is equally likely.
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x > limit);
    return x % bound;
}

std::vector<Triple> sample_per_category(const KnowledgeGraph& kg, std::size_t per_category, std::uint64_t seed,
                                        std::string_view salt) {
    std::map<std::string, std::vector<Triple>> groups;
    for (const auto& t : kg.triples()) groups[kg.category_of(t.relation)].push_back(t);

    std::vector<Triple> out;
    for (auto& [category, triples] : groups) {
        std::sort(triples.begin(), triples.end());
        if (per_category != 0 && per_category < triples.size()) {
            std::mt19937_64 rng(Fnv1a{}.field(std::to_string(seed)).field(salt).field(category).value());
            for (std::size_t i = 0; i < per_category; ++i) {
                auto j = i + uniform_below(rng, triples.size() - i);
                std::swap(triples[i], triples[j]);
            }
            triples.resize(per_category);
            std::sort(triples.begin(), triples.end());
        }
        out.insert(out.end(), triples.begin(), triples.end());
    }
    return out;
}

}  // namespace kgfake
