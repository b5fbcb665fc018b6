#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "kgfake/kg.hpp"

namespace kgfake {

// Unbiased integer in [0, bound) from raw mt19937_64 output. Unlike
// std::uniform_int_distribution this gives the same sequence on every
// standard library.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

// Up to `per_category` triples drawn uniformly without replacement from each
// category (all triples when per_category == 0). Each category gets its own
// stream derived from (seed, salt, category), and the result is ordered by
// (category, subject, relation, object) name, so it depends only on the
// graph's content.
std::vector<Triple> sample_per_category(const KnowledgeGraph& kg, std::size_t per_category, std::uint64_t seed,
                                        std::string_view salt);

}  // namespace kgfake
