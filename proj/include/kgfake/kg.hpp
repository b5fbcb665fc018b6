#pragma once
// Immutable, index-backed triple store.
//
// Entity and relation ids are assigned in lexicographic order of their
// strings, so comparing two ids compares the underlying names and the graph
// built from any permutation of the same lines is identical.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgfake {

struct EntityId {
    std::uint32_t value = 0;
    auto operator<=>(const EntityId&) const = default;
};

struct RelationId {
    std::uint32_t value = 0;
    auto operator<=>(const RelationId&) const = default;
};

struct Triple {
    EntityId subject;
    RelationId relation;
    EntityId object;

    auto operator<=>(const Triple&) const = default;
};

using CategorySet = std::set<std::string, std::less<>>;

// {type, base, common, freebase, user, kg, dataworld}
CategorySet default_category_denylist();

struct ParseOptions {
    CategorySet denylist = default_category_denylist();
    // Categories with fewer unique triples than this are pruned. 0 disables.
    std::size_t min_category_triples = 0;
};

struct ParseStats {
    std::size_t lines = 0;
    std::size_t comment_lines = 0;
    std::size_t blank_lines = 0;
    std::size_t duplicates = 0;
    std::size_t denylisted = 0;
    std::size_t pruned_rare = 0;
};

struct DescriptionStats {
    std::size_t attached = 0;
    std::size_t skipped_unknown = 0;
};

// Leading dotted segment of a predicate; a predicate without '.' is its own category.
std::string category_of(std::string_view predicate);

bool is_valid_utf8(std::string_view bytes) noexcept;

class KnowledgeGraphBuilder;

class KnowledgeGraph {
public:
    std::size_t triple_count() const noexcept { return by_rso_.size(); }
    std::size_t entity_count() const noexcept { return entity_names_.size(); }
    std::size_t relation_count() const noexcept { return relation_names_.size(); }

    std::optional<EntityId> find_entity(std::string_view name) const;
    std::optional<RelationId> find_relation(std::string_view name) const;
    const std::string& entity_name(EntityId id) const;
    const std::string& relation_name(RelationId id) const;

    // Resolves names; nullopt when any part is not interned.
    std::optional<Triple> find_triple(std::string_view subject, std::string_view relation,
                                      std::string_view object) const;

    // Throws PreconditionError when an id does not resolve in this graph.
    bool contains(const Triple& t) const;

    // d(r, o): distinct subjects linked to `object` through `relation`, ascending.
    std::span<const EntityId> subjects_for(RelationId relation, EntityId object) const;
    // Distinct objects appearing with `relation`, ascending.
    std::span<const EntityId> objects_for(RelationId relation) const;
    // Objects of (subject, relation, *), ascending.
    std::span<const EntityId> objects_of(EntityId subject, RelationId relation) const;
    // True when some triple links a and b under any relation, in either direction.
    bool linked(EntityId a, EntityId b) const;

    // All triples ordered by (relation, subject, object).
    std::span<const Triple> triples() const noexcept { return by_rso_; }

    std::optional<std::string_view> description_of(EntityId id) const;

    std::string category_of(RelationId relation) const;
    // Unique-triple count per category after filtering.
    const std::map<std::string, std::size_t>& category_counts() const noexcept {
        return category_counts_;
    }
    const CategorySet& category_denylist() const noexcept { return denylist_; }

    const ParseStats& parse_stats() const noexcept { return parse_stats_; }
    const DescriptionStats& description_stats() const noexcept { return description_stats_; }

    // "<subject, relation, object>"
    std::string describe(const Triple& t) const;

    // Content hash of the triple set; independent of input line order.
    std::string digest() const;

private:
    friend class KnowledgeGraphBuilder;
    friend KnowledgeGraph load_descriptions(std::istream& source, KnowledgeGraph kg);

    struct TransparentHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept {
            return std::hash<std::string_view>{}(s);
        }
    };
    using NameIndex = std::unordered_map<std::string, std::uint32_t, TransparentHash, std::equal_to<>>;

    struct SubjectRange {
        RelationId relation;
        EntityId object;
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
    };

    void check(EntityId id) const;
    void check(RelationId id) const;

    std::vector<std::string> entity_names_;
    std::vector<std::string> relation_names_;
    NameIndex entity_index_;
    NameIndex relation_index_;

    std::vector<Triple> by_rso_;
    std::vector<std::uint32_t> relation_offsets_;  // by_rso_ range per relation
    std::vector<EntityId> rso_objects_;            // objects column of by_rso_
    std::vector<EntityId> ros_subjects_;           // subjects grouped by (relation, object)
    std::vector<SubjectRange> subject_ranges_;     // sorted by (relation, object)
    std::vector<std::uint32_t> relation_range_offsets_;
    std::vector<std::vector<EntityId>> objects_by_relation_;
    std::vector<std::vector<EntityId>> neighbours_;

    std::vector<std::optional<std::string>> descriptions_;
    std::map<std::string, std::size_t> category_counts_;
    CategorySet denylist_;
    ParseStats parse_stats_;
    DescriptionStats description_stats_;
};

// Incremental construction. Names are interned as they arrive; final ids are
// reassigned in sorted order by build().
class KnowledgeGraphBuilder {
public:
    explicit KnowledgeGraphBuilder(ParseOptions options = {});

    // Returns false when the triple was dropped by the denylist.
    bool add(std::string_view subject, std::string_view predicate, std::string_view object);

    ParseStats& stats() noexcept { return stats_; }

    // Throws EmptyGraphError when nothing survives filtering.
    KnowledgeGraph build() &&;

private:
    std::uint32_t intern(std::vector<std::string>& names, KnowledgeGraph::NameIndex& index,
                         std::string_view name);

    ParseOptions options_;
    ParseStats stats_;
    std::vector<std::string> entity_names_;
    std::vector<std::string> relation_names_;
    KnowledgeGraph::NameIndex entity_index_;
    KnowledgeGraph::NameIndex relation_index_;
    std::vector<Triple> raw_;
};

// Tab-separated `subject<TAB>predicate<TAB>object` lines; `#` lines ignored.
KnowledgeGraph parse_triples(std::istream& source, const ParseOptions& options = {});
KnowledgeGraph parse_triples_file(const std::string& path, const ParseOptions& options = {});

// JSON-lines sidecar of {"entity": ..., "description": ...} objects.
KnowledgeGraph load_descriptions(std::istream& source, KnowledgeGraph kg);
KnowledgeGraph load_descriptions_file(const std::string& path, KnowledgeGraph kg);

// Raw string triples as they appear in a dump. Used for seed files, which may
// name triples absent from the graph.
struct NamedTriple {
    std::string subject;
    std::string predicate;
    std::string object;

    auto operator<=>(const NamedTriple&) const = default;
};

std::vector<NamedTriple> read_named_triples(std::istream& source);
std::vector<NamedTriple> read_named_triples_file(const std::string& path);

}  // namespace kgfake
