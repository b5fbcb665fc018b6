#include "kgfake/kg.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <tuple>

#include <nlohmann/json.hpp>

#include "kgfake/error.hpp"
#include "kgfake/hash.hpp"

namespace kgfake {
namespace {

struct FieldSplit {
    std::string_view fields[3];
    std::size_t count = 0;
};

// Splits on TAB; `count` reports the true number of fields even past three.
FieldSplit split_tabs(std::string_view line) {
    FieldSplit out;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        std::string_view piece = line.substr(start, tab == std::string_view::npos ? tab : tab - start);
        if (out.count < 3) out.fields[out.count] = piece;
        ++out.count;
        if (tab == std::string_view::npos) break;
        start = tab + 1;
    }
    return out;
}

std::string_view chomp(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

enum class LineKind { kBlank, kComment, kTriple };

template <typename Visitor>
void for_each_triple_line(std::istream& source, Visitor&& visit) {
    std::string line;
    std::size_t number = 0;
    while (std::getline(source, line)) {
        ++number;
        std::string_view view = chomp(line);
        if (!is_valid_utf8(view)) throw EncodingError(number, "invalid UTF-8");
        if (view.empty()) {
            visit(LineKind::kBlank, nullptr);
            continue;
        }
        if (view.front() == '#') {
            visit(LineKind::kComment, nullptr);
            continue;
        }
        FieldSplit split = split_tabs(view);
        if (split.count != 3) {
            throw ParseError(number, "expected 3 tab-separated fields, found " + std::to_string(split.count));
        }
        for (const auto& f : split.fields) {
            if (f.empty()) throw ParseError(number, "empty field");
        }
        visit(LineKind::kTriple, &split);
    }
}

}  // namespace

CategorySet default_category_denylist() {
    return {"type", "base", "common", "freebase", "user", "kg", "dataworld"};
}

std::string category_of(std::string_view predicate) {
    return std::string(predicate.substr(0, predicate.find('.')));
}

bool is_valid_utf8(std::string_view bytes) noexcept {
    std::size_t i = 0;
    const std::size_t n = bytes.size();
    while (i < n) {
        auto c = static_cast<unsigned char>(bytes[i]);
        if (c < 0x80) {
            ++i;
            continue;
        }
        std::size_t len;
        std::uint32_t cp;
        if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > n) return false;
        for (std::size_t k = 1; k < len; ++k) {
            auto cc = static_cast<unsigned char>(bytes[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        // Overlong forms, surrogates, out of range.
        if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000)) return false;
        if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
        i += len;
    }
    return true;
}

// ---------------------------------------------------------------------------
// KnowledgeGraph

void KnowledgeGraph::check(EntityId id) const {
    if (id.value >= entity_names_.size()) {
        throw PreconditionError("entity id " + std::to_string(id.value) + " does not resolve");
    }
}

void KnowledgeGraph::check(RelationId id) const {
    if (id.value >= relation_names_.size()) {
        throw PreconditionError("relation id " + std::to_string(id.value) + " does not resolve");
    }
}

std::optional<EntityId> KnowledgeGraph::find_entity(std::string_view name) const {
    auto it = entity_index_.find(name);
    if (it == entity_index_.end()) return std::nullopt;
    return EntityId{it->second};
}

std::optional<RelationId> KnowledgeGraph::find_relation(std::string_view name) const {
    auto it = relation_index_.find(name);
    if (it == relation_index_.end()) return std::nullopt;
    return RelationId{it->second};
}

const std::string& KnowledgeGraph::entity_name(EntityId id) const {
    check(id);
    return entity_names_[id.value];
}

const std::string& KnowledgeGraph::relation_name(RelationId id) const {
    check(id);
    return relation_names_[id.value];
}

std::optional<Triple> KnowledgeGraph::find_triple(std::string_view subject, std::string_view relation,
                                                  std::string_view object) const {
    auto s = find_entity(subject);
    auto r = find_relation(relation);
    auto o = find_entity(object);
    if (!s || !r || !o) return std::nullopt;
    return Triple{*s, *r, *o};
}

bool KnowledgeGraph::contains(const Triple& t) const {
    check(t.subject);
    check(t.relation);
    check(t.object);
    auto objects = objects_of(t.subject, t.relation);
    return std::binary_search(objects.begin(), objects.end(), t.object);
}

std::span<const EntityId> KnowledgeGraph::subjects_for(RelationId relation, EntityId object) const {
    if (relation.value >= relation_names_.size()) return {};
    auto first = subject_ranges_.begin() + relation_range_offsets_[relation.value];
    auto last = subject_ranges_.begin() + relation_range_offsets_[relation.value + 1];
    auto it = std::lower_bound(first, last, object,
                               [](const SubjectRange& r, EntityId o) { return r.object < o; });
    if (it == last || it->object != object) return {};
    return std::span<const EntityId>(ros_subjects_).subspan(it->begin, it->end - it->begin);
}

std::span<const EntityId> KnowledgeGraph::objects_for(RelationId relation) const {
    if (relation.value >= relation_names_.size()) return {};
    return objects_by_relation_[relation.value];
}

std::span<const EntityId> KnowledgeGraph::objects_of(EntityId subject, RelationId relation) const {
    if (relation.value >= relation_names_.size()) return {};
    auto first = by_rso_.begin() + relation_offsets_[relation.value];
    auto last = by_rso_.begin() + relation_offsets_[relation.value + 1];
    auto lo = std::lower_bound(first, last, subject, [](const Triple& t, EntityId s) { return t.subject < s; });
    auto hi = std::upper_bound(lo, last, subject, [](EntityId s, const Triple& t) { return s < t.subject; });
    auto begin = static_cast<std::size_t>(lo - by_rso_.begin());
    auto end = static_cast<std::size_t>(hi - by_rso_.begin());
    return std::span<const EntityId>(rso_objects_).subspan(begin, end - begin);
}

bool KnowledgeGraph::linked(EntityId a, EntityId b) const {
    check(a);
    check(b);
    const auto& n = neighbours_[a.value];
    return std::binary_search(n.begin(), n.end(), b);
}

std::optional<std::string_view> KnowledgeGraph::description_of(EntityId id) const {
    check(id);
    const auto& d = descriptions_[id.value];
    if (!d) return std::nullopt;
    return std::string_view(*d);
}

std::string KnowledgeGraph::category_of(RelationId relation) const {
    return kgfake::category_of(relation_name(relation));
}

std::string KnowledgeGraph::describe(const Triple& t) const {
    return "<" + entity_name(t.subject) + ", " + relation_name(t.relation) + ", " + entity_name(t.object) + ">";
}

std::string KnowledgeGraph::digest() const {
    // Ids follow name order, so sorting by (s, r, o) ids is sorting by names.
    std::vector<Triple> sorted(by_rso_.begin(), by_rso_.end());
    std::sort(sorted.begin(), sorted.end());
    Fnv1a h;
    for (const auto& t : sorted) {
        h.field(entity_names_[t.subject.value]);
        h.field(relation_names_[t.relation.value]);
        h.field(entity_names_[t.object.value]);
    }
    return h.hex();
}

// ---------------------------------------------------------------------------
// Builder

KnowledgeGraphBuilder::KnowledgeGraphBuilder(ParseOptions options) : options_(std::move(options)) {}

std::uint32_t KnowledgeGraphBuilder::intern(std::vector<std::string>& names, KnowledgeGraph::NameIndex& index,
                                            std::string_view name) {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    auto id = static_cast<std::uint32_t>(names.size());
    names.emplace_back(name);
    index.emplace(std::string(name), id);
    return id;
}

bool KnowledgeGraphBuilder::add(std::string_view subject, std::string_view predicate, std::string_view object) {
    if (options_.denylist.contains(category_of(predicate))) {
        ++stats_.denylisted;
        return false;
    }
    Triple t;
    t.subject = EntityId{intern(entity_names_, entity_index_, subject)};
    t.relation = RelationId{intern(relation_names_, relation_index_, predicate)};
    t.object = EntityId{intern(entity_names_, entity_index_, object)};
    raw_.push_back(t);
    return true;
}

namespace {

// Maps provisional ids onto ids ordered by name. Unused names get no id.
std::vector<std::uint32_t> rank_used(const std::vector<std::string>& names, const std::vector<bool>& used,
                                     std::vector<std::string>& out_names) {
    std::vector<std::uint32_t> order;
    for (std::uint32_t i = 0; i < names.size(); ++i) {
        if (used[i]) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return names[a] < names[b]; });
    std::vector<std::uint32_t> remap(names.size(), UINT32_MAX);
    out_names.clear();
    out_names.reserve(order.size());
    for (std::uint32_t rank = 0; rank < order.size(); ++rank) {
        remap[order[rank]] = rank;
        out_names.push_back(names[order[rank]]);
    }
    return remap;
}

}  // namespace

KnowledgeGraph KnowledgeGraphBuilder::build() && {
    std::sort(raw_.begin(), raw_.end());
    auto unique_end = std::unique(raw_.begin(), raw_.end());
    stats_.duplicates += static_cast<std::size_t>(raw_.end() - unique_end);
    raw_.erase(unique_end, raw_.end());

    // Rare-category pruning on unique triples.
    std::vector<std::string> relation_category(relation_names_.size());
    for (std::size_t i = 0; i < relation_names_.size(); ++i) relation_category[i] = category_of(relation_names_[i]);
    std::map<std::string, std::size_t> counts;
    for (const auto& t : raw_) ++counts[relation_category[t.relation.value]];
    if (options_.min_category_triples > 0) {
        auto keep_end = std::remove_if(raw_.begin(), raw_.end(), [&](const Triple& t) {
            return counts[relation_category[t.relation.value]] < options_.min_category_triples;
        });
        stats_.pruned_rare = static_cast<std::size_t>(raw_.end() - keep_end);
        raw_.erase(keep_end, raw_.end());
        std::erase_if(counts, [&](const auto& kv) { return kv.second < options_.min_category_triples; });
    }
    if (raw_.empty()) throw EmptyGraphError();

    std::vector<bool> entity_used(entity_names_.size(), false);
    std::vector<bool> relation_used(relation_names_.size(), false);
    for (const auto& t : raw_) {
        entity_used[t.subject.value] = true;
        entity_used[t.object.value] = true;
        relation_used[t.relation.value] = true;
    }

    KnowledgeGraph kg;
    auto entity_remap = rank_used(entity_names_, entity_used, kg.entity_names_);
    auto relation_remap = rank_used(relation_names_, relation_used, kg.relation_names_);
    entity_names_.clear();
    relation_names_.clear();
    entity_index_.clear();
    relation_index_.clear();

    for (std::uint32_t i = 0; i < kg.entity_names_.size(); ++i) kg.entity_index_.emplace(kg.entity_names_[i], i);
    for (std::uint32_t i = 0; i < kg.relation_names_.size(); ++i) kg.relation_index_.emplace(kg.relation_names_[i], i);

    for (auto& t : raw_) {
        t.subject.value = entity_remap[t.subject.value];
        t.relation.value = relation_remap[t.relation.value];
        t.object.value = entity_remap[t.object.value];
    }

    const std::size_t relations = kg.relation_names_.size();
    const std::size_t entities = kg.entity_names_.size();

    // (relation, subject, object) order.
    std::sort(raw_.begin(), raw_.end(), [](const Triple& a, const Triple& b) {
        return std::tie(a.relation, a.subject, a.object) < std::tie(b.relation, b.subject, b.object);
    });
    kg.by_rso_ = std::move(raw_);
    kg.rso_objects_.reserve(kg.by_rso_.size());
    kg.relation_offsets_.assign(relations + 1, 0);
    for (const auto& t : kg.by_rso_) {
        kg.rso_objects_.push_back(t.object);
        ++kg.relation_offsets_[t.relation.value + 1];
    }
    std::partial_sum(kg.relation_offsets_.begin(), kg.relation_offsets_.end(), kg.relation_offsets_.begin());

    // (relation, object, subject) order for d(r, o).
    std::vector<Triple> ros(kg.by_rso_);
    std::sort(ros.begin(), ros.end(), [](const Triple& a, const Triple& b) {
        return std::tie(a.relation, a.object, a.subject) < std::tie(b.relation, b.object, b.subject);
    });
    kg.ros_subjects_.reserve(ros.size());
    kg.objects_by_relation_.assign(relations, {});
    kg.relation_range_offsets_.assign(relations + 1, 0);
    for (std::size_t i = 0; i < ros.size(); ++i) {
        const auto& t = ros[i];
        kg.ros_subjects_.push_back(t.subject);
        if (i == 0 || ros[i - 1].relation != t.relation || ros[i - 1].object != t.object) {
            kg.subject_ranges_.push_back({t.relation, t.object, static_cast<std::uint32_t>(i), 0});
            kg.objects_by_relation_[t.relation.value].push_back(t.object);
            ++kg.relation_range_offsets_[t.relation.value + 1];
        }
        kg.subject_ranges_.back().end = static_cast<std::uint32_t>(i + 1);
    }
    std::partial_sum(kg.relation_range_offsets_.begin(), kg.relation_range_offsets_.end(),
                     kg.relation_range_offsets_.begin());

    kg.neighbours_.assign(entities, {});
    for (const auto& t : kg.by_rso_) {
        kg.neighbours_[t.subject.value].push_back(t.object);
        kg.neighbours_[t.object.value].push_back(t.subject);
    }
    for (auto& n : kg.neighbours_) {
        std::sort(n.begin(), n.end());
        n.erase(std::unique(n.begin(), n.end()), n.end());
        n.shrink_to_fit();
    }

    kg.descriptions_.assign(entities, std::nullopt);
    kg.category_counts_ = std::move(counts);
    kg.denylist_ = std::move(options_.denylist);
    kg.parse_stats_ = stats_;
    return kg;
}

// ---------------------------------------------------------------------------
// File entry points

KnowledgeGraph parse_triples(std::istream& source, const ParseOptions& options) {
    KnowledgeGraphBuilder builder(options);
    for_each_triple_line(source, [&](LineKind kind, const FieldSplit* split) {
        auto& stats = builder.stats();
        ++stats.lines;
        if (kind == LineKind::kBlank) ++stats.blank_lines;
        if (kind == LineKind::kComment) ++stats.comment_lines;
        if (split) builder.add(split->fields[0], split->fields[1], split->fields[2]);
    });
    return std::move(builder).build();
}

KnowledgeGraph parse_triples_file(const std::string& path, const ParseOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PathError(path);
    return parse_triples(in, options);
}

std::vector<NamedTriple> read_named_triples(std::istream& source) {
    std::vector<NamedTriple> out;
    for_each_triple_line(source, [&](LineKind, const FieldSplit* split) {
        if (!split) return;
        out.push_back({std::string(split->fields[0]), std::string(split->fields[1]), std::string(split->fields[2])});
    });
    return out;
}

std::vector<NamedTriple> read_named_triples_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PathError(path);
    return read_named_triples(in);
}

KnowledgeGraph load_descriptions(std::istream& source, KnowledgeGraph kg) {
    std::string line;
    std::size_t number = 0;
    while (std::getline(source, line)) {
        ++number;
        std::string_view view = chomp(line);
        if (view.find_first_not_of(" \t") == std::string_view::npos) continue;
        auto obj = nlohmann::json::parse(view, nullptr, false);
        if (obj.is_discarded()) throw ParseError(number, "malformed JSON");
        if (!obj.is_object() || obj.size() != 2 || !obj.contains("entity") || !obj.contains("description") ||
            !obj["entity"].is_string() || !obj["description"].is_string()) {
            throw ParseError(number, "expected an object with string fields 'entity' and 'description'");
        }
        auto id = kg.find_entity(obj["entity"].get_ref<const std::string&>());
        if (!id) {
            ++kg.description_stats_.skipped_unknown;
            continue;
        }
        kg.descriptions_[id->value] = obj["description"].get<std::string>();
        ++kg.description_stats_.attached;
    }
    return kg;
}

KnowledgeGraph load_descriptions_file(const std::string& path, KnowledgeGraph kg) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PathError(path);
    return load_descriptions(in, std::move(kg));
}

}  // namespace kgfake
