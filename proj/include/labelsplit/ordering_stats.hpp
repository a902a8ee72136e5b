#ifndef LABELSPLIT_ORDERING_STATS_HPP
#define LABELSPLIT_ORDERING_STATS_HPP

#include "labelsplit/errors.hpp"
#include "labelsplit/event_model.hpp"
#include "labelsplit/relabel.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace labelsplit {

/// Log-based ordering relations, always seen from the source event b towards the target label c.
enum class OrderingRelation {
    directly_precedes,   ///< b is directly followed by c
    directly_follows,    ///< b is directly preceded by c
    eventually_precedes, ///< c occurs somewhere after b
    eventually_follows,  ///< c occurs somewhere before b
    length_two_loop,     ///< b c b, with b != c
};

inline constexpr std::array<OrderingRelation, 5> kAllRelations = {
    OrderingRelation::directly_precedes, OrderingRelation::directly_follows, OrderingRelation::eventually_precedes,
    OrderingRelation::eventually_follows, OrderingRelation::length_two_loop};

inline std::vector<OrderingRelation> default_relations() {
    return {OrderingRelation::directly_precedes, OrderingRelation::directly_follows,
            OrderingRelation::eventually_precedes, OrderingRelation::eventually_follows};
}

inline std::string_view to_string(OrderingRelation r) {
    switch (r) {
    case OrderingRelation::directly_precedes: return "directly_precedes";
    case OrderingRelation::directly_follows: return "directly_follows";
    case OrderingRelation::eventually_precedes: return "eventually_precedes";
    case OrderingRelation::eventually_follows: return "eventually_follows";
    case OrderingRelation::length_two_loop: return "length_two_loop";
    }
    return "?";
}

/// Accepts the snake_case names, with '-' allowed in place of '_'.
inline OrderingRelation parse_relation(std::string_view s) {
    std::string norm(s);
    std::replace(norm.begin(), norm.end(), '-', '_');
    for (auto r : kAllRelations)
        if (norm == to_string(r)) return r;
    throw ConfigError("unknown ordering relation '" + std::string(s) + "'");
}

/// Occurrences of the source label that do (pos) and do not (neg) satisfy a relation.
struct OrderingCounts {
    std::uint64_t pos = 0;
    std::uint64_t neg = 0;

    std::uint64_t total() const noexcept { return pos + neg; }

    OrderingCounts& operator+=(const OrderingCounts& o) noexcept {
        pos += o.pos;
        neg += o.neg;
        return *this;
    }
    friend OrderingCounts operator+(OrderingCounts a, const OrderingCounts& b) noexcept { return a += b; }
    friend bool operator==(const OrderingCounts&, const OrderingCounts&) = default;
};

namespace detail {

inline bool satisfies(const Trace& t, std::size_t i, OrderingRelation r, const Label& c) {
    const std::size_t n = t.size();
    switch (r) {
    case OrderingRelation::directly_precedes: return i + 1 < n && t[i + 1].label == c;
    case OrderingRelation::directly_follows: return i > 0 && t[i - 1].label == c;
    case OrderingRelation::eventually_precedes:
        for (std::size_t j = i + 1; j < n; ++j)
            if (t[j].label == c) return true;
        return false;
    case OrderingRelation::eventually_follows:
        for (std::size_t j = 0; j < i; ++j)
            if (t[j].label == c) return true;
        return false;
    case OrderingRelation::length_two_loop:
        return i + 2 < n && t[i].label != c && t[i + 1].label == c && t[i + 2].label == t[i].label;
    }
    return false;
}

} // namespace detail

/// Single-query count by scanning the log.
inline OrderingCounts count(const EventLog& log, OrderingRelation relation, const Label& b, const Label& c) {
    OrderingCounts out;
    for (const auto& t : log) {
        // first/last position of c make the eventually_* queries linear per trace
        std::optional<std::size_t> first_c, last_c;
        for (std::size_t i = 0; i < t.size(); ++i)
            if (t[i].label == c) {
                if (!first_c) first_c = i;
                last_c = i;
            }
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i].label != b) continue;
            bool hit;
            if (relation == OrderingRelation::eventually_precedes)
                hit = last_c && *last_c > i;
            else if (relation == OrderingRelation::eventually_follows)
                hit = first_c && *first_c < i;
            else
                hit = detail::satisfies(t, i, relation, c);
            ++(hit ? out.pos : out.neg);
        }
    }
    return out;
}

/// Precomputed positive counts of every relation for every (b, c) label pair of a log.
/// Directly-* and loop counts take one pass per trace; eventually-* counts use running
/// label-presence sets, O(|trace| * |alphabet|) per trace.
class OrderingIndex {
public:
    OrderingIndex() = default;

    explicit OrderingIndex(const EventLog& log) : alphabet_(log.alphabet()), occurrences_(alphabet_.size(), 0) {
        const std::size_t a = alphabet_.size();
        std::vector<std::uint32_t> ids;
        std::vector<char> seen(a, 0);
        std::vector<std::uint32_t> seen_list;
        for (const auto& t : log) {
            ids.clear();
            for (const auto& e : t) ids.push_back(static_cast<std::uint32_t>(*id_of(e.label)));
            const std::size_t n = ids.size();
            for (std::size_t i = 0; i < n; ++i) {
                ++occurrences_[ids[i]];
                if (i + 1 < n) {
                    ++pos_[slot(OrderingRelation::directly_precedes, ids[i], ids[i + 1])];
                    ++pos_[slot(OrderingRelation::directly_follows, ids[i + 1], ids[i])];
                }
                if (i + 2 < n && ids[i] == ids[i + 2] && ids[i] != ids[i + 1])
                    ++pos_[slot(OrderingRelation::length_two_loop, ids[i], ids[i + 1])];
            }
            sweep(ids, seen, seen_list, OrderingRelation::eventually_follows, false);
            sweep(ids, seen, seen_list, OrderingRelation::eventually_precedes, true);
        }
    }

    const std::vector<Label>& alphabet() const noexcept { return alphabet_; }

    bool contains(const Label& l) const { return id_of(l).has_value(); }

    std::uint64_t occurrences(const Label& l) const {
        const auto id = id_of(l);
        return id ? occurrences_[*id] : 0;
    }

    OrderingCounts count(OrderingRelation r, const Label& b, const Label& c) const {
        const auto ib = id_of(b);
        if (!ib) return {};
        const std::uint64_t total = occurrences_[*ib];
        const auto ic = id_of(c);
        if (!ic) return {0, total};
        const auto it = pos_.find(slot(r, static_cast<std::uint32_t>(*ib), static_cast<std::uint32_t>(*ic)));
        const std::uint64_t p = it == pos_.end() ? 0 : it->second;
        return {p, total - p};
    }

private:
    std::optional<std::size_t> id_of(const Label& l) const {
        const auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), l);
        if (it == alphabet_.end() || *it != l) return std::nullopt;
        return static_cast<std::size_t>(it - alphabet_.begin());
    }

    std::uint64_t slot(OrderingRelation r, std::uint32_t b, std::uint32_t c) const {
        return (static_cast<std::uint64_t>(r) * alphabet_.size() + b) * alphabet_.size() + c;
    }

    // Walks the trace backwards (labels seen later) or forwards (labels seen earlier) and credits
    // every position with each distinct label already passed.
    void sweep(const std::vector<std::uint32_t>& ids, std::vector<char>& seen, std::vector<std::uint32_t>& seen_list,
               OrderingRelation r, bool backwards) {
        const std::size_t n = ids.size();
        for (std::size_t k = 0; k < n; ++k) {
            const std::uint32_t b = ids[backwards ? n - 1 - k : k];
            for (auto c : seen_list) ++pos_[slot(r, b, c)];
            if (!seen[b]) {
                seen[b] = 1;
                seen_list.push_back(b);
            }
        }
        for (auto c : seen_list) seen[c] = 0;
        seen_list.clear();
    }

    std::vector<Label> alphabet_;
    std::vector<std::uint64_t> occurrences_;
    std::unordered_map<std::uint64_t, std::uint64_t> pos_;
};

/// One log statistic for a refined pair (a1, a2) against a context label, with the parent
/// label's column from the base log.
struct ContingencyTable {
    OrderingRelation relation = OrderingRelation::directly_precedes;
    Label context;
    Label parent;
    Label a1;
    Label a2;
    OrderingCounts col_a1;
    OrderingCounts col_a2;
    OrderingCounts parent_col;
};

/// Tables for every context label b of the refined alphabet that is not a child of
/// `split.parent`, and every relation, ordered by b then relation. A nonnull
/// `context_filter` further restricts b.
///
/// The parent column is counted on the base log. A context label that exists only in the refined
/// log (itself a child of another split) has no base-log counterpart; its parent column is then the
/// sum over all children of the parent in the refined log.
inline std::vector<ContingencyTable> build_tables(const OrderingIndex& l1, const OrderingIndex& l2,
                                                  const SplitPair& split, const Label& a1, const Label& a2,
                                                  std::span<const OrderingRelation> relations,
                                                  const std::vector<Label>* context_filter = nullptr) {
    std::vector<ContingencyTable> out;
    for (const auto& b : l2.alphabet()) {
        if (std::binary_search(split.children.begin(), split.children.end(), b)) continue;
        if (context_filter && std::find(context_filter->begin(), context_filter->end(), b) == context_filter->end())
            continue;
        for (auto r : relations) {
            ContingencyTable t;
            t.relation = r;
            t.context = b;
            t.parent = split.parent;
            t.a1 = a1;
            t.a2 = a2;
            t.col_a1 = l2.count(r, a1, b);
            t.col_a2 = l2.count(r, a2, b);
            if (l1.contains(b)) {
                t.parent_col = l1.count(r, split.parent, b);
            } else {
                for (const auto& child : split.children) t.parent_col += l2.count(r, child, b);
            }
            out.push_back(std::move(t));
        }
    }
    return out;
}

inline std::vector<ContingencyTable> build_tables(const EventLog& l1_log, const EventLog& l2_log,
                                                  const SplitPair& split, const Label& a1, const Label& a2,
                                                  std::span<const OrderingRelation> relations,
                                                  const std::vector<Label>* context_filter = nullptr) {
    return build_tables(OrderingIndex(l1_log), OrderingIndex(l2_log), split, a1, a2, relations, context_filter);
}

struct CountRow {
    OrderingRelation relation;
    Label source;
    Label target;
    OrderingCounts counts;
};

/// All (relation, b, c) counts of a log, optionally restricted to given sources and targets.
/// Self pairs (b == c) are included only when `include_self` is set.
inline std::vector<CountRow> dump_counts(const OrderingIndex& index, std::span<const OrderingRelation> relations,
                                         const std::vector<Label>* sources = nullptr,
                                         const std::vector<Label>* targets = nullptr, bool include_self = false) {
    auto allowed = [](const std::vector<Label>* filter, const Label& l) {
        return !filter || std::find(filter->begin(), filter->end(), l) != filter->end();
    };
    std::vector<CountRow> rows;
    for (auto r : relations)
        for (const auto& b : index.alphabet()) {
            if (!allowed(sources, b)) continue;
            for (const auto& c : index.alphabet()) {
                if (!allowed(targets, c) || (!include_self && b == c)) continue;
                rows.push_back({r, b, c, index.count(r, b, c)});
            }
        }
    return rows;
}

} // namespace labelsplit

#endif // LABELSPLIT_ORDERING_STATS_HPP
