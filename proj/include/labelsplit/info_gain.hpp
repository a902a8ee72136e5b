#ifndef LABELSPLIT_INFO_GAIN_HPP
#define LABELSPLIT_INFO_GAIN_HPP

#include "labelsplit/errors.hpp"
#include "labelsplit/ordering_stats.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace labelsplit {

/// H_b(p) in bits, with 0 log 0 = 0.
inline double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("binary_entropy: p must lie in [0, 1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

struct TableEntropy {
    double before = 0.0; ///< entropy of the parent column
    double after = 0.0;  ///< weighted entropy of the two child columns
    double weight_a1 = 0.0;
    double weight_a2 = 0.0;
};

namespace detail {

inline double column_entropy(const OrderingCounts& c) {
    const auto n = c.total();
    return n == 0 ? 0.0 : binary_entropy(static_cast<double>(c.pos) / static_cast<double>(n));
}

} // namespace detail

inline TableEntropy table_entropies(const ContingencyTable& t) {
    TableEntropy e;
    const auto total = t.parent_col.total();
    if (total == 0) return e;
    e.before = detail::column_entropy(t.parent_col);
    e.weight_a1 = static_cast<double>(t.col_a1.total()) / static_cast<double>(total);
    e.weight_a2 = static_cast<double>(t.col_a2.total()) / static_cast<double>(total);
    e.after = e.weight_a1 * detail::column_entropy(t.col_a1) + e.weight_a2 * detail::column_entropy(t.col_a2);
    // concavity gives after <= before for additive columns; absorb rounding only
    if (e.after > e.before && e.after - e.before <= 1e-12) e.after = e.before;
    return e;
}

struct TableEntropyEntry {
    OrderingRelation relation;
    Label context;
    Label a1;
    Label a2;
    TableEntropy entropy;
};

/// Entropies of every statistic of one candidate, and their totals.
struct EntropyBreakdown {
    std::vector<TableEntropyEntry> per_table;
    double total_before = 0.0;
    double total_after = 0.0;
    double information_gain = 0.0;
    double relative_information_gain = 0.0; ///< 0 when total_before is 0
};

inline EntropyBreakdown relative_information_gain(std::span<const ContingencyTable> tables) {
    EntropyBreakdown out;
    out.per_table.reserve(tables.size());
    for (const auto& t : tables) {
        const auto e = table_entropies(t);
        out.per_table.push_back({t.relation, t.context, t.a1, t.a2, e});
        out.total_before += e.before;
        out.total_after += e.after;
    }
    out.information_gain = out.total_before - out.total_after;
    out.relative_information_gain =
        out.total_before > 0.0 ? std::clamp(out.information_gain / out.total_before, 0.0, 1.0) : 0.0;
    return out;
}

} // namespace labelsplit

#endif // LABELSPLIT_INFO_GAIN_HPP
