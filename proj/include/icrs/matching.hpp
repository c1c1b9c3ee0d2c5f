#pragma once

#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "rules.hpp"

namespace icrs {

struct Redex {
    Position position;
    std::size_t rule = 0;   // index into the rule system
    Valuation valuation;
    std::size_t depth() const { return position.size(); }
};

inline bool same_redex(const Redex& a, const Redex& b) { return a.position == b.position && a.rule == b.rule; }

struct RedexOrder {
    bool operator()(const Redex& a, const Redex& b) const {
        return a.position != b.position ? a.position < b.position : a.rule < b.rule;
    }
};

using RedexSet = std::set<Redex, RedexOrder>;

namespace detail {

// Walks the finite pattern `l` against the unfolding under `c`. `depth`
// counts pattern abstractions above `l`.
inline bool match_node(const Term& l, const Cursor& c, std::uint32_t depth, Valuation& v) {
    const Node& p = *l;
    const Node& n = *c.node;
    switch (p.kind) {
    case NodeKind::fun:
        if (n.kind != NodeKind::fun || n.name != p.name || n.kids.size() != p.kids.size()) return false;
        for (std::uint32_t i = 0; i < p.kids.size(); ++i)
            if (!match_node(p.kids[i], *child(c, i + 1), depth, v)) return false;
        return true;
    case NodeKind::abs:
        if (n.kind != NodeKind::abs) return false;
        return match_node(p.body(), *child(c, 0), depth + 1, v);
    case NodeKind::bound:
        return n.kind == NodeKind::bound && n.index == p.index && p.index < depth;
    case NodeKind::meta: {
        const auto k = static_cast<std::uint32_t>(p.kids.size());
        std::vector<std::uint32_t> params;  // pattern indices of the arguments
        for (const auto& a : p.kids) params.push_back(a->index);
        bool ok = true;
        Term body = map_bound(materialize(c), [&](std::uint32_t rel, std::uint32_t inner, std::uint32_t) -> Term {
            if (rel >= depth) return build::bound(rel - depth + k + inner);
            for (std::uint32_t j = 0; j < k; ++j)
                if (params[j] == rel) return build::bound(k - 1 - j + inner);
            ok = false;
            return nullptr;
        });
        if (!ok) return false;
        Substitute sub{k, body};
        auto [it, inserted] = v.emplace(p.name, sub);
        return inserted || alpha_eq(it->second, sub);
    }
    default:
        return false;
    }
}

}  // namespace detail

inline std::optional<Valuation> match_cursor(const Rule& rule, const Cursor& c) {
    Valuation v;
    if (!detail::match_node(rule.lhs, c, 0, v)) return std::nullopt;
    return v;
}

inline std::optional<Valuation> match_at(const Rule& rule, const Term& s, const Position& p) {
    auto c = navigate(s, p);
    if (!c) throw InvalidPosition("position " + to_string(p) + " is not a position of the term");
    return match_cursor(rule, *c);
}

/// Positions of the redex pattern relative to the redex root.
inline std::set<Position> footprint(const RuleSystem& sys, const Redex& r) { return sys.footprint(r.rule); }

/// Searches the unfolding of a term for redexes in pre-order (which is the
/// lexicographic order on positions). Match results and the absence of
/// redexes below a cursor state are memoised.
class RedexScanner {
public:
    RedexScanner(const RuleSystem& sys, const Term& s) : sys_(sys), term_(s) {}

    /// First redex position strictly after `after` (or from the start), with
    /// all rules matching there.
    std::optional<std::vector<Redex>> next(const std::optional<Position>& after, std::size_t depth_bound) {
        Position at;
        return scan(cursor_of(term_), at, after, depth_bound);
    }

    /// Leftmost redex at exactly depth `d`, strictly right of `after` when given
    /// (which must have length `d`).
    std::optional<std::vector<Redex>> first_at_depth(std::size_t d, const std::optional<Position>& after) {
        Position at;
        return level_scan(cursor_of(term_), at, d, after);
    }

    std::vector<Redex> all(std::size_t depth_bound) {
        std::vector<Redex> out;
        Position at;
        collect(cursor_of(term_), at, depth_bound, out);
        return out;
    }

    /// Whether some redex lies at depth > bound (decided on cursor states).
    bool has_redex_below(std::size_t bound) {
        // states reachable at depth min(d, bound+1)
        std::set<std::pair<std::size_t, std::size_t>> seen;
        std::vector<std::pair<Cursor, std::size_t>> stack{{cursor_of(term_), 0}};
        std::unordered_map<Cursor, std::size_t, CursorHash> ids;
        auto id_of = [&](const Cursor& c) { return ids.emplace(c, ids.size()).first->second; };
        while (!stack.empty()) {
            auto [c, d] = stack.back();
            stack.pop_back();
            if (!seen.insert({id_of(c), d}).second) continue;
            if (d > bound && !matches(c).empty()) return true;
            for (std::uint32_t step : child_steps(c)) stack.push_back({*child(c, step), std::min(d + 1, bound + 1)});
        }
        return false;
    }

    const std::vector<std::pair<std::size_t, Valuation>>& matches(const Cursor& c) {
        auto it = matches_.find(c);
        if (it != matches_.end()) return it->second;
        std::vector<std::pair<std::size_t, Valuation>> found;
        for (std::size_t i = 0; i < sys_.size(); ++i)
            if (auto v = match_cursor(sys_.rule(i), c)) found.emplace_back(i, std::move(*v));
        return matches_.emplace(c, std::move(found)).first->second;
    }

private:
    struct Key {
        Cursor c;
        std::size_t budget;
        friend bool operator==(const Key&, const Key&) = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const { return hash_mix(CursorHash{}(k.c), k.budget); }
    };

    bool any_within(const Cursor& c, std::size_t budget) {
        Key key{c, budget};
        if (auto it = any_.find(key); it != any_.end()) return it->second;
        bool found = !matches(c).empty();
        if (!found && budget > 0)
            for (std::uint32_t step : child_steps(c))
                if (any_within(*child(c, step), budget - 1)) {
                    found = true;
                    break;
                }
        any_.emplace(key, found);
        return found;
    }

    bool any_at(const Cursor& c, std::size_t k) {
        Key key{c, k};
        if (auto it = at_.find(key); it != at_.end()) return it->second;
        bool found = k == 0 ? !matches(c).empty() : false;
        if (k > 0)
            for (std::uint32_t step : child_steps(c))
                if (any_at(*child(c, step), k - 1)) {
                    found = true;
                    break;
                }
        at_.emplace(key, found);
        return found;
    }

    std::optional<std::vector<Redex>> level_scan(const Cursor& c, Position& at, std::size_t d,
                                                 const std::optional<Position>& after) {
        const bool on_path = after && is_prefix(at, *after);
        if (!any_at(c, d - at.size())) return std::nullopt;
        if (at.size() == d) {
            if (on_path) return std::nullopt;  // that is `after` itself
            return here(c, at);
        }
        for (std::uint32_t step : child_steps(c)) {
            if (on_path && step < (*after)[at.size()]) continue;
            at.push_back(step);
            std::optional<Position> sub_after = on_path && step == (*after)[at.size() - 1] ? after : std::nullopt;
            auto r = level_scan(*child(c, step), at, d, sub_after);
            at.pop_back();
            if (r) return r;
        }
        return std::nullopt;
    }

    std::vector<Redex> here(const Cursor& c, const Position& at) {
        std::vector<Redex> out;
        for (const auto& [rule, v] : matches(c)) out.push_back({at, rule, v});
        return out;
    }

    std::optional<std::vector<Redex>> scan(const Cursor& c, Position& at, const std::optional<Position>& after,
                                           std::size_t bound) {
        const std::size_t remaining = bound - at.size();
        // `after` constrains the search only while we are on its path
        const bool on_path = after && is_prefix(at, *after);
        if (!on_path && !any_within(c, remaining)) return std::nullopt;
        if (!on_path && !matches(c).empty()) return here(c, at);
        if (remaining == 0) return std::nullopt;
        for (std::uint32_t step : child_steps(c)) {
            if (on_path && at.size() < after->size() && step < (*after)[at.size()]) continue;
            at.push_back(step);
            std::optional<Position> sub_after = after;
            if (on_path && (at.size() > after->size() || step != (*after)[at.size() - 1])) sub_after.reset();
            auto r = scan(*child(c, step), at, sub_after, bound);
            at.pop_back();
            if (r) return r;
        }
        return std::nullopt;
    }

    void collect(const Cursor& c, Position& at, std::size_t bound, std::vector<Redex>& out) {
        const std::size_t remaining = bound - at.size();
        if (!any_within(c, remaining)) return;
        for (auto& r : here(c, at)) out.push_back(std::move(r));
        if (remaining == 0) return;
        for (std::uint32_t step : child_steps(c)) {
            at.push_back(step);
            collect(*child(c, step), at, bound, out);
            at.pop_back();
        }
    }

    const RuleSystem& sys_;
    Term term_;
    std::unordered_map<Cursor, std::vector<std::pair<std::size_t, Valuation>>, CursorHash> matches_;
    std::unordered_map<Key, bool, KeyHash> any_;
    std::unordered_map<Key, bool, KeyHash> at_;
};

/// All redexes at depth ≤ depth_bound, ordered by position then rule.
inline std::vector<Redex> find_redexes(const Term& s, const RuleSystem& sys, std::size_t depth_bound) {
    return RedexScanner(sys, s).all(depth_bound);
}

inline bool is_normal_form(const Term& s, const RuleSystem& sys) {
    RedexScanner scan(sys, s);
    // cursor states are finite, so one sweep over them decides this
    std::unordered_set<Cursor, CursorHash> seen;
    std::vector<Cursor> stack{cursor_of(s)};
    while (!stack.empty()) {
        Cursor c = stack.back();
        stack.pop_back();
        if (!seen.insert(c).second) continue;
        if (!scan.matches(c).empty()) return false;
        for (std::uint32_t step : child_steps(c)) stack.push_back(*child(c, step));
    }
    return true;
}

}  // namespace icrs
