#pragma once

// Rational infinite terms and meta-terms.
//
// Terms are immutable trees of shared nodes in a nameless representation:
// bound variables carry de Bruijn indices counted over enclosing abstractions,
// and cycles are written with a recursion binder `rec` whose back-references
// (`rec_ref`) count enclosing recursion binders. A `rec` node is transparent:
// it denotes the infinite unfolding of its body and has no position of its own.
//
// Invariants on every well-formed term:
//  * every rec_ref has a guard (abstraction, function symbol or, for
//    meta-terms, meta-variable application) between it and its binder;
//  * public terms are closed with respect to rec binders;
//  * a rec body that refers to abstractions outside the rec only refers back
//    to the rec at abstraction depth zero, so unfolding never shifts indices.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace icrs {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidPosition : public Error {
public:
    using Error::Error;
};

class IllFormedTerm : public Error {
public:
    using Error::Error;
};

/// Filler used by truncation.
inline const std::string kTop = "⊤";
/// Replacement for hypercollapsing subterms.
inline const std::string kBottom = "_|_";

inline bool is_reserved_symbol(std::string_view name) { return name == kTop || name == kBottom; }

enum class NodeKind : std::uint8_t { bound, free, abs, fun, meta, rec, rec_ref };

struct Node;
using Term = std::shared_ptr<const Node>;
/// Meta-terms share the representation; only they may contain `meta` nodes.
using MetaTerm = Term;

struct Node : std::enable_shared_from_this<Node> {
    NodeKind kind;
    std::uint32_t index = 0;  // bound: de Bruijn index, rec_ref: back-level
    std::string name;         // symbol, meta-variable, free variable or binder hint
    std::vector<Term> kids;   // abs and rec: exactly one (the body)

    Node(NodeKind k, std::uint32_t i, std::string n, std::vector<Term> ks)
        : kind(k), index(i), name(std::move(n)), kids(std::move(ks)) {}

    Term self() const { return shared_from_this(); }
    const Term& body() const { return kids.front(); }
};

namespace build {

inline Term bound(std::uint32_t index) { return std::make_shared<Node>(NodeKind::bound, index, "", std::vector<Term>{}); }
inline Term free(std::string name) { return std::make_shared<Node>(NodeKind::free, 0, std::move(name), std::vector<Term>{}); }
inline Term abs(Term body, std::string hint = "x") {
    return std::make_shared<Node>(NodeKind::abs, 0, std::move(hint), std::vector<Term>{std::move(body)});
}
inline Term fun(std::string symbol, std::vector<Term> args = {}) {
    return std::make_shared<Node>(NodeKind::fun, 0, std::move(symbol), std::move(args));
}
inline Term meta(std::string metavar, std::vector<Term> args = {}) {
    return std::make_shared<Node>(NodeKind::meta, 0, std::move(metavar), std::move(args));
}
inline Term rec(Term body, std::string hint = "a") {
    return std::make_shared<Node>(NodeKind::rec, 0, std::move(hint), std::vector<Term>{std::move(body)});
}
inline Term rec_ref(std::uint32_t level) { return std::make_shared<Node>(NodeKind::rec_ref, level, "", std::vector<Term>{}); }
inline Term top() { return fun(kTop); }
inline Term bottom() { return fun(kBottom); }

/// Rebuilds `like` with new children, sharing the node when nothing changed.
inline Term with_kids(const Node& like, std::vector<Term> kids) {
    bool same = kids.size() == like.kids.size();
    for (std::size_t i = 0; same && i < kids.size(); ++i) same = kids[i] == like.kids[i];
    if (same) return like.self();
    return std::make_shared<Node>(like.kind, like.index, like.name, std::move(kids));
}

}  // namespace build

// ---------------------------------------------------------------------------
// Signature

class Signature {
public:
    void declare(const std::string& name, std::size_t arity) {
        if (is_reserved_symbol(name)) throw Error("symbol '" + name + "' is reserved");
        auto [it, inserted] = arities_.emplace(name, arity);
        if (!inserted && it->second != arity)
            throw Error("symbol '" + name + "' declared with arity " + std::to_string(arity) + " but has arity " +
                        std::to_string(it->second));
    }
    std::optional<std::size_t> arity(const std::string& name) const {
        if (is_reserved_symbol(name)) return 0;
        auto it = arities_.find(name);
        if (it == arities_.end()) return std::nullopt;
        return it->second;
    }
    bool contains(const std::string& name) const { return arity(name).has_value(); }
    const std::map<std::string, std::size_t>& symbols() const { return arities_; }
    std::vector<std::string> constants() const {
        std::vector<std::string> out;
        for (const auto& [n, a] : arities_)
            if (a == 0) out.push_back(n);
        return out;
    }

private:
    std::map<std::string, std::size_t> arities_;
};

// ---------------------------------------------------------------------------
// Positions: 0 enters an abstraction body, 1..n select arguments.

using Position = std::vector<std::uint32_t>;

inline bool is_prefix(const Position& p, const Position& q) {
    return p.size() <= q.size() && std::equal(p.begin(), p.end(), q.begin());
}
inline bool is_strict_prefix(const Position& p, const Position& q) { return p.size() < q.size() && is_prefix(p, q); }
inline bool parallel(const Position& p, const Position& q) { return !is_prefix(p, q) && !is_prefix(q, p); }
inline Position concat(Position p, const Position& q) {
    p.insert(p.end(), q.begin(), q.end());
    return p;
}
inline Position suffix_after(const Position& p, std::size_t n) { return Position(p.begin() + static_cast<std::ptrdiff_t>(n), p.end()); }

inline std::string to_string(const Position& p) {
    if (p.empty()) return "ε";
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out += '.';
        out += std::to_string(p[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cursors walk the infinite unfolding of a term without materialising it.
// The stack of enclosing rec binders resolves back-references.

struct Cursor {
    const Node* node = nullptr;
    std::vector<const Node*> recs;  // outermost first

    friend bool operator==(const Cursor&, const Cursor&) = default;
};

inline std::size_t hash_mix(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

struct CursorHash {
    std::size_t operator()(const Cursor& c) const {
        std::size_t h = std::hash<const void*>{}(c.node);
        for (const Node* r : c.recs) h = hash_mix(h, std::hash<const void*>{}(r));
        return h;
    }
};

/// Moves through rec binders and back-references until a proper node is reached.
inline Cursor settle(Cursor c) {
    std::size_t hops = 0;
    for (;;) {
        if (c.node->kind == NodeKind::rec) {
            c.recs.push_back(c.node);
            c.node = c.node->body().get();
        } else if (c.node->kind == NodeKind::rec_ref) {
            const std::size_t level = c.node->index;
            if (level >= c.recs.size()) throw IllFormedTerm("dangling recursion reference");
            const std::size_t at = c.recs.size() - 1 - level;
            c.node = c.recs[at];
            c.recs.resize(at);
        } else {
            return c;
        }
        if (++hops > 4096) throw IllFormedTerm("unguarded recursion");
    }
}

inline Cursor cursor_of(const Term& t) { return settle(Cursor{t.get(), {}}); }

/// Child `step` of a settled cursor (0 = abstraction body, 1..n = arguments).
inline std::optional<Cursor> child(const Cursor& c, std::uint32_t step) {
    const Node& n = *c.node;
    if (n.kind == NodeKind::abs) {
        if (step != 0) return std::nullopt;
        return settle(Cursor{n.body().get(), c.recs});
    }
    if (n.kind == NodeKind::fun || n.kind == NodeKind::meta) {
        if (step == 0 || step > n.kids.size()) return std::nullopt;
        return settle(Cursor{n.kids[step - 1].get(), c.recs});
    }
    return std::nullopt;
}

/// Steps available below a settled cursor, in left-to-right order.
inline std::vector<std::uint32_t> child_steps(const Cursor& c) {
    const Node& n = *c.node;
    if (n.kind == NodeKind::abs) return {0};
    std::vector<std::uint32_t> out;
    if (n.kind == NodeKind::fun || n.kind == NodeKind::meta)
        for (std::uint32_t i = 1; i <= n.kids.size(); ++i) out.push_back(i);
    return out;
}

inline std::optional<Cursor> navigate(const Term& t, const Position& p) {
    Cursor c = cursor_of(t);
    for (std::uint32_t step : p) {
        auto next = child(c, step);
        if (!next) return std::nullopt;
        c = std::move(*next);
    }
    return c;
}

inline bool is_valid_position(const Term& t, const Position& p) { return navigate(t, p).has_value(); }

// ---------------------------------------------------------------------------
// Generic variable maps. `f(rel_index, abs_depth, rec_depth)` returns the
// replacement for a dangling bound variable, or nullptr to keep it.

namespace detail {

template <class F>
Term map_bound(const Term& t, F& f, std::uint32_t abs_depth, std::uint32_t rec_depth) {
    const Node& n = *t;
    switch (n.kind) {
    case NodeKind::bound:
        if (n.index >= abs_depth) {
            Term r = f(n.index - abs_depth, abs_depth, rec_depth);
            return r ? r : t;
        }
        return t;
    case NodeKind::free:
    case NodeKind::rec_ref:
        return t;
    case NodeKind::abs:
        return build::with_kids(n, {map_bound(n.body(), f, abs_depth + 1, rec_depth)});
    case NodeKind::rec:
        return build::with_kids(n, {map_bound(n.body(), f, abs_depth, rec_depth + 1)});
    case NodeKind::fun:
    case NodeKind::meta: {
        std::vector<Term> kids;
        kids.reserve(n.kids.size());
        for (const auto& k : n.kids) kids.push_back(map_bound(k, f, abs_depth, rec_depth));
        return build::with_kids(n, std::move(kids));
    }
    }
    return t;
}

template <class F>
Term map_rec_refs(const Term& t, F& f, std::uint32_t rec_depth) {
    const Node& n = *t;
    switch (n.kind) {
    case NodeKind::rec_ref:
        if (n.index >= rec_depth) {
            Term r = f(n.index - rec_depth, rec_depth);
            return r ? r : t;
        }
        return t;
    case NodeKind::bound:
    case NodeKind::free:
        return t;
    case NodeKind::rec:
        return build::with_kids(n, {map_rec_refs(n.body(), f, rec_depth + 1)});
    default: {
        std::vector<Term> kids;
        kids.reserve(n.kids.size());
        for (const auto& k : n.kids) kids.push_back(map_rec_refs(k, f, rec_depth));
        return build::with_kids(n, std::move(kids));
    }
    }
}

}  // namespace detail

template <class F>
Term map_bound(const Term& t, F&& f) {
    return detail::map_bound(t, f, 0, 0);
}

/// Adds `by` to every dangling abstraction index.
inline Term shift(const Term& t, std::uint32_t by) {
    if (by == 0) return t;
    return map_bound(t, [by](std::uint32_t rel, std::uint32_t depth, std::uint32_t) {
        return build::bound(rel + by + depth);
    });
}

/// Adds `by` to every dangling rec back-reference.
inline Term shift_recs(const Term& t, std::uint32_t by) {
    if (by == 0) return t;
    auto f = [by](std::uint32_t rel, std::uint32_t depth) { return build::rec_ref(rel + by + depth); };
    return detail::map_rec_refs(t, f, 0);
}

/// Replaces dangling rec back-reference `j` by `closed[j]` (which must be rec-closed).
inline Term close_recs(const Term& t, const std::vector<Term>& closed) {
    if (closed.empty()) return t;
    auto f = [&closed](std::uint32_t rel, std::uint32_t) -> Term {
        if (rel >= closed.size()) throw IllFormedTerm("dangling recursion reference");
        return closed[rel];
    };
    return detail::map_rec_refs(t, f, 0);
}

/// Instantiates the dangling indices 0..n-1 of `body` (n = args.size()) so that
/// the outermost parameter (index n-1) receives args[0]. Remaining dangling
/// indices are lowered by n. Arguments live at the root of `body`.
inline Term instantiate(const Term& body, const std::vector<Term>& args) {
    const auto n = static_cast<std::uint32_t>(args.size());
    if (n == 0) return body;
    return map_bound(body, [&](std::uint32_t rel, std::uint32_t depth, std::uint32_t rdepth) -> Term {
        if (rel < n) return shift_recs(shift(args[n - 1 - rel], depth), rdepth);
        return build::bound(rel - n + depth);
    });
}

/// Unfolds a top-level rec binder once.
inline Term unfold(const Term& t) {
    if (t->kind != NodeKind::rec) return t;
    return close_recs(t->body(), {t});
}

/// The rec-closed subterm a settled cursor points at. Dangling abstraction
/// indices are kept.
inline Term materialize(const Cursor& c) {
    if (c.recs.empty()) return c.node->self();
    // replacements[j] closes back-level j as seen from the cursor's node.
    std::vector<Term> replacements(c.recs.size());
    for (std::size_t at = 0; at < c.recs.size(); ++at) {
        std::vector<Term> outer(replacements.end() - static_cast<std::ptrdiff_t>(at), replacements.end());
        // `outer` holds the closures of the recs enclosing recs[at], innermost first.
        Term closed = close_recs(c.recs[at]->self(), outer);
        replacements[c.recs.size() - 1 - at] = closed;
    }
    return close_recs(c.node->self(), replacements);
}

inline Term replace_at(const Term& t, const Position& p, const Term& replacement, std::size_t from = 0) {
    Term cur = t;
    while (cur->kind == NodeKind::rec) cur = unfold(cur);
    if (from == p.size()) return replacement;
    const Node& n = *cur;
    const std::uint32_t step = p[from];
    if (n.kind == NodeKind::abs && step == 0) return build::with_kids(n, {replace_at(n.body(), p, replacement, from + 1)});
    if ((n.kind == NodeKind::fun || n.kind == NodeKind::meta) && step >= 1 && step <= n.kids.size()) {
        std::vector<Term> kids = n.kids;
        kids[step - 1] = replace_at(kids[step - 1], p, replacement, from + 1);
        return build::with_kids(n, std::move(kids));
    }
    throw InvalidPosition("position " + to_string(p) + " is not a position of the term");
}

// ---------------------------------------------------------------------------
// Subterms

/// Subterm at `p` with bound variables of the context left dangling.
inline Term open_subterm_at(const Term& s, const Position& p) {
    auto c = navigate(s, p);
    if (!c) throw InvalidPosition("position " + to_string(p) + " is not a position of the term");
    return materialize(*c);
}

/// Binder hints of the abstractions crossed on the way to `p`, outermost first.
inline std::vector<std::string> binders_above(const Term& s, const Position& p) {
    std::vector<std::string> out;
    Cursor c = cursor_of(s);
    for (std::uint32_t step : p) {
        if (c.node->kind == NodeKind::abs) out.push_back(c.node->name);
        auto next = child(c, step);
        if (!next) throw InvalidPosition("position " + to_string(p) + " is not a position of the term");
        c = std::move(*next);
    }
    return out;
}

/// Subterm at `p`; variables bound above `p` become free variables named
/// after their binders.
inline Term subterm_at(const Term& s, const Position& p) {
    Term open = open_subterm_at(s, p);
    const auto names = binders_above(s, p);
    return map_bound(open, [&](std::uint32_t rel, std::uint32_t, std::uint32_t) -> Term {
        if (rel >= names.size()) return nullptr;
        return build::free(names[names.size() - 1 - rel]);
    });
}

// ---------------------------------------------------------------------------
// Root symbols

struct RootSymbol {
    enum class Tag : std::uint8_t { variable, abstraction, meta_variable, function };
    Tag tag;
    std::string name;          // function / meta-variable / free variable name
    std::uint32_t index = 0;   // de Bruijn index of a bound variable
    bool bound = false;

    friend bool operator==(const RootSymbol&, const RootSymbol&) = default;
};

inline RootSymbol root_symbol_of(const Node& n) {
    switch (n.kind) {
    case NodeKind::bound: return {RootSymbol::Tag::variable, "", n.index, true};
    case NodeKind::free: return {RootSymbol::Tag::variable, n.name, 0, false};
    case NodeKind::abs: return {RootSymbol::Tag::abstraction, "", 0, false};
    case NodeKind::meta: return {RootSymbol::Tag::meta_variable, n.name, 0, false};
    case NodeKind::fun: return {RootSymbol::Tag::function, n.name, 0, false};
    default: throw IllFormedTerm("unsettled recursion node");
    }
}

inline RootSymbol root_symbol(const Term& s) { return root_symbol_of(*cursor_of(s).node); }

/// Same root symbol modulo α-equivalence, including arity.
inline bool same_head(const Node& a, const Node& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case NodeKind::bound: return a.index == b.index;
    case NodeKind::free: return a.name == b.name;
    case NodeKind::abs: return true;
    case NodeKind::fun:
    case NodeKind::meta: return a.name == b.name && a.kids.size() == b.kids.size();
    default: return false;
    }
}

// ---------------------------------------------------------------------------
// α-equivalence and the metric, by synchronised traversal of both unfoldings.

struct CursorPairHash {
    std::size_t operator()(const std::pair<Cursor, Cursor>& p) const {
        return hash_mix(CursorHash{}(p.first), CursorHash{}(p.second));
    }
};

/// Minimal-depth position at which the two terms differ, if any.
inline std::optional<Position> first_difference(const Term& a, const Term& b) {
    struct Item {
        Cursor a, b;
        Position at;
    };
    std::unordered_set<std::pair<Cursor, Cursor>, CursorPairHash> seen;
    std::deque<Item> queue;
    queue.push_back({cursor_of(a), cursor_of(b), {}});
    while (!queue.empty()) {
        Item it = std::move(queue.front());
        queue.pop_front();
        if (!seen.insert({it.a, it.b}).second) continue;
        if (!same_head(*it.a.node, *it.b.node)) return it.at;
        for (std::uint32_t step : child_steps(it.a)) {
            Position next = it.at;
            next.push_back(step);
            queue.push_back({*child(it.a, step), *child(it.b, step), std::move(next)});
        }
    }
    return std::nullopt;
}

inline bool alpha_eq(const Term& a, const Term& b) { return a == b || !first_difference(a, b); }

/// 0 or 2^-k, kept as the exponent.
class Distance {
public:
    static Distance zero() { return Distance{}; }
    static Distance exponent(std::size_t k) {
        Distance d;
        d.exponent_ = k;
        return d;
    }
    bool is_zero() const { return !exponent_; }
    std::size_t exponent() const { return exponent_.value(); }
    double value() const { return is_zero() ? 0.0 : std::ldexp(1.0, -static_cast<int>(*exponent_)); }

    friend bool operator==(const Distance&, const Distance&) = default;
    friend std::strong_ordering operator<=>(const Distance& x, const Distance& y) {
        if (x.is_zero() || y.is_zero()) return !x.is_zero() <=> !y.is_zero();
        return *y.exponent_ <=> *x.exponent_;
    }

private:
    std::optional<std::size_t> exponent_;
};

inline Distance distance(const Term& a, const Term& b) {
    auto d = first_difference(a, b);
    return d ? Distance::exponent(d->size()) : Distance::zero();
}

// ---------------------------------------------------------------------------
// Truncation and positions

inline Term truncate(const Term& s, std::size_t depth, const std::string& filler = kTop) {
    std::function<Term(const Cursor&, std::size_t)> go = [&](const Cursor& c, std::size_t d) -> Term {
        if (d == depth) return build::fun(filler);
        const Node& n = *c.node;
        switch (n.kind) {
        case NodeKind::bound:
        case NodeKind::free: return n.self();
        case NodeKind::abs: return build::abs(go(*child(c, 0), d + 1), n.name);
        default: {
            std::vector<Term> kids;
            for (std::uint32_t i = 1; i <= n.kids.size(); ++i) kids.push_back(go(*child(c, i), d + 1));
            return std::make_shared<Node>(n.kind, n.index, n.name, std::move(kids));
        }
        }
    };
    return go(cursor_of(s), 0);
}

inline std::set<Position> positions_up_to(const Term& s, std::size_t depth) {
    std::set<Position> out;
    std::function<void(const Cursor&, Position&)> go = [&](const Cursor& c, Position& at) {
        out.insert(at);
        if (at.size() == depth) return;
        for (std::uint32_t step : child_steps(c)) {
            at.push_back(step);
            go(*child(c, step), at);
            at.pop_back();
        }
    };
    Position root;
    go(cursor_of(s), root);
    return out;
}

/// Number of syntax nodes (not of the unfolding).
inline std::size_t syntax_size(const Term& t) {
    std::size_t n = 1;
    for (const auto& k : t->kids) n += syntax_size(k);
    return n;
}

inline bool is_finite(const Term& t) {
    if (t->kind == NodeKind::rec) return false;
    return std::all_of(t->kids.begin(), t->kids.end(), [](const Term& k) { return is_finite(k); });
}

inline bool has_meta(const Term& t) {
    if (t->kind == NodeKind::meta) return true;
    return std::any_of(t->kids.begin(), t->kids.end(), [](const Term& k) { return has_meta(k); });
}

inline bool contains_symbol(const Term& t, const std::string& symbol) {
    if (t->kind == NodeKind::fun && t->name == symbol) return true;
    return std::any_of(t->kids.begin(), t->kids.end(), [&](const Term& k) { return contains_symbol(k, symbol); });
}

/// Largest dangling index + 1 (0 for terms without dangling variables).
inline std::uint32_t dangling_bound(const Term& t) {
    std::uint32_t top = 0;
    map_bound(t, [&](std::uint32_t rel, std::uint32_t, std::uint32_t) -> Term {
        top = std::max(top, rel + 1);
        return nullptr;
    });
    return top;
}

inline void collect_free_names(const Term& t, std::set<std::string>& out) {
    if (t->kind == NodeKind::free) out.insert(t->name);
    for (const auto& k : t->kids) collect_free_names(k, out);
}

// ---------------------------------------------------------------------------
// Hashing modulo α: a hash of a bounded breadth-first prefix of the unfolding.

inline std::size_t prefix_hash(const Term& t, std::size_t depth = 6, std::size_t node_budget = 256) {
    std::size_t h = 0x51ed27;
    std::deque<std::pair<Cursor, std::size_t>> queue;
    queue.emplace_back(cursor_of(t), 0);
    std::size_t visited = 0;
    while (!queue.empty() && visited < node_budget) {
        auto [c, d] = std::move(queue.front());
        queue.pop_front();
        ++visited;
        const Node& n = *c.node;
        h = hash_mix(h, static_cast<std::size_t>(n.kind));
        if (n.kind == NodeKind::bound) h = hash_mix(h, n.index);
        if (n.kind != NodeKind::abs && n.kind != NodeKind::bound) h = hash_mix(h, std::hash<std::string>{}(n.name));
        h = hash_mix(h, n.kids.size());
        if (d == depth) continue;
        for (std::uint32_t step : child_steps(c)) queue.emplace_back(*child(c, step), d + 1);
    }
    return h;
}

/// Interning table of terms modulo α-equivalence.
class TermIndex {
public:
    /// Returns (id, inserted).
    std::pair<std::size_t, bool> intern(const Term& t) {
        const std::size_t h = prefix_hash(t);
        auto& bucket = buckets_[h];
        for (std::size_t id : bucket)
            if (alpha_eq(terms_[id], t)) return {id, false};
        bucket.push_back(terms_.size());
        terms_.push_back(t);
        return {terms_.size() - 1, true};
    }
    std::optional<std::size_t> find(const Term& t) const {
        auto it = buckets_.find(prefix_hash(t));
        if (it == buckets_.end()) return std::nullopt;
        for (std::size_t id : it->second)
            if (alpha_eq(terms_[id], t)) return id;
        return std::nullopt;
    }
    const Term& operator[](std::size_t id) const { return terms_[id]; }
    std::size_t size() const { return terms_.size(); }

private:
    std::unordered_map<std::size_t, std::vector<std::size_t>> buckets_;
    std::vector<Term> terms_;
};

// ---------------------------------------------------------------------------
// Chains of meta-variables

struct ChainLink {
    Position position;     // position of the meta-variable application
    std::uint32_t hole;    // argument leading to the next link; 0 on the last link
    std::string metavar;
};

enum class ChainKind : std::uint8_t { finite, cyclic_infinite };

struct Chain {
    std::vector<ChainLink> links;
    ChainKind kind = ChainKind::finite;
};

/// Maximal chains of directly nested meta-variable applications. A chain is
/// cyclic-infinite when the nesting runs around a recursion cycle consisting
/// solely of meta-variable links.
inline std::vector<Chain> find_meta_chains(const MetaTerm& s) {
    // Distinct cursor states with their first position, breadth first.
    std::unordered_map<Cursor, Position, CursorHash> first_pos;
    std::vector<Cursor> order;
    std::unordered_set<Cursor, CursorHash> has_meta_parent;
    std::deque<Cursor> queue;
    Cursor root = cursor_of(s);
    first_pos.emplace(root, Position{});
    order.push_back(root);
    queue.push_back(root);
    while (!queue.empty()) {
        Cursor c = queue.front();
        queue.pop_front();
        const Position at = first_pos.at(c);
        for (std::uint32_t step : child_steps(c)) {
            Cursor k = *child(c, step);
            if (c.node->kind == NodeKind::meta && k.node->kind == NodeKind::meta) has_meta_parent.insert(k);
            if (first_pos.count(k)) continue;
            Position next = at;
            next.push_back(step);
            first_pos.emplace(k, std::move(next));
            order.push_back(k);
            queue.push_back(k);
        }
    }

    std::vector<Chain> chains;
    std::function<void(const Cursor&, Position, Chain&, std::unordered_set<Cursor, CursorHash>&)> extend =
        [&](const Cursor& c, Position at, Chain& chain, std::unordered_set<Cursor, CursorHash>& on_path) {
            on_path.insert(c);
            bool extended = false;
            for (std::uint32_t step : child_steps(c)) {
                Cursor k = *child(c, step);
                if (k.node->kind != NodeKind::meta) continue;
                extended = true;
                Chain next = chain;
                next.links.push_back({at, step, c.node->name});
                Position kat = at;
                kat.push_back(step);
                if (on_path.count(k)) {
                    next.kind = ChainKind::cyclic_infinite;
                    next.links.push_back({kat, 0, k.node->name});
                    chains.push_back(std::move(next));
                    continue;
                }
                extend(k, kat, next, on_path);
            }
            if (!extended) {
                Chain done = chain;
                done.links.push_back({at, 0, c.node->name});
                chains.push_back(std::move(done));
            }
            on_path.erase(c);
        };

    std::unordered_set<Cursor, CursorHash> started;
    for (const Cursor& c : order) {
        if (c.node->kind != NodeKind::meta || has_meta_parent.count(c)) continue;
        Chain chain;
        std::unordered_set<Cursor, CursorHash> on_path;
        started.insert(c);
        extend(c, first_pos.at(c), chain, on_path);
    }
    // Pure meta cycles that no non-meta node enters.
    for (const Cursor& c : order) {
        if (c.node->kind != NodeKind::meta || started.count(c)) continue;
        bool covered = false;
        for (const auto& ch : chains)
            for (const auto& l : ch.links)
                if (l.position == first_pos.at(c)) covered = true;
        if (covered) continue;
        Chain chain;
        std::unordered_set<Cursor, CursorHash> on_path;
        started.insert(c);
        extend(c, first_pos.at(c), chain, on_path);
    }
    return chains;
}

inline bool satisfies_finite_chains(const MetaTerm& s) {
    // Collect the cursor states of the unfolding, then look for a cycle made
    // only of meta-to-meta argument edges.
    std::unordered_set<Cursor, CursorHash> states;
    std::deque<Cursor> queue{cursor_of(s)};
    states.insert(queue.front());
    while (!queue.empty()) {
        Cursor c = queue.front();
        queue.pop_front();
        for (std::uint32_t step : child_steps(c)) {
            Cursor k = *child(c, step);
            if (states.insert(k).second) queue.push_back(k);
        }
    }
    std::unordered_map<Cursor, int, CursorHash> colour;  // 1 on stack, 2 done
    std::function<bool(const Cursor&)> dfs = [&](const Cursor& c) -> bool {
        colour[c] = 1;
        for (std::uint32_t step : child_steps(c)) {
            Cursor k = *child(c, step);
            if (k.node->kind != NodeKind::meta) continue;
            auto it = colour.find(k);
            if (it == colour.end()) {
                if (dfs(k)) return true;
            } else if (it->second == 1) {
                return true;
            }
        }
        colour[c] = 2;
        return false;
    };
    for (const Cursor& c : states)
        if (c.node->kind == NodeKind::meta && !colour.count(c) && dfs(c)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Well-formedness

struct WellFormedOptions {
    const Signature* signature = nullptr;  // checked when present
    bool allow_meta = false;
    bool allow_dangling = true;            // dangling abstraction indices
};

inline void check_well_formed(const Term& t, const WellFormedOptions& opts = {}) {
    struct RecFrame {
        std::uint32_t abs_depth;
        bool escapes = false;
        bool deep_ref = false;
    };
    std::vector<RecFrame> recs;
    std::map<std::string, std::size_t> meta_arity;

    std::function<void(const Term&, std::uint32_t, std::uint32_t)> go = [&](const Term& u, std::uint32_t abs_depth,
                                                                             std::uint32_t unguarded) {
        const Node& n = *u;
        switch (n.kind) {
        case NodeKind::bound: {
            if (n.index >= abs_depth && !opts.allow_dangling) throw IllFormedTerm("bound variable escapes its scope");
            if (n.index < abs_depth) {
                const std::uint32_t binder_level = abs_depth - 1 - n.index;
                for (auto& r : recs)
                    if (binder_level < r.abs_depth) r.escapes = true;
            } else {
                for (auto& r : recs) r.escapes = true;
            }
            return;
        }
        case NodeKind::free: return;
        case NodeKind::rec_ref: {
            if (n.index >= recs.size()) throw IllFormedTerm("recursion reference without binder");
            if (n.index < unguarded) throw IllFormedTerm("unguarded recursion");
            auto& r = recs[recs.size() - 1 - n.index];
            if (abs_depth > r.abs_depth) r.deep_ref = true;
            return;
        }
        case NodeKind::rec: {
            recs.push_back({abs_depth});
            go(n.body(), abs_depth, unguarded + 1);
            RecFrame done = recs.back();
            recs.pop_back();
            if (done.escapes && done.deep_ref)
                throw IllFormedTerm("recursion through an abstraction over an outer bound variable is not rational in nameless form");
            return;
        }
        case NodeKind::abs: go(n.body(), abs_depth + 1, 0); return;
        case NodeKind::fun:
            if (opts.signature) {
                auto a = opts.signature->arity(n.name);
                if (!a) throw IllFormedTerm("unknown symbol '" + n.name + "'");
                if (*a != n.kids.size())
                    throw IllFormedTerm("symbol '" + n.name + "' expects " + std::to_string(*a) + " arguments");
            }
            for (const auto& k : n.kids) go(k, abs_depth, 0);
            return;
        case NodeKind::meta: {
            if (!opts.allow_meta) throw IllFormedTerm("meta-variable '" + n.name + "' in a term");
            auto [it, inserted] = meta_arity.emplace(n.name, n.kids.size());
            if (!inserted && it->second != n.kids.size())
                throw IllFormedTerm("meta-variable '" + n.name + "' used with inconsistent arity");
            for (const auto& k : n.kids) go(k, abs_depth, 0);
            return;
        }
        }
    };
    go(t, 0, 0);
}

}  // namespace icrs
