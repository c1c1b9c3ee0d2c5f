#pragma once

// Reference implementations used only by the tests. None of them share code
// with the library beyond the Node data structure they read.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <icrs/icrs.hpp>

namespace oracle {

using icrs::Node;
using icrs::NodeKind;
using icrs::Term;

// A finite labelled tree: the unfolding of a term cut at some depth. Bound
// variables are named by de Bruijn level ("#L3"), dangling ones by their
// outer index ("#D0"), free ones "$x". Abstractions are "λ".
struct Tree {
    std::string head;
    std::vector<Tree> kids;
    friend bool operator==(const Tree&, const Tree&) = default;
};

namespace impl {
struct Frame;
struct Env {
    std::vector<int> abs_levels;   // levels of the lexically enclosing abstractions
    std::vector<Frame> recs;
};
struct Frame {
    const Node* rec;
    Env env;
};

inline Tree unfold(const Node* n, Env env, int level, std::size_t left) {
    for (;;) {
        if (n->kind == NodeKind::rec) {
            Env inner = env;
            inner.recs.push_back(Frame{n, env});
            env = std::move(inner);
            n = n->kids.front().get();
        } else if (n->kind == NodeKind::rec_ref) {
            Frame f = env.recs.at(env.recs.size() - 1 - n->index);
            env = f.env;
            n = f.rec;
        } else {
            break;
        }
    }
    if (left == 0) return {"…", {}};
    switch (n->kind) {
    case NodeKind::bound: {
        const auto s = env.abs_levels.size();
        if (n->index < s) return {"#L" + std::to_string(env.abs_levels[s - 1 - n->index]), {}};
        return {"#D" + std::to_string(n->index - s), {}};
    }
    case NodeKind::free: return {"$" + n->name, {}};
    case NodeKind::abs: {
        Env inner = env;
        inner.abs_levels.push_back(level);
        return {"λ", {unfold(n->kids.front().get(), inner, level + 1, left - 1)}};
    }
    default: {
        Tree t{(n->kind == NodeKind::meta ? "?" : "") + n->name + "/" + std::to_string(n->kids.size()), {}};
        for (const auto& k : n->kids) t.kids.push_back(unfold(k.get(), env, level, left - 1));
        return t;
    }
    }
}
}  // namespace impl

/// Unfolding cut at `depth` (nodes at that depth become "…").
inline Tree tree_of(const Term& t, std::size_t depth) { return impl::unfold(t.get(), {}, 0, depth + 1); }

/// Minimal depth where the unfoldings differ, looking no deeper than `depth`.
inline std::optional<std::size_t> difference_depth(const Term& a, const Term& b, std::size_t depth = 14) {
    Tree x = tree_of(a, depth), y = tree_of(b, depth);
    std::vector<std::pair<const Tree*, const Tree*>> layer{{&x, &y}};
    for (std::size_t d = 0; !layer.empty(); ++d) {
        std::vector<std::pair<const Tree*, const Tree*>> next;
        for (auto [p, q] : layer) {
            if (p->head == "…" || q->head == "…") continue;
            if (p->head != q->head) return d;
            for (std::size_t i = 0; i < p->kids.size(); ++i) next.push_back({&p->kids[i], &q->kids[i]});
        }
        layer = std::move(next);
    }
    return std::nullopt;
}

/// Positions of the unfolding up to `depth`.
inline std::set<icrs::Position> positions(const Term& t, std::size_t depth) {
    std::set<icrs::Position> out;
    std::function<void(const Tree&, icrs::Position&)> go = [&](const Tree& u, icrs::Position& at) {
        if (u.head == "…") return;
        out.insert(at);
        for (std::size_t i = 0; i < u.kids.size(); ++i) {
            at.push_back(u.head == "λ" ? 0 : static_cast<std::uint32_t>(i + 1));
            go(u.kids[i], at);
            at.pop_back();
        }
    };
    icrs::Position root;
    go(tree_of(t, depth), root);
    return out;
}

// ---------------------------------------------------------------------------
// First-order terms: Robinson unification and brute-force matching.

struct Fo {
    bool var = false;
    std::string name;
    std::vector<Fo> args;
    friend bool operator==(const Fo&, const Fo&) = default;
};

/// Converts a finite first-order (meta-)term; nullary meta-variables become
/// variables, prefixed to keep two rules apart.
inline Fo fo_of(const Term& t, const std::string& prefix = "") {
    if (t->kind == NodeKind::meta) return {true, prefix + t->name, {}};
    Fo out{false, t->name, {}};
    for (const auto& k : t->kids) out.args.push_back(fo_of(k, prefix));
    return out;
}

using Subst = std::map<std::string, Fo>;

inline Fo walk(const Fo& t, const Subst& s) {
    if (t.var) {
        auto it = s.find(t.name);
        return it == s.end() ? t : walk(it->second, s);
    }
    Fo out{false, t.name, {}};
    for (const auto& a : t.args) out.args.push_back(walk(a, s));
    return out;
}

inline bool occurs(const std::string& v, const Fo& t) {
    if (t.var) return t.name == v;
    return std::any_of(t.args.begin(), t.args.end(), [&](const Fo& a) { return occurs(v, a); });
}

inline bool unify(const Fo& a0, const Fo& b0, Subst& s) {
    Fo a = walk(a0, s), b = walk(b0, s);
    if (a.var && b.var && a.name == b.name) return true;
    if (a.var) {
        if (occurs(a.name, b)) return false;
        s[a.name] = b;
        return true;
    }
    if (b.var) return unify(b, a, s);
    if (a.name != b.name || a.args.size() != b.args.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!unify(a.args[i], b.args[i], s)) return false;
    return true;
}

/// Non-variable positions of a first-order term.
inline std::vector<icrs::Position> fo_positions(const Fo& t) {
    std::vector<icrs::Position> out;
    std::function<void(const Fo&, icrs::Position&)> go = [&](const Fo& u, icrs::Position& at) {
        if (u.var) return;
        out.push_back(at);
        for (std::size_t i = 0; i < u.args.size(); ++i) {
            at.push_back(static_cast<std::uint32_t>(i + 1));
            go(u.args[i], at);
            at.pop_back();
        }
    };
    icrs::Position root;
    go(t, root);
    return out;
}

inline const Fo& fo_at(const Fo& t, const icrs::Position& p) {
    const Fo* cur = &t;
    for (auto step : p) cur = &cur->args.at(step - 1);
    return *cur;
}

/// Critical-pair style overlap positions of rule 1 against rule 2.
inline std::vector<icrs::Position> fo_overlaps(const Term& l1, const Term& l2, bool same_rule) {
    Fo a = fo_of(l1, "1:"), b = fo_of(l2, "2:");
    std::vector<icrs::Position> out;
    for (const auto& p : fo_positions(a)) {
        if (same_rule && p.empty()) continue;
        Subst s;
        if (unify(fo_at(a, p), b, s)) out.push_back(p);
    }
    return out;
}

inline bool fo_match(const Fo& pat, const Fo& t, Subst& s) {
    if (pat.var) {
        auto [it, fresh] = s.emplace(pat.name, t);
        return fresh || it->second == t;
    }
    if (t.var || pat.name != t.name || pat.args.size() != t.args.size()) return false;
    for (std::size_t i = 0; i < pat.args.size(); ++i)
        if (!fo_match(pat.args[i], t.args[i], s)) return false;
    return true;
}

/// Every (position, rule) where a first-order rule matches a finite term.
inline std::vector<std::pair<icrs::Position, std::size_t>> fo_redexes(const Term& t, const icrs::RuleSystem& sys,
                                                                      std::size_t bound) {
    Fo term = fo_of(t);
    std::vector<std::pair<icrs::Position, std::size_t>> out;
    for (const auto& p : fo_positions(term)) {
        if (p.size() > bound) continue;
        for (std::size_t r = 0; r < sys.size(); ++r) {
            Subst s;
            if (fo_match(fo_of(sys.rule(r).lhs), fo_at(term, p), s)) out.push_back({p, r});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Complete developments by marking: each redex of U gets its root symbol
// renamed, and a copy of its rule rewrites only the marked symbol. Reducing
// with the marked rules alone, in every order, gives all developments.

inline Term rename_at(const Term& t, const icrs::Position& p, const std::string& name, std::size_t i = 0) {
    const Node& n = *t;
    if (i == p.size()) return std::make_shared<Node>(n.kind, n.index, name, n.kids);
    auto kids = n.kids;
    const std::size_t k = n.kind == NodeKind::abs ? 0 : p[i] - 1;
    kids[k] = rename_at(kids[k], p, name, i + 1);
    return std::make_shared<Node>(n.kind, n.index, n.name, std::move(kids));
}

inline Term unmark(const Term& t) {
    const Node& n = *t;
    std::vector<Term> kids;
    for (const auto& k : n.kids) kids.push_back(unmark(k));
    std::string name = n.name;
    if (n.kind == NodeKind::fun) name = name.substr(0, name.find('#'));
    return std::make_shared<Node>(n.kind, n.index, name, std::move(kids));
}

struct Marked {
    Term term;
    icrs::RuleSystem sys;
};

/// Only for finite terms whose redexes in U sit at pairwise different positions.
inline Marked mark(const Term& s, const icrs::RedexSet& us, const icrs::RuleSystem& sys) {
    Term t = s;
    icrs::Signature sig = sys.signature();
    std::vector<icrs::Rule> rules;
    std::size_t id = 0;
    for (const auto& u : us) {
        const icrs::Rule& r = sys.rule(u.rule);
        const std::string label = r.lhs->name + "#" + std::to_string(id++);
        sig.declare(label, r.lhs->kids.size());
        t = rename_at(t, u.position, label);
        rules.push_back({r.name + "#", rename_at(r.lhs, {}, label), r.rhs});
    }
    return {t, icrs::RuleSystem(sig, rules)};
}

/// Final terms of all maximal reductions with the marked rules (a set of
/// α-classes, represented by unfolding trees).
inline std::vector<Term> all_developments(const Marked& m, std::size_t limit = 2000) {
    std::vector<Term> finals;
    std::vector<Term> stack{m.term};
    std::size_t visited = 0;
    while (!stack.empty() && visited++ < limit) {
        Term t = stack.back();
        stack.pop_back();
        auto rs = icrs::find_redexes(t, m.sys, 64);
        if (rs.empty()) {
            finals.push_back(unmark(t));
            continue;
        }
        for (const auto& r : rs) stack.push_back(icrs::apply_step(t, m.sys, r).target);
    }
    return finals;
}

}  // namespace oracle
