#pragma once

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "syntax.hpp"
#include "valuation.hpp"

namespace icrs {

struct Rule {
    std::string name;
    MetaTerm lhs;
    MetaTerm rhs;
};

// ---------------------------------------------------------------------------
// Syntactic helpers on finite meta-terms

struct MetaOccurrence {
    std::string name;
    Position position;
    std::uint32_t abs_depth;     // abstractions above the occurrence
    std::vector<Term> args;
};

/// Meta-variable occurrences of a finite meta-term, in pre-order.
inline std::vector<MetaOccurrence> meta_occurrences(const MetaTerm& t) {
    std::vector<MetaOccurrence> out;
    std::function<void(const Term&, Position&, std::uint32_t)> go = [&](const Term& u, Position& at, std::uint32_t d) {
        const Node& n = *u;
        if (n.kind == NodeKind::rec) {
            go(n.body(), at, d);
            return;
        }
        if (n.kind == NodeKind::meta) out.push_back({n.name, at, d, n.kids});
        for (std::uint32_t i = 0; i < n.kids.size(); ++i) {
            at.push_back(n.kind == NodeKind::abs ? 0 : i + 1);
            go(n.kids[i], at, d + (n.kind == NodeKind::abs));
            at.pop_back();
        }
    };
    Position root;
    go(t, root, 0);
    return out;
}

/// Meta-variable names with their arities (syntax only, so cyclic terms are fine).
inline std::map<std::string, std::size_t> meta_variables(const MetaTerm& t) {
    std::map<std::string, std::size_t> out;
    std::function<void(const Term&)> go = [&](const Term& u) {
        if (u->kind == NodeKind::meta) out.emplace(u->name, u->kids.size());
        for (const auto& k : u->kids) go(k);
    };
    go(t);
    return out;
}

/// Positions of a finite pattern not at or below a meta-variable occurrence.
inline std::set<Position> pattern_positions(const MetaTerm& lhs) {
    std::set<Position> out;
    std::function<void(const Term&, Position&)> go = [&](const Term& u, Position& at) {
        if (u->kind == NodeKind::meta) return;
        out.insert(at);
        for (std::uint32_t i = 0; i < u->kids.size(); ++i) {
            at.push_back(u->kind == NodeKind::abs ? 0 : i + 1);
            go(u->kids[i], at);
            at.pop_back();
        }
    };
    Position root;
    go(lhs, root);
    return out;
}

inline bool is_pattern(const MetaTerm& l) {
    if (!is_finite(l)) return false;
    for (const auto& occ : meta_occurrences(l)) {
        std::set<std::uint32_t> seen;
        for (const auto& a : occ.args) {
            if (a->kind != NodeKind::bound || a->index >= occ.abs_depth) return false;
            if (!seen.insert(a->index).second) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Validation

struct ConditionResult {
    int condition;              // 1..4, 0 for auxiliary checks
    std::string description;
    bool passed = true;
    std::optional<Position> witness;
    std::string side;           // "lhs" or "rhs" when a witness is given
    std::string detail;
};

struct ValidationReport {
    std::string rule;
    std::vector<ConditionResult> conditions;
    bool valid() const {
        return std::all_of(conditions.begin(), conditions.end(), [](const ConditionResult& c) { return c.passed; });
    }
};

namespace detail {

inline std::optional<Position> first_open_position(const Term& t) {
    std::optional<Position> found;
    std::function<void(const Term&, Position&, std::uint32_t)> go = [&](const Term& u, Position& at, std::uint32_t d) {
        if (found) return;
        const Node& n = *u;
        if ((n.kind == NodeKind::bound && n.index >= d) || n.kind == NodeKind::free) {
            found = at;
            return;
        }
        if (n.kind == NodeKind::rec) {
            go(n.body(), at, d);
            return;
        }
        for (std::uint32_t i = 0; i < n.kids.size(); ++i) {
            at.push_back(n.kind == NodeKind::abs ? 0 : i + 1);
            go(n.kids[i], at, d + (n.kind == NodeKind::abs));
            at.pop_back();
        }
    };
    Position root;
    go(t, root, 0);
    return found;
}

inline std::optional<Position> first_symbol_position(const Term& t, const std::function<bool(const Node&)>& pred) {
    std::optional<Position> found;
    std::function<void(const Term&, Position&)> go = [&](const Term& u, Position& at) {
        if (found) return;
        if (pred(*u)) {
            found = at;
            return;
        }
        if (u->kind == NodeKind::rec) {
            go(u->body(), at);
            return;
        }
        for (std::uint32_t i = 0; i < u->kids.size(); ++i) {
            at.push_back(u->kind == NodeKind::abs ? 0 : i + 1);
            go(u->kids[i], at);
            at.pop_back();
        }
    };
    Position root;
    go(t, root);
    return found;
}

}  // namespace detail

inline ValidationReport validate_rule(const Rule& r) {
    ValidationReport rep{r.name, {}};

    ConditionResult c1{1, "left-hand side is a pattern with a function symbol at the root"};
    if (!is_finite(r.lhs)) {
        c1.passed = false;
        c1.side = "lhs";
        c1.witness = detail::first_symbol_position(r.lhs, [](const Node& n) { return n.kind == NodeKind::rec; });
        c1.detail = "left-hand side is not finite";
    } else if (r.lhs->kind != NodeKind::fun) {
        c1.passed = false;
        c1.side = "lhs";
        c1.witness = Position{};
        c1.detail = "root is not a function symbol";
    } else {
        for (const auto& occ : meta_occurrences(r.lhs)) {
            std::set<std::uint32_t> seen;
            for (const auto& a : occ.args) {
                if (a->kind != NodeKind::bound || a->index >= occ.abs_depth || !seen.insert(a->index).second) {
                    c1.passed = false;
                    c1.side = "lhs";
                    c1.witness = occ.position;
                    c1.detail = "arguments of " + occ.name + " are not distinct bound variables";
                    break;
                }
            }
            if (!c1.passed) break;
        }
    }
    rep.conditions.push_back(c1);

    ConditionResult c2{2, "meta-variables of the right-hand side occur in the left-hand side"};
    const auto lvars = meta_variables(r.lhs);
    auto missing = detail::first_symbol_position(
        r.rhs, [&](const Node& n) { return n.kind == NodeKind::meta && !lvars.count(n.name); });
    if (missing) {
        c2.passed = false;
        c2.side = "rhs";
        c2.witness = missing;
        c2.detail = "meta-variable " + navigate(r.rhs, *missing)->node->name + " does not occur on the left";
    } else {
        for (const auto& [name, arity] : meta_variables(r.rhs)) {
            if (lvars.at(name) != arity) {
                c2.passed = false;
                c2.side = "rhs";
                c2.witness = detail::first_symbol_position(
                    r.rhs, [&](const Node& n) { return n.kind == NodeKind::meta && n.name == name; });
                c2.detail = "meta-variable " + name + " used with a different arity";
                break;
            }
        }
    }
    rep.conditions.push_back(c2);

    ConditionResult c3{3, "both sides are closed"};
    if (auto p = detail::first_open_position(r.lhs)) {
        c3.passed = false;
        c3.side = "lhs";
        c3.witness = p;
    } else if (auto q = detail::first_open_position(r.rhs)) {
        c3.passed = false;
        c3.side = "rhs";
        c3.witness = q;
    }
    rep.conditions.push_back(c3);

    ConditionResult c4{4, "right-hand side satisfies the finite chains property"};
    bool chains_ok = true;
    try {
        chains_ok = satisfies_finite_chains(r.rhs);
    } catch (const IllFormedTerm& e) {
        chains_ok = false;
        c4.detail = e.what();
    }
    if (!chains_ok) {
        c4.passed = false;
        c4.side = "rhs";
        for (const auto& ch : find_meta_chains(r.rhs))
            if (ch.kind == ChainKind::cyclic_infinite) {
                c4.witness = ch.links.front().position;
                break;
            }
    }
    rep.conditions.push_back(c4);

    ConditionResult c0{0, "sides are well formed"};
    for (const auto* side : {&r.lhs, &r.rhs}) {
        try {
            check_well_formed(*side, {nullptr, true, true});
        } catch (const IllFormedTerm& e) {
            c0.passed = false;
            c0.side = side == &r.lhs ? "lhs" : "rhs";
            c0.detail = e.what();
            break;
        }
    }
    if (c0.passed) {
        for (const auto* side : {&r.lhs, &r.rhs}) {
            auto p = detail::first_symbol_position(
                *side, [](const Node& n) { return n.kind == NodeKind::fun && is_reserved_symbol(n.name); });
            if (p) {
                c0.passed = false;
                c0.side = side == &r.lhs ? "lhs" : "rhs";
                c0.witness = p;
                c0.detail = "reserved symbol in a rule";
                break;
            }
        }
    }
    if (!c0.passed) rep.conditions.push_back(c0);
    return rep;
}

/// A collapsing rule has a meta-variable as the root of its right-hand side.
inline bool is_collapsing(const Rule& r) { return cursor_of(r.rhs).node->kind == NodeKind::meta; }

// ---------------------------------------------------------------------------
// Higher-order pattern unification (closed patterns in nameless form)

namespace detail {

class PatternUnifier {
public:
    explicit PatternUnifier(std::string fresh_prefix = "H") : prefix_(std::move(fresh_prefix)) {}

    bool unify(const Term& a, const Term& b) {
        try {
            go(a, b);
            return true;
        } catch (const Clash&) {
            return false;
        }
    }

    /// Fully applies the current solution.
    Term resolve(const Term& t) const {
        const Node& n = *t;
        if (n.kind == NodeKind::meta) {
            std::vector<Term> args;
            for (const auto& k : n.kids) args.push_back(resolve(k));
            auto it = sol_.find(n.name);
            if (it == sol_.end()) return build::with_kids(n, std::move(args));
            return resolve(instantiate(it->second.body, args));
        }
        std::vector<Term> kids;
        for (const auto& k : n.kids) kids.push_back(resolve(k));
        return build::with_kids(n, std::move(kids));
    }

    /// Solution restricted to `names`, with substitutes fully resolved.
    Valuation solution(const std::map<std::string, std::size_t>& names) const {
        Valuation out;
        for (const auto& [name, arity] : names) {
            std::vector<Term> params;
            for (std::size_t j = 0; j < arity; ++j) params.push_back(build::bound(static_cast<std::uint32_t>(arity - 1 - j)));
            out[name] = Substitute{arity, resolve(build::meta(name, params))};
        }
        return out;
    }

private:
    struct Clash {};

    Term devar(Term t) const {
        while (t->kind == NodeKind::meta) {
            auto it = sol_.find(t->name);
            if (it == sol_.end()) break;
            t = instantiate(it->second.body, t->kids);
        }
        return t;
    }

    static std::vector<std::uint32_t> indices(const Node& meta) {
        std::vector<std::uint32_t> out;
        for (const auto& a : meta.kids) {
            if (a->kind != NodeKind::bound) throw Clash{};
            out.push_back(a->index);
        }
        return out;
    }

    std::string fresh() { return prefix_ + std::to_string(counter_++); }

    static Term param(std::size_t arity, std::size_t j) { return build::bound(static_cast<std::uint32_t>(arity - 1 - j)); }

    void go(const Term& a0, const Term& b0) {
        Term a = devar(a0), b = devar(b0);
        const bool fa = a->kind == NodeKind::meta, fb = b->kind == NodeKind::meta;
        if (fa && fb) {
            flex_flex(*a, *b);
        } else if (fa) {
            flex_rigid(*a, b);
        } else if (fb) {
            flex_rigid(*b, a);
        } else {
            if (!same_head(*a, *b)) throw Clash{};
            for (std::size_t i = 0; i < a->kids.size(); ++i) go(a->kids[i], b->kids[i]);
        }
    }

    void flex_flex(const Node& f, const Node& g) {
        const auto xs = indices(f), ys = indices(g);
        const std::size_t k = xs.size(), l = ys.size();
        if (f.name == g.name) {
            std::vector<Term> keep;
            for (std::size_t i = 0; i < k; ++i)
                if (xs[i] == ys[i]) keep.push_back(param(k, i));
            if (keep.size() == k) return;
            sol_[f.name] = Substitute{k, build::meta(fresh(), keep)};
            return;
        }
        std::vector<Term> fargs, gargs;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < l; ++j)
                if (xs[i] == ys[j]) {
                    fargs.push_back(param(k, i));
                    gargs.push_back(param(l, j));
                }
        const std::string h = fresh();
        sol_[f.name] = Substitute{k, build::meta(h, fargs)};
        sol_[g.name] = Substitute{l, build::meta(h, gargs)};
    }

    bool occurs(const std::string& name, const Term& t) const {
        if (t->kind == NodeKind::meta && t->name == name) return true;
        return std::any_of(t->kids.begin(), t->kids.end(), [&](const Term& k) { return occurs(name, k); });
    }

    // Removes arguments of nested meta-variables that refer outside the allowed set.
    void prune(const Term& t, const std::set<std::uint32_t>& allowed, std::uint32_t depth) {
        const Node& n = *t;
        if (n.kind == NodeKind::bound) {
            if (n.index >= depth && !allowed.count(n.index - depth)) throw Clash{};
            return;
        }
        if (n.kind == NodeKind::meta) {
            const auto xs = indices(n);
            std::vector<Term> keep;
            for (std::size_t i = 0; i < xs.size(); ++i)
                if (xs[i] < depth || allowed.count(xs[i] - depth)) keep.push_back(param(xs.size(), i));
            if (keep.size() != xs.size()) sol_[n.name] = Substitute{xs.size(), build::meta(fresh(), keep)};
            return;
        }
        for (const auto& k : n.kids) prune(k, allowed, depth + (n.kind == NodeKind::abs));
    }

    void flex_rigid(const Node& f, const Term& t0) {
        const auto xs = indices(f);
        Term t = resolve(t0);
        if (occurs(f.name, t)) throw Clash{};
        prune(t, std::set<std::uint32_t>(xs.begin(), xs.end()), 0);
        t = resolve(t);
        const std::uint32_t k = static_cast<std::uint32_t>(xs.size());
        Term body = map_bound(t, [&](std::uint32_t rel, std::uint32_t depth, std::uint32_t) -> Term {
            for (std::uint32_t j = 0; j < k; ++j)
                if (xs[j] == rel) return build::bound(k - 1 - j + depth);
            throw Clash{};
        });
        sol_[f.name] = Substitute{k, body};
    }

    std::map<std::string, Substitute> sol_;
    std::string prefix_;
    std::size_t counter_ = 0;
};

inline Term rename_metas(const Term& t, const std::string& prefix) {
    const Node& n = *t;
    std::vector<Term> kids;
    for (const auto& k : n.kids) kids.push_back(rename_metas(k, prefix));
    if (n.kind == NodeKind::meta) return build::meta(prefix + n.name, std::move(kids));
    return build::with_kids(n, std::move(kids));
}

/// Adds the `extra` outermost binders as trailing arguments of every meta-variable.
inline Term raise_metas(const Term& t, std::uint32_t extra, std::uint32_t depth = 0) {
    const Node& n = *t;
    std::vector<Term> kids;
    for (const auto& k : n.kids) kids.push_back(raise_metas(k, extra, depth + (n.kind == NodeKind::abs)));
    if (n.kind == NodeKind::meta && extra > 0) {
        for (std::uint32_t i = 0; i < extra; ++i) kids.push_back(build::bound(depth + extra - 1 - i));
        return build::meta(n.name, std::move(kids));
    }
    return build::with_kids(n, std::move(kids));
}

}  // namespace detail

struct Overlap {
    Position position;       // in the left-hand side of the first rule
    Valuation unifier;       // over meta-variables prefixed "1:" and "2:"
};

/// Most general unifier of two closed patterns (meta-variables assumed disjoint).
inline std::optional<Valuation> unify_patterns(const MetaTerm& a, const MetaTerm& b) {
    detail::PatternUnifier u;
    if (!u.unify(a, b)) return std::nullopt;
    auto names = meta_variables(a);
    for (const auto& kv : meta_variables(b)) names.insert(kv);
    return u.solution(names);
}

/// Overlap of r2's left-hand side into r1's at a function-symbol position.
/// With `same_rule`, the root position is skipped.
inline std::optional<Overlap> find_overlap(const Rule& r1, const Rule& r2, bool same_rule = false) {
    const Term l1 = detail::rename_metas(r1.lhs, "1:");
    const Term l2 = detail::rename_metas(r2.lhs, "2:");
    for (const Position& p : pattern_positions(l1)) {
        if (same_rule && p.empty()) continue;
        auto c = navigate(l1, p);
        if (c->node->kind != NodeKind::fun) continue;
        const auto binders = static_cast<std::uint32_t>(binders_above(l1, p).size());
        // Both sides under the binders crossed on the way to p.
        Term left = materialize(*c);
        Term right = detail::raise_metas(l2, binders);
        for (std::uint32_t i = 0; i < binders; ++i) {
            left = build::abs(left);
            right = build::abs(right);
        }
        detail::PatternUnifier u;
        if (!u.unify(left, right)) continue;
        auto names = meta_variables(l1);
        for (const auto& kv : meta_variables(right)) names.insert(kv);
        return Overlap{p, u.solution(names)};
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Systems

struct LinearityWitness {
    std::size_t rule;
    std::string metavar;
    std::vector<Position> positions;
};

struct ExtensionWitness {
    std::size_t rule;
    std::string metavar;
    Position position;
    std::uint32_t missing_binder;  // de Bruijn index (at the occurrence) of the omitted variable
};

struct OverlapWitness {
    std::size_t rule1, rule2;
    Overlap overlap;
};

struct SystemAnalysis {
    bool valid = true;
    bool left_linear = true;
    bool fully_extended = true;
    bool orthogonal = true;
    bool almost_non_collapsing = true;
    std::vector<std::size_t> collapsing_rules;
    std::vector<ValidationReport> reports;
    std::vector<LinearityWitness> nonlinear;
    std::vector<ExtensionWitness> not_extended;
    std::vector<OverlapWitness> overlaps;
};

inline std::vector<LinearityWitness> left_linearity_witnesses(const std::vector<Rule>& rules) {
    std::vector<LinearityWitness> out;
    for (std::size_t i = 0; i < rules.size(); ++i) {
        std::map<std::string, std::vector<Position>> seen;
        for (const auto& occ : meta_occurrences(rules[i].lhs)) seen[occ.name].push_back(occ.position);
        for (auto& [name, ps] : seen)
            if (ps.size() > 1) out.push_back({i, name, ps});
    }
    return out;
}

inline std::vector<ExtensionWitness> full_extension_witnesses(const std::vector<Rule>& rules) {
    std::vector<ExtensionWitness> out;
    for (std::size_t i = 0; i < rules.size(); ++i) {
        for (const auto& occ : meta_occurrences(rules[i].lhs)) {
            std::set<std::uint32_t> args;
            for (const auto& a : occ.args)
                if (a->kind == NodeKind::bound) args.insert(a->index);
            for (std::uint32_t x = 0; x < occ.abs_depth; ++x)
                if (!args.count(x)) {
                    out.push_back({i, occ.name, occ.position, x});
                    break;
                }
        }
    }
    return out;
}

inline bool is_fully_extended(const MetaTerm& pattern) { return full_extension_witnesses({Rule{"", pattern, pattern}}).empty(); }

inline bool is_almost_non_collapsing(const std::vector<Rule>& rules) {
    std::vector<const Rule*> collapsing;
    for (const auto& r : rules)
        if (is_collapsing(r)) collapsing.push_back(&r);
    if (collapsing.empty()) return true;
    if (collapsing.size() > 1) return false;
    const Rule& r = *collapsing.front();
    const auto root = cursor_of(r.rhs).node->name;
    const auto vars = meta_variables(r.lhs);
    return vars.size() == 1 && vars.begin()->first == root;
}

class RuleSystem {
public:
    RuleSystem() = default;
    RuleSystem(Signature sig, std::vector<Rule> rules) : sig_(std::move(sig)), rules_(std::move(rules)) { analyse(); }

    const Signature& signature() const { return sig_; }
    const std::vector<Rule>& rules() const { return rules_; }
    const Rule& rule(std::size_t i) const { return rules_.at(i); }
    std::size_t size() const { return rules_.size(); }
    const SystemAnalysis& analysis() const { return analysis_; }
    bool is_collapsing(std::size_t i) const { return collapsing_flags_.at(i); }
    const std::set<Position>& footprint(std::size_t i) const { return footprints_.at(i); }

    std::optional<std::size_t> find(const std::string& name) const {
        for (std::size_t i = 0; i < rules_.size(); ++i)
            if (rules_[i].name == name) return i;
        return std::nullopt;
    }

private:
    void analyse() {
        auto& a = analysis_;
        for (const auto& r : rules_) {
            a.reports.push_back(validate_rule(r));
            a.valid = a.valid && a.reports.back().valid();
            collapsing_flags_.push_back(icrs::is_collapsing(r));
            footprints_.push_back(pattern_positions(r.lhs));
        }
        for (std::size_t i = 0; i < rules_.size(); ++i)
            if (collapsing_flags_[i]) a.collapsing_rules.push_back(i);
        a.nonlinear = left_linearity_witnesses(rules_);
        a.left_linear = a.nonlinear.empty();
        a.not_extended = full_extension_witnesses(rules_);
        a.fully_extended = a.not_extended.empty();
        for (std::size_t i = 0; i < rules_.size(); ++i)
            for (std::size_t j = 0; j < rules_.size(); ++j) {
                if (!a.reports[i].valid() || !a.reports[j].valid()) continue;
                if (auto o = find_overlap(rules_[i], rules_[j], i == j)) a.overlaps.push_back({i, j, std::move(*o)});
            }
        a.orthogonal = a.left_linear && a.overlaps.empty();
        a.almost_non_collapsing = icrs::is_almost_non_collapsing(rules_);
    }

    Signature sig_;
    std::vector<Rule> rules_;
    SystemAnalysis analysis_;
    std::vector<bool> collapsing_flags_;
    std::vector<std::set<Position>> footprints_;
};

// ---------------------------------------------------------------------------
// Rule files:
//   sig f/2 g/1 a/0        (optional; without it symbols are inferred)
//   name: LHS -> RHS

namespace detail {

inline std::string strip_comment(const std::string& line) {
    auto hash = line.find('#');
    return hash == std::string::npos ? line : line.substr(0, hash);
}

inline bool blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace detail

inline RuleSystem parse_rule_system(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    Signature sig;
    bool have_sig = false, seen_rule = false;
    std::vector<Rule> rules;

    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = detail::strip_comment(raw);
        if (detail::blank(line)) continue;
        detail::Lexer lex(line, lineno);
        const auto first = lex.peek();
        if (first.kind == detail::Lexer::Kind::ident && first.text == "sig") {
            if (seen_rule) throw ParseError("signature must precede the rules", lineno, first.column);
            lex.next();
            have_sig = true;
            // entries look like name/arity; '/' is not a token, so split by hand
            std::istringstream entries(line.substr(line.find("sig") + 3));
            std::string entry;
            while (entries >> entry) {
                auto slash = entry.find('/');
                if (slash == std::string::npos || slash == 0)
                    throw ParseError("signature entries have the form name/arity", lineno, 1);
                const std::string name = entry.substr(0, slash);
                std::size_t arity = 0;
                try {
                    std::size_t used = 0;
                    arity = std::stoul(entry.substr(slash + 1), &used);
                    if (used != entry.size() - slash - 1) throw std::invalid_argument(entry);
                } catch (const std::logic_error&) {
                    throw ParseError("bad arity in '" + entry + "'", lineno, 1);
                }
                if (std::isupper(static_cast<unsigned char>(name[0])))
                    throw ParseError("function symbols must start in lower case", lineno, 1);
                try {
                    sig.declare(name, arity);
                } catch (const Error& e) {
                    throw ParseError(e.what(), lineno, 1);
                }
            }
            continue;
        }
        seen_rule = true;
        std::string name = "r" + std::to_string(rules.size() + 1);
        // optional "name:" prefix
        auto colon = line.find(':');
        std::string body = line;
        if (colon != std::string::npos) {
            std::string head = line.substr(0, colon);
            head.erase(0, head.find_first_not_of(" \t"));
            head.erase(head.find_last_not_of(" \t") + 1);
            if (!head.empty() && std::all_of(head.begin(), head.end(), detail::Lexer::ident_char)) {
                name = head;
                body = std::string(colon + 1, ' ') + line.substr(colon + 1);
            }
        }
        auto arrow = body.find("->");
        if (arrow == std::string::npos) throw ParseError("expected 'LHS -> RHS'", lineno, 1);
        const ParseOptions opts{!have_sig, true};
        auto parse_side = [&](const std::string& src, std::size_t offset) {
            detail::Lexer side(std::string_view(src), lineno);
            detail::TermParser p(side, sig, opts);
            Term t = p.parse();
            if (!side.at_end()) detail::TermParser::fail("trailing input", side.peek());
            (void)offset;
            return t;
        };
        std::string lhs_src = body.substr(0, arrow);
        std::string rhs_src = std::string(arrow + 2, ' ') + body.substr(arrow + 2);
        Term lhs, rhs;
        try {
            lhs = parse_side(lhs_src, 0);
            rhs = parse_side(rhs_src, arrow + 2);
        } catch (const Error& e) {
            if (dynamic_cast<const ParseError*>(&e)) throw;
            throw ParseError(e.what(), lineno, 1);
        }
        for (const auto& existing : rules)
            if (existing.name == name) throw ParseError("duplicate rule name '" + name + "'", lineno, 1);
        rules.push_back({name, lhs, rhs});
        try {
            check_well_formed(lhs, {&sig, true, true});
            check_well_formed(rhs, {&sig, true, true});
        } catch (const IllFormedTerm& e) {
            throw ParseError("rule " + name + ": " + e.what(), lineno, 1);
        }
    }
    return RuleSystem(std::move(sig), std::move(rules));
}

/// Convenience for tests and examples: rules given as "name: l -> r" strings.
inline RuleSystem make_system(std::initializer_list<std::string> lines) {
    std::string text;
    for (const auto& l : lines) text += l + "\n";
    return parse_rule_system(text);
}

}  // namespace icrs
