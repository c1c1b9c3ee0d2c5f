#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "term.hpp"

namespace icrs {

class UnsupportedTerm : public Error {
public:
    using Error::Error;
};

/// An n-ary substitute. In `body` the dangling indices 0..arity-1 are the
/// parameters (index arity-1-j is parameter j) and higher dangling indices
/// refer to binders of the context the substitute is used in, lowered by arity.
struct Substitute {
    std::size_t arity = 0;
    Term body;

    /// Builds a substitute from a term over named free parameters.
    static Substitute lambda(const std::vector<std::string>& params, const Term& body) {
        std::set<std::string> seen(params.begin(), params.end());
        if (seen.size() != params.size()) throw Error("substitute parameters must be distinct");
        const auto n = static_cast<std::uint32_t>(params.size());
        // Make room for the parameters, then bind the named variables.
        Term shifted = shift(body, n);
        std::function<Term(const Term&, std::uint32_t)> go = [&](const Term& t, std::uint32_t depth) -> Term {
            const Node& node = *t;
            if (node.kind == NodeKind::free) {
                for (std::uint32_t j = 0; j < n; ++j)
                    if (params[j] == node.name) return build::bound(n - 1 - j + depth);
                return t;
            }
            std::vector<Term> kids;
            for (const auto& k : node.kids) kids.push_back(go(k, depth + (node.kind == NodeKind::abs ? 1 : 0)));
            return build::with_kids(node, std::move(kids));
        };
        return {params.size(), go(shifted, 0)};
    }
};

using Valuation = std::map<std::string, Substitute>;

inline bool alpha_eq(const Substitute& a, const Substitute& b) { return a.arity == b.arity && alpha_eq(a.body, b.body); }

inline bool alpha_eq(const Valuation& a, const Valuation& b) {
    if (a.size() != b.size()) return false;
    for (const auto& [name, sub] : a) {
        auto it = b.find(name);
        if (it == b.end() || !alpha_eq(sub, it->second)) return false;
    }
    return true;
}

/// Simultaneous substitution for free variables (capture is impossible in
/// nameless form; the replacements are shifted under binders).
inline Term substitute(const Term& s, const std::vector<std::string>& vars, const std::vector<Term>& ts) {
    if (vars.size() != ts.size()) throw Error("substitution: variable and term counts differ");
    std::set<std::string> seen(vars.begin(), vars.end());
    if (seen.size() != vars.size()) throw Error("substitution: duplicate variables");
    std::function<Term(const Term&, std::uint32_t, std::uint32_t)> go = [&](const Term& t, std::uint32_t depth,
                                                                          std::uint32_t rdepth) -> Term {
        const Node& n = *t;
        if (n.kind == NodeKind::free) {
            for (std::size_t i = 0; i < vars.size(); ++i)
                if (vars[i] == n.name) return shift_recs(shift(ts[i], depth), rdepth);
            return t;
        }
        std::vector<Term> kids;
        for (const auto& k : n.kids)
            kids.push_back(go(k, depth + (n.kind == NodeKind::abs), rdepth + (n.kind == NodeKind::rec)));
        return build::with_kids(n, std::move(kids));
    };
    return go(s, 0, 0);
}

/// The parallel β-rule: body[params := args].
inline Term apply_substitute(const Substitute& sub, const std::vector<Term>& args) {
    if (args.size() != sub.arity)
        throw Error("substitute of arity " + std::to_string(sub.arity) + " applied to " + std::to_string(args.size()) +
                    " arguments");
    return instantiate(sub.body, args);
}

namespace detail {

/// Places a substitute body at abstraction depth `depth` of the host: context
/// variables are raised by `depth`, parameters become the given arguments.
inline Term place_substitute(const Substitute& sub, const std::vector<Term>& args, std::uint32_t depth) {
    const auto k = static_cast<std::uint32_t>(sub.arity);
    return map_bound(sub.body, [&](std::uint32_t rel, std::uint32_t inner, std::uint32_t rinner) -> Term {
        if (rel < k) return shift_recs(shift(args[k - 1 - rel], inner), rinner);
        return build::bound(rel - k + depth + inner);
    });
}

}  // namespace detail

/// Applies a valuation to a (possibly cyclic) meta-term. Context variables of
/// the substitutes refer to binders above the root of `s`.
inline Term apply_valuation(const Valuation& v, const MetaTerm& s) {
    if (!satisfies_finite_chains(s)) throw Error("meta-term violates the finite chains property");
    std::function<Term(const Term&, std::uint32_t)> go = [&](const Term& t, std::uint32_t depth) -> Term {
        const Node& n = *t;
        switch (n.kind) {
        case NodeKind::bound:
        case NodeKind::free:
        case NodeKind::rec_ref: return t;
        case NodeKind::abs: return build::with_kids(n, {go(n.body(), depth + 1)});
        case NodeKind::rec: return build::with_kids(n, {go(n.body(), depth)});
        case NodeKind::fun: {
            std::vector<Term> kids;
            for (const auto& k : n.kids) kids.push_back(go(k, depth));
            return build::with_kids(n, std::move(kids));
        }
        case NodeKind::meta: {
            auto it = v.find(n.name);
            if (it == v.end()) throw Error("meta-variable '" + n.name + "' is not assigned");
            if (it->second.arity != n.kids.size())
                throw Error("meta-variable '" + n.name + "' has arity " + std::to_string(n.kids.size()) +
                            " but its substitute has arity " + std::to_string(it->second.arity));
            std::vector<Term> args;
            for (const auto& k : n.kids) args.push_back(go(k, depth));
            return detail::place_substitute(it->second, args, depth);
        }
        }
        return t;
    };
    Term out = go(s, 0);
    try {
        check_well_formed(out);
    } catch (const IllFormedTerm& e) {
        throw UnsupportedTerm(std::string("valuation result is not representable: ") + e.what());
    }
    return out;
}

}  // namespace icrs
