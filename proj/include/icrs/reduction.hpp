#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "matching.hpp"

namespace icrs {

class StaleRedex : public Error {
public:
    using Error::Error;
};

struct Step {
    Term source;
    Term target;
    Redex redex;
    bool collapsing = false;
    bool root_collapsing = false;
    std::optional<bool> out_step;
};

struct Reduction {
    Term source;
    std::vector<Step> steps;

    const Term& target() const { return steps.empty() ? source : steps.back().target; }
    std::size_t size() const { return steps.size(); }
    std::vector<std::size_t> depth_profile() const {
        std::vector<std::size_t> out;
        for (const auto& st : steps) out.push_back(st.redex.depth());
        return out;
    }
    void append(Step st) { steps.push_back(std::move(st)); }
    void append(const Reduction& r) {
        for (const auto& st : r.steps) steps.push_back(st);
    }
};

/// Contracts `r` in `s`. Free variables of the contractum that are bound in
/// the context stay bound: the contractum is inserted without renaming.
inline Step apply_step(const Term& s, const RuleSystem& sys, const Redex& r) {
    if (r.rule >= sys.size()) throw StaleRedex("redex refers to an unknown rule");
    auto c = navigate(s, r.position);
    if (!c) throw InvalidPosition("position " + to_string(r.position) + " is not a position of the term");
    const Rule& rule = sys.rule(r.rule);
    auto v = match_cursor(rule, *c);
    if (!v) throw StaleRedex("rule " + rule.name + " does not match at " + to_string(r.position));
    if (!r.valuation.empty() && !alpha_eq(*v, r.valuation))
        throw StaleRedex("redex valuation no longer matches at " + to_string(r.position));
    Term contractum = apply_valuation(*v, rule.rhs);
    Step st;
    st.source = s;
    st.target = replace_at(s, r.position, contractum);
    st.redex = Redex{r.position, r.rule, std::move(*v)};
    st.collapsing = sys.is_collapsing(r.rule);
    st.root_collapsing = st.collapsing && r.position.empty();
    return st;
}

inline Step apply_step(const Term& s, const RuleSystem& sys, const Position& p, std::size_t rule) {
    return apply_step(s, sys, Redex{p, rule, {}});
}

// ---------------------------------------------------------------------------
// Descendants

/// Instance positions deeper than this (relative to the redex) are not
/// enumerated; a result that needed them is flagged as truncated.
inline constexpr std::size_t kDescendantDepth = 64;
inline constexpr std::size_t kDescendantCount = 4096;

struct DescendantSet {
    std::set<Position> positions;
    bool truncated = false;
};

namespace detail {

/// Where the substitute of each meta-variable lands in the contractum.
class InstanceMap {
public:
    InstanceMap(const Rule& rule, const Valuation& v, std::size_t limit) : v_(v), limit_(limit) {
        Position at;
        walk_rhs(cursor_of(rule.rhs), at);
    }

    std::map<std::string, std::vector<Position>> positions;
    bool truncated = false;

private:
    std::size_t count_ = 0;

    bool rhs_has_meta(const Cursor& c) {
        auto it = rhs_meta_.find(c);
        if (it != rhs_meta_.end()) return it->second;
        return rhs_meta_.emplace(c, has_meta(materialize(c))).first->second;
    }

    // dangling indices of the body subterm under `c`, relative to that node
    const std::set<std::uint32_t>& dangling(const Cursor& c) {
        auto it = dangling_.find(c);
        if (it != dangling_.end()) return it->second;
        std::set<std::uint32_t> out;
        map_bound(materialize(c), [&](std::uint32_t rel, std::uint32_t, std::uint32_t) -> Term {
            out.insert(rel);
            return nullptr;
        });
        return dangling_.emplace(c, std::move(out)).first->second;
    }

    bool reaches_param(const Cursor& c, std::uint32_t inner, std::uint32_t k) {
        const auto& d = dangling(c);
        auto it = d.lower_bound(inner);
        return it != d.end() && *it < inner + k;
    }

    void walk_rhs(const Cursor& c, Position& at) {
        if (truncated) return;
        if (!rhs_has_meta(c)) return;
        if (at.size() > limit_) {
            truncated = true;
            return;
        }
        const Node& n = *c.node;
        if (n.kind == NodeKind::meta) {
            if (++count_ > kDescendantCount) {
                truncated = true;
                return;
            }
            positions[n.name].push_back(at);
            const Substitute& sub = v_.at(n.name);
            std::vector<Cursor> args;
            for (std::uint32_t i = 1; i <= n.kids.size(); ++i) args.push_back(*child(c, i));
            walk_body(cursor_of(sub.body), at, 0, args);
            return;
        }
        for (std::uint32_t step : child_steps(c)) {
            at.push_back(step);
            walk_rhs(*child(c, step), at);
            at.pop_back();
            if (truncated) return;
        }
    }

    void walk_body(const Cursor& c, Position& at, std::uint32_t inner, const std::vector<Cursor>& args) {
        if (truncated) return;
        const auto k = static_cast<std::uint32_t>(args.size());
        const Node& n = *c.node;
        if (n.kind == NodeKind::bound) {
            if (n.index >= inner && n.index < inner + k) walk_rhs(args[k - 1 - (n.index - inner)], at);
            return;
        }
        if (!reaches_param(c, inner, k)) return;
        if (at.size() > limit_) {
            truncated = true;
            return;
        }
        for (std::uint32_t step : child_steps(c)) {
            at.push_back(step);
            walk_body(*child(c, step), at, inner + (n.kind == NodeKind::abs), args);
            at.pop_back();
            if (truncated) return;
        }
    }

    const Valuation& v_;
    std::size_t limit_;
    std::unordered_map<Cursor, bool, CursorHash> rhs_meta_;
    std::unordered_map<Cursor, std::set<std::uint32_t>, CursorHash> dangling_;
};

}  // namespace detail

/// Maps positions of a step's source to their descendants in its target.
class DescendantMap {
public:
    DescendantMap(const Step& st, const RuleSystem& sys)
        : st_(st), rule_(sys.rule(st.redex.rule)), footprint_(sys.footprint(st.redex.rule)),
          occurrences_(meta_occurrences(rule_.lhs)), instances_(rule_, st.redex.valuation, kDescendantDepth) {}

    DescendantSet of(const Position& q) const {
        DescendantSet out;
        const Position& p = st_.redex.position;
        if (!is_prefix(p, q)) {
            out.positions.insert(q);
            return out;
        }
        const Position u = suffix_after(q, p.size());
        if (footprint_.count(u)) return out;
        const MetaOccurrence* occ = nullptr;
        for (const auto& o : occurrences_)
            if (is_prefix(o.position, u)) occ = &o;
        if (!occ) throw InvalidPosition("position " + to_string(q) + " is not a position of the step's source");
        const Position v = suffix_after(u, occ->position.size());
        const Substitute& sub = st_.redex.valuation.at(occ->name);
        auto bc = navigate(sub.body, v);
        if (!bc) throw InvalidPosition("position " + to_string(q) + " is not a position of the step's source");
        std::uint32_t inner = 0;
        {
            Cursor c = cursor_of(sub.body);
            for (std::uint32_t step : v) {
                if (c.node->kind == NodeKind::abs) ++inner;
                c = *child(c, step);
            }
        }
        if (bc->node->kind == NodeKind::bound && bc->node->index >= inner && bc->node->index < inner + sub.arity)
            return out;  // a bound variable of the redex pattern
        out.truncated = instances_.truncated;
        auto it = instances_.positions.find(occ->name);
        if (it == instances_.positions.end()) return out;
        for (const auto& r : it->second) out.positions.insert(concat(concat(p, r), v));
        return out;
    }

    DescendantSet of(const std::set<Position>& ps) const {
        DescendantSet out;
        for (const auto& q : ps) {
            auto d = of(q);
            out.truncated = out.truncated || d.truncated;
            out.positions.insert(d.positions.begin(), d.positions.end());
        }
        return out;
    }

private:
    const Step& st_;
    const Rule& rule_;
    const std::set<Position>& footprint_;
    std::vector<MetaOccurrence> occurrences_;
    detail::InstanceMap instances_;
};

inline DescendantSet descendants(const std::set<Position>& ps, const Step& st, const RuleSystem& sys) {
    for (const auto& q : ps)
        if (!is_valid_position(st.source, q))
            throw InvalidPosition("position " + to_string(q) + " is not a position of the step's source");
    return DescendantMap(st, sys).of(ps);
}

struct ResidualSet {
    RedexSet redexes;
    bool truncated = false;  // the set may be infinite; only a prefix was computed
};

inline ResidualSet residuals(const RedexSet& us, const Step& st, const RuleSystem& sys) {
    ResidualSet out;
    if (us.empty()) return out;
    DescendantMap dm(st, sys);
    RedexScanner scan(sys, st.target);
    for (const auto& u : us) {
        if (same_redex(u, st.redex)) continue;
        auto d = dm.of(u.position);
        out.truncated = out.truncated || d.truncated;
        for (const auto& q : d.positions) {
            auto c = navigate(st.target, q);
            if (!c) continue;
            if (auto v = match_cursor(sys.rule(u.rule), *c)) out.redexes.insert(Redex{q, u.rule, std::move(*v)});
        }
    }
    return out;
}

inline ResidualSet residuals(const RedexSet& us, const Reduction& d, const RuleSystem& sys) {
    ResidualSet cur{us, false};
    for (const auto& st : d.steps) {
        auto next = residuals(cur.redexes, st, sys);
        next.truncated = next.truncated || cur.truncated;
        cur = std::move(next);
    }
    return cur;
}

// ---------------------------------------------------------------------------
// Developments

struct Development {
    Reduction reduction;
    bool complete = false;   // no residuals left
    bool diverged = false;   // residual set infinite or budget exceeded
};

/// Complete development, contracting a residual with no other residual
/// below it first (the lexicographically greatest). Such a step never copies
/// other residuals, so a finite set takes exactly as many steps as it has
/// members.
inline Development develop(const Term& s, const RedexSet& us, const RuleSystem& sys, std::size_t max_steps = 10000,
                           bool truncated = false) {
    Development out;
    out.reduction.source = s;
    if (truncated) {
        out.diverged = true;
        return out;
    }
    RedexSet pending = us;
    Term cur = s;
    while (!pending.empty()) {
        if (out.reduction.size() >= max_steps) {
            out.diverged = true;
            return out;
        }
        const Redex next = *pending.rbegin();
        Step st = apply_step(cur, sys, next);
        pending.erase(std::prev(pending.end()));
        auto rest = residuals(pending, st, sys);
        if (rest.truncated) {
            out.reduction.append(std::move(st));
            out.diverged = true;
            return out;
        }
        pending = std::move(rest.redexes);
        cur = st.target;
        out.reduction.append(std::move(st));
    }
    out.complete = true;
    return out;
}

inline RedexSet to_set(const std::vector<Redex>& rs) { return RedexSet(rs.begin(), rs.end()); }

struct Projection {
    Development development;      // s ⇒U t
    Step v_step;                  // s → s'
    Development projected;        // s' ⇒U/v t'
    Development closing;          // t ⇒v/U t''
    bool diverged = false;
    bool corners_equal = false;
};

/// Projects the development of U over the single step v and closes the square.
inline Projection project_over_step(const Term& s, const RedexSet& us, const Redex& v, const RuleSystem& sys,
                                    std::size_t max_steps = 10000) {
    Projection out;
    out.development = develop(s, us, sys, max_steps);
    out.v_step = apply_step(s, sys, v);
    auto u_over_v = residuals(us, out.v_step, sys);
    out.projected = develop(out.v_step.target, u_over_v.redexes, sys, max_steps, u_over_v.truncated);
    if (out.development.diverged) {
        out.diverged = true;
        return out;
    }
    auto v_over_u = residuals(RedexSet{out.v_step.redex}, out.development.reduction, sys);
    out.closing = develop(out.development.reduction.target(), v_over_u.redexes, sys, max_steps, v_over_u.truncated);
    out.diverged = out.projected.diverged || out.closing.diverged;
    if (!out.diverged)
        out.corners_equal = alpha_eq(out.projected.reduction.target(), out.closing.reduction.target());
    return out;
}

// ---------------------------------------------------------------------------
// Tiling diagrams

struct TilingDiagram {
    enum class Status { completed, diverged };
    Status status = Status::completed;
    std::optional<std::pair<std::size_t, std::size_t>> diverged_cell;
    // terms[i][j]: after i steps of S and j steps of T
    std::vector<std::vector<Term>> terms;
    // developments along the edges: right[i][j] leaves terms[i][j] towards
    // terms[i][j+1], down[i][j] towards terms[i+1][j]
    std::vector<std::vector<Development>> right, down;
    bool corners_agree = true;

    /// T/S: the bottom row.
    Reduction bottom() const {
        Reduction r;
        r.source = terms.back().front();
        for (const auto& d : right.back()) r.append(d.reduction);
        return r;
    }
    /// S/T: the rightmost column.
    Reduction right_column() const {
        Reduction r;
        r.source = terms.front().back();
        for (const auto& row : down) r.append(row.back().reduction);
        return r;
    }
    const Term& corner() const { return terms.back().back(); }
};

inline TilingDiagram tile(const Reduction& s, const Reduction& t, const RuleSystem& sys, std::size_t step_budget = 1000) {
    const std::size_t m = s.size(), n = t.size();
    TilingDiagram g;
    g.terms.assign(m + 1, std::vector<Term>(n + 1));
    g.right.assign(m + 1, std::vector<Development>(n));
    g.down.assign(m, std::vector<Development>(n + 1));
    // residual sets driving the edges
    std::vector<std::vector<ResidualSet>> hset(m + 1, std::vector<ResidualSet>(n));
    std::vector<std::vector<ResidualSet>> vset(m, std::vector<ResidualSet>(n + 1));

    g.terms[0][0] = s.source;
    for (std::size_t j = 0; j < n; ++j) {
        Development d;
        d.reduction.source = t.steps[j].source;
        d.reduction.append(t.steps[j]);
        d.complete = true;
        g.right[0][j] = d;
        hset[0][j].redexes = RedexSet{t.steps[j].redex};
        g.terms[0][j + 1] = t.steps[j].target;
    }
    for (std::size_t i = 0; i < m; ++i) {
        Development d;
        d.reduction.source = s.steps[i].source;
        d.reduction.append(s.steps[i]);
        d.complete = true;
        g.down[i][0] = d;
        vset[i][0].redexes = RedexSet{s.steps[i].redex};
        g.terms[i + 1][0] = s.steps[i].target;
    }

    std::size_t spent = 0;
    auto fail = [&](std::size_t i, std::size_t j) {
        g.status = TilingDiagram::Status::diverged;
        g.diverged_cell = {i, j};
        return g;
    };
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            // the right edge of the cell: project the vertical set over the top edge
            auto v_next = residuals(vset[i][j].redexes, g.right[i][j].reduction, sys);
            auto h_next = residuals(hset[i][j].redexes, g.down[i][j].reduction, sys);
            vset[i][j + 1] = v_next;
            hset[i + 1][j] = h_next;
            const std::size_t left = spent >= step_budget ? 0 : step_budget - spent;
            g.down[i][j + 1] = develop(g.terms[i][j + 1], v_next.redexes, sys, left, v_next.truncated);
            spent += g.down[i][j + 1].reduction.size();
            if (g.down[i][j + 1].diverged) return fail(i, j);
            const std::size_t left2 = spent >= step_budget ? 0 : step_budget - spent;
            g.right[i + 1][j] = develop(g.terms[i + 1][j], h_next.redexes, sys, left2, h_next.truncated);
            spent += g.right[i + 1][j].reduction.size();
            if (g.right[i + 1][j].diverged) return fail(i, j);
            const Term& a = g.down[i][j + 1].reduction.target();
            const Term& b = g.right[i + 1][j].reduction.target();
            if (!alpha_eq(a, b)) g.corners_agree = false;
            g.terms[i + 1][j + 1] = a;
        }
    return g;
}

// ---------------------------------------------------------------------------
// Reduction strategies and stable prefixes

enum class Strategy { leftmost_outermost, fair };

struct ReduceResult {
    Reduction reduction;
    std::size_t stable_depth = 0;
    Term stable_prefix;
    bool normal_form = false;     // target has no redex at any depth
    bool fuel_exhausted = false;
};

/// Picks the next redex for a strategy. `fair` sweeps redexes level by level
/// (depth, then left to right) from just after the previously contracted one,
/// wrapping around to the shallowest.
inline std::optional<Redex> choose_redex(const Term& s, const RuleSystem& sys, Strategy strategy,
                                         const std::optional<Position>& previous, std::size_t search_depth) {
    RedexScanner scan(sys, s);
    std::optional<std::vector<Redex>> found;
    if (strategy == Strategy::leftmost_outermost) {
        found = scan.next(std::nullopt, search_depth);
    } else {
        const std::size_t from = previous ? previous->size() : 0;
        for (std::size_t d = from; !found && d <= search_depth; ++d)
            found = scan.first_at_depth(d, d == from ? previous : std::nullopt);
        for (std::size_t d = 0; !found && d <= std::min(from, search_depth); ++d) found = scan.first_at_depth(d, std::nullopt);
    }
    if (!found) return std::nullopt;
    return found->front();
}

/// Runs up to `fuel` steps. Unless a normal form was reached, the stable depth
/// is the least of `depth`, the depth of the last step and the depth of the
/// step the strategy would take next; the stable prefix is the target
/// truncated there.
inline ReduceResult reduce(const Term& s, const RuleSystem& sys, Strategy strategy, std::size_t fuel, std::size_t depth,
                           std::size_t search_depth = 64) {
    ReduceResult out;
    out.reduction.source = s;
    std::optional<Position> previous;
    std::optional<Redex> next = choose_redex(s, sys, strategy, previous, search_depth);
    while (next && out.reduction.size() < fuel) {
        Step st = apply_step(out.reduction.target(), sys, *next);
        previous = st.redex.position;
        out.reduction.append(std::move(st));
        next = choose_redex(out.reduction.target(), sys, strategy, previous, search_depth);
    }
    std::size_t stable = depth;
    if (next) {
        out.fuel_exhausted = true;
        stable = std::min(stable, next->depth());
    } else {
        out.normal_form = is_normal_form(out.reduction.target(), sys);
        if (!out.normal_form) stable = std::min(stable, search_depth + 1);
    }
    if (!out.normal_form && !out.reduction.steps.empty())
        stable = std::min(stable, out.reduction.steps.back().redex.depth());
    out.stable_depth = stable;
    out.stable_prefix = truncate(out.reduction.target(), stable);
    return out;
}

// ---------------------------------------------------------------------------
// Prefix sets

class PrefixSet {
public:
    PrefixSet() { positions_.insert(Position{}); }
    PrefixSet(std::initializer_list<Position> ps) : PrefixSet() {
        for (const auto& p : ps) insert(p);
    }
    explicit PrefixSet(const std::set<Position>& ps) : PrefixSet() {
        for (const auto& p : ps) insert(p);
    }
    void insert(const Position& p) {
        for (std::size_t n = 0; n <= p.size(); ++n) positions_.insert(Position(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(n)));
    }
    bool contains(const Position& p) const { return positions_.count(p) > 0; }
    const std::set<Position>& positions() const { return positions_; }

private:
    std::set<Position> positions_;
};

/// Every position of P exists in t and carries the same root symbol as in s.
inline bool mirrors(const Term& t, const Term& s, const PrefixSet& prefix) {
    for (const auto& p : prefix.positions()) {
        auto a = navigate(t, p);
        auto b = navigate(s, p);
        if (!a || !b) return false;
        if (!same_head(*a->node, *b->node)) return false;
    }
    return true;
}

}  // namespace icrs
