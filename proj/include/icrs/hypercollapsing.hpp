#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "reduction.hpp"

namespace icrs {

enum class Tri { yes, no, unknown };

inline const char* to_string(Tri t) {
    switch (t) {
    case Tri::yes: return "yes";
    case Tri::no: return "no";
    default: return "unknown";
    }
}

struct SearchBudget {
    std::size_t max_steps = 64;   // length of explored reductions
    std::size_t max_depth = 8;    // depth of contracted redexes
    std::size_t max_states = 500;
};

// ---------------------------------------------------------------------------
// Reduction graphs modulo α-equivalence

struct GraphEdge {
    std::size_t from, to;
    Step step;
};

class ReductionGraph {
public:
    ReductionGraph(const RuleSystem& sys, SearchBudget budget) : sys_(sys), budget_(budget) {}

    std::size_t add_seed(const Term& t) {
        auto [id, fresh] = index_.intern(t);
        if (fresh) add_state(id, 0, std::nullopt);
        if (std::find(seeds_.begin(), seeds_.end(), id) == seeds_.end()) seeds_.push_back(id);
        return id;
    }

    /// Expands the next breadth-first layer. Returns false when nothing is left
    /// to expand (either done or out of budget).
    bool expand_layer() {
        std::vector<std::size_t> layer;
        std::swap(layer, frontier_);
        if (layer.empty()) return false;
        for (std::size_t id : layer) {
            if (dist_[id] >= budget_.max_steps) {
                if (has_redex(id)) incomplete_ = true;
                continue;
            }
            expand(id);
            if (index_.size() > budget_.max_states) {
                incomplete_ = true;
                frontier_.clear();
                return false;
            }
        }
        return !frontier_.empty();
    }

    void explore() {
        while (expand_layer()) {
        }
    }

    bool complete() const { return !incomplete_ && frontier_.empty(); }
    std::size_t size() const { return index_.size(); }
    const Term& term(std::size_t id) const { return index_[id]; }
    std::optional<std::size_t> find(const Term& t) const { return index_.find(t); }
    const std::vector<GraphEdge>& edges() const { return edges_; }
    const std::vector<std::size_t>& out(std::size_t id) const { return out_[id]; }
    bool expanded(std::size_t id) const { return expanded_[id]; }
    std::size_t distance(std::size_t id) const { return dist_[id]; }
    const std::vector<std::size_t>& seeds() const { return seeds_; }
    const RuleSystem& system() const { return sys_; }

    /// Steps from a seed to `id` along the breadth-first tree.
    std::vector<Step> path_to(std::size_t id) const {
        std::vector<Step> out;
        while (parent_[id]) {
            const GraphEdge& e = edges_[*parent_[id]];
            out.push_back(e.step);
            id = e.from;
        }
        std::reverse(out.begin(), out.end());
        return out;
    }

    /// Shortest path of edges from `a` to `b`, if any.
    std::optional<std::vector<std::size_t>> shortest_path(std::size_t a, std::size_t b) const {
        std::vector<std::optional<std::size_t>> via(size());
        std::vector<bool> seen(size(), false);
        std::deque<std::size_t> q{a};
        seen[a] = true;
        while (!q.empty()) {
            std::size_t x = q.front();
            q.pop_front();
            if (x == b) break;
            for (std::size_t e : out_[x]) {
                std::size_t y = edges_[e].to;
                if (seen[y]) continue;
                seen[y] = true;
                via[y] = e;
                q.push_back(y);
            }
        }
        if (!seen[b]) return std::nullopt;
        std::vector<std::size_t> path;
        for (std::size_t x = b; x != a;) {
            path.push_back(*via[x]);
            x = edges_[*via[x]].from;
        }
        std::reverse(path.begin(), path.end());
        return path;
    }

private:
    void add_state(std::size_t id, std::size_t dist, std::optional<std::size_t> parent) {
        dist_.push_back(dist);
        parent_.push_back(parent);
        out_.emplace_back();
        expanded_.push_back(false);
        frontier_.push_back(id);
        (void)id;
    }

    bool has_redex(std::size_t id) const { return !is_normal_form(index_[id], sys_); }

    void expand(std::size_t id) {
        expanded_[id] = true;
        const Term source = index_[id];
        RedexScanner scan(sys_, source);
        auto redexes = scan.all(budget_.max_depth);
        if (scan.has_redex_below(budget_.max_depth)) incomplete_ = true;
        std::stable_sort(redexes.begin(), redexes.end(),
                         [](const Redex& a, const Redex& b) { return a.depth() < b.depth(); });
        for (const auto& r : redexes) {
            Step st;
            try {
                st = apply_step(source, sys_, r);
            } catch (const UnsupportedTerm&) {
                incomplete_ = true;
                continue;
            }
            auto [to, fresh] = index_.intern(st.target);
            edges_.push_back({id, to, std::move(st)});
            out_[id].push_back(edges_.size() - 1);
            if (fresh) add_state(to, dist_[id] + 1, edges_.size() - 1);
        }
    }

    const RuleSystem& sys_;
    SearchBudget budget_;
    TermIndex index_;
    std::vector<GraphEdge> edges_;
    std::vector<std::vector<std::size_t>> out_;
    std::vector<std::size_t> dist_;
    std::vector<std::optional<std::size_t>> parent_;
    std::vector<bool> expanded_;
    std::vector<std::size_t> frontier_;
    std::vector<std::size_t> seeds_;
    bool incomplete_ = false;
};

/// Strongly connected component ids (Tarjan, iterative).
inline std::vector<std::size_t> strongly_connected(const ReductionGraph& g) {
    const std::size_t n = g.size();
    std::vector<std::size_t> index(n, SIZE_MAX), low(n, 0), comp(n, SIZE_MAX);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::size_t counter = 0, comps = 0;
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != SIZE_MAX) continue;
        std::vector<std::pair<std::size_t, std::size_t>> work{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!work.empty()) {
            auto& [v, next] = work.back();
            const auto& outs = g.out(v);
            if (next < outs.size()) {
                const std::size_t w = g.edges()[outs[next++]].to;
                if (index[w] == SIZE_MAX) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    work.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                for (;;) {
                    std::size_t w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = comps;
                    if (w == v) break;
                }
                ++comps;
            }
            const std::size_t done = v;
            work.pop_back();
            if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[done]);
        }
    }
    return comp;
}

// ---------------------------------------------------------------------------
// Hypercollapsing detection

struct Lasso {
    std::vector<Step> stem;
    std::vector<Step> cycle;   // contains a root-collapsing step; ends where it starts
};

struct HcVerdict {
    enum class Status { hypercollapsing, not_within_bounds, unknown };
    Status status = Status::unknown;
    std::optional<Lasso> witness;
    std::size_t states = 0;
};

inline const char* to_string(HcVerdict::Status s) {
    switch (s) {
    case HcVerdict::Status::hypercollapsing: return "hypercollapsing";
    case HcVerdict::Status::not_within_bounds: return "not_within_bounds";
    default: return "unknown";
    }
}

/// A reachable cycle through a root-collapsing step, shortest cycle first.
inline std::optional<Lasso> find_lasso(const ReductionGraph& g) {
    const auto comp = strongly_connected(g);
    std::optional<Lasso> best;
    std::size_t best_cycle = SIZE_MAX, best_stem = SIZE_MAX;
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        const GraphEdge& edge = g.edges()[e];
        if (!edge.step.root_collapsing || comp[edge.from] != comp[edge.to]) continue;
        auto back = g.shortest_path(edge.to, edge.from);
        if (!back) continue;
        const std::size_t cycle_len = back->size() + 1;
        const std::size_t stem_len = g.distance(edge.from);
        if (std::tie(cycle_len, stem_len) >= std::tie(best_cycle, best_stem)) continue;
        Lasso l;
        l.stem = g.path_to(edge.from);
        l.cycle.push_back(edge.step);
        for (std::size_t b : *back) l.cycle.push_back(g.edges()[b].step);
        best = std::move(l);
        best_cycle = cycle_len;
        best_stem = stem_len;
    }
    return best;
}

inline HcVerdict detect_hypercollapsing(const Term& s, const RuleSystem& sys, const SearchBudget& budget = {}) {
    HcVerdict out;
    if (sys.analysis().collapsing_rules.empty()) {
        // no step is ever root-collapsing
        out.status = HcVerdict::Status::not_within_bounds;
        return out;
    }
    // steps below the root never change its symbol, so a root no left-hand
    // side starts with is never contracted
    const Node& root = *cursor_of(s).node;
    if (std::none_of(sys.rules().begin(), sys.rules().end(), [&](const Rule& r) {
            return root.kind == NodeKind::fun && r.lhs->name == root.name && r.lhs->kids.size() == root.kids.size();
        })) {
        out.status = HcVerdict::Status::not_within_bounds;
        out.states = 1;
        return out;
    }
    ReductionGraph g(sys, budget);
    g.add_seed(s);
    bool more = true;
    while (more) {
        more = g.expand_layer();
        if (auto l = find_lasso(g)) {
            out.status = HcVerdict::Status::hypercollapsing;
            out.witness = std::move(l);
            out.states = g.size();
            return out;
        }
    }
    out.states = g.size();
    out.status = g.complete() ? HcVerdict::Status::not_within_bounds : HcVerdict::Status::unknown;
    return out;
}

/// Replays a lasso, unrolling the cycle `times` times; returns the number of
/// root-collapsing steps, or nullopt if some step does not reproduce.
inline std::optional<std::size_t> replay_lasso(const Term& s, const Lasso& l, const RuleSystem& sys, std::size_t times) {
    Term cur = s;
    std::size_t root_collapses = 0;
    auto run = [&](const Step& st) {
        Step again = apply_step(cur, sys, Redex{st.redex.position, st.redex.rule, {}});
        if (!alpha_eq(again.target, st.target)) return false;
        root_collapses += again.root_collapsing;
        cur = again.target;
        return true;
    };
    try {
        for (const auto& st : l.stem)
            if (!run(st)) return std::nullopt;
        if (l.cycle.empty() || !alpha_eq(cur, l.cycle.front().source)) return std::nullopt;
        for (std::size_t k = 0; k < times; ++k)
            for (const auto& st : l.cycle)
                if (!run(st)) return std::nullopt;
    } catch (const Error&) {
        return std::nullopt;
    }
    return root_collapses;
}

/// Memoises detection verdicts on (open) terms modulo α.
class HcOracle {
public:
    HcOracle(const RuleSystem& sys, SearchBudget budget) : sys_(sys), budget_(budget) {}

    const HcVerdict& verdict(const Term& t) {
        auto [id, fresh] = index_.intern(t);
        if (fresh) verdicts_.push_back(detect_hypercollapsing(t, sys_, budget_));
        return verdicts_[id];
    }
    const RuleSystem& system() const { return sys_; }
    const SearchBudget& budget() const { return budget_; }

private:
    const RuleSystem& sys_;
    SearchBudget budget_;
    TermIndex index_;
    std::vector<HcVerdict> verdicts_;
};

// ---------------------------------------------------------------------------
// ~hc

struct HcNormalForm {
    Term term;
    std::set<Position> substituted_positions;
    std::set<Position> unknown_positions;
};

/// Replaces maximal hypercollapsing subterms at depth ≤ depth by ⊥, scanning
/// outermost first.
inline HcNormalForm hc_normalize(const Term& s, HcOracle& oracle, std::size_t depth) {
    HcNormalForm out;
    std::function<void(const Cursor&, Position&)> go = [&](const Cursor& c, Position& at) {
        const auto& v = oracle.verdict(materialize(c));
        if (v.status == HcVerdict::Status::hypercollapsing) {
            out.substituted_positions.insert(at);
            return;
        }
        if (v.status == HcVerdict::Status::unknown) out.unknown_positions.insert(at);
        if (at.size() == depth) return;
        for (std::uint32_t step : child_steps(c)) {
            at.push_back(step);
            go(*child(c, step), at);
            at.pop_back();
        }
    };
    Position root;
    go(cursor_of(s), root);
    Term t = s;
    for (const auto& p : out.substituted_positions) t = replace_at(t, p, build::bottom());
    out.term = t;
    return out;
}

inline HcNormalForm hc_normalize(const Term& s, const RuleSystem& sys, const SearchBudget& budget, std::size_t depth) {
    HcOracle oracle(sys, budget);
    return hc_normalize(s, oracle, depth);
}

struct HcEquivResult {
    Tri verdict = Tri::unknown;
    HcNormalForm left, right;
    std::optional<Position> difference;
};

inline HcEquivResult hc_equiv(const Term& a, const Term& b, HcOracle& oracle, std::size_t depth) {
    HcEquivResult out;
    out.left = hc_normalize(a, oracle, depth);
    out.right = hc_normalize(b, oracle, depth);
    out.difference = first_difference(truncate(out.left.term, depth), truncate(out.right.term, depth));
    if (!out.difference) {
        out.verdict = Tri::yes;
        return out;
    }
    auto material = [&](const std::set<Position>& unknown) {
        return std::any_of(unknown.begin(), unknown.end(), [&](const Position& u) { return is_prefix(u, *out.difference); });
    };
    out.verdict = material(out.left.unknown_positions) || material(out.right.unknown_positions) ? Tri::unknown : Tri::no;
    return out;
}

inline HcEquivResult hc_equiv(const Term& a, const Term& b, const RuleSystem& sys, const SearchBudget& budget,
                              std::size_t depth) {
    HcOracle oracle(sys, budget);
    return hc_equiv(a, b, oracle, depth);
}

// ---------------------------------------------------------------------------
// Out-steps

enum class OutStepReading {
    proper_subterms,   // only subterms strictly below the root are considered
    include_root       // the whole term counts as a subterm too
};

/// yes iff the contracted redex does not lie inside a hypercollapsing subterm.
inline Tri classify_out_step(const Step& st, HcOracle& oracle,
                             OutStepReading reading = OutStepReading::proper_subterms) {
    const Position& p = st.redex.position;
    bool unknown = false;
    Cursor c = cursor_of(st.source);
    for (std::size_t n = 0; n <= p.size(); ++n) {
        if (n > 0 || reading == OutStepReading::include_root) {
            const auto& v = oracle.verdict(materialize(c));
            if (v.status == HcVerdict::Status::hypercollapsing) return Tri::no;
            if (v.status == HcVerdict::Status::unknown) unknown = true;
        }
        if (n < p.size()) c = *child(c, p[n]);
    }
    return unknown ? Tri::unknown : Tri::yes;
}

inline Tri classify_out_step(const Step& st, const RuleSystem& sys, const SearchBudget& budget,
                             OutStepReading reading = OutStepReading::proper_subterms) {
    HcOracle oracle(sys, budget);
    return classify_out_step(st, oracle, reading);
}

// ---------------------------------------------------------------------------
// Strip diagrams for out-steps

struct StripResult {
    bool joined = false;
    bool diverged = false;
    Term term;                    // common reduct when joined
    bool hypothesis_holds = false;  // all steps of S and the step u classified out
    TilingDiagram diagram;
};

inline StripResult strip_restricted(const Reduction& s, const Redex& u, HcOracle& oracle,
                                    std::size_t step_budget = 1000) {
    const RuleSystem& sys = oracle.system();
    StripResult out;
    Reduction single;
    single.source = s.source;
    single.append(apply_step(s.source, sys, u));
    out.hypothesis_holds = classify_out_step(single.steps.front(), oracle) == Tri::yes;
    for (const auto& st : s.steps)
        out.hypothesis_holds = out.hypothesis_holds && classify_out_step(st, oracle) == Tri::yes;
    out.diagram = tile(s, single, sys, step_budget);
    if (out.diagram.status == TilingDiagram::Status::diverged) {
        out.diverged = true;
        return out;
    }
    // u/S ends in the bottom-right corner; so does S/u
    out.joined = out.diagram.corners_agree;
    out.term = out.diagram.corner();
    return out;
}

inline StripResult strip_restricted(const Reduction& s, const Redex& u, const RuleSystem& sys,
                                    const SearchBudget& budget, std::size_t step_budget = 1000) {
    HcOracle oracle(sys, budget);
    return strip_restricted(s, u, oracle, step_budget);
}

// ---------------------------------------------------------------------------
// Confluence modulo ~hc: bounded join search

struct JoinResult {
    Reduction left, right;     // extensions of S and T
    HcEquivResult evidence;
};

namespace detail {

struct Reach {
    std::vector<Term> terms;
    std::vector<std::vector<Step>> paths;
};

/// Breadth-first reducts of `t`, out-steps explored before other steps.
inline Reach reachable(const Term& t, HcOracle& oracle) {
    const RuleSystem& sys = oracle.system();
    const SearchBudget& b = oracle.budget();
    Reach out;
    TermIndex index;
    index.intern(t);
    out.terms.push_back(t);
    out.paths.emplace_back();
    std::deque<std::size_t> queue{0};
    while (!queue.empty() && out.terms.size() < b.max_states) {
        const std::size_t id = queue.front();
        queue.pop_front();
        if (out.paths[id].size() >= b.max_steps) continue;
        const Term cur = out.terms[id];
        auto redexes = find_redexes(cur, sys, b.max_depth);
        std::vector<std::pair<int, Step>> steps;
        for (const auto& r : redexes) {
            try {
                Step st = apply_step(cur, sys, r);
                const Tri out_step = classify_out_step(st, oracle);
                st.out_step = out_step == Tri::unknown ? std::nullopt : std::optional<bool>(out_step == Tri::yes);
                steps.emplace_back(out_step == Tri::yes ? 0 : 1, std::move(st));
            } catch (const UnsupportedTerm&) {
            }
        }
        std::stable_sort(steps.begin(), steps.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& [rank, st] : steps) {
            (void)rank;
            auto [nid, fresh] = index.intern(st.target);
            if (!fresh) continue;
            out.terms.push_back(st.target);
            auto path = out.paths[id];
            path.push_back(std::move(st));
            out.paths.push_back(std::move(path));
            queue.push_back(nid);
            if (out.terms.size() >= b.max_states) break;
        }
    }
    return out;
}

}  // namespace detail

/// Searches reducts of the targets of S and T for a pair related by ~hc at
/// `depth`, minimising the total number of extra steps.
inline std::optional<JoinResult> join_modulo(const Reduction& s, const Reduction& t, HcOracle& oracle, std::size_t depth) {
    auto left = detail::reachable(s.target(), oracle);
    auto right = detail::reachable(t.target(), oracle);
    // bucket the right side by its normalised truncation
    TermIndex keys;
    std::map<std::size_t, std::size_t> best_right;  // key id -> state
    std::vector<std::optional<std::size_t>> left_key(left.terms.size());
    for (std::size_t i = 0; i < right.terms.size(); ++i) {
        auto nf = hc_normalize(right.terms[i], oracle, depth);
        auto [k, fresh] = keys.intern(truncate(nf.term, depth));
        (void)fresh;
        auto it = best_right.find(k);
        if (it == best_right.end() || right.paths[i].size() < right.paths[it->second].size()) best_right[k] = i;
    }
    std::optional<std::pair<std::size_t, std::size_t>> best;
    for (std::size_t i = 0; i < left.terms.size(); ++i) {
        auto nf = hc_normalize(left.terms[i], oracle, depth);
        auto k = keys.find(truncate(nf.term, depth));
        if (!k) continue;
        auto it = best_right.find(*k);
        if (it == best_right.end()) continue;
        const std::size_t cost = left.paths[i].size() + right.paths[it->second].size();
        if (!best || cost < left.paths[best->first].size() + right.paths[best->second].size()) best = {{i, it->second}};
    }
    if (!best) return std::nullopt;
    JoinResult out;
    out.left.source = s.target();
    out.left.steps = left.paths[best->first];
    out.right.source = t.target();
    out.right.steps = right.paths[best->second];
    out.evidence = hc_equiv(out.left.target(), out.right.target(), oracle, depth);
    return out;
}

inline std::optional<JoinResult> join_modulo(const Reduction& s, const Reduction& t, const RuleSystem& sys,
                                             const SearchBudget& budget, std::size_t depth) {
    HcOracle oracle(sys, budget);
    return join_modulo(s, t, oracle, depth);
}

// ---------------------------------------------------------------------------
// Normal form properties

enum class PropertyVerdict { holds, fails, unknown };

inline const char* to_string(PropertyVerdict v) {
    switch (v) {
    case PropertyVerdict::holds: return "holds";
    case PropertyVerdict::fails: return "fails";
    default: return "unknown";
    }
}

struct PropertyResult {
    PropertyVerdict verdict = PropertyVerdict::holds;
    std::vector<Term> witness;   // NF: (s, n) with s convertible to n but not reducing to it
                                 // UN: (n1, n2) distinct convertible normal forms
                                 // UN→: (s, n1, n2) with s reducing to both
};

struct NfReport {
    PropertyResult nf, un, un_arrow;
    bool complete = false;           // the whole reachable graph was explored
    std::size_t states = 0;
    std::vector<Term> normal_forms;
};

inline NfReport check_nf_properties(const RuleSystem& sys, const std::vector<Term>& seeds, const SearchBudget& budget = {}) {
    NfReport rep;
    ReductionGraph g(sys, budget);
    for (const auto& s : seeds) g.add_seed(s);
    g.explore();
    rep.complete = g.complete();
    rep.states = g.size();
    const std::size_t n = g.size();

    std::vector<bool> is_nf(n);
    for (std::size_t i = 0; i < n; ++i) {
        is_nf[i] = is_normal_form(g.term(i), sys);
        if (is_nf[i]) rep.normal_forms.push_back(g.term(i));
    }
    // forward reachability (reflexive)
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        std::deque<std::size_t> q{i};
        reach[i][i] = true;
        while (!q.empty()) {
            std::size_t x = q.front();
            q.pop_front();
            for (std::size_t e : g.out(x)) {
                std::size_t y = g.edges()[e].to;
                if (!reach[i][y]) {
                    reach[i][y] = true;
                    q.push_back(y);
                }
            }
        }
    }
    // convertibility classes
    std::vector<std::size_t> comp(n);
    std::iota(comp.begin(), comp.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) { return comp[x] == x ? x : comp[x] = find(comp[x]); };
    for (const auto& e : g.edges()) comp[find(e.from)] = find(e.to);

    const PropertyVerdict bounded_fail = rep.complete ? PropertyVerdict::fails : PropertyVerdict::unknown;
    // NF: convertible to a normal form implies reduces to it
    for (std::size_t s = 0; s < n && rep.nf.verdict == PropertyVerdict::holds; ++s)
        for (std::size_t m = 0; m < n; ++m)
            if (is_nf[m] && find(s) == find(m) && !reach[s][m]) {
                rep.nf.verdict = bounded_fail;
                rep.nf.witness = {g.term(s), g.term(m)};
                break;
            }
    // UN: convertible normal forms are equal
    for (std::size_t a = 0; a < n && rep.un.verdict == PropertyVerdict::holds; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            if (is_nf[a] && is_nf[b] && find(a) == find(b)) {
                rep.un.verdict = PropertyVerdict::fails;
                rep.un.witness = {g.term(a), g.term(b)};
                break;
            }
    // UN→: normal forms of a common reduct source are equal
    for (std::size_t s = 0; s < n && rep.un_arrow.verdict == PropertyVerdict::holds; ++s) {
        std::optional<std::size_t> first;
        for (std::size_t m = 0; m < n; ++m) {
            if (!is_nf[m] || !reach[s][m]) continue;
            if (!first) {
                first = m;
            } else {
                rep.un_arrow.verdict = PropertyVerdict::fails;
                rep.un_arrow.witness = {g.term(s), g.term(*first), g.term(m)};
                break;
            }
        }
    }
    return rep;
}

/// Default seeds: the constants of the signature and the closed left-hand sides.
inline std::vector<Term> default_seeds(const RuleSystem& sys) {
    std::vector<Term> out;
    for (const auto& c : sys.signature().constants()) out.push_back(build::fun(c));
    for (const auto& r : sys.rules())
        if (meta_variables(r.lhs).empty() && !r.lhs->kids.empty()) out.push_back(r.lhs);
    return out;
}

}  // namespace icrs
