// icrs: command-line front end for the rewriting engine.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <icrs/icrs.hpp>
#include <icrs/io.hpp>

namespace {

using namespace icrs;

struct InputError : Error {
    using Error::Error;
};

struct Config {
    std::string rules_path;
    std::vector<std::string> terms;
    std::vector<std::string> scripts;
    std::size_t fuel = 16;
    std::size_t depth = 8;
    std::size_t max_states = 500;
    std::size_t max_steps = 64;
    std::size_t max_depth = 8;
    std::string strategy = "lo";
    std::string format = "text";
    std::uint64_t seed = 1;
    bool include_root = false;
};

SearchBudget budget_of(const Config& c) { return {c.max_steps, c.max_depth, c.max_states}; }

Strategy strategy_of(const std::string& s) {
    if (s == "lo") return Strategy::leftmost_outermost;
    if (s == "fair") return Strategy::fair;
    throw InputError("unknown strategy '" + s + "' (expected lo or fair)");
}

Term read_term(const std::string& src, const RuleSystem& sys) {
    Signature sig = sys.signature();
    try {
        return parse_term(src, sig, {true, false});
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw InputError(e.what());
    }
}

RuleSystem load(const Config& c) {
    try {
        return load_rule_system(c.rules_path);
    } catch (const ParseError& e) {
        throw InputError(c.rules_path + ":" + e.what());
    } catch (const Error& e) {
        throw InputError(e.what());
    }
}

std::string show(const Position& p) { return to_string(p); }

Position parse_position(const std::string& s) {
    Position p;
    if (s.empty() || s == "ε" || s == "e") return p;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto dot = s.find('.', start);
        std::string part = s.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        try {
            std::size_t used = 0;
            unsigned long v = std::stoul(part, &used);
            if (used != part.size()) throw std::invalid_argument(part);
            p.push_back(static_cast<std::uint32_t>(v));
        } catch (const std::logic_error&) {
            throw InputError("bad position '" + s + "'");
        }
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    return p;
}

/// `RULE@POS;RULE@POS...` or `lo:N` / `fair:N`.
Reduction run_script(const std::string& script, const Term& s, const RuleSystem& sys, std::size_t search_depth) {
    auto colon = script.find(':');
    if (colon != std::string::npos && script.find('@') == std::string::npos) {
        const Strategy st = strategy_of(script.substr(0, colon));
        std::size_t n = 0;
        try {
            n = std::stoul(script.substr(colon + 1));
        } catch (const std::logic_error&) {
            throw InputError("bad step count in script '" + script + "'");
        }
        return reduce(s, sys, st, n, 0, search_depth).reduction;
    }
    Reduction r;
    r.source = s;
    std::size_t start = 0;
    while (start < script.size()) {
        auto semi = script.find(';', start);
        std::string item = script.substr(start, semi == std::string::npos ? std::string::npos : semi - start);
        start = semi == std::string::npos ? script.size() : semi + 1;
        if (item.empty()) continue;
        auto at = item.find('@');
        if (at == std::string::npos) throw InputError("script steps have the form RULE@POSITION");
        auto rule = sys.find(item.substr(0, at));
        if (!rule) throw InputError("unknown rule '" + item.substr(0, at) + "'");
        const Position p = parse_position(item.substr(at + 1));
        try {
            r.append(apply_step(r.target(), sys, Redex{p, *rule, {}}));
        } catch (const StaleRedex& e) {
            throw InputError(std::string("script step '") + item + "': " + e.what());
        } catch (const InvalidPosition& e) {
            throw InputError(std::string("script step '") + item + "': " + e.what());
        }
    }
    return r;
}

void print_trace(std::ostream& os, const std::vector<Step>& steps, const RuleSystem& sys, const std::string& indent = "") {
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const Step& st = steps[i];
        os << indent << i + 1 << ". " << sys.rule(st.redex.rule).name << " @ " << show(st.redex.position);
        if (st.root_collapsing) os << " [root-collapsing]";
        else if (st.collapsing) os << " [collapsing]";
        if (st.out_step) os << (*st.out_step ? " [out]" : " [in]");
        os << "  =>  " << to_string(st.target) << "\n";
    }
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

int cmd_check(const Config& c) {
    const RuleSystem sys = load(c);
    const auto& a = sys.analysis();
    if (c.format == "json") {
        json out;
        json rules = json::array();
        for (std::size_t i = 0; i < sys.size(); ++i) {
            const auto& rep = a.reports[i];
            json failures = json::array();
            for (const auto& cond : rep.conditions)
                if (!cond.passed)
                    failures.push_back({{"condition", cond.condition},
                                        {"description", cond.description},
                                        {"side", cond.side},
                                        {"position", cond.witness ? position_json(*cond.witness) : json(nullptr)},
                                        {"detail", cond.detail}});
            rules.push_back({{"name", sys.rule(i).name},
                             {"lhs", to_string(sys.rule(i).lhs)},
                             {"rhs", to_string(sys.rule(i).rhs)},
                             {"valid", rep.valid()},
                             {"collapsing", sys.is_collapsing(i)},
                             {"failures", failures}});
        }
        out["rules"] = rules;
        out["valid"] = a.valid;
        out["left_linear"] = a.left_linear;
        out["fully_extended"] = a.fully_extended;
        out["orthogonal"] = a.orthogonal;
        out["almost_non_collapsing"] = a.almost_non_collapsing;
        json coll = json::array();
        for (auto i : a.collapsing_rules) coll.push_back(sys.rule(i).name);
        out["collapsing_rules"] = coll;
        json nl = json::array();
        for (const auto& w : a.nonlinear)
            nl.push_back({{"rule", sys.rule(w.rule).name}, {"metavar", w.metavar}, {"positions", w.positions}});
        out["nonlinear"] = nl;
        json ne = json::array();
        for (const auto& w : a.not_extended)
            ne.push_back({{"rule", sys.rule(w.rule).name}, {"metavar", w.metavar}, {"position", w.position}});
        out["not_fully_extended"] = ne;
        json ov = json::array();
        for (const auto& w : a.overlaps)
            ov.push_back({{"rule1", sys.rule(w.rule1).name}, {"rule2", sys.rule(w.rule2).name}, {"position", w.overlap.position}});
        out["overlaps"] = ov;
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    std::cout << "rules: " << sys.size() << "\n";
    for (std::size_t i = 0; i < sys.size(); ++i) {
        const auto& rep = a.reports[i];
        std::cout << "  " << sys.rule(i).name << ": " << to_string(sys.rule(i).lhs) << " -> " << to_string(sys.rule(i).rhs)
                  << (rep.valid() ? "" : "  [invalid]") << "\n";
        for (const auto& cond : rep.conditions)
            if (!cond.passed) {
                std::cout << "    fails (" << cond.condition << ") " << cond.description;
                if (cond.witness) std::cout << " at " << cond.side << " " << show(*cond.witness);
                if (!cond.detail.empty()) std::cout << ": " << cond.detail;
                std::cout << "\n";
            }
    }
    std::cout << "valid: " << yes_no(a.valid) << "\n";
    std::cout << "left-linear: " << yes_no(a.left_linear) << "\n";
    for (const auto& w : a.nonlinear) {
        std::cout << "  " << w.metavar << " repeated in " << sys.rule(w.rule).name << " at";
        for (const auto& p : w.positions) std::cout << " " << show(p);
        std::cout << "\n";
    }
    std::cout << "fully-extended: " << yes_no(a.fully_extended) << "\n";
    for (const auto& w : a.not_extended)
        std::cout << "  " << w.metavar << " in " << sys.rule(w.rule).name << " at " << show(w.position)
                  << " omits a bound variable\n";
    std::cout << "orthogonal: " << yes_no(a.orthogonal) << "\n";
    for (const auto& w : a.overlaps)
        std::cout << "  " << sys.rule(w.rule2).name << " overlaps " << sys.rule(w.rule1).name << " at "
                  << show(w.overlap.position) << "\n";
    std::cout << "collapsing:";
    if (a.collapsing_rules.empty()) std::cout << " none";
    for (auto i : a.collapsing_rules) std::cout << " " << sys.rule(i).name;
    std::cout << "\n";
    std::cout << "almost-non-collapsing: " << yes_no(a.almost_non_collapsing) << "\n";
    return 0;
}

void require_valid(const RuleSystem& sys) {
    if (!sys.analysis().valid) throw InputError("the rule system is not valid (run `icrs check`)");
}

int cmd_reduce(const Config& c) {
    const RuleSystem sys = load(c);
    require_valid(sys);
    if (c.terms.size() != 1) throw InputError("reduce takes exactly one --term");
    const Term t = read_term(c.terms[0], sys);
    auto r = reduce(t, sys, strategy_of(c.strategy), c.fuel, c.depth, std::max<std::size_t>(c.max_depth, 64));
    if (c.format == "json") {
        json out = {{"source", to_string(t)},
                    {"trace", trace_json(r.reduction, sys)},
                    {"target", to_string(r.reduction.target())},
                    {"normal_form", r.normal_form},
                    {"fuel_exhausted", r.fuel_exhausted},
                    {"stable_depth", r.stable_depth},
                    {"stable_prefix", to_string(r.stable_prefix)}};
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    std::cout << "source: " << to_string(t) << "\n";
    print_trace(std::cout, r.reduction.steps, sys);
    std::cout << "steps: " << r.reduction.size() << "\n";
    std::cout << "target: " << to_string(r.reduction.target()) << "\n";
    std::cout << "normal-form: " << yes_no(r.normal_form) << "\n";
    std::cout << "stable-depth: " << r.stable_depth << "\n";
    std::cout << "stable-prefix: " << to_string(r.stable_prefix) << "\n";
    return 0;
}

int cmd_hc(const Config& c) {
    const RuleSystem sys = load(c);
    require_valid(sys);
    if (c.terms.size() != 1) throw InputError("hc takes exactly one --term");
    const Term t = read_term(c.terms[0], sys);
    auto v = detect_hypercollapsing(t, sys, budget_of(c));
    if (c.format == "json") {
        json out = verdict_json(v, sys);
        out["term"] = to_string(t);
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    std::cout << "term: " << to_string(t) << "\n";
    std::cout << "verdict: " << to_string(v.status) << "\n";
    std::cout << "states: " << v.states << "\n";
    if (v.witness) {
        std::cout << "stem:" << (v.witness->stem.empty() ? " (empty)" : "") << "\n";
        print_trace(std::cout, v.witness->stem, sys, "  ");
        std::cout << "cycle:\n";
        print_trace(std::cout, v.witness->cycle, sys, "  ");
    }
    return 0;
}

int cmd_equiv(const Config& c) {
    const RuleSystem sys = load(c);
    require_valid(sys);
    if (c.terms.size() != 2) throw InputError("equiv takes exactly two --term options");
    const Term a = read_term(c.terms[0], sys), b = read_term(c.terms[1], sys);
    auto r = hc_equiv(a, b, sys, budget_of(c), c.depth);
    if (c.format == "json") {
        json out = {{"verdict", to_string(r.verdict)},
                    {"left", normal_form_json(r.left)},
                    {"right", normal_form_json(r.right)}};
        out["difference"] = r.difference ? position_json(*r.difference) : json(nullptr);
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    std::cout << "left: " << to_string(r.left.term) << "\n";
    std::cout << "right: " << to_string(r.right.term) << "\n";
    if (r.difference) std::cout << "first difference: " << show(*r.difference) << "\n";
    std::cout << "equiv: " << to_string(r.verdict) << "\n";
    return 0;
}

int cmd_join(const Config& c) {
    const RuleSystem sys = load(c);
    require_valid(sys);
    if (c.terms.size() != 1) throw InputError("join takes exactly one --term");
    if (c.scripts.size() != 2) throw InputError("join takes exactly two --script options");
    const Term t = read_term(c.terms[0], sys);
    const std::size_t search = std::max<std::size_t>(c.max_depth, 64);
    const Reduction s1 = run_script(c.scripts[0], t, sys, search);
    const Reduction s2 = run_script(c.scripts[1], t, sys, search);
    HcOracle oracle(sys, budget_of(c));
    auto j = join_modulo(s1, s2, oracle, c.depth);
    if (c.format == "json") {
        json out = {{"left_target", to_string(s1.target())}, {"right_target", to_string(s2.target())}};
        if (j) {
            out["join"] = {{"left", trace_json(j->left, sys)},
                           {"right", trace_json(j->right, sys)},
                           {"verdict", to_string(j->evidence.verdict)},
                           {"left_normal_form", normal_form_json(j->evidence.left)},
                           {"right_normal_form", normal_form_json(j->evidence.right)}};
        } else {
            out["join"] = nullptr;
        }
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    std::cout << "left: " << to_string(s1.target()) << "\n";
    std::cout << "right: " << to_string(s2.target()) << "\n";
    if (!j) {
        std::cout << "join: none within budget\n";
        return 0;
    }
    std::cout << "join: found\n";
    std::cout << "left extension:" << (j->left.steps.empty() ? " (empty)" : "") << "\n";
    print_trace(std::cout, j->left.steps, sys, "  ");
    std::cout << "right extension:" << (j->right.steps.empty() ? " (empty)" : "") << "\n";
    print_trace(std::cout, j->right.steps, sys, "  ");
    std::cout << "normal forms: " << to_string(j->evidence.left.term) << " ~ " << to_string(j->evidence.right.term) << "\n";
    return 0;
}

int cmd_props(const Config& c) {
    const RuleSystem sys = load(c);
    require_valid(sys);
    std::vector<Term> seeds;
    for (const auto& src : c.terms) seeds.push_back(read_term(src, sys));
    if (seeds.empty()) seeds = default_seeds(sys);
    auto rep = check_nf_properties(sys, seeds, budget_of(c));
    auto line = [&](const char* name, const PropertyResult& r, json& out) {
        if (c.format == "json") {
            out[name] = {{"verdict", to_string(r.verdict)}, {"witness", terms_json(r.witness)}};
            return;
        }
        std::cout << name << ": " << to_string(r.verdict);
        if (!r.witness.empty()) {
            std::cout << " (";
            for (std::size_t i = 0; i < r.witness.size(); ++i) std::cout << (i ? ", " : "") << to_string(r.witness[i]);
            std::cout << ")";
        }
        std::cout << "\n";
    };
    json out;
    line("NF", rep.nf, out);
    line("UN", rep.un, out);
    line("UN->", rep.un_arrow, out);
    if (c.format == "json") {
        out["complete"] = rep.complete;
        out["states"] = rep.states;
        out["normal_forms"] = terms_json(rep.normal_forms);
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    std::cout << "states: " << rep.states << (rep.complete ? " (complete)" : " (bounded)") << "\n";
    std::cout << "normal forms:";
    if (rep.normal_forms.empty()) std::cout << " none";
    for (const auto& n : rep.normal_forms) std::cout << " " << to_string(n);
    std::cout << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"icrs: rewriting with rational infinite terms"};
    app.require_subcommand(1);
    Config cfg;

    auto common = [&](CLI::App* sub, bool needs_term) {
        sub->add_option("--rules", cfg.rules_path, "rule file")->required();
        if (needs_term) sub->add_option("--term", cfg.terms, "term (repeat where two are needed)");
        sub->add_option("--format", cfg.format, "text or json")->check(CLI::IsMember({"text", "json"}));
        sub->add_option("--seed", cfg.seed, "seed for randomised runs");
    };
    auto budget = [&](CLI::App* sub) {
        sub->add_option("--max-states", cfg.max_states, "state budget")->check(CLI::PositiveNumber);
        sub->add_option("--max-steps", cfg.max_steps, "reduction length budget")->check(CLI::PositiveNumber);
        sub->add_option("--max-depth", cfg.max_depth, "redex depth budget")->check(CLI::PositiveNumber);
    };

    auto* check = app.add_subcommand("check", "analyse a rule system");
    common(check, false);
    auto* red = app.add_subcommand("reduce", "reduce a term and report the stable prefix");
    common(red, true);
    red->add_option("--fuel", cfg.fuel, "number of steps");
    red->add_option("--depth", cfg.depth, "truncation depth of the stable prefix");
    red->add_option("--strategy", cfg.strategy, "lo or fair")->check(CLI::IsMember({"lo", "fair"}));
    red->add_option("--max-depth", cfg.max_depth, "redex search depth");
    auto* hc = app.add_subcommand("hc", "detect hypercollapsing terms");
    common(hc, true);
    budget(hc);
    auto* eq = app.add_subcommand("equiv", "decide ~hc up to a depth");
    common(eq, true);
    budget(eq);
    eq->add_option("--depth", cfg.depth, "comparison depth");
    auto* join = app.add_subcommand("join", "search a join modulo ~hc for two reductions");
    common(join, true);
    budget(join);
    join->add_option("--depth", cfg.depth, "comparison depth");
    join->add_option("--script", cfg.scripts, "RULE@POS;... or lo:N / fair:N (give two)");
    auto* props = app.add_subcommand("props", "check NF, UN and UN-> on the reachable graph");
    common(props, true);
    budget(props);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (check->parsed()) return cmd_check(cfg);
        if (red->parsed()) return cmd_reduce(cfg);
        if (hc->parsed()) return cmd_hc(cfg);
        if (eq->parsed()) return cmd_equiv(cfg);
        if (join->parsed()) return cmd_join(cfg);
        if (props->parsed()) return cmd_props(cfg);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const UnsupportedTerm& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
