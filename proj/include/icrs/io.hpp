#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hypercollapsing.hpp"

namespace icrs {

using json = nlohmann::json;

inline json position_json(const Position& p) { return json(p); }

inline json step_json(const Step& st, const RuleSystem& sys) {
    json flags = {{"collapsing", st.collapsing}, {"root_collapsing", st.root_collapsing}};
    flags["out_step"] = st.out_step ? json(*st.out_step) : json(nullptr);
    return {{"position", position_json(st.redex.position)},
            {"rule", sys.rule(st.redex.rule).name},
            {"depth", st.redex.depth()},
            {"flags", flags},
            {"target", to_string(st.target)}};
}

inline json trace_json(const std::vector<Step>& steps, const RuleSystem& sys) {
    json out = json::array();
    for (const auto& st : steps) out.push_back(step_json(st, sys));
    return out;
}

inline json trace_json(const Reduction& r, const RuleSystem& sys) { return trace_json(r.steps, sys); }

inline json lasso_json(const Lasso& l, const RuleSystem& sys) {
    return {{"stem", trace_json(l.stem, sys)}, {"cycle", trace_json(l.cycle, sys)}};
}

inline json verdict_json(const HcVerdict& v, const RuleSystem& sys) {
    json out = {{"status", to_string(v.status)}, {"states", v.states}};
    out["lasso"] = v.witness ? lasso_json(*v.witness, sys) : json(nullptr);
    return out;
}

inline json positions_json(const std::set<Position>& ps) {
    json out = json::array();
    for (const auto& p : ps) out.push_back(position_json(p));
    return out;
}

inline json normal_form_json(const HcNormalForm& nf) {
    return {{"term", to_string(nf.term)},
            {"substituted_positions", positions_json(nf.substituted_positions)},
            {"unknown_positions", positions_json(nf.unknown_positions)}};
}

inline json terms_json(const std::vector<Term>& ts) {
    json out = json::array();
    for (const auto& t : ts) out.push_back(to_string(t));
    return out;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline RuleSystem load_rule_system(const std::string& path) { return parse_rule_system(read_file(path)); }

}  // namespace icrs
