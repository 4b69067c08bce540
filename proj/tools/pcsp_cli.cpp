// Command-line front end.  Exit codes: 0 all checks pass, 1 a check failed,
// 2 usage or input error.

#include "pcsp/analysis.hpp"
#include "pcsp/conditions.hpp"
#include "pcsp/cose.hpp"
#include "pcsp/parser.hpp"
#include "pcsp/reduction.hpp"
#include "pcsp/ssos.hpp"
#include "pcsp/std_semantics.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <regex>

using namespace pcsp;
using nlohmann::ordered_json;

namespace {

struct Target {
    std::string name;
    std::vector<ExprP> args;
    Env env;  // t-typed arguments, for configuration roots
    std::string str() const { return name; }
};

// Parses `Name` or `Name(v1, ..., vk)` with integer or atom arguments.
Target parse_target(const std::string& text, const Definitions& defs)
{
    static const std::regex re(R"(^\s*([A-Za-z][A-Za-z0-9_']*)\s*(?:\((.*)\))?\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, re)) throw Diagnostic("malformed process reference '" + text + "'");
    Target t;
    t.name = m[1];
    const ProcDef& def = defs.proc(t.name);
    std::vector<std::string> raw;
    if (m[2].matched) {
        std::string inner = m[2];
        std::stringstream ss(inner);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item.erase(0, item.find_first_not_of(" \t"));
            item.erase(item.find_last_not_of(" \t") + 1);
            if (!item.empty()) raw.push_back(item);
        }
    }
    if (raw.size() != def.params.size())
        throw Diagnostic(t.name + " expects " + std::to_string(def.params.size()) + " arguments, got " +
                         std::to_string(raw.size()));
    for (std::size_t i = 0; i < raw.size(); ++i) {
        bool is_t = def.params[i].type.kind == TypeKind::T;
        bool numeric = raw[i].find_first_not_of("0123456789") == std::string::npos;
        Value v = numeric ? Value::number(std::stoi(raw[i])) : Value::of_atom(raw[i]);
        t.args.push_back(make_lit(v, is_t));
        if (is_t) t.env[def.params[i].name] = v;
    }
    return t;
}

ProcP root_of(const Target& t, const Definitions& defs) { return instantiate(defs, t.name, t.args); }

Model parse_model(const std::string& s)
{
    if (s == "traces" || s == "T") return Model::Traces;
    if (s == "failures" || s == "F") return Model::Failures;
    throw Diagnostic("unknown model '" + s + "' (use traces or failures)");
}

std::vector<int> parse_sizes(const std::string& s)
{
    std::vector<int> out;
    static const std::regex range(R"(^\s*(\d+)\s*\.\.\s*(\d+)\s*$)");
    std::smatch m;
    if (std::regex_match(s, m, range)) {
        int a = std::stoi(m[1]), b = std::stoi(m[2]);
        for (int i = a; i <= b; ++i) out.push_back(i);
    } else {
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    }
    if (out.empty()) throw Diagnostic("empty size list '" + s + "'");
    for (int n : out)
        if (n < 1) throw Diagnostic("sizes must be positive");
    return out;
}

void print_lts(const Lts& l, std::ostream& o)
{
    o << "states " << l.num_states() << ", transitions " << l.num_edges() << ", root " << l.root << "\n";
    for (std::size_t s = 0; s < l.num_states(); ++s) {
        o << s << ": " << l.names[s] << "\n";
        for (const auto& e : l.out[s]) o << "    --" << l.label_str(e.label) << "--> " << e.dst << "\n";
    }
}

void print_sslts(const Sslts& s, std::ostream& o)
{
    o << "states " << s.num_states() << ", transitions " << s.num_edges() << ", root " << s.root << "\n";
    for (std::size_t u = 0; u < s.num_states(); ++u) {
        o << u << ": " << print_proc(s.terms[u]) << "\n";
        for (const auto& e : s.out[u]) o << "    --" << s.label(e).str() << "--> " << e.dst << "\n";
    }
    for (const auto& v : s.violations) o << "regularity: " << v << "\n";
}

ordered_json report_json(const std::string& proc, const ConditionReport& r)
{
    ordered_json fs = ordered_json::array();
    for (const auto& f : r.findings)
        fs.push_back({{"clause", f.clause}, {"line", f.loc.line}, {"col", f.loc.col}, {"explanation", f.explanation}});
    return {{"process", proc}, {"condition", r.condition}, {"verdict", verdict_str(r.verdict)}, {"note", r.note},
            {"findings", fs}};
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Parameterised CSP verification by type reduction"};
    app.require_subcommand(1);

    std::string file, proc, spec, impl, abst, model_s = "traces", sizes_s, ev_sizes_s = "2,3";
    int tsize = 2;
    int valid_from = 0;
    std::size_t max_states = kDefaultMaxStates;
    bool dot = false, json = false, assume_typesym = false;

    auto common = [&](CLI::App* c) {
        c->add_option("file", file, "definition file")->required()->check(CLI::ExistingFile);
        c->add_option("--max-states", max_states, "state bound")->check(CLI::PositiveNumber);
    };

    auto* conds = app.add_subcommand("conditions", "check side conditions of every (or one) definition");
    common(conds);
    conds->add_option("--proc", proc, "single definition");
    conds->add_option("--evidence-sizes", ev_sizes_s, "sizes for RevPosConjEqT spot checks");
    conds->add_option("--model", model_s, "traces or failures (RevPosConjEqT variant)");
    conds->add_flag("--json", json);

    auto* lts = app.add_subcommand("lts", "standard semantics LTS");
    common(lts);
    lts->add_option("--proc", proc)->required();
    lts->add_option("--tsize", tsize)->required()->check(CLI::PositiveNumber);
    lts->add_flag("--dot", dot);

    auto* ss = app.add_subcommand("sslts", "semi-symbolic LTS");
    common(ss);
    ss->add_option("--proc", proc)->required();
    ss->add_flag("--dot", dot);

    auto* co = app.add_subcommand("cose", "configuration LTS with environments");
    common(co);
    co->add_option("--proc", proc)->required();
    co->add_option("--tsize", tsize)->required()->check(CLI::PositiveNumber);
    co->add_flag("--dot", dot);

    auto* cg = app.add_subcommand("congruence", "bisimilarity of the standard and configuration LTSs");
    common(cg);
    cg->add_option("--proc", proc)->required();
    cg->add_option("--tsize", tsize)->required()->check(CLI::PositiveNumber);

    auto* rf = app.add_subcommand("refine", "refinement check at one size");
    common(rf);
    rf->add_option("--spec", spec)->required();
    rf->add_option("--impl", impl)->required();
    rf->add_option("--model", model_s);
    rf->add_option("--tsize", tsize)->required()->check(CLI::PositiveNumber);

    auto* th = app.add_subcommand("threshold", "threshold of a specification");
    common(th);
    th->add_option("--spec", spec)->required();
    th->add_option("--model", model_s);
    th->add_flag("--json", json);

    auto* vf = app.add_subcommand("verify", "parameterised verification");
    common(vf);
    vf->add_option("--spec", spec)->required();
    vf->add_option("--impl", impl)->required();
    vf->add_option("--abst", abst, "abstraction of the implementation");
    vf->add_option("--valid-from", valid_from, "abstraction premise asserted for #T >= K");
    vf->add_option("--model", model_s);
    vf->add_option("--sizes", sizes_s, "a..b or a,b,c")->required();
    vf->add_option("--evidence-sizes", ev_sizes_s);
    vf->add_flag("--assume-typesym", assume_typesym, "user asserts TypeSym of the implementation");
    vf->add_flag("--json", json);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        Definitions defs = parse_file(file);
        Model model = parse_model(model_s);

        if (conds->parsed()) {
            std::vector<std::string> names = proc.empty() ? defs.proc_order : std::vector<std::string>{proc};
            auto ev = parse_sizes(ev_sizes_s);
            bool any_fail = false;
            ordered_json all = ordered_json::array();
            for (const auto& n : names) {
                std::vector<ConditionReport> rs{check_data_independence(n, defs), check_seq(n, defs),
                                                check_seqnorm(n, defs),          check_typesym_syntactic(n, defs),
                                                check_no_mixed_inputs(n, defs)};
                if (rs[1].passed()) rs.push_back(revposconjeqt_evidence(n, defs, model, ev));
                if (!json) std::cout << n << "\n";
                for (const auto& r : rs) {
                    any_fail = any_fail || !r.passed();
                    if (json) {
                        all.push_back(report_json(n, r));
                        continue;
                    }
                    std::istringstream lines(r.str());
                    std::string line;
                    while (std::getline(lines, line)) std::cout << "  " << line << "\n";
                }
            }
            if (json) std::cout << all.dump(2) << "\n";
            return any_fail ? 1 : 0;
        }

        if (lts->parsed()) {
            Lts l = build_lts(root_of(parse_target(proc, defs), defs), defs, tsize, max_states);
            if (dot) std::cout << to_dot(l);
            else print_lts(l, std::cout);
            return 0;
        }

        if (ss->parsed()) {
            Target t = parse_target(proc, defs);
            auto seq = check_seq(t.name, defs);
            if (!seq.passed()) throw Diagnostic(t.name + " is not Seq\n" + seq.str());
            Sslts s = t.args.empty() ? build_sslts(defs, t.name, max_states)
                                     : build_sslts_term(root_of(t, defs), defs, max_states);
            if (dot) std::cout << to_dot(s);
            else print_sslts(s, std::cout);
            return 0;
        }

        if (co->parsed() || cg->parsed()) {
            Target t = parse_target(proc, defs);
            auto seq = check_seq(t.name, defs);
            if (!seq.passed()) throw Diagnostic(t.name + " is not Seq\n" + seq.str());
            const ProcP& body = defs.proc(t.name).body;
            // Non-t arguments are substituted; t arguments form the initial environment.
            std::map<std::string, ExprP> nont;
            const auto& params = defs.proc(t.name).params;
            for (std::size_t i = 0; i < params.size(); ++i)
                if (params[i].type.kind != TypeKind::T) nont[params[i].name] = t.args[i];
            ProcP root = nont.empty() ? body : substitute(body, nont);
            Lts c = concretize_term(root, defs, tsize, t.env, max_states);
            if (co->parsed()) {
                if (dot) {
                    std::cout << to_dot_cose(c);
                    return 0;
                }
                print_lts(c, std::cout);
                auto reg = check_regularity(c);
                for (const auto& v : reg.env_uniqueness) std::cout << "environment uniqueness: " << v << "\n";
                for (const auto& v : reg.unique_construct) std::cout << "unique construct: " << v << "\n";
                return 0;
            }
            Lts l = build_lts(root_of(t, defs), defs, tsize, max_states);
            auto b = strong_bisim(l, c);
            std::cout << "standard: " << l.num_states() << " states, configurations: " << c.num_states()
                      << " states\n";
            if (b.bisimilar) {
                std::cout << "bisimilar\n";
                return 0;
            }
            std::cout << "not bisimilar; distinguishing formula: " << b.formula << "\n";
            return 1;
        }

        if (rf->parsed()) {
            Lts a = build_lts(root_of(parse_target(spec, defs), defs), defs, tsize, max_states);
            Lts b = build_lts(root_of(parse_target(impl, defs), defs), defs, tsize, max_states);
            auto r = refines(a, b, model);
            std::cout << spec << (model == Model::Traces ? " [T= " : " [F= ") << impl << " at #T=" << tsize << ": "
                      << r.str() << "\n";
            return r.holds ? 0 : 1;
        }

        if (th->parsed()) {
            Sslts s = build_sslts(defs, spec, max_states);
            auto tt = thresh_traces(s, max_states);
            std::optional<ThresholdResult> tf;
            if (model == Model::Failures) tf = thresh_failures(defs, spec, max_states);
            int B = tf ? tf->value : tt.value;
            if (json) {
                ordered_json j{{"spec", spec}, {"model", model == Model::Traces ? "traces" : "failures"},
                               {"thresh_traces", tt.value}, {"thresh_traces_witness", tt.witness}};
                if (tf) {
                    j["thresh_failures"] = tf->value;
                    j["thresh_failures_witness"] = tf->witness;
                }
                j["B"] = B;
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << "Thresh_T = " << tt.value << "  (" << tt.witness << ")\n";
                if (tf) std::cout << "Thresh = " << tf->value << "  (" << tf->witness << ")\n";
                std::cout << "B=" << B << "\n";
            }
            return 0;
        }

        if (vf->parsed()) {
            PmcpOptions o;
            o.spec = spec;
            o.impl = impl;
            if (!abst.empty()) o.abst = abst;
            o.valid_from = valid_from;
            o.model = model;
            o.sizes = parse_sizes(sizes_s);
            o.evidence_sizes = parse_sizes(ev_sizes_s);
            o.assume_typesym = assume_typesym;
            o.max_states = max_states;
            auto v = verify_pmcp(defs, o);
            if (json) std::cout << v.to_json().dump(2) << "\n";
            else std::cout << v.text();
            return v.all_hold() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
