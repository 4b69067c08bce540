// Corpus access and property checks shared by the unit tests and the
// acceptance runner.  Each property returns the list of violations found.
#pragma once

#include "pcsp/analysis.hpp"
#include "pcsp/conditions.hpp"
#include "pcsp/cose.hpp"
#include "pcsp/parser.hpp"
#include "pcsp/reduction.hpp"
#include "pcsp/ssos.hpp"
#include "pcsp/std_semantics.hpp"

#include <map>
#include <random>
#include <string>
#include <vector>

#ifndef PCSP_CORPUS_DIR
#define PCSP_CORPUS_DIR "examples"
#endif

namespace pcsp::testing {

inline const std::vector<std::string>& corpus_files()
{
    static const std::vector<std::string> files{"running.pcsp", "mutex.pcsp", "copy.pcsp",     "ring.pcsp",
                                                "ex33.pcsp",    "ex315.pcsp", "ex511.pcsp",    "ex512.pcsp",
                                                "bigprops.pcsp", "traces-count.pcsp"};
    return files;
}

inline const Definitions& corpus(const std::string& file)
{
    static std::map<std::string, Definitions> cache;
    auto it = cache.find(file);
    if (it == cache.end()) it = cache.emplace(file, parse_file(std::string(PCSP_CORPUS_DIR) + "/" + file)).first;
    return it->second;
}

inline Lts std_lts(const Definitions& d, const std::string& name, int tsize)
{
    return build_lts(instantiate(d, name, {}), d, tsize);
}

// A Seq definition with its t parameters bound in an initial environment.
struct SeqCase {
    std::string file, name;
    std::vector<int> targs;   // values for t parameters, reduced mod #T
    std::vector<int> nargs;   // values for non-t parameters
    bool seqnorm = true;

    std::string label() const { return file + ":" + name; }

    // Standard-semantics root and (body, environment) root at size n.
    ProcP std_root(int n) const
    {
        const Definitions& d = corpus(file);
        const auto& params = d.proc(name).params;
        std::vector<ExprP> args;
        std::size_t ti = 0, ni = 0;
        for (const auto& p : params) {
            if (p.type.kind == TypeKind::T) args.push_back(make_lit(Value::number(targs.at(ti++) % n), true));
            else args.push_back(make_lit(Value::number(nargs.at(ni++)), false));
        }
        return instantiate(d, name, args);
    }

    std::pair<ProcP, Env> cose_root(int n) const
    {
        const Definitions& d = corpus(file);
        const ProcDef& def = d.proc(name);
        std::map<std::string, ExprP> nont;
        Env env;
        std::size_t ti = 0, ni = 0;
        for (const auto& p : def.params) {
            if (p.type.kind == TypeKind::T) env[p.name] = Value::number(targs.at(ti++) % n);
            else nont[p.name] = make_lit(Value::number(nargs.at(ni++)), false);
        }
        return {nont.empty() ? def.body : substitute(def.body, nont), env};
    }
};

inline const std::vector<SeqCase>& seq_cases()
{
    static const std::vector<SeqCase> cases{
        {"running.pcsp", "P", {}, {}, true},
        {"running.pcsp", "Slide", {}, {}, true},
        {"running.pcsp", "Choice", {}, {}, true},
        {"running.pcsp", "Loop", {}, {}, true},
        {"mutex.pcsp", "Spec", {}, {}, true},
        {"mutex.pcsp", "Node", {1}, {}, true},
        {"mutex.pcsp", "Controller", {}, {}, true},
        {"mutex.pcsp", "NodesAbstLiteral", {}, {2, 0, 0, 0}, false},
        {"copy.pcsp", "COPY", {}, {}, true},
        {"ex315.pcsp", "Good", {}, {}, true},
        {"ex315.pcsp", "Bad", {}, {}, true},
        {"ex315.pcsp", "NoCond", {}, {}, true},
        {"ex33.pcsp", "SeqNormShared", {0, 1}, {}, false},
        {"ex33.pcsp", "CondBeforePrefix", {0, 1}, {}, false},
        {"ex511.pcsp", "Spec", {}, {}, true},
        {"ex512.pcsp", "Spec", {}, {}, true},
        {"bigprops.pcsp", "Proc", {0}, {}, true},
        {"traces-count.pcsp", "P", {}, {}, true},
        {"traces-count.pcsp", "Q", {}, {}, true},
    };
    return cases;
}

// Closed definitions (no parameters) of every corpus file.
inline std::vector<std::pair<std::string, std::string>> closed_defs()
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& f : corpus_files())
        for (const auto& n : corpus(f).proc_order)
            if (corpus(f).proc(n).params.empty()) out.push_back({f, n});
    return out;
}

// ------------------------------------------------------------ properties

inline std::vector<std::string> check_roundtrip()
{
    std::vector<std::string> bad;
    for (const auto& f : corpus_files()) {
        const Definitions& d = corpus(f);
        Definitions again = parse_definitions(print_definitions(d), f);
        for (const auto& n : d.proc_order) {
            if (!again.procs.count(n)) {
                bad.push_back(f + ":" + n + " lost in printing");
                continue;
            }
            if (dump(d.proc(n).body) != dump(again.proc(n).body)) bad.push_back(f + ":" + n + " changed by printing");
        }
        if (print_definitions(again) != print_definitions(d)) bad.push_back(f + " printing is not a fixpoint");
    }
    return bad;
}

inline std::vector<std::string> check_prefix_closure(int tsize, std::size_t depth)
{
    std::vector<std::string> bad;
    for (const auto& [f, n] : closed_defs()) {
        Lts l = std_lts(corpus(f), n, tsize);
        auto trs = traces_of(l, depth);
        std::set<Trace> all(trs.begin(), trs.end());
        if (!all.count(Trace{})) bad.push_back(f + ":" + n + " lacks the empty trace");
        for (const auto& tr : trs)
            for (std::size_t k = 0; k < tr.size(); ++k) {
                Trace p(tr.begin(), tr.begin() + static_cast<std::ptrdiff_t>(k));
                if (!all.count(p) || !has_trace(l, p))
                    bad.push_back(f + ":" + n + " prefix of " + format_trace(tr) + " missing");
            }
    }
    return bad;
}

// Every subset of a refusal is a refusal; sampled with a fixed seed.
inline std::vector<std::string> check_refusal_subset_closure(int tsize, std::size_t depth, int samples)
{
    std::vector<std::string> bad;
    std::mt19937 rng(20261015);
    for (const auto& [f, n] : closed_defs()) {
        Lts l = std_lts(corpus(f), n, tsize);
        for (const auto& tr : traces_of(l, depth)) {
            for (const auto& x : maximal_refusals(l, tr, l.alphabet)) {
                if (!has_failure(l, tr, x)) bad.push_back(f + ":" + n + " maximal refusal not a failure");
                std::vector<Event> xs(x.begin(), x.end());
                for (int k = 0; k < samples; ++k) {
                    std::set<Event> y;
                    for (const auto& e : xs)
                        if (rng() % 2) y.insert(e);
                    if (!has_failure(l, tr, y))
                        bad.push_back(f + ":" + n + " subset " + format_events(y) + " of refusal after " +
                                      format_trace(tr) + " rejected");
                }
            }
        }
    }
    return bad;
}

inline std::vector<std::string> check_reflexivity(int tsize)
{
    std::vector<std::string> bad;
    for (const auto& [f, n] : closed_defs()) {
        Lts l = std_lts(corpus(f), n, tsize);
        for (Model m : {Model::Traces, Model::Failures})
            if (!refines(l, l, m).holds) bad.push_back(f + ":" + n + " does not refine itself");
    }
    return bad;
}

// Over all ordered triples of closed definitions in each file, plus the
// mutex chain Spec, Abst, phi(Impl).  Returns violations and counts the
// triples whose premises both held.
inline std::vector<std::string> check_transitivity(int tsize, int& nonvacuous)
{
    std::vector<std::string> bad;
    nonvacuous = 0;
    for (const auto& f : corpus_files()) {
        const Definitions& d = corpus(f);
        std::vector<std::pair<std::string, Lts>> ls;
        for (const auto& n : d.proc_order)
            if (d.proc(n).params.empty()) ls.push_back({n, std_lts(d, n, tsize)});
        if (f == "mutex.pcsp") {
            Collapse phi{1};
            ls.push_back({"phi(Impl(3))", phi.apply(d, std_lts(d, "Impl", 3))});
        }
        for (Model m : {Model::Traces, Model::Failures}) {
            std::vector<std::vector<bool>> r(ls.size(), std::vector<bool>(ls.size()));
            for (std::size_t i = 0; i < ls.size(); ++i)
                for (std::size_t j = 0; j < ls.size(); ++j) r[i][j] = refines(ls[i].second, ls[j].second, m).holds;
            for (std::size_t i = 0; i < ls.size(); ++i)
                for (std::size_t j = 0; j < ls.size(); ++j)
                    for (std::size_t k = 0; k < ls.size(); ++k) {
                        if (!r[i][j] || !r[j][k]) continue;
                        if (i != j && j != k) ++nonvacuous;
                        if (!r[i][k])
                            bad.push_back(f + ": " + ls[i].first + " [= " + ls[j].first + " [= " + ls[k].first);
                    }
        }
    }
    return bad;
}

inline std::vector<std::string> check_phi_idempotence(int tsize)
{
    std::vector<std::string> bad;
    for (const auto& [f, n] : closed_defs()) {
        const Definitions& d = corpus(f);
        Lts l = std_lts(d, n, tsize);
        for (int B = 1; B < tsize; ++B) {
            Collapse phi{B};
            for (const auto& e : l.alphabet) {
                Event once = phi.apply(d, e);
                if (phi.apply(d, once) != once) bad.push_back(f + ":" + n + " phi not idempotent on " + e.str());
                if (!phi.inverse(d, tsize, once).count(e))
                    bad.push_back(f + ":" + n + " " + e.str() + " not in phi^-1(phi(e))");
                const auto& sig = d.channel(e.channel).sig;
                bool small = true;
                for (std::size_t i = 0; i < sig.size(); ++i)
                    if (sig[i].kind == TypeKind::T && e.vals[i].num >= B) small = false;
                if (small && once != e) bad.push_back(f + ":" + n + " phi moved uncollapsed " + e.str());
            }
        }
    }
    return bad;
}

// ------------------------------------------------------------ COSE checks

inline std::vector<std::string> check_congruence(const std::vector<int>& sizes)
{
    std::vector<std::string> bad;
    for (const auto& c : seq_cases())
        for (int n : sizes) {
            const Definitions& d = corpus(c.file);
            Lts s = build_lts(c.std_root(n), d, n);
            auto [root, env] = c.cose_root(n);
            Lts k = concretize_term(root, d, n, env);
            auto b = strong_bisim(s, k);
            if (!b.bisimilar) bad.push_back(c.label() + " at #T=" + std::to_string(n) + ": " + b.formula);
        }
    return bad;
}

inline std::vector<std::string> check_regularity_seqnorm(const std::vector<int>& sizes)
{
    std::vector<std::string> bad;
    for (const auto& c : seq_cases()) {
        if (!c.seqnorm) continue;
        const Definitions& d = corpus(c.file);
        for (int n : sizes) {
            auto [root, env] = c.cose_root(n);
            auto r = check_regularity(concretize_term(root, d, n, env));
            for (const auto& v : r.env_uniqueness) bad.push_back(c.label() + " environment uniqueness: " + v);
            for (const auto& v : r.unique_construct) bad.push_back(c.label() + " unique construct: " + v);
        }
        auto [r2, e2] = c.cose_root(2);
        auto [r3, e3] = c.cose_root(3);
        for (const auto& m : check_monotonicity(concretize_term(r2, d, 2, e2), concretize_term(r3, d, 3, e3)))
            bad.push_back(c.label() + " monotonicity: " + m);
        auto s = build_sslts_term(r2, d);
        for (const auto& v : s.violations) bad.push_back(c.label() + " SSLTS: " + v);
    }
    return bad;
}

}  // namespace pcsp::testing
