// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "support.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

using namespace pcsp;
using namespace pcsp::testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool ok = true;
    std::vector<std::string> notes;

    void require(bool cond, const std::string& what)
    {
        if (!cond) {
            ok = false;
            notes.push_back(what);
        }
    }
    void add_all(const std::vector<std::string>& xs, const std::string& prefix)
    {
        for (const auto& x : xs) require(false, prefix + x);
    }
};

Event ev(const std::string& c, std::vector<int> vs)
{
    Event e{c, {}};
    for (int v : vs) e.vals.push_back(Value::number(v));
    return e;
}

Outcome congruence()
{
    Outcome o;
    auto t0 = Clock::now();
    o.require(seq_cases().size() >= 10, "fewer than 10 Seq processes");
    o.add_all(check_congruence({1, 2, 3}), "");
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    o.require(secs < 10.0, "took " + std::to_string(secs) + " s");
    return o;
}

Outcome sslts_structure()
{
    Outcome o;
    Sslts s = build_sslts(corpus("running.pcsp"), "P");
    const auto& root = s.out[static_cast<std::size_t>(s.root)];
    o.require(root.size() == 2, "root out-degree " + std::to_string(root.size()));
    for (const auto& e : root) o.require(s.label(e).kind == SymbolicLabel::Kind::Tau, "root edge not tau");
    std::multiset<std::string> first, second, conds;
    for (const auto& es : s.out)
        for (const auto& e : es) {
            const auto& l = s.label(e);
            if (l.is_vis() && l.ev.channel == "c") first.insert(l.str());
            if (l.is_vis() && l.ev.channel == "d") second.insert(l.str());
            if (l.kind == SymbolicLabel::Kind::Cond) conds.insert(l.str());
        }
    o.require(first == std::multiset<std::string>{"c!a$y:t?z:t", "c!b$y:t?z:t"}, "c edges differ");
    o.require(second == std::multiset<std::string>{"d!a", "d!b"}, "d edges differ");
    o.require(conds == std::multiset<std::string>{"not (y == z)", "not (y == z)", "y == z", "y == z"},
              "conditional edges differ");
    return o;
}

Outcome thresholds()
{
    Outcome o;
    auto check = [&](int got, int want, const std::string& what) {
        o.require(got == want, what + " = " + std::to_string(got) + ", expected " + std::to_string(want));
    };
    check(thresh_traces(build_sslts(corpus("mutex.pcsp"), "Spec")).value, 1, "Thresh_T(mutex Spec)");
    check(thresh_traces(build_sslts(corpus("traces-count.pcsp"), "P")).value, 2, "Thresh_T(P)");
    check(thresh_failures(corpus("mutex.pcsp"), "Spec").value, 1, "Thresh(mutex Spec)");
    check(thresh_traces(build_sslts(corpus("traces-count.pcsp"), "Q")).value, 1, "Thresh_T(Q)");
    return o;
}

Outcome no_threshold_examples()
{
    Outcome o;
    Collapse phi{1};
    const Definitions& x = corpus("ex511.pcsp");
    Lts impl3 = std_lts(x, "Impl", 3);
    o.require(refines_failures(std_lts(x, "Spec", 2), phi.apply(x, impl3)).holds, "collapsed check fails (t input)");
    auto full = refines_failures(std_lts(x, "Spec", 3), impl3);
    o.require(!full.holds, "full check holds (t input)");
    o.require(full.trace.empty(), "counterexample trace not empty");
    o.require(full.refusal && *full.refusal == std::set<Event>{ev("c", {0, 0}), ev("c", {1, 1}), ev("c", {2, 2})},
              "refusal is " + (full.refusal ? format_events(*full.refusal) : std::string("missing")));

    const Definitions& y = corpus("ex512.pcsp");
    Lts impl4 = std_lts(y, "Impl", 4);
    o.require(refines_failures(std_lts(y, "Spec", 2), phi.apply(y, impl4)).holds, "collapsed check fails (Y input)");
    o.require(!refines_failures(std_lts(y, "Spec", 4), impl4).holds, "full check holds (Y input)");
    return o;
}

Outcome mutex_end_to_end()
{
    Outcome o;
    auto t0 = Clock::now();
    const Definitions& m = corpus("mutex.pcsp");
    Collapse phi{1};
    for (Model md : {Model::Traces, Model::Failures}) {
        std::string tag = md == Model::Traces ? "[T] " : "[F] ";
        int B = md == Model::Traces ? thresh_traces(build_sslts(m, "Spec")).value : thresh_failures(m, "Spec").value;
        o.require(B == 1, tag + "B = " + std::to_string(B));
        Lts abst = std_lts(m, "Abst", 2);
        o.require(refines(std_lts(m, "Spec", 2), abst, md).holds, tag + "Spec({0,1}) does not refine to Abst");
        for (int n = 1; n <= 4; ++n)
            o.require(refines(std_lts(m, "Spec", n), std_lts(m, "Impl", n), md).holds,
                      tag + "direct check fails at #T=" + std::to_string(n));
        for (int n = 3; n <= 5; ++n)
            o.require(refines(abst, phi.apply(m, std_lts(m, "Impl", n)), md).holds,
                      tag + "premise fails at #T=" + std::to_string(n));

        PmcpOptions opt;
        opt.spec = "Spec";
        opt.impl = "Impl";
        opt.abst = "Abst";
        opt.valid_from = 3;
        opt.model = md;
        opt.sizes = {1, 2, 3, 4};
        auto v = verify_pmcp(m, opt);
        o.require(v.all_hold() && v.conclusion.find("for all #T >= 3") != std::string::npos,
                  tag + "pipeline conclusion: " + v.conclusion);
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    o.require(secs < 30.0, "took " + std::to_string(secs) + " s");
    return o;
}

Outcome propositions()
{
    Outcome o;
    auto cases = bigprop_cases(corpus("bigprops.pcsp"));
    o.require(cases.size() == 8, "expected 8 claims");
    for (const auto& c : cases) o.require(c.actual == c.expected, c.name + ": " + c.detail);
    return o;
}

Outcome regularity()
{
    Outcome o;
    o.add_all(check_regularity_seqnorm({2, 3}), "");
    return o;
}

Outcome condition_table()
{
    Outcome o;
    auto expect = [&](const ConditionReport& r, Verdict3 v, const std::string& clause, const std::string& what) {
        o.require(r.verdict == v, what + ": " + verdict_str(r.verdict));
        if (!clause.empty()) o.require(r.has_clause(clause), what + ": missing clause " + clause);
    };
    expect(check_typesym_syntactic("COPY", corpus("copy.pcsp")), Verdict3::Pass, "", "COPY TypeSym");
    expect(check_typesym_syntactic("Nodes", corpus("ring.pcsp")), Verdict3::Fail, "", "ring TypeSym");
    expect(check_data_independence("Node", corpus("mutex.pcsp")), Verdict3::Pass, "", "Node DI");
    expect(check_data_independence("Nodes", corpus("mutex.pcsp")), Verdict3::Fail, "", "Nodes DI");
    expect(check_seq("ClashV", corpus("ex33.pcsp")), Verdict3::Fail, "(v)", "Seq (v) fixture");
    expect(check_seq("DupInput", corpus("ex33.pcsp")), Verdict3::Fail, "(vi)", "Seq (vi) fixture");
    const Definitions& e = corpus("ex315.pcsp");
    for (Model m : {Model::Traces, Model::Failures}) {
        expect(revposconjeqt_evidence("Good", e, m, {2, 3}), Verdict3::EvidenceOnly, "", "Good RevPosConjEqT");
        expect(revposconjeqt_evidence("Bad", e, m, {2, 3}), Verdict3::Fail, "", "Bad RevPosConjEqT");
    }
    return o;
}

Outcome properties()
{
    Outcome o;
    o.add_all(check_prefix_closure(2, 4), "prefix closure: ");
    o.add_all(check_refusal_subset_closure(2, 2, 4), "refusal closure: ");
    o.add_all(check_reflexivity(2), "reflexivity: ");
    int nonvacuous = 0;
    o.add_all(check_transitivity(2, nonvacuous), "transitivity: ");
    o.require(nonvacuous > 0, "transitivity never exercised");
    o.add_all(check_phi_idempotence(4), "phi: ");
    o.add_all(check_roundtrip(), "round trip: ");
    return o;
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"congruence of standard and configuration semantics", congruence},
        {"SSLTS structure of the running example", sslts_structure},
        {"threshold values", thresholds},
        {"collapsed refinement without a threshold", no_threshold_examples},
        {"mutex end to end in both models", mutex_end_to_end},
        {"trace and failure membership claims", propositions},
        {"regularity of SeqNorm specifications", regularity},
        {"condition verdict table", condition_table},
        {"property suites over the corpus", properties},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.ok = false;
            o.notes.push_back(std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        std::ostringstream line;
        line.precision(2);
        line << std::fixed << (o.ok ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << " (" << secs
             << " s)";
        std::cout << line.str() << "\n";
        for (std::size_t k = 0; k < o.notes.size() && k < 20; ++k) std::cout << "    " << o.notes[k] << "\n";
        if (!o.ok) ++failed;
    }
    std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria fail") << "\n";
    return failed == 0 ? 0 : 1;
}
