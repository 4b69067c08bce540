#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace pcsp;
using namespace pcsp::testing;

namespace {

Event ev(const std::string& c, std::vector<int> vs)
{
    Event e{c, {}};
    for (int v : vs) e.vals.push_back(Value::number(v));
    return e;
}

}  // namespace

TEST_CASE("STOP has one state", "[std]")
{
    Definitions d = parse_definitions("S = STOP\n");
    Lts l = std_lts(d, "S", 2);
    CHECK(l.num_states() == 1);
    CHECK(l.num_edges() == 0);
}

TEST_CASE("running example LTS size at two identities", "[std]")
{
    Lts l = std_lts(corpus("running.pcsp"), "P", 2);
    CHECK(l.num_states() == 16);
    CHECK(l.num_edges() == 18);
}

TEST_CASE("mutex implementation sizes grow with T", "[std]")
{
    const std::vector<std::size_t> expected{14, 36, 92, 228};
    for (int n = 1; n <= 4; ++n) CHECK(std_lts(corpus("mutex.pcsp"), "Impl", n).num_states() == expected[n - 1]);
}

TEST_CASE("state bound is reported with the frontier", "[std]")
{
    try {
        build_lts(instantiate(corpus("mutex.pcsp"), "Impl", {}), corpus("mutex.pcsp"), 3, 10);
        FAIL("expected a diagnostic");
    } catch (const Diagnostic& d) {
        CHECK(std::string(d.what()).find("state bound 10 exceeded") != std::string::npos);
    }
}

TEST_CASE("COPY traces", "[std][analysis]")
{
    Lts l = std_lts(corpus("copy.pcsp"), "COPY", 2);
    CHECK(has_trace(l, {ev("in", {1}), ev("out", {1}), ev("in", {0})}));
    CHECK_FALSE(has_trace(l, {ev("in", {1}), ev("out", {0})}));
    CHECK(initials_after(l, {ev("in", {0})}) == std::set<Event>{ev("out", {0})});
}

TEST_CASE("hiding and parallel composition in the mutex implementation", "[std][analysis]")
{
    Lts l = std_lts(corpus("mutex.pcsp"), "Impl", 2);
    CHECK(has_trace(l, {ev("enterCS", {0}), ev("leaveCS", {0}), ev("enterCS", {1})}));
    CHECK_FALSE(has_trace(l, {ev("enterCS", {0}), ev("enterCS", {1})}));
    for (const auto& e : l.alphabet) CHECK((e.channel == "enterCS" || e.channel == "leaveCS"));
}

TEST_CASE("traces are prefix closed", "[analysis][property]")
{
    auto bad = check_prefix_closure(2, 4);
    for (const auto& b : bad) UNSCOPED_INFO(b);
    CHECK(bad.empty());
}

TEST_CASE("refusals are subset closed", "[analysis][property]")
{
    auto bad = check_refusal_subset_closure(2, 2, 4);
    for (const auto& b : bad) UNSCOPED_INFO(b);
    CHECK(bad.empty());
}

TEST_CASE("refinement is reflexive", "[analysis][property]")
{
    auto bad = check_reflexivity(2);
    for (const auto& b : bad) UNSCOPED_INFO(b);
    CHECK(bad.empty());
}

TEST_CASE("refinement is transitive", "[analysis][property]")
{
    int nonvacuous = 0;
    auto bad = check_transitivity(2, nonvacuous);
    for (const auto& b : bad) UNSCOPED_INFO(b);
    CHECK(bad.empty());
    CHECK(nonvacuous > 0);
}

TEST_CASE("mutex refinement holds directly for small T", "[analysis]")
{
    const Definitions& m = corpus("mutex.pcsp");
    for (int n = 1; n <= 4; ++n) {
        Lts s = std_lts(m, "Spec", n), i = std_lts(m, "Impl", n);
        CHECK(refines_traces(s, i).holds);
        CHECK(refines_failures(s, i).holds);
    }
}

TEST_CASE("trace counterexamples are shortest", "[analysis]")
{
    const Definitions& m = corpus("mutex.pcsp");
    auto r = refines_traces(std_lts(m, "Spec", 2), std_lts(m, "AbstLiteral", 2));
    REQUIRE_FALSE(r.holds);
    CHECK(r.trace.size() == 1);
    REQUIRE(r.event);
    CHECK(r.str() == "trace <enterCS.0, leaveCS.1>");
}

TEST_CASE("failures counterexample for mixed selection and input", "[analysis]")
{
    const Definitions& x = corpus("ex511.pcsp");
    auto r = refines_failures(std_lts(x, "Spec", 3), std_lts(x, "Impl", 3));
    REQUIRE_FALSE(r.holds);
    CHECK(r.trace.empty());
    REQUIRE(r.refusal);
    CHECK(*r.refusal == std::set<Event>{ev("c", {0, 0}), ev("c", {1, 1}), ev("c", {2, 2})});
    CHECK(refines_traces(std_lts(x, "Spec", 3), std_lts(x, "Impl", 3)).holds);
}

TEST_CASE("bisimulation and divergence", "[analysis]")
{
    const Definitions& r = corpus("running.pcsp");
    Lts a = std_lts(r, "Loop", 2);
    CHECK(strong_bisim(a, a).bisimilar);
    auto b = strong_bisim(std_lts(r, "Slide", 2), std_lts(r, "Choice", 2));
    CHECK_FALSE(b.bisimilar);
    CHECK_FALSE(b.formula.empty());
    CHECK(divergence_free(std_lts(corpus("mutex.pcsp"), "Impl", 2)));
    Definitions d = parse_definitions("channel a\nP = a -> P\nQ = P \\ {| a |}\n");
    CHECK(divergence_free(std_lts(d, "P", 1)));
    CHECK_FALSE(divergence_free(std_lts(d, "Q", 1)));
}

TEST_CASE("normalised nodes are tau-closed and distinct", "[analysis]")
{
    Lts l = std_lts(corpus("running.pcsp"), "P", 2);
    auto n = normalise(l);
    CHECK(n.subsets[static_cast<std::size_t>(n.root)] == tau_closure(l, {l.root}));
    std::set<std::set<int>> seen;
    for (const auto& s : n.subsets) {
        CHECK(tau_closure(l, s) == s);
        CHECK(seen.insert(s).second);
    }
}

TEST_CASE("DOT export is stable", "[std]")
{
    Lts a = std_lts(corpus("running.pcsp"), "P", 2);
    Lts b = std_lts(corpus("running.pcsp"), "P", 2);
    CHECK(to_dot(a) == to_dot(b));
    CHECK(to_dot(a).rfind("digraph", 0) == 0);
}
