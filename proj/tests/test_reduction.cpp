#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <functional>

using namespace pcsp;
using namespace pcsp::testing;

namespace {

Value N(int v) { return Value::number(v); }
Event ev(const std::string& c, std::vector<int> vs)
{
    Event e{c, {}};
    for (int v : vs) e.vals.push_back(N(v));
    return e;
}

// Independent threshold oracle: enumerate root paths of the SSLTS, group
// paths ending in a visible label by the non-t projection of their visible
// labels, and take the largest union of t output positions of the last label.
int thresh_traces_oracle(const Sslts& s, std::size_t maxlen)
{
    std::map<std::vector<std::string>, std::set<int>> groups;
    std::function<void(int, std::vector<std::string>&, std::size_t)> walk = [&](int u, std::vector<std::string>& proj,
                                                                                 std::size_t len) {
        if (len == maxlen) return;
        for (const auto& e : s.out[static_cast<std::size_t>(u)]) {
            const auto& l = s.label(e);
            if (!l.is_vis()) {
                walk(e.dst, proj, len + 1);
                continue;
            }
            proj.push_back(nont_projection(l.ev));
            auto& g = groups[proj];
            for (std::size_t i = 0; i < l.ev.fields.size(); ++i) {
                const auto& f = l.ev.fields[i];
                if (f.is_t && f.kind == SymField::Kind::BangVar) g.insert(static_cast<int>(i) + 1);
            }
            walk(e.dst, proj, len + 1);
            proj.pop_back();
        }
    };
    std::vector<std::string> proj;
    walk(s.root, proj, 0);
    std::size_t best = 0;
    for (const auto& [k, g] : groups) best = std::max(best, g.size());
    return static_cast<int>(best);
}

// Largest number of t outputs in a single prefix construct reachable from `name`.
int max_construct_outputs(const Definitions& d, const std::string& name)
{
    int best = 0;
    std::function<void(const ProcP&)> walk = [&](const ProcP& p) {
        if (p->kind == PK::Prefix) {
            int k = 0;
            for (const auto& f : p->cons.fields)
                if (f.sel == Sel::Bang && f.is_t) ++k;
            best = std::max(best, k);
        }
        for (const auto& kid : p->kids) walk(kid);
    };
    for (const auto& n : reachable_defs(name, d)) walk(d.proc(n).body);
    return best;
}

bool has_t_conditional(const Definitions& d, const std::string& name)
{
    bool found = false;
    std::function<void(const ProcP&)> walk = [&](const ProcP& p) {
        if (p->kind == PK::If && p->cond && p->cond->op != Expr::Op::True) {
            std::function<bool(const ExprP&)> has_t = [&](const ExprP& e) {
                if (e->t) return true;
                return std::any_of(e->args.begin(), e->args.end(), has_t);
            };
            if (has_t(p->cond)) found = true;
        }
        for (const auto& kid : p->kids) walk(kid);
    };
    for (const auto& n : reachable_defs(name, d)) walk(d.proc(n).body);
    return found;
}

}  // namespace

TEST_CASE("collapsing function", "[reduction]")
{
    const Definitions& d = corpus("bigprops.pcsp");
    Collapse phi{1};
    CHECK(phi.apply(N(0)) == N(0));
    CHECK(phi.apply(N(2)) == N(1));
    CHECK(phi.apply(Value::of_atom("a")) == Value::of_atom("a"));
    CHECK(phi.apply(d, Trace{ev("c", {0, 1, 2})}) == Trace{ev("c", {0, 1, 1})});
    CHECK(phi.inverse(d, 3, ev("d", {1})) == std::set<Event>{ev("d", {1}), ev("d", {2})});
    CHECK(phi.inverse(d, 3, ev("d", {0})) == std::set<Event>{ev("d", {0})});
    CHECK(phi.apply(Env{{"x", N(2)}, {"y", N(0)}}) == Env{{"x", N(1)}, {"y", N(0)}});
}

TEST_CASE("collapsing leaves non-t fields alone", "[reduction]")
{
    const Definitions& d = corpus("running.pcsp");
    Collapse phi{1};
    Event e{"c", {Value::of_atom("b"), N(3), N(0)}};
    CHECK(phi.apply(d, e) == Event{"c", {Value::of_atom("b"), N(1), N(0)}});
}

TEST_CASE("collapsing is idempotent on corpus alphabets", "[reduction][property]")
{
    auto bad = check_phi_idempotence(4);
    for (const auto& b : bad) UNSCOPED_INFO(b);
    CHECK(bad.empty());
}

TEST_CASE("traces thresholds", "[reduction]")
{
    CHECK(thresh_traces(build_sslts(corpus("mutex.pcsp"), "Spec")).value == 1);
    CHECK(thresh_traces(build_sslts(corpus("traces-count.pcsp"), "P")).value == 2);
    CHECK(thresh_traces(build_sslts(corpus("traces-count.pcsp"), "Q")).value == 1);
    Definitions stop = parse_definitions("S = STOP\n");
    CHECK(thresh_traces(build_sslts(stop, "S")).value == 0);
}

TEST_CASE("traces threshold agrees with the enumeration oracle", "[reduction]")
{
    for (const auto& c : seq_cases()) {
        if (!c.seqnorm) continue;
        INFO(c.label());
        auto [root, env] = c.cose_root(2);
        Sslts s = build_sslts_term(root, corpus(c.file));
        CHECK(thresh_traces(s).value == thresh_traces_oracle(s, 12));
    }
}

TEST_CASE("failures thresholds", "[reduction]")
{
    CHECK(thresh_failures(corpus("mutex.pcsp"), "Spec").value == 1);
    CHECK(thresh_failures(corpus("copy.pcsp"), "COPY").value == 1);
    Definitions stop = parse_definitions("S = STOP\n");
    CHECK(thresh_failures(stop, "S").value == 0);
    CHECK_THROWS_AS(thresh_failures(corpus("ex511.pcsp"), "Spec"), Diagnostic);
    CHECK_THROWS_AS(thresh_failures(corpus("ex33.pcsp"), "SeqNormShared"), Diagnostic);
}

TEST_CASE("failures threshold counts distinct outputs and all inputs", "[reduction]")
{
    Definitions d = parse_definitions(
        "channel a : t.t\nchannel b : t\nchannel i : t\n"
        "P = i?x:t -> (a!x!x -> STOP [] b!x -> STOP)\n"
        "Q = i?x:t -> (a?y:t?z:t -> STOP [] b!x -> STOP)\n");
    CHECK(thresh_traces(build_sslts(d, "P")).value == 2);
    CHECK(thresh_failures(d, "P").value == 2);
    CHECK(thresh_failures(d, "Q").value == 3);
}

TEST_CASE("failures threshold never falls below the traces threshold", "[reduction][property]")
{
    for (const auto& c : seq_cases()) {
        const Definitions& d = corpus(c.file);
        if (!c.seqnorm || !check_no_mixed_inputs(c.name, d).passed()) continue;
        INFO(c.label());
        auto [root, env] = c.cose_root(2);
        Sslts s = build_sslts_term(root, d);
        CHECK(thresh_failures_sslts(s).value >= thresh_traces(s).value);
    }
}

TEST_CASE("conditional-free thresholds equal the widest output construct", "[reduction][property]")
{
    int checked = 0;
    for (const auto& c : seq_cases()) {
        const Definitions& d = corpus(c.file);
        if (!c.seqnorm || has_t_conditional(d, c.name)) continue;
        INFO(c.label());
        auto [root, env] = c.cose_root(2);
        CHECK(thresh_traces(build_sslts_term(root, d)).value == max_construct_outputs(d, c.name));
        ++checked;
    }
    CHECK(checked >= 5);
}

TEST_CASE("collapsed refinement for mixed selection and input", "[reduction]")
{
    const Definitions& x = corpus("ex511.pcsp");
    Collapse phi{1};
    Lts full_spec = std_lts(x, "Spec", 3), impl = std_lts(x, "Impl", 3);
    CHECK(refines_failures(std_lts(x, "Spec", 2), phi.apply(x, impl)).holds);
    CHECK_FALSE(refines_failures(full_spec, impl).holds);
}

TEST_CASE("collapsed refinement for selection with a non-t input", "[reduction]")
{
    const Definitions& y = corpus("ex512.pcsp");
    Collapse phi{1};
    Lts impl = std_lts(y, "Impl", 4);
    CHECK(refines_failures(std_lts(y, "Spec", 2), phi.apply(y, impl)).holds);
    auto r = refines_failures(std_lts(y, "Spec", 4), impl);
    CHECK_FALSE(r.holds);
    CHECK(r.trace.empty());
}

TEST_CASE("mutex via abstraction in both models", "[reduction]")
{
    const Definitions& m = corpus("mutex.pcsp");
    for (Model md : {Model::Traces, Model::Failures}) {
        PmcpOptions o;
        o.spec = "Spec";
        o.impl = "Impl";
        o.abst = "Abst";
        o.valid_from = 3;
        o.model = md;
        o.sizes = {1, 2, 3, 4, 5};
        auto v = verify_pmcp(m, o);
        CHECK(v.hypotheses_ok);
        CHECK(v.B == 1);
        REQUIRE(v.abst_check);
        CHECK(v.abst_check->holds);
        CHECK(v.all_hold());
        CHECK(v.conclusion.find("for all #T >= 3") != std::string::npos);
        for (const auto& s : v.sizes) CHECK(s.check == (s.n < 3 ? "direct" : "premise"));
        auto j = v.to_json();
        CHECK(j["mode"] == "via-abstraction");
        CHECK(j["B"] == 1);
        CHECK(j["sizes"].size() == 5);
    }
}

TEST_CASE("literal abstraction with anonymous identities is rejected", "[reduction]")
{
    PmcpOptions o;
    o.spec = "Spec";
    o.impl = "Impl";
    o.abst = "AbstLiteral";
    o.valid_from = 3;
    o.sizes = {3};
    auto v = verify_pmcp(corpus("mutex.pcsp"), o);
    REQUIRE(v.abst_check);
    CHECK_FALSE(v.abst_check->holds);
    CHECK_FALSE(v.all_hold());
    CHECK(v.conclusion.find("for all") == std::string::npos);
}

TEST_CASE("direct mode uses collapsed checks above B", "[reduction]")
{
    PmcpOptions o;
    o.spec = "Spec";
    o.impl = "Impl";
    o.model = Model::Failures;
    o.sizes = {1, 2, 3};
    auto v = verify_pmcp(corpus("mutex.pcsp"), o);
    REQUIRE(v.sizes.size() == 3);
    CHECK(v.sizes[0].check == "direct");
    CHECK(v.sizes[1].check == "collapsed");
    CHECK(v.all_hold());
}

TEST_CASE("failed hypothesis downgrades the verdict", "[reduction]")
{
    PmcpOptions o;
    o.spec = "Spec";
    o.impl = "Impl";
    o.model = Model::Failures;
    o.sizes = {3};
    auto v = verify_pmcp(corpus("ex511.pcsp"), o);
    CHECK_FALSE(v.hypotheses_ok);
    CHECK_FALSE(v.B);
    REQUIRE(v.sizes.size() == 1);
    CHECK(v.sizes[0].check == "direct");
    CHECK_FALSE(v.sizes[0].holds);
    CHECK(v.sizes[0].counterexample == "failure (<>, {c.0.0, c.1.1, c.2.2})");
}

TEST_CASE("user-asserted symmetry is spot checked", "[reduction]")
{
    PmcpOptions o;
    o.spec = "Spec";
    o.impl = "Impl";
    o.model = Model::Traces;
    o.sizes = {2, 3};
    o.assume_typesym = true;
    auto v = verify_pmcp(corpus("ex511.pcsp"), o);
    bool logged = std::any_of(v.caveats.begin(), v.caveats.end(),
                              [](const std::string& c) { return c.find("asserted by the user") != std::string::npos; });
    CHECK(logged);
    CHECK(v.all_hold());
}

TEST_CASE("collapsed refinement implies direct refinement on mutex", "[reduction][property]")
{
    const Definitions& m = corpus("mutex.pcsp");
    Collapse phi{1};
    for (Model md : {Model::Traces, Model::Failures}) {
        Lts spec_hat = std_lts(m, "Spec", 2);
        for (int n = 2; n <= 4; ++n) {
            Lts impl = std_lts(m, "Impl", n);
            bool collapsed = refines(spec_hat, phi.apply(m, impl), md).holds;
            CHECK(collapsed);
            if (collapsed) CHECK(refines(std_lts(m, "Spec", n), impl, md).holds);
        }
    }
}

TEST_CASE("trace and failure membership claims", "[reduction]")
{
    auto cases = bigprop_cases(corpus("bigprops.pcsp"));
    REQUIRE(cases.size() == 8);
    for (const auto& c : cases) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.actual == c.expected);
        CHECK(c.detail.find("premise (ii) fails") == std::string::npos);
    }
}
