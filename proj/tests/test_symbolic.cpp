#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace pcsp;
using namespace pcsp::testing;

namespace {

Event ev(const std::string& c, std::vector<Value> vs) { return Event{c, std::move(vs)}; }
Value N(int v) { return Value::number(v); }
Value A(const std::string& a) { return Value::of_atom(a); }

SymbolicEvent sym(const std::string& c, std::vector<SymField> fs) { return SymbolicEvent{c, std::move(fs)}; }
SymField dollar(const std::string& v) { return {SymField::Kind::Dollar, v, {}, true}; }
SymField query(const std::string& v) { return {SymField::Kind::Query, v, {}, true}; }
SymField bangvar(const std::string& v) { return {SymField::Kind::BangVar, v, {}, true}; }
SymField bangval(Value v, bool is_t) { return {SymField::Kind::BangVal, {}, std::move(v), is_t}; }

SymbolicLabel vis(SymbolicEvent e)
{
    SymbolicLabel l;
    l.kind = SymbolicLabel::Kind::Vis;
    l.ev = std::move(e);
    return l;
}

SymbolicLabel cond(const std::string& a, const std::string& b, bool neg)
{
    SymbolicLabel l;
    l.kind = SymbolicLabel::Kind::Cond;
    l.cond = make_op(Expr::Op::Eq, {make_var(a, true), make_var(b, true)});
    l.negated = neg;
    return l;
}

}  // namespace

TEST_CASE("SSLTS of the running example", "[ssos]")
{
    Sslts s = build_sslts(corpus("running.pcsp"), "P");
    const auto& root = s.out[static_cast<std::size_t>(s.root)];
    REQUIRE(root.size() == 2);
    for (const auto& e : root) CHECK(s.label(e).kind == SymbolicLabel::Kind::Tau);

    std::multiset<std::string> vis_labels, conds;
    for (const auto& es : s.out)
        for (const auto& e : es) {
            const auto& l = s.label(e);
            if (l.is_vis()) vis_labels.insert(l.str());
            if (l.kind == SymbolicLabel::Kind::Cond) conds.insert(l.str());
        }
    CHECK(vis_labels == std::multiset<std::string>{"c!a$y:t?z:t", "c!b$y:t?z:t", "d!a", "d!b"});
    CHECK(conds == std::multiset<std::string>{"y == z", "y == z", "not (y == z)", "not (y == z)"});
    CHECK(s.violations.empty());
}

TEST_CASE("SSLTS of the mutex specification is a three-state cycle", "[ssos]")
{
    Sslts s = build_sslts(corpus("mutex.pcsp"), "Spec");
    CHECK(s.num_states() == 3);
    CHECK(s.num_edges() == 3);
}

TEST_CASE("SSLTS construction requires Seq", "[ssos]")
{
    CHECK_THROWS_AS(build_sslts(corpus("ex33.pcsp"), "RuleOne"), Diagnostic);
    CHECK_THROWS_AS(build_sslts(corpus("mutex.pcsp"), "Impl"), Diagnostic);
}

TEST_CASE("non-t equivalence of symbolic traces", "[ssos]")
{
    SymbolicTrace a{SymbolicLabel::tau(), vis(sym("c", {bangval(A("a"), false), dollar("y")}))};
    SymbolicTrace b{vis(sym("c", {bangval(A("a"), false), query("z")}))};
    SymbolicTrace c{vis(sym("c", {bangval(A("b"), false), query("z")}))};
    CHECK(nont_equiv(a, b));
    CHECK_FALSE(nont_equiv(a, c));
    CHECK_FALSE(nontau_equiv(a, b));
}

TEST_CASE("insts and match", "[cose]")
{
    auto e1 = sym("c", {bangvar("x"), query("y")});
    CHECK(insts(e1, {{"x", N(1)}}, 2) == std::set<Event>{ev("c", {N(1), N(0)}), ev("c", {N(1), N(1)})});
    CHECK(insts(e1, {}, 2).empty());

    auto e2 = sym("c", {dollar("y"), query("z")});
    CHECK(match(e2, ev("c", {N(0), N(1)})) == Env{{"y", N(0)}, {"z", N(1)}});
    CHECK_THROWS_AS(match(e2, ev("d", {N(0), N(1)})), Diagnostic);
    CHECK_THROWS_AS(match(e2, ev("c", {N(0)})), Diagnostic);

    auto e3 = sym("c", {bangvar("x"), bangval(A("a"), false)});
    CHECK(insts(e3, {{"x", N(2)}}, 3).size() == 1);
}

TEST_CASE("generates", "[cose]")
{
    CHECK(generates({}, {{"x", N(1)}}, {}, 2));
    auto e = sym("c", {bangval(A("a"), false), dollar("y"), query("z")});
    CHECK(generates({SymbolicLabel::tau(), vis(e)}, {}, {ev("c", {A("a"), N(0), N(1)})}, 2));
    CHECK_FALSE(generates({cond("y", "z", false)}, {{"y", N(0)}, {"z", N(1)}}, {}, 2));
    CHECK(generates({cond("y", "z", true)}, {{"y", N(0)}, {"z", N(1)}}, {}, 2));

    auto ws = generates_witnesses({vis(e), cond("y", "z", false)}, {}, {ev("c", {A("a"), N(1), N(1)})}, 2);
    REQUIRE(ws.size() == 1);
    CHECK(ws[0] == Env{{"y", N(1)}, {"z", N(1)}});
}

TEST_CASE("concretised STOP has one state", "[cose]")
{
    Definitions d = parse_definitions("S = STOP\n");
    CHECK(concretize(build_sslts(d, "S"), d, 2).num_states() == 1);
}

TEST_CASE("configuration LTS of the running example", "[cose]")
{
    const Definitions& d = corpus("running.pcsp");
    Lts c = concretize(build_sslts(d, "P"), d, 2);
    // d.a follows c.a.y.z exactly when y == z.
    for (int y = 0; y < 2; ++y)
        for (int z = 0; z < 2; ++z)
            CHECK(has_trace(c, {ev("c", {A("a"), N(y), N(z)}), ev("d", {A("a")})}) == (y == z));
    CHECK(strong_bisim(c, std_lts(d, "P", 2)).bisimilar);
}

TEST_CASE("standard and configuration semantics are bisimilar", "[cose][property]")
{
    auto bad = check_congruence({1, 2, 3});
    for (const auto& b : bad) UNSCOPED_INFO(b);
    CHECK(bad.empty());
}

TEST_CASE("regularity holds on SeqNorm processes", "[cose][property]")
{
    auto bad = check_regularity_seqnorm({2, 3});
    for (const auto& b : bad) UNSCOPED_INFO(b);
    CHECK(bad.empty());
}

TEST_CASE("regularity checks detect shared-channel internal choice", "[cose]")
{
    const Definitions& d = corpus("ex33.pcsp");
    const ProcP& body = d.proc("SharedSplit").body;
    auto same = check_regularity(concretize_term(body, d, 2, {{"x", N(0)}, {"y", N(0)}}));
    CHECK_FALSE(same.env_uniqueness.empty());
    CHECK_FALSE(same.unique_construct.empty());
    CHECK(check_regularity(concretize_term(body, d, 2, {{"x", N(0)}, {"y", N(1)}})).ok());
}

TEST_CASE("monotonicity check reports missing transitions", "[cose]")
{
    const Definitions& d = corpus("copy.pcsp");
    Sslts s = build_sslts(d, "COPY");
    Lts small = concretize(s, d, 2), big = concretize(s, d, 3);
    CHECK(check_monotonicity(small, big).empty());
    CHECK_FALSE(check_monotonicity(big, small).empty());
}

TEST_CASE("every concrete trace is generated by a symbolic trace", "[cose][property]")
{
    for (const auto& c : seq_cases()) {
        INFO(c.label());
        const Definitions& d = corpus(c.file);
        auto [root, env] = c.cose_root(2);
        Sslts s = build_sslts_term(root, d);
        auto sts = symbolic_traces(s, 10);
        for (const auto& tr : traces_of(concretize_term(root, d, 2, env), 2)) {
            bool found = std::any_of(sts.begin(), sts.end(),
                                     [&](const SymbolicTrace& st) { return generates(st, env, tr, 2); });
            INFO(format_trace(tr));
            CHECK(found);
        }
    }
}

TEST_CASE("resolving a selection renames a binder that is already free", "[cose]")
{
    // The selected x would overwrite the parameter x still needed by d.x.
    Definitions d = parse_definitions("channel c, d, e : t\nP(x : t) = c$x:t -> e!x -> STOP [] d.x -> STOP\n");
    const ProcP& body = d.proc("P").body;
    for (int n : {2, 3}) {
        Lts c = concretize_term(body, d, n, {{"x", N(0)}});
        Lts s = build_lts(instantiate(d, "P", {make_lit(N(0), true)}), d, n);
        CHECK(strong_bisim(c, s).bisimilar);
    }
}

TEST_CASE("unbound output variables are diagnosed", "[cose]")
{
    Definitions d = parse_definitions("channel e : t\nP(x : t) = e!x -> STOP\n");
    CHECK_THROWS_AS(concretize_term(d.proc("P").body, d, 2, {}), Diagnostic);
}
