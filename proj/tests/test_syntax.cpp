#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace pcsp;
using namespace pcsp::testing;

namespace {

Definitions parse(const std::string& s) { return parse_definitions(s, "test.pcsp"); }

const char* kHeader = "datatype X = a | b\nchannel c : X.t.t\nchannel d : X\nchannel e : t\n";

}  // namespace

TEST_CASE("every corpus file parses", "[parser]")
{
    for (const auto& f : corpus_files()) {
        INFO(f);
        const Definitions& d = corpus(f);
        CHECK_FALSE(d.proc_order.empty());
    }
}

TEST_CASE("print then parse is the identity on corpus ASTs", "[parser][property]")
{
    auto bad = check_roundtrip();
    for (const auto& b : bad) UNSCOPED_INFO(b);
    CHECK(bad.empty());
}

TEST_CASE("diagnostics carry file, line and column", "[parser]")
{
    try {
        parse(std::string(kHeader) + "P = d!a -> STOP\nQ = f!1 -> STOP\n");
        FAIL("expected a diagnostic");
    } catch (const Diagnostic& d) {
        CHECK(d.file == "test.pcsp");
        CHECK(d.loc.line == 6);
        CHECK(d.loc.col > 0);
    }
    CHECK_THROWS_AS(parse("channel c : t\nP = c?_x:t -> STOP\n"), Diagnostic);
    CHECK_THROWS_AS(parse("channel c : t\n P = STOP\n"), Diagnostic);
    CHECK_THROWS_AS(parse_file("/nonexistent/file.pcsp"), Diagnostic);
}

TEST_CASE("t positions are typed at parse time", "[parser]")
{
    Definitions d = parse(std::string(kHeader) + "P = c$x:X$y:t?z:t -> STOP\n");
    const Construct& c = d.proc("P").body->cons;
    REQUIRE(c.fields.size() == 3);
    CHECK_FALSE(c.fields[0].is_t);
    CHECK(c.fields[1].is_t);
    CHECK(c.fields[2].is_t);
    auto idx = classify_fields(c);
    CHECK(idx.dollar_nont == std::set<int>{1});
    CHECK(idx.dollar_t == std::set<int>{2});
    CHECK(idx.query_t == std::set<int>{3});
}

TEST_CASE("domains follow declaration order", "[syntax]")
{
    Definitions d = parse(std::string(kHeader) + "P = STOP\n");
    auto xs = domain_values(TypeExpr::named("X"), d, 3);
    REQUIRE(xs.size() == 2);
    CHECK(xs[0] == Value::of_atom("a"));
    CHECK(xs[1] == Value::of_atom("b"));
    auto ts = domain_values(TypeExpr::t_type(), d, 3);
    CHECK(ts == std::vector<Value>{Value::number(0), Value::number(1), Value::number(2)});
}

TEST_CASE("canonical keys identify alpha-equivalent terms", "[syntax]")
{
    Definitions d = parse(std::string(kHeader) + "P = e?x:t -> e!x -> STOP\nQ = e?y:t -> e!y -> STOP\n"
                                                 "R = e?y:t -> e!0 -> STOP\n");
    CHECK(canonical_key(d.proc("P").body) == canonical_key(d.proc("Q").body));
    CHECK(canonical_key(d.proc("P").body) != canonical_key(d.proc("R").body));
}

TEST_CASE("comms enumerates the events of a construct", "[syntax]")
{
    Definitions d = parse(std::string(kHeader) + "P = c!a?y:t?z:t -> STOP\n");
    auto es = comms(d.proc("P").body->cons, d, 2);
    CHECK(es.size() == 4);
    for (const auto& e : es) CHECK(e.vals[0] == Value::of_atom("a"));
}

TEST_CASE("bind_fields substitutes chosen selections into later fields", "[syntax]")
{
    Definitions d = parse("channel c : t.t\nP = c?x:t?y:{x} -> c!x!y -> STOP\n");
    ProcP p = bind_fields(d.proc("P").body, {{0, Value::number(1)}});
    CHECK(print_construct(p->cons).find("!1") != std::string::npos);
    CHECK(print_proc(p->kids[0]).find("c!1") != std::string::npos);
}

TEST_CASE("substitution avoids capture", "[syntax]")
{
    Definitions d = parse("channel e : t\nP(x : t) = e?y:t -> e!x -> STOP\n");
    ProcP body = d.proc("P").body;
    ProcP s = substitute(body, std::map<std::string, ExprP>{{"x", make_var("y", true)}});
    // The binder is renamed so the substituted y stays free.
    CHECK(free_vars(s) == std::set<std::string>{"y"});
}
