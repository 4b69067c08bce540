#include "pcsp/parser.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

namespace pcsp {

namespace {

enum class Tok { Ident, Int, Sym, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int num = 0;
    SourceLoc loc;
};

constexpr std::array<const char*, 40> kSymbols = {
    "|||", "|~|", "[[", "]]", "[]", "[>", "[|", "|]", "{|", "|}", "||", "->", "<-", "==", "!=", "<=", ">=", "..",
    "[",   "]",   "{",  "}",  "(",  ")",  ",",  ":",  ".",  "!",  "?",  "$",  "@",  "=",  "<",  ">",  "+",  "-",
    "%",   "|",   "&",  "\\"};

const std::set<std::string> kReserved = {"channel", "datatype", "nametype", "assert", "if",  "then", "else", "STOP",
                                         "and",     "or",       "not",      "true",   "false", "min", "max",  "t"};

std::vector<Token> lex(const std::string& text, const std::string& file)
{
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto advance = [&](size_t n) {
        for (size_t k = 0; k < n && i < text.size(); ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (text.compare(i, 2, "--") == 0) {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        if (text.compare(i, 2, "{-") == 0) {
            SourceLoc start{line, col};
            advance(2);
            while (i < text.size() && text.compare(i, 2, "-}") != 0) advance(1);
            if (i >= text.size()) throw Diagnostic(file, start, "unterminated block comment");
            advance(2);
            continue;
        }
        Token tok;
        tok.loc = {line, col};
        unsigned char uc = static_cast<unsigned char>(c);
        if (std::isalpha(uc) || c == '_') {
            if (c == '_') throw Diagnostic(file, tok.loc, "identifiers may not start with '_'");
            size_t j = i;
            while (j < text.size()) {
                unsigned char d = static_cast<unsigned char>(text[j]);
                if (std::isalnum(d) || d == '_' || d == '\'') ++j;
                else break;
            }
            tok.kind = Tok::Ident;
            tok.text = text.substr(i, j - i);
            advance(j - i);
            out.push_back(tok);
            continue;
        }
        if (std::isdigit(uc)) {
            size_t j = i;
            long long v = 0;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
                v = v * 10 + (text[j] - '0');
                if (v > 1000000) throw Diagnostic(file, tok.loc, "integer literal too large");
                ++j;
            }
            tok.kind = Tok::Int;
            tok.num = static_cast<int>(v);
            tok.text = text.substr(i, j - i);
            advance(j - i);
            out.push_back(tok);
            continue;
        }
        bool matched = false;
        for (const char* s : kSymbols) {
            size_t n = std::char_traits<char>::length(s);
            if (text.compare(i, n, s) == 0) {
                tok.kind = Tok::Sym;
                tok.text = s;
                advance(n);
                out.push_back(tok);
                matched = true;
                break;
            }
        }
        if (!matched) {
            std::ostringstream os;
            if (uc >= 32 && uc < 127) os << "unexpected character '" << c << "'";
            else os << "unexpected byte 0x" << std::hex << static_cast<int>(uc);
            throw Diagnostic(file, tok.loc, os.str());
        }
    }
    return out;
}

class Parser {
public:
    Parser(std::string file, std::vector<Token> toks) : file_(std::move(file)), toks_(std::move(toks))
    {
        defs_.file = file_;
    }

    Definitions run();

private:
    struct VarInfo {
        std::string name;
        bool is_t;
        std::string type;  // type name for non-t variables, may be empty
    };

    std::string file_;
    std::vector<Token> toks_;
    size_t pos_ = 0;
    size_t end_ = 0;
    Definitions defs_;
    std::map<std::string, std::string> atom_type_;  // datatype member -> type
    std::vector<VarInfo> scope_;
    int depth_ = 0;

    // ---- token helpers
    const Token& peek(size_t k = 0) const
    {
        static const Token end_tok;
        size_t p = pos_ + k;
        return p < end_ ? toks_[p] : end_tok;
    }
    SourceLoc here() const
    {
        if (pos_ < end_) return toks_[pos_].loc;
        if (end_ > 0 && end_ <= toks_.size()) {
            SourceLoc l = toks_[end_ - 1].loc;
            l.col += static_cast<int>(toks_[end_ - 1].text.size());
            return l;
        }
        return {1, 1};
    }
    bool is_sym(const char* s, size_t k = 0) const
    {
        const Token& t = peek(k);
        return t.kind == Tok::Sym && t.text == s;
    }
    bool is_kw(const char* s, size_t k = 0) const
    {
        const Token& t = peek(k);
        return t.kind == Tok::Ident && t.text == s;
    }
    [[noreturn]] void fail(const std::string& msg) const { throw Diagnostic(file_, here(), msg); }
    [[noreturn]] void fail_at(SourceLoc l, const std::string& msg) const { throw Diagnostic(file_, l, msg); }
    std::string describe() const
    {
        const Token& t = peek();
        if (t.kind == Tok::End) return "end of declaration";
        return "'" + t.text + "'";
    }
    void expect_sym(const char* s)
    {
        if (!is_sym(s)) fail(std::string("expected '") + s + "', found " + describe());
        ++pos_;
    }
    void expect_kw(const char* s)
    {
        if (!is_kw(s)) fail(std::string("expected '") + s + "', found " + describe());
        ++pos_;
    }
    std::string expect_ident(const char* what)
    {
        const Token& t = peek();
        if (t.kind != Tok::Ident || kReserved.count(t.text))
            fail(std::string("expected ") + what + ", found " + describe());
        ++pos_;
        return t.text;
    }

    struct Guard {
        Parser& p;
        explicit Guard(Parser& pp) : p(pp)
        {
            if (++p.depth_ > 400) p.fail("nesting too deep");
        }
        ~Guard() { --p.depth_; }
    };

    // ---- scope helpers
    const VarInfo* lookup(const std::string& n) const
    {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
            if (it->name == n) return &*it;
        return nullptr;
    }
    void check_binder(const std::string& n, SourceLoc l) const
    {
        if (defs_.channels.count(n) || defs_.procs.count(n) || defs_.types.count(n) || atom_type_.count(n))
            fail_at(l, "variable '" + n + "' clashes with a declared name");
    }

    // ---- declarations
    void collect_types(size_t b, size_t e);
    void collect_channel(size_t b, size_t e);
    void collect_header(size_t b, size_t e);
    void parse_body(size_t b, size_t e);
    void parse_assert(size_t b, size_t e);
    TypeExpr parse_decl_type();

    // ---- processes
    ProcP proc0();
    ProcP proc1();
    ProcP proc2();
    ProcP proc3();
    ProcP proc4();
    ProcP proc5();
    ProcP atom();
    ProcP replicated(PK kind);
    Construct construct();
    EventSetExpr event_set();
    TypeExpr annotation(bool t_pos, const TypeExpr& sig_ty);

    // ---- expressions
    ExprP expr();
    ExprP or_expr();
    ExprP and_expr();
    ExprP not_expr();
    ExprP cmp_expr();
    ExprP add_expr();
    ExprP mul_expr();
    ExprP primary();
    ExprP typed_at(ExprP e, const TypeExpr& ty, SourceLoc l);
    bool starts_expr() const;
};

ExprP retype(const ExprP& e, bool t)
{
    if (e->op != Expr::Op::Lit || e->t == t) return e;
    auto c = std::make_shared<Expr>(*e);
    c->t = t;
    return c;
}

// ------------------------------------------------------------ driver

Definitions Parser::run()
{
    // Split into declarations at column-1 tokens.
    std::vector<std::pair<size_t, size_t>> groups;
    for (size_t i = 0; i < toks_.size(); ++i) {
        if (toks_[i].loc.col == 1 || i == 0) {
            if (toks_[i].loc.col != 1) throw Diagnostic(file_, toks_[i].loc, "declarations must start in column 1");
            groups.emplace_back(i, toks_.size());
            if (groups.size() > 1) groups[groups.size() - 2].second = i;
        }
    }
    auto head = [&](const std::pair<size_t, size_t>& g) { return toks_[g.first]; };
    for (const auto& g : groups) {
        const Token& h = head(g);
        if (h.kind == Tok::Ident && (h.text == "datatype" || h.text == "nametype")) collect_types(g.first, g.second);
    }
    for (const auto& g : groups)
        if (head(g).kind == Tok::Ident && head(g).text == "channel") collect_channel(g.first, g.second);
    for (const auto& g : groups) {
        const Token& h = head(g);
        if (h.kind == Tok::Ident && (h.text == "channel" || h.text == "datatype" || h.text == "nametype" ||
                                     h.text == "assert"))
            continue;
        collect_header(g.first, g.second);
    }
    for (const auto& g : groups) {
        const Token& h = head(g);
        if (h.kind == Tok::Ident && h.text == "assert") parse_assert(g.first, g.second);
        else if (!(h.kind == Tok::Ident && (h.text == "channel" || h.text == "datatype" || h.text == "nametype")))
            parse_body(g.first, g.second);
    }
    return std::move(defs_);
}

void Parser::collect_types(size_t b, size_t e)
{
    pos_ = b;
    end_ = e;
    bool numeric = is_kw("nametype");
    ++pos_;
    SourceLoc l = here();
    std::string name = expect_ident("type name");
    if (defs_.types.count(name) || defs_.channels.count(name)) fail_at(l, "duplicate declaration of '" + name + "'");
    expect_sym("=");
    TypeDecl td;
    td.name = name;
    td.numeric = numeric;
    if (numeric) {
        expect_sym("{");
        if (peek().kind != Tok::Int) fail("expected integer, found " + describe());
        int lo = peek().num;
        ++pos_;
        expect_sym("..");
        if (peek().kind != Tok::Int) fail("expected integer, found " + describe());
        int hi = peek().num;
        ++pos_;
        expect_sym("}");
        if (hi < lo) fail_at(l, "empty range in nametype '" + name + "'");
        if (hi - lo > 10000) fail_at(l, "range too large in nametype '" + name + "'");
        for (int v = lo; v <= hi; ++v) td.values.push_back(Value::number(v));
    } else {
        while (true) {
            SourceLoc ml = here();
            std::string m = expect_ident("datatype member");
            if (atom_type_.count(m)) fail_at(ml, "duplicate datatype member '" + m + "'");
            atom_type_[m] = name;
            td.values.push_back(Value::of_atom(m));
            if (!is_sym("|")) break;
            ++pos_;
        }
    }
    if (pos_ != end_) fail("unexpected " + describe());
    defs_.types[name] = td;
    defs_.type_order.push_back(name);
}

TypeExpr Parser::parse_decl_type()
{
    if (is_kw("t")) {
        ++pos_;
        return TypeExpr::t_type();
    }
    SourceLoc l = here();
    std::string n = expect_ident("type");
    if (!defs_.types.count(n)) fail_at(l, "unknown type '" + n + "'");
    return TypeExpr::named(n);
}

void Parser::collect_channel(size_t b, size_t e)
{
    pos_ = b + 1;
    end_ = e;
    std::vector<std::pair<std::string, SourceLoc>> names;
    while (true) {
        SourceLoc l = here();
        names.emplace_back(expect_ident("channel name"), l);
        if (!is_sym(",")) break;
        ++pos_;
    }
    std::vector<TypeExpr> sig;
    if (is_sym(":")) {
        ++pos_;
        sig.push_back(parse_decl_type());
        while (is_sym(".")) {
            ++pos_;
            sig.push_back(parse_decl_type());
        }
    }
    if (pos_ != end_) fail("unexpected " + describe());
    for (const auto& [n, l] : names) {
        if (defs_.channels.count(n) || defs_.types.count(n) || atom_type_.count(n))
            fail_at(l, "duplicate declaration of '" + n + "'");
        defs_.channels[n] = ChannelDecl{n, sig, l};
        defs_.channel_order.push_back(n);
    }
}

void Parser::collect_header(size_t b, size_t e)
{
    pos_ = b;
    end_ = e;
    SourceLoc l = here();
    std::string name = expect_ident("process name or declaration keyword");
    if (defs_.procs.count(name)) fail_at(l, "duplicate definition of '" + name + "'");
    if (defs_.channels.count(name) || defs_.types.count(name) || atom_type_.count(name))
        fail_at(l, "process name '" + name + "' clashes with a declaration");
    ProcDef d;
    d.name = name;
    d.loc = l;
    if (is_sym("(")) {
        ++pos_;
        while (true) {
            SourceLoc pl = here();
            Param p;
            p.name = expect_ident("parameter name");
            if (defs_.channels.count(p.name) || defs_.types.count(p.name) || atom_type_.count(p.name))
                fail_at(pl, "parameter '" + p.name + "' clashes with a declared name");
            for (const auto& q : d.params)
                if (q.name == p.name) fail_at(pl, "duplicate parameter '" + p.name + "'");
            expect_sym(":");
            p.type = parse_decl_type();
            d.params.push_back(p);
            if (!is_sym(",")) break;
            ++pos_;
        }
        expect_sym(")");
    }
    expect_sym("=");
    defs_.procs[name] = d;
    defs_.proc_order.push_back(name);
}

void Parser::parse_body(size_t b, size_t e)
{
    pos_ = b;
    end_ = e;
    std::string name = toks_[b].text;
    // Skip the header already collected.
    while (!is_sym("=")) ++pos_;
    ++pos_;
    ProcDef& d = defs_.procs.at(name);
    scope_.clear();
    for (const auto& p : d.params)
        scope_.push_back({p.name, p.type.kind == TypeKind::T, p.type.kind == TypeKind::Named ? p.type.name : ""});
    ProcP body = proc0();
    if (pos_ != end_) fail("unexpected " + describe() + " after process body");
    d.body = body;
}

void Parser::parse_assert(size_t b, size_t e)
{
    pos_ = b + 1;
    end_ = e;
    Assertion a;
    SourceLoc l = here();
    a.spec = expect_ident("specification process");
    if (!defs_.procs.count(a.spec)) fail_at(l, "unknown process '" + a.spec + "'");
    expect_sym("[");
    if (is_kw("T")) a.model = Model::Traces;
    else if (is_kw("F")) a.model = Model::Failures;
    else fail("expected 'T' or 'F' in refinement assertion");
    ++pos_;
    expect_sym("=");
    l = here();
    a.impl = expect_ident("implementation process");
    if (!defs_.procs.count(a.impl)) fail_at(l, "unknown process '" + a.impl + "'");
    if (pos_ != end_) fail("unexpected " + describe());
    defs_.assertions.push_back(a);
}

// ------------------------------------------------------------ processes

ProcP Parser::proc0()
{
    Guard g(*this);
    ProcP p = proc1();
    while (is_sym("\\")) {
        SourceLoc l = here();
        ++pos_;
        auto q = std::make_shared<Proc>();
        q->kind = PK::Hide;
        q->loc = l;
        q->kids = {p};
        q->set = event_set();
        p = q;
    }
    return p;
}

ProcP Parser::proc1()
{
    ProcP p = proc2();
    while (true) {
        SourceLoc l = here();
        auto q = std::make_shared<Proc>();
        q->loc = l;
        if (is_sym("|||")) {
            ++pos_;
            q->kind = PK::Inter;
        } else if (is_sym("[|")) {
            ++pos_;
            q->kind = PK::SPar;
            q->set = event_set();
            expect_sym("|]");
        } else if (is_sym("[")) {
            ++pos_;
            q->kind = PK::APar;
            q->set = event_set();
            expect_sym("||");
            q->set2 = event_set();
            expect_sym("]");
        } else {
            return p;
        }
        q->kids = {p, proc2()};
        p = q;
    }
}

ProcP Parser::proc2()
{
    ProcP p = proc3();
    while (is_sym("|~|")) {
        SourceLoc l = here();
        ++pos_;
        auto q = std::make_shared<Proc>();
        q->kind = PK::Int;
        q->loc = l;
        q->kids = {p, proc3()};
        p = q;
    }
    return p;
}

ProcP Parser::proc3()
{
    ProcP p = proc4();
    while (is_sym("[>")) {
        SourceLoc l = here();
        ++pos_;
        auto q = std::make_shared<Proc>();
        q->kind = PK::Slide;
        q->loc = l;
        q->kids = {p, proc4()};
        p = q;
    }
    return p;
}

ProcP Parser::proc4()
{
    ProcP p = proc5();
    while (is_sym("[]")) {
        SourceLoc l = here();
        ++pos_;
        auto q = std::make_shared<Proc>();
        q->kind = PK::Ext;
        q->loc = l;
        q->kids = {p, proc5()};
        p = q;
    }
    return p;
}

bool Parser::starts_expr() const
{
    const Token& t = peek();
    if (t.kind == Tok::Int) return true;
    if (t.kind == Tok::Sym) return t.text == "(";
    if (t.kind != Tok::Ident) return false;
    if (t.text == "not" || t.text == "true" || t.text == "false" || t.text == "min" || t.text == "max") return true;
    if (kReserved.count(t.text)) return false;
    return !defs_.channels.count(t.text) && !defs_.procs.count(t.text);
}

ProcP Parser::proc5()
{
    Guard g(*this);
    SourceLoc l = here();
    if (is_kw("if")) {
        ++pos_;
        ExprP c = expr();
        expect_kw("then");
        ProcP a = proc0();
        expect_kw("else");
        ProcP b = proc0();
        auto q = std::make_shared<Proc>(*make_if(c, a, b));
        q->loc = l;
        return q;
    }
    if (is_sym("|||") && peek(1).kind == Tok::Ident && is_sym(":", 2)) return replicated(PK::ReplInter);
    if (is_sym("||")) return replicated(PK::ReplAPar);
    if (is_sym("|~|")) return replicated(PK::ReplInt);
    if (is_sym("[]")) return replicated(PK::ReplExt);
    const Token& t = peek();
    if (t.kind == Tok::Ident && defs_.channels.count(t.text) && !lookup(t.text)) {
        size_t mark = scope_.size();
        Construct c = construct();
        expect_sym("->");
        ProcP cont = proc5();
        scope_.resize(mark);
        return make_prefix(std::move(c), cont);
    }
    if (starts_expr()) {
        size_t save = pos_;
        ExprP cond;
        try {
            cond = expr();
        } catch (const Diagnostic&) {
            cond = nullptr;
        }
        if (cond && is_sym("&")) {
            ++pos_;
            ProcP body = proc5();
            auto q = std::make_shared<Proc>(*make_if(cond, body, make_stop()));
            q->loc = l;
            return q;
        }
        pos_ = save;
    }
    return atom();
}

ProcP Parser::atom()
{
    SourceLoc l = here();
    ProcP p;
    if (is_kw("STOP")) {
        ++pos_;
        auto q = std::make_shared<Proc>();
        q->loc = l;
        p = q;
    } else if (is_sym("(")) {
        ++pos_;
        p = proc0();
        expect_sym(")");
    } else if (peek().kind == Tok::Ident && defs_.procs.count(peek().text)) {
        std::string name = peek().text;
        ++pos_;
        const ProcDef& d = defs_.procs.at(name);
        std::vector<ExprP> args;
        if (is_sym("(")) {
            ++pos_;
            while (true) {
                SourceLoc al = here();
                ExprP a = expr();
                if (args.size() < d.params.size()) a = typed_at(a, d.params[args.size()].type, al);
                args.push_back(a);
                if (!is_sym(",")) break;
                ++pos_;
            }
            expect_sym(")");
        }
        if (args.size() != d.params.size())
            fail_at(l, "process '" + name + "' expects " + std::to_string(d.params.size()) + " arguments, got " +
                           std::to_string(args.size()));
        auto q = std::make_shared<Proc>(*make_call(name, std::move(args)));
        q->loc = l;
        p = q;
    } else if (peek().kind == Tok::Ident && !kReserved.count(peek().text) && !lookup(peek().text) &&
               !atom_type_.count(peek().text)) {
        fail("unknown process or channel '" + peek().text + "'");
    } else {
        fail("expected process, found " + describe());
    }
    while (is_sym("[[")) {
        SourceLoc rl = here();
        ++pos_;
        auto q = std::make_shared<Proc>();
        q->kind = PK::Rename;
        q->loc = rl;
        q->kids = {p};
        while (true) {
            SourceLoc al = here();
            std::string a = expect_ident("channel");
            expect_sym("<-");
            SourceLoc bl = here();
            std::string b = expect_ident("channel");
            if (!defs_.channels.count(a)) fail_at(al, "undeclared channel '" + a + "'");
            if (!defs_.channels.count(b)) fail_at(bl, "undeclared channel '" + b + "'");
            const auto& sa = defs_.channels.at(a).sig;
            const auto& sb = defs_.channels.at(b).sig;
            bool same = sa.size() == sb.size();
            for (size_t i = 0; same && i < sa.size(); ++i) same = sa[i].kind == sb[i].kind && sa[i].name == sb[i].name;
            if (!same) fail_at(al, "renaming '" + a + "' to '" + b + "' changes the channel signature");
            q->renames.emplace_back(a, b);
            if (!is_sym(",")) break;
            ++pos_;
        }
        expect_sym("]]");
        p = q;
    }
    return p;
}

TypeExpr Parser::annotation(bool t_pos, const TypeExpr& sig_ty)
{
    SourceLoc l = here();
    auto elems = [&]() {
        std::vector<ExprP> out;
        expect_sym("{");
        if (!is_sym("}")) {
            while (true) {
                SourceLoc el = here();
                out.push_back(typed_at(expr(), sig_ty, el));
                if (!is_sym(",")) break;
                ++pos_;
            }
        }
        expect_sym("}");
        return out;
    };
    if (is_sym("(") && is_kw("t", 1)) {
        ++pos_;
        ++pos_;
        expect_sym("-");
        TypeExpr ty{TypeKind::TMinus, {}, elems()};
        expect_sym(")");
        if (!t_pos) fail_at(l, "t-subset annotation at a non-t position");
        return ty;
    }
    if (is_kw("t")) {
        ++pos_;
        if (!t_pos) fail_at(l, "annotation t at a non-t position");
        if (is_sym("-") && is_sym("{", 1)) {
            ++pos_;
            return TypeExpr{TypeKind::TMinus, {}, elems()};
        }
        return TypeExpr::t_type();
    }
    if (is_sym("{")) return TypeExpr{TypeKind::Set, {}, elems()};
    std::string n = expect_ident("type annotation");
    if (!defs_.types.count(n)) fail_at(l, "unknown type '" + n + "'");
    if (t_pos) fail_at(l, "non-t annotation '" + n + "' at a t position");
    if (sig_ty.kind == TypeKind::Named && sig_ty.name != n)
        fail_at(l, "annotation '" + n + "' does not match channel type '" + sig_ty.name + "'");
    return TypeExpr::named(n);
}

Construct Parser::construct()
{
    Construct c;
    c.loc = here();
    c.channel = peek().text;
    ++pos_;
    const ChannelDecl& cd = defs_.channels.at(c.channel);
    while (is_sym("$") || is_sym("?") || is_sym("!") || is_sym(".")) {
        SourceLoc l = here();
        std::string s = peek().text;
        ++pos_;
        size_t k = c.fields.size();
        if (k >= cd.sig.size())
            fail_at(l, "channel '" + c.channel + "' has " + std::to_string(cd.sig.size()) + " fields");
        const TypeExpr& sty = cd.sig[k];
        bool t_pos = sty.kind == TypeKind::T;
        Field f;
        f.is_t = t_pos;
        if (s == "$" || s == "?") {
            f.sel = s == "$" ? Sel::Dollar : Sel::Query;
            SourceLoc vl = here();
            f.var = expect_ident("variable");
            check_binder(f.var, vl);
            if (is_sym(":")) {
                ++pos_;
                f.ann = annotation(t_pos, sty);
            } else {
                f.ann = sty;
            }
            scope_.push_back({f.var, t_pos, t_pos ? "" : sty.name});
        } else {
            f.sel = Sel::Bang;
            f.expr = typed_at(primary(), sty, l);
        }
        c.fields.push_back(std::move(f));
    }
    if (c.fields.size() != cd.sig.size())
        fail_at(c.loc, "channel '" + c.channel + "' expects " + std::to_string(cd.sig.size()) + " fields, got " +
                           std::to_string(c.fields.size()));
    // Binders stay in scope for the continuation; proc5 pops them.
    return c;
}

EventSetExpr Parser::event_set()
{
    EventSetExpr s;
    bool closure;
    if (is_sym("{|")) closure = true;
    else if (is_sym("{")) closure = false;
    else fail("expected event set, found " + describe());
    ++pos_;
    const char* close = closure ? "|}" : "}";
    if (!is_sym(close)) {
        while (true) {
            SourceLoc l = here();
            EventSetItem it;
            it.closure = closure;
            it.channel = expect_ident("channel");
            if (!defs_.channels.count(it.channel)) fail_at(l, "undeclared channel '" + it.channel + "'");
            const auto& sig = defs_.channels.at(it.channel).sig;
            while (is_sym(".")) {
                ++pos_;
                SourceLoc el = here();
                if (it.prefix.size() >= sig.size()) fail_at(el, "too many fields for channel '" + it.channel + "'");
                it.prefix.push_back(typed_at(primary(), sig[it.prefix.size()], el));
            }
            if (!closure && it.prefix.size() != sig.size())
                fail_at(l, "event '" + it.channel + "' in an explicit set needs all " + std::to_string(sig.size()) +
                               " fields");
            s.items.push_back(std::move(it));
            if (!is_sym(",")) break;
            ++pos_;
        }
    }
    expect_sym(close);
    return s;
}

ProcP Parser::replicated(PK kind)
{
    SourceLoc l = here();
    ++pos_;
    SourceLoc vl = here();
    std::string var = expect_ident("index variable");
    check_binder(var, vl);
    expect_sym(":");
    TypeExpr dom;
    SourceLoc dl = here();
    if (is_kw("t") || (is_sym("(") && is_kw("t", 1))) {
        dom = annotation(true, TypeExpr::t_type());
    } else if (is_sym("{")) {
        dom = annotation(false, TypeExpr::null());
    } else {
        std::string n = expect_ident("type");
        if (!defs_.types.count(n)) fail_at(dl, "unknown type '" + n + "'");
        dom = TypeExpr::named(n);
    }
    bool is_t = dom.kind == TypeKind::T || dom.kind == TypeKind::TMinus;
    if (dom.kind == TypeKind::Set) {
        is_t = false;
        for (const auto& e : dom.elems) is_t = is_t || e->t;
    }
    expect_sym("@");
    size_t mark = scope_.size();
    scope_.push_back({var, is_t, dom.kind == TypeKind::Named ? dom.name : ""});
    auto q = std::make_shared<Proc>();
    q->kind = kind;
    q->loc = l;
    q->var = var;
    q->dom = dom;
    if (kind == PK::ReplAPar) {
        expect_sym("[");
        q->set = event_set();
        expect_sym("]");
    }
    ProcP body = proc0();
    scope_.resize(mark);
    q->kids = {body};

    // Choices over finite non-t domains are sugar for the binary operators.
    bool sugar = (kind == PK::ReplExt || kind == PK::ReplInt) && !is_t;
    if (!sugar) return q;
    std::vector<Value> vals;
    try {
        vals = domain_values(dom, defs_, 0);
    } catch (const Diagnostic& d) {
        fail_at(dl, d.message);
    }
    if (vals.empty()) {
        if (kind == PK::ReplInt) fail_at(l, "replicated internal choice over an empty set");
        auto s = std::make_shared<Proc>();
        s->loc = l;
        return s;
    }
    ProcP acc;
    for (const auto& v : vals) {
        ProcP inst = substitute(body, std::map<std::string, Value>{{var, v}});
        if (!acc) {
            acc = inst;
            continue;
        }
        auto b = std::make_shared<Proc>(*make_binary(kind == PK::ReplExt ? PK::Ext : PK::Int, acc, inst));
        b->loc = l;
        acc = b;
    }
    return acc;
}

// ------------------------------------------------------------ expressions

ExprP Parser::typed_at(ExprP e, const TypeExpr& ty, SourceLoc l)
{
    bool t_pos = ty.kind == TypeKind::T;
    if (e->op == Expr::Op::Lit) {
        if (t_pos && e->lit.is_atom()) fail_at(l, "value '" + e->lit.atom + "' at a t position");
        if (ty.kind == TypeKind::Named) {
            auto vals = defs_.type_values(ty.name);
            if (std::find(vals.begin(), vals.end(), e->lit) == vals.end())
                fail_at(l, "value '" + e->lit.str() + "' is not in type " + ty.name);
        }
        return retype(e, t_pos);
    }
    if (e->op == Expr::Op::Var && ty.kind != TypeKind::Null && e->t != t_pos)
        fail_at(l, "variable '" + e->name + "' has the wrong type for this position");
    return e;
}

ExprP Parser::expr()
{
    Guard g(*this);
    return or_expr();
}

ExprP Parser::or_expr()
{
    ExprP e = and_expr();
    while (is_kw("or")) {
        SourceLoc l = here();
        ++pos_;
        e = make_op(Expr::Op::Or, {e, and_expr()}, l);
    }
    return e;
}

ExprP Parser::and_expr()
{
    ExprP e = not_expr();
    while (is_kw("and")) {
        SourceLoc l = here();
        ++pos_;
        e = make_op(Expr::Op::And, {e, not_expr()}, l);
    }
    return e;
}

ExprP Parser::not_expr()
{
    if (is_kw("not")) {
        Guard g(*this);
        SourceLoc l = here();
        ++pos_;
        return make_op(Expr::Op::Not, {not_expr()}, l);
    }
    return cmp_expr();
}

ExprP Parser::cmp_expr()
{
    ExprP a = add_expr();
    static const std::map<std::string, Expr::Op> ops = {{"==", Expr::Op::Eq}, {"!=", Expr::Op::Ne},
                                                        {"<", Expr::Op::Lt},  {"<=", Expr::Op::Le},
                                                        {">", Expr::Op::Gt},  {">=", Expr::Op::Ge}};
    if (peek().kind != Tok::Sym || !ops.count(peek().text)) return a;
    SourceLoc l = here();
    Expr::Op op = ops.at(peek().text);
    ++pos_;
    ExprP b = add_expr();
    if (a->op == Expr::Op::Var && b->op == Expr::Op::Var && a->name == b->name)
        fail_at(l, "trivial condition on '" + a->name + "'");
    // A literal compared with a t term is a t constant.
    if (a->t && !b->t) b = retype(b, true);
    if (b->t && !a->t) a = retype(a, true);
    if ((a->op == Expr::Op::Lit && a->lit.is_atom() && b->t) || (b->op == Expr::Op::Lit && b->lit.is_atom() && a->t))
        fail_at(l, "comparison of a t term with a non-t value");
    return make_op(op, {a, b}, l);
}

ExprP Parser::add_expr()
{
    ExprP e = mul_expr();
    while (is_sym("+") || is_sym("-")) {
        SourceLoc l = here();
        Expr::Op op = is_sym("+") ? Expr::Op::Add : Expr::Op::Sub;
        ++pos_;
        e = make_op(op, {e, mul_expr()}, l);
    }
    return e;
}

ExprP Parser::mul_expr()
{
    ExprP e = primary();
    while (is_sym("%")) {
        SourceLoc l = here();
        ++pos_;
        e = make_op(Expr::Op::Mod, {e, primary()}, l);
    }
    return e;
}

ExprP Parser::primary()
{
    Guard g(*this);
    SourceLoc l = here();
    const Token& t = peek();
    if (t.kind == Tok::Int) {
        ++pos_;
        return make_lit(Value::number(t.num), false, l);
    }
    if (is_sym("(")) {
        ++pos_;
        ExprP e = expr();
        expect_sym(")");
        return e;
    }
    if (t.kind != Tok::Ident) fail("expected expression, found " + describe());
    if (t.text == "true" || t.text == "false") {
        ++pos_;
        auto e = std::make_shared<Expr>(*make_bool(t.text == "true"));
        e->loc = l;
        return e;
    }
    if (t.text == "min" || t.text == "max") {
        Expr::Op op = t.text == "min" ? Expr::Op::Min : Expr::Op::Max;
        ++pos_;
        expect_sym("(");
        ExprP a = expr();
        expect_sym(",");
        ExprP b = expr();
        expect_sym(")");
        return make_op(op, {a, b}, l);
    }
    if (kReserved.count(t.text)) fail("expected expression, found " + describe());
    std::string n = t.text;
    ++pos_;
    if (const VarInfo* v = lookup(n)) return make_var(n, v->is_t, l);
    if (atom_type_.count(n)) return make_lit(Value::of_atom(n), false, l);
    fail_at(l, "unknown identifier '" + n + "'");
}

}  // namespace

Definitions parse_definitions(const std::string& text, const std::string& file)
{
    Parser p(file, lex(text, file));
    return p.run();
}

Definitions parse_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Diagnostic(path, {0, 0}, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_definitions(ss.str(), path);
}

}  // namespace pcsp
