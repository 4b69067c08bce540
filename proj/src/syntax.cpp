#include "pcsp/syntax.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace pcsp {

namespace {

std::string located(const std::string& file, SourceLoc loc, const std::string& msg)
{
    std::ostringstream os;
    os << (file.empty() ? "<input>" : file) << ':' << loc.line << ':' << loc.col << ": " << msg;
    return os.str();
}

}  // namespace

Diagnostic::Diagnostic(std::string f, SourceLoc l, const std::string& msg)
    : std::runtime_error(located(f, l, msg)), file(std::move(f)), loc(l), message(msg)
{
}

Diagnostic::Diagnostic(const std::string& msg) : std::runtime_error(msg), message(msg) {}

// ---------------------------------------------------------------- values

Value Value::number(int n)
{
    Value v;
    v.num = n;
    return v;
}

Value Value::of_atom(std::string a)
{
    Value v;
    v.kind = Kind::Atom;
    v.atom = std::move(a);
    return v;
}

std::string Value::str() const { return is_atom() ? atom : std::to_string(num); }

std::strong_ordering operator<=>(const Value& a, const Value& b)
{
    if (a.kind != b.kind) return a.kind == Value::Kind::Num ? std::strong_ordering::less : std::strong_ordering::greater;
    if (a.is_atom()) return a.atom <=> b.atom;
    return a.num <=> b.num;
}

std::string Event::str() const
{
    std::string s = channel;
    for (const auto& v : vals) s += "." + v.str();
    return s;
}

std::strong_ordering operator<=>(const Event& a, const Event& b)
{
    if (auto c = a.channel <=> b.channel; c != 0) return c;
    return std::lexicographical_compare_three_way(a.vals.begin(), a.vals.end(), b.vals.begin(), b.vals.end());
}

// ----------------------------------------------------------- expressions

ExprP make_var(std::string name, bool is_t, SourceLoc loc)
{
    auto e = std::make_shared<Expr>();
    e->op = Expr::Op::Var;
    e->name = std::move(name);
    e->t = is_t;
    e->loc = loc;
    return e;
}

ExprP make_lit(Value v, bool is_t, SourceLoc loc)
{
    auto e = std::make_shared<Expr>();
    e->op = Expr::Op::Lit;
    e->lit = std::move(v);
    e->t = is_t;
    e->loc = loc;
    return e;
}

ExprP make_op(Expr::Op op, std::vector<ExprP> args, SourceLoc loc)
{
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->args = std::move(args);
    e->loc = loc;
    switch (op) {
    case Expr::Op::Add: case Expr::Op::Sub: case Expr::Op::Mod: case Expr::Op::Min: case Expr::Op::Max:
        for (const auto& a : e->args) e->t = e->t || a->t;
        break;
    default:
        break;
    }
    return e;
}

ExprP make_bool(bool b)
{
    auto e = std::make_shared<Expr>();
    e->op = b ? Expr::Op::True : Expr::Op::False;
    return e;
}

std::set<std::string> free_vars(const ExprP& e)
{
    std::set<std::string> out;
    std::function<void(const Expr&)> go = [&](const Expr& x) {
        if (x.op == Expr::Op::Var) out.insert(x.name);
        for (const auto& a : x.args) go(*a);
    };
    if (e) go(*e);
    return out;
}

bool is_closed(const ExprP& e) { return free_vars(e).empty(); }

ExprP subst_expr(const ExprP& e, const std::map<std::string, ExprP>& m)
{
    if (!e || m.empty()) return e;
    if (e->op == Expr::Op::Var) {
        auto it = m.find(e->name);
        if (it == m.end()) return e;
        const ExprP& r = it->second;
        if (r->t == e->t) return r;
        auto copy = std::make_shared<Expr>(*r);
        copy->t = e->t;
        return copy;
    }
    if (e->args.empty()) return e;
    bool changed = false;
    std::vector<ExprP> args;
    args.reserve(e->args.size());
    for (const auto& a : e->args) {
        args.push_back(subst_expr(a, m));
        changed = changed || args.back() != a;
    }
    if (!changed) return e;
    auto copy = std::make_shared<Expr>(*e);
    copy->args = std::move(args);
    return copy;
}

namespace {

int num_of(const Value& v)
{
    if (v.is_atom()) throw Diagnostic("arithmetic on non-numeric value '" + v.atom + "'");
    return v.num;
}

bool truth(const Value& v) { return !v.is_atom() && v.num != 0; }

}  // namespace

Value eval(const ExprP& e)
{
    using Op = Expr::Op;
    auto arg = [&](size_t i) { return eval(e->args.at(i)); };
    switch (e->op) {
    case Op::Var:
        throw Diagnostic("", e->loc, "unbound variable '" + e->name + "'");
    case Op::Lit: return e->lit;
    case Op::True: return Value::number(1);
    case Op::False: return Value::number(0);
    case Op::Add: return Value::number(num_of(arg(0)) + num_of(arg(1)));
    case Op::Sub: return Value::number(num_of(arg(0)) - num_of(arg(1)));
    case Op::Mod: {
        int m = num_of(arg(1));
        if (m == 0) throw Diagnostic("", e->loc, "modulus by zero");
        int r = num_of(arg(0)) % m;
        return Value::number(r < 0 ? r + m : r);
    }
    case Op::Min: return Value::number(std::min(num_of(arg(0)), num_of(arg(1))));
    case Op::Max: return Value::number(std::max(num_of(arg(0)), num_of(arg(1))));
    case Op::Eq: return Value::number(arg(0) == arg(1));
    case Op::Ne: return Value::number(arg(0) != arg(1));
    case Op::Lt: return Value::number(num_of(arg(0)) < num_of(arg(1)));
    case Op::Le: return Value::number(num_of(arg(0)) <= num_of(arg(1)));
    case Op::Gt: return Value::number(num_of(arg(0)) > num_of(arg(1)));
    case Op::Ge: return Value::number(num_of(arg(0)) >= num_of(arg(1)));
    case Op::And: return Value::number(truth(arg(0)) && truth(arg(1)));
    case Op::Or: return Value::number(truth(arg(0)) || truth(arg(1)));
    case Op::Not: return Value::number(!truth(arg(0)));
    }
    return Value::number(0);
}

namespace {

const char* op_text(Expr::Op op)
{
    using Op = Expr::Op;
    switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mod: return "%";
    case Op::Eq: return "==";
    case Op::Ne: return "!=";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::And: return "and";
    case Op::Or: return "or";
    default: return "?";
    }
}

}  // namespace

std::string print_expr(const ExprP& e)
{
    using Op = Expr::Op;
    switch (e->op) {
    case Op::Var: return e->name;
    case Op::Lit: return e->lit.str();
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Not: return "not (" + print_expr(e->args[0]) + ")";
    case Op::Min: return "min(" + print_expr(e->args[0]) + ", " + print_expr(e->args[1]) + ")";
    case Op::Max: return "max(" + print_expr(e->args[0]) + ", " + print_expr(e->args[1]) + ")";
    default: break;
    }
    auto side = [](const ExprP& a) {
        bool atomic = a->op == Op::Var || a->op == Op::Lit || a->op == Op::True || a->op == Op::False ||
                      a->op == Op::Min || a->op == Op::Max;
        return atomic ? print_expr(a) : "(" + print_expr(a) + ")";
    };
    return side(e->args[0]) + " " + op_text(e->op) + " " + side(e->args[1]);
}

// ------------------------------------------------------------ constructs

IndexSets classify_fields(const Construct& a)
{
    IndexSets s;
    for (size_t i = 0; i < a.fields.size(); ++i) {
        const Field& f = a.fields[i];
        int k = static_cast<int>(i) + 1;
        switch (f.sel) {
        case Sel::Dollar: (f.is_t ? s.dollar_t : s.dollar_nont).insert(k); break;
        case Sel::Query: (f.is_t ? s.query_t : s.query_nont).insert(k); break;
        case Sel::Bang: (f.is_t ? s.bang_t : s.bang_nont).insert(k); break;
        }
    }
    return s;
}

Construct replace_selections(const Construct& a, Scope scope)
{
    Construct out = a;
    for (auto& f : out.fields) {
        if (f.sel != Sel::Dollar) continue;
        bool hit = scope == Scope::Both || (scope == Scope::T) == f.is_t;
        if (!hit) continue;
        f.sel = Sel::Bang;
        f.expr = make_var(f.var, f.is_t, a.loc);
        f.var.clear();
        f.ann = TypeExpr::null();
    }
    return out;
}

// ----------------------------------------------------------- definitions

const ProcDef& Definitions::proc(const std::string& name) const
{
    auto it = procs.find(name);
    if (it == procs.end()) throw Diagnostic("unknown process '" + name + "'");
    return it->second;
}

const ChannelDecl& Definitions::channel(const std::string& name) const
{
    auto it = channels.find(name);
    if (it == channels.end()) throw Diagnostic("undeclared channel '" + name + "'");
    return it->second;
}

std::vector<Value> Definitions::type_values(const std::string& name) const
{
    auto it = types.find(name);
    if (it == types.end()) throw Diagnostic("unknown type '" + name + "'");
    return it->second.values;
}

std::vector<Value> domain_values(const TypeExpr& ty, const Definitions& defs, int tsize)
{
    std::vector<Value> out;
    switch (ty.kind) {
    case TypeKind::T:
        for (int i = 0; i < tsize; ++i) out.push_back(Value::number(i));
        return out;
    case TypeKind::Named:
        return defs.type_values(ty.name);
    case TypeKind::Set: {
        std::set<Value> s;
        for (const auto& e : ty.elems) s.insert(eval(e));
        return {s.begin(), s.end()};
    }
    case TypeKind::TMinus: {
        std::set<Value> drop;
        for (const auto& e : ty.elems) drop.insert(eval(e));
        for (int i = 0; i < tsize; ++i)
            if (!drop.count(Value::number(i))) out.push_back(Value::number(i));
        return out;
    }
    case TypeKind::Null:
        break;
    }
    throw Diagnostic("null type has no values");
}

// ------------------------------------------------------------ term builders

ProcP make_stop() { return std::make_shared<Proc>(); }

ProcP make_prefix(Construct c, ProcP cont)
{
    auto p = std::make_shared<Proc>();
    p->kind = PK::Prefix;
    p->loc = c.loc;
    p->cons = std::move(c);
    p->kids = {std::move(cont)};
    return p;
}

ProcP make_binary(PK k, ProcP l, ProcP r)
{
    auto p = std::make_shared<Proc>();
    p->kind = k;
    p->kids = {std::move(l), std::move(r)};
    return p;
}

ProcP make_if(ExprP cond, ProcP then_p, ProcP else_p)
{
    auto p = std::make_shared<Proc>();
    p->kind = PK::If;
    p->cond = std::move(cond);
    p->kids = {std::move(then_p), std::move(else_p)};
    return p;
}

ProcP make_call(std::string name, std::vector<ExprP> args)
{
    auto p = std::make_shared<Proc>();
    p->kind = PK::Call;
    p->name = std::move(name);
    p->args = std::move(args);
    return p;
}

// ------------------------------------------------------------ free variables

namespace {

void type_fv(const TypeExpr& t, const std::set<std::string>& bound, std::set<std::string>& out)
{
    for (const auto& e : t.elems)
        for (const auto& v : free_vars(e))
            if (!bound.count(v)) out.insert(v);
}

void set_fv(const EventSetExpr& s, const std::set<std::string>& bound, std::set<std::string>& out)
{
    for (const auto& it : s.items)
        for (const auto& e : it.prefix)
            for (const auto& v : free_vars(e))
                if (!bound.count(v)) out.insert(v);
}

void expr_fv(const ExprP& e, const std::set<std::string>& bound, std::set<std::string>& out)
{
    for (const auto& v : free_vars(e))
        if (!bound.count(v)) out.insert(v);
}

void proc_fv(const Proc& p, std::set<std::string>& bound, std::set<std::string>& out)
{
    switch (p.kind) {
    case PK::Stop: return;
    case PK::Prefix: {
        std::vector<std::string> added;
        for (const auto& f : p.cons.fields) {
            if (f.sel == Sel::Bang) {
                expr_fv(f.expr, bound, out);
            } else {
                type_fv(f.ann, bound, out);
                if (bound.insert(f.var).second) added.push_back(f.var);
            }
        }
        proc_fv(*p.kids[0], bound, out);
        for (const auto& v : added) bound.erase(v);
        return;
    }
    case PK::If:
        expr_fv(p.cond, bound, out);
        break;
    case PK::Call:
        for (const auto& a : p.args) expr_fv(a, bound, out);
        return;
    case PK::Hide: case PK::SPar:
        set_fv(p.set, bound, out);
        break;
    case PK::APar:
        set_fv(p.set, bound, out);
        set_fv(p.set2, bound, out);
        break;
    case PK::ReplAPar: case PK::ReplInter: case PK::ReplInt: case PK::ReplExt: {
        type_fv(p.dom, bound, out);
        bool added = bound.insert(p.var).second;
        set_fv(p.set, bound, out);
        proc_fv(*p.kids[0], bound, out);
        if (added) bound.erase(p.var);
        return;
    }
    default:
        break;
    }
    for (const auto& k : p.kids) proc_fv(*k, bound, out);
}

}  // namespace

std::set<std::string> free_vars(const ProcP& p)
{
    std::set<std::string> bound, out;
    proc_fv(*p, bound, out);
    return out;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& used)
{
    std::string n = base + "'";
    while (used.count(n)) n += "'";
    return n;
}

// ------------------------------------------------------------ substitution

namespace {

using ExprMap = std::map<std::string, ExprP>;

std::set<std::string> range_fv(const ExprMap& m)
{
    std::set<std::string> out;
    for (const auto& [k, e] : m)
        for (const auto& v : free_vars(e)) out.insert(v);
    return out;
}

TypeExpr subst_type(const TypeExpr& t, const ExprMap& m)
{
    if (t.elems.empty()) return t;
    TypeExpr out = t;
    for (auto& e : out.elems) e = subst_expr(e, m);
    return out;
}

EventSetExpr subst_set(const EventSetExpr& s, const ExprMap& m)
{
    EventSetExpr out = s;
    for (auto& it : out.items)
        for (auto& e : it.prefix) e = subst_expr(e, m);
    return out;
}

ProcP subst_proc(const ProcP& p, ExprMap m);

// Removes `var` from m as it becomes bound; renames it when the substituted
// range would otherwise be captured.  Returns the binder name to use.
std::string enter_binder(const std::string& var, bool is_t, ExprMap& m, const std::set<std::string>& rest_fv)
{
    m.erase(var);
    if (m.empty()) return var;
    auto rfv = range_fv(m);
    if (!rfv.count(var)) return var;
    // Capture only matters if some substituted variable occurs in the scope.
    bool used = false;
    for (const auto& [k, e] : m)
        if (rest_fv.count(k)) used = true;
    if (!used) return var;
    std::set<std::string> avoid = rfv;
    avoid.insert(rest_fv.begin(), rest_fv.end());
    avoid.insert(var);
    std::string nn = fresh_name(var, avoid);
    m[var] = make_var(nn, is_t);
    return nn;
}

ProcP subst_proc(const ProcP& p, ExprMap m)
{
    if (m.empty()) return p;
    auto fv = free_vars(p);
    for (auto it = m.begin(); it != m.end();) {
        if (!fv.count(it->first)) it = m.erase(it);
        else ++it;
    }
    if (m.empty()) return p;

    auto q = std::make_shared<Proc>(*p);
    switch (p->kind) {
    case PK::Stop: return p;
    case PK::Prefix: {
        auto& fields = q->cons.fields;
        for (size_t i = 0; i < fields.size(); ++i) {
            Field& f = fields[i];
            if (f.sel == Sel::Bang) {
                f.expr = subst_expr(f.expr, m);
                continue;
            }
            f.ann = subst_type(f.ann, m);
            // Free variables of the rest of the construct and the continuation.
            std::set<std::string> rest;
            {
                Construct tail;
                tail.channel = p->cons.channel;
                tail.fields.assign(fields.begin() + static_cast<long>(i) + 1, fields.end());
                auto tp = make_prefix(tail, p->kids[0]);
                rest = free_vars(tp);
            }
            f.var = enter_binder(f.var, f.is_t, m, rest);
        }
        q->kids[0] = subst_proc(p->kids[0], m);
        return q;
    }
    case PK::If:
        q->cond = subst_expr(p->cond, m);
        break;
    case PK::Call:
        for (auto& a : q->args) a = subst_expr(a, m);
        return q;
    case PK::Hide: case PK::SPar:
        q->set = subst_set(p->set, m);
        break;
    case PK::APar:
        q->set = subst_set(p->set, m);
        q->set2 = subst_set(p->set2, m);
        break;
    case PK::ReplAPar: case PK::ReplInter: case PK::ReplInt: case PK::ReplExt: {
        q->dom = subst_type(p->dom, m);
        std::set<std::string> rest = free_vars(p->kids[0]);
        std::set<std::string> bound;
        set_fv(p->set, bound, rest);
        bool is_t = p->dom.kind == TypeKind::T || p->dom.kind == TypeKind::TMinus;
        q->var = enter_binder(p->var, is_t, m, rest);
        q->set = subst_set(p->set, m);
        q->kids[0] = subst_proc(p->kids[0], m);
        return q;
    }
    default:
        break;
    }
    for (auto& k : q->kids) k = subst_proc(k, m);
    return q;
}

}  // namespace

ProcP substitute(const ProcP& p, const std::map<std::string, ExprP>& m) { return subst_proc(p, m); }

ProcP substitute(const ProcP& p, const std::map<std::string, Value>& m)
{
    ExprMap em;
    for (const auto& [k, v] : m) em[k] = make_lit(v, false);
    return subst_proc(p, em);
}

// ------------------------------------------------------ keys and dumps

namespace {

struct KeyWriter {
    bool canonical;
    bool with_types;  // include t flags and locations-free detail for dumps
    std::vector<std::pair<std::string, std::string>> scope;
    std::string out;

    std::string name_of(const std::string& v) const
    {
        for (auto it = scope.rbegin(); it != scope.rend(); ++it)
            if (it->first == v) return it->second;
        return v;
    }

    std::string bind(const std::string& v)
    {
        std::string n = canonical ? "_" + std::to_string(scope.size()) : v;
        scope.emplace_back(v, n);
        return n;
    }

    void expr(const ExprP& e)
    {
        using Op = Expr::Op;
        switch (e->op) {
        case Op::Var: out += name_of(e->name); break;
        case Op::Lit: out += e->lit.is_atom() ? "'" + e->lit.atom : "#" + std::to_string(e->lit.num); break;
        case Op::True: out += "true"; break;
        case Op::False: out += "false"; break;
        default:
            out += "(";
            out += std::to_string(static_cast<int>(e->op));
            for (const auto& a : e->args) {
                out += " ";
                expr(a);
            }
            out += ")";
        }
        if (with_types && e->t) out += "^t";
    }

    void type(const TypeExpr& t)
    {
        switch (t.kind) {
        case TypeKind::T: out += "t"; break;
        case TypeKind::Named: out += t.name; break;
        case TypeKind::Null: out += "null"; break;
        case TypeKind::Set: case TypeKind::TMinus:
            out += t.kind == TypeKind::Set ? "{" : "t-{";
            for (const auto& e : t.elems) {
                expr(e);
                out += ",";
            }
            out += "}";
        }
    }

    void set(const EventSetExpr& s)
    {
        out += "{";
        for (const auto& it : s.items) {
            out += it.closure ? "|" : "=";
            out += it.channel;
            for (const auto& e : it.prefix) {
                out += ".";
                expr(e);
            }
            out += ",";
        }
        out += "}";
    }

    void proc(const Proc& p)
    {
        size_t depth = scope.size();
        switch (p.kind) {
        case PK::Stop: out += "STOP"; return;
        case PK::Prefix:
            out += "(-> " + p.cons.channel;
            for (const auto& f : p.cons.fields) {
                if (f.sel == Sel::Bang) {
                    out += " !";
                    expr(f.expr);
                } else {
                    out += f.sel == Sel::Dollar ? " $" : " ?";
                    std::string tmp;
                    std::swap(tmp, out);
                    type(f.ann);
                    std::swap(tmp, out);
                    out += bind(f.var) + ":" + tmp;
                }
                if (with_types && f.is_t) out += "^t";
            }
            out += " ";
            proc(*p.kids[0]);
            out += ")";
            scope.resize(depth);
            return;
        case PK::Call:
            out += "(call " + p.name;
            for (const auto& a : p.args) {
                out += " ";
                expr(a);
            }
            out += ")";
            return;
        case PK::ReplAPar: case PK::ReplInter: case PK::ReplInt: case PK::ReplExt:
            out += "(R" + std::to_string(static_cast<int>(p.kind)) + " ";
            type(p.dom);
            out += " " + bind(p.var) + " ";
            set(p.set);
            out += " ";
            proc(*p.kids[0]);
            out += ")";
            scope.resize(depth);
            return;
        default:
            break;
        }
        out += "(" + std::to_string(static_cast<int>(p.kind));
        if (p.kind == PK::If) {
            out += " ";
            expr(p.cond);
        }
        if (p.kind == PK::Hide || p.kind == PK::SPar || p.kind == PK::APar) {
            out += " ";
            set(p.set);
        }
        if (p.kind == PK::APar) {
            out += " ";
            set(p.set2);
        }
        if (p.kind == PK::Rename)
            for (const auto& [a, b] : p.renames) out += " " + a + "<-" + b;
        for (const auto& k : p.kids) {
            out += " ";
            proc(*k);
        }
        out += ")";
    }
};

}  // namespace

std::string canonical_key(const ProcP& p)
{
    KeyWriter w{true, false, {}, {}};
    w.proc(*p);
    return std::move(w.out);
}

std::string dump(const ProcP& p)
{
    KeyWriter w{false, true, {}, {}};
    w.proc(*p);
    return std::move(w.out);
}

ProcP alpha_canonical(const ProcP& p)
{
    // Rename every binder to its binding depth; free variables are untouched.
    std::function<ProcP(const ProcP&, int)> go = [&](const ProcP& q, int depth) -> ProcP {
        auto r = std::make_shared<Proc>(*q);
        switch (q->kind) {
        case PK::Stop: return q;
        case PK::Prefix: {
            Construct c = q->cons;
            ProcP cont = q->kids[0];
            for (size_t i = 0; i < c.fields.size(); ++i) {
                Field& f = c.fields[i];
                if (f.sel == Sel::Bang) continue;
                std::string nn = "_" + std::to_string(depth++);
                if (nn == f.var) continue;
                ExprMap m{{f.var, make_var(nn, f.is_t)}};
                for (size_t j = i + 1; j < c.fields.size(); ++j) {
                    Field& g = c.fields[j];
                    if (g.sel == Sel::Bang) g.expr = subst_expr(g.expr, m);
                    else g.ann = subst_type(g.ann, m);
                }
                // Later binders of the same name shadow; substitute stops there.
                bool shadowed = false;
                for (size_t j = i + 1; j < c.fields.size(); ++j)
                    if (c.fields[j].sel != Sel::Bang && c.fields[j].var == f.var) shadowed = true;
                if (!shadowed) cont = subst_proc(cont, m);
                f.var = nn;
            }
            r->cons = c;
            r->kids[0] = go(cont, depth);
            return r;
        }
        case PK::ReplAPar: case PK::ReplInter: case PK::ReplInt: case PK::ReplExt: {
            std::string nn = "_" + std::to_string(depth);
            bool is_t = q->dom.kind == TypeKind::T || q->dom.kind == TypeKind::TMinus;
            ExprMap m{{q->var, make_var(nn, is_t)}};
            r->var = nn;
            r->set = subst_set(q->set, m);
            r->kids[0] = go(subst_proc(q->kids[0], m), depth + 1);
            return r;
        }
        default:
            for (auto& k : r->kids) k = go(k, depth);
            return r;
        }
    };
    return go(p, 0);
}

// ------------------------------------------------------------ channels

std::set<std::string> channels(const ProcP& p, const Definitions& defs)
{
    std::set<std::string> out;
    std::set<std::string> visiting;
    bool cycle = false;
    std::function<void(const Proc&)> go = [&](const Proc& q) {
        switch (q.kind) {
        case PK::Stop: return;
        case PK::Prefix: out.insert(q.cons.channel); return;
        case PK::Call:
            if (visiting.count(q.name)) {
                cycle = true;
                return;
            }
            visiting.insert(q.name);
            go(*defs.proc(q.name).body);
            return;
        default:
            for (const auto& k : q.kids) go(*k);
        }
    };
    go(*p);
    if (cycle && out.empty())
        throw Diagnostic(defs.file, p->loc, "unguarded recursion: identifier cycle with no prefix");
    return out;
}

// ------------------------------------------------------------ comms

void for_each_tuple(const std::vector<std::vector<Value>>& doms, const std::function<void(const std::vector<Value>&)>& f)
{
    std::vector<Value> cur(doms.size());
    std::function<void(size_t)> rec = [&](size_t i) {
        if (i == doms.size()) {
            f(cur);
            return;
        }
        for (const auto& v : doms[i]) {
            cur[i] = v;
            rec(i + 1);
        }
    };
    rec(0);
}

std::set<Event> comms(const Construct& a, const Definitions& defs, int tsize)
{
    for (const auto& f : a.fields)
        if (f.sel == Sel::Dollar) throw Diagnostic(defs.file, a.loc, "comms: construct has nondeterministic selections");
    std::set<Event> out;
    std::function<void(size_t, Event&, ExprMap&)> rec = [&](size_t i, Event& ev, ExprMap& m) {
        if (i == a.fields.size()) {
            out.insert(ev);
            return;
        }
        const Field& f = a.fields[i];
        if (f.sel == Sel::Bang) {
            ev.vals.push_back(eval(subst_expr(f.expr, m)));
            rec(i + 1, ev, m);
            ev.vals.pop_back();
            return;
        }
        TypeExpr ann = subst_type(f.ann, m);
        for (const auto& v : domain_values(ann, defs, tsize)) {
            ExprMap m2 = m;
            m2[f.var] = make_lit(v, f.is_t);
            ev.vals.push_back(v);
            rec(i + 1, ev, m2);
            ev.vals.pop_back();
        }
    };
    Event ev{a.channel, {}};
    ExprMap m;
    rec(0, ev, m);
    return out;
}

std::vector<Construct> comms_nont(const Construct& a, const Definitions& defs)
{
    for (const auto& f : a.fields)
        if (f.sel == Sel::Dollar && !f.is_t)
            throw Diagnostic(defs.file, a.loc, "comms_nont: construct has non-t nondeterministic selections");
    std::vector<Construct> out;
    std::function<void(size_t, Construct&, ExprMap&)> rec = [&](size_t i, Construct& c, ExprMap& m) {
        if (i == a.fields.size()) {
            out.push_back(c);
            return;
        }
        Field f = a.fields[i];
        if (f.sel == Sel::Bang) {
            f.expr = subst_expr(f.expr, m);
            if (!f.is_t && is_closed(f.expr)) f.expr = make_lit(eval(f.expr), false, f.expr->loc);
            c.fields.push_back(f);
            rec(i + 1, c, m);
            c.fields.pop_back();
            return;
        }
        if (f.is_t) {
            f.ann = subst_type(f.ann, m);
            ExprMap m2 = m;
            m2.erase(f.var);
            c.fields.push_back(f);
            rec(i + 1, c, m2);
            c.fields.pop_back();
            return;
        }
        for (const auto& v : domain_values(subst_type(f.ann, m), defs, 0)) {
            ExprMap m2 = m;
            m2[f.var] = make_lit(v, false);
            Field g;
            g.sel = Sel::Bang;
            g.expr = make_lit(v, false, a.loc);
            g.is_t = false;
            c.fields.push_back(g);
            rec(i + 1, c, m2);
            c.fields.pop_back();
        }
    };
    Construct c;
    c.channel = a.channel;
    c.loc = a.loc;
    ExprMap m;
    rec(0, c, m);
    return out;
}

// ------------------------------------------------------------ unfolding

ProcP bind_fields(const ProcP& prefix, const std::map<size_t, Value>& vals)
{
    auto q = std::make_shared<Proc>(*prefix);
    std::map<std::string, Value> m;
    ExprMap em;
    for (size_t i = 0; i < q->cons.fields.size(); ++i) {
        Field& f = q->cons.fields[i];
        if (f.sel == Sel::Bang) {
            f.expr = subst_expr(f.expr, em);
            continue;
        }
        f.ann = subst_type(f.ann, em);
        auto it = vals.find(i);
        if (it == vals.end()) {
            m.erase(f.var);
            em.erase(f.var);
            continue;
        }
        m[f.var] = it->second;
        em[f.var] = make_lit(it->second, f.is_t, q->cons.loc);
        f.sel = Sel::Bang;
        f.expr = make_lit(it->second, f.is_t, q->cons.loc);
        f.var.clear();
        f.ann = TypeExpr::null();
    }
    q->kids[0] = substitute(prefix->kids[0], m);
    return q;
}

ProcP instantiate(const Definitions& defs, const std::string& name, const std::vector<ExprP>& args)
{
    const ProcDef& d = defs.proc(name);
    if (args.empty()) return d.body;
    if (args.size() != d.params.size())
        throw Diagnostic(defs.file, d.loc, "process '" + name + "' expects " + std::to_string(d.params.size()) +
                                               " arguments, got " + std::to_string(args.size()));
    ExprMap m;
    for (size_t i = 0; i < args.size(); ++i) {
        ExprP a = args[i];
        if (is_closed(a) && a->op != Expr::Op::Lit) a = make_lit(eval(a), a->t, a->loc);
        if (a->op == Expr::Op::Lit && d.params[i].type.kind == TypeKind::Named) {
            auto vals = defs.type_values(d.params[i].type.name);
            if (std::find(vals.begin(), vals.end(), a->lit) == vals.end())
                throw Diagnostic(defs.file, a->loc, "argument " + a->lit.str() + " of '" + name + "' is outside type " +
                                                        d.params[i].type.name);
        }
        m[d.params[i].name] = a;
    }
    return subst_proc(d.body, m);
}

ProcP unfold_call(const Proc& call, const Definitions& defs)
{
    const ProcDef& d = defs.proc(call.name);
    if (call.args.size() != d.params.size())
        throw Diagnostic(defs.file, call.loc, "process '" + call.name + "' expects " + std::to_string(d.params.size()) +
                                                  " arguments");
    if (d.params.empty()) return d.body;
    return instantiate(defs, call.name, call.args);
}

// ------------------------------------------------------------ printing

std::string type_str(const TypeExpr& t)
{
    switch (t.kind) {
    case TypeKind::T: return "t";
    case TypeKind::Named: return t.name;
    case TypeKind::Null: return "null";
    case TypeKind::Set: case TypeKind::TMinus: {
        std::string s = t.kind == TypeKind::Set ? "{" : "(t - {";
        for (size_t i = 0; i < t.elems.size(); ++i) s += (i ? ", " : "") + print_expr(t.elems[i]);
        return s + (t.kind == TypeKind::Set ? "}" : "})");
    }
    }
    return "?";
}

namespace {

std::string bang_operand(const ExprP& e)
{
    bool atomic = e->op == Expr::Op::Var || e->op == Expr::Op::Lit;
    return atomic ? print_expr(e) : "(" + print_expr(e) + ")";
}

std::string print_set(const EventSetExpr& s)
{
    bool closure = s.items.empty() || s.items.front().closure;
    std::string out = closure ? "{| " : "{";
    for (size_t i = 0; i < s.items.size(); ++i) {
        if (i) out += ", ";
        out += s.items[i].channel;
        for (const auto& e : s.items[i].prefix) out += "." + bang_operand(e);
    }
    if (s.items.empty()) return "{}";
    return out + (closure ? " |}" : "}");
}

bool atomic_proc(const Proc& p) { return p.kind == PK::Stop || p.kind == PK::Call; }

std::string print_p(const Proc& p);

std::string operand(const ProcP& p) { return atomic_proc(*p) ? print_p(*p) : "(" + print_p(*p) + ")"; }

std::string print_p(const Proc& p)
{
    switch (p.kind) {
    case PK::Stop: return "STOP";
    case PK::Prefix: {
        const Proc& k = *p.kids[0];
        bool plain = atomic_proc(k) || k.kind == PK::Prefix || k.kind == PK::If;
        return print_construct(p.cons) + " -> " + (plain ? print_p(k) : "(" + print_p(k) + ")");
    }
    case PK::Ext: return operand(p.kids[0]) + " [] " + operand(p.kids[1]);
    case PK::Int: return operand(p.kids[0]) + " |~| " + operand(p.kids[1]);
    case PK::Slide: return operand(p.kids[0]) + " [> " + operand(p.kids[1]);
    case PK::Inter: return operand(p.kids[0]) + " ||| " + operand(p.kids[1]);
    case PK::SPar: return operand(p.kids[0]) + " [| " + print_set(p.set) + " |] " + operand(p.kids[1]);
    case PK::APar:
        return operand(p.kids[0]) + " [" + print_set(p.set) + " || " + print_set(p.set2) + "] " + operand(p.kids[1]);
    case PK::Hide: return operand(p.kids[0]) + " \\ " + print_set(p.set);
    case PK::Rename: {
        std::string s = operand(p.kids[0]) + " [[";
        for (size_t i = 0; i < p.renames.size(); ++i)
            s += (i ? ", " : " ") + p.renames[i].first + " <- " + p.renames[i].second;
        return s + " ]]";
    }
    case PK::If:
        return "if " + print_expr(p.cond) + " then " + print_p(*p.kids[0]) + " else " + print_p(*p.kids[1]);
    case PK::Call: {
        if (p.args.empty()) return p.name;
        std::string s = p.name + "(";
        for (size_t i = 0; i < p.args.size(); ++i) s += (i ? ", " : "") + print_expr(p.args[i]);
        return s + ")";
    }
    case PK::ReplAPar:
        return "|| " + p.var + " : " + type_str(p.dom) + " @ [" + print_set(p.set) + "] " + print_p(*p.kids[0]);
    case PK::ReplInter: return "||| " + p.var + " : " + type_str(p.dom) + " @ " + print_p(*p.kids[0]);
    case PK::ReplInt: return "|~| " + p.var + " : " + type_str(p.dom) + " @ " + print_p(*p.kids[0]);
    case PK::ReplExt: return "[] " + p.var + " : " + type_str(p.dom) + " @ " + print_p(*p.kids[0]);
    }
    return "?";
}

}  // namespace

std::string print_construct(const Construct& c)
{
    std::string s = c.channel;
    for (const auto& f : c.fields) {
        switch (f.sel) {
        case Sel::Dollar: s += "$" + f.var + ":" + type_str(f.ann); break;
        case Sel::Query: s += "?" + f.var + ":" + type_str(f.ann); break;
        case Sel::Bang: s += "!" + bang_operand(f.expr); break;
        }
    }
    return s;
}

std::string print_proc(const ProcP& p) { return print_p(*p); }

std::string print_definitions(const Definitions& defs)
{
    std::string out;
    for (const auto& n : defs.type_order) {
        const TypeDecl& t = defs.types.at(n);
        if (t.numeric) {
            out += "nametype " + n + " = {" + t.values.front().str() + ".." + t.values.back().str() + "}\n";
        } else {
            out += "datatype " + n + " =";
            for (size_t i = 0; i < t.values.size(); ++i) out += (i ? " | " : " ") + t.values[i].str();
            out += "\n";
        }
    }
    for (const auto& n : defs.channel_order) {
        const ChannelDecl& c = defs.channels.at(n);
        out += "channel " + n;
        for (size_t i = 0; i < c.sig.size(); ++i) out += (i ? "." : " : ") + type_str(c.sig[i]);
        out += "\n";
    }
    for (const auto& n : defs.proc_order) {
        const ProcDef& d = defs.procs.at(n);
        out += n;
        if (!d.params.empty()) {
            out += "(";
            for (size_t i = 0; i < d.params.size(); ++i)
                out += (i ? ", " : "") + d.params[i].name + " : " + type_str(d.params[i].type);
            out += ")";
        }
        out += " = " + print_proc(d.body) + "\n";
    }
    for (const auto& a : defs.assertions)
        out += "assert " + a.spec + (a.model == Model::Traces ? " [T= " : " [F= ") + a.impl + "\n";
    return out;
}

}  // namespace pcsp
