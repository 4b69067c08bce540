#include "pcsp/ssos.hpp"

#include "pcsp/conditions.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

namespace pcsp {

// ------------------------------------------------------------ labels

std::string SymbolicEvent::str() const
{
    std::string s = channel;
    for (const auto& f : fields) {
        switch (f.kind) {
        case SymField::Kind::Dollar:
            s += "$" + f.var + ":t";
            break;
        case SymField::Kind::Query:
            s += "?" + f.var + ":t";
            break;
        case SymField::Kind::BangVar:
            s += "!" + f.var;
            break;
        case SymField::Kind::BangVal:
            s += "!" + f.val.str();
            break;
        }
    }
    return s;
}

std::size_t SymbolicEvent::count(SymField::Kind k) const
{
    return static_cast<std::size_t>(
        std::count_if(fields.begin(), fields.end(), [k](const SymField& f) { return f.kind == k; }));
}

std::string SymbolicLabel::str() const
{
    switch (kind) {
    case Kind::Tau:
        return "tau";
    case Kind::Vis:
        return ev.str();
    case Kind::Cond:
        return negated ? "not (" + print_expr(cond) + ")" : print_expr(cond);
    }
    return "?";
}

std::size_t Sslts::num_edges() const
{
    std::size_t n = 0;
    for (const auto& v : out) n += v.size();
    return n;
}

// ------------------------------------------------------------ steps

namespace {

ProcP with_kid(const ProcP& p, std::size_t i, ProcP k)
{
    auto q = std::make_shared<Proc>(*p);
    q->kids[i] = std::move(k);
    return q;
}

bool mentions_t(const ExprP& e)
{
    if ((e->op == Expr::Op::Var || e->op == Expr::Op::Lit) && e->t) return true;
    return std::any_of(e->args.begin(), e->args.end(), [](const ExprP& a) { return mentions_t(a); });
}

std::string loc_tag(const Construct& c)
{
    return c.channel + "@" + std::to_string(c.loc.line) + ":" + std::to_string(c.loc.col);
}

SymbolicEvent symbolic_event(const Construct& c)
{
    SymbolicEvent ev;
    ev.channel = c.channel;
    for (const auto& f : c.fields) {
        SymField s;
        s.is_t = f.is_t;
        if (f.sel == Sel::Dollar || f.sel == Sel::Query) {
            if (!f.is_t) throw Diagnostic("internal: non-t selection left in symbolic event " + print_construct(c));
            s.kind = f.sel == Sel::Dollar ? SymField::Kind::Dollar : SymField::Kind::Query;
            s.var = f.var;
        } else if (f.expr->op == Expr::Op::Var && f.is_t) {
            s.kind = SymField::Kind::BangVar;
            s.var = f.expr->name;
        } else if (is_closed(f.expr)) {
            s.kind = SymField::Kind::BangVal;
            s.val = eval(f.expr);
        } else {
            throw Diagnostic("output " + print_expr(f.expr) + " in " + print_construct(c) +
                             " is neither a t variable nor closed");
        }
        ev.fields.push_back(std::move(s));
    }
    return ev;
}

void prefix_steps(const ProcP& p, const Definitions& defs, std::vector<SymStep>& out)
{
    const Construct& c = p->cons;
    IndexSets ix = classify_fields(c);
    if (!ix.dollar_nont.empty()) {
        std::vector<std::size_t> idx;
        for (int i : ix.dollar_nont) idx.push_back(static_cast<std::size_t>(i - 1));
        std::function<void(std::size_t, const ProcP&)> rec = [&](std::size_t k, const ProcP& cur) {
            if (k == idx.size()) {
                out.push_back({SymbolicLabel::tau(), cur, {}, ""});
                return;
            }
            for (const auto& v : domain_values(cur->cons.fields[idx[k]].ann, defs, 0))
                rec(k + 1, bind_fields(cur, {{idx[k], v}}));
        };
        rec(0, p);
        return;
    }
    std::vector<std::size_t> idx;
    for (int i : ix.query_nont) idx.push_back(static_cast<std::size_t>(i - 1));
    std::function<void(std::size_t, const ProcP&)> rec = [&](std::size_t k, const ProcP& cur) {
        if (k == idx.size()) {
            SymbolicLabel l;
            l.kind = SymbolicLabel::Kind::Vis;
            l.ev = symbolic_event(cur->cons);
            out.push_back({l, cur->kids[0], {}, loc_tag(c)});
            return;
        }
        for (const auto& v : domain_values(cur->cons.fields[idx[k]].ann, defs, 0))
            rec(k + 1, bind_fields(cur, {{idx[k], v}}));
    };
    rec(0, p);
}

}  // namespace

std::vector<SymStep> ssos_steps(const ProcP& p, const Definitions& defs)
{
    std::vector<SymStep> out;
    switch (p->kind) {
    case PK::Stop:
        break;
    case PK::Prefix:
        prefix_steps(p, defs, out);
        break;
    case PK::Ext:
        for (std::size_t side = 0; side < 2; ++side) {
            for (auto& s : ssos_steps(p->kids[side], defs)) {
                if (s.label.is_vis()) {
                    s.path.insert(s.path.begin(), static_cast<int>(side));
                    out.push_back(std::move(s));
                } else {
                    out.push_back({s.label, with_kid(p, side, s.target), {}, ""});
                }
            }
        }
        break;
    case PK::Int:
        out.push_back({SymbolicLabel::tau(), p->kids[0], {}, ""});
        out.push_back({SymbolicLabel::tau(), p->kids[1], {}, ""});
        break;
    case PK::Slide:
        for (auto& s : ssos_steps(p->kids[0], defs)) {
            if (s.label.is_vis()) {
                s.path.insert(s.path.begin(), 0);
                out.push_back(std::move(s));
            } else {
                out.push_back({s.label, with_kid(p, 0, s.target), {}, ""});
            }
        }
        out.push_back({SymbolicLabel::tau(), p->kids[1], {}, ""});
        break;
    case PK::If: {
        if (is_closed(p->cond)) {
            Value v = eval(p->cond);
            std::size_t branch = (!v.is_atom() && v.num != 0) ? 0 : 1;
            for (auto& s : ssos_steps(p->kids[branch], defs)) {
                if (s.label.is_vis()) s.path.insert(s.path.begin(), static_cast<int>(branch));
                out.push_back(std::move(s));
            }
            break;
        }
        if (!mentions_t(p->cond))
            throw Diagnostic("conditional " + print_expr(p->cond) + " has free non-t variables");
        SymbolicLabel pos;
        pos.kind = SymbolicLabel::Kind::Cond;
        pos.cond = p->cond;
        SymbolicLabel neg = pos;
        neg.negated = true;
        out.push_back({pos, p->kids[0], {}, ""});
        out.push_back({neg, p->kids[1], {}, ""});
        break;
    }
    case PK::Call:
        out.push_back({SymbolicLabel::tau(), unfold_call(*p, defs), {}, ""});
        break;
    default:
        throw Diagnostic("operator outside the sequential fragment: " + print_proc(p));
    }
    return out;
}

// ------------------------------------------------------------ construction

namespace {

std::set<int> tau_closure(const Sslts& s, int from)
{
    std::set<int> seen{from};
    std::vector<int> stack{from};
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (const auto& e : s.out[static_cast<std::size_t>(u)])
            if (s.label(e).kind == SymbolicLabel::Kind::Tau && seen.insert(e.dst).second) stack.push_back(e.dst);
    }
    return seen;
}

void regularity_checks(Sslts& s)
{
    for (std::size_t u = 0; u < s.num_states(); ++u) {
        std::set<int> cl = tau_closure(s, static_cast<int>(u));
        std::map<int, std::set<int>> vis;
        std::set<std::string> conds;
        bool other = false;
        for (int v : cl) {
            for (const auto& e : s.out[static_cast<std::size_t>(v)]) {
                const SymbolicLabel& l = s.label(e);
                if (l.kind == SymbolicLabel::Kind::Vis) {
                    vis[e.label].insert(e.dst);
                    other = true;
                } else if (l.kind == SymbolicLabel::Kind::Cond) {
                    conds.insert(print_expr(l.cond));
                }
            }
        }
        for (const auto& [lab, dsts] : vis)
            if (dsts.size() > 1)
                s.violations.push_back("uniqueness: label " + s.labels[static_cast<std::size_t>(lab)].str() +
                                       " reaches " + std::to_string(dsts.size()) + " targets from " +
                                       print_proc(s.terms[u]));
        if (!conds.empty() && (other || conds.size() > 1))
            s.violations.push_back("lonely conditional: other labels reachable alongside a condition from " +
                                   print_proc(s.terms[u]));
    }
}

}  // namespace

Sslts build_sslts_term(const ProcP& root, const Definitions& defs, std::size_t max_states)
{
    Sslts s;
    std::map<std::string, int> index, label_index, tag_index;
    std::deque<int> queue;
    auto visit = [&](const ProcP& p) {
        std::string k = canonical_key(p);
        auto it = index.find(k);
        if (it != index.end()) return it->second;
        int id = static_cast<int>(s.keys.size());
        if (s.keys.size() >= max_states)
            throw Diagnostic("state bound " + std::to_string(max_states) + " exceeded; frontier state: " +
                             print_proc(p));
        index.emplace(k, id);
        s.keys.push_back(k);
        s.terms.push_back(p);
        s.out.emplace_back();
        queue.push_back(id);
        return id;
    };
    auto intern = [](std::map<std::string, int>& m, const std::string& k, auto&& add) {
        auto it = m.find(k);
        if (it != m.end()) return it->second;
        int id = static_cast<int>(m.size());
        m.emplace(k, id);
        add();
        return id;
    };
    s.root = visit(root);
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        ProcP p = s.terms[static_cast<std::size_t>(u)];
        for (auto& st : ssos_steps(p, defs)) {
            int lab = intern(label_index, st.label.str(), [&] { s.labels.push_back(st.label); });
            int tag = st.tag.empty() ? -1 : intern(tag_index, st.tag, [&] { s.tags.push_back(st.tag); });
            int d = visit(st.target);
            auto& v = s.out[static_cast<std::size_t>(u)];
            bool dup = std::any_of(v.begin(), v.end(), [&](const Sslts::Edge& e) {
                return e.label == lab && e.dst == d && e.tag == tag;
            });
            if (!dup) v.push_back({lab, d, tag});
        }
    }
    regularity_checks(s);
    return s;
}

Sslts build_sslts(const Definitions& defs, const std::string& name, std::size_t max_states)
{
    ConditionReport seq = check_seq(name, defs);
    if (!seq.passed()) {
        const Finding& f = seq.findings.front();
        throw Diagnostic(defs.file, f.loc, name + " is not Seq: clause " + f.clause + ": " + f.explanation);
    }
    return build_sslts_term(defs.proc(name).body, defs, max_states);
}

// ------------------------------------------------------------ traces

std::vector<SymbolicTrace> symbolic_traces(const Sslts& s, std::size_t maxlen)
{
    std::vector<SymbolicTrace> out;
    std::set<std::string> seen;
    SymbolicTrace cur;
    std::function<void(int)> rec = [&](int u) {
        std::string k = trace_str(cur);
        if (seen.insert(k).second) out.push_back(cur);
        if (cur.size() == maxlen) return;
        for (const auto& e : s.out[static_cast<std::size_t>(u)]) {
            cur.push_back(s.label(e));
            rec(e.dst);
            cur.pop_back();
        }
    };
    rec(s.root);
    return out;
}

std::string trace_str(const SymbolicTrace& t)
{
    std::string r = "<";
    for (std::size_t i = 0; i < t.size(); ++i) r += (i ? ", " : "") + t[i].str();
    return r + ">";
}

bool nontau_equiv(const SymbolicTrace& a, const SymbolicTrace& b)
{
    auto erase = [](const SymbolicTrace& t) {
        std::vector<std::string> r;
        for (const auto& l : t)
            if (l.kind != SymbolicLabel::Kind::Tau) r.push_back(l.str());
        return r;
    };
    return erase(a) == erase(b);
}

std::string nont_projection(const SymbolicEvent& e)
{
    std::string s = e.channel;
    for (const auto& f : e.fields)
        if (!f.is_t) s += "." + f.val.str();
    return s;
}

bool nont_equiv(const SymbolicTrace& a, const SymbolicTrace& b)
{
    auto proj = [](const SymbolicTrace& t) {
        std::vector<std::string> r;
        for (const auto& l : t)
            if (l.is_vis()) r.push_back(nont_projection(l.ev));
        return r;
    };
    return proj(a) == proj(b);
}

std::string to_dot(const Sslts& s)
{
    auto esc = [](const std::string& x) {
        std::string r;
        for (char c : x) {
            if (c == '"' || c == '\\') r += '\\';
            r += c;
        }
        return r;
    };
    std::ostringstream o;
    o << "digraph sslts {\n  node [shape=box];\n";
    for (std::size_t u = 0; u < s.num_states(); ++u) {
        o << "  n" << u << " [label=\"" << esc(print_proc(s.terms[u])) << "\"";
        if (static_cast<int>(u) == s.root) o << ", penwidth=2";
        o << "];\n";
    }
    for (std::size_t u = 0; u < s.num_states(); ++u)
        for (const auto& e : s.out[u])
            o << "  n" << u << " -> n" << e.dst << " [label=\"" << esc(s.label(e).str()) << "\"];\n";
    o << "}\n";
    return o.str();
}

}  // namespace pcsp
