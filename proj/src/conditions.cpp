#include "pcsp/conditions.hpp"

#include "pcsp/analysis.hpp"
#include "pcsp/std_semantics.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

namespace pcsp {

bool ConditionReport::has_clause(const std::string& clause) const
{
    return std::any_of(findings.begin(), findings.end(), [&](const Finding& f) { return f.clause == clause; });
}

std::string verdict_str(Verdict3 v)
{
    switch (v) {
    case Verdict3::Pass:
        return "pass";
    case Verdict3::Fail:
        return "fail";
    case Verdict3::EvidenceOnly:
        return "evidence-only";
    }
    return "?";
}

std::string ConditionReport::str() const
{
    std::ostringstream o;
    o << condition << ": " << verdict_str(verdict);
    if (!note.empty()) o << " (" << note << ")";
    o << "\n";
    for (const auto& f : findings)
        o << "  clause " << f.clause << " at " << f.loc.line << ":" << f.loc.col << ": " << f.explanation << "\n";
    return o.str();
}

namespace {

void walk_expr(const ExprP& e, const std::function<void(const Expr&)>& f)
{
    if (!e) return;
    f(*e);
    for (const auto& a : e->args) walk_expr(a, f);
}

void walk_proc(const ProcP& p, const std::function<void(const Proc&)>& f)
{
    f(*p);
    for (const auto& k : p->kids) walk_proc(k, f);
}

// Every expression syntactically inside one node, excluding its children.
void node_exprs(const Proc& p, const std::function<void(const ExprP&)>& f)
{
    for (const auto& fl : p.cons.fields) {
        if (fl.expr) f(fl.expr);
        for (const auto& e : fl.ann.elems) f(e);
    }
    if (p.cond) f(p.cond);
    for (const auto* s : {&p.set, &p.set2})
        for (const auto& it : s->items)
            for (const auto& e : it.prefix) f(e);
    for (const auto& e : p.dom.elems) f(e);
    for (const auto& e : p.args) f(e);
}

bool any_t(const ExprP& e)
{
    bool r = false;
    walk_expr(e, [&](const Expr& x) { r = r || ((x.op == Expr::Op::Var || x.op == Expr::Op::Lit) && x.t); });
    return r;
}

bool type_involves_t(const TypeExpr& ty)
{
    if (ty.kind == TypeKind::TMinus) return true;
    if (ty.kind == TypeKind::Set)
        return std::any_of(ty.elems.begin(), ty.elems.end(), [](const ExprP& e) { return any_t(e); });
    return false;
}

bool is_cmp_order(Expr::Op op)
{
    return op == Expr::Op::Lt || op == Expr::Op::Le || op == Expr::Op::Gt || op == Expr::Op::Ge;
}

bool is_arith(Expr::Op op) { return op == Expr::Op::Add || op == Expr::Op::Sub || op == Expr::Op::Mod; }
bool is_func(Expr::Op op) { return op == Expr::Op::Min || op == Expr::Op::Max; }

bool args_t(const Expr& x)
{
    return std::any_of(x.args.begin(), x.args.end(), [](const ExprP& a) { return a->t || any_t(a); });
}

ConditionReport finish(ConditionReport r)
{
    // Desugared replicated choices repeat the same source fragment.
    std::vector<Finding> uniq;
    for (auto& f : r.findings) {
        bool dup = std::any_of(uniq.begin(), uniq.end(), [&](const Finding& g) {
            return g.clause == f.clause && g.loc.line == f.loc.line && g.loc.col == f.loc.col &&
                   g.explanation == f.explanation;
        });
        if (!dup) uniq.push_back(std::move(f));
    }
    r.findings = std::move(uniq);
    r.verdict = r.findings.empty() ? Verdict3::Pass : Verdict3::Fail;
    return r;
}

// Findings shared by the data-independence and TypeSym checkers.
struct TermScan {
    std::vector<std::pair<SourceLoc, std::string>> constants, arith, funcs, order_cmp;
    std::vector<std::pair<SourceLoc, std::string>> repl_over_t, bad_selection;
};

// Event sets (including indexed-parallel alphabets) are not selections, so the
// TypeSym alphabet exemption needs no special case here.
TermScan scan(const std::string& proc, const Definitions& defs)
{
    TermScan s;
    for (const auto& name : reachable_defs(proc, defs)) {
        walk_proc(defs.proc(name).body, [&](const Proc& p) {
            auto on_expr = [&](const ExprP& root) {
                walk_expr(root, [&](const Expr& x) {
                    if (x.op == Expr::Op::Lit && x.t)
                        s.constants.push_back({x.loc, "constant " + x.lit.str() + " of type t in " + name});
                    if (is_arith(x.op) && args_t(x))
                        s.arith.push_back({x.loc, "operation on t: " + print_expr(std::make_shared<Expr>(x))});
                    if (is_func(x.op) && args_t(x))
                        s.funcs.push_back({x.loc, "function over t: " + print_expr(std::make_shared<Expr>(x))});
                });
            };
            node_exprs(p, on_expr);
            if (p.kind == PK::If)
                walk_expr(p.cond, [&](const Expr& x) {
                    if (is_cmp_order(x.op) && args_t(x))
                        s.order_cmp.push_back({x.loc, "conditional on t uses an ordering test: " +
                                                          print_expr(std::make_shared<Expr>(x))});
                });
            bool repl = p.kind == PK::ReplAPar || p.kind == PK::ReplInter || p.kind == PK::ReplExt ||
                        p.kind == PK::ReplInt;
            if (repl) {
                bool whole_t = p.dom.kind == TypeKind::T;
                bool exempt = p.kind == PK::ReplInt && whole_t;
                if ((whole_t || type_involves_t(p.dom)) && !exempt)
                    s.repl_over_t.push_back({p.loc, "replicated construct over " + type_str(p.dom) + " in " + name});
                if (type_involves_t(p.dom))
                    s.bad_selection.push_back({p.loc, "indexing over " + type_str(p.dom) + " in " + name});
            }
            if (p.kind == PK::Prefix)
                for (const auto& f : p.cons.fields)
                    if (f.sel != Sel::Bang && type_involves_t(f.ann))
                        s.bad_selection.push_back({p.cons.loc, "selection " + f.var + " from " + type_str(f.ann) +
                                                                   " on channel " + p.cons.channel});
        });
    }
    return s;
}

void add_all(ConditionReport& r, const std::string& clause, const std::vector<std::pair<SourceLoc, std::string>>& v)
{
    for (const auto& [loc, msg] : v) r.findings.push_back({clause, loc, msg});
}

// Initial t-conditionals: before any prefix, following choices and calls.
bool initial_tcond(const ProcP& p, const Definitions& defs, std::set<std::string>& visiting)
{
    switch (p->kind) {
    case PK::If:
        if (any_t(p->cond)) return true;
        return initial_tcond(p->kids[0], defs, visiting) || initial_tcond(p->kids[1], defs, visiting);
    case PK::Ext:
    case PK::Int:
    case PK::Slide:
        return initial_tcond(p->kids[0], defs, visiting) || initial_tcond(p->kids[1], defs, visiting);
    case PK::Call: {
        if (!visiting.insert(p->name).second) return false;
        bool r = initial_tcond(defs.proc(p->name).body, defs, visiting);
        visiting.erase(p->name);
        return r;
    }
    default:
        return false;
    }
}

std::set<std::string> dollar_t_vars(const ProcP& p)
{
    std::set<std::string> r;
    walk_proc(p, [&](const Proc& q) {
        if (q.kind == PK::Prefix)
            for (const auto& f : q.cons.fields)
                if (f.sel == Sel::Dollar && f.is_t) r.insert(f.var);
    });
    return r;
}

std::string join(const std::set<std::string>& s)
{
    std::string r;
    for (const auto& x : s) r += (r.empty() ? "" : ", ") + x;
    return r;
}

}  // namespace

std::vector<std::string> reachable_defs(const std::string& proc, const Definitions& defs)
{
    std::set<std::string> seen{proc};
    std::deque<std::string> queue{proc};
    while (!queue.empty()) {
        std::string n = queue.front();
        queue.pop_front();
        walk_proc(defs.proc(n).body, [&](const Proc& p) {
            if (p.kind == PK::Call && seen.insert(p.name).second) queue.push_back(p.name);
        });
    }
    std::vector<std::string> out{proc};
    for (const auto& n : defs.proc_order)
        if (n != proc && seen.count(n)) out.push_back(n);
    return out;
}

ConditionReport check_data_independence(const std::string& proc, const Definitions& defs)
{
    ConditionReport r;
    r.condition = "data independence";
    TermScan s = scan(proc, defs);
    add_all(r, "(i)", s.repl_over_t);
    add_all(r, "(ii)", s.order_cmp);
    add_all(r, "(iii)", s.constants);
    add_all(r, "(iv)", s.funcs);
    add_all(r, "(v)", s.arith);
    add_all(r, "(vi)", s.bad_selection);
    return finish(r);
}

ConditionReport check_typesym_syntactic(const std::string& proc, const Definitions& defs)
{
    ConditionReport r;
    r.condition = "TypeSym (syntactic)";
    TermScan s = scan(proc, defs);
    add_all(r, "(i)", s.constants);
    add_all(r, "(ii)", s.arith);
    add_all(r, "(iii)", s.funcs);
    add_all(r, "(iv)", s.bad_selection);
    add_all(r, "(v)", s.order_cmp);
    return finish(r);
}

ConditionReport check_seq(const std::string& proc, const Definitions& defs)
{
    ConditionReport r;
    r.condition = "Seq";
    ConditionReport di = check_data_independence(proc, defs);
    for (const auto& f : di.findings)
        r.findings.push_back({"(i)", f.loc, "not data independent, clause " + f.clause + ": " + f.explanation});
    for (const auto& name : reachable_defs(proc, defs)) {
        walk_proc(defs.proc(name).body, [&](const Proc& p) {
            switch (p.kind) {
            case PK::APar:
            case PK::SPar:
            case PK::Inter:
            case PK::ReplAPar:
            case PK::ReplInter:
                r.findings.push_back({"(ii)", p.loc, "parallel composition in " + name});
                break;
            case PK::Hide:
                r.findings.push_back({"(ii)", p.loc, "hiding in " + name});
                break;
            case PK::Rename:
                r.findings.push_back({"(ii)", p.loc, "renaming in " + name});
                break;
            case PK::ReplExt:
            case PK::ReplInt:
                r.findings.push_back({"(iii)", p.loc, "replicated choice in " + name});
                break;
            case PK::If: {
                bool has_t = false, has_nont = false;
                walk_expr(p.cond, [&](const Expr& x) {
                    if (x.op != Expr::Op::Var && x.op != Expr::Op::Lit) return;
                    (x.t ? has_t : has_nont) = true;
                });
                if (has_t && has_nont)
                    r.findings.push_back({"(iv)", p.loc, "guard mixes t and non-t terms: " + print_expr(p.cond)});
                break;
            }
            case PK::Ext:
            case PK::Slide:
                for (int side = 0; side < 2; ++side) {
                    std::set<std::string> sel = dollar_t_vars(p.kids[static_cast<std::size_t>(side)]);
                    std::set<std::string> fv = free_vars(p.kids[static_cast<std::size_t>(1 - side)]);
                    std::set<std::string> clash;
                    std::set_intersection(sel.begin(), sel.end(), fv.begin(), fv.end(),
                                          std::inserter(clash, clash.end()));
                    if (!clash.empty())
                        r.findings.push_back({"(v)", p.loc, "selection variable(s) " + join(clash) +
                                                                " of one branch are free in the other"});
                }
                break;
            case PK::Prefix: {
                const auto& fs = p.cons.fields;
                for (std::size_t i = 0; i < fs.size(); ++i) {
                    if (fs[i].sel == Sel::Bang || !fs[i].is_t) continue;
                    for (std::size_t j = i + 1; j < fs.size(); ++j) {
                        bool uses = fs[j].sel == Sel::Bang ? free_vars(fs[j].expr).count(fs[i].var) > 0
                                                           : fs[j].var == fs[i].var;
                        if (uses) {
                            r.findings.push_back({"(vi)", p.cons.loc, "input variable " + fs[i].var +
                                                                          " of type t occurs twice in " +
                                                                          print_construct(p.cons)});
                            break;
                        }
                    }
                }
                break;
            }
            default:
                break;
            }
        });
    }
    return finish(r);
}

ConditionReport check_seqnorm(const std::string& proc, const Definitions& defs)
{
    ConditionReport r;
    r.condition = "SeqNorm";
    ConditionReport seq = check_seq(proc, defs);
    for (const auto& f : seq.findings)
        r.findings.push_back({"Seq " + f.clause, f.loc, f.explanation});
    auto chans = [&](const ProcP& q) {
        try {
            return channels(q, defs);
        } catch (const Diagnostic&) {
            return std::set<std::string>{};
        }
    };
    for (const auto& name : reachable_defs(proc, defs)) {
        walk_proc(defs.proc(name).body, [&](const Proc& p) {
            if (p.kind != PK::Ext && p.kind != PK::Int && p.kind != PK::Slide) return;
            auto a = chans(p.kids[0]), b = chans(p.kids[1]);
            std::set<std::string> both;
            std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(both, both.end()));
            if (!both.empty())
                r.findings.push_back({"bullet 1", p.loc, "choice branches share initial channel(s) " + join(both)});
            for (const auto& k : p.kids) {
                std::set<std::string> visiting;
                if (initial_tcond(k, defs, visiting)) {
                    r.findings.push_back({"bullet 2", p.loc, "conditional on t before a prefix inside a choice branch"});
                    break;
                }
            }
        });
    }
    return finish(r);
}

ConditionReport check_no_mixed_inputs(const std::string& proc, const Definitions& defs)
{
    ConditionReport r;
    r.condition = "no mixed inputs";
    for (const auto& name : reachable_defs(proc, defs)) {
        walk_proc(defs.proc(name).body, [&](const Proc& p) {
            if (p.kind != PK::Prefix) return;
            IndexSets ix = classify_fields(p.cons);
            if (!ix.dollar_t.empty() && (!ix.query_t.empty() || !ix.query_nont.empty()))
                r.findings.push_back({"(iii)", p.cons.loc, "construct " + print_construct(p.cons) +
                                                               " combines $ of type t with ? inputs"});
        });
    }
    return finish(r);
}

// ------------------------------------------------------------ RevPosConjEqT

namespace {

bool positive_conjunction(const ExprP& e)
{
    if (e->op == Expr::Op::Eq) return true;
    if (e->op == Expr::Op::And) return positive_conjunction(e->args[0]) && positive_conjunction(e->args[1]);
    return false;
}

using TypeEnv = std::map<std::string, TypeExpr>;

void walk_typed(const ProcP& p, TypeEnv env, const Definitions& defs,
                const std::function<void(const Proc&, const TypeEnv&)>& f)
{
    f(*p, env);
    if (p->kind == PK::Prefix) {
        const ChannelDecl& ch = defs.channel(p->cons.channel);
        for (std::size_t i = 0; i < p->cons.fields.size(); ++i) {
            const Field& fl = p->cons.fields[i];
            if (fl.sel == Sel::Bang) continue;
            env[fl.var] = fl.is_t ? TypeExpr::t_type() : (fl.ann.kind == TypeKind::Null ? ch.sig[i] : fl.ann);
        }
    }
    if (!p->var.empty()) env[p->var] = p->dom.kind == TypeKind::TMinus ? TypeExpr::t_type() : p->dom;
    for (const auto& k : p->kids) walk_typed(k, env, defs, f);
}

}  // namespace

ConditionReport revposconjeqt_evidence(const std::string& proc, const Definitions& defs, Model model,
                                       const std::vector<int>& sizes)
{
    ConditionReport r;
    r.condition = std::string("RevPosConjEqT_") + (model == Model::Traces ? "T" : "F");
    int conds = 0;
    for (const auto& name : reachable_defs(proc, defs)) {
        const ProcDef& def = defs.proc(name);
        TypeEnv env;
        for (const auto& prm : def.params) env[prm.name] = prm.type;
        walk_typed(def.body, env, defs, [&](const Proc& p, const TypeEnv& te) {
            if (p.kind != PK::If || !any_t(p.cond)) return;
            ++conds;
            if (!positive_conjunction(p.cond)) {
                r.findings.push_back({"syntax", p.loc, "condition is not a positive conjunction of equalities: " +
                                                           print_expr(p.cond)});
                return;
            }
            auto node = std::make_shared<Proc>(p);
            std::vector<std::string> vars;
            for (const auto& v : free_vars(ProcP(node)))
                if (te.count(v)) vars.push_back(v);
            for (int n : sizes) {
                std::vector<std::vector<Value>> doms;
                for (const auto& v : vars) doms.push_back(domain_values(te.at(v), defs, n));
                bool failed = false;
                for_each_tuple(doms, [&](const std::vector<Value>& vals) {
                    if (failed) return;
                    std::map<std::string, Value> m;
                    for (std::size_t i = 0; i < vars.size(); ++i) m[vars[i]] = vals[i];
                    Lts then_l = build_lts(substitute(p.kids[0], m), defs, n);
                    Lts else_l = build_lts(substitute(p.kids[1], m), defs, n);
                    RefinementResult res = refines(else_l, then_l, model);
                    if (res.holds) return;
                    failed = true;
                    std::string val;
                    for (std::size_t i = 0; i < vars.size(); ++i)
                        val += (i ? ", " : "") + vars[i] + "=" + vals[i].str();
                    r.findings.push_back({"semantic", p.loc, "#T=" + std::to_string(n) + ", {" + val +
                                                                 "}: else-branch is not refined by then-branch: " +
                                                                 res.str()});
                });
                if (failed) break;
            }
        });
    }
    if (!r.findings.empty()) {
        r.verdict = Verdict3::Fail;
        return r;
    }
    r.verdict = Verdict3::EvidenceOnly;
    std::string s;
    for (int n : sizes) s += (s.empty() ? "" : ", ") + std::to_string(n);
    r.note = conds == 0 ? "vacuous: no conditionals on t" : "checked at sizes " + s;
    return r;
}

}  // namespace pcsp
