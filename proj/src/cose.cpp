#include "pcsp/cose.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace pcsp {

std::string env_str(const Env& g)
{
    std::string s = "{";
    bool first = true;
    for (const auto& [k, v] : g) {
        s += (first ? "" : ", ") + k + "->" + v.str();
        first = false;
    }
    return s + "}";
}

std::set<Event> insts(const SymbolicEvent& ev, const Env& g, int tsize)
{
    std::vector<std::vector<Value>> doms;
    for (const auto& f : ev.fields) {
        switch (f.kind) {
        case SymField::Kind::Dollar:
        case SymField::Kind::Query: {
            std::vector<Value> d;
            for (int i = 0; i < tsize; ++i) d.push_back(Value::number(i));
            doms.push_back(d);
            break;
        }
        case SymField::Kind::BangVar: {
            auto it = g.find(f.var);
            if (it == g.end()) return {};
            doms.push_back({it->second});
            break;
        }
        case SymField::Kind::BangVal:
            doms.push_back({f.val});
            break;
        }
    }
    std::set<Event> out;
    for_each_tuple(doms, [&](const std::vector<Value>& vs) { out.insert(Event{ev.channel, vs}); });
    return out;
}

Env match(const SymbolicEvent& ev, const Event& e)
{
    if (ev.channel != e.channel || ev.fields.size() != e.vals.size())
        throw Diagnostic("cannot match " + ev.str() + " with " + e.str());
    Env m;
    for (std::size_t i = 0; i < ev.fields.size(); ++i) {
        auto k = ev.fields[i].kind;
        if (k == SymField::Kind::Dollar || k == SymField::Kind::Query) m[ev.fields[i].var] = e.vals[i];
    }
    return m;
}

bool holds_in(const SymbolicLabel& cond, const Env& g)
{
    std::map<std::string, ExprP> m;
    for (const auto& [k, v] : g) m[k] = make_lit(v, true);
    ExprP e = subst_expr(cond.cond, m);
    if (!is_closed(e)) return false;
    Value v = eval(e);
    bool b = !v.is_atom() && v.num != 0;
    return cond.negated ? !b : b;
}

namespace {

Env overlay(Env g, const Env& m)
{
    for (const auto& [k, v] : m) g[k] = v;
    return g;
}

void gen(const SymbolicTrace& s, std::size_t i, const Env& g, const Trace& tr, std::size_t j, int tsize,
         std::vector<Env>& out, bool first_only)
{
    if (first_only && !out.empty()) return;
    if (i == s.size()) {
        if (j == tr.size()) out.push_back(g);
        return;
    }
    const SymbolicLabel& l = s[i];
    switch (l.kind) {
    case SymbolicLabel::Kind::Tau:
        gen(s, i + 1, g, tr, j, tsize, out, first_only);
        return;
    case SymbolicLabel::Kind::Cond:
        if (holds_in(l, g)) gen(s, i + 1, g, tr, j, tsize, out, first_only);
        return;
    case SymbolicLabel::Kind::Vis:
        if (j < tr.size() && insts(l.ev, g, tsize).count(tr[j]))
            gen(s, i + 1, overlay(g, match(l.ev, tr[j])), tr, j + 1, tsize, out, first_only);
        return;
    }
}

}  // namespace

bool generates(const SymbolicTrace& sigma, const Env& g, const Trace& tr, int tsize)
{
    std::vector<Env> out;
    gen(sigma, 0, g, tr, 0, tsize, out, true);
    return !out.empty();
}

std::vector<Env> generates_witnesses(const SymbolicTrace& sigma, const Env& g, const Trace& tr, int tsize)
{
    std::vector<Env> out;
    gen(sigma, 0, g, tr, 0, tsize, out, false);
    return out;
}

// ------------------------------------------------------------ concretisation

namespace {

struct CStep {
    std::optional<Event> ev;
    ProcP target;
    Env env;
    std::string tag;
};

Env restrict_env(const Env& g, const ProcP& p)
{
    std::set<std::string> fv = free_vars(p);
    Env r;
    for (const auto& [k, v] : g)
        if (fv.count(k)) r[k] = v;
    return r;
}

// Replaces the construct at `path` by its t-selection-free form, renaming a
// selection binder first when the name is already free in the whole term.
ProcP replace_at(const ProcP& p, const std::vector<int>& path, std::size_t depth, const std::set<std::string>& avoid,
                 std::vector<std::string>& bound)
{
    if (depth < path.size()) {
        auto q = std::make_shared<Proc>(*p);
        auto i = static_cast<std::size_t>(path[depth]);
        q->kids[i] = replace_at(p->kids[i], path, depth + 1, avoid, bound);
        return q;
    }
    if (p->kind != PK::Prefix) throw Diagnostic("internal: construct path does not end at a prefix");
    auto q = std::make_shared<Proc>(*p);
    std::set<std::string> used = avoid;
    for (auto& f : q->cons.fields) {
        if (f.sel != Sel::Dollar || !f.is_t) continue;
        std::string name = f.var;
        if (avoid.count(name)) {
            name = fresh_name(f.var, used);
            used.insert(name);
            q->kids[0] = substitute(q->kids[0], std::map<std::string, ExprP>{{f.var, make_var(name, true)}});
            f.var = name;
        }
        bound.push_back(name);
    }
    q->cons = replace_selections(q->cons, Scope::T);
    return q;
}

void cose_steps(const ProcP& p, const Env& g, const Definitions& defs, int tsize, std::vector<CStep>& out,
                int depth = 0)
{
    if (depth > 1000) throw Diagnostic("conditional chain too deep in " + print_proc(p));
    for (const auto& st : ssos_steps(p, defs)) {
        switch (st.label.kind) {
        case SymbolicLabel::Kind::Tau:
            out.push_back({std::nullopt, st.target, restrict_env(g, st.target), ""});
            break;
        case SymbolicLabel::Kind::Cond:
            if (holds_in(st.label, g)) cose_steps(st.target, g, defs, tsize, out, depth + 1);
            break;
        case SymbolicLabel::Kind::Vis: {
            const SymbolicEvent& ev = st.label.ev;
            if (ev.count(SymField::Kind::Dollar) > 0) {
                std::set<std::string> avoid = free_vars(p);
                for (const auto& [k, v] : g) avoid.insert(k);
                std::vector<std::string> bound;
                ProcP q = replace_at(p, st.path, 0, avoid, bound);
                std::vector<std::vector<Value>> doms(bound.size());
                for (auto& d : doms)
                    for (int i = 0; i < tsize; ++i) d.push_back(Value::number(i));
                for_each_tuple(doms, [&](const std::vector<Value>& vs) {
                    Env g2 = g;
                    for (std::size_t i = 0; i < bound.size(); ++i) g2[bound[i]] = vs[i];
                    out.push_back({std::nullopt, q, restrict_env(g2, q), st.tag});
                });
                break;
            }
            for (const auto& e : insts(ev, g, tsize)) {
                Env g2 = overlay(g, match(ev, e));
                out.push_back({e, st.target, restrict_env(g2, st.target), st.tag});
            }
            for (const auto& f : ev.fields)
                if (f.kind == SymField::Kind::BangVar && !g.count(f.var))
                    throw Diagnostic("output variable " + f.var + " unbound in environment " + env_str(g) +
                                     " at " + print_proc(p));
            break;
        }
        }
    }
}

// Configurations are equal when their instances are alpha-equivalent.
std::string config_key(const ProcP& p, const Env& g) { return canonical_key(substitute(p, g)); }

}  // namespace

Lts concretize_term(const ProcP& root, const Definitions& defs, int tsize, const Env& init, std::size_t max_states)
{
    if (tsize < 1) throw Diagnostic("#T must be at least 1");
    Lts l;
    l.tsize = tsize;
    std::vector<std::pair<ProcP, Env>> configs;
    std::deque<int> queue;
    std::set<std::string> used;
    auto visit = [&](const ProcP& p, const Env& g) {
        auto [id, fresh] = l.add_state(config_key(p, g), print_proc(p) + "  " + env_str(g));
        if (fresh) {
            if (l.num_states() > max_states)
                throw Diagnostic("state bound " + std::to_string(max_states) + " exceeded; frontier state: " +
                                 print_proc(p) + " " + env_str(g));
            configs.push_back({p, g});
            queue.push_back(id);
        }
        return id;
    };
    l.root = visit(root, restrict_env(init, root));
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        auto [p, g] = configs[static_cast<std::size_t>(u)];
        std::vector<CStep> steps;
        cose_steps(p, g, defs, tsize, steps);
        for (const auto& st : steps) {
            int label = 0;
            if (st.ev) {
                label = l.intern(*st.ev);
                used.insert(st.ev->channel);
            }
            int tag = st.tag.empty() ? -1 : l.tag_id(st.tag);
            int d = visit(st.target, st.env);
            l.add_edge(u, label, d, tag);
        }
    }
    for (const auto& ch : used) {
        auto es = channel_events(ch, defs, tsize);
        l.alphabet.insert(es.begin(), es.end());
    }
    return l;
}

Lts concretize(const Sslts& s, const Definitions& defs, int tsize, const Env& init, std::size_t max_states)
{
    return concretize_term(s.terms.at(static_cast<std::size_t>(s.root)), defs, tsize, init, max_states);
}

// ------------------------------------------------------------ regularity

RegularityReport check_regularity(const Lts& l)
{
    RegularityReport r;
    std::map<std::set<int>, Trace> seen;
    std::deque<std::set<int>> queue;
    auto root = tau_closure(l, {l.root});
    seen[root] = {};
    queue.push_back(root);
    while (!queue.empty()) {
        std::set<int> cur = queue.front();
        queue.pop_front();
        Trace tr = seen[cur];
        std::map<Event, std::set<int>> dsts;
        std::map<Event, std::set<int>> tags;
        for (int s : cur)
            for (const auto& e : l.out[static_cast<std::size_t>(s)]) {
                if (e.label == 0) continue;
                dsts[l.event(e.label)].insert(e.dst);
                tags[l.event(e.label)].insert(e.tag);
            }
        for (const auto& [ev, ds] : dsts) {
            Trace t2 = tr;
            t2.push_back(ev);
            if (ds.size() > 1)
                r.env_uniqueness.push_back(format_trace(t2) + " reaches " + std::to_string(ds.size()) +
                                           " configurations");
            if (tags[ev].size() > 1) {
                std::string ts;
                for (int t : tags[ev])
                    ts += (ts.empty() ? "" : ", ") + (t < 0 ? std::string("?") : l.tags[static_cast<std::size_t>(t)]);
                r.unique_construct.push_back(format_trace(t2) + " fired by constructs " + ts);
            }
            auto nxt = tau_closure(l, ds);
            if (!seen.count(nxt)) {
                seen[nxt] = t2;
                queue.push_back(nxt);
            }
        }
    }
    return r;
}

std::vector<std::string> check_monotonicity(const Lts& small, const Lts& big)
{
    std::vector<std::string> missing;
    for (std::size_t s = 0; s < small.num_states(); ++s) {
        int bs = big.find_state(small.keys[s]);
        if (bs < 0) {
            missing.push_back("state " + small.names[s]);
            continue;
        }
        for (const auto& e : small.out[s]) {
            int bd = big.find_state(small.keys[static_cast<std::size_t>(e.dst)]);
            bool found = false;
            if (bd >= 0)
                for (const auto& f : big.out[static_cast<std::size_t>(bs)]) {
                    if (f.dst != bd) continue;
                    if ((e.label == 0) != (f.label == 0)) continue;
                    if (e.label == 0 || small.event(e.label) == big.event(f.label)) found = true;
                }
            if (!found)
                missing.push_back(small.names[s] + " -" + small.label_str(e.label) + "-> " +
                                  small.names[static_cast<std::size_t>(e.dst)]);
        }
    }
    return missing;
}

std::string to_dot_cose(const Lts& l) { return to_dot(l); }

}  // namespace pcsp
