#include "pcsp/std_semantics.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <sstream>

namespace pcsp {

// ------------------------------------------------------------ Lts

int Lts::intern(const Event& e)
{
    auto it = event_index.find(e);
    if (it != event_index.end()) return it->second;
    events.push_back(e);
    int id = static_cast<int>(events.size());
    event_index.emplace(e, id);
    return id;
}

int Lts::tag_id(const std::string& desc)
{
    auto it = tag_index_.find(desc);
    if (it != tag_index_.end()) return it->second;
    tags.push_back(desc);
    int id = static_cast<int>(tags.size()) - 1;
    tag_index_.emplace(desc, id);
    return id;
}

std::pair<int, bool> Lts::add_state(const std::string& key, const std::string& name)
{
    auto it = key_index_.find(key);
    if (it != key_index_.end()) return {it->second, false};
    int id = static_cast<int>(keys.size());
    keys.push_back(key);
    names.push_back(name);
    out.emplace_back();
    key_index_.emplace(key, id);
    return {id, true};
}

void Lts::add_edge(int src, int label, int dst, int tag)
{
    auto& v = out.at(static_cast<std::size_t>(src));
    Edge e{label, dst, tag};
    if (std::find(v.begin(), v.end(), e) == v.end()) v.push_back(e);
}

std::size_t Lts::num_edges() const
{
    std::size_t n = 0;
    for (const auto& v : out) n += v.size();
    return n;
}

std::string Lts::label_str(int label) const { return label == 0 ? "tau" : event(label).str(); }

std::set<Event> Lts::initials(int s) const
{
    std::set<Event> r;
    for (const auto& e : out.at(static_cast<std::size_t>(s)))
        if (e.label != 0) r.insert(event(e.label));
    return r;
}

bool Lts::stable(int s) const
{
    for (const auto& e : out.at(static_cast<std::size_t>(s)))
        if (e.label == 0) return false;
    return true;
}

int Lts::find_state(const std::string& key) const
{
    auto it = key_index_.find(key);
    return it == key_index_.end() ? -1 : it->second;
}

// ------------------------------------------------------------ event sets

bool in_event_set(const EventSetExpr& s, const Event& e)
{
    for (const auto& it : s.items) {
        if (it.channel != e.channel) continue;
        if (!it.closure && it.prefix.size() != e.vals.size()) continue;
        if (it.prefix.size() > e.vals.size()) continue;
        bool ok = true;
        for (std::size_t i = 0; i < it.prefix.size() && ok; ++i) ok = eval(it.prefix[i]) == e.vals[i];
        if (ok) return true;
    }
    return false;
}

std::set<Event> channel_events(const std::string& ch, const Definitions& defs, int tsize)
{
    const ChannelDecl& c = defs.channel(ch);
    std::vector<std::vector<Value>> doms;
    for (const auto& ty : c.sig) doms.push_back(domain_values(ty, defs, tsize));
    std::set<Event> out;
    for_each_tuple(doms, [&](const std::vector<Value>& vs) { out.insert(Event{ch, vs}); });
    return out;
}

// ------------------------------------------------------------ steps

namespace {

using ExprMap = std::map<std::string, ExprP>;

EventSetExpr union_sets(const EventSetExpr& a, const EventSetExpr& b)
{
    EventSetExpr r = a;
    r.items.insert(r.items.end(), b.items.begin(), b.items.end());
    return r;
}

ProcP make_node(PK k, std::vector<ProcP> kids, SourceLoc loc)
{
    auto q = std::make_shared<Proc>();
    q->kind = k;
    q->kids = std::move(kids);
    q->loc = loc;
    return q;
}

ProcP make_apar(ProcP l, EventSetExpr a, ProcP r, EventSetExpr b, SourceLoc loc)
{
    auto q = std::make_shared<Proc>();
    q->kind = PK::APar;
    q->kids = {std::move(l), std::move(r)};
    q->set = std::move(a);
    q->set2 = std::move(b);
    q->loc = loc;
    return q;
}

// Replicated operators unfold into left-associated binary trees.
ProcP expand_replicated(const Proc& p, const Definitions& defs, int tsize)
{
    std::vector<Value> vals = domain_values(p.dom, defs, tsize);
    auto inst = [&](const Value& v) { return substitute(p.kids[0], std::map<std::string, Value>{{p.var, v}}); };
    if (vals.empty()) return make_stop();
    if (p.kind == PK::ReplAPar) {
        auto alpha = [&](const Value& v) {
            EventSetExpr s = p.set;
            ExprMap m{{p.var, make_lit(v, false)}};
            for (auto& it : s.items)
                for (auto& e : it.prefix) e = make_lit(eval(subst_expr(e, m)), e->t);
            return s;
        };
        ProcP acc = inst(vals[0]);
        EventSetExpr acc_alpha = alpha(vals[0]);
        if (vals.size() == 1) return make_apar(acc, acc_alpha, make_stop(), {}, p.loc);
        for (std::size_t i = 1; i < vals.size(); ++i) {
            EventSetExpr a = alpha(vals[i]);
            acc = make_apar(acc, acc_alpha, inst(vals[i]), a, p.loc);
            acc_alpha = union_sets(acc_alpha, a);
        }
        return acc;
    }
    PK bin = p.kind == PK::ReplInter ? PK::Inter : PK::Ext;
    ProcP acc = inst(vals[0]);
    for (std::size_t i = 1; i < vals.size(); ++i) acc = make_node(bin, {acc, inst(vals[i])}, p.loc);
    return acc;
}

ExprMap lit_map(const std::map<std::string, Value>& m, const std::map<std::string, bool>& tflags)
{
    ExprMap r;
    for (const auto& [k, v] : m) r[k] = make_lit(v, tflags.count(k) && tflags.at(k));
    return r;
}

void prefix_steps(const ProcP& p, const Definitions& defs, int tsize, std::vector<StdStep>& out)
{
    const Construct& c = p->cons;
    IndexSets ix = classify_fields(c);
    // Rules 2a then 2b: resolve every $ of one kind in a single tau.
    const std::set<int>& sel = !ix.dollar_nont.empty() ? ix.dollar_nont : ix.dollar_t;
    if (!sel.empty()) {
        std::vector<std::size_t> idx;
        for (int i : sel) idx.push_back(static_cast<std::size_t>(i - 1));
        std::function<void(std::size_t, const ProcP&)> rec = [&](std::size_t k, const ProcP& cur) {
            if (k == idx.size()) {
                out.push_back({std::nullopt, cur});
                return;
            }
            const Field& f = cur->cons.fields[idx[k]];
            for (const auto& v : domain_values(f.ann, defs, tsize))
                rec(k + 1, bind_fields(cur, {{idx[k], v}}));
        };
        rec(0, p);
        return;
    }
    // One event per choice of input values.
    std::map<std::string, Value> m;
    std::map<std::string, bool> tflags;
    Event ev{c.channel, {}};
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == c.fields.size()) {
            out.push_back({ev, substitute(p->kids[0], m)});
            return;
        }
        const Field& f = c.fields[i];
        ExprMap em = lit_map(m, tflags);
        if (f.sel == Sel::Bang) {
            ev.vals.push_back(eval(subst_expr(f.expr, em)));
            rec(i + 1);
            ev.vals.pop_back();
            return;
        }
        TypeExpr ann = f.ann;
        for (auto& e : ann.elems) e = subst_expr(e, em);
        for (const auto& v : domain_values(ann, defs, tsize)) {
            auto saved = m.find(f.var) == m.end() ? std::nullopt : std::optional<Value>(m[f.var]);
            m[f.var] = v;
            tflags[f.var] = f.is_t;
            ev.vals.push_back(v);
            rec(i + 1);
            ev.vals.pop_back();
            if (saved) m[f.var] = *saved;
            else m.erase(f.var);
        }
    };
    rec(0);
}

}  // namespace

std::vector<StdStep> std_steps(const ProcP& p, const Definitions& defs, int tsize)
{
    std::vector<StdStep> out;
    switch (p->kind) {
    case PK::Stop:
        break;
    case PK::Prefix:
        prefix_steps(p, defs, tsize, out);
        break;
    case PK::Ext:
        for (int side = 0; side < 2; ++side) {
            for (auto& s : std_steps(p->kids[side], defs, tsize)) {
                if (s.ev) {
                    out.push_back(std::move(s));
                } else {
                    auto kids = p->kids;
                    kids[side] = s.target;
                    out.push_back({std::nullopt, make_node(PK::Ext, kids, p->loc)});
                }
            }
        }
        break;
    case PK::Int:
        out.push_back({std::nullopt, p->kids[0]});
        out.push_back({std::nullopt, p->kids[1]});
        break;
    case PK::Slide:
        for (auto& s : std_steps(p->kids[0], defs, tsize)) {
            if (s.ev) out.push_back(std::move(s));
            else out.push_back({std::nullopt, make_node(PK::Slide, {s.target, p->kids[1]}, p->loc)});
        }
        out.push_back({std::nullopt, p->kids[1]});
        break;
    case PK::If: {
        Value v = eval(p->cond);
        return std_steps(p->kids[(!v.is_atom() && v.num != 0) ? 0 : 1], defs, tsize);
    }
    case PK::Call:
        out.push_back({std::nullopt, unfold_call(*p, defs)});
        break;
    case PK::Hide:
        for (auto& s : std_steps(p->kids[0], defs, tsize)) {
            auto q = std::make_shared<Proc>(*p);
            q->kids = {s.target};
            if (s.ev && in_event_set(p->set, *s.ev)) s.ev.reset();
            out.push_back({s.ev, q});
        }
        break;
    case PK::Rename:
        for (auto& s : std_steps(p->kids[0], defs, tsize)) {
            auto q = std::make_shared<Proc>(*p);
            q->kids = {s.target};
            if (!s.ev) {
                out.push_back({std::nullopt, q});
                continue;
            }
            bool renamed = false;
            for (const auto& [from, to] : p->renames) {
                if (from != s.ev->channel) continue;
                renamed = true;
                out.push_back({Event{to, s.ev->vals}, q});
            }
            if (!renamed) out.push_back({s.ev, q});
        }
        break;
    case PK::APar:
    case PK::SPar:
    case PK::Inter: {
        auto ls = std_steps(p->kids[0], defs, tsize);
        auto rs = std_steps(p->kids[1], defs, tsize);
        auto with = [&](const ProcP& l, const ProcP& r) {
            auto q = std::make_shared<Proc>(*p);
            q->kids = {l, r};
            return ProcP(q);
        };
        // side: 0 = left only, 1 = right only, 2 = synchronised, 3 = blocked.
        auto mode = [&](int side, const Event& e) {
            if (p->kind == PK::Inter) return side;
            if (p->kind == PK::SPar) return in_event_set(p->set, e) ? 2 : side;
            bool in_l = in_event_set(p->set, e), in_r = in_event_set(p->set2, e);
            if (in_l && in_r) return 2;
            if (side == 0) return in_l ? 0 : 3;
            return in_r ? 1 : 3;
        };
        for (auto& s : ls) {
            if (!s.ev) {
                out.push_back({std::nullopt, with(s.target, p->kids[1])});
                continue;
            }
            int m = mode(0, *s.ev);
            if (m == 0) out.push_back({s.ev, with(s.target, p->kids[1])});
            if (m != 2) continue;
            for (auto& r : rs)
                if (r.ev && *r.ev == *s.ev) out.push_back({s.ev, with(s.target, r.target)});
        }
        for (auto& s : rs) {
            if (!s.ev) {
                out.push_back({std::nullopt, with(p->kids[0], s.target)});
                continue;
            }
            if (mode(1, *s.ev) == 1) out.push_back({s.ev, with(p->kids[0], s.target)});
        }
        break;
    }
    case PK::ReplAPar:
    case PK::ReplInter:
    case PK::ReplExt:
        return std_steps(expand_replicated(*p, defs, tsize), defs, tsize);
    case PK::ReplInt: {
        auto vals = domain_values(p->dom, defs, tsize);
        if (vals.empty()) throw Diagnostic("replicated internal choice over an empty set");
        for (const auto& v : vals)
            out.push_back({std::nullopt, substitute(p->kids[0], std::map<std::string, Value>{{p->var, v}})});
        break;
    }
    }
    return out;
}

Lts build_lts(const ProcP& root, const Definitions& defs, int tsize, std::size_t max_states)
{
    if (tsize < 1) throw Diagnostic("#T must be at least 1");
    Lts l;
    l.tsize = tsize;
    std::vector<ProcP> terms;
    std::deque<int> queue;
    auto visit = [&](const ProcP& p) {
        auto [id, fresh] = l.add_state(canonical_key(p), print_proc(p));
        if (fresh) {
            if (l.num_states() > max_states)
                throw Diagnostic("state bound " + std::to_string(max_states) +
                                 " exceeded; frontier state: " + print_proc(p));
            terms.push_back(p);
            queue.push_back(id);
        }
        return id;
    };
    l.root = visit(root);
    std::set<std::string> used;
    while (!queue.empty()) {
        int s = queue.front();
        queue.pop_front();
        ProcP p = terms[static_cast<std::size_t>(s)];
        for (const auto& st : std_steps(p, defs, tsize)) {
            int label = 0;
            if (st.ev) {
                label = l.intern(*st.ev);
                used.insert(st.ev->channel);
            }
            int d = visit(st.target);
            l.add_edge(s, label, d);
        }
    }
    for (const auto& ch : used) {
        auto es = channel_events(ch, defs, tsize);
        l.alphabet.insert(es.begin(), es.end());
    }
    return l;
}

Lts rename_lts(const Lts& l, const std::function<Event(const Event&)>& f)
{
    Lts r;
    r.tsize = l.tsize;
    for (std::size_t s = 0; s < l.num_states(); ++s) r.add_state(l.keys[s], l.names[s]);
    r.root = l.root;
    for (const auto& t : l.tags) r.tag_id(t);
    for (std::size_t s = 0; s < l.num_states(); ++s)
        for (const auto& e : l.out[s])
            r.add_edge(static_cast<int>(s), e.label == 0 ? 0 : r.intern(f(l.event(e.label))), e.dst, e.tag);
    for (const auto& e : l.alphabet) r.alphabet.insert(f(e));
    return r;
}

// ------------------------------------------------------------ output

namespace {

std::string hash_id(const std::string& s)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream o;
    o << 's' << std::hex << h;
    return o.str();
}

std::string dot_escape(const std::string& s)
{
    std::string r;
    for (char c : s) {
        if (c == '"' || c == '\\') r += '\\';
        if (c == '\n') {
            r += "\\n";
            continue;
        }
        r += c;
    }
    return r;
}

}  // namespace

std::string to_dot(const Lts& l)
{
    std::ostringstream o;
    o << "digraph lts {\n  node [shape=box];\n";
    for (std::size_t s = 0; s < l.num_states(); ++s) {
        o << "  " << hash_id(l.keys[s]) << " [label=\"" << dot_escape(l.names[s]) << "\"";
        if (static_cast<int>(s) == l.root) o << ", penwidth=2";
        o << "];\n";
    }
    for (std::size_t s = 0; s < l.num_states(); ++s)
        for (const auto& e : l.out[s])
            o << "  " << hash_id(l.keys[s]) << " -> " << hash_id(l.keys[static_cast<std::size_t>(e.dst)])
              << " [label=\"" << dot_escape(l.label_str(e.label)) << "\"];\n";
    o << "}\n";
    return o.str();
}

std::string format_trace(const std::vector<Event>& tr)
{
    std::string s = "<";
    for (std::size_t i = 0; i < tr.size(); ++i) s += (i ? ", " : "") + tr[i].str();
    return s + ">";
}

std::string format_events(const std::set<Event>& es)
{
    std::string s = "{";
    bool first = true;
    for (const auto& e : es) {
        s += (first ? "" : ", ") + e.str();
        first = false;
    }
    return s + "}";
}

}  // namespace pcsp
