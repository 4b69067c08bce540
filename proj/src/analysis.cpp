#include "pcsp/analysis.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>

namespace pcsp {

// ------------------------------------------------------------ closures

std::set<int> tau_closure(const Lts& l, const std::set<int>& from)
{
    std::set<int> seen = from;
    std::vector<int> stack(from.begin(), from.end());
    while (!stack.empty()) {
        int s = stack.back();
        stack.pop_back();
        for (const auto& e : l.out[static_cast<std::size_t>(s)])
            if (e.label == 0 && seen.insert(e.dst).second) stack.push_back(e.dst);
    }
    return seen;
}

namespace {

std::map<Event, std::set<int>> visible_moves(const Lts& l, const std::set<int>& subset)
{
    std::map<Event, std::set<int>> m;
    for (int s : subset)
        for (const auto& e : l.out[static_cast<std::size_t>(s)])
            if (e.label != 0) m[l.event(e.label)].insert(e.dst);
    return m;
}

// States from which a tau-cycle is reachable through tau edges.
std::vector<bool> divergent_states(const Lts& l)
{
    std::size_t n = l.num_states();
    // Tarjan SCCs of the tau subgraph.
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    int counter = 0, ncomp = 0;
    std::vector<bool> cyclic_comp;
    for (std::size_t start = 0; start < n; ++start) {
        if (index[start] != -1) continue;
        std::vector<std::pair<int, std::size_t>> work{{static_cast<int>(start), 0}};
        index[start] = low[start] = counter++;
        stack.push_back(static_cast<int>(start));
        on_stack[start] = true;
        while (!work.empty()) {
            auto& [v, i] = work.back();
            const auto& outs = l.out[static_cast<std::size_t>(v)];
            if (i < outs.size()) {
                const auto& e = outs[i++];
                if (e.label != 0) continue;
                auto w = static_cast<std::size_t>(e.dst);
                if (index[w] == -1) {
                    index[w] = low[w] = counter++;
                    stack.push_back(e.dst);
                    on_stack[w] = true;
                    work.push_back({e.dst, 0});
                } else if (on_stack[w]) {
                    low[static_cast<std::size_t>(v)] = std::min(low[static_cast<std::size_t>(v)], index[w]);
                }
                continue;
            }
            auto vu = static_cast<std::size_t>(v);
            if (low[vu] == index[vu]) {
                bool cyclic = false;
                std::vector<int> members;
                while (true) {
                    int w = stack.back();
                    stack.pop_back();
                    on_stack[static_cast<std::size_t>(w)] = false;
                    comp[static_cast<std::size_t>(w)] = ncomp;
                    members.push_back(w);
                    if (w == v) break;
                }
                if (members.size() > 1) cyclic = true;
                for (const auto& e : l.out[vu])
                    if (e.label == 0 && e.dst == v) cyclic = true;
                cyclic_comp.push_back(cyclic);
                ++ncomp;
            }
            int done = v;
            work.pop_back();
            if (!work.empty()) {
                auto pu = static_cast<std::size_t>(work.back().first);
                low[pu] = std::min(low[pu], low[static_cast<std::size_t>(done)]);
            }
        }
    }
    // Propagate backwards: Tarjan emits components in reverse topological order.
    std::vector<bool> div(n, false);
    std::vector<std::vector<int>> members(static_cast<std::size_t>(ncomp));
    for (std::size_t s = 0; s < n; ++s) members[static_cast<std::size_t>(comp[s])].push_back(static_cast<int>(s));
    for (int c = 0; c < ncomp; ++c) {
        bool d = cyclic_comp[static_cast<std::size_t>(c)];
        for (int s : members[static_cast<std::size_t>(c)])
            for (const auto& e : l.out[static_cast<std::size_t>(s)])
                if (e.label == 0 && comp[static_cast<std::size_t>(e.dst)] != c && div[static_cast<std::size_t>(e.dst)])
                    d = true;
        for (int s : members[static_cast<std::size_t>(c)]) div[static_cast<std::size_t>(s)] = d;
    }
    return div;
}

std::vector<std::set<Event>> minimise(std::vector<std::set<Event>> accs)
{
    std::sort(accs.begin(), accs.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    std::vector<std::set<Event>> out;
    for (const auto& a : accs) {
        bool dominated = false;
        for (const auto& m : out)
            if (std::includes(a.begin(), a.end(), m.begin(), m.end())) dominated = true;
        if (!dominated) out.push_back(a);
    }
    return out;
}

}  // namespace

NormalisedSpec normalise(const Lts& l)
{
    NormalisedSpec n;
    std::vector<bool> div = divergent_states(l);
    std::map<std::set<int>, int> index;
    std::deque<int> queue;
    auto visit = [&](std::set<int> s) {
        auto it = index.find(s);
        if (it != index.end()) return it->second;
        int id = static_cast<int>(n.subsets.size());
        index.emplace(s, id);
        std::vector<std::set<Event>> accs;
        bool d = false;
        for (int u : s) {
            if (l.stable(u)) accs.push_back(l.initials(u));
            if (div[static_cast<std::size_t>(u)]) d = true;
        }
        n.subsets.push_back(std::move(s));
        n.succ.emplace_back();
        n.min_acceptances.push_back(minimise(std::move(accs)));
        n.divergent.push_back(d);
        queue.push_back(id);
        return id;
    };
    n.root = visit(tau_closure(l, {l.root}));
    while (!queue.empty()) {
        int id = queue.front();
        queue.pop_front();
        auto moves = visible_moves(l, n.subsets[static_cast<std::size_t>(id)]);
        for (auto& [ev, dsts] : moves) {
            int d = visit(tau_closure(l, dsts));
            n.succ[static_cast<std::size_t>(id)][ev] = d;
        }
    }
    return n;
}

// ------------------------------------------------------------ refinement

std::string RefinementResult::str() const
{
    if (holds) return "holds";
    if (refusal) return "failure (" + format_trace(trace) + ", " + format_events(*refusal) + ")";
    Trace t = trace;
    if (event) t.push_back(*event);
    return "trace " + format_trace(t);
}

namespace {

RefinementResult refinement(const Lts& spec, const Lts& impl, bool failures)
{
    NormalisedSpec ns = normalise(spec);
    std::set<Event> sigma = spec.alphabet;
    sigma.insert(impl.alphabet.begin(), impl.alphabet.end());
    struct Node {
        int spec;
        std::set<int> impl;
        int parent;
        std::optional<Event> via;
    };
    std::vector<Node> nodes;
    std::map<std::pair<int, std::set<int>>, int> seen;
    auto trace_of = [&](int id) {
        Trace t;
        for (int k = id; nodes[static_cast<std::size_t>(k)].via; k = nodes[static_cast<std::size_t>(k)].parent)
            t.push_back(*nodes[static_cast<std::size_t>(k)].via);
        std::reverse(t.begin(), t.end());
        return t;
    };
    auto add = [&](int sp, std::set<int> im, int parent, std::optional<Event> via) {
        auto key = std::make_pair(sp, im);
        if (seen.count(key)) return;
        seen.emplace(key, static_cast<int>(nodes.size()));
        nodes.push_back({sp, std::move(im), parent, std::move(via)});
    };
    add(ns.root, tau_closure(impl, {impl.root}), -1, std::nullopt);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        Node cur = nodes[k];
        auto sp = static_cast<std::size_t>(cur.spec);
        if (failures) {
            for (int s : cur.impl) {
                if (!impl.stable(s)) continue;
                std::set<Event> init = impl.initials(s);
                bool ok = false;
                for (const auto& acc : ns.min_acceptances[sp])
                    if (std::includes(init.begin(), init.end(), acc.begin(), acc.end())) ok = true;
                if (ok) continue;
                RefinementResult r;
                r.holds = false;
                r.trace = trace_of(static_cast<int>(k));
                std::set<Event> ref;
                std::set_difference(sigma.begin(), sigma.end(), init.begin(), init.end(),
                                    std::inserter(ref, ref.end()));
                r.refusal = ref;
                return r;
            }
        }
        for (auto& [ev, dsts] : visible_moves(impl, cur.impl)) {
            auto it = ns.succ[sp].find(ev);
            if (it == ns.succ[sp].end()) {
                RefinementResult r;
                r.holds = false;
                r.trace = trace_of(static_cast<int>(k));
                r.event = ev;
                return r;
            }
            add(it->second, tau_closure(impl, dsts), static_cast<int>(k), ev);
        }
    }
    return {};
}

}  // namespace

RefinementResult refines_traces(const Lts& spec, const Lts& impl) { return refinement(spec, impl, false); }
RefinementResult refines_failures(const Lts& spec, const Lts& impl) { return refinement(spec, impl, true); }
RefinementResult refines(const Lts& spec, const Lts& impl, Model m)
{
    return refinement(spec, impl, m == Model::Failures);
}

// ------------------------------------------------------------ queries

std::set<int> after(const Lts& l, const Trace& tr)
{
    std::set<int> cur = tau_closure(l, {l.root});
    for (const auto& e : tr) {
        auto it = l.event_index.find(e);
        if (it == l.event_index.end()) return {};
        std::set<int> nxt;
        for (int s : cur)
            for (const auto& ed : l.out[static_cast<std::size_t>(s)])
                if (ed.label == it->second) nxt.insert(ed.dst);
        if (nxt.empty()) return {};
        cur = tau_closure(l, nxt);
    }
    return cur;
}

bool has_trace(const Lts& l, const Trace& tr) { return !after(l, tr).empty(); }

std::set<Event> initials_after(const Lts& l, const Trace& tr)
{
    std::set<Event> r;
    for (int s : after(l, tr)) {
        auto i = l.initials(s);
        r.insert(i.begin(), i.end());
    }
    return r;
}

bool has_failure(const Lts& l, const Trace& tr, const std::set<Event>& refusal)
{
    for (int s : after(l, tr)) {
        if (!l.stable(s)) continue;
        auto init = l.initials(s);
        bool disjoint = std::none_of(refusal.begin(), refusal.end(), [&](const Event& e) { return init.count(e); });
        if (disjoint) return true;
    }
    return false;
}

std::vector<Trace> traces_of(const Lts& l, std::size_t depth)
{
    NormalisedSpec n = normalise(l);
    std::vector<Trace> out;
    std::function<void(int, Trace&)> rec = [&](int node, Trace& tr) {
        out.push_back(tr);
        if (tr.size() == depth) return;
        for (const auto& [ev, d] : n.succ[static_cast<std::size_t>(node)]) {
            tr.push_back(ev);
            rec(d, tr);
            tr.pop_back();
        }
    };
    Trace tr;
    rec(n.root, tr);
    std::sort(out.begin(), out.end(), [](const Trace& a, const Trace& b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    return out;
}

std::vector<std::set<Event>> maximal_refusals(const Lts& l, const Trace& tr, const std::set<Event>& sigma)
{
    std::set<std::set<Event>> r;
    for (int s : after(l, tr)) {
        if (!l.stable(s)) continue;
        auto init = l.initials(s);
        std::set<Event> ref;
        std::set_difference(sigma.begin(), sigma.end(), init.begin(), init.end(), std::inserter(ref, ref.end()));
        r.insert(ref);
    }
    return {r.begin(), r.end()};
}

// ------------------------------------------------------------ bisimulation

BisimResult strong_bisim(const Lts& a, const Lts& b)
{
    std::size_t na = a.num_states(), n = na + b.num_states();
    // Global labels: 0 is tau, events numbered in sorted order.
    std::map<Event, int> glob;
    for (const auto& e : a.events) glob.emplace(e, 0);
    for (const auto& e : b.events) glob.emplace(e, 0);
    int next = 1;
    std::vector<Event> names{Event{"tau", {}}};
    for (auto& [e, id] : glob) {
        id = next++;
        names.push_back(e);
    }
    struct E {
        int label, dst;
    };
    std::vector<std::vector<E>> out(n);
    for (std::size_t s = 0; s < na; ++s)
        for (const auto& e : a.out[s]) out[s].push_back({e.label ? glob[a.event(e.label)] : 0, e.dst});
    for (std::size_t s = 0; s < b.num_states(); ++s)
        for (const auto& e : b.out[s])
            out[na + s].push_back({e.label ? glob[b.event(e.label)] : 0, e.dst + static_cast<int>(na)});

    std::vector<std::vector<int>> rounds{std::vector<int>(n, 0)};
    std::size_t nblocks = 1;
    while (true) {
        const auto& prev = rounds.back();
        std::map<std::pair<int, std::set<std::pair<int, int>>>, int> sigs;
        std::vector<int> cur(n);
        for (std::size_t s = 0; s < n; ++s) {
            std::set<std::pair<int, int>> sig;
            for (const auto& e : out[s]) sig.insert({e.label, prev[static_cast<std::size_t>(e.dst)]});
            auto key = std::make_pair(prev[s], std::move(sig));
            auto it = sigs.find(key);
            if (it == sigs.end()) it = sigs.emplace(std::move(key), static_cast<int>(sigs.size())).first;
            cur[s] = it->second;
        }
        rounds.push_back(cur);
        if (sigs.size() == nblocks) break;
        nblocks = sigs.size();
    }
    std::size_t ra = static_cast<std::size_t>(a.root), rb = na + static_cast<std::size_t>(b.root);
    BisimResult res;
    if (rounds.back()[ra] == rounds.back()[rb]) return res;
    res.bisimilar = false;

    std::map<std::pair<std::size_t, std::size_t>, std::string> memo;
    std::function<std::string(std::size_t, std::size_t)> formula = [&](std::size_t s, std::size_t t) -> std::string {
        auto mk = std::make_pair(s, t);
        if (auto it = memo.find(mk); it != memo.end()) return it->second;
        std::size_t k = 1;
        while (rounds[k][s] == rounds[k][t]) ++k;
        const auto& prev = rounds[k - 1];
        auto try_side = [&](std::size_t x, std::size_t y, std::string& outf) {
            for (const auto& e : out[x]) {
                int bx = prev[static_cast<std::size_t>(e.dst)];
                std::vector<std::size_t> ys;
                bool matched = false;
                for (const auto& f : out[y]) {
                    if (f.label != e.label) continue;
                    if (prev[static_cast<std::size_t>(f.dst)] == bx) matched = true;
                    ys.push_back(static_cast<std::size_t>(f.dst));
                }
                if (matched) continue;
                std::set<std::string> conj;
                for (std::size_t yy : ys) conj.insert(formula(static_cast<std::size_t>(e.dst), yy));
                std::string body;
                for (const auto& c : conj) body += (body.empty() ? "" : " & ") + c;
                std::string lab = e.label ? names[static_cast<std::size_t>(e.label)].str() : "tau";
                outf = "<" + lab + ">" + (body.empty() ? "true" : conj.size() > 1 ? "(" + body + ")" : body);
                return true;
            }
            return false;
        };
        std::string f;
        if (!try_side(s, t, f)) {
            std::string g;
            try_side(t, s, g);
            f = "not " + (g.find(' ') == std::string::npos ? g : "(" + g + ")");
        }
        memo[mk] = f;
        return f;
    };
    res.formula = formula(ra, rb);
    return res;
}

bool divergence_free(const Lts& l)
{
    std::vector<bool> div = divergent_states(l);
    std::vector<bool> seen(l.num_states(), false);
    std::vector<int> stack{l.root};
    seen[static_cast<std::size_t>(l.root)] = true;
    while (!stack.empty()) {
        int s = stack.back();
        stack.pop_back();
        if (div[static_cast<std::size_t>(s)]) return false;
        for (const auto& e : l.out[static_cast<std::size_t>(s)])
            if (!seen[static_cast<std::size_t>(e.dst)]) {
                seen[static_cast<std::size_t>(e.dst)] = true;
                stack.push_back(e.dst);
            }
    }
    return true;
}

// ------------------------------------------------------------ symmetry

std::function<Event(const Event&)> lift_value_map(const Definitions& defs,
                                                  const std::function<Value(const Value&)>& pi)
{
    std::map<std::string, std::vector<bool>> tpos;
    for (const auto& [name, ch] : defs.channels) {
        std::vector<bool> v;
        for (const auto& ty : ch.sig) v.push_back(ty.kind == TypeKind::T);
        tpos[name] = v;
    }
    return [tpos, pi](const Event& e) {
        Event r = e;
        auto it = tpos.find(e.channel);
        if (it == tpos.end()) return r;
        for (std::size_t i = 0; i < r.vals.size() && i < it->second.size(); ++i)
            if (it->second[i]) r.vals[i] = pi(r.vals[i]);
        return r;
    };
}

BisimResult permutation_bisim(const Lts& l, const Definitions& defs, const std::vector<int>& perm)
{
    auto pi = [&perm](const Value& v) {
        if (v.is_atom() || v.num < 0 || v.num >= static_cast<int>(perm.size())) return v;
        return Value::number(perm[static_cast<std::size_t>(v.num)]);
    };
    return strong_bisim(l, rename_lts(l, lift_value_map(defs, pi)));
}

ConditionReport permutation_bisim_check(const ProcP& root, const Definitions& defs, const std::vector<int>& sizes,
                                        std::size_t max_states)
{
    ConditionReport rep;
    rep.condition = "TypeSym (permutation spot check)";
    std::string checked;
    for (int n : sizes) {
        Lts l = build_lts(root, defs, n, max_states);
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        do {
            BisimResult b = permutation_bisim(l, defs, perm);
            if (!b.bisimilar) {
                std::string ps;
                for (std::size_t i = 0; i < perm.size(); ++i)
                    ps += (i ? ", " : "") + std::to_string(i) + "->" + std::to_string(perm[i]);
                rep.verdict = Verdict3::Fail;
                rep.findings.push_back({"bijection", root->loc,
                                        "#T=" + std::to_string(n) + ", pi = {" + ps +
                                            "}: not bisimilar; distinguishing formula " + b.formula});
                return rep;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        checked += (checked.empty() ? "" : ", ") + std::to_string(n);
    }
    rep.verdict = Verdict3::EvidenceOnly;
    rep.note = "checked at sizes " + checked;
    return rep;
}

}  // namespace pcsp
