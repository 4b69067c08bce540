#include "pcsp/reduction.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <sstream>

namespace pcsp {

// ------------------------------------------------------------ collapsing

Value Collapse::apply(const Value& v) const
{
    if (v.is_atom() || v.num < B) return v;
    return Value::number(B);
}

Event Collapse::apply(const Definitions& defs, const Event& e) const
{
    return lift_value_map(defs, [this](const Value& v) { return apply(v); })(e);
}

Trace Collapse::apply(const Definitions& defs, const Trace& tr) const
{
    Trace r;
    for (const auto& e : tr) r.push_back(apply(defs, e));
    return r;
}

std::set<Event> Collapse::apply(const Definitions& defs, const std::set<Event>& xs) const
{
    std::set<Event> r;
    for (const auto& e : xs) r.insert(apply(defs, e));
    return r;
}

Env Collapse::apply(const Env& g) const
{
    Env r;
    for (const auto& [k, v] : g) r[k] = apply(v);
    return r;
}

std::set<Event> Collapse::inverse(const Definitions& defs, int tsize, const Event& e) const
{
    const ChannelDecl& ch = defs.channel(e.channel);
    if (ch.sig.size() != e.vals.size()) throw Diagnostic("arity mismatch in " + e.str());
    std::vector<std::vector<Value>> doms;
    for (std::size_t i = 0; i < e.vals.size(); ++i) {
        const Value& v = e.vals[i];
        if (ch.sig[i].kind != TypeKind::T || v.is_atom() || v.num < B) {
            doms.push_back({v});
            continue;
        }
        std::vector<Value> d;
        for (int w = B; w < tsize; ++w) d.push_back(Value::number(w));
        doms.push_back(d);
    }
    std::set<Event> out;
    for_each_tuple(doms, [&](const std::vector<Value>& vs) { out.insert(Event{e.channel, vs}); });
    return out;
}

Lts Collapse::apply(const Definitions& defs, const Lts& l) const
{
    return rename_lts(l, lift_value_map(defs, [this](const Value& v) { return apply(v); }));
}

// ------------------------------------------------------------ thresholds

namespace {

std::set<int> out_t_indices(const SymbolicEvent& ev)
{
    std::set<int> r;
    for (std::size_t i = 0; i < ev.fields.size(); ++i) {
        const auto& f = ev.fields[i];
        if (f.is_t && (f.kind == SymField::Kind::BangVar || f.kind == SymField::Kind::BangVal))
            r.insert(static_cast<int>(i) + 1);
    }
    return r;
}

std::set<int> silent_closure(const Sslts& s, std::set<int> xs)
{
    std::deque<int> q(xs.begin(), xs.end());
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (const auto& e : s.out[static_cast<std::size_t>(u)])
            if (!s.label(e).is_vis() && xs.insert(e.dst).second) q.push_back(e.dst);
    }
    return xs;
}

std::string set_str(const std::set<int>& xs)
{
    std::string r = "{";
    for (int x : xs) r += (r.size() > 1 ? ", " : "") + std::to_string(x);
    return r + "}";
}

}  // namespace

ThresholdResult thresh_traces(const Sslts& s, std::size_t max_subsets)
{
    ThresholdResult res;
    res.witness = "no visible symbolic events";
    bool found = false;
    std::map<std::set<int>, std::vector<std::string>> seen;
    std::deque<std::set<int>> q;
    auto start = silent_closure(s, {s.root});
    seen[start] = {};
    q.push_back(start);
    while (!q.empty()) {
        auto cur = q.front();
        q.pop_front();
        auto prefix = seen[cur];
        std::map<std::string, std::pair<std::set<int>, std::set<int>>> cls;  // projection -> (indices, targets)
        for (int u : cur)
            for (const auto& e : s.out[static_cast<std::size_t>(u)]) {
                const auto& l = s.label(e);
                if (!l.is_vis()) continue;
                auto& c = cls[nont_projection(l.ev)];
                auto idx = out_t_indices(l.ev);
                c.first.insert(idx.begin(), idx.end());
                c.second.insert(e.dst);
            }
        for (const auto& [proj, c] : cls) {
            auto tr = prefix;
            tr.push_back(proj);
            int v = static_cast<int>(c.first.size());
            if (v > res.value || !found) {
                found = true;
                res.value = v;
                std::string t;
                for (std::size_t i = 0; i < tr.size(); ++i) t += (i ? ", " : "") + tr[i];
                res.witness = "class <" + t + "> output t indices " + set_str(c.first);
            }
            auto nxt = silent_closure(s, c.second);
            if (!seen.count(nxt)) {
                if (seen.size() >= max_subsets)
                    throw Diagnostic("subset bound " + std::to_string(max_subsets) + " exceeded in threshold");
                seen[nxt] = tr;
                q.push_back(nxt);
            }
        }
    }
    return res;
}

namespace {

// Equality atoms of a t-condition and its evaluation under an assignment.
struct Atoms {
    std::vector<std::pair<std::string, std::string>> terms;
    std::map<std::string, int> index;

    static std::string term(const ExprP& e)
    {
        if (e->op == Expr::Op::Var) return e->name;
        if (e->op == Expr::Op::Lit) return "#" + e->lit.str();
        throw Diagnostic("unsupported term " + print_expr(e) + " in a t-condition");
    }

    void collect(const ExprP& e)
    {
        switch (e->op) {
        case Expr::Op::And:
        case Expr::Op::Or:
        case Expr::Op::Not:
            for (const auto& a : e->args) collect(a);
            return;
        case Expr::Op::True:
        case Expr::Op::False:
            return;
        case Expr::Op::Eq:
        case Expr::Op::Ne: {
            std::string a = term(e->args[0]), b = term(e->args[1]);
            if (a > b) std::swap(a, b);
            std::string k = a + "=" + b;
            if (!index.count(k)) {
                index[k] = static_cast<int>(terms.size());
                terms.push_back({a, b});
            }
            return;
        }
        default:
            throw Diagnostic("unsupported operator in t-condition " + print_expr(e));
        }
    }

    bool eval(const ExprP& e, const std::vector<bool>& asg) const
    {
        switch (e->op) {
        case Expr::Op::And:
            return std::all_of(e->args.begin(), e->args.end(), [&](const ExprP& a) { return eval(a, asg); });
        case Expr::Op::Or:
            return std::any_of(e->args.begin(), e->args.end(), [&](const ExprP& a) { return eval(a, asg); });
        case Expr::Op::Not:
            return !eval(e->args[0], asg);
        case Expr::Op::True:
            return true;
        case Expr::Op::False:
            return false;
        default: {
            std::string a = term(e->args[0]), b = term(e->args[1]);
            if (a > b) std::swap(a, b);
            bool v = asg[static_cast<std::size_t>(index.at(a + "=" + b))];
            return e->op == Expr::Op::Eq ? v : !v;
        }
        }
    }

    // Number of value classes if consistent over an unbounded domain.
    std::optional<int> consistent(const std::vector<bool>& asg) const
    {
        std::map<std::string, std::string> parent;
        std::function<std::string(const std::string&)> find = [&](const std::string& x) -> std::string {
            auto it = parent.find(x);
            if (it == parent.end() || it->second == x) return x;
            return parent[x] = find(it->second);
        };
        std::set<std::string> all;
        for (const auto& [a, b] : terms) {
            all.insert(a);
            all.insert(b);
        }
        for (std::size_t i = 0; i < terms.size(); ++i)
            if (asg[i]) parent[find(terms[i].first)] = find(terms[i].second);
        for (std::size_t i = 0; i < terms.size(); ++i)
            if (!asg[i] && find(terms[i].first) == find(terms[i].second)) return std::nullopt;
        std::map<std::string, std::set<std::string>> lits;  // class -> literal terms
        for (const auto& x : all)
            if (x[0] == '#') lits[find(x)].insert(x);
        for (const auto& [c, ls] : lits)
            if (ls.size() > 1) return std::nullopt;
        std::set<std::string> classes;
        for (const auto& x : all) classes.insert(find(x));
        return static_cast<int>(classes.size());
    }
};

struct FrontierEvent {
    SymbolicEvent ev;
    std::vector<SymbolicLabel> conds;
};

std::vector<FrontierEvent> frontier(const Sslts& s, int anchor)
{
    std::vector<FrontierEvent> out;
    std::set<std::pair<int, std::string>> seen;
    std::function<void(int, std::vector<SymbolicLabel>&)> go = [&](int u, std::vector<SymbolicLabel>& conds) {
        std::string key;
        for (const auto& c : conds) key += c.str() + ";";
        if (!seen.insert({u, key}).second) return;
        for (const auto& e : s.out[static_cast<std::size_t>(u)]) {
            const auto& l = s.label(e);
            if (l.is_vis()) {
                out.push_back({l.ev, conds});
            } else if (l.kind == SymbolicLabel::Kind::Cond) {
                conds.push_back(l);
                go(e.dst, conds);
                conds.pop_back();
            } else {
                go(e.dst, conds);
            }
        }
    };
    std::vector<SymbolicLabel> conds;
    go(anchor, conds);
    return out;
}

}  // namespace

ThresholdResult thresh_failures_sslts(const Sslts& s, std::size_t max_subsets)
{
    ThresholdResult tt = thresh_traces(s, max_subsets);
    ThresholdResult res;
    res.value = -1;
    std::set<int> anchors{s.root};
    for (const auto& es : s.out)
        for (const auto& e : es)
            if (s.label(e).is_vis()) anchors.insert(e.dst);
    int max_classes = 0;
    for (int a : anchors) {
        auto fr = frontier(s, a);
        Atoms atoms;
        for (const auto& f : fr)
            for (const auto& c : f.conds) atoms.collect(c.cond);
        std::size_t k = atoms.terms.size();
        if (k > 20) throw Diagnostic("too many t-equalities at one state for threshold computation");
        for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
            std::vector<bool> asg(k);
            for (std::size_t i = 0; i < k; ++i) asg[i] = (mask >> i) & 1;
            auto classes = atoms.consistent(asg);
            if (!classes) continue;
            std::set<std::string> outs;
            int ins = 0;
            for (const auto& f : fr) {
                bool on = std::all_of(f.conds.begin(), f.conds.end(), [&](const SymbolicLabel& c) {
                    bool v = atoms.eval(c.cond, asg);
                    return c.negated ? !v : v;
                });
                if (!on) continue;
                for (const auto& fld : f.ev.fields) {
                    if (!fld.is_t) continue;
                    if (fld.kind == SymField::Kind::BangVar) outs.insert(fld.var);
                    if (fld.kind == SymField::Kind::Query) ++ins;
                }
            }
            int v = static_cast<int>(outs.size()) + ins;
            if (v > res.value) {
                res.value = v;
                std::string o;
                for (const auto& x : outs) o += (o.empty() ? "" : ", ") + x;
                res.witness = "state " + print_proc(s.terms[static_cast<std::size_t>(a)]) + ": outputs {" + o +
                              "}, t inputs " + std::to_string(ins);
                max_classes = *classes;
            }
        }
    }
    if (tt.value >= res.value) {
        res.value = tt.value;
        res.witness = "traces threshold: " + tt.witness;
    } else if (max_classes > res.value + 1) {
        res.witness += "; realising this condition class needs #T >= " + std::to_string(max_classes);
    }
    return res;
}

ThresholdResult thresh_failures(const Definitions& defs, const std::string& spec, std::size_t max_states)
{
    for (const auto& r : {check_seqnorm(spec, defs), check_no_mixed_inputs(spec, defs)})
        if (!r.passed()) throw Diagnostic("failures threshold needs " + r.condition + " of " + spec + "\n" + r.str());
    return thresh_failures_sslts(build_sslts(defs, spec, max_states), max_states);
}

// ------------------------------------------------------------ pipeline

namespace {

std::string model_str(Model m) { return m == Model::Traces ? "traces" : "failures"; }
std::string sym(Model m) { return m == Model::Traces ? "[T=" : "[F="; }

std::string sizes_str(const std::vector<int>& xs)
{
    std::string r;
    for (int x : xs) r += (r.empty() ? "" : ", ") + std::to_string(x);
    return r;
}

Lts build(const Definitions& defs, const std::string& name, int tsize, std::size_t max)
{
    return build_lts(instantiate(defs, name, {}), defs, tsize, max);
}

SizeResult run_check(int n, const std::string& check, const std::string& lhs, const std::string& rhs, const Lts& a,
                     const Lts& b, Model m)
{
    SizeResult r;
    r.n = n;
    r.check = check;
    r.lhs = lhs;
    r.rhs = rhs;
    auto rr = refines(a, b, m);
    r.holds = rr.holds;
    if (!rr.holds) r.counterexample = rr.str();
    return r;
}

}  // namespace

bool PmcpVerdict::all_hold() const
{
    if (abst_check && !abst_check->holds) return false;
    return std::all_of(sizes.begin(), sizes.end(), [](const SizeResult& s) { return s.holds; });
}

nlohmann::ordered_json PmcpVerdict::to_json() const
{
    using nlohmann::ordered_json;
    ordered_json j;
    j["mode"] = mode;
    j["model"] = model_str(model);
    j["B"] = B ? ordered_json(*B) : ordered_json(nullptr);
    j["thresholds"] = {{"traces", thresh_traces ? ordered_json(*thresh_traces) : ordered_json(nullptr)},
                       {"failures", thresh_failures ? ordered_json(*thresh_failures) : ordered_json(nullptr)},
                       {"witness", witness}};
    ordered_json cs = ordered_json::array();
    for (const auto& c : conditions) {
        ordered_json fs = ordered_json::array();
        for (const auto& f : c.report.findings)
            fs.push_back({{"clause", f.clause}, {"line", f.loc.line}, {"col", f.loc.col}, {"explanation", f.explanation}});
        cs.push_back({{"process", c.process},
                      {"condition", c.report.condition},
                      {"verdict", verdict_str(c.report.verdict)},
                      {"note", c.report.note},
                      {"findings", fs}});
    }
    j["conditions"] = cs;
    auto size_json = [](const SizeResult& s) {
        ordered_json o{{"n", s.n}, {"check", s.check}, {"lhs", s.lhs}, {"rhs", s.rhs}, {"holds", s.holds}};
        if (!s.holds) o["counterexample"] = s.counterexample;
        return o;
    };
    if (abst_check) j["abstraction"] = size_json(*abst_check);
    ordered_json ss = ordered_json::array();
    for (const auto& s : sizes) ss.push_back(size_json(s));
    j["sizes"] = ss;
    j["conclusion"] = conclusion;
    j["caveats"] = caveats;
    return j;
}

std::string PmcpVerdict::text() const
{
    std::ostringstream o;
    o << "mode: " << mode << "\nmodel: " << model_str(model) << "\n";
    o << "B: " << (B ? std::to_string(*B) : "undetermined") << "\n";
    if (thresh_traces) o << "Thresh_T: " << *thresh_traces << "\n";
    if (thresh_failures) o << "Thresh: " << *thresh_failures << "\n";
    if (!witness.empty()) o << "witness: " << witness << "\n";
    for (const auto& c : conditions) {
        o << c.process << ": " << c.report.str();
        if (c.report.str().empty() || c.report.str().back() != '\n') o << "\n";
    }
    auto line = [&](const SizeResult& s) {
        o << "  " << s.check << " #T=" << s.n << ": " << s.lhs << " " << sym(model) << " " << s.rhs << " "
          << (s.holds ? "holds" : "FAILS " + s.counterexample) << "\n";
    };
    if (abst_check) line(*abst_check);
    for (const auto& s : sizes) line(s);
    o << "conclusion: " << conclusion << "\n";
    for (const auto& c : caveats) o << "caveat: " << c << "\n";
    return o.str();
}

PmcpVerdict verify_pmcp(const Definitions& defs, const PmcpOptions& opt)
{
    PmcpVerdict v;
    v.mode = opt.abst ? "via-abstraction" : "direct-per-size";
    v.model = opt.model;
    std::vector<std::string> failed;

    auto add = [&](const std::string& proc, ConditionReport r) {
        if (!r.passed()) failed.push_back(r.condition + " of " + proc);
        if (r.verdict == Verdict3::EvidenceOnly)
            v.caveats.push_back(r.condition + " of " + proc + " is supported by evidence only (" + r.note + ")");
        v.conditions.push_back({proc, std::move(r)});
    };

    add(opt.spec, check_seqnorm(opt.spec, defs));
    add(opt.spec, revposconjeqt_evidence(opt.spec, defs, opt.model, opt.evidence_sizes));
    if (opt.model == Model::Failures) add(opt.spec, check_no_mixed_inputs(opt.spec, defs));

    auto ts = check_typesym_syntactic(opt.impl, defs);
    if (!ts.passed() && opt.assume_typesym) {
        auto sem = permutation_bisim_check(instantiate(defs, opt.impl, {}), defs, opt.evidence_sizes, opt.max_states);
        v.caveats.push_back("TypeSym of " + opt.impl + " asserted by the user; permutation spot check: " +
                            verdict_str(sem.verdict) + (sem.note.empty() ? "" : " (" + sem.note + ")"));
        ts.verdict = sem.passed() ? Verdict3::EvidenceOnly : Verdict3::Fail;
        ts.note = "user-asserted";
        if (!sem.passed()) ts.findings.insert(ts.findings.end(), sem.findings.begin(), sem.findings.end());
    }
    add(opt.impl, ts);

    // Thresholds.
    bool spec_seq = v.conditions.front().report.passed();
    if (spec_seq) {
        try {
            Sslts s = build_sslts(defs, opt.spec, opt.max_states);
            auto tt = thresh_traces(s, opt.max_states);
            v.thresh_traces = tt.value;
            v.witness = tt.witness;
            if (opt.model == Model::Failures && failed.empty()) {
                auto tf = thresh_failures_sslts(s, opt.max_states);
                v.thresh_failures = tf.value;
                v.witness = tf.witness;
                v.caveats.push_back("failures threshold ranges over consistent equality assignments and may "
                                    "overestimate the least sufficient size");
            }
        } catch (const Diagnostic& d) {
            failed.push_back(std::string("threshold computation: ") + d.what());
        }
    }
    if (opt.model == Model::Traces) v.B = v.thresh_traces;
    else v.B = v.thresh_failures;

    if (opt.model == Model::Failures && v.B) {
        ConditionReport dv;
        dv.condition = "divergence freedom";
        if (!divergence_free(build(defs, opt.spec, *v.B + 1, opt.max_states))) {
            dv.verdict = Verdict3::Fail;
            dv.findings.push_back({"", {}, "Spec over {0.." + std::to_string(*v.B) + "} can diverge"});
        }
        add(opt.spec, dv);
    }

    v.hypotheses_ok = failed.empty() && v.B.has_value();
    for (const auto& f : failed) v.caveats.push_back("hypothesis failed: " + f);

    auto tset = [](int n) { return n == 1 ? std::string("{0}") : "{0.." + std::to_string(n - 1) + "}"; };

    std::vector<int> proved, sampled;
    if (!v.hypotheses_ok) {
        v.caveats.push_back("verdict downgraded to direct checks per size");
        for (int n : opt.sizes) {
            v.sizes.push_back(run_check(n, "direct", opt.spec + "(" + tset(n) + ")", opt.impl + "(" + tset(n) + ")",
                                        build(defs, opt.spec, n, opt.max_states),
                                        build(defs, opt.impl, n, opt.max_states), opt.model));
            if (v.sizes.back().holds) proved.push_back(n);
        }
        v.conclusion = proved.empty() ? "no refinement established"
                                      : opt.spec + "(T) " + sym(opt.model) + " " + opt.impl +
                                            "(T) for #T in {" + sizes_str(proved) + "} (checked directly)";
        return v;
    }

    int B = *v.B;
    Collapse phi{B};
    std::string that = tset(B + 1);
    Lts spec_hat = build(defs, opt.spec, B + 1, opt.max_states);

    int from = B + 1;
    std::optional<Lts> abst_hat;
    if (opt.abst) {
        from = std::max(from, opt.valid_from);
        abst_hat = build(defs, *opt.abst, B + 1, opt.max_states);
        v.abst_check = run_check(B + 1, "abstraction", opt.spec + "(" + that + ")", *opt.abst + "(" + that + ")",
                                 spec_hat, *abst_hat, opt.model);
    }

    for (int n : opt.sizes) {
        std::string tnn = tset(n);
        if (n < from) {
            v.sizes.push_back(run_check(n, "direct", opt.spec + "(" + tnn + ")", opt.impl + "(" + tnn + ")",
                                        build(defs, opt.spec, n, opt.max_states),
                                        build(defs, opt.impl, n, opt.max_states), opt.model));
            if (v.sizes.back().holds) proved.push_back(n);
            continue;
        }
        Lts collapsed = phi.apply(defs, build(defs, opt.impl, n, opt.max_states));
        if (opt.abst) {
            v.sizes.push_back(run_check(n, "premise", *opt.abst + "(" + that + ")", "phi(" + opt.impl + "(" + tnn + "))",
                                        *abst_hat, collapsed, opt.model));
            if (v.sizes.back().holds) sampled.push_back(n);
        } else {
            v.sizes.push_back(run_check(n, "collapsed", opt.spec + "(" + that + ")", "phi(" + opt.impl + "(" + tnn + "))",
                                        spec_hat, collapsed, opt.model));
            if (v.sizes.back().holds) proved.push_back(n);
        }
    }

    std::string rel = opt.spec + "(T) " + sym(opt.model) + " " + opt.impl + "(T)";
    if (opt.abst) {
        bool ok = v.abst_check->holds && sampled.size() == static_cast<std::size_t>(std::count_if(
                                                               opt.sizes.begin(), opt.sizes.end(),
                                                               [&](int n) { return n >= from; }));
        if (ok) {
            v.conclusion = rel + " for all #T >= " + std::to_string(from);
            v.caveats.push_back("premise " + *opt.abst + " " + sym(opt.model) + " phi(" + opt.impl + "(T)) for #T >= " +
                                std::to_string(from) + " is taken on assertion" +
                                (sampled.empty() ? "" : "; sampled at #T in {" + sizes_str(sampled) + "}"));
            if (!proved.empty()) v.conclusion += "; checked directly for #T in {" + sizes_str(proved) + "}";
        } else {
            v.conclusion = v.abst_check->holds ? "abstraction premise refuted by a sampled size"
                                               : opt.spec + "(" + that + ") does not refine the abstraction";
            if (!proved.empty()) v.conclusion += "; " + rel + " for #T in {" + sizes_str(proved) + "} (checked directly)";
        }
    } else {
        v.conclusion = proved.empty() ? "no refinement established"
                                      : rel + " for #T in {" + sizes_str(proved) + "}";
    }
    return v;
}

// ------------------------------------------------------------ propositions

std::vector<PropCase> bigprop_cases(const Definitions& defs)
{
    const int tsize = 3;
    const int B = 1;
    Collapse phi{B};
    auto N = [](int v) { return Value::number(v); };
    auto c = [&](int a, int b, int d) { return Event{"c", {N(a), N(b), N(d)}}; };
    auto d = [&](int a) { return Event{"d", {N(a)}}; };
    auto proc = [&](int x, int ts) {
        return build_lts(instantiate(defs, "Proc", {make_lit(N(x), true)}), defs, ts);
    };
    Lts p0 = proc(0, tsize), p2 = proc(2, tsize);
    std::set<Event> all_c = channel_events("c", defs, tsize);
    std::vector<PropCase> out;

    {
        PropCase pc{"traces (1)", true, true, "every <c.0.v2.v3> is a trace with x = 0"};
        for (int a = 0; a < tsize; ++a)
            for (int b = 0; b < tsize; ++b) pc.actual = pc.actual && has_trace(p0, {c(0, a, b)});
        out.push_back(pc);
    }
    {
        PropCase pc{"traces (2)", false, false, "no <c.1.v2.v3> is a trace with x = 2; output 1 is collapsed"};
        for (int a = 0; a < tsize; ++a)
            for (int b = 0; b < tsize; ++b) pc.actual = pc.actual || has_trace(p2, {c(1, a, b)});
        out.push_back(pc);
    }
    {
        PropCase pc{"traces (3)", true, true, "every <c.0.0.2, d.v> is a trace with x = 0"};
        for (int v = 0; v < tsize; ++v) pc.actual = pc.actual && has_trace(p0, {c(0, 0, 2), d(v)});
        pc.detail += has_trace(p0, {phi.apply(defs, c(0, 0, 2)), d(2)}) ? "; premise (ii) holds" : "; premise (ii) fails";
        out.push_back(pc);
    }
    {
        PropCase pc{"traces (4)", true, false, "<c.0.1.2, d.0> is a trace with x = 0"};
        pc.actual = has_trace(p0, {c(0, 1, 2), d(0)});
        pc.detail += has_trace(p0, {phi.apply(defs, c(0, 1, 2)), d(0)}) ? "; premise (ii) holds" : "; premise (ii) fails";
        out.push_back(pc);
    }

    auto minus = [](std::set<Event> a, const std::set<Event>& b) {
        for (const auto& e : b) a.erase(e);
        return a;
    };
    auto dset = [&](int except) {
        std::set<Event> r;
        for (int v = 0; v < tsize; ++v)
            if (v != except) r.insert(d(v));
        return r;
    };
    {
        std::set<Event> c01;
        for (int b = 0; b < tsize; ++b) c01.insert(c(0, 1, b));
        PropCase pc{"failures (1)", true, false, "(<>, {|c|} - {|c.0.1|}) is a failure with x = 0"};
        pc.actual = has_failure(p0, {}, minus(all_c, c01));
        out.push_back(pc);
    }
    {
        std::set<Event> c2;
        for (int a = 0; a < tsize; ++a)
            for (int b = 0; b < tsize; ++b) c2.insert(c(2, a, b));
        PropCase pc{"failures (2)", false, true, "(<>, {|c.2|}) is not a failure with x = 2; output 2 is collapsed"};
        Lts p1 = proc(1, tsize);
        pc.actual = has_failure(p2, {}, c2);
        pc.detail += has_failure(p1, {}, c2) ? "; premise (ii) holds with x = 1" : "; premise (ii) unexpectedly fails";
        out.push_back(pc);
    }
    {
        auto x = all_c;
        auto ds = dset(2);
        x.insert(ds.begin(), ds.end());
        PropCase pc{"failures (3)", true, false, "(<c.0.0.2>, {|c|} + {d.v | v != 2}) is a failure with x = 0"};
        pc.actual = has_failure(p0, {c(0, 0, 2)}, x);
        pc.detail += has_failure(p0, phi.apply(defs, Trace{c(0, 0, 2)}), x) ? "; premise (ii) holds" : "; premise (ii) fails";
        out.push_back(pc);
    }
    {
        auto x = all_c;
        auto ds = dset(0);
        x.insert(ds.begin(), ds.end());
        PropCase pc{"failures (4)", true, false, "(<c.0.1.2>, {|c|} + {d.v | v != 0}) is a failure with x = 0"};
        pc.actual = has_failure(p0, {c(0, 1, 2)}, x);
        pc.detail += has_failure(p0, phi.apply(defs, Trace{c(0, 1, 2)}), x) ? "; premise (ii) holds" : "; premise (ii) fails";
        out.push_back(pc);
    }
    return out;
}

}  // namespace pcsp
