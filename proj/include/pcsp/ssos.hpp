// Semi-symbolic operational semantics: the SSLTS of a Seq process with t
// left symbolic.
#pragma once

#include "pcsp/std_semantics.hpp"
#include "pcsp/syntax.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace pcsp {

struct SymField {
    enum class Kind { Dollar, Query, BangVar, BangVal };
    Kind kind = Kind::BangVal;
    std::string var;  // Dollar, Query, BangVar
    Value val;        // BangVal
    bool is_t = false;

    friend bool operator==(const SymField&, const SymField&) = default;
};

// Visible symbolic event; carries no non-t selections or inputs.
struct SymbolicEvent {
    std::string channel;
    std::vector<SymField> fields;

    std::string str() const;
    std::size_t count(SymField::Kind k) const;
    friend bool operator==(const SymbolicEvent&, const SymbolicEvent&) = default;
};

struct SymbolicLabel {
    enum class Kind { Tau, Vis, Cond };
    Kind kind = Kind::Tau;
    SymbolicEvent ev;    // Vis
    ExprP cond;          // Cond
    bool negated = false;

    static SymbolicLabel tau() { return {}; }
    std::string str() const;  // also the identity key of the label
    bool is_vis() const { return kind == Kind::Vis; }
};

// One SSOS transition.  For Vis steps `path` locates the firing construct by
// child indices through choices and conditionals, and `tag` names it.
struct SymStep {
    SymbolicLabel label;
    ProcP target;
    std::vector<int> path;
    std::string tag;
};

std::vector<SymStep> ssos_steps(const ProcP& p, const Definitions& defs);

struct Sslts {
    struct Edge {
        int label = 0;  // index into labels
        int dst = 0;
        int tag = -1;
    };

    std::vector<ProcP> terms;
    std::vector<std::string> keys;
    std::vector<std::vector<Edge>> out;
    std::vector<SymbolicLabel> labels;
    std::vector<std::string> tags;
    int root = 0;
    // Regularity violations found during construction: equal visible labels
    // reaching different targets, and conditionals with no prefix after them.
    // Empty for SeqNorm processes.
    std::vector<std::string> violations;

    std::size_t num_states() const { return keys.size(); }
    std::size_t num_edges() const;
    const SymbolicLabel& label(const Edge& e) const { return labels.at(static_cast<std::size_t>(e.label)); }
};

// Builds the SSLTS of a definition body; throws Diagnostic if it is not Seq.
Sslts build_sslts(const Definitions& defs, const std::string& name, std::size_t max_states = kDefaultMaxStates);
// Builds from an arbitrary term without the Seq check.
Sslts build_sslts_term(const ProcP& root, const Definitions& defs, std::size_t max_states = kDefaultMaxStates);

using SymbolicTrace = std::vector<SymbolicLabel>;

// All root paths of at most maxlen labels, deduplicated, in discovery order.
std::vector<SymbolicTrace> symbolic_traces(const Sslts& s, std::size_t maxlen);
bool nontau_equiv(const SymbolicTrace& a, const SymbolicTrace& b);
bool nont_equiv(const SymbolicTrace& a, const SymbolicTrace& b);
// Non-t projection of a Vis label: channel and non-t values.
std::string nont_projection(const SymbolicEvent& e);
std::string trace_str(const SymbolicTrace& s);

std::string to_dot(const Sslts& s);

}  // namespace pcsp
