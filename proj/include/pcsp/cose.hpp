// Concrete operational semantics with environments: instantiates the SSLTS of
// a Seq process at a concrete T, and relates symbolic and concrete traces.
#pragma once

#include "pcsp/analysis.hpp"
#include "pcsp/ssos.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pcsp {

using Env = std::map<std::string, Value>;

std::string env_str(const Env& g);

// Instantiations of a symbolic event consistent with g.
std::set<Event> insts(const SymbolicEvent& ev, const Env& g, int tsize);
// Bindings made by instantiating ev with e; throws on channel or arity mismatch.
Env match(const SymbolicEvent& ev, const Event& e);
// Truth of a Cond label under g; false when a variable is unbound.
bool holds_in(const SymbolicLabel& cond, const Env& g);

// sigma generates tr from g, and the final environments of all witnesses.
bool generates(const SymbolicTrace& sigma, const Env& g, const Trace& tr, int tsize);
std::vector<Env> generates_witnesses(const SymbolicTrace& sigma, const Env& g, const Trace& tr, int tsize);

// Configuration LTS rooted at (root(S), init, T).  State keys are the
// canonical keys of P[Gamma], so equal configurations share a state.
Lts concretize(const Sslts& s, const Definitions& defs, int tsize, const Env& init = {},
               std::size_t max_states = kDefaultMaxStates);
Lts concretize_term(const ProcP& root, const Definitions& defs, int tsize, const Env& init = {},
                    std::size_t max_states = kDefaultMaxStates);

struct RegularityReport {
    std::vector<std::string> env_uniqueness;    // trace and event reaching several configurations
    std::vector<std::string> unique_construct;  // trace and event fired by several constructs
    bool ok() const { return env_uniqueness.empty() && unique_construct.empty(); }
};

RegularityReport check_regularity(const Lts& cose);
// Edges of `small` missing from `big`, matched by state keys and events.
std::vector<std::string> check_monotonicity(const Lts& small, const Lts& big);

std::string to_dot_cose(const Lts& l);

}  // namespace pcsp
