// Trace and stable-failures extraction, refinement checking, strong
// bisimulation and divergence detection over explicit LTSs.
#pragma once

#include "pcsp/conditions.hpp"
#include "pcsp/std_semantics.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pcsp {

using Trace = std::vector<Event>;

// Deterministic automaton over visible events with minimal acceptances.
struct NormalisedSpec {
    std::vector<std::set<int>> subsets;             // tau-closed sets of LTS states
    std::vector<std::map<Event, int>> succ;
    std::vector<std::vector<std::set<Event>>> min_acceptances;  // from stable members
    std::vector<bool> divergent;
    int root = 0;
};

NormalisedSpec normalise(const Lts& l);

struct RefinementResult {
    bool holds = true;
    Trace trace;                           // counterexample trace
    std::optional<Event> event;            // trace counterexample: trace then event
    std::optional<std::set<Event>> refusal;  // failures counterexample: (trace, refusal)
    std::string str() const;
};

RefinementResult refines_traces(const Lts& spec, const Lts& impl);
RefinementResult refines_failures(const Lts& spec, const Lts& impl);
RefinementResult refines(const Lts& spec, const Lts& impl, Model m);

// Queries over the denotations.
std::set<int> tau_closure(const Lts& l, const std::set<int>& from);
std::set<int> after(const Lts& l, const Trace& tr);  // empty when tr is not a trace
bool has_trace(const Lts& l, const Trace& tr);
std::set<Event> initials_after(const Lts& l, const Trace& tr);
bool has_failure(const Lts& l, const Trace& tr, const std::set<Event>& refusal);
std::vector<Trace> traces_of(const Lts& l, std::size_t depth);  // sorted by length then lexicographically
// Maximal refusals Sigma minus initials of each stable state after tr.
std::vector<std::set<Event>> maximal_refusals(const Lts& l, const Trace& tr, const std::set<Event>& sigma);

struct BisimResult {
    bool bisimilar = true;
    std::string formula;  // distinguishing Hennessy-Milner formula, true of the first root only
};

BisimResult strong_bisim(const Lts& a, const Lts& b);
bool divergence_free(const Lts& l);

// Event renaming that applies `pi` at the t positions of each channel.
std::function<Event(const Event&)> lift_value_map(const Definitions& defs, const std::function<Value(const Value&)>& pi);

// Bisimilarity of L and L[[pi]] where perm[v] is the image of v.
BisimResult permutation_bisim(const Lts& l, const Definitions& defs, const std::vector<int>& perm);

// Bisimilarity of P(T) and P(T)[[pi]] for every bijection pi, at each size.
ConditionReport permutation_bisim_check(const ProcP& root, const Definitions& defs, const std::vector<int>& sizes,
                                        std::size_t max_states = kDefaultMaxStates);

}  // namespace pcsp
