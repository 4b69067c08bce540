// Type reduction: collapsing functions, thresholds and the end-to-end
// parameterised verification pipeline.
#pragma once

#include "pcsp/analysis.hpp"
#include "pcsp/cose.hpp"
#include "pcsp/ssos.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace pcsp {

// B-collapsing function: identity below B, B from B upwards.
struct Collapse {
    int B = 1;

    Value apply(const Value& v) const;
    Event apply(const Definitions& defs, const Event& e) const;
    Trace apply(const Definitions& defs, const Trace& tr) const;
    std::set<Event> apply(const Definitions& defs, const std::set<Event>& xs) const;
    Env apply(const Env& g) const;
    // Events of T = {0..tsize-1} collapsing to e.
    std::set<Event> inverse(const Definitions& defs, int tsize, const Event& e) const;
    // phi(L): the LTS with every event collapsed.
    Lts apply(const Definitions& defs, const Lts& l) const;
};

struct ThresholdResult {
    int value = 0;
    std::string witness;  // what achieves the maximum
};

// Maximum number of t output positions over non-t equivalent symbolic
// traces ending in equivalent events.
ThresholdResult thresh_traces(const Sslts& s, std::size_t max_subsets = kDefaultMaxStates);
// max(Thresh_T, distinct t output variables plus t inputs enabled at once).
// Throws Diagnostic unless the definition is SeqNorm without mixed inputs.
ThresholdResult thresh_failures(const Definitions& defs, const std::string& spec,
                                std::size_t max_states = kDefaultMaxStates);
ThresholdResult thresh_failures_sslts(const Sslts& s, std::size_t max_subsets = kDefaultMaxStates);

struct PmcpOptions {
    std::string spec, impl;
    std::optional<std::string> abst;  // via-abstraction mode
    int valid_from = 0;               // abstraction premise asserted for #T >= valid_from
    Model model = Model::Traces;
    std::vector<int> sizes;
    std::vector<int> evidence_sizes{2, 3};  // RevPosConjEqT and TypeSym spot checks
    bool assume_typesym = false;             // user asserts TypeSym of the implementation
    std::size_t max_states = kDefaultMaxStates;
};

struct SizeResult {
    int n = 0;
    std::string check;  // "direct", "collapsed" or "premise"
    std::string lhs, rhs;
    bool holds = true;
    std::string counterexample;
};

struct NamedReport {
    std::string process;
    ConditionReport report;
};

struct PmcpVerdict {
    std::string mode;  // "direct-per-size" or "via-abstraction"
    Model model = Model::Traces;
    std::optional<int> B;
    std::optional<int> thresh_traces, thresh_failures;
    std::string witness;
    std::vector<NamedReport> conditions;
    bool hypotheses_ok = true;
    std::optional<SizeResult> abst_check;
    std::vector<SizeResult> sizes;
    std::string conclusion;
    std::vector<std::string> caveats;

    bool all_hold() const;
    nlohmann::ordered_json to_json() const;
    std::string text() const;
};

PmcpVerdict verify_pmcp(const Definitions& defs, const PmcpOptions& opt);

// The worked trace and failure membership claims for
// Proc(x) = c!x$y:t?z:t -> if y == z then d!x -> STOP else d$w:t -> STOP.
struct PropCase {
    std::string name;
    bool expected = true;
    bool actual = false;
    std::string detail;
};
std::vector<PropCase> bigprop_cases(const Definitions& defs);

}  // namespace pcsp
