// Syntactic side conditions on specifications and implementations.
#pragma once

#include "pcsp/syntax.hpp"

#include <string>
#include <vector>

namespace pcsp {

enum class Verdict3 { Pass, Fail, EvidenceOnly };

struct Finding {
    std::string clause;  // e.g. "(v)" or "bullet 1"
    SourceLoc loc;
    std::string explanation;
};

struct ConditionReport {
    std::string condition;
    Verdict3 verdict = Verdict3::Pass;
    std::vector<Finding> findings;
    std::string note;  // e.g. sizes used for evidence-only verdicts

    bool passed() const { return verdict != Verdict3::Fail; }
    bool has_clause(const std::string& clause) const;
    std::string str() const;  // one header line plus one line per finding
};

std::string verdict_str(Verdict3 v);

// Every checker works on a named definition together with all definitions
// reachable from it through calls.
ConditionReport check_data_independence(const std::string& proc, const Definitions& defs);
ConditionReport check_seq(const std::string& proc, const Definitions& defs);
ConditionReport check_seqnorm(const std::string& proc, const Definitions& defs);
ConditionReport check_typesym_syntactic(const std::string& proc, const Definitions& defs);
ConditionReport check_no_mixed_inputs(const std::string& proc, const Definitions& defs);

// Positive-conjunction syntax plus else-refines-then spot checks at the given
// sizes.  Never returns Pass, only EvidenceOnly or Fail.
ConditionReport revposconjeqt_evidence(const std::string& proc, const Definitions& defs, Model model,
                                       const std::vector<int>& sizes);

// Definitions reachable from `proc` through calls, `proc` first, then in
// declaration order.
std::vector<std::string> reachable_defs(const std::string& proc, const Definitions& defs);

}  // namespace pcsp
