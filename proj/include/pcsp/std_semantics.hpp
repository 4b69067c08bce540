// Standard concrete operational semantics: the LTS of P(T) for closed terms.
#pragma once

#include "pcsp/syntax.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pcsp {

inline constexpr std::size_t kDefaultMaxStates = 200000;

// Explicit LTS.  Label 0 is tau; label k > 0 is events[k - 1].
struct Lts {
    struct Edge {
        int label = 0;
        int dst = 0;
        int tag = -1;  // originating construct, -1 when untracked

        friend bool operator==(const Edge&, const Edge&) = default;
        friend auto operator<=>(const Edge&, const Edge&) = default;
    };

    std::vector<std::string> keys;   // canonical state keys, unique
    std::vector<std::string> names;  // human-readable state text
    std::vector<std::vector<Edge>> out;
    int root = 0;
    std::vector<Event> events;
    std::map<Event, int> event_index;
    std::set<Event> alphabet;  // all events of the channels used on visible edges
    std::vector<std::string> tags;  // tag id -> description
    int tsize = 0;

    int intern(const Event& e);
    int tag_id(const std::string& desc);
    // Returns the state for `key`, creating it if needed; second is true when new.
    std::pair<int, bool> add_state(const std::string& key, const std::string& name);
    void add_edge(int src, int label, int dst, int tag = -1);

    std::size_t num_states() const { return keys.size(); }
    std::size_t num_edges() const;
    const Event& event(int label) const { return events.at(static_cast<std::size_t>(label - 1)); }
    std::string label_str(int label) const;
    std::set<Event> initials(int s) const;  // visible events on outgoing edges
    bool stable(int s) const;               // no outgoing tau
    int find_state(const std::string& key) const;  // -1 when absent

private:
    std::map<std::string, int> key_index_;
    std::map<std::string, int> tag_index_;
};

// One transition of the standard semantics; `ev` empty means tau.
struct StdStep {
    std::optional<Event> ev;
    ProcP target;
};

// Successors of a closed term, in deterministic order.
std::vector<StdStep> std_steps(const ProcP& p, const Definitions& defs, int tsize);

// Breadth-first closure from `root`.  Throws Diagnostic when more than
// `max_states` states are reached.
Lts build_lts(const ProcP& root, const Definitions& defs, int tsize, std::size_t max_states = kDefaultMaxStates);

// Membership of a concrete event in an event-set expression (closed).
bool in_event_set(const EventSetExpr& s, const Event& e);

// All events of channel `ch` at instantiation size tsize.
std::set<Event> channel_events(const std::string& ch, const Definitions& defs, int tsize);

// Same graph with every visible label e replaced by f(e).
Lts rename_lts(const Lts& l, const std::function<Event(const Event&)>& f);

std::string to_dot(const Lts& l);
std::string format_trace(const std::vector<Event>& tr);
std::string format_events(const std::set<Event>& es);

}  // namespace pcsp
