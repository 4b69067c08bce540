// Abstract syntax for the CSP subset, the construct field algebra and
// term-level utilities (substitution, free variables, alpha-canonical keys).
#pragma once

#include <compare>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pcsp {

struct SourceLoc {
    int line = 0;
    int col = 0;
};

// Positioned error. `file` may be empty for errors raised outside parsing.
class Diagnostic : public std::runtime_error {
public:
    Diagnostic(std::string file, SourceLoc loc, const std::string& msg);
    explicit Diagnostic(const std::string& msg);

    std::string file;
    SourceLoc loc;
    std::string message;
};

struct Value {
    enum class Kind { Num, Atom };
    Kind kind = Kind::Num;
    int num = 0;
    std::string atom;

    static Value number(int n);
    static Value of_atom(std::string a);

    bool is_atom() const { return kind == Kind::Atom; }
    std::string str() const;

    friend bool operator==(const Value&, const Value&) = default;
    friend std::strong_ordering operator<=>(const Value& a, const Value& b);
};

struct Expr;
using ExprP = std::shared_ptr<const Expr>;

struct Expr {
    enum class Op { Var, Lit, Add, Sub, Mod, Min, Max, Eq, Ne, Lt, Le, Gt, Ge, And, Or, Not, True, False };
    Op op = Op::Lit;
    std::string name;  // Var
    Value lit;         // Lit
    std::vector<ExprP> args;
    bool t = false;  // term of the distinguished type
    SourceLoc loc;
};

ExprP make_var(std::string name, bool is_t, SourceLoc loc = {});
ExprP make_lit(Value v, bool is_t, SourceLoc loc = {});
ExprP make_op(Expr::Op op, std::vector<ExprP> args, SourceLoc loc = {});
ExprP make_bool(bool b);

enum class TypeKind { T, Named, Set, TMinus, Null };

// Field annotation or declared type.  `Set` lists members explicitly and
// `TMinus` is `t - {elems}`.
struct TypeExpr {
    TypeKind kind = TypeKind::Null;
    std::string name;
    std::vector<ExprP> elems;

    static TypeExpr t_type() { return {TypeKind::T, {}, {}}; }
    static TypeExpr named(std::string n) { return {TypeKind::Named, std::move(n), {}}; }
    static TypeExpr null() { return {}; }
};

enum class Sel { Dollar, Query, Bang };

struct Field {
    Sel sel = Sel::Bang;
    std::string var;  // Dollar / Query
    ExprP expr;       // Bang
    TypeExpr ann;     // Null for Bang
    bool is_t = false;  // position has type t in the channel signature
};

struct Construct {
    std::string channel;
    std::vector<Field> fields;
    SourceLoc loc;
};

// 1-based field index sets by selection kind and t-ness.
struct IndexSets {
    std::set<int> dollar_t, dollar_nont, query_t, query_nont, bang_t, bang_nont;
};

IndexSets classify_fields(const Construct& a);

enum class Scope { T, NonT, Both };
Construct replace_selections(const Construct& a, Scope scope);

struct EventSetItem {
    std::string channel;
    std::vector<ExprP> prefix;
    bool closure = true;  // {| c.v |} when true, exact event when false
};

struct EventSetExpr {
    std::vector<EventSetItem> items;
};

struct Proc;
using ProcP = std::shared_ptr<const Proc>;

enum class PK {
    Stop, Prefix, Ext, Int, Slide, If, Hide, Rename, APar, SPar, Inter,
    ReplAPar, ReplInter, ReplInt, ReplExt, Call
};

struct Proc {
    PK kind = PK::Stop;
    Construct cons;            // Prefix
    std::vector<ProcP> kids;   // operands / continuation / body
    ExprP cond;                // If
    EventSetExpr set, set2;    // Hide, SPar: set; APar: set (left), set2 (right); ReplAPar: set
    std::vector<std::pair<std::string, std::string>> renames;  // Rename: from <- to
    std::string var;           // replicated binder
    TypeExpr dom;              // replicated domain
    std::string name;          // Call
    std::vector<ExprP> args;   // Call
    SourceLoc loc;
};

ProcP make_stop();
ProcP make_prefix(Construct c, ProcP cont);
ProcP make_binary(PK k, ProcP l, ProcP r);
ProcP make_if(ExprP cond, ProcP then_p, ProcP else_p);
ProcP make_call(std::string name, std::vector<ExprP> args);

struct TypeDecl {
    std::string name;
    std::vector<Value> values;
    bool numeric = false;
};

struct ChannelDecl {
    std::string name;
    std::vector<TypeExpr> sig;  // T or Named
    SourceLoc loc;
};

struct Param {
    std::string name;
    TypeExpr type;  // T or Named
};

struct ProcDef {
    std::string name;
    std::vector<Param> params;
    ProcP body;
    SourceLoc loc;
};

enum class Model { Traces, Failures };

struct Assertion {
    std::string spec, impl;
    Model model = Model::Traces;
};

// The global environment E plus declarations.
struct Definitions {
    std::string file;
    std::map<std::string, TypeDecl> types;
    std::vector<std::string> type_order;
    std::map<std::string, ChannelDecl> channels;
    std::vector<std::string> channel_order;
    std::map<std::string, ProcDef> procs;
    std::vector<std::string> proc_order;
    std::vector<Assertion> assertions;

    const ProcDef& proc(const std::string& name) const;
    const ChannelDecl& channel(const std::string& name) const;
    std::vector<Value> type_values(const std::string& name) const;
};

// Concrete event c.v1...vk.
struct Event {
    std::string channel;
    std::vector<Value> vals;

    std::string str() const;
    friend bool operator==(const Event&, const Event&) = default;
    friend std::strong_ordering operator<=>(const Event& a, const Event& b);
};

// Expression utilities.
std::set<std::string> free_vars(const ExprP& e);
ExprP subst_expr(const ExprP& e, const std::map<std::string, ExprP>& m);
Value eval(const ExprP& e);  // closed expressions only
bool is_closed(const ExprP& e);
std::string print_expr(const ExprP& e);

// Values in a field annotation or replicated domain; `tsize` instantiates t.
std::vector<Value> domain_values(const TypeExpr& ty, const Definitions& defs, int tsize);

// Term utilities.
std::set<std::string> free_vars(const ProcP& p);
ProcP substitute(const ProcP& p, const std::map<std::string, ExprP>& m);
ProcP substitute(const ProcP& p, const std::map<std::string, Value>& m);
ProcP alpha_canonical(const ProcP& p);
std::string canonical_key(const ProcP& p);  // equal iff alpha-equivalent
std::string dump(const ProcP& p);           // structural dump, locations excluded

// Channel names of the initial constructs.
std::set<std::string> channels(const ProcP& p, const Definitions& defs);

// Comms(a) for #$(a)=0 at instantiation size tsize.
std::set<Event> comms(const Construct& a, const Definitions& defs, int tsize);
// Comms^non-t(a) for #$non-t(a)=0: non-t inputs resolved to outputs.
std::vector<Construct> comms_nont(const Construct& a, const Definitions& defs);

// Prefix term with the binder fields at the given 0-based indices turned into
// outputs of the given values; later fields and the continuation see them.
ProcP bind_fields(const ProcP& prefix, const std::map<size_t, Value>& vals);

// Definition body with arguments substituted; the root of a semantics.
ProcP instantiate(const Definitions& defs, const std::string& name, const std::vector<ExprP>& args);
ProcP unfold_call(const Proc& call, const Definitions& defs);

std::string type_str(const TypeExpr& t);
std::string print_construct(const Construct& c);
std::string print_proc(const ProcP& p);
std::string print_definitions(const Definitions& defs);

// Calls f on every tuple of the Cartesian product of `doms`.
void for_each_tuple(const std::vector<std::vector<Value>>& doms,
                    const std::function<void(const std::vector<Value>&)>& f);

// Fresh variable name, priming `base` until it avoids `used`.
std::string fresh_name(const std::string& base, const std::set<std::string>& used);

}  // namespace pcsp
