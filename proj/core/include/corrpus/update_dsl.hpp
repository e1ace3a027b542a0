#pragma once

// The restricted update dialect: the Python-looking code a model writes
// inside `story()`. It is parsed into an explicit AST and interpreted against
// a WorldState; nothing here ever hands model output to a host interpreter.

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "corrpus/prompt_style.hpp"
#include "corrpus/world_model.hpp"

namespace corrpus {

struct Literal {
    enum class Form { single_quoted, double_quoted, bare, none };

    Form form = Form::double_quoted;
    std::string text;

    static Literal quoted(std::string text, char quote = '"');
    static Literal bare(std::string text);
    static Literal none();

    bool is_none() const { return form == Form::none; }
    bool operator==(const Literal&) const = default;
};

// `self.<entity>` or `self.<entity>.<attribute>`.
struct Path {
    std::string entity;
    std::optional<std::string> attribute;

    bool operator==(const Path&) const = default;
};

using Expr = std::variant<Path, Literal>;

struct ScalarAssign {
    Path target;
    Expr value;
    bool operator==(const ScalarAssign&) const = default;
};

struct ListAppend {
    Path target;
    Expr value;
    bool operator==(const ListAppend&) const = default;
};

struct ListRemove {
    Path target;
    Expr value;
    bool operator==(const ListRemove&) const = default;
};

struct MapAssign {
    Path target;
    Literal key;
    Expr value;
    bool operator==(const MapAssign&) const = default;
};

struct Argument {
    std::optional<std::string> keyword;
    Expr value;
    bool operator==(const Argument&) const = default;
};

struct AbstractCall {
    std::string function;
    bool method_form = false;  // `self.fn(...)` rather than `fn(...)`
    std::vector<Argument> args;
    bool operator==(const AbstractCall&) const = default;
};

struct Print {
    Expr value;
    bool operator==(const Print&) const = default;
};

struct Pass {
    bool operator==(const Pass&) const = default;
};

using StatementNode =
    std::variant<ScalarAssign, ListAppend, ListRemove, MapAssign, AbstractCall, Print, Pass>;

struct Statement {
    StatementNode node;
    int line = 0;

    // Source position is provenance, not structure.
    bool operator==(const Statement& other) const { return node == other.node; }
};

enum class FaultKind {
    syntax,
    disallowed_form,
    outside_story,
    undefined_group,
    unused_function,
    unknown_entity,
    unknown_attribute,
    kind_mismatch,
    invalid_value,
    duplicate_entity,
    unknown_kind,
    unknown_function,
    arity_mismatch,
    auto_declared,
    unset_print,
};

std::string_view to_string(FaultKind kind);

struct Fault {
    FaultKind kind;
    int line = 0;
    std::string message;
    // True when the offending statement was not applied.
    bool skipped = false;

    bool operator==(const Fault&) const = default;
};

struct StatementGroup {
    // Sentence text (comment styles) or function name (specific functions).
    // Empty only for statements that precede the first sentence comment.
    std::string label;
    std::vector<Statement> statements;

    bool operator==(const StatementGroup&) const = default;
};

struct UpdateProgram {
    PromptStyle style = PromptStyle::comment_only;
    std::vector<StatementGroup> groups;
    std::optional<std::string> query;  // text of a `## Question:` comment
    std::vector<Statement> trailing;
    std::vector<Fault> faults;

    // Structural equality; parse faults and line numbers are not compared.
    bool operator==(const UpdateProgram& other) const {
        return style == other.style && groups == other.groups && query == other.query &&
               trailing == other.trailing;
    }
};

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

// Parses a program. Unrecognised lines become faults on the returned program;
// only an unterminated string literal throws ParseError.
UpdateProgram parse_program(std::string_view source, PromptStyle style);

std::string render_expr(const Expr& expr);
std::string render_statement(const Statement& statement);

// Canonical source for a program, starting at `    def story(self):`.
// parse_program(pretty_print(p), p.style) == p for every parsed p.
std::string pretty_print(const UpdateProgram& program);

// Line-oriented, stable AST listing for debugging.
std::string dump_ast(const UpdateProgram& program);

// ---------------------------------------------------------------------------
// Abstract functions

// Arguments after binding: entity parameters hold entity identifiers, value
// parameters hold text (nullopt for None).
using BoundArguments = std::map<std::string, std::optional<std::string>>;

struct AbstractFunction {
    std::string name;
    std::vector<std::string> params;
    std::vector<std::string> entity_params;
    // Python-style body shown to the model in the abstract-functions prompt.
    std::vector<std::string> body;
    // Direct-assignment recipe for a call, given the state it runs against.
    std::function<std::vector<Statement>(const BoundArguments&, const WorldState&)> expand;

    bool is_entity_param(std::string_view param) const;
};

class AbstractFunctionTable {
public:
    void add(AbstractFunction fn);
    const AbstractFunction* find(std::string_view name) const;
    const std::vector<AbstractFunction>& functions() const { return functions_; }

    static const AbstractFunctionTable& babi_task2();
    static const AbstractFunctionTable& re3_character();
    static const AbstractFunctionTable& for_preset(PresetId id);

private:
    std::vector<AbstractFunction> functions_;
};

class EvalFault : public std::runtime_error {
public:
    EvalFault(FaultKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}
    FaultKind kind() const noexcept { return kind_; }

private:
    FaultKind kind_;
};

// Expands a call into the direct statements it stands for. Entities named by
// the call must already exist in `world`. Throws EvalFault.
std::vector<Statement> expand_call(const AbstractCall& call, const WorldState& world,
                                   const AbstractFunctionTable& table);

// ---------------------------------------------------------------------------
// Evaluation

struct EvaluationResult {
    WorldState world;
    std::vector<std::string> printed;
    std::vector<Fault> faults;
};

// Applies each group as one world update (advancing the step index), then
// the trailing statements, then renders every print against the final state.
// Never throws for program content; problems are reported as faults.
EvaluationResult evaluate(const UpdateProgram& program, WorldState world,
                          const AbstractFunctionTable& table);

// "Where is the football?" -> "football".
std::optional<std::string> queried_object(std::string_view query);

// Last printed text, else the symbolic answer for the queried object.
std::optional<std::string> extract_answer(const EvaluationResult& result, std::string_view query);

}  // namespace corrpus
