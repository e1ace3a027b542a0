#include <algorithm>
#include <cctype>
#include <sstream>

#include "corrpus/update_dsl.hpp"

namespace corrpus {

namespace {

FaultKind fault_kind(WorldErrorKind kind) {
    switch (kind) {
        case WorldErrorKind::duplicate_entity: return FaultKind::duplicate_entity;
        case WorldErrorKind::unknown_kind: return FaultKind::unknown_kind;
        case WorldErrorKind::unknown_entity: return FaultKind::unknown_entity;
        case WorldErrorKind::unknown_attribute: return FaultKind::unknown_attribute;
        case WorldErrorKind::kind_mismatch: return FaultKind::kind_mismatch;
        case WorldErrorKind::invalid_value: return FaultKind::invalid_value;
    }
    return FaultKind::invalid_value;
}

Statement direct(StatementNode node) { return Statement{std::move(node), 0}; }

Path attr(const std::string& entity, std::string attribute) {
    return Path{entity, std::move(attribute)};
}

Literal text_or_none(const std::optional<std::string>& value) {
    return value ? Literal::quoted(*value) : Literal::none();
}

const std::string& required(const BoundArguments& args, const std::string& name) {
    const auto& value = args.at(name);
    if (!value) throw EvalFault(FaultKind::invalid_value, "argument '" + name + "' is None");
    return *value;
}

// Identifier spelled by a call argument that should denote an entity.
std::string entity_identifier(const Expr& expr) {
    if (const auto* path = std::get_if<Path>(&expr)) {
        if (path->attribute) {
            throw EvalFault(FaultKind::invalid_value,
                            "expected an entity, got self." + path->entity + "." + *path->attribute);
        }
        return path->entity;
    }
    const auto& lit = std::get<Literal>(expr);
    if (lit.is_none() || lit.text.empty()) {
        throw EvalFault(FaultKind::invalid_value, "expected an entity, got None");
    }
    std::string id = lit.text;
    std::replace(id.begin(), id.end(), ' ', '_');
    return id;
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

AbstractFunctionTable make_babi_table() {
    AbstractFunctionTable table;
    table.add({
        "go",
        {"character", "destination"},
        {"character"},
        {"character.location = destination", "for item in character.inventory:",
         "    item.location = destination"},
        [](const BoundArguments& args, const WorldState& world) {
            const auto& who = required(args, "character");
            const auto& dest = args.at("destination");
            std::vector<Statement> out;
            out.push_back(direct(ScalarAssign{attr(who, "location"), text_or_none(dest)}));
            for (const auto& item : world.list(who, "inventory")) {
                out.push_back(direct(ScalarAssign{attr(item, "location"), text_or_none(dest)}));
            }
            return out;
        },
    });
    table.add({
        "grab",
        {"character", "object"},
        {"character", "object"},
        {"character.inventory.append(object)", "object.carrier = character",
         "object.location = character.location"},
        [](const BoundArguments& args, const WorldState& world) {
            const auto& who = required(args, "character");
            const auto& what = required(args, "object");
            return std::vector<Statement>{
                direct(ListAppend{attr(who, "inventory"), Literal::quoted(what)}),
                direct(ScalarAssign{attr(what, "carrier"), Literal::quoted(who)}),
                direct(ScalarAssign{attr(what, "location"),
                                    text_or_none(world.scalar(who, "location"))}),
            };
        },
    });
    table.add({
        "drop",
        {"character", "object"},
        {"character", "object"},
        {"character.inventory.remove(object)", "object.carrier = None",
         "object.location = character.location"},
        [](const BoundArguments& args, const WorldState& world) {
            const auto& who = required(args, "character");
            const auto& what = required(args, "object");
            return std::vector<Statement>{
                direct(ScalarAssign{attr(what, "carrier"), Literal::none()}),
                direct(ScalarAssign{attr(what, "location"),
                                    text_or_none(world.scalar(who, "location"))}),
            };
        },
    });
    return table;
}

AbstractFunction list_setter(const std::string& attribute) {
    return {
        "set_" + attribute,
        {"character", attribute},
        {"character"},
        {"character." + attribute + ".append(" + attribute + ")"},
        [attribute](const BoundArguments& args, const WorldState&) {
            return std::vector<Statement>{direct(ListAppend{
                attr(required(args, "character"), attribute), Literal::quoted(required(args, attribute))})};
        },
    };
}

AbstractFunctionTable make_re3_table() {
    AbstractFunctionTable table;
    for (const char* attribute : {"appearance", "occupation", "gender", "age"}) {
        table.add(list_setter(attribute));
    }
    table.add({
        "set_relation",
        {"character", "relation", "other_character"},
        {"character", "other_character"},
        {"character.relations[relation] = other_character.name"},
        [](const BoundArguments& args, const WorldState& world) {
            const auto& other = world.entity(required(args, "other_character"));
            return std::vector<Statement>{direct(MapAssign{
                attr(required(args, "character"), "relations"),
                Literal::quoted(required(args, "relation")), Literal::quoted(other.display_name())})};
        },
    });
    return table;
}

BoundArguments bind_arguments(const AbstractCall& call, const AbstractFunction& fn,
                              std::map<std::string, Expr>& raw) {
    std::size_t positional = 0;
    for (const auto& arg : call.args) {
        std::string param;
        if (arg.keyword) {
            param = *arg.keyword;
            if (std::find(fn.params.begin(), fn.params.end(), param) == fn.params.end()) {
                throw EvalFault(FaultKind::arity_mismatch,
                                fn.name + "() has no parameter '" + param + "'");
            }
        } else {
            if (positional >= fn.params.size()) {
                throw EvalFault(FaultKind::arity_mismatch,
                                fn.name + "() takes " + std::to_string(fn.params.size()) +
                                    " arguments");
            }
            param = fn.params[positional++];
        }
        if (!raw.emplace(param, arg.value).second) {
            throw EvalFault(FaultKind::arity_mismatch,
                            fn.name + "() got multiple values for '" + param + "'");
        }
    }
    for (const auto& param : fn.params) {
        if (!raw.contains(param)) {
            throw EvalFault(FaultKind::arity_mismatch,
                            fn.name + "() missing argument '" + param + "'");
        }
    }
    BoundArguments bound;
    for (const auto& param : fn.params) {
        if (fn.is_entity_param(param)) bound[param] = entity_identifier(raw.at(param));
    }
    return bound;
}

class Evaluator {
public:
    Evaluator(WorldState world, const AbstractFunctionTable& table)
        : world_(std::move(world)), table_(table) {}

    EvaluationResult run(const UpdateProgram& program) {
        for (const auto& group : program.groups) {
            for (const auto& s : group.statements) apply(s);
            world_.advance_step();
        }
        for (const auto& s : program.trailing) apply(s);
        std::vector<std::string> printed;
        for (const auto* p : prints_) {
            try {
                printed.push_back(render_value(std::get<Print>(p->node).value));
            } catch (const EvalFault& f) {
                faults_.push_back(Fault{f.kind(), p->line, f.what(), false});
            } catch (const WorldError& e) {
                faults_.push_back(Fault{fault_kind(e.kind()), p->line, e.what(), false});
            }
        }
        return EvaluationResult{std::move(world_), std::move(printed), std::move(faults_)};
    }

private:
    void apply(const Statement& statement) {
        if (std::holds_alternative<Pass>(statement.node)) return;
        if (std::holds_alternative<Print>(statement.node)) {
            prints_.push_back(&statement);
            return;
        }
        // Statements run against a scratch copy whenever they might declare
        // entities, so that a failing statement leaves no trace.
        std::vector<Fault> notes;
        try {
            if (const auto* call = std::get_if<AbstractCall>(&statement.node)) {
                WorldState scratch = world_;
                apply_call(*call, scratch, notes, statement.line);
                world_ = std::move(scratch);
            } else if (needs_declaration(statement.node)) {
                WorldState scratch = world_;
                apply_direct(statement.node, scratch, notes, statement.line);
                world_ = std::move(scratch);
            } else {
                apply_direct(statement.node, world_, notes, statement.line);
            }
        } catch (const EvalFault& f) {
            faults_.push_back(Fault{f.kind(), statement.line, f.what(), true});
            return;
        } catch (const WorldError& e) {
            faults_.push_back(Fault{fault_kind(e.kind()), statement.line, e.what(), true});
            return;
        }
        faults_.insert(faults_.end(), notes.begin(), notes.end());
    }

    static const Path& target_of(const StatementNode& node) {
        return std::visit(
            [](const auto& s) -> const Path& {
                using T = std::decay_t<decltype(s)>;
                if constexpr (requires { s.target; }) {
                    return s.target;
                } else {
                    static const Path none{};
                    (void)sizeof(T);
                    return none;
                }
            },
            node);
    }

    bool carried_item_unknown(const StatementNode& node) const {
        const auto* append = std::get_if<ListAppend>(&node);
        if (append == nullptr || world_.preset().id != PresetId::babi_task2 ||
            append->target.attribute != "inventory") {
            return false;
        }
        const auto* lit = std::get_if<Literal>(&append->value);
        return lit != nullptr && !lit->is_none() && !world_.has_entity(lit->text);
    }

    bool needs_declaration(const StatementNode& node) const {
        return !world_.has_entity(target_of(node).entity) || carried_item_unknown(node);
    }

    void ensure_entity(WorldState& world, const std::string& name, std::vector<Fault>& notes,
                       int line) {
        if (world.has_entity(name)) return;
        const std::string& kind = world.preset().default_kind;
        world.declare(kind, name);
        notes.push_back(Fault{FaultKind::auto_declared, line,
                              "auto-declared '" + name + "' as " + kind, false});
    }

    // Value of an expression used as an assignment right-hand side.
    static std::optional<std::string> value_of(const Expr& expr, const WorldState& world) {
        if (const auto* lit = std::get_if<Literal>(&expr)) {
            if (lit->is_none()) return std::nullopt;
            return lit->text;
        }
        const auto& path = std::get<Path>(expr);
        if (!path.attribute) return world.entity(path.entity).name;
        return world.scalar(path.entity, *path.attribute);
    }

    static std::string require_value(const Expr& expr, const WorldState& world) {
        auto value = value_of(expr, world);
        if (!value) throw EvalFault(FaultKind::invalid_value, "None is not allowed here");
        return *value;
    }

    void apply_direct(const StatementNode& node, WorldState& world, std::vector<Fault>& notes,
                      int line) {
        const Path& target = target_of(node);
        if (!target.attribute) {
            throw EvalFault(FaultKind::syntax, "statement target has no attribute");
        }
        ensure_entity(world, target.entity, notes, line);
        const std::string& attribute = *target.attribute;
        if (const auto* s = std::get_if<ScalarAssign>(&node)) {
            world.set_scalar(target.entity, attribute, value_of(s->value, world));
        } else if (const auto* s = std::get_if<ListAppend>(&node)) {
            std::string value = require_value(s->value, world);
            if (world.preset().id == PresetId::babi_task2 && attribute == "inventory" &&
                world.entity(target.entity).schema->find("inventory") != nullptr) {
                ensure_entity(world, value, notes, line);
            }
            world.append_list(target.entity, attribute, std::move(value));
        } else if (const auto* s = std::get_if<ListRemove>(&node)) {
            world.remove_list(target.entity, attribute, require_value(s->value, world));
        } else if (const auto* s = std::get_if<MapAssign>(&node)) {
            if (s->key.is_none()) throw EvalFault(FaultKind::invalid_value, "None map key");
            world.put_map(target.entity, attribute, s->key.text, require_value(s->value, world));
        }
    }

    void apply_call(const AbstractCall& call, WorldState& world, std::vector<Fault>& notes,
                    int line) {
        const AbstractFunction* fn = table_.find(call.function);
        if (fn == nullptr) {
            throw EvalFault(FaultKind::unknown_function, "unknown function '" + call.function + "'");
        }
        std::map<std::string, Expr> raw;
        BoundArguments bound = bind_arguments(call, *fn, raw);
        for (const auto& [param, value] : bound) ensure_entity(world, *value, notes, line);
        for (const auto& param : fn->params) {
            if (!fn->is_entity_param(param)) bound[param] = value_of(raw.at(param), world);
        }
        for (const auto& s : fn->expand(bound, world)) apply_direct(s.node, world, notes, line);
    }

    std::string render_value(const Expr& expr) const {
        if (const auto* lit = std::get_if<Literal>(&expr)) {
            if (lit->is_none()) throw EvalFault(FaultKind::unset_print, "printed None");
            return lit->text;
        }
        const auto& path = std::get<Path>(expr);
        const Entity& e = world_.entity(path.entity);
        if (!path.attribute) return e.name;
        const AttributeSpec* spec = e.schema->find(*path.attribute);
        if (spec == nullptr) {
            throw WorldError(WorldErrorKind::unknown_attribute,
                             e.name + " has no attribute '" + *path.attribute + "'");
        }
        switch (spec->kind) {
            case AttributeKind::scalar: {
                auto v = e.scalars.at(spec->name);
                if (!v) {
                    throw EvalFault(FaultKind::unset_print,
                                    "self." + e.name + "." + spec->name + " is unset");
                }
                return *v;
            }
            case AttributeKind::list: return join(e.lists.at(spec->name), ", ");
            case AttributeKind::map: {
                std::vector<std::string> parts;
                for (const auto& [k, v] : e.maps.at(spec->name)) parts.push_back(k + ": " + v);
                return join(parts, ", ");
            }
        }
        return {};
    }

    WorldState world_;
    const AbstractFunctionTable& table_;
    std::vector<const Statement*> prints_;
    std::vector<Fault> faults_;
};

std::string trimmed(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

}  // namespace

bool AbstractFunction::is_entity_param(std::string_view param) const {
    return std::find(entity_params.begin(), entity_params.end(), param) != entity_params.end();
}

void AbstractFunctionTable::add(AbstractFunction fn) { functions_.push_back(std::move(fn)); }

const AbstractFunction* AbstractFunctionTable::find(std::string_view name) const {
    auto it = std::find_if(functions_.begin(), functions_.end(),
                           [&](const AbstractFunction& f) { return f.name == name; });
    return it == functions_.end() ? nullptr : &*it;
}

const AbstractFunctionTable& AbstractFunctionTable::babi_task2() {
    static const AbstractFunctionTable table = make_babi_table();
    return table;
}

const AbstractFunctionTable& AbstractFunctionTable::re3_character() {
    static const AbstractFunctionTable table = make_re3_table();
    return table;
}

const AbstractFunctionTable& AbstractFunctionTable::for_preset(PresetId id) {
    return id == PresetId::babi_task2 ? babi_task2() : re3_character();
}

std::vector<Statement> expand_call(const AbstractCall& call, const WorldState& world,
                                   const AbstractFunctionTable& table) {
    const AbstractFunction* fn = table.find(call.function);
    if (fn == nullptr) {
        throw EvalFault(FaultKind::unknown_function, "unknown function '" + call.function + "'");
    }
    std::map<std::string, Expr> raw;
    BoundArguments bound = bind_arguments(call, *fn, raw);
    for (const auto& param : fn->params) {
        if (fn->is_entity_param(param)) {
            world.entity(*bound.at(param));
        } else if (const auto* lit = std::get_if<Literal>(&raw.at(param))) {
            bound[param] = lit->is_none() ? std::nullopt : std::optional<std::string>(lit->text);
        } else {
            const auto& path = std::get<Path>(raw.at(param));
            bound[param] = path.attribute ? world.scalar(path.entity, *path.attribute)
                                          : std::optional<std::string>(path.entity);
        }
    }
    return fn->expand(bound, world);
}

EvaluationResult evaluate(const UpdateProgram& program, WorldState world,
                          const AbstractFunctionTable& table) {
    return Evaluator(std::move(world), table).run(program);
}

std::optional<std::string> queried_object(std::string_view query) {
    std::string text = trimmed(query);
    while (!text.empty() && (text.back() == '?' || text.back() == '.')) text.pop_back();
    std::istringstream words(text);
    std::vector<std::string> tokens;
    for (std::string w; words >> w;) tokens.push_back(w);
    if (tokens.size() < 3) return std::nullopt;
    std::string first = tokens[0];
    std::transform(first.begin(), first.end(), first.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (first != "where") return std::nullopt;
    return tokens.back();
}

std::optional<std::string> extract_answer(const EvaluationResult& result, std::string_view query) {
    if (!result.printed.empty()) {
        std::string answer = trimmed(result.printed.back());
        if (!answer.empty()) return answer;
    }
    auto object = queried_object(query);
    if (!object || !result.world.has_entity(*object)) return std::nullopt;
    try {
        return result.world.query_object_location(*object);
    } catch (const WorldError&) {
        return std::nullopt;
    }
}

}  // namespace corrpus
