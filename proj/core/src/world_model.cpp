#include "corrpus/world_model.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

namespace corrpus {

namespace {

constexpr std::string_view kCarrier = "carrier";
constexpr std::string_view kInventory = "inventory";
constexpr std::string_view kLocation = "location";

std::string json_quoted(std::string_view text) {
    return nlohmann::json(std::string(text)).dump();
}

EntitySchema make_schema(std::string kind, std::vector<AttributeSpec> attributes) {
    attributes.insert(attributes.begin(), AttributeSpec{"name", AttributeKind::scalar});
    return EntitySchema{std::move(kind), std::move(attributes)};
}

}  // namespace

std::string_view to_string(AttributeKind kind) {
    switch (kind) {
        case AttributeKind::scalar: return "scalar";
        case AttributeKind::list: return "list";
        case AttributeKind::map: return "map";
    }
    return "?";
}

std::string_view to_string(PresetId id) {
    return id == PresetId::babi_task2 ? "babi-task2" : "re3-character";
}

PresetId preset_from_string(std::string_view text) {
    if (text == "babi-task2" || text == "babi") return PresetId::babi_task2;
    if (text == "re3-character" || text == "re3") return PresetId::re3_character;
    throw std::invalid_argument("unknown schema preset: " + std::string(text));
}

std::string_view to_string(WorldErrorKind kind) {
    switch (kind) {
        case WorldErrorKind::duplicate_entity: return "duplicate_entity";
        case WorldErrorKind::unknown_kind: return "unknown_kind";
        case WorldErrorKind::unknown_entity: return "unknown_entity";
        case WorldErrorKind::unknown_attribute: return "unknown_attribute";
        case WorldErrorKind::kind_mismatch: return "kind_mismatch";
        case WorldErrorKind::invalid_value: return "invalid_value";
    }
    return "?";
}

const AttributeSpec* EntitySchema::find(std::string_view attribute) const {
    auto it = std::find_if(attributes.begin(), attributes.end(),
                           [&](const AttributeSpec& a) { return a.name == attribute; });
    return it == attributes.end() ? nullptr : &*it;
}

const EntitySchema* SchemaPreset::find(std::string_view kind) const {
    auto it = std::find_if(schemas.begin(), schemas.end(),
                           [&](const EntitySchema& s) { return s.kind_name == kind; });
    return it == schemas.end() ? nullptr : &*it;
}

const SchemaPreset& SchemaPreset::babi_task2() {
    static const SchemaPreset preset{
        PresetId::babi_task2,
        {
            make_schema("character", {{"location", AttributeKind::scalar},
                                      {"inventory", AttributeKind::list}}),
            make_schema("object", {{"location", AttributeKind::scalar},
                                   {"carrier", AttributeKind::scalar}}),
        },
        "object",
    };
    return preset;
}

const SchemaPreset& SchemaPreset::re3_character() {
    static const SchemaPreset preset{
        PresetId::re3_character,
        {
            make_schema("character", {{"appearance", AttributeKind::list},
                                      {"occupation", AttributeKind::list},
                                      {"gender", AttributeKind::list},
                                      {"age", AttributeKind::list},
                                      {"relations", AttributeKind::map}}),
        },
        "character",
    };
    return preset;
}

const SchemaPreset& SchemaPreset::get(PresetId id) {
    return id == PresetId::babi_task2 ? babi_task2() : re3_character();
}

std::string display_name_for(std::string_view identifier) {
    std::string out(identifier);
    std::replace(out.begin(), out.end(), '_', ' ');
    return out;
}

std::string Entity::display_name() const {
    auto it = scalars.find("name");
    if (it != scalars.end() && it->second) return *it->second;
    return display_name_for(name);
}

WorldState WorldState::init(const SchemaPreset& preset, std::span<const EntityDecl> entities) {
    WorldState world;
    world.preset_ = &preset;
    for (const auto& decl : entities) world.declare(decl.kind, decl.name);
    return world;
}

void WorldState::declare(std::string_view kind, std::string_view name) {
    const EntitySchema* schema = preset_->find(kind);
    if (schema == nullptr) {
        throw WorldError(WorldErrorKind::unknown_kind,
                         "unknown entity kind '" + std::string(kind) + "'");
    }
    if (name.empty()) {
        throw WorldError(WorldErrorKind::invalid_value, "entity name must not be empty");
    }
    if (has_entity(name)) {
        throw WorldError(WorldErrorKind::duplicate_entity,
                         "entity '" + std::string(name) + "' already declared");
    }
    Entity e;
    e.name = std::string(name);
    e.schema = schema;
    for (const auto& attr : schema->attributes) {
        switch (attr.kind) {
            case AttributeKind::scalar: e.scalars[attr.name] = std::nullopt; break;
            case AttributeKind::list: e.lists[attr.name]; break;
            case AttributeKind::map: e.maps[attr.name]; break;
        }
    }
    e.scalars["name"] = display_name_for(name);
    order_.push_back(e.name);
    entities_.emplace(e.name, std::move(e));
}

bool WorldState::has_entity(std::string_view name) const {
    return entities_.find(name) != entities_.end();
}

const Entity& WorldState::entity(std::string_view name) const {
    auto it = entities_.find(name);
    if (it == entities_.end()) {
        throw WorldError(WorldErrorKind::unknown_entity,
                         "unknown entity '" + std::string(name) + "'");
    }
    return it->second;
}

Entity& WorldState::mutable_entity(std::string_view name) {
    return const_cast<Entity&>(std::as_const(*this).entity(name));
}

const AttributeSpec& WorldState::require_attribute(const Entity& e, std::string_view attribute,
                                                   AttributeKind kind) const {
    const AttributeSpec* spec = e.schema->find(attribute);
    if (spec == nullptr) {
        throw WorldError(WorldErrorKind::unknown_attribute,
                         e.kind() + " '" + e.name + "' has no attribute '" +
                             std::string(attribute) + "'");
    }
    if (spec->kind != kind) {
        throw WorldError(WorldErrorKind::kind_mismatch,
                         e.name + "." + std::string(attribute) + " is a " +
                             std::string(to_string(spec->kind)) + ", not a " +
                             std::string(to_string(kind)));
    }
    return *spec;
}

void WorldState::assign_carrier(std::string_view object,
                                const std::optional<std::string>& carrier) {
    if (carrier) {
        const Entity& holder = entity(*carrier);
        if (holder.schema->find(kInventory) == nullptr) {
            throw WorldError(WorldErrorKind::invalid_value,
                             "carrier '" + *carrier + "' cannot hold objects");
        }
    }
    Entity& obj = mutable_entity(object);
    auto& current = obj.scalars[std::string(kCarrier)];
    if (current && has_entity(*current)) {
        auto& inv = mutable_entity(*current).lists[std::string(kInventory)];
        std::erase(inv, obj.name);
    }
    if (carrier) {
        auto& inv = mutable_entity(*carrier).lists[std::string(kInventory)];
        if (std::find(inv.begin(), inv.end(), obj.name) == inv.end()) inv.push_back(obj.name);
    }
    current = carrier;
}

void WorldState::set_scalar(std::string_view entity_name, std::string_view attribute,
                            std::optional<std::string> value) {
    Entity& e = mutable_entity(entity_name);
    require_attribute(e, attribute, AttributeKind::scalar);
    if (tracks_carriers() && attribute == kCarrier) {
        assign_carrier(e.name, value);
        return;
    }
    e.scalars[std::string(attribute)] = std::move(value);
}

void WorldState::append_list(std::string_view entity_name, std::string_view attribute,
                             std::string value) {
    Entity& e = mutable_entity(entity_name);
    require_attribute(e, attribute, AttributeKind::list);
    if (tracks_carriers() && attribute == kInventory) {
        const Entity& item = entity(value);
        if (item.schema->find(kCarrier) == nullptr) {
            throw WorldError(WorldErrorKind::invalid_value,
                             "'" + value + "' cannot be carried");
        }
        assign_carrier(value, e.name);
        return;
    }
    e.lists[std::string(attribute)].push_back(std::move(value));
}

void WorldState::remove_list(std::string_view entity_name, std::string_view attribute,
                             std::string_view value) {
    Entity& e = mutable_entity(entity_name);
    require_attribute(e, attribute, AttributeKind::list);
    auto& items = e.lists[std::string(attribute)];
    auto it = std::find(items.begin(), items.end(), value);
    if (it == items.end()) {
        throw WorldError(WorldErrorKind::invalid_value,
                         "'" + std::string(value) + "' not in " + e.name + "." +
                             std::string(attribute));
    }
    if (tracks_carriers() && attribute == kInventory && has_entity(value)) {
        assign_carrier(value, std::nullopt);
        return;
    }
    items.erase(it);
}

void WorldState::put_map(std::string_view entity_name, std::string_view attribute,
                         std::string key, std::string value) {
    Entity& e = mutable_entity(entity_name);
    require_attribute(e, attribute, AttributeKind::map);
    e.maps[std::string(attribute)][std::move(key)] = std::move(value);
}

std::optional<std::string> WorldState::scalar(std::string_view entity_name,
                                              std::string_view attribute) const {
    const Entity& e = entity(entity_name);
    require_attribute(e, attribute, AttributeKind::scalar);
    return e.scalars.at(std::string(attribute));
}

const std::vector<std::string>& WorldState::list(std::string_view entity_name,
                                                 std::string_view attribute) const {
    const Entity& e = entity(entity_name);
    require_attribute(e, attribute, AttributeKind::list);
    return e.lists.at(std::string(attribute));
}

const std::map<std::string, std::string>& WorldState::map(std::string_view entity_name,
                                                          std::string_view attribute) const {
    const Entity& e = entity(entity_name);
    require_attribute(e, attribute, AttributeKind::map);
    return e.maps.at(std::string(attribute));
}

std::optional<std::string> WorldState::query_object_location(std::string_view object) const {
    const Entity& obj = entity(object);
    if (obj.schema->find(kCarrier) == nullptr) {
        throw WorldError(WorldErrorKind::invalid_value,
                         "'" + obj.name + "' is not an object");
    }
    if (auto carrier = obj.scalars.at(std::string(kCarrier))) {
        if (!has_entity(*carrier)) return std::nullopt;
        return entity(*carrier).scalars.at(std::string(kLocation));
    }
    return obj.scalars.at(std::string(kLocation));
}

std::string WorldState::snapshot() const {
    std::ostringstream out;
    out << "step " << step_index_ << '\n';
    for (const auto& name : order_) {
        const Entity& e = entities_.find(name)->second;
        out << e.kind() << ' ' << e.name << '\n';
        for (const auto& attr : e.schema->attributes) {
            out << "  " << attr.name << ": ";
            switch (attr.kind) {
                case AttributeKind::scalar: {
                    const auto& v = e.scalars.at(attr.name);
                    out << (v ? json_quoted(*v) : std::string("null"));
                    break;
                }
                case AttributeKind::list: {
                    out << '[';
                    const char* sep = "";
                    for (const auto& item : e.lists.at(attr.name)) {
                        out << sep << json_quoted(item);
                        sep = ", ";
                    }
                    out << ']';
                    break;
                }
                case AttributeKind::map: {
                    out << '{';
                    const char* sep = "";
                    for (const auto& [k, v] : e.maps.at(attr.name)) {
                        out << sep << json_quoted(k) << ": " << json_quoted(v);
                        sep = ", ";
                    }
                    out << '}';
                    break;
                }
            }
            out << '\n';
        }
    }
    return out.str();
}

bool carrier_duality_holds(const WorldState& world) {
    if (world.preset().id != PresetId::babi_task2) return true;
    for (const auto& name : world.entity_order()) {
        const Entity& e = world.entity(name);
        if (e.kind() == "object") {
            const auto& carrier = e.scalars.at(std::string(kCarrier));
            if (carrier) {
                if (!world.has_entity(*carrier)) return false;
                const auto& inv = world.entity(*carrier).lists.at(std::string(kInventory));
                if (std::count(inv.begin(), inv.end(), name) != 1) return false;
            }
        } else if (e.kind() == "character") {
            for (const auto& item : e.lists.at(std::string(kInventory))) {
                if (!world.has_entity(item)) return false;
                const auto& carrier = world.entity(item).scalars.at(std::string(kCarrier));
                if (carrier != name) return false;
            }
        }
    }
    return true;
}

}  // namespace corrpus
