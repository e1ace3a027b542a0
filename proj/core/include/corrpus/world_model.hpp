#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace corrpus {

enum class AttributeKind { scalar, list, map };

std::string_view to_string(AttributeKind kind);

struct AttributeSpec {
    std::string name;
    AttributeKind kind;
};

// One class of story entity, e.g. `character` or `object`. Attribute order is
// the order used by prompt rendering and snapshots.
struct EntitySchema {
    std::string kind_name;
    std::vector<AttributeSpec> attributes;

    const AttributeSpec* find(std::string_view attribute) const;
};

enum class PresetId { babi_task2, re3_character };

std::string_view to_string(PresetId id);
PresetId preset_from_string(std::string_view text);

struct SchemaPreset {
    PresetId id;
    std::vector<EntitySchema> schemas;
    // Kind used when a program references an entity nobody declared.
    std::string default_kind;

    const EntitySchema* find(std::string_view kind) const;

    static const SchemaPreset& babi_task2();
    static const SchemaPreset& re3_character();
    static const SchemaPreset& get(PresetId id);
};

struct EntityDecl {
    std::string kind;
    std::string name;

    bool operator==(const EntityDecl&) const = default;
};

enum class WorldErrorKind {
    duplicate_entity,
    unknown_kind,
    unknown_entity,
    unknown_attribute,
    kind_mismatch,
    invalid_value,
};

std::string_view to_string(WorldErrorKind kind);

class WorldError : public std::runtime_error {
public:
    WorldError(WorldErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    WorldErrorKind kind() const noexcept { return kind_; }

private:
    WorldErrorKind kind_;
};

struct Entity {
    std::string name;
    const EntitySchema* schema = nullptr;
    std::map<std::string, std::optional<std::string>> scalars;
    std::map<std::string, std::vector<std::string>> lists;
    std::map<std::string, std::map<std::string, std::string>> maps;

    const std::string& kind() const { return schema->kind_name; }
    // The `name` scalar: the human-readable name given to the constructor.
    std::string display_name() const;
};

// Identifier -> constructor argument: "Joan_Westfall" -> "Joan Westfall".
std::string display_name_for(std::string_view identifier);

// Symbolic story world. Every mutator either succeeds or throws WorldError
// leaving the state untouched.
class WorldState {
public:
    static WorldState init(const SchemaPreset& preset, std::span<const EntityDecl> entities);

    const SchemaPreset& preset() const { return *preset_; }
    std::size_t step_index() const { return step_index_; }
    void advance_step() { ++step_index_; }

    void declare(std::string_view kind, std::string_view name);
    bool has_entity(std::string_view name) const;
    const Entity& entity(std::string_view name) const;
    const std::vector<std::string>& entity_order() const { return order_; }

    void set_scalar(std::string_view entity, std::string_view attribute,
                    std::optional<std::string> value);
    void append_list(std::string_view entity, std::string_view attribute, std::string value);
    void remove_list(std::string_view entity, std::string_view attribute,
                     std::string_view value);
    void put_map(std::string_view entity, std::string_view attribute, std::string key,
                 std::string value);

    std::optional<std::string> scalar(std::string_view entity, std::string_view attribute) const;
    const std::vector<std::string>& list(std::string_view entity,
                                         std::string_view attribute) const;
    const std::map<std::string, std::string>& map(std::string_view entity,
                                                  std::string_view attribute) const;

    // Where an object is: its carrier's location when carried, else its own
    // location. nullopt means the state does not determine it.
    std::optional<std::string> query_object_location(std::string_view object) const;

    std::string snapshot() const;

    bool operator==(const WorldState& other) const { return snapshot() == other.snapshot(); }

private:
    Entity& mutable_entity(std::string_view name);
    const AttributeSpec& require_attribute(const Entity& e, std::string_view attribute,
                                           AttributeKind kind) const;
    bool tracks_carriers() const { return preset_->id == PresetId::babi_task2; }
    void assign_carrier(std::string_view object, const std::optional<std::string>& carrier);

    const SchemaPreset* preset_ = nullptr;
    std::map<std::string, Entity, std::less<>> entities_;
    std::vector<std::string> order_;
    std::size_t step_index_ = 0;
};

// Full scan of the carrier/inventory duality; always true outside babi-task2.
bool carrier_duality_holds(const WorldState& world);

}  // namespace corrpus
