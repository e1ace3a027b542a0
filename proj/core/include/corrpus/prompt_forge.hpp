#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "corrpus/prompt_style.hpp"
#include "corrpus/update_dsl.hpp"
#include "corrpus/world_model.hpp"

namespace corrpus {

struct StoryCase {
    std::vector<std::string> sentences;
    std::vector<EntityDecl> entities;
    std::optional<std::string> query;
    std::optional<std::string> gold_answer;

    bool operator==(const StoryCase&) const = default;
};

// A story together with its hand-authored solution. For the natural-language
// style the solution is `story.gold_answer` and `program` is unused.
struct Exemplar {
    StoryCase story;
    UpdateProgram program;
    PromptStyle style = PromptStyle::comment_only;
};

struct PromptBundle {
    std::string exemplar;
    std::string target_prefix;
    PromptStyle style = PromptStyle::comment_only;

    std::string request() const { return exemplar + target_prefix; }
};

class PromptError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyCompletion : public std::runtime_error {
public:
    EmptyCompletion() : std::runtime_error("empty completion") {}
};

// "His gaze is unfocused." -> "his_gaze_is_unfocused". Throws PromptError when
// the sentence has no alphanumeric character.
std::string slugify(std::string_view sentence);

// Slugs for a sentence list; repeats get _2, _3, ... suffixes.
std::vector<std::string> unique_slugs(std::span<const std::string> sentences);

std::string instruction_line(PresetId preset, PromptStyle style);

// Class definitions and World initializer for a set of entities.
std::string render_classes(const SchemaPreset& preset, std::span<const EntityDecl> entities,
                           PromptStyle style);

// Everything the model sees for a story, up to where generation begins.
std::string render_prefix(const StoryCase& story, PromptStyle style, const SchemaPreset& preset);

// The fully worked form of an exemplar: its prefix followed by its program.
std::string render_worked(const Exemplar& exemplar, const SchemaPreset& preset);

// The part of render_worked that follows render_prefix: what a perfect model
// would generate.
std::string continuation(const Exemplar& exemplar, const SchemaPreset& preset);

PromptBundle render(const StoryCase& story, PromptStyle style, const SchemaPreset& preset,
                    const Exemplar& exemplar);

// Program text to hand to parse_program for a raw completion of `bundle`.
// Throws EmptyCompletion.
std::string completion_slice(const PromptBundle& bundle, std::string_view raw);

// Inverse of render() for the target story: reads sentences, query and
// entities back out of a request text.
StoryCase recover_target_case(std::string_view request, PromptStyle style);

std::string print_scaffold(const StoryCase& story);

StoryCase case_from_json(const nlohmann::json& j);
nlohmann::json case_to_json(const StoryCase& story);

// Loads case.json (+ program.py for code styles) from an exemplar directory.
Exemplar load_exemplar_dir(const std::filesystem::path& dir, PromptStyle style);

// <assets>/prompts/<babi|re3>/<style>/
std::filesystem::path exemplar_dir(const std::filesystem::path& asset_root, PresetId preset,
                                   PromptStyle style);

Exemplar load_exemplar(const std::filesystem::path& asset_root, PresetId preset, PromptStyle style);

// CORRPUS_ASSET_DIR from the environment, else the directory baked in at build time.
std::filesystem::path default_asset_dir();

std::string read_text_file(const std::filesystem::path& path);

}  // namespace corrpus
