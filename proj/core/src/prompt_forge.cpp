#include "corrpus/prompt_forge.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#ifndef CORRPUS_DEFAULT_ASSET_DIR
#define CORRPUS_DEFAULT_ASSET_DIR "assets"
#endif

namespace corrpus {

namespace {

constexpr std::string_view kIndent = "    ";
constexpr std::string_view kBody = "        ";
constexpr std::string_view kStoryHeader = "    def story(self):\n";

bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string rstrip(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    return rstrip(s);
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

std::string_view task_folder(PresetId id) {
    return id == PresetId::babi_task2 ? "babi" : "re3";
}

std::string header(const StoryCase& story, PromptStyle style, const SchemaPreset& preset) {
    std::string out;
    for (const auto& s : story.sentences) out += "## " + s + "\n";
    if (story.query) out += "## Question: " + *story.query + "\n";
    out += instruction_line(preset.id, style) + "\n";
    return out;
}

std::string attribute_initializer(const AttributeSpec& attr) {
    if (attr.name == "name") return "name";
    switch (attr.kind) {
        case AttributeKind::scalar: return "None";
        case AttributeKind::list: return "[]";
        case AttributeKind::map: return "{}";
    }
    return "None";
}

std::string natural_block(const StoryCase& story) {
    if (!story.query) throw PromptError("natural-language prompts need a query");
    std::string out;
    for (const auto& s : story.sentences) out += s + "\n";
    out += "Question: " + *story.query + "\nAnswer:";
    return out;
}

void require_sentences(const StoryCase& story) {
    if (story.sentences.empty()) throw PromptError("story has no sentences");
}

}  // namespace

std::string slugify(std::string_view sentence) {
    std::string out;
    bool pending = false;
    for (unsigned char c : sentence) {
        if (c < 0x80 && std::isalnum(c)) {
            if (pending && !out.empty()) out += '_';
            pending = false;
            out += static_cast<char>(std::tolower(c));
        } else {
            pending = true;
        }
    }
    if (out.empty()) {
        throw PromptError("cannot slugify '" + std::string(sentence) + "': no alphanumerics");
    }
    return out;
}

std::vector<std::string> unique_slugs(std::span<const std::string> sentences) {
    std::vector<std::string> out;
    std::set<std::string> used;
    std::map<std::string, int> seen;
    for (const auto& s : sentences) {
        std::string base = slugify(s);
        std::string slug = base;
        int& n = seen[base];
        while (used.contains(slug)) slug = base + "_" + std::to_string(++n + 1);
        used.insert(slug);
        out.push_back(std::move(slug));
    }
    return out;
}

std::string instruction_line(PresetId preset, PromptStyle style) {
    if (preset == PresetId::babi_task2) {
        return "## Create a world model state to track each character's location and inventory "
               "and each object's location and carrier.";
    }
    if (style == PromptStyle::specific_functions) {
        return "### Create a world model state and track each character's appearance, "
               "personality, relationship to other characters, and other cruical attributes.";
    }
    return "## Create a world model state to track each character's appearance, personality, "
           "and relations with other characters.";
}

std::string render_classes(const SchemaPreset& preset, std::span<const EntityDecl> entities,
                           PromptStyle style) {
    std::ostringstream out;
    for (const auto& schema : preset.schemas) {
        out << "class " << schema.kind_name << ":\n"
            << kIndent << "def __init__(self, name):\n";
        for (const auto& attr : schema.attributes) {
            out << kBody << "self." << attr.name << " = " << attribute_initializer(attr) << '\n';
        }
        out << '\n';
    }
    out << "class World:\n" << kIndent << "def __init__(self):\n";
    if (entities.empty()) out << kBody << "pass\n";
    for (const auto& e : entities) {
        if (preset.find(e.kind) == nullptr) throw PromptError("unknown kind '" + e.kind + "'");
        out << kBody << "self." << e.name << " = " << e.kind << "('" << display_name_for(e.name)
            << "')\n";
    }
    if (style == PromptStyle::abstract_functions) {
        for (const auto& fn : AbstractFunctionTable::for_preset(preset.id).functions()) {
            out << '\n' << kIndent << "def " << fn.name << "(self";
            for (const auto& p : fn.params) out << ", " << p;
            out << "):\n";
            for (const auto& line : fn.body) out << kBody << line << '\n';
        }
    }
    return out.str();
}

std::string print_scaffold(const StoryCase& story) {
    if (!story.query) return {};
    auto object = queried_object(*story.query);
    if (!object) return {};
    return "print(self." + *object + ".location)";
}

std::string render_prefix(const StoryCase& story, PromptStyle style, const SchemaPreset& preset) {
    require_sentences(story);
    if (style == PromptStyle::natural_language) return natural_block(story);

    std::string out = header(story, style, preset) + "\n" +
                      render_classes(preset, story.entities, style) + "\n" +
                      std::string(kStoryHeader);
    if (style == PromptStyle::specific_functions) {
        auto slugs = unique_slugs(story.sentences);
        for (const auto& slug : slugs) out += std::string(kBody) + "self." + slug + "()\n";
        if (story.query) out += std::string(kBody) + "## Question: " + *story.query + "\n";
        if (auto scaffold = print_scaffold(story); !scaffold.empty()) {
            out += std::string(kBody) + scaffold + "\n";
        }
        out += "\n" + std::string(kIndent) + "def " + slugs.front() + "(self):\n";
    }
    return out;
}

std::string render_worked(const Exemplar& exemplar, const SchemaPreset& preset) {
    const StoryCase& story = exemplar.story;
    require_sentences(story);
    if (exemplar.style == PromptStyle::natural_language) {
        if (!story.gold_answer) throw PromptError("natural-language exemplar has no answer");
        return natural_block(story) + " " + *story.gold_answer + "\n";
    }
    if (exemplar.program.style != exemplar.style) {
        throw PromptError("exemplar program was parsed as " +
                          std::string(to_string(exemplar.program.style)));
    }
    return header(story, exemplar.style, preset) + "\n" +
           render_classes(preset, story.entities, exemplar.style) + "\n" +
           pretty_print(exemplar.program);
}

std::string continuation(const Exemplar& exemplar, const SchemaPreset& preset) {
    std::string worked = render_worked(exemplar, preset);
    std::string prefix = render_prefix(exemplar.story, exemplar.style, preset);
    if (worked.compare(0, prefix.size(), prefix) != 0) {
        throw PromptError("worked program does not extend its prompt prefix");
    }
    return worked.substr(prefix.size());
}

PromptBundle render(const StoryCase& story, PromptStyle style, const SchemaPreset& preset,
                    const Exemplar& exemplar) {
    if (exemplar.style != style) {
        throw PromptError("exemplar is " + std::string(to_string(exemplar.style)) +
                          ", prompt is " + std::string(to_string(style)));
    }
    return PromptBundle{render_worked(exemplar, preset) + "\n", render_prefix(story, style, preset),
                        style};
}

std::string completion_slice(const PromptBundle& bundle, std::string_view raw) {
    std::string_view text = raw;
    const std::string request = bundle.request();
    if (text.starts_with(request)) {
        text.remove_prefix(request.size());
    } else if (text.starts_with(bundle.target_prefix)) {
        text.remove_prefix(bundle.target_prefix.size());
    }
    if (is_blank(text)) throw EmptyCompletion();

    if (bundle.style == PromptStyle::natural_language) {
        for (auto line : split_lines(text)) {
            if (!is_blank(line)) return trim(line) + "\n";
        }
    }

    std::string full;
    auto story_at = bundle.target_prefix.find(kStoryHeader);
    if (story_at != std::string::npos) full = bundle.target_prefix.substr(story_at);
    full.append(text);

    std::vector<std::string> kept;
    bool first = true;
    for (auto line : split_lines(full)) {
        // The story() header itself is indented; anything else at column 0
        // starts a new top-level construct.
        if (!first && !line.empty() && !std::isspace(static_cast<unsigned char>(line.front()))) {
            break;
        }
        first = false;
        kept.push_back(rstrip(line));
    }
    while (!kept.empty() && kept.back().empty()) kept.pop_back();
    std::string out;
    for (const auto& line : kept) out += line + "\n";
    return out;
}

StoryCase recover_target_case(std::string_view request, PromptStyle style) {
    StoryCase story;
    if (style == PromptStyle::natural_language) {
        auto pos = request.rfind("\n\n");
        std::string_view block = pos == std::string_view::npos ? request : request.substr(pos + 2);
        for (auto line : split_lines(block)) {
            if (line.starts_with("Question: ")) {
                story.query = std::string(line.substr(10));
            } else if (line.starts_with("Answer:")) {
                break;
            } else if (!is_blank(line)) {
                story.sentences.emplace_back(line);
            }
        }
        return story;
    }

    auto pos = request.rfind("\n\n## ");
    std::string_view block = pos == std::string_view::npos ? request : request.substr(pos + 2);
    auto lines = split_lines(block);
    std::size_t i = 0;
    std::vector<std::string> header_lines;
    for (; i < lines.size() && lines[i].starts_with("##"); ++i) header_lines.emplace_back(lines[i]);
    if (!header_lines.empty()) header_lines.pop_back();  // instruction
    for (const auto& h : header_lines) {
        std::string_view text = h;
        text.remove_prefix(std::min(text.size(), std::size_t{3}));
        if (text.starts_with("Question: ")) {
            story.query = std::string(text.substr(10));
        } else {
            story.sentences.emplace_back(text);
        }
    }
    static const std::regex init(R"(^        self\.(\w+) = (\w+)\('.*'\)$)");
    for (; i < lines.size(); ++i) {
        if (lines[i] == kStoryHeader.substr(0, kStoryHeader.size() - 1)) break;
        std::match_results<std::string_view::const_iterator> m;
        if (std::regex_match(lines[i].begin(), lines[i].end(), m, init)) {
            story.entities.push_back(EntityDecl{m[2].str(), m[1].str()});
        }
    }
    return story;
}

StoryCase case_from_json(const nlohmann::json& j) {
    StoryCase story;
    story.sentences = j.at("sentences").get<std::vector<std::string>>();
    for (const auto& e : j.value("entities", nlohmann::json::array())) {
        story.entities.push_back(
            EntityDecl{e.at("kind").get<std::string>(), e.at("name").get<std::string>()});
    }
    if (j.contains("query") && !j["query"].is_null()) story.query = j["query"].get<std::string>();
    if (j.contains("answer") && !j["answer"].is_null()) {
        story.gold_answer = j["answer"].get<std::string>();
    }
    return story;
}

nlohmann::json case_to_json(const StoryCase& story) {
    nlohmann::json j;
    j["sentences"] = story.sentences;
    j["entities"] = nlohmann::json::array();
    for (const auto& e : story.entities) j["entities"].push_back({{"kind", e.kind}, {"name", e.name}});
    j["query"] = story.query ? nlohmann::json(*story.query) : nlohmann::json(nullptr);
    j["answer"] = story.gold_answer ? nlohmann::json(*story.gold_answer) : nlohmann::json(nullptr);
    return j;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Exemplar load_exemplar_dir(const std::filesystem::path& dir, PromptStyle style) {
    Exemplar ex;
    ex.style = style;
    ex.story = case_from_json(nlohmann::json::parse(read_text_file(dir / "case.json")));
    ex.program.style = style;
    if (is_code_style(style)) {
        ex.program = parse_program(read_text_file(dir / "program.py"), style);
        if (!ex.program.faults.empty()) {
            const Fault& f = ex.program.faults.front();
            throw PromptError((dir / "program.py").string() + ":" + std::to_string(f.line) + ": " +
                              f.message);
        }
    }
    return ex;
}

std::filesystem::path exemplar_dir(const std::filesystem::path& asset_root, PresetId preset,
                                   PromptStyle style) {
    return asset_root / "prompts" / std::string(task_folder(preset)) /
           std::string(short_name(style));
}

Exemplar load_exemplar(const std::filesystem::path& asset_root, PresetId preset, PromptStyle style) {
    auto dir = exemplar_dir(asset_root, preset, style);
    if (!std::filesystem::exists(dir / "case.json")) {
        throw PromptError("no " + std::string(to_string(style)) + " exemplar for " +
                          std::string(to_string(preset)) + " under " + dir.string());
    }
    return load_exemplar_dir(dir, style);
}

std::filesystem::path default_asset_dir() {
    if (const char* env = std::getenv("CORRPUS_ASSET_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return CORRPUS_DEFAULT_ASSET_DIR;
}

}  // namespace corrpus
