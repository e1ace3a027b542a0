#include "corrpus/re3_harness.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "corrpus/parallel.hpp"

namespace corrpus {

namespace {

using json = nlohmann::json;

constexpr std::string_view kRelationPrefix = "relations:";
const std::vector<std::string> kListKeys = {"appearance", "occupation", "gender", "age"};

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::string replace_all(std::string s, char from, char to) {
    std::replace(s.begin(), s.end(), from, to);
    return s;
}

bool is_list_key(std::string_view key) {
    return std::find(kListKeys.begin(), kListKeys.end(), key) != kListKeys.end();
}

std::string title_case(std::string s) {
    bool start = true;
    for (auto& ch : s) {
        auto c = static_cast<unsigned char>(ch);
        if (std::isspace(c)) {
            start = true;
        } else {
            if (start) ch = static_cast<char>(std::toupper(c));
            start = false;
        }
    }
    return s;
}

// Capitalized words that open sentences without being part of a name.
const std::set<std::string>& leading_stopwords() {
    static const std::set<std::string> words = {
        "A",     "An",    "And",  "As",    "At",   "After", "Before", "But",   "During", "For",
        "He",    "Her",   "His",  "If",    "In",   "It",    "Its",    "On",    "She",    "So",
        "That",  "The",   "Then", "There", "They", "This",  "When",   "While", "With",   "Yet",
        "Once",  "Later", "Now",  "Their", "Our",  "We",    "I",      "Of",    "To",     "From"};
    return words;
}

std::vector<std::string> capitalized_names(std::string_view text) {
    static const std::regex name(R"([A-Z][a-z]+(?: [A-Z][a-z]+)+)");
    std::vector<std::string> out;
    std::string s(text);
    for (std::sregex_iterator it(s.begin(), s.end(), name), end; it != end; ++it) {
        std::istringstream words(it->str());
        std::vector<std::string> tokens;
        for (std::string w; words >> w;) tokens.push_back(w);
        std::size_t skip = 0;
        while (skip < tokens.size() && leading_stopwords().contains(tokens[skip])) ++skip;
        if (tokens.size() - skip < 2) continue;
        std::string joined;
        for (std::size_t i = skip; i < tokens.size(); ++i) joined += (joined.empty() ? "" : " ") + tokens[i];
        out.push_back(std::move(joined));
    }
    return out;
}

void push_unique(std::vector<std::string>& v, std::string s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(std::move(s));
}

AttributeExtraction vote(std::span<const AttributeExtraction> generations, std::size_t needed) {
    std::map<std::tuple<std::string, std::string, std::string>, std::pair<std::size_t, std::set<int>>> tally;
    for (const auto& g : generations) {
        for (const auto& [c, keys] : g.values) {
            for (const auto& [k, vals] : keys) {
                for (const auto& [v, gens] : vals) {
                    auto& slot = tally[{c, k, v}];
                    ++slot.first;
                    slot.second.insert(gens.begin(), gens.end());
                }
            }
        }
    }
    AttributeExtraction out;
    for (const auto& [triple, slot] : tally) {
        if (slot.first < needed) continue;
        const auto& [c, k, v] = triple;
        out.values[c][k][v] = slot.second;
    }
    return out;
}

std::string pair_label(bool contradictory) { return contradictory ? "contradictory" : "consistent"; }

}  // namespace

// --- Dataset -----------------------------------------------------------------

std::vector<Re3Tuple> parse_re3_dataset(std::string_view json_text) {
    json j = json::parse(json_text);
    if (!j.is_array()) throw std::runtime_error("Re3 dataset must be a JSON array");
    std::vector<Re3Tuple> out;
    std::size_t index = 0;
    for (const auto& row : j) {
        Re3Tuple t;
        t.id = row.contains("id") ? (row["id"].is_string() ? row["id"].get<std::string>()
                                                           : row["id"].dump())
                                  : std::to_string(index);
        auto field = [&](const char* name) {
            if (!row.contains(name) || !row[name].is_string() || trim(row[name].get<std::string>()).empty()) {
                throw std::runtime_error(fmt::format("tuple {}: field '{}' missing or empty", t.id, name));
            }
            return row[name].get<std::string>();
        };
        t.premise = field("premise");
        t.alt_premise = field("alt_premise");
        t.story = field("story");
        t.alt_story = field("alt_story");
        out.push_back(std::move(t));
        ++index;
    }
    return out;
}

std::vector<Re3Tuple> load_re3_dataset(const std::filesystem::path& path) {
    return parse_re3_dataset(read_text_file(path));
}

// --- Text handling -----------------------------------------------------------

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    std::istringstream lines{std::string(text)};
    for (std::string line; std::getline(lines, line);) {
        std::string current;
        for (std::size_t i = 0; i < line.size(); ++i) {
            current += line[i];
            bool end = (line[i] == '.' || line[i] == '!' || line[i] == '?') && i + 2 < line.size() &&
                       line[i + 1] == ' ' && std::isupper(static_cast<unsigned char>(line[i + 2]));
            if (end) {
                if (auto s = trim(current); !s.empty()) out.push_back(std::move(s));
                current.clear();
            }
        }
        if (auto s = trim(current); !s.empty()) out.push_back(std::move(s));
    }
    return out;
}

std::vector<std::string> character_roster(std::string_view text, std::optional<std::string_view> premise) {
    std::vector<std::string> names;
    for (const auto& sentence : split_sentences(premise.value_or(text))) {
        for (const auto& name : capitalized_names(sentence)) {
            if (sentence.starts_with(name + " is ")) push_unique(names, name);
            break;
        }
    }
    std::map<std::string, int> counts;
    std::vector<std::string> order;
    for (const auto& name : capitalized_names(text)) {
        if (counts[name]++ == 0) order.push_back(name);
    }
    for (const auto& name : order) {
        if (counts[name] >= 2) push_unique(names, name);
    }
    for (auto& n : names) n = replace_all(n, ' ', '_');
    return names;
}

std::string normalize_value(std::string_view value) {
    std::string out;
    bool space = false;
    for (unsigned char c : value) {
        if (std::isspace(c)) {
            space = !out.empty();
            continue;
        }
        if (space) out += ' ';
        space = false;
        out += static_cast<char>(std::tolower(c));
    }
    return out;
}

// --- Extraction and voting ---------------------------------------------------

std::set<std::string> AttributeExtraction::value_set(const std::string& character,
                                                     const std::string& key) const {
    std::set<std::string> out;
    auto c = values.find(character);
    if (c == values.end()) return out;
    auto k = c->second.find(key);
    if (k == c->second.end()) return out;
    for (const auto& [v, _] : k->second) out.insert(v);
    return out;
}

void AttributeExtraction::add(const std::string& character, const std::string& key,
                              const std::string& value, int generation) {
    values[character][key][value].insert(generation);
}

AttributeExtraction extraction_from_world(const WorldState& world, int generation) {
    AttributeExtraction out;
    for (const auto& id : world.entity_order()) {
        const Entity& e = world.entity(id);
        for (const auto& attr : e.schema->attributes) {
            if (attr.kind == AttributeKind::list) {
                for (const auto& v : e.lists.at(attr.name)) {
                    if (auto n = normalize_value(v); !n.empty()) out.add(id, attr.name, n, generation);
                }
            } else if (attr.kind == AttributeKind::map) {
                for (const auto& [k, v] : e.maps.at(attr.name)) {
                    auto key = normalize_value(k);
                    auto value = normalize_value(replace_all(v, '_', ' '));
                    if (key.empty() || value.empty()) continue;
                    out.add(id, std::string(kRelationPrefix) + key, value, generation);
                }
            }
        }
    }
    return out;
}

AttributeExtraction majority_vote(std::span<const AttributeExtraction> generations) {
    if (generations.size() != 3) {
        throw std::invalid_argument(fmt::format("majority vote needs 3 generations, got {}", generations.size()));
    }
    return vote(generations, 2);
}

std::string attribute_sentence(std::string_view character, std::string_view key, std::string_view value) {
    if (trim(value).empty()) throw std::invalid_argument("empty attribute value");
    std::string who = replace_all(std::string(character), '_', ' ');
    if (key.starts_with(kRelationPrefix)) {
        std::string relation = replace_all(std::string(key.substr(kRelationPrefix.size())), '_', ' ');
        if (trim(relation).empty()) throw std::invalid_argument("empty relation key");
        return fmt::format("{}'s {} is {}.", who, relation, title_case(replace_all(std::string(value), '_', ' ')));
    }
    if (!is_list_key(key)) throw std::invalid_argument("unknown attribute key '" + std::string(key) + "'");
    return fmt::format("{}'s {} is {}.", who, key, value);
}

// --- Detection ---------------------------------------------------------------

DetectionVerdict detect(const AttributeExtraction& premise, const AttributeExtraction& story,
                        EntailmentScorer& scorer, std::string pair_id) {
    DetectionVerdict verdict;
    verdict.pair_id = std::move(pair_id);
    try {
        for (const auto& [character, p_keys] : premise.values) {
            auto s_char = story.values.find(character);
            if (s_char == story.values.end()) continue;
            for (const auto& [key, p_vals] : p_keys) {
                auto s_key = s_char->second.find(key);
                if (s_key == s_char->second.end()) continue;
                for (const auto& [pv, _] : p_vals) {
                    for (const auto& [sv, __] : s_key->second) {
                        auto score = scorer.score(attribute_sentence(character, key, pv),
                                                  attribute_sentence(character, key, sv));
                        verdict.evidence.push_back(Evidence{character, key, pv, sv, score.contradiction});
                        verdict.score = std::max(verdict.score, score.contradiction);
                    }
                }
            }
        }
    } catch (const std::exception& e) {
        verdict.fault = e.what();
    }
    return verdict;
}

double roc_auc(std::span<const std::pair<double, bool>> scored) {
    std::vector<std::size_t> order(scored.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scored[a].first < scored[b].first; });
    std::vector<double> rank(scored.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && scored[order[j]].first == scored[order[i]].first) ++j;
        double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) rank[order[k]] = avg;
        i = j;
    }
    double pos = 0, rank_sum = 0;
    for (std::size_t i = 0; i < scored.size(); ++i) {
        if (scored[i].second) {
            ++pos;
            rank_sum += rank[i];
        }
    }
    double neg = static_cast<double>(scored.size()) - pos;
    if (pos == 0 || neg == 0) throw std::invalid_argument("ROC-AUC needs both classes");
    return (rank_sum - pos * (pos + 1) / 2.0) / (pos * neg);
}

// --- Pipeline ------------------------------------------------------------------

ExtractionOutcome extract_attributes(std::string_view text, const std::vector<std::string>& roster,
                                     const Re3Config& config, Completer& completer,
                                     const Exemplar& exemplar) {
    ExtractionOutcome out;
    out.roster = roster;
    if (!is_code_style(config.style)) {
        throw std::invalid_argument("the natural-language style does not apply to Re3");
    }
    StoryCase story;
    story.sentences = split_sentences(text);
    if (story.sentences.empty()) return out;
    for (const auto& id : roster) story.entities.push_back(EntityDecl{"character", id});

    const SchemaPreset& preset = SchemaPreset::re3_character();
    PromptBundle bundle;
    try {
        bundle = render(story, config.style, preset, exemplar);
    } catch (const PromptError& e) {
        out.faults.push_back(fmt::format("prompt: {}", e.what()));
        return out;
    }

    CompletionRequest request;
    request.model = config.model;
    request.prompt = bundle.request();
    request.temperature = config.temperature;
    request.top_p = config.top_p;
    request.sample_count = config.samples;
    request.max_output_tokens = config.max_output_tokens;

    std::vector<std::string> raws;
    try {
        raws = completer.complete(request);
    } catch (const GatewayError& e) {
        out.faults.push_back(fmt::format("gateway_{}: {}", to_string(e.kind()), e.what()));
    } catch (const std::exception& e) {
        out.faults.push_back(fmt::format("backend: {}", e.what()));
    }

    int usable = 0;
    for (std::size_t i = 0; i < raws.size(); ++i) {
        const int gen = static_cast<int>(i);
        try {
            UpdateProgram program = parse_program(completion_slice(bundle, raws[i]), config.style);
            for (const auto& f : program.faults) {
                out.faults.push_back(fmt::format("{}: sample {}: {}", to_string(f.kind), gen, f.message));
            }
            auto result = evaluate(program, WorldState::init(preset, story.entities),
                                   AbstractFunctionTable::re3_character());
            for (const auto& f : result.faults) {
                out.faults.push_back(fmt::format("{}: sample {}: {}", to_string(f.kind), gen, f.message));
            }
            out.generations.push_back(extraction_from_world(result.world, gen));
            ++usable;
        } catch (const EmptyCompletion&) {
            out.faults.push_back(fmt::format("empty_completion: sample {}", gen));
            out.generations.emplace_back();
        } catch (const ParseError& e) {
            out.faults.push_back(fmt::format("parse_error: sample {}: {}", gen, e.what()));
            out.generations.emplace_back();
        }
    }
    if (usable == 0) {
        out.faults.push_back("all_samples_unparseable: no usable generation");
        return out;
    }
    if (out.generations.size() == 3) {
        out.voted = majority_vote(out.generations);
    } else {
        out.voted = vote(out.generations, out.generations.size() / 2 + 1);
    }
    return out;
}

Re3Plan plan_re3(const std::vector<Re3Tuple>& tuples) {
    Re3Plan plan;
    std::map<std::pair<std::string, std::vector<std::string>>, std::size_t> index;
    auto text = [&](const std::string& body, std::vector<std::string> roster) {
        auto key = std::make_pair(body, roster);
        if (auto it = index.find(key); it != index.end()) return it->second;
        plan.texts.push_back(Re3Plan::Text{body, std::move(roster)});
        return index[key] = plan.texts.size() - 1;
    };
    for (const auto& t : tuples) {
        std::size_t p = text(t.premise, character_roster(t.premise));
        std::size_t pp = text(t.alt_premise, character_roster(t.alt_premise));
        std::size_t s = text(t.story, character_roster(t.story, t.premise));
        std::size_t ss = text(t.alt_story, character_roster(t.alt_story, t.alt_premise));
        plan.pairs.push_back({t.id + ":P-S", p, s, false});
        plan.pairs.push_back({t.id + ":P'-S'", pp, ss, false});
        plan.pairs.push_back({t.id + ":P-S'", p, ss, true});
        plan.pairs.push_back({t.id + ":P'-S", pp, s, true});
    }
    return plan;
}

std::vector<ExtractionOutcome> extract_plan(const Re3Plan& plan, const Re3Config& config,
                                            Completer& completer, const Exemplar& exemplar) {
    return parallel_map(plan.texts.size(), config.parallelism, [&](std::size_t i) {
        return extract_attributes(plan.texts[i].body, plan.texts[i].roster, config, completer, exemplar);
    });
}

Re3Report score_plan(const Re3Plan& plan, const std::vector<ExtractionOutcome>& extractions,
                     EntailmentScorer& scorer, const Re3Config& config) {
    Re3Report report;
    report.style = config.style;
    report.n_pairs = plan.pairs.size();
    for (const auto& ex : extractions) report.extraction_faults += ex.faults.size();

    auto verdicts = parallel_map(plan.pairs.size(), config.parallelism, [&](std::size_t i) {
        const Re3Pair& pair = plan.pairs[i];
        return detect(extractions[pair.premise_text].voted, extractions[pair.story_text].voted, scorer,
                      pair.pair_id);
    });

    std::vector<std::pair<double, bool>> scored;
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        bool label = plan.pairs[i].contradictory;
        if (verdicts[i].fault) {
            ++report.faulted_pairs;
            report.warnings.push_back(
                fmt::format("{} excluded from AUC: {}", verdicts[i].pair_id, *verdicts[i].fault));
        } else {
            scored.emplace_back(verdicts[i].score, label);
        }
        report.verdicts.emplace_back(std::move(verdicts[i]), label);
    }
    report.n_scored = scored.size();
    try {
        report.auc = roc_auc(scored);
    } catch (const std::invalid_argument& e) {
        report.warnings.push_back(fmt::format("no AUC: {}", e.what()));
    }
    return report;
}

Re3Report run_re3(const std::vector<Re3Tuple>& tuples, const Re3Config& config, Completer& completer,
                  const Exemplar& exemplar, EntailmentScorer& scorer) {
    std::vector<Re3Tuple> used = tuples;
    if (config.tuple_limit && used.size() > *config.tuple_limit) used.resize(*config.tuple_limit);
    Re3Plan plan = plan_re3(used);
    auto extractions = extract_plan(plan, config, completer, exemplar);
    return score_plan(plan, extractions, scorer, config);
}

json Re3Report::to_json() const {
    json pairs = json::array();
    for (const auto& [v, label] : verdicts) {
        json evidence = json::array();
        for (const auto& e : v.evidence) {
            evidence.push_back({{"character", e.character},
                                {"key", e.key},
                                {"premise_value", e.premise_value},
                                {"story_value", e.story_value},
                                {"contradiction", e.contradiction}});
        }
        pairs.push_back({{"pair_id", v.pair_id},
                         {"label", pair_label(label)},
                         {"score", v.score},
                         {"fault", v.fault ? json(*v.fault) : json(nullptr)},
                         {"evidence", std::move(evidence)}});
    }
    return {{"task", "re3"},
            {"style", std::string(to_string(style))},
            {"auc", auc ? json(*auc) : json(nullptr)},
            {"n_pairs", n_pairs},
            {"n_scored", n_scored},
            {"faulted_pairs", faulted_pairs},
            {"extraction_faults", extraction_faults},
            {"warnings", warnings},
            {"pairs", std::move(pairs)}};
}

std::string Re3Report::to_text() const {
    std::string out;
    out += fmt::format("{:<20}{}\n", "task", "re3");
    out += fmt::format("{:<20}{}\n", "style", to_string(style));
    out += fmt::format("{:<20}{}\n", "pairs", n_pairs);
    out += fmt::format("{:<20}{}\n", "scored pairs", n_scored);
    out += fmt::format("{:<20}{}\n", "faulted pairs", faulted_pairs);
    out += fmt::format("{:<20}{}\n", "extraction faults", extraction_faults);
    out += auc ? fmt::format("{:<20}{:.4f}\n", "roc-auc", *auc) : fmt::format("{:<20}n/a\n", "roc-auc");
    out += "\npair                          label          score  evidence\n";
    for (const auto& [v, label] : verdicts) {
        out += fmt::format("{:<30}{:<15}{:>5.3f}  {}{}\n", v.pair_id, pair_label(label), v.score,
                           v.evidence.size(), v.fault ? " (faulted)" : "");
    }
    return out;
}

// --- Mocks and synthetic data ---------------------------------------------------

std::shared_ptr<Completer> make_template_completer(PromptStyle style) {
    return std::make_shared<ScriptedCompleter>("template", [style](const CompletionRequest& request, int) {
        static const std::regex form(R"(^(.+?)'s ([a-z][a-z _-]*?) is (.+?)\.$)");
        StoryCase target = recover_target_case(request.prompt, style);
        std::vector<std::string> labels = target.sentences;
        if (style == PromptStyle::specific_functions) labels = unique_slugs(target.sentences);

        UpdateProgram program;
        program.style = style;
        for (std::size_t i = 0; i < target.sentences.size(); ++i) {
            StatementGroup group{labels[i], {}};
            std::smatch m;
            const std::string& sentence = target.sentences[i];
            if (std::regex_match(sentence, m, form)) {
                std::string id = replace_all(m[1].str(), ' ', '_');
                std::string key = m[2].str();
                std::string value = m[3].str();
                StatementNode node;
                if (is_list_key(key)) {
                    if (style == PromptStyle::abstract_functions) {
                        node = AbstractCall{"set_" + key, true,
                                            {Argument{std::nullopt, Path{id, std::nullopt}},
                                             Argument{std::nullopt, Literal::quoted(value, '"')}}};
                    } else {
                        node = ListAppend{Path{id, key}, Literal::quoted(value, '\'')};
                    }
                } else {
                    std::string relation = replace_all(key, ' ', '_');
                    std::string other = replace_all(value, ' ', '_');
                    if (style == PromptStyle::abstract_functions) {
                        node = AbstractCall{"set_relation", true,
                                            {Argument{std::nullopt, Path{id, std::nullopt}},
                                             Argument{std::nullopt, Literal::quoted(relation, '\'')},
                                             Argument{std::nullopt, Path{other, std::nullopt}}}};
                    } else {
                        node = MapAssign{Path{id, "relations"}, Literal::quoted(relation, '\''),
                                         Literal::quoted(other, '\'')};
                    }
                }
                group.statements.push_back(Statement{std::move(node), 0});
            }
            if (group.statements.empty() && style == PromptStyle::specific_functions) {
                group.statements.push_back(Statement{Pass{}, 0});
            }
            program.groups.push_back(std::move(group));
        }
        Exemplar ex{target, std::move(program), style};
        return continuation(ex, SchemaPreset::re3_character());
    });
}

namespace {

const char* const kFirst[] = {"Shannon", "Marcus", "Elena", "Victor", "Priya", "Owen", "Clara", "Dmitri",
                              "Hazel", "Tobias", "Ingrid", "Rafael"};
const char* const kLast[] = {"Reed", "Calloway", "Hart", "Lindqvist", "Okafor", "Baines", "Moreau", "Sato"};
const std::map<std::string, std::vector<std::string>> kValues = {
    {"appearance", {"red hair", "black hair", "blonde hair", "green eyes", "brown eyes", "a beard", "freckles"}},
    {"occupation", {"painter", "doctor", "teacher", "pilot", "farmer", "lawyer", "baker"}},
    {"gender", {"female", "male"}},
    {"age", {"young", "middle-aged", "elderly", "teenage"}},
};

struct SynthCharacter {
    std::string name;
    std::map<std::string, std::string> attrs;
};

std::string synth_text(const std::vector<SynthCharacter>& cast, bool intro,
                       const std::vector<std::vector<std::string>>& keys) {
    std::string out;
    for (std::size_t c = 0; c < cast.size(); ++c) {
        std::vector<std::string> sentences;
        if (intro) sentences.push_back(cast[c].name + " is a character in this story.");
        for (const auto& key : keys[c]) {
            sentences.push_back(attribute_sentence(replace_all(cast[c].name, ' ', '_'), key, cast[c].attrs.at(key)));
        }
        for (std::size_t i = 0; i < sentences.size(); ++i) out += (i ? " " : "") + sentences[i];
        out += "\n";
    }
    return out;
}

}  // namespace

std::vector<Re3Tuple> synthetic_re3_dataset(std::uint64_t seed, std::size_t tuples) {
    std::mt19937_64 rng(seed);
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    std::vector<Re3Tuple> out;
    for (std::size_t t = 0; t < tuples; ++t) {
        std::vector<SynthCharacter> cast(2);
        std::size_t first = pick(std::size(kFirst));
        cast[0].name = std::string(kFirst[first]) + " " + kLast[pick(std::size(kLast))];
        cast[1].name = std::string(kFirst[(first + 1 + pick(std::size(kFirst) - 1)) % std::size(kFirst)]) + " " +
                       kLast[pick(std::size(kLast))];
        for (auto& c : cast) {
            for (const auto& [key, pool] : kValues) c.attrs[key] = pool[pick(pool.size())];
        }
        // The premise states three attributes per character; the story
        // repeats two of them, always including the one that will be swapped.
        std::size_t victim = pick(2);
        std::string swapped = kListKeys[pick(kListKeys.size())];
        std::vector<std::vector<std::string>> premise_keys(2), story_keys(2);
        for (std::size_t c = 0; c < 2; ++c) {
            std::vector<std::string> keys = kListKeys;
            std::shuffle(keys.begin(), keys.end(), rng);
            keys.resize(3);
            if (c == victim && std::find(keys.begin(), keys.end(), swapped) == keys.end()) keys[0] = swapped;
            premise_keys[c] = keys;
            std::vector<std::string> repeated(keys.begin(), keys.begin() + 2);
            if (c == victim && std::find(repeated.begin(), repeated.end(), swapped) == repeated.end()) {
                repeated[1] = swapped;
            }
            story_keys[c] = repeated;
        }
        std::vector<SynthCharacter> alt = cast;
        const auto& pool = kValues.at(swapped);
        std::string& value = alt[victim].attrs[swapped];
        std::string original = value;
        while (value == original) value = pool[pick(pool.size())];

        Re3Tuple tuple;
        tuple.id = fmt::format("synthetic-{:02}", t);
        tuple.premise = synth_text(cast, true, premise_keys);
        tuple.alt_premise = synth_text(alt, true, premise_keys);
        tuple.story = synth_text(cast, false, story_keys);
        tuple.alt_story = synth_text(alt, false, story_keys);
        out.push_back(std::move(tuple));
    }
    return out;
}

std::shared_ptr<EntailmentScorer> injected_contradiction_scorer(const std::vector<Re3Tuple>& tuples) {
    static const std::regex form(R"(^(.+?)'s ([a-z][a-z _-]*?) is (.+?)\.$)");
    std::map<TableScorer::Key, EntailmentScore> table;
    const EntailmentScore contradiction{0, 0, 1};
    for (const auto& t : tuples) {
        std::map<std::pair<std::string, std::string>, std::string> original;
        for (const auto& s : split_sentences(t.premise)) {
            std::smatch m;
            if (std::regex_match(s, m, form)) original[{m[1].str(), m[2].str()}] = s;
        }
        for (const auto& s : split_sentences(t.alt_premise)) {
            std::smatch m;
            if (!std::regex_match(s, m, form)) continue;
            auto it = original.find({m[1].str(), m[2].str()});
            if (it == original.end() || it->second == s) continue;
            table[{it->second, s}] = contradiction;
            table[{s, it->second}] = contradiction;
        }
    }
    return std::make_shared<TableScorer>(std::move(table), EntailmentScore{1, 0, 0});
}

}  // namespace corrpus
