#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "corrpus/llm_gateway.hpp"
#include "corrpus/prompt_forge.hpp"
#include "corrpus/world_model.hpp"

namespace corrpus {

struct Re3Tuple {
    std::string id;
    std::string premise;
    std::string alt_premise;
    std::string story;
    std::string alt_story;
};

// JSON array of {id, premise, alt_premise, story, alt_story}; all fields required.
std::vector<Re3Tuple> parse_re3_dataset(std::string_view json_text);
std::vector<Re3Tuple> load_re3_dataset(const std::filesystem::path& path);

// Lines, then sentence ends (. ! ?) followed by a space and a capital letter.
std::vector<std::string> split_sentences(std::string_view text);

// Entity identifiers (spaces -> underscores) for the main characters of a
// text: names that open a premise line followed by " is ", then capitalized
// multi-word names occurring at least twice. `premise` defaults to `text`.
std::vector<std::string> character_roster(std::string_view text,
                                          std::optional<std::string_view> premise = std::nullopt);

// Lowercase, trim, collapse internal whitespace.
std::string normalize_value(std::string_view value);

// character -> attribute key -> value -> generations that asserted it.
// Keys are list attribute names or "relations:<relation>".
struct AttributeExtraction {
    std::map<std::string, std::map<std::string, std::map<std::string, std::set<int>>>> values;

    bool empty() const { return values.empty(); }
    std::set<std::string> value_set(const std::string& character, const std::string& key) const;
    void add(const std::string& character, const std::string& key, const std::string& value,
             int generation);
    bool operator==(const AttributeExtraction&) const = default;
};

AttributeExtraction extraction_from_world(const WorldState& world, int generation);

// Keeps a (character, key, value) asserted by at least two of three generations.
// Throws std::invalid_argument unless given exactly three extractions.
AttributeExtraction majority_vote(std::span<const AttributeExtraction> generations);

// ("Joan_Westfall", "relations:husband", "Brent_Westfall") ->
// "Joan Westfall's husband is Brent Westfall."
std::string attribute_sentence(std::string_view character, std::string_view key,
                               std::string_view value);

struct Evidence {
    std::string character;
    std::string key;
    std::string premise_value;
    std::string story_value;
    double contradiction = 0;
};

struct DetectionVerdict {
    std::string pair_id;
    double score = 0;
    std::vector<Evidence> evidence;
    std::optional<std::string> fault;
};

DetectionVerdict detect(const AttributeExtraction& premise, const AttributeExtraction& story,
                        EntailmentScorer& scorer, std::string pair_id = {});

// Rank-based, average ranks for ties, label true = positive (contradictory).
// Throws std::invalid_argument when only one class is present.
double roc_auc(std::span<const std::pair<double, bool>> scored);

struct Re3Config {
    PromptStyle style = PromptStyle::specific_functions;
    std::string model = "code-davinci-002";
    double temperature = 0.7;
    double top_p = 0.95;
    int samples = 3;
    int max_output_tokens = 1024;
    std::size_t parallelism = 4;
    std::optional<std::size_t> tuple_limit;
};

struct ExtractionOutcome {
    AttributeExtraction voted;
    std::vector<AttributeExtraction> generations;
    std::vector<std::string> roster;
    std::vector<std::string> faults;
};

ExtractionOutcome extract_attributes(std::string_view text, const std::vector<std::string>& roster,
                                     const Re3Config& config, Completer& completer,
                                     const Exemplar& exemplar);

struct Re3Pair {
    std::string pair_id;
    std::size_t premise_text = 0;  // indices into the distinct-text table
    std::size_t story_text = 0;
    bool contradictory = false;
};

// The four labelled pairs of every tuple plus the distinct texts they use
// (each text with the roster it is extracted under).
struct Re3Plan {
    struct Text {
        std::string body;
        std::vector<std::string> roster;
    };
    std::vector<Text> texts;
    std::vector<Re3Pair> pairs;
};

Re3Plan plan_re3(const std::vector<Re3Tuple>& tuples);

std::vector<ExtractionOutcome> extract_plan(const Re3Plan& plan, const Re3Config& config,
                                            Completer& completer, const Exemplar& exemplar);

struct Re3Report {
    PromptStyle style = PromptStyle::specific_functions;
    std::optional<double> auc;
    std::size_t n_pairs = 0;
    std::size_t n_scored = 0;
    std::size_t faulted_pairs = 0;
    std::size_t extraction_faults = 0;
    std::vector<std::pair<DetectionVerdict, bool>> verdicts;  // verdict, contradictory
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;
    std::string to_text() const;
};

Re3Report score_plan(const Re3Plan& plan, const std::vector<ExtractionOutcome>& extractions,
                     EntailmentScorer& scorer, const Re3Config& config);

Re3Report run_re3(const std::vector<Re3Tuple>& tuples, const Re3Config& config,
                  Completer& completer, const Exemplar& exemplar, EntailmentScorer& scorer);

// Reads "<Name>'s <key> is <value>." sentences of a target prompt back into
// an update program; a perfect completer for template-written texts.
std::shared_ptr<Completer> make_template_completer(PromptStyle style);

// Tuples whose texts are written in attribute_sentence form, with exactly one
// attribute value swapped between premise and alternative premise.
std::vector<Re3Tuple> synthetic_re3_dataset(std::uint64_t seed, std::size_t tuples);

// Scorer table flagging contradictions the synthetic dataset injects: same
// character and key, different value. Everything else entails.
std::shared_ptr<EntailmentScorer> injected_contradiction_scorer(const std::vector<Re3Tuple>& tuples);

}  // namespace corrpus
