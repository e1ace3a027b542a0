#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "corrpus/llm_gateway.hpp"
#include "corrpus/prompt_forge.hpp"
#include "corrpus/update_dsl.hpp"
#include "corrpus/world_model.hpp"

namespace corrpus {

struct BabiLine {
    int id = 0;
    std::string text;
    bool operator==(const BabiLine&) const = default;
};

struct BabiSample {
    std::vector<BabiLine> story;
    std::string question;
    std::string gold_answer;
    std::vector<int> supporting_ids;

    bool operator==(const BabiSample&) const = default;
};

class BabiFormatError : public std::runtime_error {
public:
    BabiFormatError(std::string source, int line, const std::string& message)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

// One sample per question line, holding every statement since the last id reset.
std::vector<BabiSample> parse_babi_text(std::string_view text, std::string_view source = "<text>");
std::vector<BabiSample> parse_babi_file(const std::filesystem::path& path);

std::string format_babi(const std::vector<BabiSample>& stories);

enum class ActionType { move, take, drop };

struct Action {
    ActionType type;
    std::string actor;
    std::string target;  // destination for moves, object otherwise
    bool operator==(const Action&) const = default;
};

struct ActionLexicon {
    std::vector<std::string> movement_verbs;
    std::vector<std::string> take_verbs;
    std::vector<std::string> drop_verbs;

    static const ActionLexicon& standard();

    bool disjoint() const;
    // Number of patterns a sentence matches; the shipped data needs exactly 1.
    int match_count(std::string_view sentence) const;
    // Throws OracleError when no pattern matches.
    Action parse(std::string_view sentence) const;
    std::string render(const Action& action, std::size_t verb_choice = 0) const;
};

class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OracleResult {
    std::string answer;
    UpdateProgram program;
    WorldState world;
    StoryCase story_case;
};

// Characters in order of first mention, then objects.
StoryCase case_for_sample(const BabiSample& sample, const ActionLexicon& lexicon);

OracleResult oracle_solve(const BabiSample& sample, const ActionLexicon& lexicon,
                          PromptStyle style = PromptStyle::comment_only);

struct EntityCounts {
    int characters = 4;
    int objects = 3;
    int locations = 6;
};

// Length below 2 is raised to 2: a question needs a move and a take first.
BabiSample generate_synthetic(std::uint64_t seed, int length, EntityCounts counts = {});

// Completer that answers every bAbI prompt with the oracle's program.
std::shared_ptr<Completer> make_oracle_completer(PromptStyle style,
                                                 const ActionLexicon& lexicon = ActionLexicon::standard());

bool answers_match(std::string_view predicted, std::string_view gold);

struct BabiConfig {
    PromptStyle style = PromptStyle::abstract_functions;
    std::optional<std::size_t> sample_limit;
    std::string model = "code-davinci-002";
    double temperature = 0.0;
    double top_p = 0.95;
    int max_output_tokens = 1024;
    std::size_t parallelism = 4;
};

struct BabiVerdict {
    std::size_t index = 0;
    std::string question;
    std::string gold;
    std::optional<std::string> predicted;
    bool correct = false;
    std::vector<std::string> faults;  // "<kind>: <message>"
};

struct BabiReport {
    PromptStyle style = PromptStyle::abstract_functions;
    std::size_t n = 0;
    std::size_t correct = 0;
    std::size_t unanswerable = 0;
    std::size_t faulted_samples = 0;
    std::map<std::string, std::size_t> fault_counts;
    std::vector<BabiVerdict> verdicts;

    double accuracy() const { return n == 0 ? 0.0 : static_cast<double>(correct) / n; }
    nlohmann::json to_json() const;
    std::string to_text() const;
};

BabiVerdict evaluate_babi_sample(const BabiSample& sample, std::size_t index, const BabiConfig& config,
                                 Completer& completer, const Exemplar& exemplar,
                                 const ActionLexicon& lexicon = ActionLexicon::standard());

BabiReport run_babi(const std::vector<BabiSample>& samples, const BabiConfig& config,
                    Completer& completer, const Exemplar& exemplar,
                    const ActionLexicon& lexicon = ActionLexicon::standard());

}  // namespace corrpus
