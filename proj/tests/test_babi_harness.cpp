#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "corrpus/babi_harness.hpp"

using namespace corrpus;

namespace {

const std::filesystem::path kAssets = CORRPUS_TEST_ASSETS;

const std::vector<BabiSample>& dataset() {
    static const auto samples = parse_babi_file(kAssets / "data" / "babi" / "qa2_test.txt");
    return samples;
}

constexpr PromptStyle kStyles[] = {PromptStyle::comment_only, PromptStyle::specific_functions,
                                   PromptStyle::abstract_functions, PromptStyle::natural_language};

// Naive replay used as a second opinion: walk the story backwards from the
// question and read off the last relevant fact. Shares no code with Sim.
std::optional<std::string> backward_answer(const BabiSample& s) {
    const auto& lex = ActionLexicon::standard();
    std::string object = s.question.substr(s.question.rfind(' ') + 1);
    object.pop_back();  // '?'
    std::vector<Action> actions;
    for (const auto& line : s.story) actions.push_back(lex.parse(line.text));
    for (std::size_t i = actions.size(); i-- > 0;) {
        const Action& a = actions[i];
        if (a.target != object) continue;
        // last touch: either dropped here or picked up here; both pin it to
        // the toucher's whereabouts at that moment (for drops) or later (takes)
        std::string who = a.actor;
        if (a.type == ActionType::drop) {
            for (std::size_t j = i; j-- > 0;) {
                if (actions[j].actor == who && actions[j].type == ActionType::move) return actions[j].target;
            }
            return std::nullopt;
        }
        for (std::size_t j = actions.size(); j-- > 0;) {
            if (actions[j].actor == who && actions[j].type == ActionType::move) return actions[j].target;
        }
        return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace

TEST(BabiFormat, ParsesQuestionsAndResets) {
    const std::string text =
        "1 Mary moved to the bathroom.\n"
        "2 Mary got the football there.\n"
        "3 Where is the football? \tbathroom\t2 1\n"
        "4 Mary went to the garden.\n"
        "5 Where is the football? \tgarden\t2 4\n"
        "1 John went to the office.\n"
        "2 John took the milk.\n"
        "3 Where is the milk?\toffice\t1 2\n";
    auto samples = parse_babi_text(text);
    ASSERT_EQ(samples.size(), 3u);
    EXPECT_EQ(samples[0].story.size(), 2u);
    EXPECT_EQ(samples[1].story.size(), 3u);
    EXPECT_EQ(samples[1].gold_answer, "garden");
    EXPECT_EQ(samples[1].supporting_ids, (std::vector<int>{2, 4}));
    EXPECT_EQ(samples[2].story.front().text, "John went to the office.");
    EXPECT_EQ(samples[0].question, "Where is the football?");
    EXPECT_EQ(parse_babi_text(format_babi(samples)), samples);
}

TEST(BabiFormat, RejectsMalformedFiles) {
    EXPECT_THROW(parse_babi_text("1 a.\n3 b.\n2 c.\n"), BabiFormatError);
    EXPECT_THROW(parse_babi_text("1 a.\n2 Where is x?\n"), BabiFormatError);
    EXPECT_THROW(parse_babi_text("one a.\n"), BabiFormatError);
    try {
        parse_babi_text("1 a.\n2 Where is x?\n", "f.txt");
    } catch (const BabiFormatError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_NE(std::string(e.what()).find("f.txt:2"), std::string::npos);
    }
}

TEST(BabiData, ShippedSetHasThousandQuestions) {
    EXPECT_EQ(dataset().size(), 1000u);
}

TEST(Lexicon, VerbSetsAreDisjointAndTotalOverData) {
    const auto& lex = ActionLexicon::standard();
    EXPECT_TRUE(lex.disjoint());
    for (const auto& s : dataset()) {
        for (const auto& line : s.story) ASSERT_EQ(lex.match_count(line.text), 1) << line.text;
    }
    EXPECT_THROW(lex.parse("Mary sang a song."), OracleError);
}

TEST(Lexicon, RenderParsesBack) {
    const auto& lex = ActionLexicon::standard();
    for (auto type : {ActionType::move, ActionType::take, ActionType::drop}) {
        Action a{type, "Sandra", type == ActionType::move ? "hallway" : "apple"};
        for (std::size_t v = 0; v < 6; ++v) EXPECT_EQ(lex.parse(lex.render(a, v)), a);
    }
}

TEST(Oracle, AgreesWithGoldOnShippedData) {
    for (const auto& s : dataset()) {
        auto r = oracle_solve(s, ActionLexicon::standard());
        ASSERT_EQ(r.answer, s.gold_answer) << s.question;
        ASSERT_EQ(backward_answer(s), s.gold_answer) << s.question;
        ASSERT_TRUE(carrier_duality_holds(r.world));
        ASSERT_EQ(r.world.step_index(), s.story.size());
    }
}

TEST(Oracle, ProgramEvaluatesToSameWorldInEveryStyle) {
    for (std::size_t i = 0; i < dataset().size(); i += 37) {
        const auto& s = dataset()[i];
        auto comment = oracle_solve(s, ActionLexicon::standard(), PromptStyle::comment_only);
        for (auto style : {PromptStyle::specific_functions, PromptStyle::abstract_functions}) {
            auto r = oracle_solve(s, ActionLexicon::standard(), style);
            EXPECT_EQ(r.world.snapshot(), comment.world.snapshot());
            auto reparsed = parse_program(pretty_print(r.program), style);
            EXPECT_TRUE(reparsed.faults.empty());
            auto eval = evaluate(reparsed,
                                 WorldState::init(SchemaPreset::babi_task2(), r.story_case.entities),
                                 AbstractFunctionTable::babi_task2());
            EXPECT_TRUE(eval.faults.empty());
            EXPECT_EQ(eval.world.snapshot(), comment.world.snapshot());
            EXPECT_EQ(extract_answer(eval, s.question), s.gold_answer);
        }
    }
}

TEST(Oracle, ExemplarProgramsMatchOracleOutput) {
    for (auto style : {PromptStyle::comment_only, PromptStyle::specific_functions,
                       PromptStyle::abstract_functions}) {
        Exemplar ex = load_exemplar(kAssets, PresetId::babi_task2, style);
        BabiSample s;
        for (std::size_t i = 0; i < ex.story.sentences.size(); ++i) {
            s.story.push_back({static_cast<int>(i + 1), ex.story.sentences[i]});
        }
        s.question = *ex.story.query;
        s.gold_answer = *ex.story.gold_answer;
        auto r = oracle_solve(s, ActionLexicon::standard(), style);
        EXPECT_EQ(r.program, ex.program) << to_string(style);
        EXPECT_EQ(r.story_case.entities, ex.story.entities);
    }
}

TEST(Synthetic, IsDeterministicAndAnswerable) {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        int length = 1 + static_cast<int>(seed % 25);
        auto s = generate_synthetic(seed, length);
        EXPECT_EQ(s, generate_synthetic(seed, length));
        EXPECT_EQ(static_cast<int>(s.story.size()), std::max(2, length));
        auto r = oracle_solve(s, ActionLexicon::standard());
        EXPECT_EQ(r.answer, s.gold_answer);
        EXPECT_EQ(backward_answer(s), s.gold_answer) << format_babi({s});
    }
}

TEST(Synthetic, RespectsEntityCounts) {
    EntityCounts counts{2, 1, 3};
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto s = generate_synthetic(seed, 12, counts);
        auto c = case_for_sample(s, ActionLexicon::standard());
        int chars = 0, objs = 0;
        for (const auto& e : c.entities) (e.kind == "character" ? chars : objs)++;
        EXPECT_LE(chars, 2);
        EXPECT_LE(objs, 1);
    }
}

class OracleRun : public ::testing::TestWithParam<PromptStyle> {};

TEST_P(OracleRun, PerfectCompleterScoresFullAccuracy) {
    PromptStyle style = GetParam();
    BabiConfig config;
    config.style = style;
    auto completer = make_oracle_completer(style);
    auto report = run_babi(dataset(), config, *completer,
                           load_exemplar(kAssets, PresetId::babi_task2, style));
    EXPECT_EQ(report.n, 1000u);
    EXPECT_EQ(report.correct, 1000u);
    EXPECT_DOUBLE_EQ(report.accuracy(), 1.0);
    EXPECT_EQ(report.faulted_samples, 0u);
}

TEST_P(OracleRun, EmptyCompletionsScoreZero) {
    PromptStyle style = GetParam();
    BabiConfig config;
    config.style = style;
    config.sample_limit = 40;
    ScriptedCompleter empty("empty", [](const auto&, int) { return std::string("\n"); });
    auto report = run_babi(dataset(), config, empty,
                           load_exemplar(kAssets, PresetId::babi_task2, style));
    EXPECT_EQ(report.n, 40u);
    EXPECT_EQ(report.correct, 0u);
    EXPECT_EQ(report.fault_counts.at("empty_completion"), 40u);
}

INSTANTIATE_TEST_SUITE_P(Styles, OracleRun, ::testing::ValuesIn(kStyles),
                         [](const auto& info) { return std::string(short_name(info.param)); });

TEST(Run, ReportIgnoresParallelismAndOrder) {
    std::vector<BabiSample> subset(dataset().begin(), dataset().begin() + 60);
    BabiConfig config;
    config.style = PromptStyle::abstract_functions;
    auto ex = load_exemplar(kAssets, PresetId::babi_task2, config.style);
    // answers correctly on even-length stories only
    auto oracle = make_oracle_completer(config.style);
    ScriptedCompleter picky("picky", [&](const CompletionRequest& r, int) {
        auto target = recover_target_case(r.prompt, config.style);
        if (target.sentences.size() % 2) return std::string("        garbage(\n");
        return oracle->complete(r).front();
    });
    config.parallelism = 1;
    auto serial = run_babi(subset, config, picky, ex);
    config.parallelism = 8;
    auto parallel = run_babi(subset, config, picky, ex);
    EXPECT_EQ(serial.to_json(), parallel.to_json());
    EXPECT_GT(serial.correct, 0u);
    EXPECT_LT(serial.correct, 60u);

    std::vector<BabiSample> shuffled = subset;
    std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937(3));
    auto reordered = run_babi(shuffled, config, picky, ex);
    EXPECT_EQ(reordered.correct, serial.correct);
    EXPECT_EQ(reordered.fault_counts, serial.fault_counts);
}

TEST(Run, WrongStyleProgramIsFaultedNotCrashed) {
    BabiConfig config;
    config.style = PromptStyle::comment_only;
    config.sample_limit = 5;
    auto abstract = make_oracle_completer(PromptStyle::abstract_functions);
    auto report = run_babi(dataset(), config, *abstract,
                           load_exemplar(kAssets, PresetId::babi_task2, config.style));
    EXPECT_EQ(report.n, 5u);
    EXPECT_GT(report.fault_counts.at("disallowed_form"), 0u);
}

TEST(Run, GatewayErrorsAreCounted) {
    BabiConfig config;
    config.sample_limit = 3;
    CacheCompleter cache(std::make_shared<Cassette>());
    auto report = run_babi(dataset(), config, cache,
                           load_exemplar(kAssets, PresetId::babi_task2, config.style));
    EXPECT_EQ(report.fault_counts.at("gateway_cache_miss"), 3u);
    EXPECT_EQ(report.correct, 0u);
    EXPECT_NE(report.to_text().find("accuracy"), std::string::npos);
}

TEST(Answers, MatchIgnoresCaseAndSpace) {
    EXPECT_TRUE(answers_match(" Kitchen ", "kitchen"));
    EXPECT_FALSE(answers_match("kitchen", "garden"));
}
