#include <gtest/gtest.h>

#include <mutex>
#include <random>

#include <nlohmann/json.hpp>

#include "corrpus/re3_harness.hpp"

using namespace corrpus;

namespace {

const std::filesystem::path kAssets = CORRPUS_TEST_ASSETS;

// Mann-Whitney by direct pair counting, ties count one half.
double brute_auc(const std::vector<std::pair<double, bool>>& scored) {
    double wins = 0, pairs = 0;
    for (const auto& [sp, lp] : scored) {
        if (!lp) continue;
        for (const auto& [sn, ln] : scored) {
            if (ln) continue;
            pairs += 1;
            wins += sp > sn ? 1.0 : sp == sn ? 0.5 : 0.0;
        }
    }
    return wins / pairs;
}

AttributeExtraction from_bits(unsigned bits, int generation) {
    static const char* values[] = {"tall", "short", "nurse"};
    AttributeExtraction e;
    for (int i = 0; i < 3; ++i) {
        if (bits & (1u << i)) e.add("Ann_Lee", i < 2 ? "appearance" : "occupation", values[i], generation);
    }
    return e;
}

}  // namespace

TEST(Sentences, SplitsOnTerminalPunctuationBeforeCapital) {
    EXPECT_EQ(split_sentences("Ann is here. She waits! Who? no split. e.g. Dr. Smith\nNext line"),
              (std::vector<std::string>{"Ann is here.", "She waits!", "Who? no split. e.g.", "Dr.",
                                        "Smith", "Next line"}));
    EXPECT_TRUE(split_sentences("  \n\n").empty());
}

TEST(Roster, PremiseIntroductionsThenRecurringNames) {
    const std::string premise =
        "Joan Westfall is a woman who has died. Brent Westfall is Joan's husband. "
        "The United States is large.";
    // a leading article means the name does not open the sentence
    EXPECT_EQ(character_roster(premise),
              (std::vector<std::string>{"Joan_Westfall", "Brent_Westfall"}));
    const std::string story =
        "When Jason Westfall woke, he cried. Later Jason Westfall slept. Mary Ann called once.";
    EXPECT_EQ(character_roster(story, premise),
              (std::vector<std::string>{"Joan_Westfall", "Brent_Westfall", "Jason_Westfall"}));
}

TEST(Normalize, LowercasesAndCollapses) {
    EXPECT_EQ(normalize_value("  Dark   Blue\tEyes "), "dark blue eyes");
    EXPECT_EQ(normalize_value(""), "");
}

TEST(Extraction, FromWorldUsesRelationKeys) {
    const std::vector<EntityDecl> decls = {{"character", "Joan_Westfall"}};
    auto w = WorldState::init(SchemaPreset::re3_character(), decls);
    w.append_list("Joan_Westfall", "appearance", "Dark Hair");
    w.append_list("Joan_Westfall", "age", "  ");
    w.put_map("Joan_Westfall", "relations", "Husband", "Brent_Westfall");
    auto e = extraction_from_world(w, 2);
    EXPECT_EQ(e.value_set("Joan_Westfall", "appearance"), std::set<std::string>{"dark hair"});
    EXPECT_TRUE(e.value_set("Joan_Westfall", "age").empty());
    EXPECT_EQ(e.value_set("Joan_Westfall", "relations:husband"), std::set<std::string>{"brent westfall"});
    EXPECT_EQ(e.values.at("Joan_Westfall").at("appearance").at("dark hair"), std::set<int>{2});
}

// Every combination of three generations over a three-value universe.
TEST(Vote, MatchesCountingDefinitionExhaustively) {
    for (unsigned a = 0; a < 8; ++a) {
        for (unsigned b = 0; b < 8; ++b) {
            for (unsigned c = 0; c < 8; ++c) {
                std::vector<AttributeExtraction> gens = {from_bits(a, 0), from_bits(b, 1), from_bits(c, 2)};
                unsigned expected = (a & b) | (a & c) | (b & c);
                AttributeExtraction want;
                for (int i = 0; i < 3; ++i) {
                    if (!(expected & (1u << i))) continue;
                    auto one = from_bits(1u << i, 0);
                    auto& [character, keys] = *one.values.begin();
                    auto& [key, vals] = *keys.begin();
                    std::set<int> who;
                    if (a & (1u << i)) who.insert(0);
                    if (b & (1u << i)) who.insert(1);
                    if (c & (1u << i)) who.insert(2);
                    want.values[character][key][vals.begin()->first] = who;
                }
                ASSERT_EQ(majority_vote(gens), want) << a << b << c;
            }
        }
    }
}

TEST(Vote, RequiresThreeGenerations) {
    std::vector<AttributeExtraction> two(2);
    EXPECT_THROW(majority_vote(two), std::invalid_argument);
    std::vector<AttributeExtraction> four(4);
    EXPECT_THROW(majority_vote(four), std::invalid_argument);
}

TEST(AttributeSentence, Forms) {
    EXPECT_EQ(attribute_sentence("Joan_Westfall", "relations:husband", "brent westfall"),
              "Joan Westfall's husband is Brent Westfall.");
    EXPECT_EQ(attribute_sentence("Joan_Westfall", "relations:brother_in_law", "jason_westfall"),
              "Joan Westfall's brother in law is Jason Westfall.");
    EXPECT_EQ(attribute_sentence("Ann", "occupation", "nurse"), "Ann's occupation is nurse.");
    EXPECT_THROW(attribute_sentence("Ann", "mood", "calm"), std::invalid_argument);
    EXPECT_THROW(attribute_sentence("Ann", "age", " "), std::invalid_argument);
}

TEST(Detect, ScoresSharedKeysAndTakesMaximum) {
    AttributeExtraction premise, story;
    premise.add("Ann", "age", "young", 0);
    premise.add("Ann", "occupation", "nurse", 0);
    premise.add("Bob", "age", "old", 0);
    story.add("Ann", "age", "elderly", 0);
    story.add("Ann", "age", "young", 0);
    story.add("Ann", "gender", "female", 0);
    std::vector<std::pair<std::string, std::string>> calls;
    FunctionScorer scorer("fn", [&](const std::string& p, const std::string& h) {
        calls.emplace_back(p, h);
        return EntailmentScore{0, 0, h.find("elderly") != std::string::npos ? 0.9 : 0.1};
    });
    auto v = detect(premise, story, scorer, "x");
    EXPECT_DOUBLE_EQ(v.score, 0.9);
    EXPECT_EQ(v.evidence.size(), 2u);
    EXPECT_EQ(calls.size(), 2u);
    EXPECT_EQ(calls[0].first, "Ann's age is young.");
    EXPECT_FALSE(v.fault);

    EXPECT_EQ(detect(premise, AttributeExtraction{}, scorer).score, 0.0);

    FunctionScorer broken("bad", [](const auto&, const auto&) -> EntailmentScore {
        throw GatewayError(GatewayErrorKind::transport, "down");
    });
    auto f = detect(premise, story, broken);
    ASSERT_TRUE(f.fault);
    EXPECT_NE(f.fault->find("down"), std::string::npos);
}

TEST(RocAuc, MatchesPairCountingWithTies) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<std::pair<double, bool>> scored;
        std::size_t n = 2 + rng() % 40;
        for (std::size_t i = 0; i < n; ++i) scored.emplace_back((rng() % 7) / 6.0, rng() % 2 == 0);
        scored[0].second = true;
        scored[1].second = false;
        EXPECT_NEAR(roc_auc(scored), brute_auc(scored), 1e-12);
    }
}

TEST(RocAuc, KnownValues) {
    std::vector<std::pair<double, bool>> perfect = {{0.9, true}, {0.8, true}, {0.1, false}, {0.2, false}};
    EXPECT_DOUBLE_EQ(roc_auc(perfect), 1.0);
    std::vector<std::pair<double, bool>> tied = {{0.5, true}, {0.5, false}, {0.5, true}, {0.5, false}};
    EXPECT_DOUBLE_EQ(roc_auc(tied), 0.5);
    std::vector<std::pair<double, bool>> one_class = {{0.1, true}, {0.2, true}};
    EXPECT_THROW(roc_auc(one_class), std::invalid_argument);
}

TEST(Plan, FourLabelledPairsPerTuple) {
    auto tuples = synthetic_re3_dataset(1, 5);
    auto plan = plan_re3(tuples);
    ASSERT_EQ(plan.pairs.size(), 20u);
    EXPECT_EQ(plan.texts.size(), 20u);
    EXPECT_EQ(plan.pairs[0].pair_id, tuples[0].id + ":P-S");
    EXPECT_FALSE(plan.pairs[0].contradictory);
    EXPECT_FALSE(plan.pairs[1].contradictory);
    EXPECT_TRUE(plan.pairs[2].contradictory);
    EXPECT_TRUE(plan.pairs[3].contradictory);
    for (const auto& t : plan.texts) EXPECT_EQ(t.roster.size(), 2u) << t.body;

    auto doubled = tuples;
    doubled.push_back(tuples[0]);
    doubled.back().id = "copy";
    EXPECT_EQ(plan_re3(doubled).texts.size(), 20u);
}

TEST(Dataset, JsonRoundTripAndValidation) {
    auto tuples = synthetic_re3_dataset(4, 3);
    nlohmann::json j = nlohmann::json::array();
    for (const auto& t : tuples) {
        j.push_back({{"id", t.id}, {"premise", t.premise}, {"alt_premise", t.alt_premise},
                     {"story", t.story}, {"alt_story", t.alt_story}});
    }
    auto back = parse_re3_dataset(j.dump());
    ASSERT_EQ(back.size(), 3u);
    EXPECT_EQ(back[2].alt_story, tuples[2].alt_story);
    EXPECT_THROW(parse_re3_dataset(R"([{"id":"x","premise":"p"}])"), std::exception);
    EXPECT_THROW(parse_re3_dataset("{}"), std::exception);
}

TEST(Synthetic, IsDeterministicWithOneSwap) {
    EXPECT_EQ(synthetic_re3_dataset(9, 4)[3].alt_premise, synthetic_re3_dataset(9, 4)[3].alt_premise);
    for (const auto& t : synthetic_re3_dataset(9, 30)) {
        auto a = split_sentences(t.premise), b = split_sentences(t.alt_premise);
        ASSERT_EQ(a.size(), b.size());
        int differing = 0;
        for (std::size_t i = 0; i < a.size(); ++i) differing += a[i] != b[i];
        EXPECT_EQ(differing, 1) << t.premise;
        EXPECT_NE(t.story, t.alt_story);
    }
}

class Re3Styles : public ::testing::TestWithParam<PromptStyle> {};

TEST_P(Re3Styles, TemplateExtractionRecoversEveryStatedAttribute) {
    PromptStyle style = GetParam();
    Re3Config config;
    config.style = style;
    auto completer = make_template_completer(style);
    auto ex = load_exemplar(kAssets, PresetId::re3_character, style);
    auto tuple = synthetic_re3_dataset(2, 1).front();
    auto roster = character_roster(tuple.premise);
    auto outcome = extract_attributes(tuple.premise, roster, config, *completer, ex);
    EXPECT_TRUE(outcome.faults.empty());
    ASSERT_EQ(outcome.generations.size(), 3u);
    std::size_t stated = 0;
    for (const auto& s : split_sentences(tuple.premise)) stated += s.find("'s ") != std::string::npos;
    std::size_t extracted = 0;
    for (const auto& [c, keys] : outcome.voted.values) {
        for (const auto& [k, vals] : keys) extracted += vals.size();
    }
    EXPECT_EQ(extracted, stated);
}

TEST_P(Re3Styles, InjectedContradictionsGivePerfectAuc) {
    PromptStyle style = GetParam();
    auto tuples = synthetic_re3_dataset(17, 50);
    Re3Config config;
    config.style = style;
    auto completer = make_template_completer(style);
    auto scorer = injected_contradiction_scorer(tuples);
    auto report = run_re3(tuples, config, *completer,
                          load_exemplar(kAssets, PresetId::re3_character, style), *scorer);
    EXPECT_EQ(report.n_pairs, 200u);
    EXPECT_EQ(report.n_scored, 200u);
    ASSERT_TRUE(report.auc);
    EXPECT_DOUBLE_EQ(*report.auc, 1.0);
}

INSTANTIATE_TEST_SUITE_P(CodeStyles, Re3Styles,
                         ::testing::Values(PromptStyle::comment_only, PromptStyle::specific_functions,
                                           PromptStyle::abstract_functions),
                         [](const auto& info) { return std::string(short_name(info.param)); });

TEST(Run, ConstantScorerIsChance) {
    auto tuples = synthetic_re3_dataset(3, 10);
    Re3Config config;
    auto completer = make_template_completer(config.style);
    ConstantScorer constant(EntailmentScore{0.3, 0.3, 0.4});
    auto report = run_re3(tuples, config, *completer,
                          load_exemplar(kAssets, PresetId::re3_character, config.style), constant);
    ASSERT_TRUE(report.auc);
    EXPECT_DOUBLE_EQ(*report.auc, 0.5);
}

TEST(Run, RequestsThreeSamplesAtConfiguredTemperature) {
    auto tuples = synthetic_re3_dataset(3, 2);
    Re3Config config;
    auto inner = make_template_completer(config.style);
    std::mutex m;
    std::vector<CompletionRequest> seen;
    ScriptedCompleter spy("spy", [&](const CompletionRequest& r, int i) {
        {
            std::lock_guard lock(m);
            if (i == 0) seen.push_back(r);
        }
        CompletionRequest one = r;
        one.sample_count = 1;
        return inner->complete(one).front();
    });
    auto constant = ConstantScorer({1, 0, 0});
    run_re3(tuples, config, spy, load_exemplar(kAssets, PresetId::re3_character, config.style), constant);
    ASSERT_EQ(seen.size(), 8u);
    for (const auto& r : seen) {
        EXPECT_EQ(r.sample_count, 3);
        EXPECT_DOUBLE_EQ(r.temperature, 0.7);
        EXPECT_DOUBLE_EQ(r.top_p, 0.95);
    }
}

TEST(Run, UnparseableSamplesAreFaults) {
    auto tuples = synthetic_re3_dataset(3, 2);
    Re3Config config;
    config.style = PromptStyle::comment_only;
    ScriptedCompleter junk("junk", [](const auto&, int) { return std::string("        for x in y:\n"); });
    auto ex = load_exemplar(kAssets, PresetId::re3_character, config.style);
    auto outcome = extract_attributes(tuples[0].premise, character_roster(tuples[0].premise), config, junk, ex);
    EXPECT_TRUE(outcome.voted.empty());
    EXPECT_FALSE(outcome.faults.empty());

    ScriptedCompleter empty("empty", [](const auto&, int) { return std::string(); });
    outcome = extract_attributes(tuples[0].premise, character_roster(tuples[0].premise), config, empty, ex);
    ASSERT_FALSE(outcome.faults.empty());
    EXPECT_TRUE(outcome.faults.back().starts_with("all_samples_unparseable"));
    EXPECT_TRUE(outcome.voted.empty());
}

TEST(Run, FaultedPairsAreExcludedWithWarning) {
    auto tuples = synthetic_re3_dataset(8, 4);
    Re3Config config;
    auto completer = make_template_completer(config.style);
    int calls = 0;
    std::mutex m;
    FunctionScorer flaky("flaky", [&](const std::string&, const std::string&) -> EntailmentScore {
        std::lock_guard lock(m);
        if (++calls % 5 == 0) throw GatewayError(GatewayErrorKind::transport, "flaky");
        return {1, 0, 0};
    });
    config.parallelism = 1;
    auto report = run_re3(tuples, config, *completer,
                          load_exemplar(kAssets, PresetId::re3_character, config.style), flaky);
    EXPECT_GT(report.faulted_pairs, 0u);
    EXPECT_EQ(report.n_scored + report.faulted_pairs, report.n_pairs);
    EXPECT_FALSE(report.warnings.empty());
    auto j = report.to_json();
    EXPECT_EQ(j.at("n_pairs"), report.n_pairs);
}

TEST(Run, NaturalStyleIsRejected) {
    Re3Config config;
    config.style = PromptStyle::natural_language;
    auto completer = make_template_completer(PromptStyle::comment_only);
    auto ex = load_exemplar(kAssets, PresetId::re3_character, PromptStyle::comment_only);
    EXPECT_THROW(extract_attributes("Ann's age is young.", {"Ann"}, config, *completer, ex),
                 std::invalid_argument);
}
