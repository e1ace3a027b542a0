#include <gtest/gtest.h>

#include <random>

#include "corrpus/prompt_forge.hpp"
#include "corrpus/update_dsl.hpp"

using namespace corrpus;

namespace {

const std::filesystem::path kAssets = CORRPUS_TEST_ASSETS;

std::vector<FaultKind> kinds(const std::vector<Fault>& faults) {
    std::vector<FaultKind> out;
    for (const auto& f : faults) out.push_back(f.kind);
    return out;
}

WorldState babi_world() {
    const std::vector<EntityDecl> decls = {{"character", "Mary"},
                                           {"character", "John"},
                                           {"object", "football"},
                                           {"object", "milk"}};
    return WorldState::init(SchemaPreset::babi_task2(), decls);
}

const std::string kHeader = "    def story(self):\n";

}  // namespace

TEST(Parse, CommentStyleGroupsBySentence) {
    auto p = parse_program(kHeader +
                               "        ## Mary moved to the bathroom.\n"
                               "        self.Mary.location = \"bathroom\"\n"
                               "        ## Mary got the football there.\n"
                               "        self.Mary.inventory.append(self.football)\n"
                               "        self.football.carrier = self.Mary\n"
                               "        ## Question: Where is the football?\n"
                               "        print(self.football.location)\n",
                           PromptStyle::comment_only);
    ASSERT_TRUE(p.faults.empty()) << dump_ast(p);
    ASSERT_EQ(p.groups.size(), 2u);
    EXPECT_EQ(p.groups[0].label, "Mary moved to the bathroom.");
    EXPECT_EQ(p.groups[1].statements.size(), 2u);
    EXPECT_EQ(p.query, "Where is the football?");
    ASSERT_EQ(p.trailing.size(), 1u);
    EXPECT_TRUE(std::holds_alternative<Print>(p.trailing[0].node));

    const auto& append = std::get<ListAppend>(p.groups[1].statements[0].node);
    EXPECT_EQ(append.target, (Path{"Mary", "inventory"}));
    EXPECT_EQ(std::get<Path>(append.value), (Path{"football", std::nullopt}));
}

TEST(Parse, SpecificStyleResolvesCallsToDefinitions) {
    auto p = parse_program(kHeader +
                               "        self.mary_left()\n"
                               "        self.mary_right()\n"
                               "\n"
                               "    def mary_right(self):\n"
                               "        self.Mary.location = 'office'\n"
                               "\n"
                               "    def mary_left(self):\n"
                               "        self.Mary.location = 'garden'\n",
                           PromptStyle::specific_functions);
    ASSERT_TRUE(p.faults.empty()) << dump_ast(p);
    ASSERT_EQ(p.groups.size(), 2u);
    EXPECT_EQ(p.groups[0].label, "mary_left");
    auto v = std::get<Literal>(std::get<ScalarAssign>(p.groups[0].statements[0].node).value);
    EXPECT_EQ(v, Literal::quoted("garden", '\''));
}

TEST(Parse, SpecificStyleReportsMissingAndUnusedFunctions) {
    auto p = parse_program(kHeader +
                               "        self.ghost()\n"
                               "\n"
                               "    def orphan(self):\n"
                               "        pass\n",
                           PromptStyle::specific_functions);
    EXPECT_EQ(kinds(p.faults),
              (std::vector<FaultKind>{FaultKind::undefined_group, FaultKind::unused_function}));
    ASSERT_EQ(p.groups.size(), 1u);
    EXPECT_TRUE(p.groups[0].statements.empty());
}

TEST(Parse, AbstractCallsKeepArgumentShape) {
    auto p = parse_program(kHeader +
                               "        ## x\n"
                               "        go(character=Mary, destination='garden')\n"
                               "        self.set_age(self.Mary, \"young\")\n",
                           PromptStyle::abstract_functions);
    ASSERT_TRUE(p.faults.empty()) << dump_ast(p);
    const auto& bare = std::get<AbstractCall>(p.groups[0].statements[0].node);
    EXPECT_FALSE(bare.method_form);
    ASSERT_EQ(bare.args.size(), 2u);
    EXPECT_EQ(bare.args[0].keyword, "character");
    EXPECT_EQ(std::get<Literal>(bare.args[0].value), Literal::bare("Mary"));
    const auto& method = std::get<AbstractCall>(p.groups[0].statements[1].node);
    EXPECT_TRUE(method.method_form);
    EXPECT_EQ(std::get<Path>(method.args[0].value), (Path{"Mary", std::nullopt}));
}

TEST(Parse, CallsOutsideAbstractStyleAreDisallowed) {
    auto p = parse_program(kHeader + "        go(Mary, 'garden')\n", PromptStyle::comment_only);
    EXPECT_EQ(kinds(p.faults), std::vector<FaultKind>{FaultKind::disallowed_form});
    EXPECT_TRUE(p.groups.empty());
}

TEST(Parse, HostileInputNeverBecomesStatements) {
    const std::string src = kHeader +
                            "        import os\n"
                            "        __import__('os').system('rm -rf /')\n"
                            "        for item in self.Mary.inventory:\n"
                            "            item.location = 'x'\n"
                            "        self.Mary.location.__class__ = 1\n"
                            "        self.Mary = 'John'\n"
                            "        lambda: 0\n"
                            "        x = 1\n"
                            "        self.Mary.location = \"garden\"\n";
    auto p = parse_program(src, PromptStyle::abstract_functions);
    EXPECT_EQ(p.faults.size(), 8u) << dump_ast(p);
    ASSERT_EQ(p.groups.size(), 1u);
    ASSERT_EQ(p.groups[0].statements.size(), 1u);
    EXPECT_EQ(render_statement(p.groups[0].statements[0]), "self.Mary.location = \"garden\"");
    EXPECT_EQ(p.faults[2].kind, FaultKind::disallowed_form);
    EXPECT_EQ(p.faults[3].kind, FaultKind::disallowed_form);
}

TEST(Parse, StatementsOutsideStoryAreFaults) {
    auto p = parse_program("self.Mary.location = 'x'\n" + kHeader + "        pass\n" +
                               "self.John.location = 'y'\n",
                           PromptStyle::comment_only);
    ASSERT_EQ(p.faults.size(), 2u);
    EXPECT_EQ(p.faults[0].kind, FaultKind::outside_story);
    EXPECT_EQ(p.faults[0].line, 1);
    EXPECT_EQ(p.faults[1].line, 4);
    ASSERT_EQ(p.groups.size(), 1u);
    EXPECT_EQ(p.groups[0].statements, std::vector<Statement>{Statement{Pass{}}});
}

TEST(Parse, RejectedBlockInsideSentenceFunctionResumesIt) {
    auto p = parse_program(kHeader +
                               "        self.a()\n"
                               "\n"
                               "    def a(self):\n"
                               "        if True:\n"
                               "            self.Mary.location = 'x'\n"
                               "        self.Mary.location = 'y'\n",
                           PromptStyle::specific_functions);
    EXPECT_EQ(kinds(p.faults),
              (std::vector<FaultKind>{FaultKind::disallowed_form, FaultKind::disallowed_form}));
    ASSERT_EQ(p.groups.size(), 1u);
    ASSERT_EQ(p.groups[0].statements.size(), 1u);
    EXPECT_EQ(render_statement(p.groups[0].statements[0]), "self.Mary.location = 'y'");
}

TEST(Parse, UnterminatedStringThrows) {
    EXPECT_THROW(parse_program(kHeader + "        self.Mary.location = 'gar\n",
                               PromptStyle::comment_only),
                 ParseError);
}

TEST(Parse, NaturalStyleTakesFirstLine) {
    auto p = parse_program("  kitchen.\nbathroom\n", PromptStyle::natural_language);
    ASSERT_EQ(p.trailing.size(), 1u);
    EXPECT_EQ(render_statement(p.trailing[0]), "print(kitchen)");
}

TEST(PrettyPrint, AssetProgramsAreFixedPoints) {
    for (auto preset : {PresetId::babi_task2, PresetId::re3_character}) {
        for (auto style : {PromptStyle::comment_only, PromptStyle::specific_functions,
                           PromptStyle::abstract_functions}) {
            std::string src = read_text_file(exemplar_dir(kAssets, preset, style) / "program.py");
            auto p = parse_program(src, style);
            ASSERT_TRUE(p.faults.empty()) << dump_ast(p);
            EXPECT_EQ(pretty_print(p), src) << to_string(style);
            EXPECT_EQ(parse_program(pretty_print(p), style), p);
        }
    }
}

namespace {

struct ProgramGen {
    std::mt19937_64 rng;
    PromptStyle style;

    std::size_t below(std::size_t n) { return rng() % n; }

    Expr value() {
        static const std::vector<std::string> texts = {"garden", "it's here", "say \"hi\"",
                                                       "back\\slash", "tab\there", ""};
        switch (below(5)) {
            case 0: return Path{"Mary", std::nullopt};
            case 1: return Path{"John", "location"};
            case 2: return Literal::none();
            case 3: return Literal::quoted(texts[below(texts.size())], '\'');
            default: return Literal::quoted(texts[below(texts.size())], '"');
        }
    }

    Statement statement() {
        Path target{below(2) ? "Mary" : "milk", below(2) ? "location" : "inventory"};
        std::size_t n = style == PromptStyle::abstract_functions ? 7 : 6;
        switch (below(n)) {
            case 0: return {ScalarAssign{target, value()}};
            case 1: return {ListAppend{target, value()}};
            case 2: return {ListRemove{target, value()}};
            case 3: return {MapAssign{target, Literal::quoted("wife", '"'), value()}};
            case 4: return {Print{value()}};
            case 5: return {Pass{}};
            default: {
                AbstractCall call{below(2) ? "go" : "set_age", below(2) == 0, {}};
                for (std::size_t i = 0, k = below(3); i < k; ++i) {
                    Argument arg;
                    if (below(2)) arg.keyword = "k" + std::to_string(i);
                    arg.value = below(2) ? value() : Expr{Literal::bare("Mary")};
                    call.args.push_back(arg);
                }
                return {call};
            }
        }
    }

    UpdateProgram program() {
        UpdateProgram p;
        p.style = style;
        std::size_t groups = below(5);
        for (std::size_t g = 0; g < groups; ++g) {
            StatementGroup group;
            if (style == PromptStyle::specific_functions) {
                group.label = "sentence_" + std::to_string(g);
            } else {
                group.label = "Sentence number " + std::to_string(g) + ", it's fine.";
            }
            for (std::size_t i = 0, k = below(4); i < k; ++i) group.statements.push_back(statement());
            p.groups.push_back(group);
        }
        if (below(2)) p.query = "Where is the milk?";
        if (p.query || style == PromptStyle::specific_functions) {
            for (std::size_t i = 0, k = below(3); i < k; ++i) {
                Statement s = statement();
                if (style == PromptStyle::specific_functions &&
                    std::holds_alternative<AbstractCall>(s.node)) {
                    continue;
                }
                p.trailing.push_back(s);
            }
        }
        return p;
    }
};

}  // namespace

TEST(PrettyPrint, RandomProgramsRoundTrip) {
    for (auto style : {PromptStyle::comment_only, PromptStyle::specific_functions,
                       PromptStyle::abstract_functions}) {
        ProgramGen gen{std::mt19937_64(static_cast<unsigned>(style) + 11), style};
        for (int i = 0; i < 500; ++i) {
            UpdateProgram p = gen.program();
            std::string text = pretty_print(p);
            UpdateProgram back = parse_program(text, style);
            ASSERT_TRUE(back.faults.empty()) << text << dump_ast(back);
            ASSERT_EQ(back, p) << text;
            ASSERT_EQ(pretty_print(back), text);
        }
    }
}

TEST(Evaluate, DirectStatementsUpdateWorld) {
    auto p = parse_program(read_text_file(exemplar_dir(kAssets, PresetId::babi_task2,
                                                       PromptStyle::comment_only) /
                                          "program.py"),
                           PromptStyle::comment_only);
    const auto& ex = load_exemplar(kAssets, PresetId::babi_task2, PromptStyle::comment_only);
    auto world = WorldState::init(SchemaPreset::babi_task2(), ex.story.entities);
    auto result = evaluate(p, world, AbstractFunctionTable::babi_task2());
    EXPECT_TRUE(result.faults.empty());
    EXPECT_EQ(result.world.step_index(), p.groups.size());
    EXPECT_EQ(result.printed, std::vector<std::string>{"kitchen"});
    EXPECT_EQ(extract_answer(result, *p.query), "kitchen");
    EXPECT_TRUE(carrier_duality_holds(result.world));
}

TEST(Evaluate, AbstractAndDirectFormsAgree) {
    const auto& table = AbstractFunctionTable::babi_task2();
    const std::vector<std::pair<std::string, std::string>> pairs = {
        {"go(character=Mary, destination=garden)", "self.Mary.location = \"garden\""},
        {"grab(Mary, milk)",
         "self.Mary.inventory.append(self.milk)\n        self.milk.carrier = self.Mary\n"
         "        self.milk.location = \"garden\""},
        {"go(Mary, destination='office')",
         "self.Mary.location = \"office\"\n        self.milk.location = \"office\""},
        {"drop(object=milk, character=Mary)",
         "self.milk.carrier = None\n        self.milk.location = \"office\""},
    };
    std::string abstract_src = kHeader, direct_src = kHeader;
    for (const auto& [call, direct] : pairs) {
        abstract_src += "        ## s\n        " + call + "\n";
        direct_src += "        ## s\n        " + direct + "\n";
    }
    auto a = evaluate(parse_program(abstract_src, PromptStyle::abstract_functions), babi_world(),
                      table);
    auto d = evaluate(parse_program(direct_src, PromptStyle::comment_only), babi_world(), table);
    EXPECT_TRUE(a.faults.empty());
    EXPECT_TRUE(d.faults.empty());
    EXPECT_EQ(a.world.snapshot(), d.world.snapshot());
    EXPECT_EQ(a.world.query_object_location("milk"), "office");
}

TEST(Evaluate, ExpandCallChecksArity) {
    const auto& table = AbstractFunctionTable::babi_task2();
    auto world = babi_world();
    auto expect_kind = [&](const std::string& src, FaultKind kind) {
        auto p = parse_program(kHeader + "        " + src + "\n", PromptStyle::abstract_functions);
        const auto& call = std::get<AbstractCall>(p.groups.at(0).statements.at(0).node);
        try {
            expand_call(call, world, table);
            ADD_FAILURE() << src;
        } catch (const EvalFault& e) {
            EXPECT_EQ(e.kind(), kind) << src;
        }
    };
    expect_kind("go(Mary)", FaultKind::arity_mismatch);
    expect_kind("go(Mary, garden, kitchen)", FaultKind::arity_mismatch);
    expect_kind("go(Mary, character=John)", FaultKind::arity_mismatch);
    expect_kind("go(Mary, place=garden)", FaultKind::arity_mismatch);
    expect_kind("fly(Mary, garden)", FaultKind::unknown_function);
}

TEST(Evaluate, FaultsAreIsolatedPerStatement) {
    auto p = parse_program(kHeader +
                               "        ## a\n"
                               "        self.Mary.location = \"garden\"\n"
                               "        self.Mary.mood = \"happy\"\n"
                               "        self.Mary.inventory.remove(self.milk)\n"
                               "        ## b\n"
                               "        self.John.location = \"office\"\n"
                               "        self.Bill.location = \"hallway\"\n",
                           PromptStyle::comment_only);
    auto r = evaluate(p, babi_world(), AbstractFunctionTable::babi_task2());
    EXPECT_EQ(r.world.scalar("Mary", "location"), "garden");
    EXPECT_EQ(r.world.scalar("John", "location"), "office");
    EXPECT_EQ(r.world.step_index(), 2u);
    std::vector<FaultKind> got = kinds(r.faults);
    EXPECT_EQ(got, (std::vector<FaultKind>{FaultKind::unknown_attribute, FaultKind::invalid_value,
                                           FaultKind::auto_declared}));
    // the undeclared entity is auto-declared with the preset default kind
    EXPECT_TRUE(r.world.has_entity("Bill"));
    EXPECT_EQ(r.world.entity("Bill").kind(), "object");
    EXPECT_FALSE(r.faults[2].skipped);
    EXPECT_TRUE(r.faults[0].skipped);
}

TEST(Evaluate, PrintsRenderFinalState) {
    auto p = parse_program(kHeader +
                               "        ## a\n"
                               "        self.Mary.location = \"garden\"\n"
                               "        ## Question: Where is the milk?\n"
                               "        print(self.milk.location)\n"
                               "        print(self.Mary.location)\n",
                           PromptStyle::comment_only);
    auto r = evaluate(p, babi_world(), AbstractFunctionTable::babi_task2());
    EXPECT_EQ(r.printed, std::vector<std::string>{"garden"});
    EXPECT_EQ(kinds(r.faults), std::vector<FaultKind>{FaultKind::unset_print});
    EXPECT_EQ(extract_answer(r, "Where is the milk?"), "garden");
}

TEST(Evaluate, AnswerFallsBackToSymbolicQuery) {
    auto p = parse_program(kHeader +
                               "        ## a\n"
                               "        self.John.location = \"hallway\"\n"
                               "        self.John.inventory.append(self.football)\n",
                           PromptStyle::comment_only);
    auto r = evaluate(p, babi_world(), AbstractFunctionTable::babi_task2());
    EXPECT_TRUE(r.printed.empty());
    EXPECT_EQ(extract_answer(r, "Where is the football?"), "hallway");
    EXPECT_EQ(extract_answer(r, "Where is the milk?"), std::nullopt);
    EXPECT_EQ(extract_answer(r, "Where is the unicorn?"), std::nullopt);
}

TEST(Evaluate, Re3RelationStoresDisplayName) {
    const std::vector<EntityDecl> decls = {{"character", "Joan_Westfall"},
                                           {"character", "Brent_Westfall"}};
    auto p = parse_program(kHeader +
                               "        ## s\n"
                               "        self.set_relation(self.Joan_Westfall, 'husband', "
                               "self.Brent_Westfall)\n"
                               "        self.set_age(character=self.Joan_Westfall, age='adult')\n",
                           PromptStyle::abstract_functions);
    auto r = evaluate(p, WorldState::init(SchemaPreset::re3_character(), decls),
                      AbstractFunctionTable::re3_character());
    EXPECT_TRUE(r.faults.empty());
    EXPECT_EQ(r.world.map("Joan_Westfall", "relations").at("husband"), "Brent Westfall");
    EXPECT_EQ(r.world.list("Joan_Westfall", "age"), std::vector<std::string>{"adult"});
}

TEST(QueriedObject, TakesLastWord) {
    EXPECT_EQ(queried_object("Where is the football?"), "football");
    EXPECT_EQ(queried_object("where is milk"), "milk");
    EXPECT_EQ(queried_object("Who is Mary?"), std::nullopt);
}
