#include "corrpus/babi_harness.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "corrpus/parallel.hpp"

namespace corrpus {

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

int parse_id(std::string_view token, std::string_view source, int lineno) {
    if (token.empty() || !std::all_of(token.begin(), token.end(),
                                      [](unsigned char c) { return std::isdigit(c); })) {
        throw BabiFormatError(std::string(source), lineno,
                              "expected a line id, got '" + std::string(token) + "'");
    }
    return std::stoi(std::string(token));
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

// Plain symbolic simulation used by the oracle and the generator. It keeps
// its own tables rather than a WorldState so that the interpreter can be
// checked against it.
struct Sim {
    std::vector<std::string> characters;  // first-mention order
    std::vector<std::string> objects;
    std::map<std::string, std::optional<std::string>> location;  // characters and objects
    std::map<std::string, std::vector<std::string>> inventory;
    std::map<std::string, std::optional<std::string>> carrier;

    void note_character(const std::string& name) {
        if (std::find(objects.begin(), objects.end(), name) != objects.end()) {
            throw OracleError("'" + name + "' is used both as a character and an object");
        }
        if (std::find(characters.begin(), characters.end(), name) == characters.end()) {
            characters.push_back(name);
            location[name];
            inventory[name];
        }
    }

    void note_object(const std::string& name) {
        if (std::find(characters.begin(), characters.end(), name) != characters.end()) {
            throw OracleError("'" + name + "' is used both as a character and an object");
        }
        if (std::find(objects.begin(), objects.end(), name) == objects.end()) {
            objects.push_back(name);
            location[name];
            carrier[name];
        }
    }

    bool is_object(const std::string& name) const {
        return std::find(objects.begin(), objects.end(), name) != objects.end();
    }

    // Applies an action and returns the equivalent direct statements.
    std::vector<Statement> apply(const Action& a) {
        auto stmt = [](StatementNode node) { return Statement{std::move(node), 0}; };
        auto text = [](const std::optional<std::string>& v) {
            return v ? Literal::quoted(*v) : Literal::none();
        };
        std::vector<Statement> out;
        note_character(a.actor);
        switch (a.type) {
            case ActionType::move: {
                location[a.actor] = a.target;
                out.push_back(stmt(ScalarAssign{Path{a.actor, "location"}, Literal::quoted(a.target)}));
                for (const auto& item : inventory[a.actor]) {
                    location[item] = a.target;
                    out.push_back(stmt(ScalarAssign{Path{item, "location"}, Literal::quoted(a.target)}));
                }
                break;
            }
            case ActionType::take: {
                note_object(a.target);
                if (auto& old = carrier[a.target]; old && *old != a.actor) {
                    auto& inv = inventory[*old];
                    inv.erase(std::find(inv.begin(), inv.end(), a.target));
                }
                auto& inv = inventory[a.actor];
                if (std::find(inv.begin(), inv.end(), a.target) == inv.end()) inv.push_back(a.target);
                carrier[a.target] = a.actor;
                location[a.target] = location[a.actor];
                out.push_back(stmt(ListAppend{Path{a.actor, "inventory"}, Literal::quoted(a.target)}));
                out.push_back(stmt(ScalarAssign{Path{a.target, "carrier"}, Literal::quoted(a.actor)}));
                out.push_back(stmt(ScalarAssign{Path{a.target, "location"}, text(location[a.actor])}));
                break;
            }
            case ActionType::drop: {
                note_object(a.target);
                if (carrier[a.target] != a.actor) {
                    throw OracleError(a.actor + " drops " + a.target + " without carrying it");
                }
                auto& inv = inventory[a.actor];
                inv.erase(std::find(inv.begin(), inv.end(), a.target));
                carrier[a.target] = std::nullopt;
                location[a.target] = location[a.actor];
                out.push_back(stmt(ScalarAssign{Path{a.target, "carrier"}, Literal::none()}));
                out.push_back(stmt(ScalarAssign{Path{a.target, "location"}, text(location[a.actor])}));
                break;
            }
        }
        return out;
    }

    std::optional<std::string> where(const std::string& object) const {
        const auto& c = carrier.at(object);
        return c ? location.at(*c) : location.at(object);
    }

    std::vector<EntityDecl> declarations() const {
        std::vector<EntityDecl> out;
        for (const auto& c : characters) out.push_back({"character", c});
        for (const auto& o : objects) out.push_back({"object", o});
        return out;
    }

    WorldState to_world(std::size_t steps) const {
        auto decls = declarations();
        WorldState w = WorldState::init(SchemaPreset::babi_task2(), decls);
        for (const auto& c : characters) {
            w.set_scalar(c, "location", location.at(c));
            for (const auto& item : inventory.at(c)) w.set_scalar(item, "carrier", c);
        }
        for (const auto& o : objects) w.set_scalar(o, "location", location.at(o));
        for (std::size_t i = 0; i < steps; ++i) w.advance_step();
        return w;
    }
};

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

Argument bare_arg(std::string keyword, std::string value) {
    return Argument{std::move(keyword), Literal::bare(std::move(value))};
}

Statement abstract_statement(const Action& a) {
    AbstractCall call;
    switch (a.type) {
        case ActionType::move:
            call.function = "go";
            call.args = {bare_arg("character", a.actor), bare_arg("destination", a.target)};
            break;
        case ActionType::take:
            call.function = "grab";
            call.args = {bare_arg("character", a.actor), bare_arg("object", a.target)};
            break;
        case ActionType::drop:
            call.function = "drop";
            call.args = {bare_arg("character", a.actor), bare_arg("object", a.target)};
            break;
    }
    return Statement{std::move(call), 0};
}

const char* const kCharacters[] = {"Mary", "John", "Daniel", "Sandra", "Bill", "Fred", "Julie", "Jeff"};
const char* const kObjects[] = {"football", "apple", "milk", "box", "book", "key"};
const char* const kLocations[] = {"bathroom", "hallway", "office", "kitchen",
                                  "garden",   "bedroom", "cinema", "park"};

}  // namespace

// --- Parsing ---------------------------------------------------------------

std::vector<BabiSample> parse_babi_text(std::string_view text, std::string_view source) {
    std::vector<BabiSample> samples;
    std::vector<BabiLine> story;
    int prev = 0;
    int lineno = 0;
    for (auto raw : split(text, '\n')) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
        if (trim(raw).empty()) continue;
        auto space = raw.find(' ');
        if (space == std::string_view::npos) {
            throw BabiFormatError(std::string(source), lineno, "missing text after line id");
        }
        int id = parse_id(raw.substr(0, space), source, lineno);
        if (id == 1) {
            story.clear();
        } else if (id <= prev) {
            throw BabiFormatError(std::string(source), lineno,
                                  fmt::format("line id {} after {}", id, prev));
        }
        prev = id;
        std::string_view rest = raw.substr(space + 1);
        if (rest.find('\t') == std::string_view::npos) {
            std::string sentence = trim(rest);
            if (sentence.empty()) throw BabiFormatError(std::string(source), lineno, "empty statement");
            if (sentence.back() == '?') {
                throw BabiFormatError(std::string(source), lineno, "question without an answer");
            }
            story.push_back(BabiLine{id, std::move(sentence)});
            continue;
        }
        auto fields = split(rest, '\t');
        if (fields.size() < 2 || trim(fields[1]).empty()) {
            throw BabiFormatError(std::string(source), lineno, "question without an answer");
        }
        BabiSample sample;
        sample.story = story;
        sample.question = trim(fields[0]);
        sample.gold_answer = trim(fields[1]);
        if (fields.size() >= 3) {
            std::istringstream ids{std::string(fields[2])};
            for (std::string tok; ids >> tok;) sample.supporting_ids.push_back(parse_id(tok, source, lineno));
        }
        samples.push_back(std::move(sample));
    }
    return samples;
}

std::vector<BabiSample> parse_babi_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_babi_text(buf.str(), path.string());
}

std::string format_babi(const std::vector<BabiSample>& stories) {
    std::string out;
    for (const auto& s : stories) {
        // original ids are kept so supporting facts still point at the right lines
        int id = 0;
        for (const auto& line : s.story) {
            id = line.id;
            out += fmt::format("{} {}\n", id, line.text);
        }
        std::string support;
        for (int sid : s.supporting_ids) support += (support.empty() ? "" : " ") + std::to_string(sid);
        out += fmt::format("{} {}\t{}\t{}\n", ++id, s.question, s.gold_answer, support);
    }
    return out;
}

// --- Lexicon ---------------------------------------------------------------

const ActionLexicon& ActionLexicon::standard() {
    static const ActionLexicon lexicon{
        {"moved to", "went to", "journeyed to", "travelled to", "went back to"},
        {"got", "grabbed", "picked up", "took"},
        {"dropped", "discarded", "put down", "left"},
    };
    return lexicon;
}

bool ActionLexicon::disjoint() const {
    std::set<std::string> all;
    std::size_t total = 0;
    for (const auto* set : {&movement_verbs, &take_verbs, &drop_verbs}) {
        all.insert(set->begin(), set->end());
        total += set->size();
    }
    return all.size() == total;
}

namespace {

struct Match {
    ActionType type;
    std::string target;
};

// "<Actor> <verb> the <word>[ there]."
std::vector<Match> matches(const ActionLexicon& lex, std::string_view sentence, std::string& actor) {
    std::string s = trim(sentence);
    if (!s.empty() && s.back() == '.') s.pop_back();
    auto space = s.find(' ');
    std::vector<Match> out;
    if (space == std::string::npos) return out;
    actor = s.substr(0, space);
    std::string_view rest = std::string_view(s).substr(space + 1);
    auto try_set = [&](const std::vector<std::string>& verbs, ActionType type, bool allow_there) {
        for (const auto& verb : verbs) {
            std::string lead = verb + " the ";
            if (!rest.starts_with(lead)) continue;
            std::string_view tail = rest.substr(lead.size());
            if (allow_there && tail.ends_with(" there")) tail.remove_suffix(6);
            if (tail.empty() || tail.find(' ') != std::string_view::npos) continue;
            out.push_back(Match{type, std::string(tail)});
        }
    };
    try_set(lex.movement_verbs, ActionType::move, false);
    try_set(lex.take_verbs, ActionType::take, true);
    try_set(lex.drop_verbs, ActionType::drop, false);
    return out;
}

}  // namespace

int ActionLexicon::match_count(std::string_view sentence) const {
    std::string actor;
    return static_cast<int>(matches(*this, sentence, actor).size());
}

Action ActionLexicon::parse(std::string_view sentence) const {
    std::string actor;
    auto found = matches(*this, sentence, actor);
    if (found.empty()) throw OracleError("no action pattern matches '" + std::string(sentence) + "'");
    if (found.size() > 1) throw OracleError("ambiguous sentence '" + std::string(sentence) + "'");
    return Action{found.front().type, actor, found.front().target};
}

std::string ActionLexicon::render(const Action& a, std::size_t verb_choice) const {
    const auto& verbs = a.type == ActionType::move ? movement_verbs
                        : a.type == ActionType::take ? take_verbs
                                                     : drop_verbs;
    return fmt::format("{} {} the {}.", a.actor, verbs[verb_choice % verbs.size()], a.target);
}

// --- Oracle ----------------------------------------------------------------

StoryCase case_for_sample(const BabiSample& sample, const ActionLexicon& lexicon) {
    Sim sim;
    StoryCase story;
    for (const auto& line : sample.story) {
        sim.apply(lexicon.parse(line.text));
        story.sentences.push_back(line.text);
    }
    story.entities = sim.declarations();
    story.query = sample.question;
    story.gold_answer = sample.gold_answer;
    return story;
}

OracleResult oracle_solve(const BabiSample& sample, const ActionLexicon& lexicon, PromptStyle style) {
    Sim sim;
    UpdateProgram program;
    program.style = style;
    std::vector<std::string> sentences;
    std::vector<std::vector<Statement>> per_sentence;
    std::vector<Action> actions;
    for (const auto& line : sample.story) {
        Action a = lexicon.parse(line.text);
        per_sentence.push_back(sim.apply(a));
        actions.push_back(std::move(a));
        sentences.push_back(line.text);
    }

    auto object = queried_object(sample.question);
    if (!object || !sim.is_object(*object)) {
        throw OracleError("question about unknown object: '" + sample.question + "'");
    }
    auto answer = sim.where(*object);
    if (!answer) throw OracleError("'" + sample.question + "' is unanswerable from the story");

    if (style == PromptStyle::natural_language) {
        program.trailing.push_back(Statement{Print{Literal::bare(*answer)}, 0});
    } else {
        std::vector<std::string> labels = sentences;
        if (style == PromptStyle::specific_functions) labels = unique_slugs(sentences);
        for (std::size_t i = 0; i < sentences.size(); ++i) {
            StatementGroup group{labels[i], {}};
            if (style == PromptStyle::abstract_functions) {
                group.statements.push_back(abstract_statement(actions[i]));
            } else {
                group.statements = per_sentence[i];
            }
            if (group.statements.empty() && style == PromptStyle::specific_functions) {
                group.statements.push_back(Statement{Pass{}, 0});
            }
            program.groups.push_back(std::move(group));
        }
        program.query = sample.question;
        program.trailing.push_back(Statement{Print{Path{*object, "location"}}, 0});
    }

    StoryCase story;
    story.sentences = sentences;
    story.entities = sim.declarations();
    story.query = sample.question;
    story.gold_answer = *answer;
    return OracleResult{*answer, std::move(program), sim.to_world(sentences.size()), std::move(story)};
}

BabiSample generate_synthetic(std::uint64_t seed, int length, EntityCounts counts) {
    length = std::max(length, 2);
    const auto n_chars = static_cast<std::size_t>(std::clamp(counts.characters, 1, 8));
    const auto n_objs = static_cast<std::size_t>(std::clamp(counts.objects, 1, 6));
    const auto n_locs = static_cast<std::size_t>(std::clamp(counts.locations, 2, 8));
    const ActionLexicon& lex = ActionLexicon::standard();

    for (std::uint64_t attempt = 0;; ++attempt) {
        std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + attempt);
        auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
        Sim sim;
        BabiSample sample;
        for (int step = 0; step < length; ++step) {
            std::vector<Action> options;
            for (std::size_t c = 0; c < n_chars; ++c) {
                std::string who = kCharacters[c];
                auto here = sim.location.count(who) ? sim.location[who] : std::nullopt;
                for (std::size_t l = 0; l < n_locs; ++l) {
                    if (here != kLocations[l]) options.push_back({ActionType::move, who, kLocations[l]});
                }
                if (!here) continue;
                for (std::size_t o = 0; o < n_objs; ++o) {
                    std::string what = kObjects[o];
                    bool known = sim.is_object(what);
                    if (known && sim.carrier[what]) continue;
                    if (!known || !sim.location[what] || sim.location[what] == here) {
                        // Handlings are as likely as moves overall.
                        for (std::size_t k = 0; k < n_locs; ++k) options.push_back({ActionType::take, who, what});
                    }
                }
            }
            for (std::size_t c = 0; c < n_chars; ++c) {
                std::string who = kCharacters[c];
                if (!sim.inventory.count(who)) continue;
                for (const auto& item : sim.inventory[who]) {
                    for (std::size_t k = 0; k < n_locs; ++k) options.push_back({ActionType::drop, who, item});
                }
            }
            Action a = options[pick(options.size())];
            sim.apply(a);
            sample.story.push_back(BabiLine{step + 1, lex.render(a, pick(4))});
        }
        std::vector<std::string> answerable;
        for (const auto& o : sim.objects) {
            if (sim.where(o)) answerable.push_back(o);
        }
        if (answerable.empty()) continue;
        const std::string& object = answerable[pick(answerable.size())];
        sample.question = "Where is the " + object + "?";
        sample.gold_answer = oracle_solve(sample, lex).answer;
        return sample;
    }
}

std::shared_ptr<Completer> make_oracle_completer(PromptStyle style, const ActionLexicon& lexicon) {
    return std::make_shared<ScriptedCompleter>(
        "oracle", [style, &lexicon](const CompletionRequest& request, int) {
            StoryCase target = recover_target_case(request.prompt, style);
            BabiSample sample;
            for (std::size_t i = 0; i < target.sentences.size(); ++i) {
                sample.story.push_back(BabiLine{static_cast<int>(i + 1), target.sentences[i]});
            }
            sample.question = target.query.value_or("");
            OracleResult solved = oracle_solve(sample, lexicon, style);
            Exemplar ex{solved.story_case, solved.program, style};
            return continuation(ex, SchemaPreset::babi_task2());
        });
}

bool answers_match(std::string_view predicted, std::string_view gold) {
    return lowercase(trim(predicted)) == lowercase(trim(gold));
}

// --- Evaluation --------------------------------------------------------------

BabiVerdict evaluate_babi_sample(const BabiSample& sample, std::size_t index, const BabiConfig& config,
                                 Completer& completer, const Exemplar& exemplar,
                                 const ActionLexicon& lexicon) {
    BabiVerdict v;
    v.index = index;
    v.question = sample.question;
    v.gold = sample.gold_answer;
    auto fault = [&](std::string_view kind, std::string_view message) {
        v.faults.push_back(fmt::format("{}: {}", kind, message));
    };

    const SchemaPreset& preset = SchemaPreset::babi_task2();
    StoryCase story;
    try {
        story = case_for_sample(sample, lexicon);
    } catch (const OracleError& e) {
        fault("dataset", e.what());
        return v;
    }

    PromptBundle bundle;
    try {
        bundle = render(story, config.style, preset, exemplar);
    } catch (const PromptError& e) {
        fault("prompt", e.what());
        return v;
    }

    CompletionRequest request;
    request.model = config.model;
    request.prompt = bundle.request();
    request.temperature = config.temperature;
    request.top_p = config.top_p;
    request.sample_count = 1;
    request.max_output_tokens = config.max_output_tokens;
    if (config.style == PromptStyle::natural_language) request.stop = {"\n"};

    std::string raw;
    try {
        auto texts = completer.complete(request);
        if (texts.empty()) throw GatewayError(GatewayErrorKind::malformed, "no samples returned");
        raw = std::move(texts.front());
    } catch (const GatewayError& e) {
        fault(fmt::format("gateway_{}", to_string(e.kind())), e.what());
        return v;
    } catch (const std::exception& e) {
        fault("backend", e.what());
        return v;
    }

    std::string source;
    try {
        source = completion_slice(bundle, raw);
    } catch (const EmptyCompletion& e) {
        fault("empty_completion", e.what());
        return v;
    }

    UpdateProgram program;
    try {
        program = parse_program(source, config.style);
    } catch (const ParseError& e) {
        fault("parse_error", e.what());
        return v;
    }
    for (const auto& f : program.faults) fault(to_string(f.kind), f.message);

    WorldState w0 = WorldState::init(preset, story.entities);
    EvaluationResult result =
        evaluate(program, std::move(w0), AbstractFunctionTable::babi_task2());
    for (const auto& f : result.faults) fault(to_string(f.kind), f.message);

    v.predicted = extract_answer(result, sample.question);
    v.correct = v.predicted && answers_match(*v.predicted, sample.gold_answer);
    return v;
}

BabiReport run_babi(const std::vector<BabiSample>& samples, const BabiConfig& config,
                    Completer& completer, const Exemplar& exemplar, const ActionLexicon& lexicon) {
    std::size_t n = samples.size();
    if (config.sample_limit) n = std::min(n, *config.sample_limit);

    BabiReport report;
    report.style = config.style;
    report.n = n;
    report.verdicts = parallel_map(n, config.parallelism, [&](std::size_t i) {
        return evaluate_babi_sample(samples[i], i, config, completer, exemplar, lexicon);
    });
    for (const auto& v : report.verdicts) {
        if (v.correct) ++report.correct;
        if (!v.predicted) ++report.unanswerable;
        if (!v.faults.empty()) ++report.faulted_samples;
        for (const auto& f : v.faults) ++report.fault_counts[f.substr(0, f.find(':'))];
    }
    return report;
}

nlohmann::json BabiReport::to_json() const {
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& v : verdicts) {
        samples.push_back({
            {"index", v.index},
            {"question", v.question},
            {"gold", v.gold},
            {"predicted", v.predicted ? nlohmann::json(*v.predicted) : nlohmann::json(nullptr)},
            {"correct", v.correct},
            {"faults", v.faults},
        });
    }
    return {
        {"task", "babi"},
        {"style", std::string(to_string(style))},
        {"n", n},
        {"correct", correct},
        {"accuracy", accuracy()},
        {"unanswerable", unanswerable},
        {"faulted_samples", faulted_samples},
        {"faults", fault_counts},
        {"samples", std::move(samples)},
    };
}

std::string BabiReport::to_text() const {
    std::string out;
    out += fmt::format("{:<16}{}\n", "task", "babi");
    out += fmt::format("{:<16}{}\n", "style", to_string(style));
    out += fmt::format("{:<16}{}\n", "samples", n);
    out += fmt::format("{:<16}{}\n", "correct", correct);
    out += fmt::format("{:<16}{:.4f}\n", "accuracy", accuracy());
    out += fmt::format("{:<16}{}\n", "unanswerable", unanswerable);
    out += fmt::format("{:<16}{}\n", "faulted", faulted_samples);
    if (!fault_counts.empty()) {
        out += "\nfault kind                 count\n";
        for (const auto& [kind, count] : fault_counts) out += fmt::format("{:<26}{:>6}\n", kind, count);
    }
    return out;
}

}  // namespace corrpus
