#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "corrpus/update_dsl.hpp"

namespace corrpus {

std::string_view to_string(PromptStyle style) {
    switch (style) {
        case PromptStyle::comment_only: return "comment-only";
        case PromptStyle::specific_functions: return "specific-functions";
        case PromptStyle::abstract_functions: return "abstract-functions";
        case PromptStyle::natural_language: return "natural-language";
    }
    return "?";
}

std::string_view short_name(PromptStyle style) {
    switch (style) {
        case PromptStyle::comment_only: return "comment";
        case PromptStyle::specific_functions: return "specific";
        case PromptStyle::abstract_functions: return "abstract";
        case PromptStyle::natural_language: return "natural";
    }
    return "?";
}

PromptStyle style_from_string(std::string_view text) {
    for (auto style : {PromptStyle::comment_only, PromptStyle::specific_functions,
                       PromptStyle::abstract_functions, PromptStyle::natural_language}) {
        if (text == to_string(style) || text == short_name(style)) return style;
    }
    throw std::invalid_argument("unknown prompt style: " + std::string(text));
}

std::string_view to_string(FaultKind kind) {
    switch (kind) {
        case FaultKind::syntax: return "syntax";
        case FaultKind::disallowed_form: return "disallowed_form";
        case FaultKind::outside_story: return "outside_story";
        case FaultKind::undefined_group: return "undefined_group";
        case FaultKind::unused_function: return "unused_function";
        case FaultKind::unknown_entity: return "unknown_entity";
        case FaultKind::unknown_attribute: return "unknown_attribute";
        case FaultKind::kind_mismatch: return "kind_mismatch";
        case FaultKind::invalid_value: return "invalid_value";
        case FaultKind::duplicate_entity: return "duplicate_entity";
        case FaultKind::unknown_kind: return "unknown_kind";
        case FaultKind::unknown_function: return "unknown_function";
        case FaultKind::arity_mismatch: return "arity_mismatch";
        case FaultKind::auto_declared: return "auto_declared";
        case FaultKind::unset_print: return "unset_print";
    }
    return "?";
}

Literal Literal::quoted(std::string text, char quote) {
    return Literal{quote == '\'' ? Form::single_quoted : Form::double_quoted, std::move(text)};
}

Literal Literal::bare(std::string text) { return Literal{Form::bare, std::move(text)}; }

Literal Literal::none() { return Literal{Form::none, "None"}; }

namespace {

// ---------------------------------------------------------------------------
// Lexing

enum class Tok { ident, string, number, dot, eq, lparen, rparen, lbracket, rbracket, comma, end };

struct Token {
    Tok type;
    std::string text;
    char quote = 0;
};

struct LineFault {
    FaultKind kind;
    std::string message;
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> lex(std::string_view text, int line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == ' ' || c == '\t') {
            ++i;
        } else if (c == '#') {
            break;
        } else if (is_ident_start(c)) {
            std::size_t j = i;
            while (j < text.size() && is_ident_char(text[j])) ++j;
            out.push_back({Tok::ident, std::string(text.substr(i, j - i))});
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   (c == '-' && i + 1 < text.size() &&
                    std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            std::size_t j = i + 1;
            while (j < text.size() &&
                   (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '.'))
                ++j;
            out.push_back({Tok::number, std::string(text.substr(i, j - i))});
            i = j;
        } else if (c == '"' || c == '\'') {
            std::string value;
            std::size_t j = i + 1;
            bool closed = false;
            while (j < text.size()) {
                char d = text[j];
                if (d == '\\' && j + 1 < text.size()) {
                    char e = text[j + 1];
                    switch (e) {
                        case 'n': value += '\n'; break;
                        case 't': value += '\t'; break;
                        case '\\':
                        case '\'':
                        case '"': value += e; break;
                        default:
                            value += '\\';
                            value += e;
                    }
                    j += 2;
                    continue;
                }
                if (d == c) {
                    closed = true;
                    break;
                }
                value += d;
                ++j;
            }
            if (!closed) throw ParseError(line, "unterminated string literal");
            out.push_back({Tok::string, std::move(value), c});
            i = j + 1;
        } else {
            Tok type;
            switch (c) {
                case '.': type = Tok::dot; break;
                case '=': type = Tok::eq; break;
                case '(': type = Tok::lparen; break;
                case ')': type = Tok::rparen; break;
                case '[': type = Tok::lbracket; break;
                case ']': type = Tok::rbracket; break;
                case ',': type = Tok::comma; break;
                default:
                    throw LineFault{FaultKind::syntax,
                                    std::string("unexpected character '") + c + "'"};
            }
            out.push_back({type, std::string(1, c)});
            ++i;
        }
    }
    out.push_back({Tok::end, ""});
    return out;
}

// ---------------------------------------------------------------------------
// Statement parsing

class StatementParser {
public:
    explicit StatementParser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    StatementNode parse() {
        StatementNode node = parse_statement();
        expect(Tok::end, "trailing tokens after statement");
        return node;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }
    bool at(Tok type, std::size_t ahead = 0) const { return peek(ahead).type == type; }
    bool at_ident(std::string_view word, std::size_t ahead = 0) const {
        return at(Tok::ident, ahead) && peek(ahead).text == word;
    }
    const Token& advance() { return tokens_[pos_++]; }
    const Token& expect(Tok type, const char* message) {
        if (!at(type)) throw LineFault{FaultKind::syntax, message};
        return advance();
    }

    StatementNode parse_statement() {
        if (at_ident("pass") && at(Tok::end, 1)) {
            advance();
            return Pass{};
        }
        if (at_ident("print") && at(Tok::lparen, 1)) {
            advance();
            advance();
            Expr value = parse_value(false);
            expect(Tok::rparen, "expected ')' after print argument");
            return Print{std::move(value)};
        }
        if (at_ident("self") && at(Tok::dot, 1)) return parse_self_statement();
        if (at(Tok::ident) && at(Tok::lparen, 1)) {
            std::string name = advance().text;
            return AbstractCall{std::move(name), false, parse_arguments()};
        }
        throw LineFault{FaultKind::syntax, "unrecognised statement"};
    }

    std::vector<std::string> parse_dotted_after_self() {
        advance();  // self
        std::vector<std::string> names;
        while (at(Tok::dot)) {
            advance();
            names.push_back(expect(Tok::ident, "expected identifier after '.'").text);
        }
        return names;
    }

    StatementNode parse_self_statement() {
        std::vector<std::string> names = parse_dotted_after_self();
        if (at(Tok::lparen)) {
            if (names.size() == 1) return AbstractCall{names[0], true, parse_arguments()};
            if (names.size() == 3 && (names[2] == "append" || names[2] == "remove")) {
                advance();
                Expr value = parse_value(false);
                expect(Tok::rparen, "expected ')' after list argument");
                Path target{names[0], names[1]};
                if (names[2] == "append") return ListAppend{std::move(target), std::move(value)};
                return ListRemove{std::move(target), std::move(value)};
            }
            throw LineFault{FaultKind::disallowed_form, "unsupported method call"};
        }
        if (at(Tok::eq)) {
            advance();
            if (names.size() == 1) {
                throw LineFault{FaultKind::disallowed_form,
                                "entity declarations belong in the World initializer"};
            }
            if (names.size() != 2) throw LineFault{FaultKind::syntax, "path is too deep"};
            return ScalarAssign{Path{names[0], names[1]}, parse_value(false)};
        }
        if (at(Tok::lbracket)) {
            if (names.size() != 2) throw LineFault{FaultKind::syntax, "path is too deep"};
            advance();
            Literal key = parse_literal(false);
            expect(Tok::rbracket, "expected ']'");
            expect(Tok::eq, "expected '=' after map key");
            return MapAssign{Path{names[0], names[1]}, std::move(key), parse_value(false)};
        }
        throw LineFault{FaultKind::syntax, "expected assignment or call"};
    }

    std::vector<Argument> parse_arguments() {
        expect(Tok::lparen, "expected '('");
        std::vector<Argument> args;
        while (!at(Tok::rparen)) {
            Argument arg;
            if (at(Tok::ident) && at(Tok::eq, 1)) {
                arg.keyword = advance().text;
                advance();
            }
            arg.value = parse_value(true);
            args.push_back(std::move(arg));
            if (!at(Tok::comma)) break;
            advance();
        }
        expect(Tok::rparen, "expected ')' after arguments");
        return args;
    }

    Expr parse_value(bool allow_bare) {
        if (at_ident("self") && at(Tok::dot, 1)) {
            std::vector<std::string> names = parse_dotted_after_self();
            if (names.empty() || names.size() > 2) {
                throw LineFault{FaultKind::syntax, "path is too deep"};
            }
            Path path{names[0], std::nullopt};
            if (names.size() == 2) path.attribute = names[1];
            return path;
        }
        return parse_literal(allow_bare);
    }

    Literal parse_literal(bool allow_bare) {
        if (at(Tok::string)) {
            const Token& t = advance();
            return Literal::quoted(t.text, t.quote);
        }
        if (at(Tok::number)) return Literal::bare(advance().text);
        if (at_ident("None")) {
            advance();
            return Literal::none();
        }
        if (allow_bare && at(Tok::ident)) return Literal::bare(advance().text);
        throw LineFault{FaultKind::syntax, "expected a literal"};
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Program structure

struct SourceLine {
    int number;
    int indent;
    std::string_view content;
};

int indentation(std::string_view raw) {
    int width = 0;
    for (char c : raw) {
        if (c == ' ') {
            width += 1;
        } else if (c == '\t') {
            width += 4;
        } else {
            break;
        }
    }
    return width;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<SourceLine> split_lines(std::string_view source) {
    std::vector<SourceLine> lines;
    int number = 0;
    std::size_t start = 0;
    while (start <= source.size()) {
        std::size_t end = source.find('\n', start);
        if (end == std::string_view::npos) end = source.size();
        ++number;
        std::string_view raw = source.substr(start, end - start);
        std::string_view content = trim(raw);
        if (!content.empty()) lines.push_back({number, indentation(raw), content});
        if (end == source.size()) break;
        start = end + 1;
    }
    return lines;
}

struct DefHeader {
    std::string name;
    bool self_only = false;
};

std::optional<DefHeader> parse_def_header(std::string_view content) {
    if (!content.starts_with("def ")) return std::nullopt;
    std::string_view rest = trim(content.substr(4));
    std::size_t open = rest.find('(');
    std::size_t close = rest.rfind(')');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open ||
        !trim(rest.substr(close + 1)).ends_with(':')) {
        return std::nullopt;
    }
    DefHeader header;
    header.name = std::string(trim(rest.substr(0, open)));
    header.self_only = trim(rest.substr(open + 1, close - open - 1)) == "self";
    return header;
}

bool opens_block(std::string_view content) {
    if (!content.ends_with(':')) return false;
    for (std::string_view kw : {"class ", "if ", "elif ", "else", "for ", "while ", "with ", "try",
                                "except", "finally", "def "}) {
        if (content.starts_with(kw)) return true;
    }
    return false;
}

constexpr std::string_view kQuestionPrefix = "Question:";

class ProgramBuilder {
public:
    explicit ProgramBuilder(PromptStyle style) { program_.style = style; }

    UpdateProgram build(std::string_view source) {
        for (const SourceLine& line : split_lines(source)) consume(line);
        if (specific()) assemble_specific_groups();
        return std::move(program_);
    }

private:
    enum class Region { top, story, def, foreign, outside };

    bool specific() const { return program_.style == PromptStyle::specific_functions; }

    void fault(FaultKind kind, int line, std::string message) {
        program_.faults.push_back(Fault{kind, line, std::move(message), true});
    }

    void consume(const SourceLine& line) {
        if (region_ != Region::top && region_ != Region::outside && line.indent <= block_indent_ &&
            !line.content.starts_with('#')) {
            // a rejected block nested in a body hands control back to that body
            if (region_ == Region::foreign && parent_ && line.indent > parent_->second) {
                region_ = parent_->first;
                block_indent_ = parent_->second;
            } else {
                region_ = Region::outside;
            }
            parent_.reset();
        }

        if (line.content.starts_with('#')) {
            consume_comment(line);
            return;
        }

        if (auto def = parse_def_header(line.content)) {
            open_def(line, *def);
            return;
        }
        if (opens_block(line.content)) {
            fault(FaultKind::disallowed_form, line.number, "unsupported block construct");
            enter(Region::foreign, line.indent);
            return;
        }

        if (region_ == Region::foreign) {
            fault(FaultKind::disallowed_form, line.number, "statement inside unsupported block");
            return;
        }
        if (region_ == Region::outside || region_ == Region::top) {
            fault(FaultKind::outside_story, line.number, "statement outside story()");
            return;
        }

        StatementNode node;
        try {
            node = StatementParser(lex(line.content, line.number)).parse();
        } catch (const LineFault& f) {
            fault(f.kind, line.number, f.message + ": " + std::string(line.content));
            return;
        }
        place(Statement{std::move(node), line.number});
    }

    void consume_comment(const SourceLine& line) {
        if (!line.content.starts_with("##")) return;
        if (region_ != Region::top && region_ != Region::story) return;
        std::string_view text = line.content;
        while (!text.empty() && text.front() == '#') text.remove_prefix(1);
        text = trim(text);
        if (text.starts_with(kQuestionPrefix)) {
            program_.query = std::string(trim(text.substr(kQuestionPrefix.size())));
            in_trailing_ = true;
            return;
        }
        if (specific()) return;
        in_trailing_ = false;
        program_.groups.push_back(StatementGroup{std::string(text), {}});
    }

    void enter(Region region, int indent) {
        if (region == Region::foreign && (region_ == Region::story || region_ == Region::def) &&
            indent > block_indent_) {
            parent_ = std::pair{region_, block_indent_};
        }
        region_ = region;
        block_indent_ = indent;
    }

    void open_def(const SourceLine& line, const DefHeader& def) {
        if (def.name == "story" && def.self_only && !seen_story_) {
            seen_story_ = true;
            enter(Region::story, line.indent);
            return;
        }
        if (specific() && def.self_only && def.name != "story" && !defs_.contains(def.name)) {
            defs_[def.name] = DefBody{line.number, {}, false};
            def_order_.push_back(def.name);
            current_def_ = def.name;
            enter(Region::def, line.indent);
            return;
        }
        fault(FaultKind::disallowed_form, line.number,
              "function definition '" + def.name + "' not allowed here");
        enter(Region::foreign, line.indent);
    }

    void place(Statement statement) {
        const bool is_call = std::holds_alternative<AbstractCall>(statement.node);
        if (region_ == Region::def) {
            if (is_call) {
                fault(FaultKind::disallowed_form, statement.line,
                      "calls are not allowed inside sentence functions");
                return;
            }
            defs_[current_def_].body.push_back(std::move(statement));
            return;
        }

        if (is_call) {
            const auto& call = std::get<AbstractCall>(statement.node);
            if (specific()) {
                if (call.method_form && call.args.empty()) {
                    calls_.push_back({call.function, statement.line});
                } else {
                    fault(FaultKind::disallowed_form, statement.line,
                          "abstract function calls require the abstract-functions style");
                }
                return;
            }
            if (program_.style != PromptStyle::abstract_functions) {
                fault(FaultKind::disallowed_form, statement.line,
                      "abstract function calls require the abstract-functions style");
                return;
            }
        }

        if (specific() || in_trailing_) {
            program_.trailing.push_back(std::move(statement));
            return;
        }
        if (program_.groups.empty()) program_.groups.push_back(StatementGroup{});
        program_.groups.back().statements.push_back(std::move(statement));
    }

    void assemble_specific_groups() {
        for (const auto& [name, line] : calls_) {
            StatementGroup group{name, {}};
            auto it = defs_.find(name);
            if (it == defs_.end()) {
                fault(FaultKind::undefined_group, line, "call to undefined function '" + name + "'");
            } else {
                group.statements = it->second.body;
                it->second.used = true;
            }
            program_.groups.push_back(std::move(group));
        }
        for (const auto& name : def_order_) {
            const DefBody& def = defs_.at(name);
            if (!def.used) {
                fault(FaultKind::unused_function, def.line,
                      "function '" + name + "' is never called from story()");
            }
        }
    }

    struct DefBody {
        int line;
        std::vector<Statement> body;
        bool used;
    };

    UpdateProgram program_;
    Region region_ = Region::top;
    int block_indent_ = -1;
    std::optional<std::pair<Region, int>> parent_;
    bool seen_story_ = false;
    bool in_trailing_ = false;
    std::string current_def_;
    std::map<std::string, DefBody> defs_;
    std::vector<std::string> def_order_;
    std::vector<std::pair<std::string, int>> calls_;
};

UpdateProgram parse_natural(std::string_view source) {
    UpdateProgram program;
    program.style = PromptStyle::natural_language;
    for (const SourceLine& line : split_lines(source)) {
        std::string_view answer = line.content;
        while (!answer.empty() && (answer.back() == '.' || answer.back() == '!')) {
            answer.remove_suffix(1);
        }
        answer = trim(answer);
        if (!answer.empty()) {
            program.trailing.push_back(
                Statement{Print{Literal::bare(std::string(answer))}, line.number});
        }
        break;
    }
    return program;
}

std::string escape(std::string_view text, char quote) {
    std::string out;
    for (char c : text) {
        if (c == '\\' || c == quote) out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        if (c == '\t') {
            out += "\\t";
            continue;
        }
        out += c;
    }
    return out;
}

std::string render_literal(const Literal& lit) {
    switch (lit.form) {
        case Literal::Form::single_quoted: return "'" + escape(lit.text, '\'') + "'";
        case Literal::Form::double_quoted: return "\"" + escape(lit.text, '"') + "\"";
        case Literal::Form::bare: return lit.text;
        case Literal::Form::none: return "None";
    }
    return lit.text;
}

std::string render_path(const Path& path) {
    std::string out = "self." + path.entity;
    if (path.attribute) out += "." + *path.attribute;
    return out;
}

std::string_view node_name(const StatementNode& node) {
    static constexpr std::string_view names[] = {"ScalarAssign", "ListAppend", "ListRemove",
                                                 "MapAssign",    "AbstractCall", "Print",
                                                 "Pass"};
    return names[node.index()];
}

}  // namespace

UpdateProgram parse_program(std::string_view source, PromptStyle style) {
    if (style == PromptStyle::natural_language) return parse_natural(source);
    return ProgramBuilder(style).build(source);
}

std::string render_expr(const Expr& expr) {
    if (const auto* path = std::get_if<Path>(&expr)) return render_path(*path);
    return render_literal(std::get<Literal>(expr));
}

std::string render_statement(const Statement& statement) {
    struct Renderer {
        std::string operator()(const ScalarAssign& s) const {
            return render_path(s.target) + " = " + render_expr(s.value);
        }
        std::string operator()(const ListAppend& s) const {
            return render_path(s.target) + ".append(" + render_expr(s.value) + ")";
        }
        std::string operator()(const ListRemove& s) const {
            return render_path(s.target) + ".remove(" + render_expr(s.value) + ")";
        }
        std::string operator()(const MapAssign& s) const {
            return render_path(s.target) + "[" + render_literal(s.key) + "] = " +
                   render_expr(s.value);
        }
        std::string operator()(const AbstractCall& s) const {
            std::string out = (s.method_form ? "self." : "") + s.function + "(";
            const char* sep = "";
            for (const auto& arg : s.args) {
                out += sep;
                if (arg.keyword) out += *arg.keyword + "=";
                out += render_expr(arg.value);
                sep = ", ";
            }
            return out + ")";
        }
        std::string operator()(const Print& s) const { return "print(" + render_expr(s.value) + ")"; }
        std::string operator()(const Pass&) const { return "pass"; }
    };
    return std::visit(Renderer{}, statement.node);
}

std::string pretty_print(const UpdateProgram& program) {
    std::ostringstream out;
    if (program.style == PromptStyle::natural_language) {
        for (const auto& s : program.trailing) {
            if (const auto* p = std::get_if<Print>(&s.node)) {
                if (const auto* lit = std::get_if<Literal>(&p->value)) out << lit->text << '\n';
            }
        }
        return out.str();
    }

    constexpr std::string_view body = "        ";
    out << "    def story(self):\n";
    if (program.style == PromptStyle::specific_functions) {
        for (const auto& group : program.groups) out << body << "self." << group.label << "()\n";
    } else {
        for (const auto& group : program.groups) {
            if (!group.label.empty()) out << body << "## " << group.label << '\n';
            for (const auto& s : group.statements) out << body << render_statement(s) << '\n';
        }
    }
    if (program.query) out << body << "## " << kQuestionPrefix << ' ' << *program.query << '\n';
    for (const auto& s : program.trailing) out << body << render_statement(s) << '\n';

    if (program.style == PromptStyle::specific_functions) {
        for (const auto& group : program.groups) {
            out << "\n    def " << group.label << "(self):\n";
            for (const auto& s : group.statements) out << body << render_statement(s) << '\n';
        }
    }
    return out.str();
}

std::string dump_ast(const UpdateProgram& program) {
    std::ostringstream out;
    out << "program style=" << to_string(program.style) << " groups=" << program.groups.size()
        << " trailing=" << program.trailing.size() << " faults=" << program.faults.size() << '\n';
    auto statements = [&](const std::vector<Statement>& list) {
        for (const auto& s : list) {
            out << "  L" << s.line << ' ' << node_name(s.node) << ' ' << render_statement(s)
                << '\n';
        }
    };
    for (std::size_t i = 0; i < program.groups.size(); ++i) {
        out << "group " << i << " \"" << program.groups[i].label << "\"\n";
        statements(program.groups[i].statements);
    }
    if (program.query) out << "query \"" << *program.query << "\"\n";
    if (!program.trailing.empty()) {
        out << "trailing\n";
        statements(program.trailing);
    }
    for (const auto& f : program.faults) {
        out << "fault L" << f.line << ' ' << to_string(f.kind) << ": " << f.message << '\n';
    }
    return out.str();
}

}  // namespace corrpus
