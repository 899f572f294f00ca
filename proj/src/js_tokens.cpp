#include "vizlink/js_tokens.hpp"

#include "vizlink/error.hpp"

#include <cctype>
#include <set>
#include <string>

namespace vizlink::js {

namespace {

[[noreturn]] void fail(const std::string& what, std::size_t offset) {
    throw Error(ErrorCode::ParseFailure, what + " at offset " + std::to_string(offset));
}

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$' || (static_cast<unsigned char>(c) & 0x80);
}
bool ident_part(char c) { return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)); }

std::size_t skip_quoted(std::string_view s, std::size_t pos) {
    char q = s[pos];
    for (std::size_t i = pos + 1; i < s.size(); ++i) {
        if (s[i] == '\\') {
            ++i;
            continue;
        }
        if (s[i] == q) return i + 1;
        if (s[i] == '\n') fail("unterminated string literal", pos);
    }
    fail("unterminated string literal", pos);
}

std::size_t skip_template(std::string_view s, std::size_t pos);

// Skips an embedded `${ ... }` expression starting after the "${".
std::size_t skip_substitution(std::string_view s, std::size_t pos) {
    int depth = 1;
    std::size_t i = pos;
    while (i < s.size()) {
        char c = s[i];
        if (c == '\'' || c == '"') {
            i = skip_quoted(s, i);
        } else if (c == '`') {
            i = skip_template(s, i);
        } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
            while (i < s.size() && s[i] != '\n') ++i;
        } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
            auto end = s.find("*/", i + 2);
            if (end == std::string_view::npos) fail("unterminated comment", i);
            i = end + 2;
        } else {
            if (c == '{') ++depth;
            if (c == '}' && --depth == 0) return i + 1;
            ++i;
        }
    }
    fail("unterminated template substitution", pos);
}

std::size_t skip_template(std::string_view s, std::size_t pos) {
    std::size_t i = pos + 1;
    while (i < s.size()) {
        if (s[i] == '\\') {
            i += 2;
        } else if (s[i] == '`') {
            return i + 1;
        } else if (s[i] == '$' && i + 1 < s.size() && s[i + 1] == '{') {
            i = skip_substitution(s, i + 2);
        } else {
            ++i;
        }
    }
    fail("unterminated template literal", pos);
}

constexpr std::string_view kPuncts[] = {
    ">>>=", "...", "===", "!==", "**=", "<<=", ">>=", ">>>", "&&=", "||=", "??=", "=>", "==", "!=", "<=", ">=",
    "&&",   "||",  "??",  "++",  "--",  "+=",  "-=",  "*=",  "/=",  "%=",  "&=", "|=", "^=", "**", "<<",
    ">>",   "{",   "}",   "(",   ")",   "[",   "]",   ";",   ",",   "<",   ">",   "+",  "-",  "*",  "%",
};
const std::string_view kSinglePuncts = "&|^!~?:=./@#";

bool regex_allowed(const std::vector<Token>& tokens) {
    if (tokens.empty()) return true;
    const Token& prev = tokens.back();
    if (prev.kind == TokenKind::Punct) return !(prev.is(")") || prev.is("]") || prev.is("}"));
    if (prev.kind == TokenKind::Keyword) {
        static const std::set<std::string_view> ops = {"return", "typeof", "instanceof", "in",   "of",
                                                       "new",    "delete", "void",       "throw", "case",
                                                       "do",     "else",   "yield",      "await"};
        return ops.count(prev.text) > 0;
    }
    return false;
}

} // namespace

bool is_keyword(std::string_view word) {
    static const std::set<std::string_view> words = {
        "break",  "case",   "catch",  "class",    "const",   "continue", "debugger", "default", "delete",
        "do",     "else",   "export", "extends",  "finally", "for",      "function", "if",      "import",
        "in",     "instanceof", "let", "new",     "return",  "super",    "switch",   "this",    "throw",
        "try",    "typeof", "var",    "void",     "while",   "with",     "yield",    "async",   "await",
        "of",     "null",   "true",   "false",    "static",  "arguments"};
    return words.count(word) > 0;
}

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    std::vector<char> brackets;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
            while (i < s.size() && s[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
            auto end = s.find("*/", i + 2);
            if (end == std::string_view::npos) fail("unterminated comment", i);
            i = end + 2;
            continue;
        }
        std::size_t start = i;
        TokenKind kind;
        if (ident_start(c)) {
            while (i < s.size() && ident_part(s[i])) ++i;
            kind = is_keyword(s.substr(start, i - start)) ? TokenKind::Keyword : TokenKind::Identifier;
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '.' || s[i] == '_' ||
                                    ((s[i] == '+' || s[i] == '-') && (s[i - 1] == 'e' || s[i - 1] == 'E') &&
                                     !(s[start] == '0' && start + 1 < s.size() && (s[start + 1] == 'x' || s[start + 1] == 'X')))))
                ++i;
            kind = TokenKind::Number;
        } else if (c == '"' || c == '\'') {
            i = skip_quoted(s, i);
            kind = TokenKind::String;
        } else if (c == '`') {
            i = skip_template(s, i);
            kind = TokenKind::Template;
        } else if (c == '/' && regex_allowed(out)) {
            bool in_class = false;
            ++i;
            for (;; ++i) {
                if (i >= s.size() || s[i] == '\n') fail("unterminated regular expression", start);
                if (s[i] == '\\') {
                    ++i;
                    continue;
                }
                if (s[i] == '[') in_class = true;
                else if (s[i] == ']') in_class = false;
                else if (s[i] == '/' && !in_class) break;
            }
            ++i;
            while (i < s.size() && ident_part(s[i])) ++i;
            kind = TokenKind::Regex;
        } else {
            std::size_t len = 0;
            for (auto p : kPuncts) {
                if (s.substr(i, p.size()) == p) {
                    len = p.size();
                    break;
                }
            }
            if (len == 0 && s.substr(i, 2) == "?." &&
                !(i + 2 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 2]))))
                len = 2;
            if (len == 0 && kSinglePuncts.find(c) != std::string_view::npos) len = 1;
            if (len == 0) fail(std::string("unexpected character '") + c + "'", i);
            i += len;
            kind = TokenKind::Punct;
            std::string_view p = s.substr(start, len);
            if (p == "(" || p == "[" || p == "{") {
                brackets.push_back(p[0]);
            } else if (p == ")" || p == "]" || p == "}") {
                char want = p == ")" ? '(' : p == "]" ? '[' : '{';
                if (brackets.empty() || brackets.back() != want) fail("unbalanced '" + std::string(p) + "'", start);
                brackets.pop_back();
            }
        }
        out.push_back({kind, s.substr(start, i - start), start});
    }
    if (!brackets.empty()) fail(std::string("unclosed '") + brackets.back() + "'", s.size());
    return out;
}

std::size_t matching(const std::vector<Token>& tokens, std::size_t open) {
    if (open >= tokens.size()) return tokens.size();
    std::string_view o = tokens[open].text;
    std::string_view c = o == "(" ? ")" : o == "[" ? "]" : o == "{" ? "}" : "";
    if (c.empty()) return tokens.size();
    int depth = 0;
    for (std::size_t i = open; i < tokens.size(); ++i) {
        if (tokens[i].kind != TokenKind::Punct) continue;
        if (tokens[i].text == o) ++depth;
        else if (tokens[i].text == c && --depth == 0) return i;
    }
    return tokens.size();
}

std::string_view string_body(const Token& t) {
    if (t.text.size() < 2) return {};
    return t.text.substr(1, t.text.size() - 2);
}

} // namespace vizlink::js
