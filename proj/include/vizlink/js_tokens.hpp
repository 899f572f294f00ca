#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace vizlink::js {

enum class TokenKind { Identifier, Keyword, Number, String, Template, Regex, Punct };

struct Token {
    TokenKind kind;
    std::string_view text; // view into the tokenized source
    std::size_t offset;

    bool is(std::string_view punct_or_word) const { return text == punct_or_word; }
    std::size_t end() const { return offset + text.size(); }
};

// Lightweight JavaScript tokenizer: comments and whitespace are dropped,
// template literals are single tokens. Throws Error(ParseFailure) on
// unterminated literals/comments and unbalanced brackets.
std::vector<Token> tokenize(std::string_view source);

// Index of the bracket closing tokens[open], or tokens.size() when missing.
std::size_t matching(const std::vector<Token>& tokens, std::size_t open);

bool is_keyword(std::string_view word);

// Content of a string token without quotes; escape sequences are kept verbatim.
std::string_view string_body(const Token& t);

} // namespace vizlink::js
