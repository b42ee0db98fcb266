#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "uspkit/diagnostic.hpp"
#include "uspkit/source.hpp"

namespace uspkit {

enum class TokenKind : std::uint8_t {
    Keyword,
    Identifier,
    StereotypeOpen,   // « or <<
    StereotypeClose,  // » or >>
    Punctuation,
    Integer,
    Real,
    Text,
    Invalid,  // lexical error; a diagnostic was emitted
    End,
};

struct Token {
    TokenKind kind = TokenKind::End;
    std::string lexeme;          // exact source bytes
    std::string leading_trivia;  // whitespace and comments before the lexeme
    SourceSpan span;

    bool is(TokenKind k, std::string_view text) const { return kind == k && lexeme == text; }
    bool is_keyword(std::string_view text) const { return is(TokenKind::Keyword, text); }
    bool is_punct(std::string_view text) const { return is(TokenKind::Punctuation, text); }
};

struct LexResult {
    std::vector<Token> tokens;  // always terminated by an End token
    std::vector<Diagnostic> diagnostics;
};

bool is_keyword(std::string_view word);

/// Concatenating leading_trivia + lexeme over all tokens reproduces `source`.
LexResult lex(std::string_view source, std::string_view file_name);

/// Normalised punctuation spelling (≠ → !=, ≤ → <=, ≥ → >=).
std::string_view canonical_punct(std::string_view lexeme);

}  // namespace uspkit
