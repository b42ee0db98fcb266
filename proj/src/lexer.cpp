#include "uspkit/lexer.hpp"

#include <array>
#include <cctype>

namespace uspkit {

namespace {

constexpr std::array<std::string_view, 22> kKeywords{
    "model", "class", "attr", "op", "extends", "abstract", "concept", "let",
    "send", "if", "else", "foreach", "in", "return", "new", "null", "true", "false",
    "self", "association", "and", "or",
};

constexpr std::string_view kNot = "not";

constexpr std::string_view kGuillemetOpen = "\xC2\xAB";
constexpr std::string_view kGuillemetClose = "\xC2\xBB";
constexpr std::string_view kNotEqual = "\xE2\x89\xA0";
constexpr std::string_view kLessEqual = "\xE2\x89\xA4";
constexpr std::string_view kGreaterEqual = "\xE2\x89\xA5";

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
public:
    Lexer(std::string_view src, std::string_view file) : src_(src), file_(file) {}

    LexResult run() {
        LexResult out;
        while (true) {
            const std::size_t trivia_begin = pos_;
            skip_trivia();
            Token tok;
            tok.leading_trivia = std::string(src_.substr(trivia_begin, pos_ - trivia_begin));
            const std::size_t begin = pos_;
            const std::uint32_t line = line_;
            const std::uint32_t col = col_;
            if (pos_ >= src_.size()) {
                tok.kind = TokenKind::End;
                set_span(tok, begin, line, col);
                out.tokens.push_back(std::move(tok));
                break;
            }
            scan(tok, out.diagnostics, line, col);
            tok.lexeme = std::string(src_.substr(begin, pos_ - begin));
            set_span(tok, begin, line, col);
            out.tokens.push_back(std::move(tok));
        }
        return out;
    }

private:
    void set_span(Token& tok, std::size_t begin, std::uint32_t line, std::uint32_t col) const {
        tok.span.file = std::string(file_);
        tok.span.begin_offset = static_cast<std::uint32_t>(begin);
        tok.span.end_offset = static_cast<std::uint32_t>(pos_);
        tok.span.line = line;
        tok.span.column = col;
        tok.span.end_line = line_;
        tok.span.end_column = col_;
    }

    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }
    bool starts_with(std::string_view s) const { return src_.substr(pos_).starts_with(s); }

    void advance(std::size_t n = 1) {
        for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
            const char c = src_[pos_++];
            if (c == '\n') {
                ++line_;
                col_ = 1;
            } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
                ++col_;  // count code points, not continuation bytes
            }
        }
    }

    void skip_trivia() {
        while (pos_ < src_.size()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    void error(std::vector<Diagnostic>& diags, std::uint32_t line, std::uint32_t col, std::string msg) const {
        diags.push_back({"P001", Severity::Error, std::move(msg), {std::string(file_), line, col}, {}});
    }

    void scan(Token& tok, std::vector<Diagnostic>& diags, std::uint32_t line, std::uint32_t col) {
        const char c = peek();
        if (ident_start(c)) {
            while (ident_char(peek())) advance();
            tok.kind = TokenKind::Identifier;
            return;
        }
        if (digit(c)) {
            scan_number(tok);
            return;
        }
        if (c == '"') {
            scan_text(tok, diags, line, col);
            return;
        }
        if (starts_with(kGuillemetOpen) || starts_with("<<")) {
            tok.kind = TokenKind::StereotypeOpen;
            advance(2);
            return;
        }
        if (starts_with(kGuillemetClose) || starts_with(">>")) {
            tok.kind = TokenKind::StereotypeClose;
            advance(2);
            return;
        }
        for (std::string_view p : {kNotEqual, kLessEqual, kGreaterEqual}) {
            if (starts_with(p)) {
                tok.kind = TokenKind::Punctuation;
                advance(p.size());
                return;
            }
        }
        for (std::string_view p : {":=", "!=", "<=", ">=", "--"}) {
            if (starts_with(p)) {
                tok.kind = TokenKind::Punctuation;
                advance(2);
                return;
            }
        }
        static constexpr std::string_view kSingle = "{}()[];:,.?<>=+-*/";
        if (kSingle.find(c) != std::string_view::npos) {
            tok.kind = TokenKind::Punctuation;
            advance();
            return;
        }
        // Consume one whole UTF-8 code point so columns stay meaningful.
        advance();
        while (pos_ < src_.size() && (static_cast<unsigned char>(peek()) & 0xC0) == 0x80) ++pos_;
        tok.kind = TokenKind::Invalid;
        error(diags, line, col, "unexpected character");
    }

    void scan_number(Token& tok) {
        while (digit(peek())) advance();
        bool real = false;
        if (peek() == '.' && digit(peek(1))) {
            real = true;
            advance();
            while (digit(peek())) advance();
        }
        if (peek() == 'e' || peek() == 'E') {
            const std::size_t sign = (peek(1) == '+' || peek(1) == '-') ? 1 : 0;
            if (digit(peek(1 + sign))) {
                real = true;
                advance(1 + sign);
                while (digit(peek())) advance();
            }
        }
        tok.kind = real ? TokenKind::Real : TokenKind::Integer;
    }

    void scan_text(Token& tok, std::vector<Diagnostic>& diags, std::uint32_t line, std::uint32_t col) {
        advance();  // opening quote
        while (pos_ < src_.size()) {
            const char c = peek();
            if (c == '"') {
                advance();
                tok.kind = TokenKind::Text;
                return;
            }
            if (c == '\n') break;
            if (c == '\\' && pos_ + 1 < src_.size() && peek(1) != '\n') {
                advance(2);
                continue;
            }
            advance();
        }
        tok.kind = TokenKind::Invalid;
        error(diags, line, col, "unterminated string literal");
    }

    std::string_view src_;
    std::string_view file_;
    std::size_t pos_ = 0;
    std::uint32_t line_ = 1;
    std::uint32_t col_ = 1;
};

}  // namespace

bool is_keyword(std::string_view word) {
    if (word == kNot) return true;
    for (auto k : kKeywords) {
        if (k == word) return true;
    }
    return false;
}

std::string_view canonical_punct(std::string_view lexeme) {
    if (lexeme == kNotEqual) return "!=";
    if (lexeme == kLessEqual) return "<=";
    if (lexeme == kGreaterEqual) return ">=";
    return lexeme;
}

LexResult lex(std::string_view source, std::string_view file_name) {
    LexResult out = Lexer(source, file_name).run();
    for (auto& tok : out.tokens) {
        if (tok.kind == TokenKind::Identifier && is_keyword(tok.lexeme)) tok.kind = TokenKind::Keyword;
    }
    return out;
}

}  // namespace uspkit
