#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace smellfix {

/// Byte-exact region of a source file. Lines are 1-based and counted by '\n';
/// byte offsets are 0-based with an exclusive end.
struct Span {
    std::size_t start_byte = 0;
    std::size_t end_byte = 0;
    int start_line = 1;
    int end_line = 1;

    std::size_t size() const { return end_byte - start_byte; }
    bool empty() const { return start_byte == end_byte; }
    bool contains(const Span& other) const {
        return start_byte <= other.start_byte && other.end_byte <= end_byte;
    }
};

inline std::string_view slice(std::string_view text, const Span& s) {
    return text.substr(s.start_byte, s.end_byte - s.start_byte);
}

enum class TokenKind {
    identifier,
    keyword,
    string_literal,
    char_literal,
    number,
    punct,
    comment,
    whitespace,
    annotation_marker,
};

inline const char* token_kind_name(TokenKind k) {
    switch (k) {
        case TokenKind::identifier: return "identifier";
        case TokenKind::keyword: return "keyword";
        case TokenKind::string_literal: return "string-literal";
        case TokenKind::char_literal: return "char-literal";
        case TokenKind::number: return "number";
        case TokenKind::punct: return "punctuation";
        case TokenKind::comment: return "comment";
        case TokenKind::whitespace: return "whitespace";
        case TokenKind::annotation_marker: return "annotation-marker";
    }
    return "unknown";
}

struct Token {
    TokenKind kind = TokenKind::punct;
    std::string text;
    Span span;

    bool is_trivia() const {
        return kind == TokenKind::whitespace || kind == TokenKind::comment;
    }
    bool is_punct(std::string_view p) const {
        return kind == TokenKind::punct && text == p;
    }
    bool is_keyword(std::string_view k) const {
        return kind == TokenKind::keyword && text == k;
    }
};

inline bool is_java_keyword(std::string_view s) {
    static const std::unordered_set<std::string_view> kw = {
        "abstract", "assert", "boolean", "break", "byte", "case", "catch",
        "char", "class", "const", "continue", "default", "do", "double",
        "else", "enum", "extends", "final", "finally", "float", "for", "goto",
        "if", "implements", "import", "instanceof", "int", "interface",
        "long", "native", "new", "package", "private", "protected", "public",
        "return", "short", "static", "strictfp", "super", "switch",
        "synchronized", "this", "throw", "throws", "transient", "try",
        "void", "volatile", "while",
        // literals are reserved too; treating them as keywords keeps them
        // out of the variable sets
        "true", "false", "null",
    };
    return kw.count(s) != 0;
}

namespace detail {

inline bool is_space_char(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
inline bool is_digit_char(char c) { return c >= '0' && c <= '9'; }
inline bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' ||
           static_cast<unsigned char>(c) >= 0x80;  // tolerate multi-byte UTF-8
}
inline bool is_ident_part(char c) { return is_ident_start(c) || is_digit_char(c); }

}  // namespace detail

/// Tolerant, lossless Java lexer: concatenating the token texts reproduces
/// the input byte-for-byte. String/char literals and comments are single
/// tokens; an unterminated literal extends to the end of its line, an
/// unterminated block comment to the end of input. Never fails.
inline std::vector<Token> lex(std::string_view src) {
    std::vector<Token> tokens;
    const std::size_t n = src.size();
    std::size_t i = 0;
    int line = 1;

    auto at = [&](std::size_t k) -> char { return k < n ? src[k] : '\0'; };

    while (i < n) {
        const std::size_t start = i;
        const int start_line = line;
        const char c = src[i];
        TokenKind kind = TokenKind::punct;

        if (detail::is_space_char(c)) {
            while (i < n && detail::is_space_char(src[i])) {
                if (src[i] == '\n') ++line;
                ++i;
            }
            kind = TokenKind::whitespace;
        } else if (c == '/' && at(i + 1) == '/') {
            i += 2;
            while (i < n && src[i] != '\n') ++i;
            kind = TokenKind::comment;
        } else if (c == '/' && at(i + 1) == '*') {
            i += 2;
            while (i < n && !(src[i] == '*' && at(i + 1) == '/')) {
                if (src[i] == '\n') ++line;
                ++i;
            }
            if (i < n) i += 2;
            kind = TokenKind::comment;
        } else if (c == '"' || c == '\'') {
            const char quote = c;
            ++i;
            while (i < n) {
                if (src[i] == '\\' && i + 1 < n) {
                    if (src[i + 1] == '\n') ++line;
                    i += 2;
                    continue;
                }
                if (src[i] == quote) {
                    ++i;
                    break;
                }
                if (src[i] == '\n') break;  // unterminated: stop at end of line
                ++i;
            }
            kind = quote == '"' ? TokenKind::string_literal : TokenKind::char_literal;
        } else if (c == '@') {
            ++i;
            kind = TokenKind::annotation_marker;
        } else if (detail::is_ident_start(c)) {
            ++i;
            while (i < n && detail::is_ident_part(src[i])) ++i;
            kind = is_java_keyword(src.substr(start, i - start)) ? TokenKind::keyword
                                                                 : TokenKind::identifier;
        } else if (detail::is_digit_char(c) ||
                   (c == '.' && detail::is_digit_char(at(i + 1)))) {
            ++i;
            while (i < n) {
                const char d = src[i];
                if (detail::is_ident_part(d) || d == '.') {
                    ++i;
                    continue;
                }
                // exponent sign: 1e-3, 0x1p+2
                const char prev = src[i - 1];
                if ((d == '+' || d == '-') &&
                    (prev == 'e' || prev == 'E' || prev == 'p' || prev == 'P')) {
                    ++i;
                    continue;
                }
                break;
            }
            kind = TokenKind::number;
        } else {
            ++i;  // single-character punctuation
        }

        tokens.push_back(Token{kind, std::string(src.substr(start, i - start)),
                               Span{start, i, start_line, line}});
    }
    return tokens;
}

}  // namespace smellfix
