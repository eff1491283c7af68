#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "smellfix/lexer.hpp"
#include "smellfix/result.hpp"

namespace smellfix {

/// One argument of an assertion call. `text` is the verbatim source with
/// surrounding whitespace trimmed; `span` covers exactly that text.
struct ArgSpan {
    std::string text;
    Span span;
    bool is_string_literal = false;
    std::optional<std::string> string_value;
};

struct AssertionCall {
    std::string method_name;  // simple name, e.g. "assertEquals"
    std::vector<ArgSpan> args;
    bool has_message = false;
    bool ambiguous_overload = false;
    bool nested = false;  // inside a control block; not extractable
    int line = 1;
    Span call_span;  // qualifier chain through closing paren
    std::size_t args_open_paren = 0;
};

enum class StatementKind { local_declaration, expression, assertion, control, other };

struct DeclaredVar {
    std::string name;
    std::string type_text;  // verbatim, e.g. "Period" or "int[]"
};

struct Statement {
    Span span;
    StatementKind kind = StatementKind::other;
    std::optional<DeclaredVar> declared_var;       // first declarator
    std::vector<std::string> declared_names;       // all declarators
    std::set<std::string> assigned_vars;
    std::set<std::string> used_vars;
    std::optional<AssertionCall> assertion;
};

struct MethodDecl {
    std::string name;
    std::vector<std::string> annotations;  // verbatim, e.g. "@Test"
    Span signature_span;  // modifiers through parameter list / throws clause
    Span name_span;
    Span body_span;  // between the braces, exclusive
    Span decl_span;  // first annotation through closing brace
    std::vector<Statement> statements;  // top level of the body only
    std::vector<AssertionCall> nested_assertions;
    bool is_test = false;
};

struct ClassDecl {
    std::string name;
    Span body_span;  // between the braces, exclusive
    std::vector<MethodDecl> methods;
};

struct TestFileModel {
    std::string path;
    std::string raw_text;
    std::vector<ClassDecl> classes;
};

/// JUnit 4 assertion overload table. The explanation message, when present,
/// is the first parameter. For the assertEquals family the delta overloads
/// make a 3-argument call ambiguous between (message, expected, actual) and
/// (expected, actual, delta).
struct AssertionOverloads {
    std::vector<int> plain;         // arities without a message
    std::vector<int> with_message;  // arities with a leading message
};

inline const std::map<std::string, AssertionOverloads>& assertion_overload_table() {
    static const std::map<std::string, AssertionOverloads> table = {
        {"assertEquals", {{2, 3}, {3, 4}}},
        {"assertNotEquals", {{2, 3}, {3, 4}}},
        {"assertArrayEquals", {{2, 3}, {3, 4}}},
        {"assertTrue", {{1}, {2}}},
        {"assertFalse", {{1}, {2}}},
        {"assertNull", {{1}, {2}}},
        {"assertNotNull", {{1}, {2}}},
        {"assertSame", {{2}, {3}}},
        {"assertNotSame", {{2}, {3}}},
        {"assertThat", {{2}, {3}}},
        {"fail", {{0}, {1}}},
    };
    return table;
}

inline bool is_assertion_name(std::string_view name) {
    return assertion_overload_table().count(std::string(name)) != 0;
}

/// Decodes a Java string literal token (quotes included) to its value.
/// Tolerates unterminated literals. Unicode escapes are decoded to UTF-8.
inline std::string decode_java_string(std::string_view literal) {
    std::string out;
    std::size_t i = 0;
    const std::size_t n = literal.size();
    if (i < n && (literal[i] == '"' || literal[i] == '\'')) ++i;
    const char quote = n ? literal[0] : '"';
    while (i < n) {
        char c = literal[i];
        if (c == quote && i + 1 == n) break;  // closing quote
        if (c != '\\') {
            out += c;
            ++i;
            continue;
        }
        ++i;
        if (i >= n) break;
        const char e = literal[i++];
        switch (e) {
            case 'b': out += '\b'; break;
            case 't': out += '\t'; break;
            case 'n': out += '\n'; break;
            case 'f': out += '\f'; break;
            case 'r': out += '\r'; break;
            case '"': out += '"'; break;
            case '\'': out += '\''; break;
            case '\\': out += '\\'; break;
            case 'u': {
                unsigned cp = 0;
                int digits = 0;
                while (i < n && digits < 4) {
                    const char h = literal[i];
                    unsigned v;
                    if (h >= '0' && h <= '9') v = h - '0';
                    else if (h >= 'a' && h <= 'f') v = 10 + h - 'a';
                    else if (h >= 'A' && h <= 'F') v = 10 + h - 'A';
                    else break;
                    cp = cp * 16 + v;
                    ++i;
                    ++digits;
                }
                if (cp < 0x80) {
                    out += static_cast<char>(cp);
                } else if (cp < 0x800) {
                    out += static_cast<char>(0xC0 | (cp >> 6));
                    out += static_cast<char>(0x80 | (cp & 0x3F));
                } else {
                    out += static_cast<char>(0xE0 | (cp >> 12));
                    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
                    out += static_cast<char>(0x80 | (cp & 0x3F));
                }
                break;
            }
            default:
                if (e >= '0' && e <= '7') {  // octal
                    unsigned v = e - '0';
                    int digits = 1;
                    while (i < n && digits < 3 && literal[i] >= '0' && literal[i] <= '7') {
                        v = v * 8 + (literal[i] - '0');
                        ++i;
                        ++digits;
                    }
                    out += static_cast<char>(v);
                } else {
                    out += e;
                }
        }
    }
    return out;
}

namespace detail {

inline bool is_blank(std::string_view s) {
    return s.find_first_not_of(" \t\n\r\f\v") == std::string_view::npos;
}

}  // namespace detail

struct MessageCheck {
    bool has_message = false;
    bool ambiguous = false;
};

/// Decides whether a call carries a real explanation message: the arity must
/// match a with-message overload, the first argument must look string-typed,
/// and a literal message must be non-blank (an empty or whitespace-only
/// string does not document anything). With an ambiguous arity (assertEquals
/// family, 3 args) a non-literal first argument cannot be typed, so it is
/// treated as no-message and flagged.
inline MessageCheck check_explanation_message(const AssertionCall& call) {
    MessageCheck r;
    const auto it = assertion_overload_table().find(call.method_name);
    if (it == assertion_overload_table().end()) return r;
    const auto& ov = it->second;
    const int n = static_cast<int>(call.args.size());
    const bool message_arity =
        std::find(ov.with_message.begin(), ov.with_message.end(), n) != ov.with_message.end();
    if (!message_arity) return r;
    const bool plain_arity =
        std::find(ov.plain.begin(), ov.plain.end(), n) != ov.plain.end();

    const ArgSpan& first = call.args.front();
    if (first.is_string_literal) {
        r.has_message = first.string_value && !detail::is_blank(*first.string_value);
        return r;
    }
    // string-typed expression heuristic
    std::vector<Token> first_tokens;
    for (const Token& t : lex(first.text))
        if (!t.is_trivia()) first_tokens.push_back(t);
    std::string compact;
    for (const Token& t : first_tokens) compact += t.text;
    if (compact.size() >= 11 && compact.ends_with(".toString()")) {
        r.has_message = true;
        return r;
    }
    if (plain_arity) {
        // a leading number/char/boolean literal settles it as the value form;
        // anything else could be either overload
        const bool definitely_not_string =
            !first_tokens.empty() &&
            (first_tokens.front().kind == TokenKind::number ||
             first_tokens.front().kind == TokenKind::char_literal ||
             first_tokens.front().is_keyword("true") ||
             first_tokens.front().is_keyword("false") ||
             first_tokens.front().is_keyword("null"));
        r.ambiguous = !definitely_not_string;
        return r;
    }
    // arity forces the message overload
    r.has_message = true;
    return r;
}

inline bool has_explanation_message(const AssertionCall& call) {
    return check_explanation_message(call).has_message;
}

// ---------------------------------------------------------------------------
// Structural parser
// ---------------------------------------------------------------------------

namespace detail {

constexpr std::size_t npos = static_cast<std::size_t>(-1);

inline bool is_control_keyword(const Token& t) {
    if (t.kind != TokenKind::keyword && !(t.kind == TokenKind::identifier && t.text == "yield"))
        return false;
    static const std::unordered_set<std::string_view> ctl = {
        "if", "for", "while", "do", "switch", "try", "synchronized",
        "return", "throw", "break", "continue", "assert", "yield",
    };
    return ctl.count(t.text) != 0;
}

inline bool is_block_keyword(std::string_view s) {
    return s == "if" || s == "for" || s == "while" || s == "switch" || s == "try" ||
           s == "synchronized";
}

inline bool is_primitive_type(const Token& t) {
    static const std::unordered_set<std::string_view> prim = {
        "boolean", "byte", "char", "short", "int", "long", "float", "double",
    };
    return t.kind == TokenKind::keyword && prim.count(t.text) != 0;
}

/// Token-level parser for one file. Produces the structural model; only
/// brace balance is required, everything else is tolerated.
class StructuralParser {
public:
    StructuralParser(std::string path, std::string source)
        : path_(std::move(path)), src_(std::move(source)), toks_(lex(src_)) {}

    result<TestFileModel> run() {
        if (auto line = unbalanced_brace_line()) {
            return {errc::unbalanced_delimiters,
                    path_ + ":" + std::to_string(*line) + ": unbalanced braces"};
        }
        TestFileModel model;
        model.path = path_;
        std::size_t i = 0;
        while (i < toks_.size()) {
            i = next_sig(i);
            if (i == npos) break;
            if (is_type_decl_keyword(i)) {
                i = parse_class(i, model);
            } else {
                ++i;
            }
        }
        model.raw_text = std::move(src_);
        return model;
    }

private:
    std::string path_;
    std::string src_;
    std::vector<Token> toks_;

    // --- token navigation ---------------------------------------------

    std::size_t next_sig(std::size_t i) const {
        while (i < toks_.size() && toks_[i].is_trivia()) ++i;
        return i < toks_.size() ? i : npos;
    }
    std::size_t next_sig_before(std::size_t i, std::size_t hi) const {
        const std::size_t j = next_sig(i);
        return (j != npos && j < hi) ? j : npos;
    }
    std::size_t prev_sig(std::size_t i) const {
        while (i > 0) {
            --i;
            if (!toks_[i].is_trivia()) return i;
        }
        return npos;
    }
    const Token& tok(std::size_t i) const { return toks_[i]; }

    std::optional<int> unbalanced_brace_line() const {
        std::vector<int> open_lines;
        for (const Token& t : toks_) {
            if (t.is_punct("{")) open_lines.push_back(t.span.start_line);
            else if (t.is_punct("}")) {
                if (open_lines.empty()) return t.span.start_line;
                open_lines.pop_back();
            }
        }
        if (!open_lines.empty()) return open_lines.back();
        return std::nullopt;
    }

    bool is_type_decl_keyword(std::size_t i) const {
        const Token& t = tok(i);
        if (!t.is_keyword("class") && !t.is_keyword("interface") && !t.is_keyword("enum"))
            return false;
        const std::size_t p = prev_sig(i);
        return p == npos || !tok(p).is_punct(".");  // guard Foo.class literals
    }

    /// Matches a brace/paren/bracket group starting at `open`; returns the
    /// index of the closing token or npos.
    std::size_t match_group(std::size_t open, std::size_t hi) const {
        int depth = 0;
        for (std::size_t j = open; j < hi; ++j) {
            const Token& t = toks_[j];
            if (t.kind != TokenKind::punct) continue;
            if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
            else if (t.text == ")" || t.text == "]" || t.text == "}") {
                --depth;
                if (depth == 0) return j;
                if (depth < 0) return npos;
            }
        }
        return npos;
    }

    // --- classes --------------------------------------------------------

    std::size_t parse_class(std::size_t kw_idx, TestFileModel& model) {
        const std::size_t name_idx = next_sig(kw_idx + 1);
        if (name_idx == npos || tok(name_idx).kind != TokenKind::identifier)
            return kw_idx + 1;
        std::size_t open = npos;
        for (std::size_t j = name_idx + 1; j < toks_.size(); ++j) {
            if (toks_[j].is_punct("{")) {
                open = j;
                break;
            }
            if (toks_[j].is_punct(";")) break;  // no body
        }
        if (open == npos) return name_idx + 1;
        const std::size_t close = match_group(open, toks_.size());
        if (close == npos) return name_idx + 1;

        ClassDecl cd;
        cd.name = tok(name_idx).text;
        cd.body_span = Span{tok(open).span.end_byte, tok(close).span.start_byte,
                            tok(open).span.end_line, tok(close).span.start_line};
        model.classes.push_back(std::move(cd));
        const std::size_t self = model.classes.size() - 1;
        std::vector<MethodDecl> methods = parse_class_body(open + 1, close, model);
        model.classes[self].methods = std::move(methods);
        return close + 1;
    }

    std::vector<MethodDecl> parse_class_body(std::size_t lo, std::size_t hi,
                                             TestFileModel& model) {
        std::vector<MethodDecl> methods;
        std::size_t i = lo;
        while (true) {
            i = next_sig(i);
            if (i == npos || i >= hi) break;

            // leading annotations
            std::vector<std::string> annotations;
            std::size_t ann_start_byte = npos;
            while (i < hi && tok(i).kind == TokenKind::annotation_marker) {
                const std::size_t marker = i;
                std::size_t name = next_sig_before(i + 1, hi);
                if (name == npos || tok(name).kind != TokenKind::identifier) break;
                std::size_t end_tok = name;
                while (true) {  // dotted annotation names
                    const std::size_t d = next_sig_before(end_tok + 1, hi);
                    if (d == npos || !tok(d).is_punct(".")) break;
                    const std::size_t nx = next_sig_before(d + 1, hi);
                    if (nx == npos || tok(nx).kind != TokenKind::identifier) break;
                    end_tok = nx;
                }
                const std::size_t maybe_args = next_sig_before(end_tok + 1, hi);
                if (maybe_args != npos && tok(maybe_args).is_punct("(")) {
                    const std::size_t close = match_group(maybe_args, hi);
                    if (close != npos) end_tok = close;
                }
                if (ann_start_byte == npos) ann_start_byte = tok(marker).span.start_byte;
                annotations.emplace_back(
                    slice(src_, Span{tok(marker).span.start_byte, tok(end_tok).span.end_byte}));
                const std::size_t after = next_sig_before(end_tok + 1, hi);
                if (after == npos) {
                    i = hi;
                    break;
                }
                i = after;
            }
            if (i >= hi) break;

            if (is_type_decl_keyword(i)) {  // nested type
                i = parse_class(i, model);
                continue;
            }

            // scan the member for the first of ';' '=' '{' at depth 0; a
            // class/interface/enum keyword on the way marks a nested type
            // behind modifiers (static class Mock ...)
            const std::size_t member_start = i;
            int depth = 0;
            std::size_t name_idx = npos, param_open = npos, nested_type = npos;
            char found = 0;
            std::size_t j = i;
            for (; j < hi; ++j) {
                const Token& t = toks_[j];
                if (depth == 0 && t.kind == TokenKind::keyword && is_type_decl_keyword(j)) {
                    nested_type = j;
                    break;
                }
                if (t.kind != TokenKind::punct) continue;
                if (t.text == "(") {
                    if (depth == 0) {
                        const std::size_t p = prev_sig(j);
                        if (p != npos && tok(p).kind == TokenKind::identifier) {
                            name_idx = p;
                            param_open = j;
                        }
                    }
                    ++depth;
                } else if (t.text == "[") {
                    ++depth;
                } else if (t.text == ")" || t.text == "]") {
                    --depth;
                } else if (t.text == "{") {
                    if (depth == 0) {
                        found = '{';
                        break;
                    }
                    ++depth;
                } else if (t.text == "}") {
                    --depth;
                } else if (depth == 0 && (t.text == ";" || t.text == "=")) {
                    found = t.text[0];
                    break;
                }
            }
            if (nested_type != npos) {
                i = parse_class(nested_type, model);
                continue;
            }
            if (found == 0) break;  // ran off the class body
            if (found == ';') {     // field without initializer, abstract method, ...
                i = j + 1;
                continue;
            }
            if (found == '=') {  // field with initializer: skip to ';' at depth 0
                int d2 = 0;
                std::size_t k = j;
                for (; k < hi; ++k) {
                    const Token& t = toks_[k];
                    if (t.kind != TokenKind::punct) continue;
                    if (t.text == "(" || t.text == "[" || t.text == "{") ++d2;
                    else if (t.text == ")" || t.text == "]" || t.text == "}") --d2;
                    else if (t.text == ";" && d2 == 0) break;
                }
                i = k + 1;
                continue;
            }

            // found == '{'
            if (param_open == npos || name_idx == npos) {
                // static/instance initializer block
                const std::size_t close = match_group(j, hi);
                i = (close == npos) ? j + 1 : close + 1;
                continue;
            }
            const std::size_t body_open = j;
            const std::size_t body_close = match_group(body_open, hi);
            if (body_close == npos) {
                i = body_open + 1;
                continue;
            }
            methods.push_back(build_method(member_start, name_idx, param_open, body_open,
                                           body_close, std::move(annotations),
                                           ann_start_byte));
            i = body_close + 1;
        }
        return methods;
    }

    // --- methods --------------------------------------------------------

    MethodDecl build_method(std::size_t member_start, std::size_t name_idx,
                            std::size_t param_open, std::size_t body_open,
                            std::size_t body_close, std::vector<std::string> annotations,
                            std::size_t ann_start_byte) {
        MethodDecl md;
        md.name = tok(name_idx).text;
        md.name_span = tok(name_idx).span;
        md.annotations = std::move(annotations);

        const std::size_t sig_end = prev_sig(body_open);
        md.signature_span = Span{tok(member_start).span.start_byte, tok(sig_end).span.end_byte,
                                 tok(member_start).span.start_line, tok(sig_end).span.end_line};
        md.body_span = Span{tok(body_open).span.end_byte, tok(body_close).span.start_byte,
                            tok(body_open).span.end_line, tok(body_close).span.start_line};
        const std::size_t decl_start =
            ann_start_byte == npos ? tok(member_start).span.start_byte : ann_start_byte;
        md.decl_span = Span{decl_start, tok(body_close).span.end_byte,
                            tok(member_start).span.start_line, tok(body_close).span.end_line};

        bool is_public = false, is_void = false;
        for (std::size_t k = member_start; k < name_idx; ++k) {
            if (tok(k).is_keyword("public")) is_public = true;
            if (tok(k).is_keyword("void")) is_void = true;
        }
        const std::size_t param_close = match_group(param_open, body_open + 1);
        const bool no_params =
            param_close != npos && next_sig(param_open + 1) == param_close;

        bool has_test_annotation = false;
        for (const std::string& a : md.annotations) {
            std::string_view name = a;
            name.remove_prefix(1);  // '@'
            if (const auto paren = name.find('('); paren != std::string_view::npos)
                name = name.substr(0, paren);
            while (!name.empty() && (name.back() == ' ' || name.back() == '\t'))
                name.remove_suffix(1);
            if (const auto dot = name.rfind('.'); dot != std::string_view::npos)
                name = name.substr(dot + 1);
            if (name == "Test") has_test_annotation = true;
        }
        md.is_test = has_test_annotation ||
                     (md.name.rfind("test", 0) == 0 && is_public && is_void && no_params);

        md.statements = parse_statements(body_open + 1, body_close);
        scan_assertions(md, body_open + 1, body_close);
        return md;
    }

    // --- statements -----------------------------------------------------

    std::vector<Statement> parse_statements(std::size_t lo, std::size_t hi) {
        std::vector<Statement> stmts;
        std::size_t i = lo;
        while (true) {
            i = next_sig(i);
            if (i == npos || i >= hi) break;
            if (tok(i).is_punct(";")) {  // stray empty statement
                ++i;
                continue;
            }
            const std::size_t start = i;
            const Token& first = tok(i);
            // `do` is absent from the block keywords: a do-while runs to the
            // ';' after its condition, which the plain scan already honors.
            const bool block_form = first.is_punct("{") ||
                                    (first.kind == TokenKind::keyword &&
                                     is_block_keyword(first.text));

            int depth = 0;
            std::size_t end = npos;
            std::size_t j = i;
            while (j < hi) {
                const Token& t = toks_[j];
                if (t.kind == TokenKind::punct) {
                    if (t.text == "(" || t.text == "[" || t.text == "{") {
                        ++depth;
                    } else if (t.text == ")" || t.text == "]") {
                        --depth;
                    } else if (t.text == "}") {
                        --depth;
                        if (depth == 0 && block_form) {
                            const std::size_t k = next_sig_before(j + 1, hi);
                            if (k != npos && (tok(k).is_keyword("else") ||
                                              tok(k).is_keyword("catch") ||
                                              tok(k).is_keyword("finally"))) {
                                j = k;
                                continue;
                            }
                            end = j;
                            break;
                        }
                        if (depth < 0) {  // tolerate stray closer
                            end = j > start ? j - 1 : j;
                            break;
                        }
                    } else if (t.text == ";" && depth == 0) {
                        end = j;
                        break;
                    }
                }
                ++j;
            }
            if (end == npos) end = hi - 1;  // tolerant: consume the rest
            while (end > start && toks_[end].is_trivia()) --end;

            Statement st;
            st.span = Span{tok(start).span.start_byte, tok(end).span.end_byte,
                           tok(start).span.start_line, tok(end).span.end_line};
            classify_statement(st, start, end);
            compute_var_sets(st, start, end);
            stmts.push_back(std::move(st));
            i = end + 1;
        }
        return stmts;
    }

    void classify_statement(Statement& st, std::size_t start, std::size_t end) {
        const Token& first = tok(start);
        if (first.is_punct("{") || is_control_keyword(first)) {
            st.kind = StatementKind::control;
            return;
        }
        if (auto call = match_assertion_call(start, end + 1)) {
            const std::size_t after = next_sig_before(call->close_idx + 1, end + 1);
            if (after != npos && tok(after).is_punct(";") && after == end) {
                st.kind = StatementKind::assertion;
                st.assertion = build_call(*call, /*nested=*/false);
                return;
            }
        }
        if (try_parse_declaration(st, start, end)) {
            st.kind = StatementKind::local_declaration;
            return;
        }
        if (first.kind == TokenKind::identifier || first.is_keyword("this") ||
            first.is_keyword("super") || first.is_keyword("new") || first.is_punct("(") ||
            first.is_punct("+") || first.is_punct("-")) {
            st.kind = StatementKind::expression;
            return;
        }
        st.kind = StatementKind::other;
    }

    /// Lexical local-declaration pattern:
    ///   [final] (primitive | Name(.Name)*) [<...>] ([])* name (= | ; | ,) ...
    bool try_parse_declaration(Statement& st, std::size_t start, std::size_t end) {
        std::vector<std::size_t> type_indices;
        std::size_t i = start;
        auto sig = [&](std::size_t k) { return next_sig_before(k, end + 1); };

        while (true) {  // modifiers / local annotations
            if (tok(i).is_keyword("final")) {
                const std::size_t n = sig(i + 1);
                if (n == npos) return false;
                i = n;
                continue;
            }
            if (tok(i).kind == TokenKind::annotation_marker) {
                std::size_t n = sig(i + 1);
                if (n == npos || tok(n).kind != TokenKind::identifier) return false;
                std::size_t after = sig(n + 1);
                if (after != npos && tok(after).is_punct("(")) {
                    const std::size_t close = match_group(after, end + 1);
                    if (close == npos) return false;
                    after = sig(close + 1);
                }
                if (after == npos) return false;
                i = after;
                continue;
            }
            break;
        }

        // base type
        if (is_primitive_type(tok(i))) {
            type_indices.push_back(i);
        } else if (tok(i).kind == TokenKind::identifier) {
            type_indices.push_back(i);
            while (true) {
                const std::size_t d = sig(type_indices.back() + 1);
                if (d == npos || !tok(d).is_punct(".")) break;
                const std::size_t nx = sig(d + 1);
                if (nx == npos || tok(nx).kind != TokenKind::identifier) break;
                type_indices.push_back(d);
                type_indices.push_back(nx);
            }
        } else {
            return false;
        }

        std::size_t last_type = type_indices.back();
        std::size_t i2 = sig(last_type + 1);
        if (i2 == npos) return false;

        // optional generic arguments
        if (tok(i2).is_punct("<")) {
            int adepth = 0;
            std::size_t j = i2;
            bool closed = false;
            for (; j <= end; ++j) {
                const Token& t = toks_[j];
                if (t.is_trivia()) continue;
                if (t.is_punct("<")) {
                    ++adepth;
                } else if (t.is_punct(">")) {
                    --adepth;
                    if (adepth == 0) {
                        closed = true;
                        break;
                    }
                } else if (t.kind == TokenKind::identifier ||
                           t.is_keyword("extends") || t.is_keyword("super") ||
                           is_primitive_type(t) || t.is_punct(",") || t.is_punct(".") ||
                           t.is_punct("?") || t.is_punct("[") || t.is_punct("]")) {
                    // plausible inside a type argument list
                } else {
                    return false;  // looks like a comparison, not generics
                }
            }
            if (!closed) return false;
            for (std::size_t k = i2; k <= j; ++k)
                if (!toks_[k].is_trivia()) type_indices.push_back(k);
            last_type = j;
            i2 = sig(j + 1);
            if (i2 == npos) return false;
        }

        // array brackets on the type
        int array_pairs = 0;
        while (tok(i2).is_punct("[")) {
            const std::size_t cb = sig(i2 + 1);
            if (cb == npos || !tok(cb).is_punct("]")) return false;
            type_indices.push_back(i2);
            type_indices.push_back(cb);
            last_type = cb;
            ++array_pairs;
            i2 = sig(cb + 1);
            if (i2 == npos) return false;
        }
        (void)array_pairs;

        if (tok(i2).kind != TokenKind::identifier) return false;
        std::size_t name_idx = i2;

        // old-style array suffix on the declarator name
        std::string suffix;
        std::size_t after_name = sig(name_idx + 1);
        while (after_name != npos && tok(after_name).is_punct("[")) {
            const std::size_t cb = sig(after_name + 1);
            if (cb == npos || !tok(cb).is_punct("]")) return false;
            suffix += "[]";
            after_name = sig(cb + 1);
        }
        if (after_name == npos) return false;
        if (!tok(after_name).is_punct("=") && !tok(after_name).is_punct(";") &&
            !tok(after_name).is_punct(","))
            return false;
        if (tok(after_name).is_punct("=")) {  // reject '=='
            const std::size_t nx2 = after_name + 1;
            if (nx2 <= end && toks_[nx2].is_punct("=")) return false;
        }

        std::string type_text(slice(src_, Span{tok(type_indices.front()).span.start_byte,
                                                tok(last_type).span.end_byte}));
        type_text += suffix;

        st.declared_var = DeclaredVar{tok(name_idx).text, type_text};
        st.declared_names.push_back(tok(name_idx).text);
        st.assigned_vars.insert(tok(name_idx).text);
        for (std::size_t k : type_indices) decl_type_scratch_.insert(k);
        decl_name_scratch_.insert(name_idx);

        // further declarators: `, name [= init]`
        std::size_t cursor = after_name;
        while (cursor != npos && cursor <= end) {
            if (tok(cursor).is_punct(";")) break;
            if (tok(cursor).is_punct(",")) {
                const std::size_t nm = sig(cursor + 1);
                if (nm == npos || tok(nm).kind != TokenKind::identifier) break;
                st.declared_names.push_back(tok(nm).text);
                st.assigned_vars.insert(tok(nm).text);
                decl_name_scratch_.insert(nm);
                cursor = sig(nm + 1);
                continue;
            }
            // skip an initializer expression to the next ',' or ';' at depth 0
            int d = 0;
            std::size_t k = cursor;
            for (; k <= end; ++k) {
                const Token& t = toks_[k];
                if (t.kind != TokenKind::punct) continue;
                if (t.text == "(" || t.text == "[" || t.text == "{") ++d;
                else if (t.text == ")" || t.text == "]" || t.text == "}") --d;
                else if ((t.text == "," || t.text == ";") && d == 0) break;
            }
            cursor = k <= end ? k : npos;
        }
        return true;
    }

    /// Lexical def/use over-approximation across every token of the
    /// statement. Keywords, members after '.', call names, and declaration
    /// type tokens are excluded; plain assignment targets count as assigned
    /// but not used.
    void compute_var_sets(Statement& st, std::size_t start, std::size_t end) {
        for (std::size_t idx = start; idx <= end; ++idx) {
            const Token& t = toks_[idx];
            if (t.kind != TokenKind::identifier) continue;
            if (decl_type_scratch_.count(idx)) continue;
            const std::size_t p = prev_sig(idx);
            if (p != npos && p >= start &&
                (tok(p).is_punct(".") || tok(p).kind == TokenKind::annotation_marker))
                continue;
            const std::size_t nx = next_sig_before(idx + 1, end + 1);
            if (nx != npos && tok(nx).is_punct("(")) continue;  // call name

            if (decl_name_scratch_.count(idx)) continue;  // declarator: assigned already

            bool assigns = false;
            bool reads = true;
            if (nx != npos && tok(nx).kind == TokenKind::punct) {
                const std::string& op = tok(nx).text;
                const std::size_t nx2 = next_sig_before(nx + 1, end + 1);
                const bool next_is_eq = nx2 != npos && tok(nx2).is_punct("=");
                if (op == "=" && !next_is_eq) {
                    assigns = true;
                    reads = false;
                } else if (next_is_eq && (op == "+" || op == "-" || op == "*" ||
                                          op == "/" || op == "%" || op == "&" ||
                                          op == "|" || op == "^")) {
                    assigns = true;  // compound assignment reads and writes
                } else if ((op == "+" || op == "-") && nx2 != npos &&
                           tok(nx2).is_punct(op)) {
                    assigns = true;  // postfix ++/--
                }
            }
            if (!assigns && p != npos && p >= start && tok(p).kind == TokenKind::punct &&
                (tok(p).text == "+" || tok(p).text == "-")) {
                const std::size_t pp = prev_sig(p);
                if (pp != npos && pp >= start && tok(pp).is_punct(tok(p).text))
                    assigns = true;  // prefix ++/--
            }

            if (assigns) st.assigned_vars.insert(t.text);
            if (reads) st.used_vars.insert(t.text);
        }
        decl_type_scratch_.clear();
        decl_name_scratch_.clear();
    }

    // --- assertion calls --------------------------------------------------

    struct CallMatch {
        std::string name;
        std::size_t chain_start, name_idx, open_idx, close_idx;
    };

    std::optional<CallMatch> match_assertion_call(std::size_t i, std::size_t hi) const {
        if (i >= hi || tok(i).kind != TokenKind::identifier) return std::nullopt;
        const std::size_t p = prev_sig(i);
        if (p != npos &&
            (tok(p).is_punct(".") || tok(p).kind == TokenKind::annotation_marker))
            return std::nullopt;

        std::vector<std::size_t> chain{i};
        while (true) {
            const std::size_t d = next_sig_before(chain.back() + 1, hi);
            if (d == npos || !tok(d).is_punct(".")) break;
            const std::size_t nx = next_sig_before(d + 1, hi);
            if (nx == npos || tok(nx).kind != TokenKind::identifier) break;
            chain.push_back(nx);
        }
        const std::size_t name_idx = chain.back();
        const std::string& name = tok(name_idx).text;
        if (!is_assertion_name(name)) return std::nullopt;
        if (chain.size() > 1 && tok(chain[chain.size() - 2]).text != "Assert")
            return std::nullopt;
        const std::size_t open = next_sig_before(name_idx + 1, hi);
        if (open == npos || !tok(open).is_punct("(")) return std::nullopt;
        const std::size_t close = match_group(open, hi);
        if (close == npos) return std::nullopt;
        return CallMatch{name, chain.front(), name_idx, open, close};
    }

    AssertionCall build_call(const CallMatch& m, bool nested) const {
        AssertionCall call;
        call.method_name = m.name;
        call.nested = nested;
        call.line = tok(m.chain_start).span.start_line;
        call.call_span = Span{tok(m.chain_start).span.start_byte, tok(m.close_idx).span.end_byte,
                              tok(m.chain_start).span.start_line, tok(m.close_idx).span.end_line};
        call.args_open_paren = tok(m.open_idx).span.start_byte;

        // split arguments at top-level commas
        std::vector<std::pair<std::size_t, std::size_t>> ranges;  // token [lo, hi)
        int depth = 1;
        std::size_t arg_lo = m.open_idx + 1;
        bool any_content = false;
        for (std::size_t j = m.open_idx + 1; j < m.close_idx; ++j) {
            const Token& t = toks_[j];
            if (!t.is_trivia()) any_content = true;
            if (t.kind != TokenKind::punct) continue;
            if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
            else if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
            else if (t.text == "," && depth == 1) {
                ranges.emplace_back(arg_lo, j);
                arg_lo = j + 1;
            }
        }
        if (any_content || !ranges.empty()) ranges.emplace_back(arg_lo, m.close_idx);

        for (auto [lo, hi] : ranges) {
            while (lo < hi && toks_[lo].is_trivia()) ++lo;
            while (hi > lo && toks_[hi - 1].is_trivia()) --hi;
            ArgSpan arg;
            if (lo < hi) {
                arg.span = Span{tok(lo).span.start_byte, tok(hi - 1).span.end_byte,
                                tok(lo).span.start_line, tok(hi - 1).span.end_line};
                arg.text = std::string(slice(src_, arg.span));
                if (hi - lo == 1 && tok(lo).kind == TokenKind::string_literal) {
                    arg.is_string_literal = true;
                    arg.string_value = decode_java_string(tok(lo).text);
                }
            } else {
                const std::size_t b = tok(m.close_idx).span.start_byte;
                arg.span = Span{b, b, tok(m.close_idx).span.start_line,
                                tok(m.close_idx).span.start_line};
            }
            call.args.push_back(std::move(arg));
        }

        const MessageCheck mc = check_explanation_message(call);
        call.has_message = mc.has_message;
        call.ambiguous_overload = mc.ambiguous;
        return call;
    }

    void scan_assertions(MethodDecl& md, std::size_t lo, std::size_t hi) {
        std::set<std::size_t> attached;  // call start bytes owned by statements
        for (const Statement& st : md.statements)
            if (st.assertion) attached.insert(st.assertion->call_span.start_byte);

        std::size_t i = lo;
        while (i < hi) {
            if (tok(i).kind == TokenKind::identifier) {
                if (auto m = match_assertion_call(i, hi)) {
                    if (!attached.count(tok(m->chain_start).span.start_byte))
                        md.nested_assertions.push_back(build_call(*m, /*nested=*/true));
                    i = m->open_idx;  // keep scanning inside the arguments
                    continue;
                }
            }
            ++i;
        }
    }

    // scratch sets filled by try_parse_declaration for the current statement
    std::set<std::size_t> decl_type_scratch_;
    std::set<std::size_t> decl_name_scratch_;
};

}  // namespace detail

/// Parses one Java test file into the structural model. Requires balanced
/// braces; anything else is tolerated. On failure the file should be
/// skipped with a diagnostic.
inline result<TestFileModel> parse_test_file(std::string path, std::string source) {
    return detail::StructuralParser(std::move(path), std::move(source)).run();
}

/// Every assertion call in the method, source order: top-level statement
/// assertions followed by calls nested inside control blocks, merged by
/// position.
inline std::vector<AssertionCall> extract_assertions(const MethodDecl& method) {
    std::vector<AssertionCall> calls;
    for (const Statement& st : method.statements)
        if (st.assertion) calls.push_back(*st.assertion);
    calls.insert(calls.end(), method.nested_assertions.begin(),
                 method.nested_assertions.end());
    std::sort(calls.begin(), calls.end(), [](const AssertionCall& a, const AssertionCall& b) {
        return a.call_span.start_byte < b.call_span.start_byte;
    });
    return calls;
}

}  // namespace smellfix
