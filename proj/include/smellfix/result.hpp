#pragma once

#include <optional>
#include <string>
#include <utility>

namespace smellfix {

enum class errc {
    ok = 0,
    unbalanced_delimiters,
    already_documented,
    no_message_overload,
    non_extractable,
    missing_declaration,
    overlapping_edits,
    reparse_failure,
    io_error,
};

inline const char* errc_name(errc e) {
    switch (e) {
        case errc::ok: return "ok";
        case errc::unbalanced_delimiters: return "UnbalancedDelimiters";
        case errc::already_documented: return "AlreadyDocumented";
        case errc::no_message_overload: return "NoMessageOverload";
        case errc::non_extractable: return "NonExtractable";
        case errc::missing_declaration: return "MissingDeclaration";
        case errc::overlapping_edits: return "OverlappingEdits";
        case errc::reparse_failure: return "ReparseFailure";
        case errc::io_error: return "IoError";
    }
    return "unknown";
}

/// Value-or-error return used by the parsing and refactoring layers.
template <typename T>
class result {
public:
    result(T value) : value_(std::move(value)) {}
    result(errc code, std::string detail = {}) : code_(code), detail_(std::move(detail)) {}

    explicit operator bool() const { return code_ == errc::ok; }
    errc error() const { return code_; }
    const std::string& detail() const { return detail_; }

    T& operator*() { return *value_; }
    const T& operator*() const { return *value_; }
    T* operator->() { return &*value_; }
    const T* operator->() const { return &*value_; }

private:
    std::optional<T> value_;
    errc code_ = errc::ok;
    std::string detail_;
};

}  // namespace smellfix
