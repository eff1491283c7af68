#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "smellfix/parser.hpp"

namespace smellfix {

enum class SmellKind { assertion_roulette, duplicate_assert };

inline const char* smell_kind_name(SmellKind k) {
    return k == SmellKind::assertion_roulette ? "AssertionRoulette" : "DuplicateAssert";
}

/// One detected smell occurrence. Assertion Roulette instances carry exactly
/// one assertion and one line; Duplicate Assert instances are one duplicate
/// group of two or more assertions with a canonical group key.
struct SmellInstance {
    SmellKind kind = SmellKind::assertion_roulette;
    std::string file;
    std::string class_name;
    std::string method_name;
    std::vector<int> lines;  // sorted, unique, non-empty
    std::vector<AssertionCall> assertions;  // source order
    std::string group_key;  // non-empty iff kind == duplicate_assert
};

struct Diagnostic {
    std::string file;
    int line = 0;
    std::string message;
};

/// Canonical argument text: whitespace and comments outside string literals
/// collapse to nothing, literal interiors stay verbatim. Purely lexical.
inline std::string normalize_arg(std::string_view arg_text) {
    std::string out;
    for (const Token& t : lex(arg_text))
        if (!t.is_trivia()) out += t.text;
    return out;
}

inline std::string duplicate_group_key(const AssertionCall& call) {
    std::string key = call.method_name;
    key += '(';
    for (std::size_t i = 0; i < call.args.size(); ++i) {
        if (i) key += ',';
        key += normalize_arg(call.args[i].text);
    }
    key += ')';
    return key;
}

namespace detail {

inline std::vector<int> sorted_unique_lines(const std::vector<AssertionCall>& calls) {
    std::vector<int> lines;
    lines.reserve(calls.size());
    for (const AssertionCall& c : calls) lines.push_back(c.line);
    std::sort(lines.begin(), lines.end());
    lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
    return lines;
}

}  // namespace detail

/// A test method with two or more undocumented assertions (no message, or an
/// empty/whitespace message) smells; each offending assertion is reported on
/// its own line so fixes can be reviewed individually.
inline std::vector<SmellInstance> detect_assertion_roulette(const TestFileModel& model) {
    std::vector<SmellInstance> found;
    for (const ClassDecl& cls : model.classes) {
        for (const MethodDecl& method : cls.methods) {
            if (!method.is_test) continue;
            std::vector<AssertionCall> undocumented;
            for (const AssertionCall& call : extract_assertions(method))
                if (!call.has_message) undocumented.push_back(call);
            if (undocumented.size() < 2) continue;
            for (const AssertionCall& call : undocumented) {
                SmellInstance inst;
                inst.kind = SmellKind::assertion_roulette;
                inst.file = model.path;
                inst.class_name = cls.name;
                inst.method_name = method.name;
                inst.lines = {call.line};
                inst.assertions = {call};
                found.push_back(std::move(inst));
            }
        }
    }
    return found;
}

/// Groups the top-level assertion statements of each test method by
/// (assertion name, normalized argument list); every group of size >= 2 is
/// one instance. Groups never span methods, and assertions nested inside
/// control blocks never participate (see non_extractable_duplicates).
inline std::vector<SmellInstance> detect_duplicate_assert(const TestFileModel& model) {
    std::vector<SmellInstance> found;
    for (const ClassDecl& cls : model.classes) {
        for (const MethodDecl& method : cls.methods) {
            if (!method.is_test) continue;
            std::vector<std::string> order;
            std::map<std::string, std::vector<AssertionCall>> groups;
            for (const Statement& st : method.statements) {
                if (!st.assertion) continue;
                const std::string key = duplicate_group_key(*st.assertion);
                auto [it, inserted] = groups.try_emplace(key);
                if (inserted) order.push_back(key);
                it->second.push_back(*st.assertion);
            }
            for (const std::string& key : order) {
                const std::vector<AssertionCall>& members = groups[key];
                if (members.size() < 2) continue;
                SmellInstance inst;
                inst.kind = SmellKind::duplicate_assert;
                inst.file = model.path;
                inst.class_name = cls.name;
                inst.method_name = method.name;
                inst.lines = detail::sorted_unique_lines(members);
                inst.assertions = members;
                inst.group_key = key;
                found.push_back(std::move(inst));
            }
        }
    }
    return found;
}

/// Duplicate groups that involve assertions nested in control blocks. These
/// are surfaced as diagnostics only; the extraction refactoring is defined
/// over straight-line top-level statements.
inline std::vector<Diagnostic> non_extractable_duplicates(const TestFileModel& model) {
    std::vector<Diagnostic> diags;
    for (const ClassDecl& cls : model.classes) {
        for (const MethodDecl& method : cls.methods) {
            if (!method.is_test) continue;
            std::vector<std::string> order;
            std::map<std::string, std::vector<AssertionCall>> groups;
            for (const AssertionCall& call : extract_assertions(method)) {
                const std::string key = duplicate_group_key(call);
                auto [it, inserted] = groups.try_emplace(key);
                if (inserted) order.push_back(key);
                it->second.push_back(call);
            }
            for (const std::string& key : order) {
                const std::vector<AssertionCall>& members = groups[key];
                if (members.size() < 2) continue;
                const bool any_nested = std::any_of(
                    members.begin(), members.end(),
                    [](const AssertionCall& c) { return c.nested; });
                if (!any_nested) continue;
                const std::vector<int> lines = detail::sorted_unique_lines(members);
                std::string where;
                for (std::size_t i = 0; i < lines.size(); ++i) {
                    if (i) where += ", ";
                    where += std::to_string(lines[i]);
                }
                diags.push_back(Diagnostic{
                    model.path, lines.front(),
                    "duplicate assertion group '" + key + "' in method '" + method.name +
                        "' (lines " + where +
                        ") involves assertions nested in control blocks; not refactorable"});
            }
        }
    }
    return diags;
}

struct SmellSummary {
    int assertion_roulette = 0;
    int duplicate_assert = 0;

    int total() const { return assertion_roulette + duplicate_assert; }
};

/// Aggregate detection results for one project scan. `instances` is sorted
/// deterministically by (file, line, kind); the per-file presence flags are
/// derived from it.
struct SmellReport {
    std::string project;
    std::vector<SmellInstance> instances;
    std::vector<Diagnostic> diagnostics;
    SmellSummary summary;

    bool class_flag(std::string_view file, SmellKind kind) const {
        return std::any_of(instances.begin(), instances.end(),
                           [&](const SmellInstance& i) {
                               return i.kind == kind && i.file == file;
                           });
    }
};

inline bool instance_order(const SmellInstance& a, const SmellInstance& b) {
    const int la = a.lines.empty() ? 0 : a.lines.front();
    const int lb = b.lines.empty() ? 0 : b.lines.front();
    return std::tie(a.file, la, a.kind, a.method_name, a.group_key) <
           std::tie(b.file, lb, b.kind, b.method_name, b.group_key);
}

/// Deterministic fold of per-file results: ordering is independent of the
/// order files were scanned in.
inline SmellReport build_report(std::string project, std::vector<SmellInstance> instances,
                                std::vector<Diagnostic> diagnostics = {}) {
    SmellReport report;
    report.project = std::move(project);
    std::sort(instances.begin(), instances.end(), instance_order);
    std::sort(diagnostics.begin(), diagnostics.end(),
              [](const Diagnostic& a, const Diagnostic& b) {
                  return std::tie(a.file, a.line, a.message) <
                         std::tie(b.file, b.line, b.message);
              });
    for (const SmellInstance& inst : instances) {
        if (inst.kind == SmellKind::assertion_roulette) ++report.summary.assertion_roulette;
        else ++report.summary.duplicate_assert;
    }
    report.instances = std::move(instances);
    report.diagnostics = std::move(diagnostics);
    return report;
}

}  // namespace smellfix
