#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "smellfix/detect.hpp"
#include "smellfix/parser.hpp"
#include "smellfix/result.hpp"

namespace smellfix {

inline constexpr std::string_view default_explanation_message =
    "Add Assertion Explanation here";

/// One text edit: the span is replaced by `replacement` (zero-width span for
/// a pure insertion). Edits within a patch never overlap.
struct Edit {
    Span span;
    std::string replacement;
};

struct Patch {
    std::string file;
    std::vector<Edit> edits;
    std::string description;
    std::optional<SmellInstance> smell;
};

/// Statement selection for one extract-method application, as indices into
/// the method's top-level statement list.
struct ExtractionPlan {
    std::vector<int> moved_statements;
    std::vector<int> copied_declarations;
    std::vector<std::pair<int, std::string>> converted_assignments;  // index -> type text
    std::string new_method_name;
    Span insert_after;  // zero-width, after the method's closing brace
};

/// `{method}` and `{line}` placeholders in a message template.
inline std::string expand_message_template(std::string_view tpl,
                                           std::string_view method_name, int line) {
    std::string out(tpl);
    const auto replace_all = [&out](std::string_view what, const std::string& with) {
        std::size_t pos = 0;
        while ((pos = out.find(what, pos)) != std::string::npos) {
            out.replace(pos, what.size(), with);
            pos += with.size();
        }
    };
    replace_all("{method}", std::string(method_name));
    replace_all("{line}", std::to_string(line));
    return out;
}

inline std::string quote_java_string(std::string_view value) {
    std::string out = "\"";
    for (char c : value) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

/// Documents one undocumented assertion. An empty or whitespace message
/// literal is replaced in place (argument count unchanged); otherwise the
/// quoted message is inserted as a new first argument. A bare fail() gets
/// the message as its only argument.
inline result<Patch> plan_ar_fix(const AssertionCall& call,
                                 std::optional<std::string> message = std::nullopt) {
    if (!assertion_overload_table().count(call.method_name))
        return {errc::no_message_overload,
                "'" + call.method_name + "' has no message-bearing overload"};
    if (has_explanation_message(call))
        return {errc::already_documented,
                "assertion at line " + std::to_string(call.line) + " already has a message"};

    const std::string text =
        message ? *message : std::string(default_explanation_message);
    const std::string quoted = quote_java_string(text);

    const auto& overloads = assertion_overload_table().at(call.method_name);
    const int n = static_cast<int>(call.args.size());
    const bool message_arity =
        std::find(overloads.with_message.begin(), overloads.with_message.end(), n) !=
        overloads.with_message.end();

    Patch patch;
    if (message_arity && !call.args.empty() && call.args.front().is_string_literal) {
        // blank message literal: replace it, keeping the argument count
        patch.edits.push_back(Edit{call.args.front().span, quoted});
        patch.description = "replace blank assertion message at line " +
                            std::to_string(call.line) + " with " + quoted;
    } else {
        const std::size_t at = call.args_open_paren + 1;
        Span here{at, at, call.line, call.line};
        patch.edits.push_back(Edit{here, call.args.empty() ? quoted : quoted + ", "});
        patch.description = "add assertion message " + quoted + " at line " +
                            std::to_string(call.line);
    }
    return patch;
}

namespace detail {

inline const Statement* find_statement_of(const MethodDecl& method,
                                          const AssertionCall& call, int* index = nullptr) {
    for (std::size_t i = 0; i < method.statements.size(); ++i) {
        const Statement& st = method.statements[i];
        if (st.assertion && st.assertion->call_span.start_byte == call.call_span.start_byte) {
            if (index) *index = static_cast<int>(i);
            return &st;
        }
    }
    return nullptr;
}

inline std::string unique_extracted_name(const ClassDecl& cls, const std::string& base,
                                         std::set<std::string>& reserved) {
    std::set<std::string> taken(reserved);
    for (const MethodDecl& m : cls.methods) taken.insert(m.name);
    std::string candidate = base + "Extracted";
    for (int suffix = 2; taken.count(candidate); ++suffix)
        candidate = base + "Extracted" + std::to_string(suffix);
    reserved.insert(candidate);
    return candidate;
}

/// Leading whitespace of the line that `byte_offset` sits on, or nullopt if
/// the line has non-blank text before the offset.
inline std::optional<std::string> line_indent_at(std::string_view text,
                                                 std::size_t byte_offset) {
    if (byte_offset == 0) return std::string();
    std::size_t line_start = text.rfind('\n', byte_offset - 1);
    line_start = line_start == std::string_view::npos ? 0 : line_start + 1;
    for (std::size_t i = line_start; i < byte_offset; ++i)
        if (text[i] != ' ' && text[i] != '\t') return std::nullopt;
    return std::string(text.substr(line_start, byte_offset - line_start));
}

}  // namespace detail

/// Plans the extract-method fix for occurrence `occurrence_index` (2-based
/// position within the duplicate group). The moved region runs from just
/// after the previous occurrence through this occurrence's assertion; local
/// declarations the region reads are copied in, and a region-initial
/// assignment to a local becomes a fresh declaration typed from the
/// original one.
inline result<ExtractionPlan> plan_da_fix(const ClassDecl& cls, const MethodDecl& method,
                                          const SmellInstance& group, int occurrence_index,
                                          std::set<std::string>& reserved_names) {
    if (group.kind != SmellKind::duplicate_assert || occurrence_index < 2 ||
        occurrence_index > static_cast<int>(group.assertions.size()))
        return {errc::non_extractable, "invalid duplicate group occurrence"};

    // resolve group members to top-level statement indices
    std::vector<int> member_index;
    for (const AssertionCall& call : group.assertions) {
        int idx = -1;
        if (call.nested || !detail::find_statement_of(method, call, &idx))
            return {errc::non_extractable,
                    "duplicate assertion at line " + std::to_string(call.line) +
                        " is nested in a control block"};
        member_index.push_back(idx);
    }
    std::sort(member_index.begin(), member_index.end());

    const int region_begin = member_index[occurrence_index - 2] + 1;  // after previous
    const int region_end = member_index[occurrence_index - 1];        // inclusive

    ExtractionPlan plan;
    for (int i = region_begin; i <= region_end; ++i) plan.moved_statements.push_back(i);

    const auto& stmts = method.statements;

    // first top-level declaration of each variable
    std::map<std::string, int> decl_index;
    for (std::size_t i = 0; i < stmts.size(); ++i)
        if (stmts[i].kind == StatementKind::local_declaration)
            for (const std::string& name : stmts[i].declared_names)
                decl_index.try_emplace(name, static_cast<int>(i));

    std::set<std::string> declared_in_region;  // declared by a moved statement
    std::set<std::string> assigned_in_region;
    for (int i : plan.moved_statements) {
        if (stmts[i].kind == StatementKind::local_declaration)
            for (const std::string& n : stmts[i].declared_names) declared_in_region.insert(n);
        for (const std::string& n : stmts[i].assigned_vars) assigned_in_region.insert(n);
    }

    auto pre_region_mutated = [&](const std::string& name) {
        for (int i = 0; i < region_begin; ++i) {
            if (stmts[i].kind == StatementKind::local_declaration) continue;
            if (stmts[i].assigned_vars.count(name)) return true;
        }
        return false;
    };

    // classify each variable the region touches by its first occurrence
    std::set<std::string> copy_worklist;
    for (int i : plan.moved_statements) {
        const Statement& st = stmts[i];
        std::set<std::string> mentioned = st.used_vars;
        mentioned.insert(st.assigned_vars.begin(), st.assigned_vars.end());
        for (const std::string& name : mentioned) {
            // only the statement of the FIRST region mention decides the role
            bool seen_before = false;
            for (int k : plan.moved_statements) {
                if (k == i) break;
                if (stmts[k].used_vars.count(name) || stmts[k].assigned_vars.count(name)) {
                    seen_before = true;
                    break;
                }
            }
            if (seen_before) continue;

            if (st.kind == StatementKind::local_declaration &&
                std::find(st.declared_names.begin(), st.declared_names.end(), name) !=
                    st.declared_names.end())
                continue;  // declared by the moved region itself

            const auto decl_it = decl_index.find(name);
            const bool has_local_decl =
                decl_it != decl_index.end() && decl_it->second < region_begin;

            if (st.used_vars.count(name)) {
                // read before any region assignment: the declaration's value
                // must still be current when the region starts
                if (!has_local_decl) continue;  // field or static name
                if (pre_region_mutated(name))
                    return {errc::missing_declaration,
                            "value of '" + name +
                                "' is changed before the duplicated region; its "
                                "declaration cannot be copied faithfully"};
                copy_worklist.insert(name);
            } else {
                // assigned before any read: becomes a declaration
                if (!has_local_decl) continue;  // field assignment, left as is
                if (st.kind != StatementKind::expression || st.assigned_vars.size() != 1)
                    return {errc::missing_declaration,
                            "cannot convert the assignment of '" + name +
                                "' into a declaration"};
                plan.converted_assignments.emplace_back(
                    i, stmts[decl_it->second].declared_var
                           ? stmts[decl_it->second].declared_var->type_text
                           : std::string());
                if (plan.converted_assignments.back().second.empty())
                    return {errc::missing_declaration,
                            "declaration of '" + name + "' has no recoverable type"};
            }
        }
    }

    // transitive closure over the copied declarations' own reads
    std::set<int> copied;
    std::set<std::string> resolved;
    while (!copy_worklist.empty()) {
        const std::string name = *copy_worklist.begin();
        copy_worklist.erase(copy_worklist.begin());
        if (resolved.count(name)) continue;
        resolved.insert(name);
        const auto it = decl_index.find(name);
        if (it == decl_index.end() || it->second >= region_begin) continue;
        copied.insert(it->second);
        for (const std::string& dep : stmts[it->second].used_vars) {
            const auto dep_it = decl_index.find(dep);
            if (dep_it == decl_index.end() || dep_it->second >= region_begin)
                continue;  // field or static name
            if (pre_region_mutated(dep))
                return {errc::missing_declaration,
                        "value of '" + dep +
                            "' is changed before the duplicated region; its "
                            "declaration cannot be copied faithfully"};
            copy_worklist.insert(dep);
        }
    }
    plan.copied_declarations.assign(copied.begin(), copied.end());

    // Statements after the region must not depend on anything the region
    // takes away. A plain overwrite after the region shadows a moved
    // assignment, so reads beyond it are fine again.
    std::set<std::string> shadowed;
    for (std::size_t i = region_end + 1; i < stmts.size(); ++i) {
        const Statement& st = stmts[i];
        for (const std::string& name : st.used_vars) {
            if (declared_in_region.count(name))
                return {errc::missing_declaration,
                        "declaration of '" + name +
                            "' would move out of scope of a later statement"};
            if (assigned_in_region.count(name) && !shadowed.count(name))
                return {errc::missing_declaration,
                        "'" + name +
                            "' is read after the duplicated region but assigned inside it"};
        }
        for (const std::string& name : st.assigned_vars) {
            if (declared_in_region.count(name))
                return {errc::missing_declaration,
                        "declaration of '" + name +
                            "' would move out of scope of a later statement"};
            if (!st.used_vars.count(name)) shadowed.insert(name);
        }
    }

    plan.new_method_name = detail::unique_extracted_name(cls, method.name, reserved_names);
    plan.insert_after = Span{method.decl_span.end_byte, method.decl_span.end_byte,
                             method.decl_span.end_line, method.decl_span.end_line};
    return plan;
}

/// Renders an extraction plan as two edits: delete the moved region from the
/// original body, and append the new method (annotations and signature
/// copied, name swapped) after the original one.
inline result<Patch> render_extraction(const ExtractionPlan& plan, const MethodDecl& method,
                                       const TestFileModel& model) {
    if (plan.moved_statements.empty() || plan.moved_statements.front() < 1)
        return {errc::non_extractable, "empty extraction region"};
    const std::string_view raw = model.raw_text;
    const auto& stmts = method.statements;

    const Statement& before_region = stmts[plan.moved_statements.front() - 1];
    const Statement& last_moved = stmts[plan.moved_statements.back()];

    Patch patch;
    patch.edits.push_back(
        Edit{Span{before_region.span.end_byte, last_moved.span.end_byte,
                  before_region.span.end_line, last_moved.span.end_line},
             ""});

    const std::string method_indent =
        detail::line_indent_at(raw, method.decl_span.start_byte).value_or("");
    std::string body_indent = method_indent + "    ";
    if (!stmts.empty())
        if (auto bi = detail::line_indent_at(raw, stmts.front().span.start_byte))
            body_indent = *bi;

    std::map<int, std::string> converted(plan.converted_assignments.begin(),
                                         plan.converted_assignments.end());

    std::string text = "\n\n";
    text += method_indent;
    text += "/*  Extracted Method  */\n";
    for (const std::string& ann : method.annotations) {
        text += method_indent;
        text += ann;
        text += '\n';
    }
    std::string signature(slice(raw, Span{method.signature_span.start_byte,
                                          method.name_span.start_byte}));
    signature += plan.new_method_name;
    signature += slice(raw, Span{method.name_span.end_byte, method.signature_span.end_byte});
    text += method_indent;
    text += signature;
    text += " {\n";

    const auto append_statement = [&](int index) {
        text += body_indent;
        if (const auto it = converted.find(index); it != converted.end()) {
            text += it->second;
            text += ' ';
        }
        text += slice(raw, stmts[index].span);
        text += '\n';
    };
    for (int i : plan.copied_declarations) append_statement(i);
    for (int i : plan.moved_statements) append_statement(i);

    text += method_indent;
    text += "}";
    patch.edits.push_back(Edit{plan.insert_after, std::move(text)});
    patch.description = "extract duplicated assertion into new method '" +
                        plan.new_method_name + "'";
    return patch;
}

// ---------------------------------------------------------------------------
// Patch application
// ---------------------------------------------------------------------------

struct ApplyOutcome {
    std::string text;                    // rewritten source (input text on failure)
    std::vector<std::size_t> rejected;   // patches dropped for overlapping earlier ones
    errc error = errc::ok;               // reparse_failure aborts the whole application
    std::string error_detail;
};

namespace detail {

inline bool edits_overlap(const Edit& a, const Edit& b) {
    const std::size_t lo = std::max(a.span.start_byte, b.span.start_byte);
    const std::size_t hi = std::min(a.span.end_byte, b.span.end_byte);
    if (lo < hi) return true;
    // a zero-width insertion strictly inside the other edit's span
    const auto inside = [](const Edit& ins, const Edit& other) {
        return ins.span.empty() && ins.span.start_byte > other.span.start_byte &&
               ins.span.start_byte < other.span.end_byte;
    };
    return inside(a, b) || inside(b, a);
}

}  // namespace detail

/// Applies accepted patches to one file's text. Patches whose edits overlap
/// an earlier-accepted patch are rejected (earlier wins). Edits are applied
/// in descending start order, so offsets never shift under an edit. The
/// result must re-parse; otherwise the application aborts and the caller
/// keeps the original text.
inline ApplyOutcome apply_patches(const std::string& source,
                                  const std::vector<Patch>& patches) {
    ApplyOutcome outcome;

    struct Placed {
        Edit edit;
        std::size_t patch_index;
    };
    std::vector<Placed> accepted;
    for (std::size_t p = 0; p < patches.size(); ++p) {
        bool conflict = false;
        for (const Edit& e : patches[p].edits) {
            for (const Placed& a : accepted) {
                if (detail::edits_overlap(e, a.edit)) {
                    conflict = true;
                    break;
                }
            }
            if (conflict) break;
        }
        if (conflict) {
            outcome.rejected.push_back(p);
            continue;
        }
        for (const Edit& e : patches[p].edits) accepted.push_back(Placed{e, p});
    }

    // Descending start; at equal offsets the later patch goes first so that
    // earlier patches' insertions end up earlier in the file.
    std::sort(accepted.begin(), accepted.end(), [](const Placed& a, const Placed& b) {
        if (a.edit.span.start_byte != b.edit.span.start_byte)
            return a.edit.span.start_byte > b.edit.span.start_byte;
        return a.patch_index > b.patch_index;
    });

    std::string text = source;
    for (const Placed& p : accepted) {
        if (p.edit.span.end_byte > text.size()) {
            outcome.text = source;
            outcome.error = errc::reparse_failure;
            outcome.error_detail = "edit span outside the file";
            return outcome;
        }
        text.replace(p.edit.span.start_byte, p.edit.span.size(), p.edit.replacement);
    }

    if (!accepted.empty()) {
        auto reparsed = parse_test_file("<applied>", text);
        if (!reparsed) {
            outcome.text = source;
            outcome.error = errc::reparse_failure;
            outcome.error_detail = "refactored text no longer parses: " + reparsed.detail();
            return outcome;
        }
    }
    outcome.text = std::move(text);
    return outcome;
}

}  // namespace smellfix
