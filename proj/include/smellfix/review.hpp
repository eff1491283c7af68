#pragma once

#include <algorithm>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "smellfix/diff.hpp"
#include "smellfix/fixer.hpp"

namespace smellfix {

struct ReviewOptions {
    bool assertion_roulette = true;
    bool duplicate_assert = true;
    std::string message_template = std::string(default_explanation_message);
    bool write = true;  // tests drive the session against in-memory buffers
};

struct ReviewOutcome {
    int accepted = 0;
    int skipped = 0;
    int failed_plans = 0;
    std::vector<std::string> files_changed;
    std::vector<Diagnostic> diagnostics;
    bool quit = false;
};

namespace detail {

inline void print_context(std::ostream& out, const std::string& text, int first_line,
                          int last_line, int margin = 2) {
    const std::vector<std::string_view> lines = split_lines(text);
    const int lo = std::max(1, first_line - margin);
    const int hi = std::min<int>(static_cast<int>(lines.size()), last_line + margin);
    for (int ln = lo; ln <= hi; ++ln) {
        out << (ln >= first_line && ln <= last_line ? " > " : "   ") << ln << " | "
            << lines[ln - 1] << '\n';
    }
}

inline std::string preview_patch(const std::string& source, const Patch& patch,
                                 const std::string& label) {
    const ApplyOutcome applied = apply_patches(source, {patch});
    if (applied.error != errc::ok) return "(preview unavailable: " + applied.error_detail + ")\n";
    return unified_diff(source, applied.text, "a/" + label, "b/" + label);
}

}  // namespace detail

/// Interactive per-instance review (detection results in deterministic file
/// then line order). Every instance shows its context and proposed diff; the
/// user answers accept / skip / accept-all / quit, and AR accepts may supply
/// a custom message (empty line keeps the default). Accepted patches are
/// applied atomically per file when the session leaves that file.
inline ReviewOutcome run_review(const std::vector<std::filesystem::path>& files,
                                const ReviewOptions& options, std::istream& in,
                                std::ostream& out) {
    ReviewOutcome outcome;
    bool accept_all = false;

    std::vector<std::filesystem::path> sorted = files;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.string() < b.string(); });

    for (const std::filesystem::path& path : sorted) {
        if (outcome.quit) break;
        auto content = read_file(path);
        if (!content) {
            outcome.diagnostics.push_back(Diagnostic{path.string(), 0, content.detail()});
            continue;
        }
        const std::string source = *content;
        auto model = parse_test_file(path.string(), source);
        if (!model) {
            outcome.diagnostics.push_back(Diagnostic{
                path.string(), 0,
                std::string(errc_name(model.error())) + ": " + model.detail()});
            continue;
        }
        const std::vector<SmellInstance> instances = detect_smells(
            *model, options.assertion_roulette, options.duplicate_assert);
        std::vector<PlannedFix> fixes =
            plan_fixes(*model, instances, options.message_template);

        std::vector<Patch> accepted;
        for (PlannedFix& fix : fixes) {
            const SmellInstance& inst = fix.instance;
            if (fix.error != errc::ok) {
                out << path.string() << ':' << inst.lines.front() << ": "
                    << smell_kind_name(inst.kind) << " in '" << inst.method_name
                    << "' cannot be refactored (" << errc_name(fix.error) << ": "
                    << fix.error_detail << "); skipping\n";
                ++outcome.failed_plans;
                continue;
            }

            out << '\n'
                << path.string() << ':' << inst.lines.front() << ": "
                << smell_kind_name(inst.kind) << " in method '" << inst.method_name << "'";
            if (!inst.group_key.empty()) out << " [" << inst.group_key << "]";
            out << '\n';
            detail::print_context(out, source, inst.lines.front(), inst.lines.back());

            for (const Patch& patch : fix.patches)
                out << detail::preview_patch(source, patch, path.filename().string());

            bool accept = accept_all;
            if (!accept_all) {
                out << "Apply this fix? [y]es / [s]kip / [a]ccept all / [q]uit: "
                    << std::flush;
                std::string answer;
                if (!std::getline(in, answer)) {
                    outcome.quit = true;
                    break;
                }
                if (answer == "y" || answer == "Y" || answer == "yes") {
                    accept = true;
                } else if (answer == "a" || answer == "A" || answer == "all") {
                    accept = true;
                    accept_all = true;
                } else if (answer == "q" || answer == "Q" || answer == "quit") {
                    outcome.quit = true;
                    break;
                }
            }
            if (!accept) {
                ++outcome.skipped;
                continue;
            }

            if (inst.kind == SmellKind::assertion_roulette && !accept_all) {
                const AssertionCall& call = inst.assertions.front();
                const std::string fallback = expand_message_template(
                    options.message_template, inst.method_name, call.line);
                out << "Message [" << fallback << "]: " << std::flush;
                std::string custom;
                if (std::getline(in, custom) && !custom.empty()) {
                    auto replanned = plan_ar_fix(call, custom);
                    if (replanned) {
                        replanned->file = model->path;
                        replanned->smell = inst;
                        fix.patches = {std::move(*replanned)};
                    }
                }
            }
            for (Patch& p : fix.patches) accepted.push_back(std::move(p));
            ++outcome.accepted;
        }

        if (!accepted.empty()) {
            const FileFixOutcome applied =
                apply_and_write(path, source, accepted, options.write);
            if (applied.error != errc::ok) {
                outcome.diagnostics.push_back(Diagnostic{
                    path.string(), 0,
                    std::string(errc_name(applied.error)) + ": " + applied.error_detail +
                        "; file left untouched"});
            } else {
                if (!applied.rejected.empty())
                    outcome.diagnostics.push_back(Diagnostic{
                        path.string(), 0,
                        std::to_string(applied.rejected.size()) +
                            " accepted patch(es) overlapped earlier ones and were dropped"});
                if (applied.new_text != source)
                    outcome.files_changed.push_back(path.string());
                out << path.string() << ": " << applied.applied_patches
                    << " fix(es) applied\n";
            }
        }
    }
    return outcome;
}

}  // namespace smellfix
