#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "smellfix/detect.hpp"
#include "smellfix/io.hpp"
#include "smellfix/refactor.hpp"

namespace smellfix {

/// The patches for one smell instance: a single message edit for Assertion
/// Roulette, one extraction per extra occurrence for Duplicate Assert. A
/// failed plan keeps the instance (detection-only) and records why.
struct PlannedFix {
    SmellInstance instance;
    std::vector<Patch> patches;
    errc error = errc::ok;
    std::string error_detail;
};

inline std::pair<const ClassDecl*, const MethodDecl*> find_method_of(
    const TestFileModel& model, const SmellInstance& instance) {
    const std::size_t anchor = instance.assertions.empty()
                                   ? 0
                                   : instance.assertions.front().call_span.start_byte;
    for (const ClassDecl& cls : model.classes) {
        if (cls.name != instance.class_name) continue;
        for (const MethodDecl& method : cls.methods) {
            if (method.name != instance.method_name) continue;
            if (method.body_span.start_byte <= anchor && anchor < method.body_span.end_byte)
                return {&cls, &method};
        }
    }
    return {nullptr, nullptr};
}

/// Plans patches for every instance of one file, in instance order. The AR
/// message comes from the template (supporting {method} and {line}); review
/// mode re-plans single instances with user-supplied text instead.
inline std::vector<PlannedFix> plan_fixes(const TestFileModel& model,
                                          const std::vector<SmellInstance>& instances,
                                          std::string_view message_template =
                                              default_explanation_message) {
    std::vector<PlannedFix> fixes;
    std::set<std::string> reserved_names;
    for (const SmellInstance& instance : instances) {
        PlannedFix fix;
        fix.instance = instance;
        const auto [cls, method] = find_method_of(model, instance);
        if (!cls || !method) {
            fix.error = errc::non_extractable;
            fix.error_detail = "method '" + instance.method_name + "' not found";
            fixes.push_back(std::move(fix));
            continue;
        }
        if (instance.kind == SmellKind::assertion_roulette) {
            const AssertionCall& call = instance.assertions.front();
            const std::string message =
                expand_message_template(message_template, method->name, call.line);
            auto patch = plan_ar_fix(call, message);
            if (!patch) {
                fix.error = patch.error();
                fix.error_detail = patch.detail();
            } else {
                patch->file = model.path;
                patch->smell = instance;
                fix.patches.push_back(std::move(*patch));
            }
        } else {
            for (int occurrence = 2;
                 occurrence <= static_cast<int>(instance.assertions.size()); ++occurrence) {
                auto plan = plan_da_fix(*cls, *method, instance, occurrence, reserved_names);
                if (!plan) {
                    fix.error = plan.error();
                    fix.error_detail = plan.detail();
                    fix.patches.clear();
                    break;
                }
                auto patch = render_extraction(*plan, *method, model);
                if (!patch) {
                    fix.error = patch.error();
                    fix.error_detail = patch.detail();
                    fix.patches.clear();
                    break;
                }
                patch->file = model.path;
                patch->smell = instance;
                fix.patches.push_back(std::move(*patch));
            }
        }
        fixes.push_back(std::move(fix));
    }
    return fixes;
}

inline std::vector<SmellInstance> detect_smells(const TestFileModel& model, bool ar,
                                                bool da) {
    std::vector<SmellInstance> instances;
    if (ar) {
        auto found = detect_assertion_roulette(model);
        instances.insert(instances.end(), found.begin(), found.end());
    }
    if (da) {
        auto found = detect_duplicate_assert(model);
        instances.insert(instances.end(), found.begin(), found.end());
    }
    std::sort(instances.begin(), instances.end(), instance_order);
    return instances;
}

struct FileFixOutcome {
    std::string new_text;
    int applied_patches = 0;
    std::vector<std::size_t> rejected;  // patch indices dropped for overlap
    errc error = errc::ok;
    std::string error_detail;
};

/// Applies patches to the in-memory text; on success writes the file, on any
/// failure the file on disk keeps its original bytes.
inline FileFixOutcome apply_and_write(const std::filesystem::path& path,
                                      const std::string& source,
                                      const std::vector<Patch>& patches, bool write) {
    FileFixOutcome out;
    ApplyOutcome applied = apply_patches(source, patches);
    out.rejected = applied.rejected;
    if (applied.error != errc::ok) {
        out.error = applied.error;
        out.error_detail = applied.error_detail;
        return out;
    }
    out.new_text = std::move(applied.text);
    out.applied_patches = static_cast<int>(patches.size() - out.rejected.size());
    if (write && out.new_text != source) {
        auto written = write_file(path, out.new_text);
        if (!written) {
            out.error = written.error();
            out.error_detail = written.detail();
        }
    }
    return out;
}

}  // namespace smellfix
