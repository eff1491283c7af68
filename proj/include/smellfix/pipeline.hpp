#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "smellfix/detect.hpp"
#include "smellfix/io.hpp"
#include "smellfix/parser.hpp"

namespace smellfix {

namespace fs = std::filesystem;

struct TestProductionMapping {
    std::string project;
    std::string test_path;
    std::optional<std::string> production_path;
};

namespace detail {

inline bool name_matches_test_pattern(std::string_view stem) {
    if (stem.rfind("Test", 0) == 0) return true;  // Test*
    if (stem.size() >= 4 && stem.ends_with("Test")) return true;
    if (stem.size() >= 5 && stem.ends_with("Tests")) return true;
    return false;
}

/// A real @Test annotation token: marker followed by the identifier `Test`,
/// comments and strings excluded by construction.
inline bool content_has_test_annotation(std::string_view source) {
    const std::vector<Token> tokens = lex(source);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i].kind != TokenKind::annotation_marker) continue;
        std::size_t j = i + 1;
        while (j < tokens.size() && tokens[j].is_trivia()) ++j;
        if (j < tokens.size() && tokens[j].kind == TokenKind::identifier &&
            tokens[j].text == "Test")
            return true;
    }
    return false;
}

inline std::string generic_path(const fs::path& p) { return p.generic_string(); }

}  // namespace detail

/// Recursive scan for JUnit test files: the usual Test*/.*Test/.*Tests name
/// patterns, plus any .java file whose content has a real @Test annotation.
/// Result is sorted lexicographically.
inline std::vector<fs::path> discover_test_files(const fs::path& root,
                                                 std::vector<Diagnostic>* diagnostics =
                                                     nullptr) {
    std::vector<fs::path> found;
    std::error_code ec;
    fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied,
                                        ec);
    if (ec) {
        if (diagnostics)
            diagnostics->push_back(Diagnostic{root.string(), 0, "cannot scan: " + ec.message()});
        return found;
    }
    for (const fs::directory_entry& entry : it) {
        if (!entry.is_regular_file(ec)) continue;
        const fs::path& p = entry.path();
        if (p.extension() != ".java") continue;
        const std::string stem = p.stem().string();
        if (detail::name_matches_test_pattern(stem)) {
            found.push_back(p);
            continue;
        }
        auto content = read_file(p);
        if (!content) {
            if (diagnostics)
                diagnostics->push_back(Diagnostic{p.string(), 0, content.detail()});
            continue;
        }
        if (detail::content_has_test_annotation(*content)) found.push_back(p);
    }
    std::sort(found.begin(), found.end(), [](const fs::path& a, const fs::path& b) {
        return detail::generic_path(a) < detail::generic_path(b);
    });
    return found;
}

/// Links each test file to its production file by the naming convention:
/// strip a leading `Test` or a trailing `Test`/`Tests` from the stem and
/// look for `<stripped>.java` under the root. Only a unique hit maps; zero
/// or several hits leave the test unmapped (with a diagnostic for
/// ambiguity).
inline std::vector<TestProductionMapping> map_test_to_production(
    const std::string& project, const std::vector<fs::path>& tests, const fs::path& root,
    std::vector<Diagnostic>* diagnostics = nullptr) {
    std::vector<TestProductionMapping> mappings;
    mappings.reserve(tests.size());

    // index every .java file name under root once
    std::multimap<std::string, fs::path> by_name;
    std::error_code ec;
    for (fs::recursive_directory_iterator it(
             root, fs::directory_options::skip_permission_denied, ec);
         it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) break;
        if (!it->is_regular_file(ec)) continue;
        if (it->path().extension() == ".java")
            by_name.emplace(it->path().filename().string(), it->path());
    }

    for (const fs::path& test : tests) {
        TestProductionMapping m;
        m.project = project;
        m.test_path = detail::generic_path(test);

        const std::string stem = test.stem().string();
        std::string stripped;
        if (stem.rfind("Test", 0) == 0 && stem.size() > 4) stripped = stem.substr(4);
        else if (stem.ends_with("Tests") && stem.size() > 5)
            stripped = stem.substr(0, stem.size() - 5);
        else if (stem.ends_with("Test") && stem.size() > 4)
            stripped = stem.substr(0, stem.size() - 4);

        if (!stripped.empty()) {
            const auto [lo, hi] = by_name.equal_range(stripped + ".java");
            const auto count = std::distance(lo, hi);
            if (count == 1) {
                m.production_path = detail::generic_path(lo->second);
            } else if (count > 1 && diagnostics) {
                diagnostics->push_back(Diagnostic{
                    m.test_path, 0,
                    "production file '" + stripped + ".java' is ambiguous (" +
                        std::to_string(count) + " candidates); left unmapped"});
            }
        }
        mappings.push_back(std::move(m));
    }
    return mappings;
}

struct DetectionOptions {
    bool assertion_roulette = true;
    bool duplicate_assert = true;
    int jobs = 1;
};

/// Parses every mapped test file and runs the requested detectors. Per-file
/// parse failures become diagnostics; the report is always produced and its
/// ordering does not depend on the parallelism degree.
inline SmellReport run_detection(const std::string& project,
                                 const std::vector<TestProductionMapping>& mappings,
                                 const DetectionOptions& options = {}) {
    struct FileResult {
        std::vector<SmellInstance> instances;
        std::vector<Diagnostic> diagnostics;
    };

    const auto scan_one = [&options](const std::string& path) {
        FileResult r;
        auto content = read_file(path);
        if (!content) {
            r.diagnostics.push_back(Diagnostic{path, 0, content.detail()});
            return r;
        }
        auto model = parse_test_file(path, std::move(*content));
        if (!model) {
            r.diagnostics.push_back(
                Diagnostic{path, 0, std::string(errc_name(model.error())) + ": " +
                                        model.detail() + "; file skipped"});
            return r;
        }
        if (options.assertion_roulette) {
            auto found = detect_assertion_roulette(*model);
            r.instances.insert(r.instances.end(), found.begin(), found.end());
        }
        if (options.duplicate_assert) {
            auto found = detect_duplicate_assert(*model);
            r.instances.insert(r.instances.end(), found.begin(), found.end());
            auto diags = non_extractable_duplicates(*model);
            r.diagnostics.insert(r.diagnostics.end(), diags.begin(), diags.end());
        }
        return r;
    };

    std::vector<FileResult> results(mappings.size());
    if (options.jobs > 1 && mappings.size() > 1) {
        std::vector<std::future<FileResult>> futures(mappings.size());
        std::size_t next = 0;
        while (next < mappings.size()) {
            const std::size_t batch =
                std::min<std::size_t>(options.jobs, mappings.size() - next);
            for (std::size_t k = 0; k < batch; ++k)
                futures[next + k] = std::async(std::launch::async, scan_one,
                                               mappings[next + k].test_path);
            for (std::size_t k = 0; k < batch; ++k)
                results[next + k] = futures[next + k].get();
            next += batch;
        }
    } else {
        for (std::size_t i = 0; i < mappings.size(); ++i)
            results[i] = scan_one(mappings[i].test_path);
    }

    std::vector<SmellInstance> instances;
    std::vector<Diagnostic> diagnostics;
    for (FileResult& r : results) {
        instances.insert(instances.end(), std::make_move_iterator(r.instances.begin()),
                         std::make_move_iterator(r.instances.end()));
        diagnostics.insert(diagnostics.end(),
                           std::make_move_iterator(r.diagnostics.begin()),
                           std::make_move_iterator(r.diagnostics.end()));
    }
    return build_report(project, std::move(instances), std::move(diagnostics));
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

inline std::string csv_field(std::string_view value) {
    if (value.find_first_of(",\"\r\n") == std::string_view::npos)
        return std::string(value);
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"') quoted += "\"\"";
        else quoted += c;
    }
    quoted += '"';
    return quoted;
}

/// tests.csv: one test path per line.
/// classes.csv: project,test_path,production_path (header row).
/// results.csv: classes.csv columns plus one true/false presence column per
/// smell kind. Schemas are this tool's own stable contract.
inline result<bool> write_csv_artifacts(const SmellReport& report,
                                        const std::vector<TestProductionMapping>& mappings,
                                        const fs::path& out_dir) {
    std::string tests_csv;
    for (const TestProductionMapping& m : mappings) {
        tests_csv += csv_field(m.test_path);
        tests_csv += '\n';
    }
    if (auto r = write_file(out_dir / "tests.csv", tests_csv); !r) return r;

    std::string classes_csv = "project,test_path,production_path\n";
    for (const TestProductionMapping& m : mappings) {
        classes_csv += csv_field(m.project) + "," + csv_field(m.test_path) + "," +
                       csv_field(m.production_path.value_or("")) + "\n";
    }
    if (auto r = write_file(out_dir / "classes.csv", classes_csv); !r) return r;

    std::string results_csv =
        "project,test_path,production_path,AssertionRoulette,DuplicateAssert\n";
    for (const TestProductionMapping& m : mappings) {
        const bool ar = report.class_flag(m.test_path, SmellKind::assertion_roulette);
        const bool da = report.class_flag(m.test_path, SmellKind::duplicate_assert);
        results_csv += csv_field(m.project) + "," + csv_field(m.test_path) + "," +
                       csv_field(m.production_path.value_or("")) + "," +
                       (ar ? "true" : "false") + "," + (da ? "true" : "false") + "\n";
    }
    return write_file(out_dir / "results.csv", results_csv);
}

enum class ReportFormat { human, json, csv };

inline nlohmann::ordered_json instance_to_json(const SmellInstance& inst) {
    nlohmann::ordered_json j;
    j["kind"] = smell_kind_name(inst.kind);
    j["file"] = inst.file;
    j["class"] = inst.class_name;
    j["method"] = inst.method_name;
    j["lines"] = inst.lines;
    if (inst.kind == SmellKind::duplicate_assert) j["group_key"] = inst.group_key;
    else j["group_key"] = nullptr;
    return j;
}

/// Line-precise report: one record per smell instance, deterministic order.
inline void write_line_report(const SmellReport& report, std::ostream& out,
                              ReportFormat format) {
    if (format == ReportFormat::json) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const SmellInstance& inst : report.instances)
            arr.push_back(instance_to_json(inst));
        out << arr.dump(2) << '\n';
        return;
    }
    out << "kind,file,class,method,lines,group_key\n";
    for (const SmellInstance& inst : report.instances) {
        std::string lines;
        for (std::size_t i = 0; i < inst.lines.size(); ++i) {
            if (i) lines += ';';
            lines += std::to_string(inst.lines[i]);
        }
        out << csv_field(smell_kind_name(inst.kind)) << ',' << csv_field(inst.file) << ','
            << csv_field(inst.class_name) << ',' << csv_field(inst.method_name) << ','
            << csv_field(lines) << ',' << csv_field(inst.group_key) << '\n';
    }
}

struct PipelineOutcome {
    SmellReport report;
    std::vector<TestProductionMapping> mappings;
    std::vector<fs::path> artifacts;
};

/// The whole batch flow: discover test files, map them to production files,
/// detect, and write tests.csv / classes.csv / results.csv plus the
/// line-precise report into out_dir.
inline result<PipelineOutcome> run_pipeline(const fs::path& root, const fs::path& out_dir,
                                            const std::string& project,
                                            const DetectionOptions& options = {},
                                            ReportFormat line_format = ReportFormat::json) {
    std::error_code ec;
    if (!fs::is_directory(root, ec))
        return {errc::io_error, root.string() + " is not a readable directory"};
    fs::create_directories(out_dir, ec);
    if (ec) return {errc::io_error, "cannot create " + out_dir.string()};

    PipelineOutcome outcome;
    std::vector<Diagnostic> diagnostics;
    const std::vector<fs::path> tests = discover_test_files(root, &diagnostics);
    outcome.mappings = map_test_to_production(project, tests, root, &diagnostics);
    outcome.report = run_detection(project, outcome.mappings, options);
    outcome.report.diagnostics.insert(outcome.report.diagnostics.end(),
                                      diagnostics.begin(), diagnostics.end());

    if (auto r = write_csv_artifacts(outcome.report, outcome.mappings, out_dir); !r)
        return {r.error(), r.detail()};

    const fs::path line_report =
        out_dir / (line_format == ReportFormat::csv ? "line_report.csv"
                                                    : "line_report.json");
    std::ostringstream buf;
    write_line_report(outcome.report, buf,
                      line_format == ReportFormat::csv ? ReportFormat::csv
                                                       : ReportFormat::json);
    if (auto r = write_file(line_report, buf.str()); !r) return {r.error(), r.detail()};

    outcome.artifacts = {out_dir / "tests.csv", out_dir / "classes.csv",
                         out_dir / "results.csv", line_report};
    return outcome;
}

}  // namespace smellfix
