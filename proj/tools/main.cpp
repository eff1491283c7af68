// smellfix: detects Assertion Roulette and Duplicate Assert smells in JUnit
// test sources and rewrites them (message insertion / extract method), with
// batch, dry-run, interactive-review, and pipeline modes.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "smellfix/smellfix.hpp"

namespace fs = std::filesystem;
using namespace smellfix;

namespace {

constexpr int exit_clean = 0;
constexpr int exit_findings = 1;
constexpr int exit_error = 2;

struct RunConfig {
    std::vector<std::string> paths;
    std::string smell = "all";
    std::string format = "human";
    std::string message_template;
    bool write = false;
    bool stdin_script = false;
    std::string out_dir;
    std::string project;
    int jobs = 1;
};

std::string default_template() {
    if (const char* env = std::getenv("SMELLFIX_MESSAGE"); env && *env) return env;
    return std::string(default_explanation_message);
}

bool smell_ar(const RunConfig& c) { return c.smell == "ar" || c.smell == "all"; }
bool smell_da(const RunConfig& c) { return c.smell == "da" || c.smell == "all"; }

/// Files or directories; directories are scanned for test files.
bool expand_paths(const RunConfig& config, std::vector<fs::path>& files,
                  std::vector<Diagnostic>& diagnostics) {
    for (const std::string& p : config.paths) {
        std::error_code ec;
        if (fs::is_directory(p, ec)) {
            auto found = discover_test_files(p, &diagnostics);
            files.insert(files.end(), found.begin(), found.end());
        } else if (fs::is_regular_file(p, ec)) {
            files.emplace_back(p);
        } else {
            std::cerr << "smellfix: error: no such file or directory: " << p << '\n';
            return false;
        }
    }
    std::sort(files.begin(), files.end());
    files.erase(std::unique(files.begin(), files.end()), files.end());
    return true;
}

void print_diagnostics(const std::vector<Diagnostic>& diagnostics) {
    for (const Diagnostic& d : diagnostics) {
        std::cerr << d.file;
        if (d.line) std::cerr << ':' << d.line;
        std::cerr << ": " << d.message << '\n';
    }
}

void print_human_instance(const SmellInstance& inst) {
    std::cout << inst.file << ':' << inst.lines.front() << ": "
              << smell_kind_name(inst.kind) << ": ";
    if (inst.kind == SmellKind::assertion_roulette) {
        std::cout << "undocumented '" << inst.assertions.front().method_name
                  << "' in method '" << inst.method_name << "'";
    } else {
        std::cout << "'" << inst.group_key << "' repeated at lines ";
        for (std::size_t i = 0; i < inst.lines.size(); ++i) {
            if (i) std::cout << ", ";
            std::cout << inst.lines[i];
        }
        std::cout << " in method '" << inst.method_name << "'";
    }
    std::cout << '\n';
}

int cmd_detect(const RunConfig& config) {
    std::vector<fs::path> files;
    std::vector<Diagnostic> diagnostics;
    if (!expand_paths(config, files, diagnostics)) return exit_error;

    std::vector<TestProductionMapping> mappings;
    for (const fs::path& f : files)
        mappings.push_back(TestProductionMapping{"", f.generic_string(), std::nullopt});
    DetectionOptions options;
    options.assertion_roulette = smell_ar(config);
    options.duplicate_assert = smell_da(config);
    SmellReport report = run_detection("", mappings, options);
    report.diagnostics.insert(report.diagnostics.end(), diagnostics.begin(),
                              diagnostics.end());
    print_diagnostics(report.diagnostics);

    if (config.format == "json") {
        write_line_report(report, std::cout, ReportFormat::json);
    } else if (config.format == "csv") {
        write_line_report(report, std::cout, ReportFormat::csv);
    } else {
        for (const SmellInstance& inst : report.instances) print_human_instance(inst);
        std::cout << report.summary.total() << " smell instance(s): "
                  << report.summary.assertion_roulette << " AssertionRoulette, "
                  << report.summary.duplicate_assert << " DuplicateAssert\n";
    }
    return report.summary.total() ? exit_findings : exit_clean;
}

int cmd_fix(const RunConfig& config) {
    std::vector<fs::path> files;
    std::vector<Diagnostic> diagnostics;
    if (!expand_paths(config, files, diagnostics)) return exit_error;
    print_diagnostics(diagnostics);

    int total_instances = 0;
    int total_applied = 0;
    bool hard_error = false;

    for (const fs::path& path : files) {
        auto content = read_file(path);
        if (!content) {
            std::cerr << path.string() << ": " << content.detail() << '\n';
            hard_error = true;
            continue;
        }
        const std::string source = *content;
        auto model = parse_test_file(path.string(), source);
        if (!model) {
            std::cerr << model.detail() << "; file skipped\n";
            continue;
        }
        const std::vector<SmellInstance> instances =
            detect_smells(*model, smell_ar(config), smell_da(config));
        total_instances += static_cast<int>(instances.size());
        if (instances.empty()) continue;

        std::vector<PlannedFix> fixes =
            plan_fixes(*model, instances, config.message_template);
        std::vector<Patch> patches;
        int skipped = 0;
        for (PlannedFix& fix : fixes) {
            if (fix.error != errc::ok) {
                std::cout << path.string() << ':' << fix.instance.lines.front() << ": "
                          << smell_kind_name(fix.instance.kind) << " skipped ("
                          << errc_name(fix.error) << ": " << fix.error_detail << ")\n";
                ++skipped;
                continue;
            }
            for (Patch& p : fix.patches) patches.push_back(std::move(p));
        }

        const FileFixOutcome outcome =
            apply_and_write(path, source, patches, config.write);
        if (outcome.error != errc::ok) {
            std::cerr << path.string() << ": " << errc_name(outcome.error) << ": "
                      << outcome.error_detail << "; file left untouched\n";
            hard_error = true;
            continue;
        }
        for (std::size_t idx : outcome.rejected)
            std::cout << path.string() << ": patch '" << patches[idx].description
                      << "' overlapped an earlier fix and was dropped\n";

        if (config.write) {
            std::cout << path.string() << ": " << outcome.applied_patches
                      << " fix(es) applied, " << skipped << " skipped\n";
            total_applied += outcome.applied_patches;
        } else {
            std::string label = path.generic_string();
            if (!label.empty() && label.front() == '/') label.erase(0, 1);
            std::cout << unified_diff(source, outcome.new_text, "a/" + label,
                                      "b/" + label);
        }
    }
    if (hard_error) return exit_error;
    return total_instances == 0 ? exit_clean : exit_findings;
}

int cmd_review(const RunConfig& config) {
    if (!config.stdin_script && !::isatty(::fileno(stdin))) {
        std::cerr << "smellfix: review needs an interactive terminal; use "
                     "'smellfix fix --write' for unattended refactoring or "
                     "--stdin-script to drive the session from a pipe\n";
        return exit_error;
    }
    std::vector<fs::path> files;
    std::vector<Diagnostic> diagnostics;
    if (!expand_paths(config, files, diagnostics)) return exit_error;
    print_diagnostics(diagnostics);

    ReviewOptions options;
    options.assertion_roulette = smell_ar(config);
    options.duplicate_assert = smell_da(config);
    options.message_template = config.message_template;
    const ReviewOutcome outcome = run_review(files, options, std::cin, std::cout);
    print_diagnostics(outcome.diagnostics);
    std::cout << outcome.accepted << " accepted, " << outcome.skipped << " skipped\n";
    return exit_clean;
}

int cmd_pipeline(const RunConfig& config) {
    const fs::path root = config.paths.front();
    std::string project = config.project;
    if (project.empty()) {
        project = fs::absolute(root).filename().string();
        if (project.empty()) project = "project";
    }
    DetectionOptions options;
    options.assertion_roulette = smell_ar(config);
    options.duplicate_assert = smell_da(config);
    options.jobs = config.jobs;
    const ReportFormat format =
        config.format == "csv" ? ReportFormat::csv : ReportFormat::json;

    auto outcome = run_pipeline(root, config.out_dir, project, options, format);
    if (!outcome) {
        std::cerr << "smellfix: " << errc_name(outcome.error()) << ": "
                  << outcome.detail() << '\n';
        return exit_error;
    }
    print_diagnostics(outcome->report.diagnostics);
    for (const fs::path& artifact : outcome->artifacts)
        std::cout << artifact.generic_string() << '\n';
    std::cout << outcome->report.summary.assertion_roulette << " AssertionRoulette, "
              << outcome->report.summary.duplicate_assert << " DuplicateAssert in "
              << outcome->mappings.size() << " test file(s)\n";
    return exit_clean;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"detect and refactor Assertion Roulette / Duplicate Assert "
                 "test smells in JUnit 4 sources"};
    app.require_subcommand(1);

    RunConfig config;
    config.message_template = default_template();

    const auto add_smell = [&config](CLI::App* cmd) {
        cmd->add_option("--smell", config.smell, "smell to handle: ar, da, or all")
            ->check(CLI::IsMember({"ar", "da", "all"}))
            ->default_str("all");
    };

    CLI::App* detect = app.add_subcommand("detect", "report smells with exact lines");
    detect->add_option("paths", config.paths, "test files or directories")->required();
    add_smell(detect);
    detect->add_option("--format", config.format, "output format: human, json, or csv")
        ->check(CLI::IsMember({"human", "json", "csv"}))
        ->default_str("human");

    CLI::App* fix = app.add_subcommand("fix", "refactor smells (dry-run by default)");
    fix->add_option("paths", config.paths, "test files or directories")->required();
    add_smell(fix);
    fix->add_flag("--write", config.write, "apply fixes in place instead of printing diffs");
    fix->add_option("--message", config.message_template,
                    "assertion message template; {method} and {line} are expanded");

    CLI::App* review = app.add_subcommand("review", "accept or skip each fix interactively");
    review->add_option("paths", config.paths, "test files or directories")->required();
    add_smell(review);
    review->add_option("--message", config.message_template,
                       "default message template offered for each acceptance");
    review->add_flag("--stdin-script", config.stdin_script,
                     "read review answers from standard input (for scripting)");

    CLI::App* pipeline = app.add_subcommand(
        "pipeline", "batch scan: discover tests, map to production files, emit CSV reports");
    pipeline->add_option("root", config.paths, "project root directory")
        ->required()
        ->expected(1);
    pipeline->add_option("--out", config.out_dir, "output directory for the artifacts")
        ->required();
    add_smell(pipeline);
    pipeline->add_option("--format", config.format,
                         "line report format: json (default) or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->default_str("json");
    pipeline->add_option("--project", config.project,
                         "project name for the CSV rows (default: root directory name)");
    pipeline->add_option("--jobs", config.jobs, "parallel detection workers")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    if (detect->parsed()) return cmd_detect(config);
    if (fix->parsed()) return cmd_fix(config);
    if (review->parsed()) return cmd_review(config);
    return cmd_pipeline(config);
}
