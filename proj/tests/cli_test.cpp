#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "smellfix/parser.hpp"
#include "test_util.hpp"

using testutil::run_cli;
namespace fs = std::filesystem;

TEST_CASE("detect: findings and exit codes") {
    testutil::TempDir dir("cli-detect");
    const auto roulette = dir.file("TestAbstractPartial.java", fixtures::roulette_file());

    SUBCASE("smelly file exits 1 with three findings") {
        const auto r = run_cli({"detect", "--smell", "ar", roulette.string()});
        CHECK(r.exit_code == 1);
        CHECK(r.out.find(":93: AssertionRoulette") != std::string::npos);
        CHECK(r.out.find(":94: AssertionRoulette") != std::string::npos);
        CHECK(r.out.find(":95: AssertionRoulette") != std::string::npos);
        CHECK(r.out.find("3 smell instance(s)") != std::string::npos);
    }

    SUBCASE("clean file exits 0 with no findings") {
        const auto clean = dir.file("TestClean.java",
                                    "public class TestClean {\n"
                                    "    public void testOk() {\n"
                                    "        assertEquals(\"size\", 2, x);\n"
                                    "    }\n"
                                    "}\n");
        const auto r = run_cli({"detect", clean.string()});
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("AssertionRoulette:") == std::string::npos);
    }

    SUBCASE("missing path exits 2") {
        const auto r = run_cli({"detect", (dir.path / "nope.java").string()});
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("no such file") != std::string::npos);
    }

    SUBCASE("json output is machine-readable") {
        const auto r = run_cli({"detect", "--format", "json", roulette.string()});
        CHECK(r.exit_code == 1);
        const auto parsed = nlohmann::json::parse(r.out);
        REQUIRE(parsed.is_array());
        REQUIRE(parsed.size() == 3);
        CHECK(parsed[0]["kind"] == "AssertionRoulette");
        CHECK(parsed[0]["method"] == "testGetValues");
        CHECK(parsed[0]["lines"][0] == 93);
        CHECK(parsed[0]["group_key"].is_null());
    }
}

TEST_CASE("fix: dry run shows a diff and touches nothing") {
    testutil::TempDir dir("cli-dry");
    const std::string before = fixtures::roulette_file();
    const auto path = dir.file("TestAbstractPartial.java", before);
    const auto r = run_cli({"fix", "--smell", "ar", path.string()});
    CHECK(r.exit_code == 1);  // pending fixes
    CHECK(r.out.find("--- a/") != std::string::npos);
    CHECK(r.out.find("+++ b/") != std::string::npos);
    CHECK(r.out.find("Add Assertion Explanation here") != std::string::npos);
    CHECK(testutil::read_all(path) == before);
}

TEST_CASE("fix --write: messages land, second run is clean") {
    testutil::TempDir dir("cli-fix");
    const auto path = dir.file("TestAbstractPartial.java", fixtures::roulette_file());

    const auto first = run_cli({"fix", "--smell", "ar", "--write", path.string()});
    CHECK(first.exit_code == 1);
    CHECK(first.out.find("3 fix(es) applied") != std::string::npos);
    const std::string fixed = testutil::read_all(path);
    CHECK(fixed.find("assertEquals(\"Add Assertion Explanation here\", 2, vals.length);") !=
          std::string::npos);

    const auto second = run_cli({"fix", "--smell", "ar", "--write", path.string()});
    CHECK(second.exit_code == 0);
    CHECK(testutil::read_all(path) == fixed);
}

TEST_CASE("fix --write extracts the duplicated assertion") {
    testutil::TempDir dir("cli-da");
    const auto path = dir.file("TestPeriodFormatterBuilder.java", fixtures::duplicate_file());
    const auto r = run_cli({"fix", "--smell", "da", "--write", path.string()});
    CHECK(r.exit_code == 1);
    const std::string fixed = testutil::read_all(path);
    CHECK(fixed.find("testPluralAffixParseOrderExtracted()") != std::string::npos);
    CHECK(fixed.find("/*  Extracted Method  */") != std::string::npos);

    const auto recheck = run_cli({"detect", "--smell", "da", path.string()});
    CHECK(recheck.exit_code == 0);
}

TEST_CASE("fix honors the SMELLFIX_MESSAGE environment template") {
    testutil::TempDir dir("cli-env");
    const auto path = dir.file("TestAbstractPartial.java", fixtures::roulette_file());
    const auto r = run_cli({"fix", "--smell", "ar", "--write", path.string()}, "",
                           {"SMELLFIX_MESSAGE='see {method} line {line}'"});
    CHECK(r.exit_code == 1);
    CHECK(testutil::read_all(path).find(
              "assertEquals(\"see testGetValues line 93\", 2, vals.length);") !=
          std::string::npos);
}

TEST_CASE("review without a terminal refuses and advises fix --write") {
    testutil::TempDir dir("cli-notty");
    const auto path = dir.file("TestAbstractPartial.java", fixtures::roulette_file());
    const auto r = run_cli({"review", path.string()});  // stdin is a file, not a tty
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("fix --write") != std::string::npos);
}

TEST_CASE("review --stdin-script: skip all leaves the file alone") {
    testutil::TempDir dir("cli-skip");
    const std::string before = fixtures::roulette_file();
    const auto path = dir.file("TestAbstractPartial.java", before);
    const auto r = run_cli({"review", "--stdin-script", "--smell", "ar", path.string()},
                           "s\ns\ns\n");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("0 accepted, 3 skipped") != std::string::npos);
    CHECK(testutil::read_all(path) == before);
}

TEST_CASE("review --stdin-script: accepting one fix leaves two instances") {
    testutil::TempDir dir("cli-one");
    const auto path = dir.file("TestAbstractPartial.java", fixtures::roulette_file());
    const auto r = run_cli({"review", "--stdin-script", "--smell", "ar", path.string()},
                           "y\n\ns\ns\n");  // accept first, default message, skip rest
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("1 accepted, 2 skipped") != std::string::npos);

    const auto recheck =
        run_cli({"detect", "--smell", "ar", "--format", "json", path.string()});
    CHECK(recheck.exit_code == 1);
    const auto parsed = nlohmann::json::parse(recheck.out);
    CHECK(parsed.size() == 2);
}

TEST_CASE("review accept-all equals fix --write byte for byte") {
    testutil::TempDir dir("cli-equiv");
    const auto via_review = dir.file("review/TestSuite.java", fixtures::experiment_file());
    const auto via_fix = dir.file("fix/TestSuite.java", fixtures::experiment_file());

    const auto r1 = run_cli({"review", "--stdin-script", via_review.string()}, "a\n");
    CHECK(r1.exit_code == 0);
    const auto r2 = run_cli({"fix", "--write", via_fix.string()});
    CHECK(r2.exit_code == 1);
    CHECK(testutil::read_all(via_review) == testutil::read_all(via_fix));
}

TEST_CASE("review with custom messages reproduces the documented refactoring") {
    testutil::TempDir dir("cli-msgs");
    const auto path = dir.file("TestAbstractPartial.java", fixtures::roulette_file());
    const std::string script =
        "y\nVals size 2\n"
        "y\nYear Equal 1970\n"
        "y\nMonth 1\n";
    const auto r = run_cli({"review", "--stdin-script", "--smell", "ar", path.string()},
                           script);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("3 fix(es) applied") != std::string::npos);

    auto model = smellfix::parse_test_file(path.string(), testutil::read_all(path));
    REQUIRE(model);
    CHECK(testutil::significant_tokens(testutil::method_text(*model, "testGetValues")) ==
          testutil::significant_tokens(fixtures::roulette_fixed_method()));
}

TEST_CASE("pipeline subcommand writes the csv artifacts deterministically") {
    testutil::TempDir dir("cli-pipe");
    dir.file("project/TestAbstractPartial.java", fixtures::roulette_file());
    dir.file("project/TestPeriodFormatterBuilder.java", fixtures::duplicate_file());
    dir.file("project/AbstractPartial.java", "public class AbstractPartial {}\n");

    const auto first = run_cli({"pipeline", (dir.path / "project").string(), "--out",
                                (dir.path / "out").string(), "--project", "joda"});
    CHECK(first.exit_code == 0);
    for (const char* name : {"tests.csv", "classes.csv", "results.csv", "line_report.json"})
        CHECK(fs::exists(dir.path / "out" / name));
    CHECK(first.out.find("results.csv") != std::string::npos);

    const std::string snapshot = testutil::read_all(dir.path / "out" / "results.csv");
    const auto rerun = run_cli({"pipeline", (dir.path / "project").string(), "--out",
                                (dir.path / "out").string(), "--project", "joda"});
    CHECK(rerun.exit_code == 0);
    CHECK(testutil::read_all(dir.path / "out" / "results.csv") == snapshot);
}

TEST_CASE("pipeline over an empty project exits 0") {
    testutil::TempDir dir("cli-pipe-empty");
    fs::create_directories(dir.path / "project");
    const auto r = run_cli({"pipeline", (dir.path / "project").string(), "--out",
                            (dir.path / "out").string()});
    CHECK(r.exit_code == 0);
    CHECK(testutil::read_all(dir.path / "out" / "results.csv") ==
          "project,test_path,production_path,AssertionRoulette,DuplicateAssert\n");
}

TEST_CASE("directories passed to detect are scanned for test files") {
    testutil::TempDir dir("cli-dir");
    dir.file("tree/TestAbstractPartial.java", fixtures::roulette_file());
    dir.file("tree/Helper.java", "public class Helper {}\n");
    const auto r =
        run_cli({"detect", "--smell", "ar", "--format", "csv", (dir.path / "tree").string()});
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("TestAbstractPartial.java") != std::string::npos);
    CHECK(r.out.find("Helper.java") == std::string::npos);
}
