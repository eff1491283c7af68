#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracle.hpp"
#include "smellfix/fixer.hpp"
#include "smellfix/refactor.hpp"
#include "test_util.hpp"

using namespace smellfix;

namespace {

struct Fixed {
    std::string text;
    std::vector<std::size_t> rejected;
};

/// Detect + plan + apply over a source buffer; failures in planning are
/// skipped exactly like the CLI does.
Fixed fix_source(const std::string& path, const std::string& src, bool ar, bool da,
                 std::string_view tpl = default_explanation_message) {
    auto model = parse_test_file(path, src);
    REQUIRE(model);
    const auto instances = detect_smells(*model, ar, da);
    auto fixes = plan_fixes(*model, instances, tpl);
    std::vector<Patch> patches;
    for (auto& fix : fixes)
        for (Patch& p : fix.patches) patches.push_back(std::move(p));
    ApplyOutcome outcome = apply_patches(src, patches);
    REQUIRE(outcome.error == errc::ok);
    return Fixed{outcome.text, outcome.rejected};
}

const AssertionCall& first_assertion(const TestFileModel& model, std::string_view method) {
    const MethodDecl* m = testutil::find_method(model, method);
    REQUIRE(m != nullptr);
    for (const Statement& st : m->statements)
        if (st.assertion) return *st.assertion;
    static AssertionCall none;
    REQUIRE(false);
    return none;
}

/// Assertion identity without the message slot, for the AR preservation
/// property.
std::string value_signature(const AssertionCall& call) {
    const auto& overloads = assertion_overload_table().at(call.method_name);
    const int n = static_cast<int>(call.args.size());
    const bool message_arity =
        std::find(overloads.with_message.begin(), overloads.with_message.end(), n) !=
        overloads.with_message.end();
    std::size_t skip = 0;
    if (message_arity &&
        (call.has_message || (!call.args.empty() && call.args.front().is_string_literal)))
        skip = 1;
    std::string sig = call.method_name + "(";
    for (std::size_t i = skip; i < call.args.size(); ++i) {
        if (i > skip) sig += ',';
        sig += normalize_arg(call.args[i].text);
    }
    sig += ')';
    return sig;
}

std::map<std::string, std::multiset<std::string>> per_method_value_signatures(
    const TestFileModel& model) {
    std::map<std::string, std::multiset<std::string>> sigs;
    for (const ClassDecl& cls : model.classes)
        for (const MethodDecl& m : cls.methods)
            for (const AssertionCall& c : extract_assertions(m))
                sigs[cls.name + "." + m.name].insert(value_signature(c));
    return sigs;
}

/// Method name with a trailing Extracted/ExtractedN stripped, so extracted
/// methods fold back onto their source method.
std::string base_method_name(const std::string& name) {
    const std::size_t pos = name.rfind("Extracted");
    if (pos == std::string::npos || pos == 0) return name;
    const std::string suffix = name.substr(pos + 9);
    if (!suffix.empty() && suffix.find_first_not_of("0123456789") != std::string::npos)
        return name;
    return name.substr(0, pos);
}

std::map<std::string, std::multiset<std::string>> per_base_method_full_signatures(
    const TestFileModel& model) {
    std::map<std::string, std::multiset<std::string>> sigs;
    for (const ClassDecl& cls : model.classes)
        for (const MethodDecl& m : cls.methods)
            for (const AssertionCall& c : extract_assertions(m))
                sigs[cls.name + "." + base_method_name(m.name)].insert(
                    duplicate_group_key(c));
    return sigs;
}

}  // namespace

TEST_CASE("message insertion produces the documented call shape") {
    auto model = parse_test_file("t.java", fixtures::roulette_file());
    REQUIRE(model);
    const AssertionCall& call = first_assertion(*model, "testGetValues");
    auto patch = plan_ar_fix(call);
    REQUIRE(patch);
    ApplyOutcome out = apply_patches(model->raw_text, {*patch});
    REQUIRE(out.error == errc::ok);
    CHECK(out.text.find(
              "assertEquals(\"Add Assertion Explanation here\", 2, vals.length);") !=
          std::string::npos);
}

TEST_CASE("already documented assertions refuse a second message") {
    const std::string src =
        "class T { public void testX() {\n"
        "    assertEquals(\"Vals size 2\", 2, vals.length);\n"
        "} }\n";
    auto model = parse_test_file("t.java", src);
    REQUIRE(model);
    const AssertionCall& call = first_assertion(*model, "testX");
    auto patch = plan_ar_fix(call);
    REQUIRE_FALSE(patch);
    CHECK(patch.error() == errc::already_documented);
}

TEST_CASE("a blank message literal is replaced, not duplicated") {
    const std::string src =
        "class T { public void testX() {\n"
        "    assertEquals(\" \", 2, x);\n"
        "} }\n";
    auto model = parse_test_file("t.java", src);
    REQUIRE(model);
    const AssertionCall& call = first_assertion(*model, "testX");
    auto patch = plan_ar_fix(call);
    REQUIRE(patch);
    ApplyOutcome out = apply_patches(model->raw_text, {*patch});
    REQUIRE(out.error == errc::ok);
    CHECK(out.text.find("assertEquals(\"Add Assertion Explanation here\", 2, x);") !=
          std::string::npos);

    auto reparsed = parse_test_file("t.java", out.text);
    REQUIRE(reparsed);
    const AssertionCall& fixed = first_assertion(*reparsed, "testX");
    CHECK(fixed.args.size() == 3);  // replacement keeps the argument count
    CHECK(fixed.has_message);
}

TEST_CASE("a bare fail() receives the message as its only argument") {
    const std::string src =
        "class T { public void testX() {\n"
        "    fail();\n"
        "} }\n";
    auto model = parse_test_file("t.java", src);
    REQUIRE(model);
    const AssertionCall& call = first_assertion(*model, "testX");
    auto patch = plan_ar_fix(call, "unreachable");
    REQUIRE(patch);
    ApplyOutcome out = apply_patches(model->raw_text, {*patch});
    REQUIRE(out.error == errc::ok);
    CHECK(out.text.find("fail(\"unreachable\");") != std::string::npos);
}

TEST_CASE("message template expands method and line") {
    CHECK(expand_message_template("in {method} at line {line}", "testGetValues", 93) ==
          "in testGetValues at line 93");
    auto model = parse_test_file("t.java", fixtures::roulette_file());
    REQUIRE(model);
    const auto instances = detect_smells(*model, true, false);
    auto fixes = plan_fixes(*model, instances, "check {method}:{line}");
    REQUIRE(fixes.size() == 3);
    std::vector<Patch> patches;
    for (auto& f : fixes)
        for (auto& p : f.patches) patches.push_back(p);
    ApplyOutcome out = apply_patches(model->raw_text, patches);
    REQUIRE(out.error == errc::ok);
    CHECK(out.text.find("assertEquals(\"check testGetValues:93\", 2, vals.length);") !=
          std::string::npos);
}

TEST_CASE("quoted messages escape special characters") {
    CHECK(quote_java_string("say \"hi\"\\now") == "\"say \\\"hi\\\"\\\\now\"");
}

TEST_CASE("extraction plan for the duplicate fixture matches the reference shape") {
    auto model = parse_test_file("t.java", fixtures::duplicate_file());
    REQUIRE(model);
    const auto instances = detect_smells(*model, false, true);
    REQUIRE(instances.size() == 1);
    const auto [cls, method] = find_method_of(*model, instances[0]);
    REQUIRE(cls != nullptr);
    REQUIRE(method != nullptr);

    std::set<std::string> reserved;
    auto plan = plan_da_fix(*cls, *method, instances[0], 2, reserved);
    REQUIRE(plan);
    CHECK(plan->new_method_name == "testPluralAffixParseOrderExtracted");
    CHECK(plan->moved_statements == std::vector<int>{4, 5});
    CHECK(plan->copied_declarations == std::vector<int>{0, 1});  // f, twoDays
    REQUIRE(plan->converted_assignments.size() == 1);
    CHECK(plan->converted_assignments[0].first == 4);
    CHECK(plan->converted_assignments[0].second == "Period");
}

TEST_CASE("rendered extraction is token-identical to the reference refactoring") {
    const std::string src = fixtures::duplicate_file();
    Fixed fixed = fix_source("t.java", src, false, true);
    CHECK(fixed.rejected.empty());

    auto reparsed = parse_test_file("t.java", fixed.text);
    REQUIRE(reparsed);

    // the original method keeps everything through the first assertEquals
    CHECK(testutil::significant_tokens(
              testutil::method_text(*reparsed, "testPluralAffixParseOrder")) ==
          testutil::significant_tokens(fixtures::duplicate_fixed_original()));

    // the extracted method, comment included, matches
    const MethodDecl* extracted =
        testutil::find_method(*reparsed, "testPluralAffixParseOrderExtracted");
    REQUIRE(extracted != nullptr);
    const std::size_t comment =
        fixed.text.rfind("/*  Extracted Method  */", extracted->decl_span.start_byte);
    REQUIRE(comment != std::string::npos);
    const std::string actual =
        fixed.text.substr(comment, extracted->decl_span.end_byte - comment);
    CHECK(testutil::significant_tokens(actual) ==
          testutil::significant_tokens(fixtures::duplicate_extracted_expected()));
}

TEST_CASE("simple duplicate: copied declaration, no conversion") {
    const std::string src =
        "class T {\n"
        "    public void testA() {\n"
        "        int x = 1;\n"
        "        assertTrue(x > 0);\n"
        "        assertTrue(x > 0);\n"
        "    }\n"
        "}\n";
    auto model = parse_test_file("t.java", src);
    REQUIRE(model);
    const auto instances = detect_smells(*model, false, true);
    REQUIRE(instances.size() == 1);
    const auto [cls, method] = find_method_of(*model, instances[0]);
    std::set<std::string> reserved;
    auto plan = plan_da_fix(*cls, *method, instances[0], 2, reserved);
    REQUIRE(plan);
    CHECK(plan->moved_statements == std::vector<int>{2});
    CHECK(plan->copied_declarations == std::vector<int>{0});
    CHECK(plan->converted_assignments.empty());
    CHECK(plan->new_method_name == "testAExtracted");
}

TEST_CASE("three occurrences yield two plans with suffixed names") {
    const std::string src =
        "class T {\n"
        "    public void testTri() {\n"
        "        assertEquals(1, x);\n"
        "        assertEquals(1, x);\n"
        "        assertEquals(1, x);\n"
        "    }\n"
        "}\n";
    auto model = parse_test_file("t.java", src);
    REQUIRE(model);
    const auto instances = detect_smells(*model, false, true);
    REQUIRE(instances.size() == 1);
    REQUIRE(instances[0].assertions.size() == 3);
    auto fixes = plan_fixes(*model, instances);
    REQUIRE(fixes.size() == 1);
    CHECK(fixes[0].error == errc::ok);
    REQUIRE(fixes[0].patches.size() == 2);
    CHECK(fixes[0].patches[0].description.find("testTriExtracted'") != std::string::npos);
    CHECK(fixes[0].patches[1].description.find("testTriExtracted2'") != std::string::npos);

    Fixed fixed = fix_source("t.java", src, false, true);
    CHECK(fixed.rejected.empty());
    auto reparsed = parse_test_file("t.java", fixed.text);
    REQUIRE(reparsed);
    CHECK(testutil::find_method(*reparsed, "testTriExtracted") != nullptr);
    CHECK(testutil::find_method(*reparsed, "testTriExtracted2") != nullptr);
    CHECK(detect_duplicate_assert(*reparsed).empty());
}

TEST_CASE("nested group members are non-extractable") {
    const std::string src =
        "class T {\n"
        "    public void testN() {\n"
        "        assertEquals(1, x);\n"
        "        if (y) { assertEquals(1, x); }\n"
        "    }\n"
        "}\n";
    auto model = parse_test_file("t.java", src);
    REQUIRE(model);
    const MethodDecl* method = testutil::find_method(*model, "testN");
    REQUIRE(method != nullptr);
    REQUIRE(method->nested_assertions.size() == 1);
    REQUIRE(method->statements[0].assertion);

    SmellInstance group;
    group.kind = SmellKind::duplicate_assert;
    group.method_name = "testN";
    group.class_name = "T";
    group.assertions = {*method->statements[0].assertion, method->nested_assertions[0]};
    group.lines = {3, 4};
    group.group_key = "assertEquals(1,x)";

    std::set<std::string> reserved;
    auto plan = plan_da_fix(model->classes[0], *method, group, 2, reserved);
    REQUIRE_FALSE(plan);
    CHECK(plan.error() == errc::non_extractable);
}

TEST_CASE("a pre-region mutation blocks faithful declaration copying") {
    const std::string src =
        "class T {\n"
        "    public void testMut() {\n"
        "        int x = 1;\n"
        "        x = 2;\n"
        "        assertEquals(x, 5);\n"
        "        helper.go();\n"
        "        assertEquals(x, 5);\n"
        "    }\n"
        "}\n";
    auto model = parse_test_file("t.java", src);
    REQUIRE(model);
    const auto instances = detect_smells(*model, false, true);
    REQUIRE(instances.size() == 1);
    auto fixes = plan_fixes(*model, instances);
    REQUIRE(fixes.size() == 1);
    CHECK(fixes[0].error == errc::missing_declaration);
    CHECK(fixes[0].patches.empty());
}

TEST_CASE("reads after the region keep the plan from tearing the method apart") {
    const std::string src =
        "class T {\n"
        "    public void testPost() {\n"
        "        int y = 1;\n"
        "        assertTrue(y > 0);\n"
        "        y = 5;\n"
        "        assertTrue(y > 0);\n"
        "        assertEquals(6, y + 1);\n"
        "    }\n"
        "}\n";
    auto model = parse_test_file("t.java", src);
    REQUIRE(model);
    const auto instances = detect_smells(*model, false, true);
    REQUIRE(instances.size() == 1);
    auto fixes = plan_fixes(*model, instances);
    REQUIRE(fixes.size() == 1);
    CHECK(fixes[0].error == errc::missing_declaration);
}

TEST_CASE("a later plain overwrite shadows the moved assignment") {
    const std::string src =
        "class T {\n"
        "    public void testShadow() {\n"
        "        Period p = base();\n"
        "        p = f.parse(a);\n"
        "        assertEquals(Period.days(2), p);\n"
        "        p = f.parse(b);\n"
        "        assertEquals(Period.days(2), p);\n"
        "        p = f.parse(c);\n"
        "        assertEquals(Period.days(2), p);\n"
        "    }\n"
        "}\n";
    auto model = parse_test_file("t.java", src);
    REQUIRE(model);
    const auto instances = detect_smells(*model, false, true);
    REQUIRE(instances.size() == 1);
    REQUIRE(instances[0].assertions.size() == 3);
    auto fixes = plan_fixes(*model, instances);
    REQUIRE(fixes.size() == 1);
    REQUIRE(fixes[0].error == errc::ok);
    CHECK(fixes[0].patches.size() == 2);

    Fixed fixed = fix_source("t.java", src, false, true);
    CHECK(fixed.rejected.empty());
    auto reparsed = parse_test_file("t.java", fixed.text);
    REQUIRE(reparsed);
    CHECK(detect_duplicate_assert(*reparsed).empty());
    // both extracted methods re-declare p from the original declaration's type
    const std::string& text = fixed.text;
    CHECK(text.find("Period p = f.parse(b);") != std::string::npos);
    CHECK(text.find("Period p = f.parse(c);") != std::string::npos);
}

TEST_CASE("extracted methods inherit the original's annotations") {
    const std::string src =
        "class T {\n"
        "    @Test\n"
        "    public void testAnn() {\n"
        "        assertEquals(1, q);\n"
        "        assertEquals(1, q);\n"
        "    }\n"
        "}\n";
    Fixed fixed = fix_source("t.java", src, false, true);
    auto reparsed = parse_test_file("t.java", fixed.text);
    REQUIRE(reparsed);
    const MethodDecl* extracted = testutil::find_method(*reparsed, "testAnnExtracted");
    REQUIRE(extracted != nullptr);
    REQUIRE(extracted->annotations.size() == 1);
    CHECK(extracted->annotations[0] == "@Test");
    CHECK(extracted->is_test);
}

TEST_CASE("planning the same instance twice renders byte-identical patches") {
    auto model = parse_test_file("t.java", fixtures::duplicate_file());
    REQUIRE(model);
    const auto instances = detect_smells(*model, true, true);
    auto once = plan_fixes(*model, instances);
    auto twice = plan_fixes(*model, instances);
    REQUIRE(once.size() == twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
        REQUIRE(once[i].patches.size() == twice[i].patches.size());
        for (std::size_t p = 0; p < once[i].patches.size(); ++p) {
            const Patch& a = once[i].patches[p];
            const Patch& b = twice[i].patches[p];
            REQUIRE(a.edits.size() == b.edits.size());
            for (std::size_t e = 0; e < a.edits.size(); ++e) {
                CHECK(a.edits[e].span.start_byte == b.edits[e].span.start_byte);
                CHECK(a.edits[e].span.end_byte == b.edits[e].span.end_byte);
                CHECK(a.edits[e].replacement == b.edits[e].replacement);
            }
        }
    }
}

TEST_CASE("apply_patches: identity, overlap rejection, reparse failure") {
    const std::string src = fixtures::roulette_file();

    SUBCASE("empty patch list returns the input") {
        ApplyOutcome out = apply_patches(src, {});
        CHECK(out.error == errc::ok);
        CHECK(out.text == src);
    }

    SUBCASE("overlapping patches keep the earlier one") {
        const std::size_t at = src.find("assertEquals(2");
        Patch first{"t.java", {Edit{Span{at, at + 12}, "assertSame(9"}}, "first", {}};
        Patch second{"t.java", {Edit{Span{at + 6, at + 18}, "boom"}}, "second", {}};
        ApplyOutcome out = apply_patches(src, {first, second});
        CHECK(out.error == errc::ok);
        REQUIRE(out.rejected == std::vector<std::size_t>{1});
        CHECK(out.text.find("assertSame(9") != std::string::npos);
        CHECK(out.text.find("boom") == std::string::npos);
    }

    SUBCASE("a patch that breaks the parse aborts and returns the original") {
        const std::size_t brace = src.rfind('}');
        Patch bad{"t.java", {Edit{Span{brace, brace + 1}, ""}}, "break braces", {}};
        ApplyOutcome out = apply_patches(src, {bad});
        CHECK(out.error == errc::reparse_failure);
        CHECK(out.text == src);
    }
}

TEST_CASE("apply_and_write leaves the original bytes on reparse failure") {
    testutil::TempDir dir("restore");
    const std::string src = fixtures::roulette_file();
    const auto path = dir.file("TestAbstractPartial.java", src);

    const std::size_t brace = src.rfind('}');
    Patch bad{path.string(), {Edit{Span{brace, brace + 1}, ""}}, "break braces", {}};
    FileFixOutcome out = apply_and_write(path, src, {bad}, /*write=*/true);
    CHECK(out.error == errc::reparse_failure);
    CHECK(testutil::read_all(path) == src);
}

TEST_CASE("fix-point on the reference fixtures") {
    SUBCASE("assertion roulette") {
        Fixed fixed = fix_source("t.java", fixtures::roulette_file(), true, false);
        auto reparsed = parse_test_file("t.java", fixed.text);
        REQUIRE(reparsed);
        CHECK(detect_assertion_roulette(*reparsed).empty());
    }
    SUBCASE("duplicate assert") {
        Fixed fixed = fix_source("t.java", fixtures::duplicate_file(), false, true);
        auto reparsed = parse_test_file("t.java", fixed.text);
        REQUIRE(reparsed);
        CHECK(detect_duplicate_assert(*reparsed).empty());
    }
    SUBCASE("both kinds on disjoint methods in one file") {
        Fixed fixed = fix_source("t.java", fixtures::experiment_file(), true, true);
        auto reparsed = parse_test_file("t.java", fixed.text);
        REQUIRE(reparsed);
        CHECK(detect_assertion_roulette(*reparsed).empty());
        CHECK(detect_duplicate_assert(*reparsed).empty());
    }
}

TEST_CASE("combined fixes on one method: overlap resolves toward the fix-point") {
    // the duplicated pair is undocumented, so the method is AR and DA at
    // once; the extraction region swallows the second assertion and the AR
    // patch aimed at it is dropped as overlapping
    Fixed fixed = fix_source("t.java", fixtures::duplicate_file(), true, true);
    CHECK(fixed.rejected.size() == 1);
    auto reparsed = parse_test_file("t.java", fixed.text);
    REQUIRE(reparsed);
    CHECK(detect_assertion_roulette(*reparsed).empty());
    CHECK(detect_duplicate_assert(*reparsed).empty());
    CHECK(fixed.text.find(
              "assertEquals(\"Add Assertion Explanation here\", Period.days(2), period);") !=
          std::string::npos);
}

TEST_CASE("preservation and fix-point across the generated corpus") {
    const auto corpus = oracle::make_corpus(31337, 12, 6);
    int da_fixpoint_checked = 0;
    for (const oracle::PlantedFile& file : corpus) {
        const std::string path = file.class_name + ".java";
        auto before = parse_test_file(path, file.source);
        REQUIRE(before);

        // AR fixes preserve the per-method value signatures
        {
            Fixed fixed = fix_source(path, file.source, true, false);
            auto after = parse_test_file(path, fixed.text);
            REQUIRE(after);
            CHECK(per_method_value_signatures(*before) ==
                  per_method_value_signatures(*after));
            CHECK(detect_assertion_roulette(*after).empty());
        }

        // DA fixes preserve full signatures over original + extracted methods
        {
            Fixed fixed = fix_source(path, file.source, false, true);
            auto after = parse_test_file(path, fixed.text);
            REQUIRE(after);
            CHECK(per_base_method_full_signatures(*before) ==
                  per_base_method_full_signatures(*after));

            // slice closure: whatever an extracted method reads is either
            // declared in its own body or was never a local of the original
            for (const ClassDecl& cls : after->classes) {
                for (const MethodDecl& m : cls.methods) {
                    const std::string base = base_method_name(m.name);
                    if (base == m.name) continue;
                    const MethodDecl* original = testutil::find_method(*before, base);
                    REQUIRE(original != nullptr);
                    std::set<std::string> original_locals;
                    for (const Statement& st : original->statements)
                        for (const std::string& n : st.declared_names)
                            original_locals.insert(n);
                    std::set<std::string> own_locals;
                    for (const Statement& st : m.statements)
                        for (const std::string& n : st.declared_names)
                            own_locals.insert(n);
                    for (const Statement& st : m.statements)
                        for (const std::string& used : st.used_vars)
                            if (original_locals.count(used)) CHECK(own_locals.count(used));
                }
            }
            if (fixed.rejected.empty()) {
                CHECK(detect_duplicate_assert(*after).empty());
                ++da_fixpoint_checked;
            } else {
                // interleaved groups: iterated fixing must reach the fix-point
                std::string text = fixed.text;
                for (int round = 0; round < 8; ++round) {
                    auto model = parse_test_file(path, text);
                    REQUIRE(model);
                    if (detect_duplicate_assert(*model).empty()) break;
                    text = fix_source(path, text, false, true).text;
                }
                auto final_model = parse_test_file(path, text);
                REQUIRE(final_model);
                CHECK(detect_duplicate_assert(*final_model).empty());
            }
        }
    }
    CHECK(da_fixpoint_checked > 0);
}

TEST_CASE("structural safety: every fixed corpus file re-parses") {
    const auto corpus = oracle::make_corpus(555, 8, 5);
    for (const oracle::PlantedFile& file : corpus) {
        const std::string path = file.class_name + ".java";
        Fixed fixed = fix_source(path, file.source, true, true);
        auto reparsed = parse_test_file(path, fixed.text);
        CHECK(reparsed);
    }
}
