#pragma once

#include <string>
#include <string_view>

// Reference fixtures modelled on real Joda-Time test methods. Line
// positions matter: the undocumented assertions sit on lines 93-95, the
// duplicated pair on lines 361 and 363.

namespace fixtures {

namespace detail {

struct Builder {
    std::string text;
    int line = 1;

    void emit(std::string_view t) {
        text += t;
        text += '\n';
        ++line;
    }
    void pad_to(int target) {
        while (line < target) emit("// padding");
    }
};

}  // namespace detail

/// TestAbstractPartial (abridged): one test method, three assertEquals
/// without messages at lines 93-95.
inline std::string roulette_file() {
    detail::Builder b;
    b.emit("// Fixture: abridged Joda-Time partial test class");
    b.emit("package org.joda.time;");
    b.emit("");
    b.emit("import junit.framework.TestCase;");
    b.pad_to(88);
    b.emit("public class TestAbstractPartial extends TestCase {");  // 88
    b.emit("");                                                     // 89
    b.emit("    public void testGetValues() throws Throwable {");   // 90
    b.emit("        MockPartial mock = new MockPartial();");        // 91
    b.emit("        int[] vals = mock.getValues();");               // 92
    b.emit("        assertEquals(2, vals.length);");                // 93
    b.emit("        assertEquals(1970, vals[0]);");                 // 94
    b.emit("        assertEquals(1, vals[1]);");                    // 95
    b.emit("    }");                                                // 96
    b.emit("}");                                                    // 97
    return b.text;
}

/// The same method once every assertion carries its explanation message.
inline std::string roulette_fixed_method() {
    return "public void testGetValues() throws Throwable {\n"
           "    MockPartial mock = new MockPartial();\n"
           "    int[] vals = mock.getValues();\n"
           "    assertEquals(\"Vals size 2\", 2, vals.length);\n"
           "    assertEquals(\"Year Equal 1970\", 1970, vals[0]);\n"
           "    assertEquals(\"Month 1\", 1, vals[1]);\n"
           "}";
}

/// TestPeriodFormatterBuilder (abridged): one test method with the same
/// assertEquals twice, lines 361 and 363.
inline std::string duplicate_file() {
    detail::Builder b;
    b.emit("// Fixture: abridged Joda-Time period formatter test class");
    b.emit("package org.joda.time.format;");
    b.emit("");
    b.emit("import junit.framework.TestCase;");
    b.pad_to(352);
    b.emit("public class TestPeriodFormatterBuilder extends TestCase {");          // 352
    b.emit("");                                                                    // 353
    b.emit("    private PeriodFormatterBuilder builder;");                         // 354
    b.emit("");                                                                    // 355
    b.emit("    public void testPluralAffixParseOrder() {");                       // 356
    b.emit("        PeriodFormatter f = builder.appendDays()");                    // 357
    b.emit("            .appendSuffix(\"day\", \"days\").toFormatter();");         // 358
    b.emit("        String twoDays = Period.days(2).toString(f);");                // 359
    b.emit("        Period period = f.parsePeriod(twoDays);");                     // 360
    b.emit("        assertEquals(Period.days(2), period);");                       // 361
    b.emit("        period = f.parsePeriod(twoDays.toUpperCase(Locale.ENGLISH));");// 362
    b.emit("        assertEquals(Period.days(2), period);");                       // 363
    b.emit("    }");                                                               // 364
    b.emit("}");                                                                   // 365
    return b.text;
}

/// What remains of the original method after the extraction.
inline std::string duplicate_fixed_original() {
    return "public void testPluralAffixParseOrder() {\n"
           "    PeriodFormatter f = builder.appendDays()\n"
           "        .appendSuffix(\"day\", \"days\").toFormatter();\n"
           "    String twoDays = Period.days(2).toString(f);\n"
           "    Period period = f.parsePeriod(twoDays);\n"
           "    assertEquals(Period.days(2), period);\n"
           "}";
}

/// The extracted method, comment included.
inline std::string duplicate_extracted_expected() {
    return "/*  Extracted Method  */\n"
           "public void testPluralAffixParseOrderExtracted() {\n"
           "    PeriodFormatter f = builder.appendDays()\n"
           "        .appendSuffix(\"day\", \"days\").toFormatter();\n"
           "    String twoDays = Period.days(2).toString(f);\n"
           "    Period period = f.parsePeriod(twoDays.toUpperCase(Locale.ENGLISH));\n"
           "    assertEquals(Period.days(2), period);\n"
           "}";
}

/// The experiment shape: one method with four undocumented assertions, one
/// method with two duplicated pairs (four assertions).
inline std::string experiment_file() {
    return "import org.junit.Test;\n"
           "import static org.junit.Assert.*;\n"
           "\n"
           "public class CalendarSuiteTest {\n"
           "\n"
           "    @Test\n"
           "    public void testRoundTrip() {\n"
           "        Calendar c = make();\n"
           "        assertEquals(4, c.size());\n"
           "        assertTrue(c.isValid());\n"
           "        assertNotNull(c.name());\n"
           "        assertEquals(12, c.months());\n"
           "    }\n"
           "\n"
           "    @Test\n"
           "    public void testPairs() {\n"
           "        Calendar c = make();\n"
           "        assertEquals(\"same size\", 4, c.size());\n"
           "        assertEquals(\"same size\", 4, c.size());\n"
           "        assertTrue(\"still valid\", c.isValid());\n"
           "        assertTrue(\"still valid\", c.isValid());\n"
           "    }\n"
           "\n"
           "    private Calendar make() {\n"
           "        return new Calendar();\n"
           "    }\n"
           "}\n";
}

}  // namespace fixtures
