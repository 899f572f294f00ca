#include "support/corpus_checks.hpp"
#include "support/test_support.hpp"

#include "vizlink/error.hpp"
#include "vizlink/postprocess.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace vizlink;
using namespace testing_support;

namespace {

const std::string kValid = "const xScale = d3.scaleLinear().range([0, vw]);\n"
                           "const yScale = d3.scaleLinear().range([vh, 0]);\n"
                           "svg.selectAll('rect').data(data).enter().append('rect').attr('x', d => xScale(d.x));\n"
                           "return { xScale, yScale };";

} // namespace

TEST(Extract, TextAroundTagsIsExplanation) {
    auto e = extract_code("Here is the chart. <D3>const a=1;</D3>");
    EXPECT_EQ(e.explanation, "Here is the chart.");
    EXPECT_EQ(e.code, "const a=1;");
    EXPECT_FALSE(e.fromFencedBlock);
}

TEST(Extract, NoCodeAtAll) {
    try {
        extract_code("I could not draw that.");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingCodeTag);
    }
}

TEST(Extract, NestedCloseTagInStringKept) {
    const std::string code = "const label = \"</D3>\";\nsvg.append('text').text(label);";
    auto e = extract_code("Chart <D3>" + code + "</D3> done");
    EXPECT_EQ(e.code, code);
    EXPECT_EQ(e.explanation, "Chart\ndone");
}

TEST(Extract, FencedFallbackWarns) {
    auto a = process(read_text(fixture_path("responses/fenced_only.txt")));
    EXPECT_FALSE(a.failure);
    ASSERT_EQ(a.warnings.size(), 1u);
    EXPECT_EQ(a.warnings[0], "MissingCodeTag: code taken from the longest fenced block");
}

TEST(Extract, TagRoundTripOnArbitraryCode) {
    std::mt19937 rng(11);
    const std::string alphabet = "abc <>/D3{}();\"'`\n\t=+-*.";
    for (int iter = 0; iter < 500; ++iter) {
        std::string code;
        for (int k = rng() % 60; k > 0; --k) code += alphabet[rng() % alphabet.size()];
        if (code.find("</D3>") != std::string::npos || code.find("<D3>") != std::string::npos) continue;
        EXPECT_EQ(extract_code("<D3>" + code + "</D3>").code, code);
    }
}

TEST(Contract, AllGlobalsAndScales) {
    auto v = validate_contract(kValid);
    EXPECT_TRUE(v.hasRootGlobal);
    EXPECT_TRUE(v.hasViewportGlobals);
    EXPECT_TRUE(v.returnsGlobalScales);
}

TEST(Contract, EmptyCodeAllFalse) {
    EXPECT_EQ(validate_contract(""), ContractValidation{});
}

TEST(Contract, MissingViewportGlobalsIsFailure) {
    auto a = process("<D3>const xScale = d3.scaleLinear(); const yScale = d3.scaleLinear();\n"
                     "svg.append('g');\nreturn { xScale, yScale };</D3>");
    EXPECT_FALSE(a.validation.hasViewportGlobals);
    ASSERT_TRUE(a.failure);
    EXPECT_EQ(a.failure->kind, FailureClass::MissingGlobalScales);
    EXPECT_EQ(a.failure->detail, "vw/vh unused");
}

TEST(Rewrite, SingleChain) {
    EXPECT_EQ(rewrite_data_binding("sel.data(rows).enter().append('rect')"),
              "sel.data(rows).enter().append('rect')" + std::string(kDataBindingCall));
}

TEST(Rewrite, NoChainsIsIdentity) {
    const std::string code = "svg.append('g').call(d3.axisBottom(xScale));";
    EXPECT_EQ(rewrite_data_binding(code), code);
}

TEST(Rewrite, TwoChainsOneAlreadyBound) {
    const std::string code = "svg.selectAll('a').data(xs).enter().append('circle').attr(\"data\", d => JSON.stringify(d));\n"
                             "svg.selectAll('b').data(ys).enter().append('rect').attr('x', 1);";
    auto r = rewrite_data_binding_detailed(code);
    EXPECT_EQ(r.chains, 2);
    EXPECT_EQ(r.insertions, 1);
    int inserted = 0;
    EXPECT_TRUE(only_insertions_changed(code, r.code, inserted));
    EXPECT_EQ(inserted, 1);
}

TEST(Rewrite, CommentsBetweenLinks) {
    const std::string code = "svg.selectAll('rect')\n  .data(data) // rows\n  .enter()\n  /* bars */ .append('rect')\n  .attr('x', 0);";
    auto r = rewrite_data_binding(code);
    EXPECT_NE(r.find(".append('rect')" + std::string(kDataBindingCall)), std::string::npos);
}

TEST(Process, ValidBarGetsBinding) {
    auto a = process("A bar chart.\n<D3>" + kValid + "</D3>");
    EXPECT_FALSE(a.failure);
    EXPECT_NE(a.processedCode, a.extractedCode);
    EXPECT_EQ(a.explanation, "A bar chart.");
    EXPECT_EQ(VisualizationArtifact::from_json(Json::parse(a.to_json().dump())), a);
}

TEST(Process, UserEditedCodeKeepsExplanation) {
    auto a = process_code("A bar chart.", kValid);
    EXPECT_EQ(a.explanation, "A bar chart.");
    EXPECT_EQ(a.rawResponse, "A bar chart.\n<D3>" + kValid + "</D3>");
    EXPECT_FALSE(a.failure);
}

TEST(Corpus, CoversTheChartKinds) {
    auto charts = chart_corpus();
    EXPECT_GE(charts.size(), 10u);
    std::set<std::string> kinds;
    for (const auto& c : charts) kinds.insert(c.kind);
    for (const char* k : {"bar", "line", "scatter", "histogram", "pie", "area", "heatmap"}) EXPECT_TRUE(kinds.count(k)) << k;
}

TEST(Corpus, ChartRewriteProperties) {
    auto r = check_chart_corpus();
    EXPECT_GE(r.cases, 10u);
    for (const auto& p : r.problems) ADD_FAILURE() << p;
}

TEST(Corpus, FailureTaxonomy) {
    auto r = check_failure_taxonomy();
    EXPECT_GE(r.cases, 12u);
    for (const auto& p : r.problems) ADD_FAILURE() << p;
}

TEST(FailureClassNames, RoundTrip) {
    for (auto f : {FailureClass::MissingCodeTag, FailureClass::SyntaxError, FailureClass::UnknownFunction,
                   FailureClass::UndefinedVariable, FailureClass::MissingGlobalScales, FailureClass::LayoutSuspect})
        EXPECT_EQ(failure_class_from_string(to_string(f)), f);
    EXPECT_FALSE(failure_class_from_string("Nope"));
}
