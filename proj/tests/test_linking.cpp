#include "support/link_oracle.hpp"
#include "support/test_support.hpp"

#include "vizlink/error.hpp"
#include "vizlink/linking.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

using namespace vizlink;
using namespace testing_support;

namespace {

ManipulationDescriptor desc(int id, ManipulationKind kind) {
    return {id, kind, "descriptor " + std::to_string(id), {}, {}};
}

TriggerPhrase trig(const std::string& nl, const std::string& text, int card) {
    auto at = nl.find(text);
    return {text, at, at + text.size(), card};
}

} // namespace

TEST(Triggers, HeuristicFindsPluralDeicticWithNumeral) {
    auto t = extract_triggers("compare these two time ranges", 3, nullptr);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t[0].text, "these two time ranges");
    EXPECT_EQ(t[0].cardinality, 2);
    EXPECT_EQ(t[0].start, 8u);
    EXPECT_EQ(t[0].end, 29u);
}

TEST(Triggers, NoDeicticNoTriggers) {
    EXPECT_TRUE(extract_triggers("show the dataset overview", 0, nullptr).empty());
    EXPECT_TRUE(extract_triggers("show the dataset overview", 2, nullptr).empty());
}

TEST(Triggers, AgentReplyIsVerifiedAgainstText) {
    const std::string nl = "highlight this trend within the selected data";
    ResponderBackend backend;
    backend.push(AgentRole::Linker, R"({"triggers": [
        {"text": "the selected data", "cardinality": 1, "descriptorIds": [2]},
        {"text": "this trend", "cardinality": 1, "descriptorIds": [1]},
        {"text": "that other chart", "cardinality": 1, "descriptorIds": [1]}]})");
    AgentClient client(backend, "gpt-4o");
    std::vector<ManipulationDescriptor> d = {desc(1, ManipulationKind::FreeDraw), desc(2, ManipulationKind::BoxSelect)};
    LinkerAgent agent(&client, nl, d);
    auto t = extract_triggers(nl, d.size(), &agent);
    ASSERT_EQ(t.size(), 2u); // the phrase absent from the message is dropped
    EXPECT_EQ(t[0], (TriggerPhrase{"this trend", 10, 20, 1}));
    EXPECT_EQ(t[1], (TriggerPhrase{"the selected data", 28, 45, 1}));

    // the same reply feeds content matching without a second call
    auto r = link(t, d, &agent);
    EXPECT_EQ(agent.calls(), 1);
    EXPECT_EQ(r.rule, LinkRule::Order); // 1 + 1 == 2 descriptors
    EXPECT_EQ(r.links[0].descriptorIds, std::vector<int>{1});
    EXPECT_EQ(r.links[1].descriptorIds, std::vector<int>{2});
}

TEST(Triggers, MalformedAgentReplyFallsBackToHeuristic) {
    const std::string nl = "zoom into this period";
    ResponderBackend backend;
    backend.push(AgentRole::Linker, "sure! the trigger is 'this period'");
    AgentClient client(backend, "gpt-4o");
    LinkerAgent agent(&client, nl, {desc(1, ManipulationKind::BoxSelect)});
    auto t = extract_triggers(nl, 1, &agent);
    EXPECT_TRUE(agent.failure().has_value());
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t[0].text, "this period");
}

TEST(Link, OrderOneToOne) {
    const std::string nl = "compare this range with that trend";
    std::vector<TriggerPhrase> t = {trig(nl, "this range", 1), trig(nl, "that trend", 1)};
    std::vector<ManipulationDescriptor> d = {desc(1, ManipulationKind::BoxSelect), desc(2, ManipulationKind::FreeDraw)};
    auto r = link(t, d, nullptr);
    EXPECT_EQ(r.rule, LinkRule::Order);
    ASSERT_EQ(r.links.size(), 2u);
    EXPECT_EQ(r.links[0].descriptorIds, std::vector<int>{1});
    EXPECT_EQ(r.links[1].descriptorIds, std::vector<int>{2});
    EXPECT_TRUE(r.unmatchedDescriptorIds.empty());
}

TEST(Link, OrderWithCardinalities) {
    const std::string nl = "these points against those two ranges";
    std::vector<TriggerPhrase> t = {trig(nl, "these points", 1), trig(nl, "those two ranges", 2)};
    std::vector<ManipulationDescriptor> d = {desc(1, ManipulationKind::ClickSelect), desc(2, ManipulationKind::BoxSelect),
                                             desc(3, ManipulationKind::BoxSelect)};
    auto r = link(t, d, nullptr);
    EXPECT_EQ(r.rule, LinkRule::Order);
    EXPECT_EQ(r.links[1].descriptorIds, (std::vector<int>{2, 3}));
}

TEST(Link, ContentTwoRangesLeaveClickUnmatched) {
    const std::string nl = "compare these two time ranges";
    std::vector<ManipulationDescriptor> d = {desc(1, ManipulationKind::BoxSelect), desc(2, ManipulationKind::BoxSelect),
                                             desc(3, ManipulationKind::ClickSelect)};
    ResponderBackend backend;
    backend.push(AgentRole::Linker,
                 R"({"triggers": [{"text": "these two time ranges", "cardinality": 2, "descriptorIds": [1, 2]}]})");
    AgentClient client(backend, "gpt-4o");
    LinkerAgent agent(&client, nl, d);
    auto t = extract_triggers(nl, d.size(), &agent);
    auto r = link(t, d, &agent);
    EXPECT_EQ(r.rule, LinkRule::Content);
    ASSERT_EQ(r.links.size(), 1u);
    EXPECT_EQ(r.links[0].descriptorIds, (std::vector<int>{1, 2}));
    EXPECT_EQ(r.unmatchedDescriptorIds, std::vector<int>{3});
}

TEST(Link, FlexibleWithoutAgentUsesKinds) {
    const std::string nl = "compare these two time ranges";
    std::vector<ManipulationDescriptor> d = {desc(1, ManipulationKind::BoxSelect), desc(2, ManipulationKind::ClickSelect),
                                             desc(3, ManipulationKind::BoxSelect)};
    auto r = link(extract_triggers(nl, d.size(), nullptr), d, nullptr);
    EXPECT_EQ(r.rule, LinkRule::Flexible);
    ASSERT_EQ(r.links.size(), 1u);
    EXPECT_EQ(r.links[0].descriptorIds, (std::vector<int>{1, 3}));
    EXPECT_EQ(r.unmatchedDescriptorIds, std::vector<int>{2});
}

TEST(Link, NoTriggersLeavesEverythingUnmatched) {
    std::vector<ManipulationDescriptor> d = {desc(1, ManipulationKind::BoxSelect), desc(2, ManipulationKind::FreeDraw)};
    auto r = link({}, d, nullptr);
    EXPECT_TRUE(r.links.empty());
    EXPECT_EQ(r.unmatchedDescriptorIds, (std::vector<int>{1, 2}));
}

TEST(Link, CardinalityAboveDescriptorCountIsClampedAndFlagged) {
    const std::string nl = "these three periods";
    std::vector<ManipulationDescriptor> d = {desc(1, ManipulationKind::BoxSelect), desc(2, ManipulationKind::BoxSelect)};
    auto r = link({trig(nl, "these three periods", 3)}, d, nullptr);
    EXPECT_EQ(r.rule, LinkRule::Order);
    EXPECT_EQ(r.links[0].descriptorIds, (std::vector<int>{1, 2}));
    EXPECT_TRUE(r.links[0].partial);
}

TEST(Link, OrderNeverConsultsAgent) {
    const std::string nl = "this range";
    ResponderBackend backend; // empty queue: a call would throw
    AgentClient client(backend, "gpt-4o");
    std::vector<ManipulationDescriptor> d = {desc(1, ManipulationKind::BoxSelect)};
    LinkerAgent agent(&client, nl, d);
    auto r = link({trig(nl, "this range", 1)}, d, &agent);
    EXPECT_EQ(r.rule, LinkRule::Order);
    EXPECT_EQ(agent.calls(), 0);
}

TEST(Link, JsonRoundTrip) {
    const std::string nl = "compare these two time ranges";
    std::vector<ManipulationDescriptor> d = {desc(1, ManipulationKind::BoxSelect), desc(2, ManipulationKind::ClickSelect),
                                             desc(3, ManipulationKind::BoxSelect)};
    auto r = link(extract_triggers(nl, d.size(), nullptr), d, nullptr);
    EXPECT_EQ(LinkResult::from_json(Json::parse(r.to_json().dump())), r);
}

TEST(LinkProperties, PartitionAndOrderMonotonicity) {
    std::mt19937 rng(7);
    const std::vector<std::string> phrases = {"this trend", "these ranges", "the selected points", "that one"};
    const ManipulationKind kinds[] = {ManipulationKind::BoxSelect, ManipulationKind::ClickSelect,
                                      ManipulationKind::LassoSelect, ManipulationKind::FreeDraw};
    for (int iter = 0; iter < 2000; ++iter) {
        int m = rng() % 5, n = rng() % 6;
        std::string nl;
        std::vector<TriggerPhrase> t;
        for (int i = 0; i < m; ++i) {
            nl += nl.empty() ? "" : " then ";
            t.push_back({phrases[i], nl.size(), nl.size() + phrases[i].size(), 1 + static_cast<int>(rng() % 3)});
            nl += phrases[i];
        }
        std::vector<ManipulationDescriptor> d;
        for (int k = 1; k <= n; ++k) d.push_back(desc(k, kinds[rng() % 4]));
        auto r = link(t, d, nullptr);

        std::vector<int> seen;
        for (const auto& l : r.links) seen.insert(seen.end(), l.descriptorIds.begin(), l.descriptorIds.end());
        seen.insert(seen.end(), r.unmatchedDescriptorIds.begin(), r.unmatchedDescriptorIds.end());
        std::sort(seen.begin(), seen.end());
        std::vector<int> all(n);
        std::iota(all.begin(), all.end(), 1);
        ASSERT_EQ(seen, all) << nl;

        if (r.rule == LinkRule::Order) {
            int last = 0;
            for (const auto& l : r.links)
                for (int id : l.descriptorIds) {
                    ASSERT_GT(id, last);
                    last = id;
                }
        }
    }
}

TEST(LinkOracle, EnumeratedCorpusAgreesWithBruteForce) {
    auto report = run_link_oracle_corpus();
    EXPECT_GT(report.cases, 5000u);
    EXPECT_EQ(report.mismatches, 0u) << report.firstMismatch;
    EXPECT_EQ(report.orderAgentCalls, 0u);
    EXPECT_LT(report.seconds, 10.0);
}
