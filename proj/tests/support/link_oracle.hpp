#pragma once

#include "vizlink/linking.hpp"

#include <optional>
#include <string>
#include <vector>

namespace testing_support {

// What the oracle expects for one trigger; empty ids means "no link".
struct ExpectedLink {
    std::vector<int> ids;
    bool partial = false;
};

struct ExpectedResult {
    vizlink::LinkRule rule = vizlink::LinkRule::Order;
    std::vector<std::optional<ExpectedLink>> perTrigger;
    std::vector<int> unmatched;
};

struct AgentProposal {
    std::string text;
    std::vector<int> ids;
};

// Brute force over every owner assignment of descriptors to triggers.
ExpectedResult oracle_link(const std::vector<vizlink::TriggerPhrase>& triggers,
                           const std::vector<vizlink::ManipulationDescriptor>& descriptors,
                           const std::optional<std::vector<AgentProposal>>& proposal);

// Keyword table written from the documented rule, independent of the engine's.
std::vector<vizlink::ManipulationKind> oracle_kinds(const std::string& trigger_text);

struct OracleReport {
    std::size_t cases = 0;
    std::size_t mismatches = 0;
    std::size_t orderAgentCalls = 0; // agent calls made while the Order rule applied
    std::string firstMismatch;
    double seconds = 0;
};

// Every trace with up to 4 triggers (cardinality 1..3) and up to 4 descriptors,
// with and without a (valid or corrupted) agent proposal.
OracleReport run_link_oracle_corpus();

} // namespace testing_support
