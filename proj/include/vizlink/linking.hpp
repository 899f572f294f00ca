#pragma once

#include "vizlink/agents.hpp"
#include "vizlink/interaction.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vizlink {

struct TriggerPhrase {
    std::string text;
    std::size_t start = 0; // byte offsets into the message, end exclusive
    std::size_t end = 0;
    int cardinality = 1;

    Json to_json() const;
    static TriggerPhrase from_json(const Json& j);
    bool operator==(const TriggerPhrase&) const = default;
};

enum class LinkRule { Order, Content, Flexible };

std::string_view to_string(LinkRule rule);

struct IntentLink {
    TriggerPhrase trigger;
    std::vector<int> descriptorIds; // manipulation ids
    LinkRule rule = LinkRule::Order;
    bool partial = false; // cardinality was clamped or only partly satisfied

    Json to_json() const;
    static IntentLink from_json(const Json& j);
    bool operator==(const IntentLink&) const = default;
};

struct LinkResult {
    std::vector<IntentLink> links;
    std::vector<int> unmatchedDescriptorIds;
    // Rule that produced the mapping; Order for the trivial empty cases.
    LinkRule rule = LinkRule::Order;

    Json to_json() const;
    static LinkResult from_json(const Json& j);
    bool operator==(const LinkResult&) const = default;
};

// Linker request payload: {"nl": ..., "descriptors": [{"id", "text"}]}
Json linker_request(std::string_view nl, const std::vector<ManipulationDescriptor>& descriptors);

// One linker agent conversation per message. The reply is fetched at most once
// and shared by trigger extraction and content matching.
class LinkerAgent {
public:
    LinkerAgent(AgentClient* client, std::string nl, std::vector<ManipulationDescriptor> descriptors);

    // Parsed {"triggers": [...]} reply, or nullopt when the agent is unavailable or answered malformed JSON.
    const std::optional<Json>& reply();
    int calls() const { return calls_; }
    const std::optional<std::string>& failure() const { return failure_; }

private:
    AgentClient* client_;
    std::string nl_;
    std::vector<ManipulationDescriptor> descriptors_;
    bool asked_ = false;
    int calls_ = 0;
    std::optional<Json> reply_;
    std::optional<std::string> failure_;
};

// Deictic pattern matcher used when no agent reply is available.
std::vector<TriggerPhrase> heuristic_triggers(std::string_view nl, std::size_t descriptor_count);

// Trigger phrases in span order, non-overlapping, each verified against the message text.
std::vector<TriggerPhrase> extract_triggers(std::string_view nl, std::size_t descriptor_count, LinkerAgent* agent);

// Descriptor kinds a trigger's wording points at (empty when no keyword matches).
std::vector<ManipulationKind> trigger_kinds(std::string_view trigger_text);

// Order, then Content (agent), then Flexible matching. `descriptors` must be in manipulation order.
LinkResult link(const std::vector<TriggerPhrase>& triggers, const std::vector<ManipulationDescriptor>& descriptors,
                LinkerAgent* agent);

} // namespace vizlink
