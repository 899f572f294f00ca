#pragma once

#include "vizlink/dataset.hpp"
#include "vizlink/interaction.hpp"
#include "vizlink/linking.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vizlink {

// Turns kept in the conversation context, oldest dropped first.
inline constexpr std::size_t kHistoryTurns = 6;

struct HistoryTurn {
    std::string userMessage;
    std::string explanation;
    std::string code; // extracted chart code of that turn, may be empty
};

struct ConversationTurn {
    std::string userMessage;
    std::string explanation;
    bool operator==(const ConversationTurn&) const = default;
};

struct PromptDocument {
    std::string taskContext;
    std::string datasetDescription;
    std::vector<std::string> cotSteps;
    std::vector<ConversationTurn> conversationContext;
    // Code of the immediately previous turn, so follow-ups can modify the current chart.
    std::optional<std::string> previousCode;
    std::string structuredIntents;

    // Single text document with labeled section headers, in fixed order.
    std::string render() const;
    Json to_json() const;
    static PromptDocument from_json(const Json& j);
    bool operator==(const PromptDocument&) const = default;
};

std::string build_task_context();
std::vector<std::string> build_cot_steps();
std::vector<std::string> prompt_section_headers();

// Descriptor reference label ("D1", "D2", ...) by position in manipulation order.
std::string reference_label(std::size_t position);

std::string render_intents(const std::string& nl, const LinkResult& result,
                           const std::vector<ManipulationDescriptor>& descriptors);

PromptDocument build_prompt(const Dataset& dataset, const std::string& nl, const LinkResult& result,
                            const std::vector<ManipulationDescriptor>& descriptors,
                            const std::vector<HistoryTurn>& history);

} // namespace vizlink
