#pragma once

#include "vizlink/agents.hpp"
#include "vizlink/dataset.hpp"
#include "vizlink/interaction.hpp"
#include "vizlink/linking.hpp"
#include "vizlink/postprocess.hpp"
#include "vizlink/prompt.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace vizlink {

inline constexpr int kSessionSchemaVersion = 1;
inline constexpr std::string_view kSessionSchemaName = "vizlink.session";

// Returns the current time as an ISO-8601 string; injectable for deterministic tests.
using Clock = std::function<std::string()>;
std::string utc_now_iso();

struct EntryError {
    std::string code;
    std::string message;
    bool operator==(const EntryError&) const = default;
};

struct SessionEntry {
    int index = 0;
    std::string nlInput;
    std::vector<DirectManipulation> manipulations;
    std::vector<ManipulationDescriptor> descriptors;
    std::vector<std::string> warnings;
    LinkResult linkResult;
    PromptDocument promptDocument;
    std::optional<VisualizationArtifact> artifact; // absent when generation did not complete
    std::optional<EntryError> error;
    std::vector<VisualizationArtifact> codeRevisions; // code inspector edits, oldest first
    std::optional<std::string> thumbnail;             // PNG bytes supplied by the UI
    std::string modelId;
    std::string createdAt;
    std::string completedAt;

    // Artifact of the chart currently shown for this entry (latest code edit wins).
    const VisualizationArtifact* current_artifact() const;

    Json to_json() const;
    static SessionEntry from_json(const Json& j);
    bool operator==(const SessionEntry&) const = default;
};

struct ArchivedBranch {
    std::string tag;
    int fromIndex = 0;
    std::string archivedAt;
    std::vector<SessionEntry> entries;

    Json to_json() const;
    static ArchivedBranch from_json(const Json& j);
    bool operator==(const ArchivedBranch&) const = default;
};

struct Session {
    std::string id;
    std::shared_ptr<const Dataset> dataset;
    std::vector<SessionEntry> entries;
    std::vector<ArchivedBranch> archivedBranches;
    std::optional<int> activeEntryIndex; // nullopt while the session has no entries
    ModelConfig model;
    AgentLog agentLog;

    const std::string& dataset_id() const;
    // Session state without the embedded dataset rows.
    Json to_json() const;
    bool operator==(const Session& other) const;
};

Session new_session(std::string id, std::shared_ptr<const Dataset> dataset, ModelConfig model);

// describe -> link -> build_prompt -> generate -> process. Agent failures are
// recorded on the entry; malformed manipulations throw InvalidManipulation.
const SessionEntry& append_entry(Session& session, AgentBackend& backend, const std::string& nl,
                                 const std::vector<DirectManipulation>& manipulations, const Clock& clock = utc_now_iso);

// Archives entries index.. into a branch and regenerates entry `index`.
const SessionEntry& edit_entry(Session& session, AgentBackend& backend, int index, const std::string& nl,
                               const std::vector<DirectManipulation>& manipulations, const Clock& clock = utc_now_iso);

// Re-validates user-edited code for an entry; generation is not re-run.
const VisualizationArtifact& revise_code(Session& session, int index, const std::string& code);

void attach_thumbnail(Session& session, int index, std::string png);

std::string save_session(const Session& session);
// Throws CorruptArchive or SchemaVersionMismatch.
Session load_session(std::string_view bytes);

// Re-executes the active line of a session against a backend, in order, with
// each entry's original model; code edits and thumbnails are re-applied.
Session replay(const Session& session, AgentBackend& backend, const Clock& clock = utc_now_iso);

} // namespace vizlink
