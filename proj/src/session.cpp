#include "vizlink/session.hpp"

#include "vizlink/assets.hpp"
#include "vizlink/error.hpp"

#include <chrono>
#include <set>

namespace vizlink {

std::string utc_now_iso() {
    auto now = std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
    return format_iso_datetime(now.time_since_epoch().count()) + "Z";
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

template <typename T> Json array_of(const std::vector<T>& items) {
    Json arr = Json::array();
    for (const auto& item : items) arr.push_back(item.to_json());
    return arr;
}

template <typename T> std::vector<T> vector_of(const Json& arr) {
    std::vector<T> out;
    for (const auto& item : arr) out.push_back(T::from_json(item));
    return out;
}

} // namespace

const VisualizationArtifact* SessionEntry::current_artifact() const {
    if (!codeRevisions.empty()) return &codeRevisions.back();
    return artifact ? &*artifact : nullptr;
}

Json SessionEntry::to_json() const {
    Json j;
    j["index"] = index;
    j["nlInput"] = nlInput;
    j["manipulations"] = array_of(manipulations);
    j["descriptors"] = array_of(descriptors);
    j["warnings"] = warnings;
    j["linkResult"] = linkResult.to_json();
    j["promptDocument"] = promptDocument.to_json();
    j["artifact"] = artifact ? artifact->to_json() : Json(nullptr);
    j["error"] = error ? Json{{"code", error->code}, {"message", error->message}} : Json(nullptr);
    j["codeRevisions"] = array_of(codeRevisions);
    j["thumbnailPngBase64"] = thumbnail ? Json(base64_encode(*thumbnail)) : Json(nullptr);
    j["modelId"] = modelId;
    j["timestamps"] = {{"createdAt", createdAt}, {"completedAt", completedAt}};
    return j;
}

SessionEntry SessionEntry::from_json(const Json& j) {
    SessionEntry e;
    e.index = j.at("index").get<int>();
    e.nlInput = j.at("nlInput").get<std::string>();
    e.manipulations = vector_of<DirectManipulation>(j.at("manipulations"));
    e.descriptors = vector_of<ManipulationDescriptor>(j.at("descriptors"));
    e.warnings = j.at("warnings").get<std::vector<std::string>>();
    e.linkResult = LinkResult::from_json(j.at("linkResult"));
    e.promptDocument = PromptDocument::from_json(j.at("promptDocument"));
    if (!j.at("artifact").is_null()) e.artifact = VisualizationArtifact::from_json(j["artifact"]);
    if (!j.at("error").is_null())
        e.error = EntryError{j["error"].at("code").get<std::string>(), j["error"].at("message").get<std::string>()};
    e.codeRevisions = vector_of<VisualizationArtifact>(j.at("codeRevisions"));
    if (!j.at("thumbnailPngBase64").is_null()) e.thumbnail = base64_decode(j["thumbnailPngBase64"].get<std::string>());
    e.modelId = j.at("modelId").get<std::string>();
    e.createdAt = j.at("timestamps").at("createdAt").get<std::string>();
    e.completedAt = j.at("timestamps").at("completedAt").get<std::string>();
    return e;
}

Json ArchivedBranch::to_json() const {
    return {{"tag", tag}, {"fromIndex", fromIndex}, {"archivedAt", archivedAt}, {"entries", array_of(entries)}};
}

ArchivedBranch ArchivedBranch::from_json(const Json& j) {
    return {j.at("tag").get<std::string>(), j.at("fromIndex").get<int>(), j.at("archivedAt").get<std::string>(),
            vector_of<SessionEntry>(j.at("entries"))};
}

const std::string& Session::dataset_id() const {
    static const std::string none;
    return dataset ? dataset->id : none;
}

Json Session::to_json() const {
    Json j;
    j["id"] = id;
    j["datasetId"] = dataset_id();
    j["activeEntryIndex"] = activeEntryIndex ? Json(*activeEntryIndex) : Json(nullptr);
    j["modelId"] = model.modelId;
    j["entries"] = array_of(entries);
    j["archivedBranches"] = array_of(archivedBranches);
    j["agentLog"] = array_of(agentLog);
    return j;
}

bool Session::operator==(const Session& other) const {
    bool same_data = (!dataset && !other.dataset) || (dataset && other.dataset && *dataset == *other.dataset);
    return same_data && id == other.id && entries == other.entries && archivedBranches == other.archivedBranches &&
           activeEntryIndex == other.activeEntryIndex && model == other.model && agentLog == other.agentLog;
}

Session new_session(std::string id, std::shared_ptr<const Dataset> dataset, ModelConfig model) {
    if (!dataset) throw Error(ErrorCode::InvalidRequest, "a session needs a dataset");
    Session s;
    s.id = std::move(id);
    s.dataset = std::move(dataset);
    s.model = std::move(model);
    return s;
}

// ---------------------------------------------------------------------------
// Turn execution

namespace {

bool is_agent_failure(ErrorCode code) {
    return code == ErrorCode::AgentUnavailable || code == ErrorCode::Timeout || code == ErrorCode::RateLimited ||
           code == ErrorCode::AgentMalformedResponse;
}

void check_manipulations(const std::vector<DirectManipulation>& manipulations) {
    std::set<int> ids;
    for (const auto& m : manipulations) {
        m.validate();
        if (!ids.insert(m.id).second)
            throw Error(ErrorCode::InvalidManipulation, "duplicate manipulation id " + std::to_string(m.id));
    }
}

// Runs one turn with history entries[0, index). The entry is not yet stored.
SessionEntry run_turn(Session& session, AgentBackend& backend, int index, const std::string& nl,
                      const std::vector<DirectManipulation>& manipulations, const DescriptorReuse& reuse,
                      const Clock& clock) {
    check_manipulations(manipulations);
    SessionEntry entry;
    entry.index = index;
    entry.nlInput = nl;
    entry.manipulations = manipulations;
    entry.modelId = session.model.modelId;
    entry.createdAt = clock();

    std::vector<HistoryTurn> history;
    bool scales_available = false;
    for (int i = 0; i < index; ++i) {
        const SessionEntry& prior = session.entries[static_cast<std::size_t>(i)];
        const VisualizationArtifact* shown = prior.current_artifact();
        history.push_back({prior.nlInput, shown ? shown->explanation : std::string(),
                           shown ? shown->extractedCode : std::string()});
        scales_available = shown && shown->validation.returnsGlobalScales;
    }

    AgentClient client(backend, session.model.modelId, &session.agentLog, index);
    try {
        DescribeOutcome described = describe_all(manipulations, nl, scales_available, client, reuse);
        entry.descriptors = std::move(described.descriptors);
        entry.warnings = std::move(described.warnings);
        if (!entry.descriptors.empty()) {
            LinkerAgent linker(&client, nl, entry.descriptors);
            auto triggers = extract_triggers(nl, entry.descriptors.size(), &linker);
            entry.linkResult = link(triggers, entry.descriptors, &linker);
            if (linker.failure()) entry.warnings.push_back("linker agent: " + *linker.failure());
        }
        entry.promptDocument = build_prompt(*session.dataset, nl, entry.linkResult, entry.descriptors, history);
        std::string raw = client.complete(AgentRole::VisGenerator, entry.promptDocument.render());
        entry.artifact = process(raw);
    } catch (const Error& e) {
        if (!is_agent_failure(e.code())) throw;
        entry.error = EntryError{std::string(to_string(e.code())), e.what()};
    }
    entry.completedAt = clock();
    return entry;
}

SessionEntry& entry_at(Session& session, int index) {
    if (index < 0 || static_cast<std::size_t>(index) >= session.entries.size())
        throw Error(ErrorCode::NotFound, "no entry " + std::to_string(index) + " in session " + session.id);
    return session.entries[static_cast<std::size_t>(index)];
}

} // namespace

const SessionEntry& append_entry(Session& session, AgentBackend& backend, const std::string& nl,
                                 const std::vector<DirectManipulation>& manipulations, const Clock& clock) {
    const int index = static_cast<int>(session.entries.size());
    SessionEntry entry = run_turn(session, backend, index, nl, manipulations, {}, clock);
    session.entries.push_back(std::move(entry));
    session.activeEntryIndex = index;
    return session.entries.back();
}

const SessionEntry& edit_entry(Session& session, AgentBackend& backend, int index, const std::string& nl,
                               const std::vector<DirectManipulation>& manipulations, const Clock& clock) {
    const SessionEntry old = entry_at(session, index);
    DescriptorReuse reuse = [&old](const DirectManipulation& m) -> std::optional<ManipulationDescriptor> {
        for (std::size_t i = 0; i < old.manipulations.size(); ++i) {
            if (!(old.manipulations[i] == m)) continue;
            for (const auto& d : old.descriptors)
                if (d.manipulationId == m.id) return d;
        }
        return std::nullopt;
    };
    SessionEntry entry = run_turn(session, backend, index, nl, manipulations, reuse, clock);

    ArchivedBranch branch;
    branch.tag = "branch-" + std::to_string(session.archivedBranches.size() + 1);
    branch.fromIndex = index;
    branch.archivedAt = clock();
    branch.entries.assign(session.entries.begin() + index, session.entries.end());
    session.archivedBranches.push_back(std::move(branch));
    session.entries.resize(static_cast<std::size_t>(index));
    session.entries.push_back(std::move(entry));
    session.activeEntryIndex = index;
    return session.entries.back();
}

const VisualizationArtifact& revise_code(Session& session, int index, const std::string& code) {
    SessionEntry& entry = entry_at(session, index);
    const VisualizationArtifact* shown = entry.current_artifact();
    entry.codeRevisions.push_back(process_code(shown ? shown->explanation : std::string(), code));
    return entry.codeRevisions.back();
}

void attach_thumbnail(Session& session, int index, std::string png) {
    entry_at(session, index).thumbnail = std::move(png);
}

// ---------------------------------------------------------------------------
// Archive

std::string save_session(const Session& session) {
    Json doc;
    doc["schema"] = kSessionSchemaName;
    doc["schemaVersion"] = kSessionSchemaVersion;
    doc["templateVersion"] = assets::kTemplateVersion;
    doc["session"] = session.to_json();
    doc["dataset"] = session.dataset ? session.dataset->to_json() : Json(nullptr);
    return doc.dump(1);
}

Session load_session(std::string_view bytes) {
    Json doc;
    try {
        doc = Json::parse(bytes);
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::CorruptArchive, "session archive is not valid JSON", e.what());
    }
    if (!doc.is_object() || doc.value("schema", "") != kSessionSchemaName || !doc.contains("schemaVersion") ||
        !doc["schemaVersion"].is_number_integer())
        throw Error(ErrorCode::CorruptArchive, "not a session archive");
    const int version = doc["schemaVersion"].get<int>();
    if (version != kSessionSchemaVersion)
        throw Error(ErrorCode::SchemaVersionMismatch,
                    "archive schema version " + std::to_string(version) + " is not supported",
                    "expected " + std::to_string(kSessionSchemaVersion));
    try {
        const Json& s = doc.at("session");
        Session out;
        out.id = s.at("id").get<std::string>();
        if (!doc.at("dataset").is_null()) out.dataset = std::make_shared<const Dataset>(Dataset::from_json(doc["dataset"]));
        if (out.dataset_id() != s.at("datasetId").get<std::string>())
            throw Error(ErrorCode::CorruptArchive, "embedded dataset does not match datasetId");
        if (!s.at("activeEntryIndex").is_null()) out.activeEntryIndex = s["activeEntryIndex"].get<int>();
        out.model.modelId = s.at("modelId").get<std::string>();
        out.entries = vector_of<SessionEntry>(s.at("entries"));
        out.archivedBranches = vector_of<ArchivedBranch>(s.at("archivedBranches"));
        out.agentLog = vector_of<AgentLogEntry>(s.at("agentLog"));
        for (std::size_t i = 0; i < out.entries.size(); ++i)
            if (out.entries[i].index != static_cast<int>(i))
                throw Error(ErrorCode::CorruptArchive, "entry indices are not sequential");
        if (out.activeEntryIndex &&
            (*out.activeEntryIndex < 0 || static_cast<std::size_t>(*out.activeEntryIndex) >= out.entries.size()))
            throw Error(ErrorCode::CorruptArchive, "active entry index out of range");
        return out;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::CorruptArchive, "session archive does not match the schema", e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::CorruptArchive) throw;
        throw Error(ErrorCode::CorruptArchive, "session archive content is invalid", e.what());
    }
}

Session replay(const Session& session, AgentBackend& backend, const Clock& clock) {
    Session out = new_session(session.id, session.dataset, session.model);
    for (const auto& entry : session.entries) {
        out.model.modelId = entry.modelId;
        const int index = append_entry(out, backend, entry.nlInput, entry.manipulations, clock).index;
        for (const auto& revision : entry.codeRevisions) revise_code(out, index, revision.extractedCode);
        if (entry.thumbnail) attach_thumbnail(out, index, *entry.thumbnail);
    }
    out.model = session.model;
    out.archivedBranches = session.archivedBranches;
    out.activeEntryIndex = session.activeEntryIndex;
    return out;
}

} // namespace vizlink
