#include "vizlink/prompt.hpp"

#include "vizlink/assets.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace vizlink {

std::string build_task_context() { return trim(assets::get("task_context.txt")); }

std::vector<std::string> build_cot_steps() {
    std::vector<std::string> steps;
    for (int k = 1; k <= 4; ++k) steps.push_back(trim(assets::get("cot_step_" + std::to_string(k) + ".txt")));
    return steps;
}

std::vector<std::string> prompt_section_headers() {
    std::vector<std::string> headers;
    std::istringstream in(assets::get("prompt_sections.txt"));
    for (std::string line; std::getline(in, line);)
        if (!trim(line).empty()) headers.push_back(trim(line));
    return headers;
}

std::string reference_label(std::size_t position) { return "D" + std::to_string(position + 1); }

std::string render_intents(const std::string& nl, const LinkResult& result,
                           const std::vector<ManipulationDescriptor>& descriptors) {
    std::map<int, std::size_t> position;
    for (std::size_t i = 0; i < descriptors.size(); ++i) position[descriptors[i].manipulationId] = i;
    auto label = [&](int id) {
        auto it = position.find(id);
        return it == position.end() ? "D?" + std::to_string(id) : reference_label(it->second);
    };

    std::vector<const IntentLink*> links;
    for (const auto& l : result.links)
        if (!l.descriptorIds.empty() && l.trigger.end <= nl.size()) links.push_back(&l);
    std::sort(links.begin(), links.end(), [](auto a, auto b) { return a->trigger.start < b->trigger.start; });

    std::string annotated;
    std::size_t cursor = 0;
    for (const auto* l : links) {
        annotated.append(nl, cursor, l->trigger.end - cursor);
        annotated += " [refs: ";
        for (std::size_t k = 0; k < l->descriptorIds.size(); ++k)
            annotated += (k ? ", " : "") + label(l->descriptorIds[k]);
        annotated += "]";
        cursor = l->trigger.end;
    }
    annotated.append(nl, cursor, std::string::npos);
    if (descriptors.empty()) return annotated;

    auto line = [&](const ManipulationDescriptor& d) {
        std::string s = label(d.manipulationId) + " (" + std::string(to_string(d.kind)) + "): " + d.text;
        if (d.inferredIntent && *d.inferredIntent != d.text) s += " [intent: " + *d.inferredIntent + "]";
        return s + "\n";
    };
    std::ostringstream out;
    out << annotated << "\n";
    std::vector<bool> referenced(descriptors.size(), false);
    for (const auto* l : links)
        for (int id : l->descriptorIds)
            if (auto it = position.find(id); it != position.end()) referenced[it->second] = true;
    if (std::find(referenced.begin(), referenced.end(), true) != referenced.end()) {
        out << "\nManipulation descriptors:\n";
        for (std::size_t i = 0; i < descriptors.size(); ++i)
            if (referenced[i]) out << line(descriptors[i]);
    }
    if (!result.unmatchedDescriptorIds.empty()) {
        out << "\nAdditional unreferenced manipulations:\n";
        for (int id : result.unmatchedDescriptorIds)
            if (auto it = position.find(id); it != position.end()) out << line(descriptors[it->second]);
    }
    return out.str();
}

PromptDocument build_prompt(const Dataset& dataset, const std::string& nl, const LinkResult& result,
                            const std::vector<ManipulationDescriptor>& descriptors,
                            const std::vector<HistoryTurn>& history) {
    PromptDocument p;
    p.taskContext = build_task_context();
    p.datasetDescription = describe_dataset(dataset);
    p.cotSteps = build_cot_steps();
    std::size_t first = history.size() > kHistoryTurns ? history.size() - kHistoryTurns : 0;
    for (std::size_t i = first; i < history.size(); ++i)
        p.conversationContext.push_back({history[i].userMessage, history[i].explanation});
    if (!history.empty() && !history.back().code.empty()) p.previousCode = history.back().code;
    p.structuredIntents = render_intents(nl, result, descriptors);
    return p;
}

std::string PromptDocument::render() const {
    const auto headers = prompt_section_headers();
    std::ostringstream out;
    out << headers.at(0) << "\n" << taskContext << "\n\n";
    out << headers.at(1) << "\n" << trim(datasetDescription) << "\n\n";
    out << headers.at(2) << "\nFollow these steps in order:\n";
    for (std::size_t i = 0; i < cotSteps.size(); ++i) out << i + 1 << ". " << cotSteps[i] << "\n";
    out << "\n" << headers.at(3) << "\n";
    if (conversationContext.empty()) out << "(no earlier turns)\n";
    for (std::size_t i = 0; i < conversationContext.size(); ++i) {
        out << "Turn " << i + 1 << "\n";
        out << "User: " << conversationContext[i].userMessage << "\n";
        out << "Assistant: " << conversationContext[i].explanation << "\n";
    }
    if (previousCode) out << "\nCode of the chart currently shown:\n<D3>" << *previousCode << "</D3>\n";
    out << "\n" << headers.at(4) << "\n" << trim(structuredIntents) << "\n";
    return out.str();
}

Json PromptDocument::to_json() const {
    Json turns = Json::array();
    for (const auto& t : conversationContext) turns.push_back({{"userMessage", t.userMessage}, {"explanation", t.explanation}});
    Json j = {{"taskContext", taskContext},
              {"datasetDescription", datasetDescription},
              {"cotSteps", cotSteps},
              {"conversationContext", std::move(turns)}};
    j["previousCode"] = previousCode ? Json(*previousCode) : Json(nullptr);
    j["structuredIntents"] = structuredIntents;
    return j;
}

PromptDocument PromptDocument::from_json(const Json& j) {
    PromptDocument p;
    p.taskContext = j.at("taskContext").get<std::string>();
    p.datasetDescription = j.at("datasetDescription").get<std::string>();
    p.cotSteps = j.at("cotSteps").get<std::vector<std::string>>();
    for (const auto& t : j.at("conversationContext"))
        p.conversationContext.push_back({t.at("userMessage").get<std::string>(), t.at("explanation").get<std::string>()});
    if (j.contains("previousCode") && !j["previousCode"].is_null()) p.previousCode = j["previousCode"].get<std::string>();
    p.structuredIntents = j.at("structuredIntents").get<std::string>();
    return p;
}

} // namespace vizlink
