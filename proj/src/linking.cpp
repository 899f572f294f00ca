#include "vizlink/linking.hpp"

#include "vizlink/assets.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace vizlink {

std::string_view to_string(LinkRule rule) {
    switch (rule) {
    case LinkRule::Order: return "Order";
    case LinkRule::Content: return "Content";
    case LinkRule::Flexible: return "Flexible";
    }
    return "Order";
}

namespace {

LinkRule link_rule_from_string(std::string_view s) {
    if (s == "Order") return LinkRule::Order;
    if (s == "Content") return LinkRule::Content;
    if (s == "Flexible") return LinkRule::Flexible;
    throw Error(ErrorCode::CorruptArchive, "unknown link rule '" + std::string(s) + "'");
}

} // namespace

Json TriggerPhrase::to_json() const {
    return {{"text", text}, {"start", start}, {"end", end}, {"cardinality", cardinality}};
}

TriggerPhrase TriggerPhrase::from_json(const Json& j) {
    return {j.at("text").get<std::string>(), j.at("start").get<std::size_t>(), j.at("end").get<std::size_t>(),
            j.at("cardinality").get<int>()};
}

Json IntentLink::to_json() const {
    return {{"trigger", trigger.to_json()},
            {"descriptorIds", descriptorIds},
            {"rule", std::string(to_string(rule))},
            {"partial", partial}};
}

IntentLink IntentLink::from_json(const Json& j) {
    return {TriggerPhrase::from_json(j.at("trigger")), j.at("descriptorIds").get<std::vector<int>>(),
            link_rule_from_string(j.at("rule").get<std::string>()), j.at("partial").get<bool>()};
}

Json LinkResult::to_json() const {
    Json arr = Json::array();
    for (const auto& l : links) arr.push_back(l.to_json());
    return {{"links", std::move(arr)},
            {"unmatchedDescriptorIds", unmatchedDescriptorIds},
            {"rule", std::string(to_string(rule))}};
}

LinkResult LinkResult::from_json(const Json& j) {
    LinkResult r;
    for (const auto& l : j.at("links")) r.links.push_back(IntentLink::from_json(l));
    r.unmatchedDescriptorIds = j.at("unmatchedDescriptorIds").get<std::vector<int>>();
    r.rule = link_rule_from_string(j.at("rule").get<std::string>());
    return r;
}

Json linker_request(std::string_view nl, const std::vector<ManipulationDescriptor>& descriptors) {
    Json ds = Json::array();
    for (const auto& d : descriptors) ds.push_back({{"id", d.manipulationId}, {"text", d.text}});
    return {{"nl", std::string(nl)}, {"descriptors", std::move(ds)}};
}

// ---------------------------------------------------------------------------

LinkerAgent::LinkerAgent(AgentClient* client, std::string nl, std::vector<ManipulationDescriptor> descriptors)
    : client_(client), nl_(std::move(nl)), descriptors_(std::move(descriptors)) {}

const std::optional<Json>& LinkerAgent::reply() {
    if (asked_) return reply_;
    asked_ = true;
    if (!client_) {
        failure_ = "no linker agent configured";
        return reply_;
    }
    std::string prompt = assets::render(assets::get("linker_prompt.txt"),
                                        {{"request", linker_request(nl_, descriptors_).dump(2)}});
    std::string raw;
    ++calls_;
    try {
        raw = client_->complete(AgentRole::Linker, std::move(prompt));
    } catch (const Error& e) {
        failure_ = std::string(to_string(e.code())) + ": " + e.what();
        return reply_;
    }
    auto open = raw.find('{');
    auto close = raw.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open) {
        failure_ = "linker reply contains no JSON object";
        return reply_;
    }
    try {
        Json doc = Json::parse(raw.substr(open, close - open + 1));
        if (!doc.is_object() || !doc.contains("triggers") || !doc["triggers"].is_array()) {
            failure_ = "linker reply lacks a triggers array";
            return reply_;
        }
        reply_ = std::move(doc);
    } catch (const Json::exception& e) {
        failure_ = std::string("linker reply is not valid JSON: ") + e.what();
    }
    return reply_;
}

// ---------------------------------------------------------------------------
// Heuristic extraction

namespace {

struct Word {
    std::string lower;
    std::size_t start, end;
};

std::vector<Word> words_of(std::string_view s) {
    std::vector<Word> out;
    std::size_t i = 0;
    auto is_word = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '\'' ||
               (static_cast<unsigned char>(c) & 0x80);
    };
    while (i < s.size()) {
        if (!is_word(s[i])) {
            ++i;
            continue;
        }
        std::size_t b = i;
        while (i < s.size() && is_word(s[i])) ++i;
        out.push_back({to_lower(s.substr(b, i - b)), b, i});
    }
    return out;
}

const std::set<std::string>& stop_words() {
    static const std::set<std::string> words = {
        "in",      "on",    "at",      "within",  "with",    "of",     "for",     "to",     "from",   "by",
        "over",    "under", "between", "during",  "into",    "onto",   "and",     "or",     "but",    "as",
        "than",    "vs",    "versus",  "using",   "across",  "per",    "after",   "before", "around", "near",
        "above",   "below", "is",      "are",     "was",     "were",   "be",      "been",   "has",    "have",
        "had",     "do",    "does",    "did",     "can",     "could",  "should",  "would",  "will",   "shall",
        "may",     "might", "must",    "show",    "shows",   "highlight", "compare", "find", "display", "plot",
        "draw",    "make",  "add",     "remove",  "zoom",    "the",    "a",       "an",     "this",   "that",
        "these",   "those", "it",      "its",     "them",    "they",   "which",   "who",    "where",  "when",
        "while",   "if",    "then",    "so",      "also",    "please", "only",    "just",   "again",  "too",
        "here",    "there", "more",    "less",    "all",     "same",   "like",    "similar", "i",     "we",
        "you",     "me",    "us",      "my",      "our",     "your",   "what",    "how",    "why",    "not",
    };
    return words;
}

const std::map<std::string, int>& numerals() {
    static const std::map<std::string, int> n = {{"one", 1},   {"two", 2},   {"three", 3}, {"four", 4},
                                                 {"five", 5},  {"six", 6},   {"seven", 7}, {"eight", 8},
                                                 {"nine", 9},  {"ten", 10},  {"both", 2},  {"pair", 2}};
    return n;
}

bool looks_plural(const std::string& w) {
    if (w.size() < 3 || w.back() != 's') return false;
    return !(w.ends_with("ss") || w.ends_with("us") || w.ends_with("is"));
}

bool only_spaces(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; });
}

} // namespace

std::vector<TriggerPhrase> heuristic_triggers(std::string_view nl, std::size_t descriptor_count) {
    static const std::set<std::string> single = {"this", "that", "these", "those"};
    static const std::set<std::string> after_the = {"selected", "highlighted", "first", "second", "zoomed-in"};
    const auto words = words_of(nl);
    std::vector<TriggerPhrase> out;
    std::size_t assigned = 0;
    std::size_t i = 0;
    while (i < words.size()) {
        std::size_t det_len = 0;
        if (single.count(words[i].lower)) det_len = 1;
        else if (words[i].lower == "the" && i + 1 < words.size() && after_the.count(words[i + 1].lower) &&
                 only_spaces(nl.substr(words[i].end, words[i + 1].start - words[i].end)))
            det_len = 2;
        if (det_len == 0) {
            ++i;
            continue;
        }
        std::size_t j = i + det_len;
        std::size_t taken = 0;
        while (j < words.size() && taken < 3 && !stop_words().count(words[j].lower) &&
               only_spaces(nl.substr(words[j - 1].end, words[j].start - words[j - 1].end))) {
            ++j;
            ++taken;
        }
        if (taken == 0) {
            ++i;
            continue;
        }
        TriggerPhrase t;
        t.start = words[i].start;
        t.end = words[j - 1].end;
        t.text = std::string(nl.substr(t.start, t.end - t.start));
        std::optional<int> explicit_count;
        for (std::size_t k = i + det_len; k < j; ++k) {
            const auto& w = words[k].lower;
            if (auto it = numerals().find(w); it != numerals().end()) explicit_count = it->second;
            else if (auto v = parse_number(w); v && *v >= 1 && *v == static_cast<int>(*v))
                explicit_count = static_cast<int>(*v);
        }
        const bool plural = words[i].lower == "these" || words[i].lower == "those" || looks_plural(words[j - 1].lower);
        if (explicit_count) {
            t.cardinality = *explicit_count;
        } else if (plural) {
            std::size_t remaining = descriptor_count > assigned ? descriptor_count - assigned : 1;
            t.cardinality = static_cast<int>(std::max<std::size_t>(1, std::min<std::size_t>(2, remaining)));
        } else {
            t.cardinality = 1;
        }
        assigned += static_cast<std::size_t>(t.cardinality);
        out.push_back(std::move(t));
        i = j;
    }
    return out;
}

std::vector<TriggerPhrase> extract_triggers(std::string_view nl, std::size_t descriptor_count, LinkerAgent* agent) {
    if (trim(nl).empty()) return {};
    const std::optional<Json>* reply = agent ? &agent->reply() : nullptr;
    if (!reply || !reply->has_value()) return heuristic_triggers(nl, descriptor_count);

    std::vector<TriggerPhrase> found;
    auto overlaps = [&](std::size_t b, std::size_t e) {
        return std::any_of(found.begin(), found.end(), [&](const auto& t) { return b < t.end && t.start < e; });
    };
    std::size_t cursor = 0;
    for (const auto& item : (**reply)["triggers"]) {
        if (!item.is_object() || !item.contains("text") || !item["text"].is_string()) continue;
        const std::string text = item["text"].get<std::string>();
        if (text.empty()) continue;
        if (!item.contains("cardinality") || !item["cardinality"].is_number_integer()) continue;
        const int card = item["cardinality"].get<int>();
        if (card < 1) continue;
        // phrases the agent invented are dropped; offsets are always recomputed here
        std::size_t pos = nl.find(text, cursor);
        if (pos == std::string_view::npos || overlaps(pos, pos + text.size())) {
            pos = std::string_view::npos;
            for (std::size_t p = nl.find(text); p != std::string_view::npos; p = nl.find(text, p + 1)) {
                if (!overlaps(p, p + text.size())) {
                    pos = p;
                    break;
                }
            }
        }
        if (pos == std::string_view::npos) continue;
        found.push_back({text, pos, pos + text.size(), card});
        cursor = pos + text.size();
    }
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
    return found;
}

// ---------------------------------------------------------------------------
// Linking

std::vector<ManipulationKind> trigger_kinds(std::string_view trigger_text) {
    static const std::map<std::string, std::vector<ManipulationKind>> table = {
        {"trend", {ManipulationKind::FreeDraw}},
        {"trends", {ManipulationKind::FreeDraw}},
        {"arrow", {ManipulationKind::FreeDraw}},
        {"arrows", {ManipulationKind::FreeDraw}},
        {"drawn", {ManipulationKind::FreeDraw}},
        {"range", {ManipulationKind::BoxSelect}},
        {"ranges", {ManipulationKind::BoxSelect}},
        {"period", {ManipulationKind::BoxSelect}},
        {"periods", {ManipulationKind::BoxSelect}},
        {"axis", {ManipulationKind::BoxSelect}},
        {"axes", {ManipulationKind::BoxSelect}},
        {"point", {ManipulationKind::ClickSelect, ManipulationKind::LassoSelect}},
        {"points", {ManipulationKind::ClickSelect, ManipulationKind::LassoSelect}},
        {"bar", {ManipulationKind::ClickSelect, ManipulationKind::LassoSelect}},
        {"bars", {ManipulationKind::ClickSelect, ManipulationKind::LassoSelect}},
        {"item", {ManipulationKind::ClickSelect, ManipulationKind::LassoSelect}},
        {"items", {ManipulationKind::ClickSelect, ManipulationKind::LassoSelect}},
        {"selected", {ManipulationKind::ClickSelect, ManipulationKind::LassoSelect}},
    };
    // the head noun sits at the end of the phrase, so it wins
    auto words = words_of(trigger_text);
    for (auto it = words.rbegin(); it != words.rend(); ++it)
        if (auto hit = table.find(it->lower); hit != table.end()) return hit->second;
    return {};
}

namespace {

int clamped(const TriggerPhrase& t, std::size_t n) {
    return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(t.cardinality), n));
}

void fill_unmatched(LinkResult& r, const std::vector<ManipulationDescriptor>& descriptors) {
    std::set<int> used;
    for (const auto& l : r.links) used.insert(l.descriptorIds.begin(), l.descriptorIds.end());
    for (const auto& d : descriptors)
        if (!used.count(d.manipulationId)) r.unmatchedDescriptorIds.push_back(d.manipulationId);
}

std::optional<LinkResult> content_match(const std::vector<TriggerPhrase>& triggers,
                                        const std::vector<ManipulationDescriptor>& descriptors, const Json& reply) {
    std::set<int> known;
    for (const auto& d : descriptors) known.insert(d.manipulationId);
    const Json& entries = reply["triggers"];
    std::vector<bool> consumed(entries.size(), false);
    std::set<int> used;
    LinkResult r;
    r.rule = LinkRule::Content;
    for (const auto& t : triggers) {
        std::optional<std::size_t> match;
        for (std::size_t k = 0; k < entries.size() && !match; ++k) {
            const Json& e = entries[k];
            if (!consumed[k] && e.is_object() && e.contains("text") && e["text"].is_string() &&
                e["text"].get<std::string>() == t.text)
                match = k;
        }
        if (!match) return std::nullopt;
        consumed[*match] = true;
        const Json& ids = entries[*match].contains("descriptorIds") ? entries[*match]["descriptorIds"] : Json();
        if (!ids.is_array()) return std::nullopt;
        const int want = clamped(t, descriptors.size());
        if (static_cast<int>(ids.size()) != want) return std::nullopt;
        IntentLink link{t, {}, LinkRule::Content, want < t.cardinality};
        for (const auto& id : ids) {
            if (!id.is_number_integer()) return std::nullopt;
            int v = id.get<int>();
            if (!known.count(v) || !used.insert(v).second) return std::nullopt;
            link.descriptorIds.push_back(v);
        }
        r.links.push_back(std::move(link));
    }
    fill_unmatched(r, descriptors);
    return r;
}

LinkResult flexible_match(const std::vector<TriggerPhrase>& triggers,
                          const std::vector<ManipulationDescriptor>& descriptors) {
    LinkResult r;
    r.rule = LinkRule::Flexible;
    std::vector<bool> used(descriptors.size(), false);
    for (const auto& t : triggers) {
        const auto kinds = trigger_kinds(t.text);
        const int want = clamped(t, descriptors.size());
        IntentLink link{t, {}, LinkRule::Flexible, false};
        for (std::size_t k = 0; k < descriptors.size() && static_cast<int>(link.descriptorIds.size()) < want; ++k) {
            if (used[k]) continue;
            if (std::find(kinds.begin(), kinds.end(), descriptors[k].kind) == kinds.end()) continue;
            used[k] = true;
            link.descriptorIds.push_back(descriptors[k].manipulationId);
        }
        if (link.descriptorIds.empty()) continue;
        link.partial = static_cast<int>(link.descriptorIds.size()) < t.cardinality;
        r.links.push_back(std::move(link));
    }
    fill_unmatched(r, descriptors);
    return r;
}

} // namespace

LinkResult link(const std::vector<TriggerPhrase>& triggers, const std::vector<ManipulationDescriptor>& descriptors,
                LinkerAgent* agent) {
    const std::size_t n = descriptors.size();
    if (n == 0 || triggers.empty()) {
        LinkResult r;
        fill_unmatched(r, descriptors);
        return r;
    }

    std::size_t total = 0;
    for (const auto& t : triggers) total += static_cast<std::size_t>(clamped(t, n));
    if (total == n) {
        LinkResult r;
        r.rule = LinkRule::Order;
        std::size_t next = 0;
        for (const auto& t : triggers) {
            const int want = clamped(t, n);
            IntentLink l{t, {}, LinkRule::Order, want < t.cardinality};
            for (int k = 0; k < want; ++k) l.descriptorIds.push_back(descriptors[next++].manipulationId);
            r.links.push_back(std::move(l));
        }
        return r;
    }

    if (agent) {
        if (const auto& reply = agent->reply()) {
            if (auto r = content_match(triggers, descriptors, *reply)) return *r;
        }
    }
    return flexible_match(triggers, descriptors);
}

} // namespace vizlink
