#include "vizlink/interaction.hpp"

#include "vizlink/assets.hpp"
#include "vizlink/error.hpp"

#include <algorithm>
#include <cctype>

namespace vizlink {

std::string_view to_string(ManipulationKind kind) {
    switch (kind) {
    case ManipulationKind::ClickSelect: return "ClickSelect";
    case ManipulationKind::LassoSelect: return "LassoSelect";
    case ManipulationKind::BoxSelect: return "BoxSelect";
    case ManipulationKind::FreeDraw: return "FreeDraw";
    }
    return "ClickSelect";
}

std::optional<ManipulationKind> manipulation_kind_from_string(std::string_view s) {
    if (s == "ClickSelect") return ManipulationKind::ClickSelect;
    if (s == "LassoSelect") return ManipulationKind::LassoSelect;
    if (s == "BoxSelect") return ManipulationKind::BoxSelect;
    if (s == "FreeDraw") return ManipulationKind::FreeDraw;
    return std::nullopt;
}

namespace {

[[noreturn]] void invalid(int id, const std::string& what) {
    throw Error(ErrorCode::InvalidManipulation, "manipulation " + std::to_string(id) + ": " + what);
}

// Orders two axis endpoints; nullopt when they are not comparable.
std::optional<bool> endpoint_le(const Json& a, const Json& b) {
    if (a.is_number() && b.is_number()) return a.get<double>() <= b.get<double>();
    if (a.is_string() && b.is_string()) {
        auto ta = parse_iso_datetime(a.get<std::string>());
        auto tb = parse_iso_datetime(b.get<std::string>());
        if (ta && tb) return *ta <= *tb;
    }
    return std::nullopt;
}

std::string render_endpoint(const Json& v) {
    if (v.is_number()) return format_number(v.get<double>());
    if (v.is_string()) {
        const auto& s = v.get_ref<const std::string&>();
        if (auto t = parse_iso_datetime(s)) return format_iso_datetime(*t);
        return s;
    }
    return v.dump();
}

std::string render_scalar(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
    if (v.is_number()) return format_number(v.get<double>());
    if (v.is_object()) return format_datum(v);
    return v.dump();
}

bool starts_with_vowel(std::string_view s) {
    if (s.empty()) return false;
    char c = static_cast<char>(std::tolower(static_cast<unsigned char>(s.front())));
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

} // namespace

void DirectManipulation::validate() const {
    const bool selects = kind == ManipulationKind::ClickSelect || kind == ManipulationKind::LassoSelect;
    if (!selects && !elements.empty())
        invalid(id, "elements are only allowed on click and lasso selections");
    if ((kind == ManipulationKind::BoxSelect) != box.has_value())
        invalid(id, "box must be present exactly for BoxSelect");
    if ((kind == ManipulationKind::FreeDraw) != drawing.has_value())
        invalid(id, "drawing must be present exactly for FreeDraw");
    for (const auto& e : elements) {
        if (e.tag.empty()) invalid(id, "element tag is empty");
        if (!e.datum.is_object()) invalid(id, "element datum must be an object");
    }
    if (box) {
        auto x_ok = endpoint_le(box->x1, box->x2);
        auto y_ok = endpoint_le(box->y1, box->y2);
        if (!x_ok || !y_ok) invalid(id, "box endpoints must be numbers or ISO-8601 strings of one type per axis");
        if (!*x_ok || !*y_ok) invalid(id, "box endpoints must satisfy x1<=x2 and y1<=y2");
        if (!(box->fx >= 0 && box->fx <= 1) || !(box->fy >= 0 && box->fy <= 1))
            invalid(id, "pixel extent fractions must lie in [0,1]");
    }
}

Json DirectManipulation::to_json() const {
    Json j = {{"id", id}, {"kind", std::string(to_string(kind))}};
    if (kind == ManipulationKind::ClickSelect || kind == ManipulationKind::LassoSelect) {
        Json arr = Json::array();
        for (const auto& e : elements) arr.push_back({{"tag", e.tag}, {"datum", e.datum}});
        j["elements"] = std::move(arr);
    }
    if (box)
        j["box"] = {{"x1", box->x1}, {"x2", box->x2}, {"y1", box->y1},
                    {"y2", box->y2}, {"fx", box->fx}, {"fy", box->fy}};
    if (drawing) {
        Json strokes = Json::array();
        for (const auto& stroke : drawing->strokes) {
            Json pts = Json::array();
            for (const auto& p : stroke) pts.push_back(Json::array({p.x, p.y}));
            strokes.push_back(std::move(pts));
        }
        j["drawing"] = {{"strokes", std::move(strokes)}, {"screenshotPngBase64", base64_encode(drawing->screenshot)}};
    }
    return j;
}

DirectManipulation DirectManipulation::from_json(const Json& j) {
    DirectManipulation m;
    try {
        if (!j.is_object()) invalid(0, "interaction must be a JSON object");
        m.id = j.at("id").get<int>();
        auto kind = manipulation_kind_from_string(j.at("kind").get<std::string>());
        if (!kind) invalid(m.id, "unknown kind '" + j.at("kind").get<std::string>() + "'");
        m.kind = *kind;
        for (const auto& [key, _] : j.items())
            if (key != "id" && key != "kind" && key != "elements" && key != "box" && key != "drawing")
                invalid(m.id, "unexpected field '" + key + "'");
        if (j.contains("elements"))
            for (const auto& e : j["elements"]) m.elements.push_back({e.at("tag").get<std::string>(), e.at("datum")});
        if (j.contains("box")) {
            const Json& b = j["box"];
            m.box = BoxSelection{b.at("x1"), b.at("x2"), b.at("y1"), b.at("y2"), b.at("fx").get<double>(),
                                 b.at("fy").get<double>()};
        }
        if (j.contains("drawing")) {
            const Json& d = j["drawing"];
            FreeDrawing fd;
            for (const auto& stroke : d.at("strokes")) {
                std::vector<StrokePoint> pts;
                for (const auto& p : stroke) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
                fd.strokes.push_back(std::move(pts));
            }
            fd.screenshot = base64_decode(d.at("screenshotPngBase64").get<std::string>());
            m.drawing = std::move(fd);
        }
        if (m.kind == ManipulationKind::ClickSelect || m.kind == ManipulationKind::LassoSelect) {
            if (!j.contains("elements")) invalid(m.id, "elements missing");
        }
    } catch (const Json::exception& e) {
        invalid(m.id, std::string("does not match the interaction schema: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidManipulation) throw;
        invalid(m.id, e.what());
    }
    m.validate();
    return m;
}

Json ManipulationDescriptor::to_json() const {
    Json j = {{"manipulationId", manipulationId}, {"kind", std::string(to_string(kind))}, {"text", text}};
    j["referencedData"] = Json(referencedData);
    j["inferredIntent"] = inferredIntent ? Json(*inferredIntent) : Json(nullptr);
    return j;
}

ManipulationDescriptor ManipulationDescriptor::from_json(const Json& j) {
    ManipulationDescriptor d;
    d.manipulationId = j.at("manipulationId").get<int>();
    auto kind = manipulation_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorCode::InvalidRequest, "unknown descriptor kind");
    d.kind = *kind;
    d.text = j.at("text").get<std::string>();
    for (const auto& r : j.at("referencedData")) d.referencedData.push_back(r);
    if (j.contains("inferredIntent") && !j["inferredIntent"].is_null())
        d.inferredIntent = j["inferredIntent"].get<std::string>();
    return d;
}

std::string format_datum(const Json& datum) {
    if (!datum.is_object()) return render_scalar(datum);
    std::string out = "{";
    std::size_t shown = 0;
    for (const auto& [key, value] : datum.items()) {
        if (shown == kMaxDatumFields) {
            out += ", …";
            break;
        }
        if (shown) out += ", ";
        out += key + ": " + render_scalar(value);
        ++shown;
    }
    return out + "}";
}

ManipulationDescriptor describe_selection(const DirectManipulation& m) {
    if (m.kind != ManipulationKind::ClickSelect && m.kind != ManipulationKind::LassoSelect)
        throw Error(ErrorCode::InvalidManipulation, "describe_selection needs a click or lasso selection");
    if (m.elements.empty()) throw Error(ErrorCode::NoElements, "manipulation " + std::to_string(m.id) + " selected no elements");

    std::vector<std::string> tags;
    for (const auto& e : m.elements)
        if (std::find(tags.begin(), tags.end(), e.tag) == tags.end()) tags.push_back(e.tag);
    std::string tag_text;
    for (size_t i = 0; i < tags.size(); ++i) tag_text += (i ? "/" : "") + tags[i];

    ManipulationDescriptor d;
    d.manipulationId = m.id;
    d.kind = m.kind;
    const bool single = m.elements.size() == 1;
    d.text = "user selected ";
    d.text += single ? (starts_with_vowel(tag_text) ? "an " : "a ") : std::to_string(m.elements.size()) + " ";
    d.text += tag_text + (single ? " element" : " elements");
    d.text += single ? ", with data item: " : ", with data items: ";
    for (size_t i = 0; i < m.elements.size(); ++i) {
        if (i) d.text += ", ";
        d.text += format_datum(m.elements[i].datum);
        d.referencedData.push_back(m.elements[i].datum);
    }
    return d;
}

std::optional<ManipulationDescriptor> describe_box(const DirectManipulation& m, bool scales_available) {
    if (m.kind != ManipulationKind::BoxSelect || !m.box)
        throw Error(ErrorCode::InvalidManipulation, "describe_box needs a box selection");
    if (!scales_available)
        throw Error(ErrorCode::NoActiveScales,
                    "manipulation " + std::to_string(m.id) + ": the active chart did not expose global X/Y scales");
    const BoxSelection& b = *m.box;
    const bool use_x = b.fx >= kMinAxisExtentFraction;
    const bool use_y = b.fy >= kMinAxisExtentFraction;
    if (!use_x && !use_y) return std::nullopt;

    auto range = [](const Json& lo, const Json& hi) {
        return "[" + render_endpoint(lo) + ", " + render_endpoint(hi) + "]";
    };
    ManipulationDescriptor d;
    d.manipulationId = m.id;
    d.kind = m.kind;
    d.text = "selected data range on the ";
    if (use_x) d.text += "x-axis: " + range(b.x1, b.x2);
    if (use_x && use_y) d.text += " and ";
    if (use_y) d.text += "y-axis: " + range(b.y1, b.y2);
    return d;
}

ManipulationDescriptor describe_freedraw(const DirectManipulation& m, std::string_view nl_context,
                                         AgentClient& vision) {
    if (m.kind != ManipulationKind::FreeDraw || !m.drawing)
        throw Error(ErrorCode::InvalidManipulation, "describe_freedraw needs a free drawing");
    if (m.drawing->screenshot.empty())
        throw Error(ErrorCode::InvalidManipulation, "manipulation " + std::to_string(m.id) + " has no screenshot");

    std::string prompt = assets::render(assets::get("vision_prompt.txt"), {{"nl", std::string(nl_context)}});
    std::string reply = trim(vision.complete(AgentRole::DescriptorVision, std::move(prompt), m.drawing->screenshot));
    if (reply.empty())
        throw Error(ErrorCode::AgentMalformedResponse,
                    "vision agent returned no interpretation for manipulation " + std::to_string(m.id));
    ManipulationDescriptor d;
    d.manipulationId = m.id;
    d.kind = m.kind;
    d.text = reply;
    d.inferredIntent = reply;
    return d;
}

DescribeOutcome describe_all(const std::vector<DirectManipulation>& manipulations, std::string_view nl,
                             bool scales_available, AgentClient& vision, const DescriptorReuse& reuse) {
    std::vector<const DirectManipulation*> ordered;
    for (const auto& m : manipulations) ordered.push_back(&m);
    std::stable_sort(ordered.begin(), ordered.end(), [](auto a, auto b) { return a->id < b->id; });

    DescribeOutcome out;
    for (const auto* m : ordered) {
        if (reuse) {
            if (auto cached = reuse(*m)) {
                out.descriptors.push_back(std::move(*cached));
                continue;
            }
        }
        switch (m->kind) {
        case ManipulationKind::ClickSelect:
        case ManipulationKind::LassoSelect:
            if (m->elements.empty()) {
                out.warnings.push_back("manipulation " + std::to_string(m->id) + " selected no elements; ignored");
                break;
            }
            out.descriptors.push_back(describe_selection(*m));
            break;
        case ManipulationKind::BoxSelect:
            try {
                if (auto d = describe_box(*m, scales_available)) out.descriptors.push_back(std::move(*d));
                else
                    out.warnings.push_back("manipulation " + std::to_string(m->id) +
                                           ": box selection below the 5% axis threshold on both axes; discarded");
            } catch (const Error& e) {
                if (e.code() != ErrorCode::NoActiveScales) throw;
                out.warnings.push_back(e.what());
            }
            break;
        case ManipulationKind::FreeDraw: out.descriptors.push_back(describe_freedraw(*m, nl, vision)); break;
        }
    }
    return out;
}

} // namespace vizlink
