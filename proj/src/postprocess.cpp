#include "vizlink/postprocess.hpp"

#include "vizlink/assets.hpp"
#include "vizlink/error.hpp"
#include "vizlink/js_tokens.hpp"

#include <algorithm>
#include <sstream>

namespace vizlink {

using js::Token;
using js::TokenKind;

std::string_view to_string(FailureClass f) {
    switch (f) {
    case FailureClass::MissingCodeTag: return "MissingCodeTag";
    case FailureClass::SyntaxError: return "SyntaxError";
    case FailureClass::UnknownFunction: return "UnknownFunction";
    case FailureClass::UndefinedVariable: return "UndefinedVariable";
    case FailureClass::MissingGlobalScales: return "MissingGlobalScales";
    case FailureClass::LayoutSuspect: return "LayoutSuspect";
    }
    return "SyntaxError";
}

std::optional<FailureClass> failure_class_from_string(std::string_view s) {
    for (auto f : {FailureClass::MissingCodeTag, FailureClass::SyntaxError, FailureClass::UnknownFunction,
                   FailureClass::UndefinedVariable, FailureClass::MissingGlobalScales, FailureClass::LayoutSuspect})
        if (to_string(f) == s) return f;
    return std::nullopt;
}

Json VisualizationArtifact::to_json() const {
    Json j = {{"rawResponse", rawResponse},
              {"explanation", explanation},
              {"extractedCode", extractedCode},
              {"processedCode", processedCode},
              {"validation",
               {{"hasRootGlobal", validation.hasRootGlobal},
                {"hasViewportGlobals", validation.hasViewportGlobals},
                {"returnsGlobalScales", validation.returnsGlobalScales}}}};
    j["failure"] = failure ? Json{{"class", std::string(to_string(failure->kind))}, {"detail", failure->detail}}
                           : Json(nullptr);
    j["warnings"] = warnings;
    return j;
}

VisualizationArtifact VisualizationArtifact::from_json(const Json& j) {
    VisualizationArtifact a;
    a.rawResponse = j.at("rawResponse").get<std::string>();
    a.explanation = j.at("explanation").get<std::string>();
    a.extractedCode = j.at("extractedCode").get<std::string>();
    a.processedCode = j.at("processedCode").get<std::string>();
    const Json& v = j.at("validation");
    a.validation = {v.at("hasRootGlobal").get<bool>(), v.at("hasViewportGlobals").get<bool>(),
                    v.at("returnsGlobalScales").get<bool>()};
    if (j.contains("failure") && !j["failure"].is_null()) {
        auto kind = failure_class_from_string(j["failure"].at("class").get<std::string>());
        if (!kind) throw Error(ErrorCode::CorruptArchive, "unknown failure class");
        a.failure = Failure{*kind, j["failure"].at("detail").get<std::string>()};
    }
    a.warnings = j.at("warnings").get<std::vector<std::string>>();
    return a;
}

ApiManifest ApiManifest::parse(std::string_view text) {
    ApiManifest m;
    std::istringstream in{std::string(text)};
    std::string section;
    for (std::string line; std::getline(in, line);) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = line.substr(1, line.size() - 2);
            continue;
        }
        if (section == "d3" && line.rfind("d3.", 0) == 0) m.d3Functions.insert(line.substr(3));
        else if (section == "globals") m.globals.insert(line);
        else if (section == "forbidden") m.forbidden.insert(line);
    }
    return m;
}

const ApiManifest& ApiManifest::builtin() {
    static const ApiManifest manifest = parse(assets::get("allowed_api.txt"));
    return manifest;
}

// ---------------------------------------------------------------------------
// Extraction

namespace {

std::string join_parts(std::string_view before, std::string_view after) {
    std::string a = trim(before), b = trim(after);
    if (a.empty()) return b;
    if (b.empty()) return a;
    return a + "\n" + b;
}

} // namespace

Extraction extract_code(std::string_view raw) {
    auto open = raw.find(kCodeOpenTag);
    auto close = raw.rfind(kCodeCloseTag);
    if (open != std::string_view::npos && close != std::string_view::npos && close >= open + kCodeOpenTag.size()) {
        Extraction e;
        e.code = std::string(raw.substr(open + kCodeOpenTag.size(), close - open - kCodeOpenTag.size()));
        e.explanation = join_parts(raw.substr(0, open), raw.substr(close + kCodeCloseTag.size()));
        return e;
    }
    // fenced fallback: pair fences in order, keep the longest body
    std::optional<Extraction> best;
    std::size_t pos = 0;
    while (true) {
        auto fence = raw.find("```", pos);
        if (fence == std::string_view::npos) break;
        auto line_end = raw.find('\n', fence + 3);
        if (line_end == std::string_view::npos) break;
        auto closing = raw.find("```", line_end + 1);
        if (closing == std::string_view::npos) break;
        std::string_view body = raw.substr(line_end + 1, closing - line_end - 1);
        if (!best || body.size() > best->code.size()) {
            Extraction e;
            e.code = std::string(body);
            e.explanation = join_parts(raw.substr(0, fence), raw.substr(closing + 3));
            e.fromFencedBlock = true;
            best = std::move(e);
        }
        pos = closing + 3;
    }
    if (best) return *best;
    throw Error(ErrorCode::MissingCodeTag, "response contains neither a <D3> tag pair nor a fenced code block");
}

// ---------------------------------------------------------------------------
// Symbol analysis

namespace {

const std::set<std::string, std::less<>>& injected_globals() {
    static const std::set<std::string, std::less<>> names = {"svg", "vw", "vh", "data", "d3"};
    return names;
}

bool is_property(const std::vector<Token>& t, std::size_t i) {
    return i > 0 && (t[i - 1].is(".") || t[i - 1].is("?."));
}

bool is_object_key(const std::vector<Token>& t, std::size_t i) {
    return i > 0 && i + 1 < t.size() && t[i + 1].is(":") && (t[i - 1].is("{") || t[i - 1].is(","));
}

std::size_t matching_back(const std::vector<Token>& t, std::size_t close) {
    std::string_view c = t[close].text;
    std::string_view o = c == ")" ? "(" : c == "]" ? "[" : "{";
    int depth = 0;
    for (std::size_t i = close + 1; i-- > 0;) {
        if (t[i].kind != TokenKind::Punct) continue;
        if (t[i].text == c) ++depth;
        else if (t[i].text == o && --depth == 0) return i;
    }
    return t.size();
}

void declare_range(const std::vector<Token>& t, std::size_t from, std::size_t to, std::set<std::string, std::less<>>& out) {
    for (std::size_t k = from; k < to && k < t.size(); ++k) {
        if (t[k].kind != TokenKind::Identifier || is_property(t, k)) continue;
        if (k + 1 < t.size() && t[k + 1].is(":")) continue; // renamed key in a pattern
        out.insert(std::string(t[k].text));
    }
}

std::set<std::string, std::less<>> declarations(const std::vector<Token>& t) {
    static const std::set<std::string_view> statement_starts = {"const", "let", "var",    "function", "return", "if",
                                                                "for",   "while", "class", "switch",  "try",    "throw"};
    std::set<std::string, std::less<>> out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const Token& tok = t[i];
        if (tok.kind == TokenKind::Keyword && (tok.is("const") || tok.is("let") || tok.is("var"))) {
            std::size_t j = i + 1;
            while (j < t.size()) {
                if (t[j].kind == TokenKind::Identifier) {
                    out.insert(std::string(t[j].text));
                    ++j;
                } else if (t[j].is("{") || t[j].is("[")) {
                    std::size_t end = js::matching(t, j);
                    declare_range(t, j + 1, end, out);
                    j = end + 1;
                } else {
                    break;
                }
                if (j >= t.size() || !t[j].is("=")) {
                    if (j < t.size() && t[j].is(",")) {
                        ++j;
                        continue;
                    }
                    break;
                }
                int depth = 0;
                ++j;
                for (; j < t.size(); ++j) {
                    const Token& x = t[j];
                    if (x.is("(") || x.is("[") || x.is("{")) ++depth;
                    else if (x.is(")") || x.is("]") || x.is("}")) {
                        if (--depth < 0) break;
                    } else if (depth == 0 && (x.is(",") || x.is(";"))) break;
                    else if (depth == 0 && x.kind == TokenKind::Keyword && statement_starts.count(x.text)) break;
                }
                if (j < t.size() && t[j].is(",")) {
                    ++j;
                    continue;
                }
                break;
            }
        } else if (tok.kind == TokenKind::Keyword && tok.is("function")) {
            std::size_t j = i + 1;
            if (j < t.size() && t[j].kind == TokenKind::Identifier) out.insert(std::string(t[j++].text));
            if (j < t.size() && t[j].is("(")) declare_range(t, j + 1, js::matching(t, j), out);
        } else if (tok.is("=>") && i > 0) {
            if (t[i - 1].kind == TokenKind::Identifier) out.insert(std::string(t[i - 1].text));
            else if (t[i - 1].is(")")) declare_range(t, matching_back(t, i - 1) + 1, i - 1, out);
        } else if (tok.kind == TokenKind::Keyword && (tok.is("catch") || tok.is("class"))) {
            std::size_t j = i + 1;
            if (j < t.size() && t[j].is("(")) ++j;
            if (j < t.size() && t[j].kind == TokenKind::Identifier) out.insert(std::string(t[j].text));
        }
    }
    return out;
}

std::set<std::string, std::less<>> free_uses(const std::vector<Token>& t) {
    std::set<std::string, std::less<>> used;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i].kind == TokenKind::Identifier && !is_property(t, i) && !is_object_key(t, i))
            used.insert(std::string(t[i].text));
    return used;
}

void push_unique(std::vector<std::string>& v, std::string s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(std::move(s));
}

bool returns_scales(const std::vector<Token>& t) {
    std::optional<std::size_t> last_return;
    int depth = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i].is("(") || t[i].is("[") || t[i].is("{")) ++depth;
        else if (t[i].is(")") || t[i].is("]") || t[i].is("}")) --depth;
        else if (depth == 0 && t[i].kind == TokenKind::Keyword && t[i].is("return")) last_return = i;
    }
    if (!last_return || *last_return + 1 >= t.size() || !t[*last_return + 1].is("{")) return false;
    std::size_t open = *last_return + 1;
    std::size_t close = js::matching(t, open);
    if (close >= t.size()) return false;
    std::size_t after = close + 1;
    if (after < t.size() && t[after].is(";")) ++after;
    if (after != t.size()) return false;
    bool has_x = false, has_y = false;
    int d = 0;
    for (std::size_t k = open + 1; k < close; ++k) {
        if (t[k].is("(") || t[k].is("[") || t[k].is("{")) ++d;
        else if (t[k].is(")") || t[k].is("]") || t[k].is("}")) --d;
        else if (d == 0 && t[k].kind == TokenKind::Identifier && (t[k - 1].is("{") || t[k - 1].is(",")) &&
                 (t[k + 1].is(",") || t[k + 1].is("}") || t[k + 1].is(":"))) {
            has_x |= t[k].text == kScaleNameX;
            has_y |= t[k].text == kScaleNameY;
        }
    }
    return has_x && has_y;
}

} // namespace

ContractValidation validate_contract(std::string_view code) {
    const auto tokens = js::tokenize(code);
    const auto declared = declarations(tokens);
    const auto used = free_uses(tokens);
    auto injected_use = [&](std::string_view name) { return used.count(name) && !declared.count(name); };
    ContractValidation v;
    v.hasRootGlobal = injected_use("svg");
    v.hasViewportGlobals = injected_use("vw") && injected_use("vh");
    v.returnsGlobalScales = returns_scales(tokens);
    return v;
}

SymbolReport analyze_symbols(std::string_view code, const ApiManifest& manifest) {
    const auto t = js::tokenize(code);
    const auto declared = declarations(t);
    SymbolReport r;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i].kind != TokenKind::Identifier) continue;
        const std::string name(t[i].text);
        if (is_property(t, i)) {
            bool on_d3 = i >= 2 && t[i - 2].is("d3") && t[i - 2].kind == TokenKind::Identifier && !is_property(t, i - 2) &&
                         !declared.count("d3");
            if (on_d3 && !manifest.d3Functions.count(name)) push_unique(r.unknownFunctions, "d3." + name);
            continue;
        }
        if (is_object_key(t, i)) continue;
        if (manifest.forbidden.count(name) && !declared.count(name)) {
            push_unique(r.unknownFunctions, name);
            continue;
        }
        if (declared.count(name) || injected_globals().count(name) || manifest.globals.count(name)) continue;
        if (i + 1 < t.size() && t[i + 1].is("(")) push_unique(r.unknownFunctions, name);
        else push_unique(r.undefinedIdentifiers, name);
    }
    // svg.attr("width"|"height"|"viewBox", <literal>) overrides the injected viewport
    for (std::size_t i = 0; i + 6 < t.size(); ++i) {
        if (!(t[i].is("svg") && !is_property(t, i) && t[i + 1].is(".") && t[i + 2].is("attr") && t[i + 3].is("(") &&
              t[i + 4].kind == TokenKind::String && t[i + 5].is(",")))
            continue;
        auto attr = js::string_body(t[i + 4]);
        if ((attr == "width" || attr == "height" || attr == "viewBox") &&
            (t[i + 6].kind == TokenKind::Number || t[i + 6].kind == TokenKind::String))
            push_unique(r.layoutIssues, "root svg " + std::string(attr) + " fixed to " + std::string(t[i + 6].text));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Data binding

BindingRewrite rewrite_data_binding_detailed(std::string_view code) {
    const auto t = js::tokenize(code);
    std::vector<std::size_t> insert_at;
    BindingRewrite out;

    auto is_call_link = [&](std::size_t k, std::string_view name) {
        return k + 2 < t.size() && (t[k].is(".") || t[k].is("?.")) && t[k + 1].kind == TokenKind::Identifier &&
               t[k + 1].is(name) && t[k + 2].is("(");
    };
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!is_call_link(i, "data")) continue;
        std::size_t k = js::matching(t, i + 2) + 1;
        bool enter_seen = false;
        std::optional<std::size_t> append_end;
        bool bound_already = false;
        while (k < t.size()) {
            if ((t[k].is(".") || t[k].is("?.")) && k + 1 < t.size() && t[k + 1].kind == TokenKind::Identifier) {
                const bool call = k + 2 < t.size() && t[k + 2].is("(");
                if (call && t[k + 1].is("data")) break; // the next join starts here
                std::size_t next = call ? js::matching(t, k + 2) + 1 : k + 2;
                if (call && !append_end) {
                    if (t[k + 1].is("enter")) enter_seen = true;
                    else if (t[k + 1].is("append") && enter_seen) append_end = next - 1;
                } else if (call && append_end && t[k + 1].is("attr") && k + 3 < t.size() &&
                           t[k + 3].kind == TokenKind::String && js::string_body(t[k + 3]) == "data") {
                    bound_already = true;
                }
                k = next;
            } else if (t[k].is("[")) {
                k = js::matching(t, k) + 1;
            } else {
                break;
            }
        }
        if (!append_end) continue;
        ++out.chains;
        if (!bound_already) insert_at.push_back(t[*append_end].end());
    }
    std::sort(insert_at.begin(), insert_at.end());
    std::size_t cursor = 0;
    for (std::size_t pos : insert_at) {
        out.code.append(code.substr(cursor, pos - cursor));
        out.code.append(kDataBindingCall);
        cursor = pos;
    }
    out.code.append(code.substr(cursor));
    out.insertions = static_cast<int>(insert_at.size());
    return out;
}

std::string rewrite_data_binding(std::string_view code) { return rewrite_data_binding_detailed(code).code; }

// ---------------------------------------------------------------------------

namespace {

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
    return out;
}

VisualizationArtifact finish(VisualizationArtifact a, std::string explanation, std::string code) {
    a.explanation = std::move(explanation);
    a.extractedCode = std::move(code);
    a.processedCode = a.extractedCode;
    SymbolReport report;
    try {
        a.validation = validate_contract(a.extractedCode);
        report = analyze_symbols(a.extractedCode);
        a.processedCode = rewrite_data_binding(a.extractedCode);
    } catch (const Error& e) {
        a.failure = Failure{FailureClass::SyntaxError, e.what()};
        return a;
    }
    if (!report.unknownFunctions.empty()) {
        a.failure = Failure{FailureClass::UnknownFunction, "not in the allowed API: " + join(report.unknownFunctions)};
    } else if (!report.undefinedIdentifiers.empty()) {
        a.failure = Failure{FailureClass::UndefinedVariable, "undefined: " + join(report.undefinedIdentifiers)};
    } else if (!a.validation.ok()) {
        std::vector<std::string> missing;
        if (!a.validation.hasRootGlobal) missing.push_back("svg unused");
        if (!a.validation.hasViewportGlobals) missing.push_back("vw/vh unused");
        if (!a.validation.returnsGlobalScales)
            missing.push_back("code does not end with return { " + std::string(kScaleNameX) + ", " +
                              std::string(kScaleNameY) + " }");
        a.failure = Failure{FailureClass::MissingGlobalScales, join(missing)};
    } else if (!report.layoutIssues.empty()) {
        a.failure = Failure{FailureClass::LayoutSuspect, join(report.layoutIssues)};
    }
    return a;
}

} // namespace

VisualizationArtifact process(std::string_view raw) {
    VisualizationArtifact a;
    a.rawResponse = std::string(raw);
    Extraction ex;
    try {
        ex = extract_code(raw);
    } catch (const Error& e) {
        a.explanation = trim(raw);
        a.failure = Failure{FailureClass::MissingCodeTag, e.what()};
        return a;
    }
    if (ex.fromFencedBlock) a.warnings.push_back("MissingCodeTag: code taken from the longest fenced block");
    return finish(std::move(a), std::move(ex.explanation), std::move(ex.code));
}

VisualizationArtifact process_code(std::string_view explanation, std::string_view code) {
    VisualizationArtifact a;
    std::string expl = trim(explanation);
    a.rawResponse = (expl.empty() ? std::string() : expl + "\n") + std::string(kCodeOpenTag) + std::string(code) +
                    std::string(kCodeCloseTag);
    return finish(std::move(a), std::move(expl), std::string(code));
}

} // namespace vizlink
