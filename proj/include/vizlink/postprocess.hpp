#pragma once

#include "vizlink/util.hpp"

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace vizlink {

inline constexpr std::string_view kCodeOpenTag = "<D3>";
inline constexpr std::string_view kCodeCloseTag = "</D3>";
// Inserted after the append that ends each data-join chain.
inline constexpr std::string_view kDataBindingCall = ".attr(\"data\", d => JSON.stringify(d))";
inline constexpr std::string_view kScaleNameX = "xScale";
inline constexpr std::string_view kScaleNameY = "yScale";

enum class FailureClass {
    MissingCodeTag,
    SyntaxError,
    UnknownFunction,
    UndefinedVariable,
    MissingGlobalScales,
    LayoutSuspect,
};

std::string_view to_string(FailureClass f);
std::optional<FailureClass> failure_class_from_string(std::string_view s);

struct Failure {
    FailureClass kind;
    std::string detail;
    bool operator==(const Failure&) const = default;
};

struct ContractValidation {
    bool hasRootGlobal = false;
    bool hasViewportGlobals = false;
    bool returnsGlobalScales = false;

    bool ok() const { return hasRootGlobal && hasViewportGlobals && returnsGlobalScales; }
    bool operator==(const ContractValidation&) const = default;
};

struct VisualizationArtifact {
    std::string rawResponse;
    std::string explanation;
    std::string extractedCode;
    std::string processedCode;
    ContractValidation validation;
    std::optional<Failure> failure;
    std::vector<std::string> warnings;

    Json to_json() const;
    static VisualizationArtifact from_json(const Json& j);
    bool operator==(const VisualizationArtifact&) const = default;
};

// Permitted library entry points and globals for generated code.
struct ApiManifest {
    std::set<std::string, std::less<>> d3Functions; // names after "d3."
    std::set<std::string, std::less<>> globals;
    std::set<std::string, std::less<>> forbidden;

    static ApiManifest parse(std::string_view text);
    static const ApiManifest& builtin();
};

struct Extraction {
    std::string explanation;
    std::string code;
    bool fromFencedBlock = false;
};

// Code between the first open tag and the last close tag; falls back to the
// longest fenced block. Throws Error(MissingCodeTag).
Extraction extract_code(std::string_view raw);

// Throws Error(ParseFailure) when the code does not tokenize.
ContractValidation validate_contract(std::string_view code);

struct SymbolReport {
    std::vector<std::string> undefinedIdentifiers;
    std::vector<std::string> unknownFunctions;
    std::vector<std::string> layoutIssues;
};

// Best-effort symbol table check: used identifiers against declarations, the
// injected globals and the manifest. Throws Error(ParseFailure).
SymbolReport analyze_symbols(std::string_view code, const ApiManifest& manifest = ApiManifest::builtin());

struct BindingRewrite {
    std::string code;
    int chains = 0;     // data-join chains found
    int insertions = 0; // chains that lacked the data attribute
};

// Throws Error(ParseFailure).
BindingRewrite rewrite_data_binding_detailed(std::string_view code);
std::string rewrite_data_binding(std::string_view code);

// extract -> validate -> rewrite. Never throws; failures land in the artifact.
VisualizationArtifact process(std::string_view raw);
// Re-validates user-edited code while keeping the explanation of the original artifact.
VisualizationArtifact process_code(std::string_view explanation, std::string_view code);

} // namespace vizlink
