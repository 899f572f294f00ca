#pragma once

#include "vizlink/agents.hpp"
#include "vizlink/util.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vizlink {

enum class ManipulationKind { ClickSelect, LassoSelect, BoxSelect, FreeDraw };

std::string_view to_string(ManipulationKind kind);
std::optional<ManipulationKind> manipulation_kind_from_string(std::string_view s);

struct SelectedElement {
    std::string tag;
    Json datum; // bound record, fields in attribute order

    bool operator==(const SelectedElement&) const = default;
};

// x/y endpoints are data values: numbers, or ISO-8601 strings on temporal axes.
struct BoxSelection {
    Json x1, x2, y1, y2;
    double fx = 0; // fraction of the visible x-axis pixel extent
    double fy = 0;

    bool operator==(const BoxSelection&) const = default;
};

struct StrokePoint {
    double x = 0, y = 0;
    bool operator==(const StrokePoint&) const = default;
};

struct FreeDrawing {
    std::vector<std::vector<StrokePoint>> strokes;
    std::string screenshot; // PNG bytes, strokes already composited by the UI

    bool operator==(const FreeDrawing&) const = default;
};

struct DirectManipulation {
    int id = 0;
    ManipulationKind kind = ManipulationKind::ClickSelect;
    std::vector<SelectedElement> elements;
    std::optional<BoxSelection> box;
    std::optional<FreeDrawing> drawing;

    // Throws InvalidManipulation.
    void validate() const;
    Json to_json() const;
    // Parses and validates the interaction wire schema.
    static DirectManipulation from_json(const Json& j);

    bool operator==(const DirectManipulation&) const = default;
};

struct ManipulationDescriptor {
    int manipulationId = 0;
    ManipulationKind kind = ManipulationKind::ClickSelect;
    std::string text;
    std::vector<Json> referencedData;
    std::optional<std::string> inferredIntent;

    Json to_json() const;
    static ManipulationDescriptor from_json(const Json& j);
    bool operator==(const ManipulationDescriptor&) const = default;
};

// Axis selections shorter than this fraction of the visible axis are not recorded.
inline constexpr double kMinAxisExtentFraction = 0.05;
inline constexpr std::size_t kMaxDatumFields = 8;

// "{month: Jan, usage: 412}"; at most kMaxDatumFields fields, then "…".
std::string format_datum(const Json& datum);

ManipulationDescriptor describe_selection(const DirectManipulation& m);

// nullopt when both axes are below the threshold. Throws NoActiveScales when
// the rendered chart did not expose its global scales.
std::optional<ManipulationDescriptor> describe_box(const DirectManipulation& m, bool scales_available);

ManipulationDescriptor describe_freedraw(const DirectManipulation& m, std::string_view nl_context,
                                         AgentClient& vision);

struct DescribeOutcome {
    std::vector<ManipulationDescriptor> descriptors;
    std::vector<std::string> warnings;
};

// Returns a previously computed descriptor for an unchanged manipulation, if any.
using DescriptorReuse = std::function<std::optional<ManipulationDescriptor>(const DirectManipulation&)>;

// Describes a message's manipulations in id order. Discarded box selections and
// selections against a chart without scales become warnings.
DescribeOutcome describe_all(const std::vector<DirectManipulation>& manipulations, std::string_view nl,
                             bool scales_available, AgentClient& vision, const DescriptorReuse& reuse = {});

} // namespace vizlink
