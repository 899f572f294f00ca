#pragma once

#include "vizlink/util.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace vizlink {

enum class AttributeKind { Quantitative, Temporal, Nominal, Ordinal };

std::string_view to_string(AttributeKind kind);
std::optional<AttributeKind> attribute_kind_from_string(std::string_view s);

// null, number (quantitative) or text (temporal/nominal/ordinal)
using Value = std::variant<std::monostate, double, std::string>;

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }
std::string value_text(const Value& v);

inline constexpr std::size_t kMaxListedCategories = 20;

struct Attribute {
    std::string name;
    AttributeKind kind = AttributeKind::Nominal;
    bool nullable = false;
    // Quantitative: numeric bounds. Temporal: epoch milliseconds. Both attained by some cell.
    std::optional<std::pair<double, double>> bounds;
    std::string lowText;
    std::string highText;
    // Nominal: most frequent values (ties by text), capped. Ordinal: declared levels in order.
    std::vector<std::string> categories;
    std::size_t distinctCount = 0;

    bool operator==(const Attribute&) const = default;
};

struct MappingSpec {
    std::string attribute;
    std::string transform;
};

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct InferOptions {
    // User-declared ordinal attributes and their levels, lowest first.
    std::map<std::string, std::vector<std::string>> ordinalLevels;
};

struct Dataset {
    std::string id;
    std::string name;
    std::optional<std::string> sourceDescription;
    std::vector<Attribute> attributes;
    // rows[r][a] is the value of attributes[a] in row r
    std::vector<std::vector<Value>> rows;

    std::optional<std::size_t> attribute_index(std::string_view attr) const;
    Json row_json(std::size_t r) const;
    Json rows_json(std::size_t offset = 0, std::size_t limit = static_cast<std::size_t>(-1)) const;
    Json schema_json() const;
    Json to_json() const;
    static Dataset from_json(const Json& doc);
    // Content hash of everything except the id itself.
    void assign_id();

    bool operator==(const Dataset&) const = default;
};

bool is_null_sentinel(std::string_view cell);

// RFC 4180 parsing. Throws MalformedCsv.
RawTable parse_csv(std::string_view bytes);

std::vector<Attribute> infer_schema(const RawTable& table, const InferOptions& options = {});
// True when a non-null cell is admissible under the attribute's kind.
bool conforms(const Attribute& attribute, std::string_view cell);

Dataset build_dataset(std::string name, const RawTable& table, const InferOptions& options = {});
Dataset ingest_csv(std::string_view bytes, std::string name, const InferOptions& options = {});

std::string describe_dataset(const Dataset& d);

// Expands "prefix{a-b}" into prefix<a>..prefix<b>; any other text is returned as a single name.
std::vector<std::string> expand_abbreviation(std::string_view pattern);

// Throws TransformError naming the failing row.
Dataset apply_mappings(const Dataset& d, const std::vector<MappingSpec>& specs);

} // namespace vizlink
