#include "vizlink/dataset.hpp"

#include "vizlink/error.hpp"
#include "vizlink/expression.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>
#include <unordered_map>

namespace vizlink {

std::string_view to_string(AttributeKind kind) {
    switch (kind) {
    case AttributeKind::Quantitative: return "quantitative";
    case AttributeKind::Temporal: return "temporal";
    case AttributeKind::Nominal: return "nominal";
    case AttributeKind::Ordinal: return "ordinal";
    }
    return "nominal";
}

std::optional<AttributeKind> attribute_kind_from_string(std::string_view s) {
    if (s == "quantitative") return AttributeKind::Quantitative;
    if (s == "temporal") return AttributeKind::Temporal;
    if (s == "nominal") return AttributeKind::Nominal;
    if (s == "ordinal") return AttributeKind::Ordinal;
    return std::nullopt;
}

std::string value_text(const Value& v) {
    if (auto d = std::get_if<double>(&v)) return format_number(*d);
    if (auto s = std::get_if<std::string>(&v)) return *s;
    return {};
}

bool is_null_sentinel(std::string_view cell) {
    std::string t = to_lower(trim(cell));
    return t.empty() || t == "na" || t == "nan" || t == "null";
}

// ---------------------------------------------------------------------------
// CSV

namespace {

bool valid_utf8(std::string_view s) {
    size_t i = 0;
    while (i < s.size()) {
        auto c = static_cast<unsigned char>(s[i]);
        size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 0;
        if (len == 0 || i + len > s.size()) return false;
        for (size_t k = 1; k < len; ++k)
            if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return false;
        i += len;
    }
    return true;
}

} // namespace

RawTable parse_csv(std::string_view bytes) {
    if (bytes.substr(0, 3) == "\xEF\xBB\xBF") bytes.remove_prefix(3);
    if (!valid_utf8(bytes)) throw Error(ErrorCode::MalformedCsv, "input is not valid UTF-8");

    std::vector<std::vector<std::string>> records;
    std::vector<size_t> record_lines;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false, after_quote = false, field_started = false;
    size_t line = 1, record_line = 1;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        after_quote = false;
        field_started = false;
    };
    auto end_record = [&] {
        // a physically blank line is not a record
        if (!(record.empty() && field.empty() && !field_started)) {
            end_field();
            records.push_back(std::move(record));
            record_lines.push_back(record_line);
        }
        record.clear();
        field_started = false;
    };

    for (size_t i = 0; i < bytes.size(); ++i) {
        char c = bytes[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < bytes.size() && bytes[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                    after_quote = true;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        if (c == ',') {
            end_field();
            field_started = true;
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && i + 1 < bytes.size() && bytes[i + 1] == '\n') ++i;
            end_record();
            ++line;
            record_line = line;
        } else if (after_quote) {
            throw Error(ErrorCode::MalformedCsv, "unexpected character after closing quote on line " + std::to_string(line));
        } else if (c == '"') {
            if (!field.empty())
                throw Error(ErrorCode::MalformedCsv, "stray quote inside unquoted field on line " + std::to_string(line));
            in_quotes = true;
            field_started = true;
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) throw Error(ErrorCode::MalformedCsv, "unbalanced quotes starting before line " + std::to_string(line));
    end_record();

    if (records.empty()) throw Error(ErrorCode::MalformedCsv, "missing header row");
    RawTable table;
    table.header = std::move(records.front());
    std::set<std::string> seen;
    for (auto& h : table.header) {
        h = trim(h);
        if (h.empty()) throw Error(ErrorCode::MalformedCsv, "empty column name in header");
        if (!seen.insert(h).second) throw Error(ErrorCode::MalformedCsv, "duplicate column name '" + h + "'");
    }
    const size_t width = table.header.size();
    for (size_t r = 1; r < records.size(); ++r) {
        auto& rec = records[r];
        if (rec.size() > width)
            throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(record_lines[r]) + " has " +
                                                     std::to_string(rec.size()) + " fields, header has " +
                                                     std::to_string(width));
        rec.resize(width);
        table.rows.push_back(std::move(rec));
    }
    return table;
}

// ---------------------------------------------------------------------------
// Schema inference

namespace {

AttributeKind classify(const std::vector<std::string_view>& cells, const std::vector<std::string>* levels) {
    if (cells.empty()) return AttributeKind::Nominal;
    if (std::all_of(cells.begin(), cells.end(), [](auto c) { return parse_iso_datetime(c).has_value(); }))
        return AttributeKind::Temporal;
    if (std::all_of(cells.begin(), cells.end(), [](auto c) { return parse_number(c).has_value(); }))
        return AttributeKind::Quantitative;
    if (levels && std::all_of(cells.begin(), cells.end(), [&](auto c) {
            return std::find(levels->begin(), levels->end(), c) != levels->end();
        }))
        return AttributeKind::Ordinal;
    return AttributeKind::Nominal;
}

Attribute summarize(std::string name, const RawTable& table, size_t col, const InferOptions& options) {
    Attribute a;
    a.name = std::move(name);
    std::vector<std::string> trimmed;
    trimmed.reserve(table.rows.size());
    std::vector<std::string_view> cells;
    for (const auto& row : table.rows) {
        if (is_null_sentinel(row[col])) {
            a.nullable = true;
            continue;
        }
        trimmed.push_back(trim(row[col]));
    }
    cells.assign(trimmed.begin(), trimmed.end());
    auto hint = options.ordinalLevels.find(a.name);
    const std::vector<std::string>* levels = hint == options.ordinalLevels.end() ? nullptr : &hint->second;
    a.kind = classify(cells, levels);

    switch (a.kind) {
    case AttributeKind::Quantitative:
    case AttributeKind::Temporal: {
        double lo = 0, hi = 0;
        std::string_view lo_text, hi_text;
        std::set<std::string_view> distinct;
        for (size_t i = 0; i < cells.size(); ++i) {
            double v = a.kind == AttributeKind::Temporal ? static_cast<double>(*parse_iso_datetime(cells[i]))
                                                         : *parse_number(cells[i]);
            if (i == 0 || v < lo) lo = v, lo_text = cells[i];
            if (i == 0 || v > hi) hi = v, hi_text = cells[i];
            distinct.insert(cells[i]);
        }
        if (!cells.empty()) {
            a.bounds = std::make_pair(lo, hi);
            a.lowText = a.kind == AttributeKind::Quantitative ? format_number(lo) : std::string(lo_text);
            a.highText = a.kind == AttributeKind::Quantitative ? format_number(hi) : std::string(hi_text);
        }
        a.distinctCount = distinct.size();
        break;
    }
    case AttributeKind::Ordinal: {
        std::set<std::string_view> distinct(cells.begin(), cells.end());
        a.categories = *levels;
        a.distinctCount = distinct.size();
        break;
    }
    case AttributeKind::Nominal: {
        std::unordered_map<std::string_view, size_t> freq;
        for (auto c : cells) ++freq[c];
        std::vector<std::pair<std::string_view, size_t>> ranked(freq.begin(), freq.end());
        std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
            return x.second != y.second ? x.second > y.second : x.first < y.first;
        });
        for (size_t i = 0; i < ranked.size() && i < kMaxListedCategories; ++i)
            a.categories.emplace_back(ranked[i].first);
        a.distinctCount = ranked.size();
        break;
    }
    }
    return a;
}

} // namespace

std::vector<Attribute> infer_schema(const RawTable& table, const InferOptions& options) {
    std::vector<Attribute> out;
    out.reserve(table.header.size());
    for (size_t c = 0; c < table.header.size(); ++c) out.push_back(summarize(table.header[c], table, c, options));
    return out;
}

bool conforms(const Attribute& attribute, std::string_view cell) {
    std::string t = trim(cell);
    switch (attribute.kind) {
    case AttributeKind::Temporal: return parse_iso_datetime(t).has_value();
    case AttributeKind::Quantitative: return parse_number(t).has_value();
    case AttributeKind::Ordinal:
        return std::find(attribute.categories.begin(), attribute.categories.end(), t) != attribute.categories.end();
    case AttributeKind::Nominal: return true;
    }
    return false;
}

Dataset build_dataset(std::string name, const RawTable& table, const InferOptions& options) {
    if (table.rows.empty()) throw Error(ErrorCode::EmptyDataset, "dataset '" + name + "' has no data rows");
    Dataset d;
    d.name = std::move(name);
    d.attributes = infer_schema(table, options);
    d.rows.reserve(table.rows.size());
    for (const auto& raw : table.rows) {
        std::vector<Value> row;
        row.reserve(raw.size());
        for (size_t c = 0; c < raw.size(); ++c) {
            if (is_null_sentinel(raw[c])) {
                row.emplace_back(std::monostate{});
            } else if (d.attributes[c].kind == AttributeKind::Quantitative) {
                row.emplace_back(*parse_number(trim(raw[c])));
            } else {
                row.emplace_back(trim(raw[c]));
            }
        }
        d.rows.push_back(std::move(row));
    }
    d.assign_id();
    return d;
}

Dataset ingest_csv(std::string_view bytes, std::string name, const InferOptions& options) {
    return build_dataset(std::move(name), parse_csv(bytes), options);
}

// ---------------------------------------------------------------------------
// JSON

std::optional<std::size_t> Dataset::attribute_index(std::string_view attr) const {
    for (size_t i = 0; i < attributes.size(); ++i)
        if (attributes[i].name == attr) return i;
    return std::nullopt;
}

Json Dataset::row_json(std::size_t r) const {
    Json obj = Json::object();
    for (size_t c = 0; c < attributes.size(); ++c) {
        const Value& v = rows[r][c];
        if (auto d = std::get_if<double>(&v)) obj[attributes[c].name] = *d;
        else if (auto s = std::get_if<std::string>(&v)) obj[attributes[c].name] = *s;
        else obj[attributes[c].name] = nullptr;
    }
    return obj;
}

Json Dataset::rows_json(std::size_t offset, std::size_t limit) const {
    Json arr = Json::array();
    for (size_t r = offset; r < rows.size() && r - offset < limit; ++r) arr.push_back(row_json(r));
    return arr;
}

Json Dataset::schema_json() const {
    Json attrs = Json::array();
    for (const auto& a : attributes) {
        Json j = {{"name", a.name}, {"kind", std::string(to_string(a.kind))}, {"nullable", a.nullable}};
        if (a.kind == AttributeKind::Quantitative && a.bounds)
            j["range"] = Json::array({a.bounds->first, a.bounds->second});
        else if (a.kind == AttributeKind::Temporal && a.bounds)
            j["range"] = Json::array({a.lowText, a.highText});
        else if (a.kind == AttributeKind::Nominal || a.kind == AttributeKind::Ordinal)
            j["values"] = a.categories;
        j["distinctCount"] = a.distinctCount;
        attrs.push_back(std::move(j));
    }
    return attrs;
}

void Dataset::assign_id() {
    Json doc = to_json();
    doc.erase("id");
    id = "ds-" + sha256_hex(doc.dump()).substr(0, 16);
}

Json Dataset::to_json() const {
    Json doc = {{"id", id}, {"name", name}};
    doc["sourceDescription"] = sourceDescription ? Json(*sourceDescription) : Json(nullptr);
    doc["attributes"] = schema_json();
    doc["rows"] = rows_json();
    return doc;
}

Dataset Dataset::from_json(const Json& doc) {
    try {
        RawTable table;
        InferOptions options;
        std::vector<AttributeKind> kinds;
        for (const auto& a : doc.at("attributes")) {
            table.header.push_back(a.at("name").get<std::string>());
            auto kind = attribute_kind_from_string(a.at("kind").get<std::string>());
            if (!kind) throw Error(ErrorCode::InvalidRequest, "unknown attribute kind");
            kinds.push_back(*kind);
            if (*kind == AttributeKind::Ordinal)
                options.ordinalLevels[table.header.back()] = a.at("values").get<std::vector<std::string>>();
        }
        for (const auto& row : doc.at("rows")) {
            if (!row.is_object() || row.size() != table.header.size())
                throw Error(ErrorCode::InvalidRequest, "row keys do not match attributes");
            std::vector<std::string> raw;
            for (const auto& h : table.header) {
                const Json& v = row.at(h);
                if (v.is_null()) raw.emplace_back();
                else if (v.is_number()) raw.push_back(format_number(v.get<double>()));
                else if (v.is_string()) raw.push_back(v.get<std::string>());
                else throw Error(ErrorCode::InvalidRequest, "unsupported cell type for '" + h + "'");
            }
            table.rows.push_back(std::move(raw));
        }
        Dataset d = build_dataset(doc.at("name").get<std::string>(), table, options);
        if (doc.contains("sourceDescription") && doc["sourceDescription"].is_string()) {
            d.sourceDescription = doc["sourceDescription"].get<std::string>();
            d.assign_id();
        }
        for (size_t i = 0; i < kinds.size(); ++i)
            if (d.attributes[i].kind != kinds[i])
                throw Error(ErrorCode::InvalidRequest, "attribute '" + d.attributes[i].name +
                                                           "' values do not conform to declared kind");
        return d;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::InvalidRequest, std::string("malformed dataset document: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Description

namespace {

std::string kind_label(AttributeKind k) {
    return k == AttributeKind::Quantitative ? "float" : std::string(to_string(k));
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
        if (i) out.append(sep);
        out.append(items[i]);
    }
    return out;
}

std::string attribute_line(const Attribute& a) {
    std::string line = a.name + ": " + kind_label(a.kind);
    switch (a.kind) {
    case AttributeKind::Quantitative:
    case AttributeKind::Temporal:
        if (a.bounds) line += ", range [" + a.lowText + ", " + a.highText + "]";
        break;
    case AttributeKind::Ordinal: line += ", levels [" + join(a.categories, " < ") + "]"; break;
    case AttributeKind::Nominal:
        line += ", values [" + join(a.categories, ", ");
        if (a.distinctCount > a.categories.size()) line += ", … (" + std::to_string(a.distinctCount) + " distinct)";
        line += "]";
        break;
    }
    line += a.nullable ? ", nullable" : ", non-null";
    return line;
}

struct NumberedName {
    std::string prefix;
    long number = -1;
};

// Splits a trailing canonical integer ("7", not "07") off a non-empty prefix.
NumberedName split_numbered(const std::string& name) {
    size_t p = name.size();
    while (p > 0 && std::isdigit(static_cast<unsigned char>(name[p - 1]))) --p;
    if (p == 0 || p == name.size()) return {};
    std::string digits = name.substr(p);
    if (digits.size() > 1 && digits[0] == '0') return {};
    if (digits.size() > 9) return {};
    return {name.substr(0, p), std::stol(digits)};
}

} // namespace

std::string describe_dataset(const Dataset& d) {
    std::ostringstream out;
    out << "Dataset: " << d.name << "\n";
    if (d.sourceDescription && !d.sourceDescription->empty()) out << "Source: " << *d.sourceDescription << "\n";
    out << "Rows: " << d.rows.size() << "\n";
    out << "Attributes:\n";
    const auto& attrs = d.attributes;
    size_t i = 0;
    while (i < attrs.size()) {
        NumberedName head = split_numbered(attrs[i].name);
        size_t j = i + 1;
        if (head.number >= 0) {
            while (j < attrs.size()) {
                NumberedName next = split_numbered(attrs[j].name);
                if (next.prefix != head.prefix || next.number != head.number + static_cast<long>(j - i) ||
                    attrs[j].kind != attrs[i].kind || attrs[j].nullable != attrs[i].nullable)
                    break;
                ++j;
            }
        }
        if (head.number >= 0 && j - i >= 3) {
            out << head.prefix << "{" << head.number << "-" << head.number + static_cast<long>(j - i - 1)
                << "}: " << kind_label(attrs[i].kind);
            if (attrs[i].nullable) out << ", nullable";
            out << "\n";
            i = j;
        } else {
            out << attribute_line(attrs[i]) << "\n";
            ++i;
        }
    }
    return out.str();
}

std::vector<std::string> expand_abbreviation(std::string_view pattern) {
    auto open = pattern.find('{');
    auto dash = pattern.find('-', open == std::string_view::npos ? 0 : open);
    if (open == std::string_view::npos || dash == std::string_view::npos || pattern.back() != '}')
        return {std::string(pattern)};
    long lo = 0, hi = 0;
    auto lo_s = pattern.substr(open + 1, dash - open - 1);
    auto hi_s = pattern.substr(dash + 1, pattern.size() - dash - 2);
    if (std::from_chars(lo_s.data(), lo_s.data() + lo_s.size(), lo).ptr != lo_s.data() + lo_s.size() ||
        std::from_chars(hi_s.data(), hi_s.data() + hi_s.size(), hi).ptr != hi_s.data() + hi_s.size() || hi < lo)
        return {std::string(pattern)};
    std::vector<std::string> names;
    std::string prefix(pattern.substr(0, open));
    for (long k = lo; k <= hi; ++k) names.push_back(prefix + std::to_string(k));
    return names;
}

// ---------------------------------------------------------------------------
// Mappings

Dataset apply_mappings(const Dataset& d, const std::vector<MappingSpec>& specs) {
    RawTable table;
    InferOptions options;
    for (const auto& a : d.attributes) {
        table.header.push_back(a.name);
        if (a.kind == AttributeKind::Ordinal) options.ordinalLevels[a.name] = a.categories;
    }
    table.rows.reserve(d.rows.size());
    for (const auto& row : d.rows) {
        std::vector<std::string> raw;
        for (const auto& v : row) raw.push_back(value_text(v));
        table.rows.push_back(std::move(raw));
    }
    for (const auto& spec : specs) {
        auto col = d.attribute_index(spec.attribute);
        if (!col) throw Error(ErrorCode::TransformError, "mapping names unknown attribute '" + spec.attribute + "'");
        Transform t = Transform::parse(spec.transform);
        for (size_t r = 0; r < table.rows.size(); ++r) {
            Value in = is_null_sentinel(table.rows[r][*col]) ? Value{}
                       : d.attributes[*col].kind == AttributeKind::Quantitative
                           ? Value{*parse_number(trim(table.rows[r][*col]))}
                           : Value{table.rows[r][*col]};
            try {
                table.rows[r][*col] = value_text(t.apply(in));
            } catch (const Error& e) {
                throw Error(ErrorCode::TransformError,
                            "mapping for '" + spec.attribute + "' failed at row " + std::to_string(r) + ": " + e.what(),
                            std::to_string(r));
            }
        }
    }
    Dataset out = build_dataset(d.name, table, options);
    if (d.sourceDescription) {
        out.sourceDescription = d.sourceDescription;
        out.assign_id();
    }
    return out;
}

} // namespace vizlink
