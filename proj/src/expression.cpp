#include "vizlink/expression.hpp"

#include "vizlink/error.hpp"

#include <cctype>
#include <cmath>
#include <vector>

namespace vizlink {

struct Transform::Node {
    enum class Type { Number, Text, Input, Call, Binary, Negate } type;
    double number = 0;
    std::string text; // literal text, function name, or operator
    std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Transform::Node>;
using Type = Transform::Node::Type;

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::TransformError, what); }

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr parse() {
        auto n = expression();
        skip_space();
        if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "' in transform");
        return n;
    }

private:
    std::string_view src_;
    size_t pos_ = 0;

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static NodePtr make(Type t, std::string text = {}, std::vector<NodePtr> args = {}, double num = 0) {
        auto n = std::make_shared<Transform::Node>();
        n->type = t;
        n->text = std::move(text);
        n->args = std::move(args);
        n->number = num;
        return n;
    }

    NodePtr expression() {
        auto lhs = term();
        for (;;) {
            if (accept('+')) lhs = make(Type::Binary, "+", {lhs, term()});
            else if (accept('-')) lhs = make(Type::Binary, "-", {lhs, term()});
            else return lhs;
        }
    }
    NodePtr term() {
        auto lhs = unary();
        for (;;) {
            if (accept('*')) lhs = make(Type::Binary, "*", {lhs, unary()});
            else if (accept('/')) lhs = make(Type::Binary, "/", {lhs, unary()});
            else return lhs;
        }
    }
    NodePtr unary() {
        if (accept('-')) return make(Type::Negate, {}, {unary()});
        return primary();
    }
    NodePtr primary() {
        skip_space();
        if (pos_ >= src_.size()) fail("unexpected end of transform");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            auto n = expression();
            if (!accept(')')) fail("expected ')'");
            return n;
        }
        if (c == '"' || c == '\'') return string_literal(c);
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number_literal();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            std::string ident(src_.substr(start, pos_ - start));
            if (accept('(')) {
                std::vector<NodePtr> args;
                if (!accept(')')) {
                    do args.push_back(expression());
                    while (accept(','));
                    if (!accept(')')) fail("expected ')' after arguments of " + ident);
                }
                check_arity(ident, args.size());
                return make(Type::Call, ident, std::move(args));
            }
            if (ident != "value") fail("transform may only reference 'value', found '" + ident + "'");
            return make(Type::Input);
        }
        fail("unexpected '" + std::string(1, c) + "' in transform");
    }
    NodePtr string_literal(char quote) {
        ++pos_;
        std::string out;
        while (pos_ < src_.size() && src_[pos_] != quote) {
            if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) ++pos_;
            out.push_back(src_[pos_++]);
        }
        if (pos_ >= src_.size()) fail("unterminated string literal");
        ++pos_;
        return make(Type::Text, std::move(out));
    }
    NodePtr number_literal() {
        size_t start = pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
            ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        }
        auto v = parse_number(src_.substr(start, pos_ - start));
        if (!v) fail("bad number literal");
        return make(Type::Number, {}, {}, *v);
    }
    static void check_arity(const std::string& fn, size_t n) {
        struct Sig { const char* name; size_t min, max; };
        static const Sig sigs[] = {{"num", 1, 1},   {"str", 1, 1},     {"trim", 1, 1},
                                   {"lower", 1, 1}, {"upper", 1, 1},   {"replace", 3, 3},
                                   {"date", 2, 2},  {"round", 1, 2},   {"abs", 1, 1}};
        for (const auto& s : sigs) {
            if (fn == s.name) {
                if (n < s.min || n > s.max) fail("wrong number of arguments to " + fn);
                return;
            }
        }
        fail("unknown function '" + fn + "'");
    }
};

double as_number(const Value& v, const char* ctx) {
    if (auto d = std::get_if<double>(&v)) return *d;
    if (auto s = std::get_if<std::string>(&v)) {
        if (auto d = parse_number(trim(*s))) return *d;
        fail(std::string(ctx) + ": '" + *s + "' is not a number");
    }
    fail(std::string(ctx) + ": null operand");
}

std::string as_text(const Value& v) {
    if (is_null(v)) fail("null operand");
    return value_text(v);
}

// strftime-like subset: %Y %m %d %H %M %S; numeric fields accept 1..4 (year) or 1..2 digits.
std::string parse_with_format(const std::string& in, const std::string& fmt) {
    int fields[6] = {0, 1, 1, 0, 0, 0};
    bool has_time = false;
    size_t i = 0;
    for (size_t f = 0; f < fmt.size(); ++f) {
        if (fmt[f] == '%' && f + 1 < fmt.size()) {
            char spec = fmt[++f];
            int slot = -1, max_digits = 2;
            switch (spec) {
            case 'Y': slot = 0; max_digits = 4; break;
            case 'm': slot = 1; break;
            case 'd': slot = 2; break;
            case 'H': slot = 3; has_time = true; break;
            case 'M': slot = 4; has_time = true; break;
            case 'S': slot = 5; has_time = true; break;
            default: fail("unsupported date directive %" + std::string(1, spec));
            }
            int v = 0, digits = 0;
            while (i < in.size() && digits < max_digits && std::isdigit(static_cast<unsigned char>(in[i]))) {
                v = v * 10 + (in[i++] - '0');
                ++digits;
            }
            if (digits == 0) fail("'" + in + "' does not match date format '" + fmt + "'");
            fields[slot] = v;
        } else {
            if (i >= in.size() || in[i] != fmt[f]) fail("'" + in + "' does not match date format '" + fmt + "'");
            ++i;
        }
    }
    if (i != in.size()) fail("'" + in + "' has trailing characters for date format '" + fmt + "'");
    char buf[32];
    if (has_time)
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d", fields[0], fields[1], fields[2], fields[3],
                      fields[4], fields[5]);
    else
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", fields[0], fields[1], fields[2]);
    std::string iso(buf);
    if (!parse_iso_datetime(iso)) fail("'" + in + "' is not a valid calendar date");
    return iso;
}

Value eval(const Transform::Node& n, const Value& input) {
    switch (n.type) {
    case Type::Number: return n.number;
    case Type::Text: return n.text;
    case Type::Input: return input;
    case Type::Negate: return -as_number(eval(*n.args[0], input), "negation");
    case Type::Binary: {
        Value a = eval(*n.args[0], input);
        Value b = eval(*n.args[1], input);
        if (n.text == "+" && (std::holds_alternative<std::string>(a) || std::holds_alternative<std::string>(b)))
            return as_text(a) + as_text(b);
        double x = as_number(a, n.text.c_str());
        double y = as_number(b, n.text.c_str());
        if (n.text == "+") return x + y;
        if (n.text == "-") return x - y;
        if (n.text == "*") return x * y;
        if (y == 0) fail("division by zero");
        return x / y;
    }
    case Type::Call: {
        std::vector<Value> args;
        for (const auto& a : n.args) args.push_back(eval(*a, input));
        const std::string& fn = n.text;
        if (fn == "num") return as_number(args[0], "num");
        if (fn == "str") return as_text(args[0]);
        if (fn == "trim") return trim(as_text(args[0]));
        if (fn == "lower") return to_lower(as_text(args[0]));
        if (fn == "upper") {
            std::string s = as_text(args[0]);
            for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            return s;
        }
        if (fn == "replace") {
            std::string s = as_text(args[0]), from = as_text(args[1]), to = as_text(args[2]);
            if (from.empty()) return s;
            std::string out;
            size_t pos = 0;
            for (size_t hit; (hit = s.find(from, pos)) != std::string::npos; pos = hit + from.size())
                out.append(s, pos, hit - pos).append(to);
            out.append(s, pos, std::string::npos);
            return out;
        }
        if (fn == "date") return parse_with_format(trim(as_text(args[0])), as_text(args[1]));
        if (fn == "abs") return std::fabs(as_number(args[0], "abs"));
        if (fn == "round") {
            double x = as_number(args[0], "round");
            double digits = args.size() > 1 ? as_number(args[1], "round") : 0.0;
            double scale = std::pow(10.0, digits);
            return std::round(x * scale) / scale;
        }
        break;
    }
    }
    fail("unsupported expression");
}

} // namespace

Transform Transform::parse(std::string_view text) {
    Transform t;
    t.source_ = std::string(text);
    t.root_ = Parser(text).parse();
    return t;
}

Value Transform::apply(const Value& input) const {
    if (is_null(input)) return input;
    Value out = eval(*root_, input);
    if (auto d = std::get_if<double>(&out); d && !std::isfinite(*d)) fail("non-finite result");
    return out;
}

} // namespace vizlink
