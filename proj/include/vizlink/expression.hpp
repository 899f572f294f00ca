#pragma once

#include "vizlink/dataset.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace vizlink {

// Per-value mapping expression. The only variable is `value`; functions:
// num, str, trim, lower, upper, replace(x, from, to), date(x, format), round(x[, digits]), abs.
// `+` concatenates when either side is text. Throws TransformError on parse or evaluation failure.
class Transform {
public:
    struct Node;

    static Transform parse(std::string_view text);
    Value apply(const Value& input) const;
    const std::string& source() const { return source_; }

private:
    std::string source_;
    std::shared_ptr<const Node> root_;
};

} // namespace vizlink
