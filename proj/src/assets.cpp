#include "vizlink/assets.hpp"

#include "vizlink/error.hpp"

namespace vizlink::assets {

const std::string& get(std::string_view name) {
    const auto& files = table();
    auto it = files.find(name);
    if (it == files.end()) throw Error(ErrorCode::Internal, "missing asset " + std::string(name));
    return it->second;
}

std::string render(std::string_view tmpl, const std::map<std::string, std::string>& vars) {
    std::string out;
    size_t pos = 0;
    while (pos < tmpl.size()) {
        auto open = tmpl.find("{{", pos);
        if (open == std::string_view::npos) break;
        auto close = tmpl.find("}}", open + 2);
        if (close == std::string_view::npos) break;
        out.append(tmpl.substr(pos, open - pos));
        auto it = vars.find(std::string(tmpl.substr(open + 2, close - open - 2)));
        if (it != vars.end()) out.append(it->second);
        else out.append(tmpl.substr(open, close + 2 - open));
        pos = close + 2;
    }
    out.append(tmpl.substr(pos));
    return out;
}

} // namespace vizlink::assets
