#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>

namespace vizlink::assets {

// Versioned text assets shipped with the engine (prompt templates, API manifest).
inline constexpr std::string_view kTemplateVersion = "1";

const std::map<std::string, std::string, std::less<>>& table();

// Throws Error(Internal) for an unknown asset.
const std::string& get(std::string_view name);

// Replaces each {{key}} with its value.
std::string render(std::string_view tmpl, const std::map<std::string, std::string>& vars);

} // namespace vizlink::assets
