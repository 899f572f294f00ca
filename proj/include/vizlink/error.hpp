#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vizlink {

// Stable machine codes. The string form is part of the HTTP API contract.
enum class ErrorCode {
    MalformedCsv,
    EmptyDataset,
    TransformError,
    InvalidManipulation,
    NoElements,
    NoActiveScales,
    AgentUnavailable,
    Timeout,
    RateLimited,
    AgentMalformedResponse,
    UnknownModel,
    ParseFailure,
    MissingCodeTag,
    SchemaVersionMismatch,
    CorruptArchive,
    NotFound,
    InvalidRequest,
    Internal,
};

std::string_view to_string(ErrorCode code);
int http_status(ErrorCode code);
const std::vector<ErrorCode>& error_registry();

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string detail = {})
        : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

} // namespace vizlink
