#include "vizlink/error.hpp"

namespace vizlink {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::MalformedCsv: return "malformed_csv";
    case ErrorCode::EmptyDataset: return "empty_dataset";
    case ErrorCode::TransformError: return "transform_error";
    case ErrorCode::InvalidManipulation: return "invalid_manipulation";
    case ErrorCode::NoElements: return "no_elements";
    case ErrorCode::NoActiveScales: return "no_active_scales";
    case ErrorCode::AgentUnavailable: return "agent_unavailable";
    case ErrorCode::Timeout: return "agent_timeout";
    case ErrorCode::RateLimited: return "agent_rate_limited";
    case ErrorCode::AgentMalformedResponse: return "agent_malformed_response";
    case ErrorCode::UnknownModel: return "unknown_model";
    case ErrorCode::ParseFailure: return "parse_failure";
    case ErrorCode::MissingCodeTag: return "missing_code_tag";
    case ErrorCode::SchemaVersionMismatch: return "schema_version_mismatch";
    case ErrorCode::CorruptArchive: return "corrupt_archive";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::InvalidRequest: return "invalid_request";
    case ErrorCode::Internal: return "internal";
    }
    return "internal";
}

int http_status(ErrorCode code) {
    switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::MalformedCsv:
    case ErrorCode::EmptyDataset:
    case ErrorCode::TransformError:
    case ErrorCode::InvalidManipulation:
    case ErrorCode::NoElements:
    case ErrorCode::NoActiveScales:
    case ErrorCode::UnknownModel:
    case ErrorCode::ParseFailure:
    case ErrorCode::MissingCodeTag:
    case ErrorCode::SchemaVersionMismatch:
    case ErrorCode::CorruptArchive:
    case ErrorCode::InvalidRequest: return 422;
    case ErrorCode::RateLimited: return 429;
    case ErrorCode::AgentUnavailable:
    case ErrorCode::AgentMalformedResponse: return 502;
    case ErrorCode::Timeout: return 504;
    case ErrorCode::Internal: return 500;
    }
    return 500;
}

const std::vector<ErrorCode>& error_registry() {
    static const std::vector<ErrorCode> all = {
        ErrorCode::MalformedCsv,        ErrorCode::EmptyDataset,
        ErrorCode::TransformError,      ErrorCode::InvalidManipulation,
        ErrorCode::NoElements,          ErrorCode::NoActiveScales,
        ErrorCode::AgentUnavailable,    ErrorCode::Timeout,
        ErrorCode::RateLimited,         ErrorCode::AgentMalformedResponse,
        ErrorCode::UnknownModel,        ErrorCode::ParseFailure,
        ErrorCode::MissingCodeTag,      ErrorCode::SchemaVersionMismatch,
        ErrorCode::CorruptArchive,      ErrorCode::NotFound,
        ErrorCode::InvalidRequest,      ErrorCode::Internal,
    };
    return all;
}

} // namespace vizlink
