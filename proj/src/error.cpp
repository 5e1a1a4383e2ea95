#include "feedql/error.hpp"

namespace feedql {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::MalformedXml: return "MalformedXml";
    case ErrorCode::MissingRequired: return "MissingRequired";
    case ErrorCode::BadGeo: return "BadGeo";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownOperator: return "UnknownOperator";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::BadParam: return "BadParam";
    case ErrorCode::CrossFeedFnHere: return "CrossFeedFnHere";
    case ErrorCode::StaleUpdate: return "StaleUpdate";
    case ErrorCode::PageOutOfRange: return "PageOutOfRange";
    case ErrorCode::ArchiveOutOfRange: return "ArchiveOutOfRange";
    case ErrorCode::UnknownHiddenField: return "UnknownHiddenField";
    case ErrorCode::DuplicateOrigin: return "DuplicateOrigin";
    case ErrorCode::SourceUnavailable: return "SourceUnavailable";
    case ErrorCode::UnknownOrigin: return "UnknownOrigin";
    case ErrorCode::UnknownScope: return "UnknownScope";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::BadStore: return "BadStore";
    case ErrorCode::Transport: return "Transport";
    case ErrorCode::HttpStatus: return "HttpStatus";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail)
    , code_(code)
    , detail_(detail)
{
}

namespace {

std::string describe_syntax(std::size_t position, const std::vector<std::string>& expected, const std::string& detail)
{
    std::string out = "at position " + std::to_string(position);
    if (!detail.empty())
        out += ": " + detail;
    if (!expected.empty()) {
        out += "; expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i)
                out += " | ";
            out += expected[i];
        }
    }
    return out;
}

} // namespace

SyntaxError::SyntaxError(std::size_t position, std::vector<std::string> expected, const std::string& detail)
    : Error(ErrorCode::SyntaxError, describe_syntax(position, expected, detail))
    , position_(position)
    , expected_(std::move(expected))
{
}

SourceUnavailable::SourceUnavailable(std::string origin, const std::string& reason)
    : Error(ErrorCode::SourceUnavailable, origin + " (" + reason + ")")
    , origin_(std::move(origin))
{
}

} // namespace feedql
