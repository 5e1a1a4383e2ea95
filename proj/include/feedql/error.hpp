#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace feedql {

enum class ErrorCode {
    MalformedXml,
    MissingRequired,
    BadGeo,
    InvariantViolation,
    SyntaxError,
    UnknownOperator,
    TypeMismatch,
    BadParam,
    CrossFeedFnHere,
    StaleUpdate,
    PageOutOfRange,
    ArchiveOutOfRange,
    UnknownHiddenField,
    DuplicateOrigin,
    SourceUnavailable,
    UnknownOrigin,
    UnknownScope,
    BadConfig,
    BadStore,
    Transport,
    HttpStatus,
};

std::string_view to_string(ErrorCode code);

/// Base of every error raised by the library. `what()` carries the code name
/// followed by the detail message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail);

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

/// Grammar failure with the byte offset into the decoded input and the
/// tokens the parser would have accepted there.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t position, std::vector<std::string> expected, const std::string& detail = {});

    std::size_t position() const noexcept { return position_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t position_;
    std::vector<std::string> expected_;
};

/// A source feed could not be fetched while executing a plan.
class SourceUnavailable : public Error {
public:
    SourceUnavailable(std::string origin, const std::string& reason);

    const std::string& origin() const noexcept { return origin_; }

private:
    std::string origin_;
};

} // namespace feedql
