#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

namespace forge {

/// Insertion-ordered JSON: records serialize with keys in schema order.
using Json = nlohmann::ordered_json;

enum class ErrorCode {
    validation,   // bad input or violated precondition
    parse,        // statement or response could not be parsed
    extraction,   // model output could not be turned into problems
    environment,  // toolchain, filesystem, store version
    lock,         // a second writer tried to open a store
    transport,    // backend or pool I/O failure (retryable)
    partial,      // round finished with some retryable failures
};

std::string_view to_string(ErrorCode code);

/// Exit status the CLI uses for an error of this code.
int exit_code_for(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, Json details = nullptr)
        : std::runtime_error(message), code_(code), details_(std::move(details)) {}

    ErrorCode code() const noexcept { return code_; }
    const Json& details() const noexcept { return details_; }

    /// {code, message, details}
    Json to_json() const;

private:
    ErrorCode code_;
    Json details_;
};

inline Error validation_error(const std::string& message, Json details = nullptr) {
    return Error(ErrorCode::validation, message, std::move(details));
}

}  // namespace forge
