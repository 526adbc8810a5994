#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace agentos {

enum class ErrorCode {
    UnknownModelProvider,
    DuplicateModelProvider,
    InvalidCharacter,
    AdapterOpenFailure,
    AdapterWriteFailure,
    DuplicateActionName,
    DuplicateProviderName,
    DuplicateEvaluatorName,
    DuplicateComponentName,
    RuntimeFrozen,
    PluginConflict,
    FileNotFound,
    MalformedJson,
    SchemaViolation,
    DuplicateId,
    NotFound,
    ObjectiveIndexError,
    InvalidArgument,
    NoRuleMatched,
    HttpFailure,
    Timeout,
    ModelProviderFailure,
    InsufficientFunds,
    UnknownWallet,
    UnknownPool,
    UnknownToken,
    SlippageExceeded,
    InvalidBase64,
    WriteFailure,
    NoProviderConfigured,
    EmptySwarm,
    EmptyInput,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace agentos
