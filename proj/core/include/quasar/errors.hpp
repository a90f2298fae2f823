#pragma once

#include <stdexcept>
#include <string>

namespace quasar {

enum class ErrorCode {
    // corpus
    SourceNotFound,
    CloneFailed,
    EmptyCorpus,
    ExternalConverterFailed,
    // criteria
    DuplicateCriterionId,
    EmptyCatalog,
    MalformedCatalogFile,
    // provider
    Timeout,
    HttpError,
    AuthMissing,
    CapabilityMismatch,
    ParseFailure,
    FixtureKeyMissing,
    ProviderUnavailable,
    // engine
    MixedCriterionIds,
    // qmodel
    WeightSumError,
    UnknownBinding,
    ThresholdOverlap,
    MalformedModelFile,
    AllLeavesMissing,
    // analysis
    MismatchedSeries,
    MissingCriterion,
    ScoreOutOfRange,
    UnknownCriterion,
    CriterionSetMismatch,
    MalformedBaseline,
    // cli
    MalformedConfig,
    MalformedReport,
    TargetNotWritable,
    Io,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace quasar
