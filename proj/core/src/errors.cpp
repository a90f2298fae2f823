#include "quasar/errors.hpp"

namespace quasar {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::SourceNotFound: return "SourceNotFound";
        case ErrorCode::CloneFailed: return "CloneFailed";
        case ErrorCode::EmptyCorpus: return "EmptyCorpus";
        case ErrorCode::ExternalConverterFailed: return "ExternalConverterFailed";
        case ErrorCode::DuplicateCriterionId: return "DuplicateCriterionId";
        case ErrorCode::EmptyCatalog: return "EmptyCatalog";
        case ErrorCode::MalformedCatalogFile: return "MalformedCatalogFile";
        case ErrorCode::Timeout: return "Timeout";
        case ErrorCode::HttpError: return "HttpError";
        case ErrorCode::AuthMissing: return "AuthMissing";
        case ErrorCode::CapabilityMismatch: return "CapabilityMismatch";
        case ErrorCode::ParseFailure: return "ParseFailure";
        case ErrorCode::FixtureKeyMissing: return "FixtureKeyMissing";
        case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
        case ErrorCode::MixedCriterionIds: return "MixedCriterionIds";
        case ErrorCode::WeightSumError: return "WeightSumError";
        case ErrorCode::UnknownBinding: return "UnknownBinding";
        case ErrorCode::ThresholdOverlap: return "ThresholdOverlap";
        case ErrorCode::MalformedModelFile: return "MalformedModelFile";
        case ErrorCode::AllLeavesMissing: return "AllLeavesMissing";
        case ErrorCode::MismatchedSeries: return "MismatchedSeries";
        case ErrorCode::MissingCriterion: return "MissingCriterion";
        case ErrorCode::ScoreOutOfRange: return "ScoreOutOfRange";
        case ErrorCode::UnknownCriterion: return "UnknownCriterion";
        case ErrorCode::CriterionSetMismatch: return "CriterionSetMismatch";
        case ErrorCode::MalformedBaseline: return "MalformedBaseline";
        case ErrorCode::MalformedConfig: return "MalformedConfig";
        case ErrorCode::MalformedReport: return "MalformedReport";
        case ErrorCode::TargetNotWritable: return "TargetNotWritable";
        case ErrorCode::Io: return "Io";
    }
    return "UnknownError";
}

} // namespace quasar
