#include "anivar/error.hpp"

namespace anivar {

const char* to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::NotExpansive: return "NotExpansive";
    case ErrorCode::SeriesDivergence: return "SeriesDivergence";
    case ErrorCode::ScaleOverflow: return "ScaleOverflow";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::ScaleTooFine: return "ScaleTooFine";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotConjugable: return "NotConjugable";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::SingularGram: return "SingularGram";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::DegenerateSeed: return "DegenerateSeed";
    case ErrorCode::CoverFailure: return "CoverFailure";
    case ErrorCode::FourierBoundFailure: return "FourierBoundFailure";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::UnknownSuite: return "UnknownSuite";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
{
}

void fail(ErrorCode code, const std::string& what)
{
    throw Error(code, what);
}

}  // namespace anivar
