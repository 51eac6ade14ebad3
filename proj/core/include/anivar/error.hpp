#pragma once

#include <stdexcept>
#include <string>

namespace anivar {

enum class ErrorCode {
    NotExpansive,
    SeriesDivergence,
    ScaleOverflow,
    EmptyMask,
    ScaleTooFine,
    NonFinite,
    NotConjugable,
    InsufficientSamples,
    SingularGram,
    ZeroDenominator,
    DegenerateSeed,
    CoverFailure,
    FourierBoundFailure,
    ConfigError,
    UnknownSuite,
    InvalidArgument,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace anivar
