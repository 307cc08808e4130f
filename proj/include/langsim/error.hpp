#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace langsim {

enum class Errc {
    MissingFile,
    SchemaMismatch,
    ValueError,
    ZoneOrderMismatch,
    ZeroRowSum,
    EmptyInput,
    NonPositiveGdp,
    EmptyTrainingSet,
    SampleTooSmall,
    SampleTooLarge,
    DegenerateSample,
    TargetUnreachable,
    InsufficientReplications,
    ConfigError,
};

inline std::string_view to_string(Errc code) {
    switch (code) {
        case Errc::MissingFile: return "MissingFile";
        case Errc::SchemaMismatch: return "SchemaMismatch";
        case Errc::ValueError: return "ValueError";
        case Errc::ZoneOrderMismatch: return "ZoneOrderMismatch";
        case Errc::ZeroRowSum: return "ZeroRowSum";
        case Errc::EmptyInput: return "EmptyInput";
        case Errc::NonPositiveGdp: return "NonPositiveGdp";
        case Errc::EmptyTrainingSet: return "EmptyTrainingSet";
        case Errc::SampleTooSmall: return "SampleTooSmall";
        case Errc::SampleTooLarge: return "SampleTooLarge";
        case Errc::DegenerateSample: return "DegenerateSample";
        case Errc::TargetUnreachable: return "TargetUnreachable";
        case Errc::InsufficientReplications: return "InsufficientReplications";
        case Errc::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the Errc kinds so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace langsim
