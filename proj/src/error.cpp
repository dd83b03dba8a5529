#include "tractdist/error.hpp"

namespace tractdist {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::FewerThanTwoDistinctPoints: return "FewerThanTwoDistinctPoints";
        case Errc::NonFiniteCoordinate: return "NonFiniteCoordinate";
        case Errc::InvalidResampleCount: return "InvalidResampleCount";
        case Errc::InvalidParameter: return "InvalidParameter";
        case Errc::UnknownKind: return "UnknownKind";
        case Errc::TooManyPrototypes: return "TooManyPrototypes";
        case Errc::EmptyInput: return "EmptyInput";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::EmptyExampleBundle: return "EmptyExampleBundle";
        case Errc::KindMismatch: return "KindMismatch";
        case Errc::BothEmpty: return "BothEmpty";
        case Errc::InvalidSpec: return "InvalidSpec";
        case Errc::NoQueries: return "NoQueries";
        case Errc::BadMagic: return "BadMagic";
        case Errc::TruncatedFile: return "TruncatedFile";
        case Errc::CountMismatch: return "CountMismatch";
        case Errc::EmptyTractogram: return "EmptyTractogram";
        case Errc::MalformedJson: return "MalformedJson";
        case Errc::IndexOutOfRange: return "IndexOutOfRange";
        case Errc::HeaderMismatch: return "HeaderMismatch";
        case Errc::IoError: return "IoError";
    }
    return "Unknown";
}

ErrorCategory category(Errc code) noexcept {
    switch (code) {
        case Errc::BadMagic:
        case Errc::TruncatedFile:
        case Errc::CountMismatch:
        case Errc::EmptyTractogram:
        case Errc::MalformedJson:
        case Errc::IndexOutOfRange:
        case Errc::HeaderMismatch:
        case Errc::IoError:
        case Errc::InvalidSpec:
        case Errc::NonFiniteCoordinate:
        case Errc::FewerThanTwoDistinctPoints:
            return ErrorCategory::Data;
        default:
            return ErrorCategory::Contract;
    }
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace tractdist
