#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tractdist {

enum class Errc {
    FewerThanTwoDistinctPoints,
    NonFiniteCoordinate,
    InvalidResampleCount,
    InvalidParameter,
    UnknownKind,
    TooManyPrototypes,
    EmptyInput,
    DimensionMismatch,
    EmptyExampleBundle,
    KindMismatch,
    BothEmpty,
    InvalidSpec,
    NoQueries,
    // file formats
    BadMagic,
    TruncatedFile,
    CountMismatch,
    EmptyTractogram,
    MalformedJson,
    IndexOutOfRange,
    HeaderMismatch,
    IoError,
};

std::string_view to_string(Errc code) noexcept;

/// Coarse grouping used for CLI exit codes.
enum class ErrorCategory { Data, Contract };

ErrorCategory category(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what);

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace tractdist
